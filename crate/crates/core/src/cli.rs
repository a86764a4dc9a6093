//! The `tame-tori` command line.
//!
//! Every command prints one record per line. Exit codes: 0 when an answer
//! was produced (including "out"), 2 for configuration or validation
//! failures, 3 for precision and lifting obstructions, 1 otherwise.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::ProjectConfig;
use crate::dpas::{
    context_evaluator, emit_neron_formula, emit_rationality_formula, emit_tower_conditions, parse,
    point_assignment, tower_assignment, Assignment, Budget, Evaluator, Formula, Sort, Value,
};
use crate::error::{Error, Result};
use crate::localfield::{format_fq, parse_felem, LocalField, LocalFieldSpec};
use crate::measures::{
    fit_rational_function, formal_degree, stabilized_volume, volume_neron_identity, Sample,
    VolumeSample,
};
use crate::torus::{parse_point_literals, PointRecipe, TorusContext};

#[derive(Parser, Debug)]
#[command(name = "tame-tori", version, about = "Tamely ramified tori over local fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    /// Project config (TOML).
    pub config: PathBuf,
    /// Overrides the certified precision of the config.
    #[arg(long)]
    pub precision: Option<i64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Checks the tower conditions; one line per condition.
    Validate(ConfigArgs),
    /// Decides membership in the identity component of the Néron model.
    Member {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Point as E-element literals, `[a, b]; [c, d]`.
        #[arg(long, conflicts_with = "random")]
        point: Option<String>,
        /// Checks this many pseudo-random rational points instead.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Writes the witness `r` here when the point is a member.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Prints the component group `X_I` of the Néron model.
    ComponentGroup(ConfigArgs),
    /// Writes one of the generated formulas.
    Emit {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(value_enum)]
        kind: FormulaKind,
        /// Output file for the formula (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also writes the tower parameters (and `--point`) as an assignment.
        #[arg(long)]
        assignment: Option<PathBuf>,
        #[arg(long, requires = "assignment")]
        point: Option<String>,
    },
    /// Evaluates a formula under an assignment.
    Eval {
        formula: PathBuf,
        #[arg(long)]
        assignment: PathBuf,
        /// Field as `padic:p:precision` or `laurent:q:precision`.
        #[arg(long, required_unless_present = "config")]
        field: Option<String>,
        /// Supplies the field and enables the `neron-lift` hint.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Scales the default search budget.
        #[arg(long, default_value_t = 1)]
        budget: u32,
    },
    /// Chart volumes of `T°(O_F)`.
    #[command(subcommand)]
    Vol(VolCommand),
    /// Formal degree `deg / vol`.
    Fdeg {
        degree: String,
        volume: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum VolCommand {
    /// Prints `q level count volume` records.
    Compute {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Residue field sizes, comma separated (default: the config's).
        #[arg(long, value_delimiter = ',')]
        q: Vec<u32>,
        #[arg(long, default_value_t = 1)]
        level: u32,
        /// Raises the level up to this bound until the volume stabilizes.
        #[arg(long)]
        max_level: Option<u32>,
    },
    /// Fits a motivic constant to volume records.
    Fit {
        /// Records file, `-` for stdin.
        records: PathBuf,
        /// `q` of the held-out record.
        #[arg(long)]
        holdout: u64,
        #[arg(long, default_value_t = 2)]
        degree: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormulaKind {
    Tower,
    Rationality,
    Neron,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        e if e.is_precision() => 3,
        Error::Config(_)
        | Error::Invalid(_)
        | Error::Syntax { .. }
        | Error::Sort { .. }
        | Error::NotGalois(_)
        | Error::NoIsomorphism(_)
        | Error::NotRational(_) => 2,
        _ => 1,
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Invalid(format!("i/o: {e}"))
}

fn read(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(io)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
}

impl ConfigArgs {
    fn load(&self) -> Result<ProjectConfig> {
        let cfg = ProjectConfig::load(&self.config)?;
        Ok(match self.precision {
            Some(p) => cfg.with_precision(p),
            None => cfg,
        })
    }
}

/// `padic:5:20` or `laurent:9:12`.
pub fn parse_field_spec(s: &str) -> Result<LocalFieldSpec> {
    let bad = || Error::Config(format!("field '{s}' is not kind:q:precision"));
    let parts: Vec<&str> = s.split(':').collect();
    let [kind, q, prec] = parts[..] else {
        return Err(bad());
    };
    let q: u32 = q.parse().map_err(|_| bad())?;
    let prec: i64 = prec.parse().map_err(|_| bad())?;
    match kind {
        "padic" => Ok(LocalFieldSpec::padic(q, prec)),
        "laurent" => Ok(LocalFieldSpec::laurent(q, prec)),
        _ => Err(bad()),
    }
}

/// Assignment files hold one `name SORT value` per line; `#` starts a
/// comment. `VF` values are field literals, `RF` values residue-field
/// literals, `ZZ` values integers.
pub fn parse_assignment(field: &LocalField, text: &str) -> Result<Assignment> {
    let mut env = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::Config(format!("assignment line {}: {msg}", no + 1));
        let mut it = line.splitn(3, char::is_whitespace);
        let (Some(name), Some(sort), Some(value)) = (it.next(), it.next(), it.next()) else {
            return Err(bad("expected 'name SORT value'"));
        };
        let value = value.trim();
        let v = match Sort::parse(sort) {
            Some(Sort::VF) => Value::VF(parse_felem(field, value).map_err(|e| bad(&e.to_string()))?),
            Some(Sort::RF) => {
                let x = parse_felem(field, value).map_err(|e| bad(&e.to_string()))?;
                Value::RF(field.residue(&x).ok_or_else(|| bad("residue literal is not integral"))?)
            }
            Some(Sort::ZZ) => Value::ZZ(value.parse().map_err(|_| bad("expected an integer"))?),
            None => return Err(bad("unknown sort")),
        };
        env.insert(name.to_string(), v);
    }
    Ok(env)
}

pub fn format_assignment(field: &LocalField, env: &Assignment) -> String {
    env.iter()
        .map(|(k, v)| match v {
            Value::VF(x) => format!("{k} VF {}\n", field.format(x)),
            Value::RF(x) => format!("{k} RF {}\n", format_fq(field.residue_field(), *x)),
            Value::ZZ(x) => format!("{k} ZZ {x}\n"),
        })
        .collect()
}

fn class_string(c: &[i64]) -> String {
    let parts: Vec<String> = c.iter().map(i64::to_string).collect();
    format!("[{}]", parts.join(","))
}

pub fn cmd_validate(cfg: &ProjectConfig, out: &mut dyn Write) -> Result<bool> {
    let report = cfg.validate()?;
    write!(out, "{report}").map_err(io)?;
    Ok(report.passed())
}

/// `in|out class lift`, where `lift` is `agree` or `obstructed`.
pub fn cmd_member(ctx: &TorusContext, point: &str, out: &mut dyn Write) -> Result<Option<String>> {
    let lits = parse_point_literals(point)?;
    let report = ctx.membership_report(|c| c.point_from_literals(&lits))?;
    let lift = if report.lift.is_some() { "agree" } else { "obstructed" };
    writeln!(
        out,
        "{} {} {lift}",
        if report.member { "in" } else { "out" },
        class_string(&report.class)
    )
    .map_err(io)?;
    Ok(report
        .lift
        .and_then(|l| l.witness)
        .map(|r| ctx.format_induced(&r)))
}

/// `in|out class lift point` for each of `count` random points.
pub fn cmd_member_random(ctx: &TorusContext, count: usize, seed: u64, out: &mut dyn Write) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..count {
        let recipe = PointRecipe::random(ctx, &mut rng);
        let report = ctx.membership_report(|c| recipe.realize(c))?;
        let t = recipe.realize(ctx)?;
        writeln!(
            out,
            "{} {} {} {}",
            if report.member { "in" } else { "out" },
            class_string(&report.class),
            if report.lift.is_some() { "agree" } else { "obstructed" },
            ctx.format_point(&t)
        )
        .map_err(io)?;
    }
    Ok(())
}

pub fn cmd_component_group(ctx: &TorusContext, out: &mut dyn Write) -> Result<()> {
    writeln!(out, "{}", ctx.component_group()).map_err(io)
}

pub fn cmd_emit(ctx: &TorusContext, kind: FormulaKind) -> Formula {
    match kind {
        FormulaKind::Tower => emit_tower_conditions(ctx.group()),
        FormulaKind::Rationality => emit_rationality_formula(ctx),
        FormulaKind::Neron => emit_neron_formula(ctx),
    }
}

pub fn cmd_eval(ev: &Evaluator, formula: &str, assignment: &str, out: &mut dyn Write) -> Result<()> {
    let phi = parse(formula)?;
    let env = parse_assignment(ev.field(), assignment)?;
    if let Some((name, sort)) = phi
        .free_vars()
        .into_iter()
        .find(|(n, s)| env.get(n).map(Value::sort) != Some(*s))
    {
        return Err(Error::Config(format!("assignment lacks {sort} value for {name}")));
    }
    writeln!(out, "{}", ev.evaluate(&phi, &env)).map_err(io)
}

/// Volumes at each `q`, computed concurrently, printed in the given order.
pub fn cmd_vol_compute(
    cfg: &ProjectConfig,
    qs: &[u32],
    level: u32,
    max_level: Option<u32>,
    out: &mut dyn Write,
) -> Result<()> {
    let qs = if qs.is_empty() { vec![cfg.field.q] } else { qs.to_vec() };
    let samples: Vec<Result<VolumeSample>> = qs
        .par_iter()
        .map(|&q| {
            let ctx = cfg.with_q(q).context()?;
            match max_level {
                Some(max) => stabilized_volume(&ctx, level, max, cfg.class_bound()),
                None => volume_neron_identity(&ctx, level, cfg.class_bound()),
            }
        })
        .collect();
    for s in samples {
        writeln!(out, "{}", s?.to_record()).map_err(io)?;
    }
    Ok(())
}

pub fn cmd_vol_fit(records: &str, holdout: u64, degree: usize, out: &mut dyn Write) -> Result<()> {
    let mut samples = vec![];
    let mut held = None;
    for line in records.lines().filter(|l| !l.trim().is_empty()) {
        let r = VolumeSample::from_record(line)?;
        let s = Sample::new(r.q, r.volume);
        if r.q == holdout {
            held = Some(s);
        } else {
            samples.push(s);
        }
    }
    let held = held.ok_or_else(|| Error::Invalid(format!("no record with q = {holdout}")))?;
    let c = fit_rational_function(&samples, &held, degree)?;
    writeln!(out, "{c}").map_err(io)
}

pub fn cmd_fdeg(degree: &str, volume: &str, out: &mut dyn Write) -> Result<()> {
    let parse_q = |s: &str| -> Result<BigRational> {
        s.parse()
            .map_err(|_| Error::Invalid(format!("'{s}' is not a rational number")))
    };
    let deg: u64 = degree
        .parse()
        .map_err(|_| Error::Invalid(format!("'{degree}' is not a positive integer")))?;
    let d = formal_degree(deg, &parse_q(volume)?)?;
    writeln!(out, "{d}").map_err(io)
}

fn run_command(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Validate(a) => Ok(if cmd_validate(&a.load()?, out)? { 0 } else { 2 }),
        Command::Member {
            cfg,
            point,
            random,
            seed,
            witness,
        } => {
            let ctx = cfg.load()?.context()?;
            match (point, random) {
                (Some(p), _) => {
                    let w = cmd_member(&ctx, &p, out)?;
                    if let (Some(path), Some(w)) = (witness, w) {
                        write_file(&path, &format!("{w}\n"))?;
                    }
                }
                (None, Some(n)) => cmd_member_random(&ctx, n, seed, out)?,
                (None, None) => return Err(Error::Config("give --point or --random".into())),
            }
            Ok(0)
        }
        Command::ComponentGroup(a) => {
            cmd_component_group(&a.load()?.context()?, out)?;
            Ok(0)
        }
        Command::Emit {
            cfg,
            kind,
            out: path,
            assignment,
            point,
        } => {
            let ctx = cfg.load()?.context()?;
            let text = format!("{}\n", cmd_emit(&ctx, kind));
            match path {
                Some(p) => write_file(&p, &text)?,
                None => out.write_all(text.as_bytes()).map_err(io)?,
            }
            if let Some(apath) = assignment {
                let env = match point {
                    Some(p) => point_assignment(&ctx, &ctx.point_from_literals(&parse_point_literals(&p)?)?),
                    None => tower_assignment(ctx.tower(), ctx.galois()),
                };
                write_file(&apath, &format_assignment(ctx.field(), &env))?;
            }
            Ok(0)
        }
        Command::Eval {
            formula,
            assignment,
            field,
            config,
            budget,
        } => {
            let mut b = Budget::default();
            for _ in 1..budget.max(1) {
                b = b.doubled();
            }
            let ev = match (config, field) {
                (Some(c), _) => context_evaluator(&ProjectConfig::load(&c)?.context()?, b),
                (None, Some(f)) => Evaluator::new(LocalField::new(parse_field_spec(&f)?)?, b),
                (None, None) => return Err(Error::Config("give --field or --config".into())),
            };
            cmd_eval(&ev, &read(&formula)?, &read(&assignment)?, out)?;
            Ok(0)
        }
        Command::Vol(VolCommand::Compute {
            cfg,
            q,
            level,
            max_level,
        }) => {
            cmd_vol_compute(&cfg.load()?, &q, level, max_level, out)?;
            Ok(0)
        }
        Command::Vol(VolCommand::Fit {
            records,
            holdout,
            degree,
        }) => {
            cmd_vol_fit(&read(&records)?, holdout, degree, out)?;
            Ok(0)
        }
        Command::Fdeg { degree, volume } => {
            cmd_fdeg(&degree, &volume, out)?;
            Ok(0)
        }
    }
}

/// Parses `args` (including the program name) and runs the command. Errors
/// go to `err` as `error: ...`; the return value is the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_command(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::tests::RAMIFIED_QUADRATIC;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (vec![], vec![]);
        let code = run(args, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn write_config(dir: &Path, text: &str) -> String {
        let p = dir.join("t.toml");
        fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn tmpdir(name: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("tame-tori-cli-{name}-{}", std::process::id()));
        fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn fdeg() {
        assert_eq!(run_str(&["tame-tori", "fdeg", "1", "1/2"]).1, "2\n");
        assert_eq!(run_str(&["tame-tori", "fdeg", "1", "0"]).0, 2);
    }

    #[test]
    fn member_and_component_group() {
        let d = tmpdir("member");
        let cfg = write_config(&d, RAMIFIED_QUADRATIC);
        let (code, out, _) = run_str(&["tame-tori", "component-group", &cfg]);
        assert_eq!((code, out.as_str()), (0, "Z/2\n"));
        let (code, out, _) = run_str(&["tame-tori", "member", &cfg, "--point", "[-1, 0]"]);
        assert_eq!((code, out.as_str()), (0, "out [1] agree\n"));
        let w = d.join("w.txt");
        let (code, out, _) = run_str(&[
            "tame-tori",
            "member",
            &cfg,
            "--point",
            "[-3/2, -1/2]",
            "--witness",
            w.to_str().unwrap(),
        ]);
        assert_eq!((code, out.as_str()), (0, "in [0] agree\n"));
        assert!(fs::read_to_string(&w).unwrap().starts_with('['));
        let (code, _, err) = run_str(&["tame-tori", "member", &cfg, "--point", "[0, 1]"]);
        assert_eq!(code, 2, "{err}");
    }

    #[test]
    fn emit_eval_round_trip() {
        let d = tmpdir("emit");
        let split = r#"
[group]
order = 1
inertia = 1
table = [[1]]
[lattice]
rank = 1
theta = [[[1]]]
[tower]
b = ["0"]
c = [["-pi"]]
[field]
kind = "padic"
q = 7
precision = 10
"#;
        let cfg = write_config(&d, split);
        for (point, want) in [("[3]", "true\n"), ("[7]", "false\n")] {
            let f = d.join("phi.txt");
            let a = d.join("a.txt");
            let (code, _, err) = run_str(&[
                "tame-tori",
                "emit",
                &cfg,
                "neron",
                "--out",
                f.to_str().unwrap(),
                "--assignment",
                a.to_str().unwrap(),
                "--point",
                point,
            ]);
            assert_eq!(code, 0, "{err}");
            let (code, out, err) = run_str(&[
                "tame-tori",
                "eval",
                f.to_str().unwrap(),
                "--assignment",
                a.to_str().unwrap(),
                "--config",
                &cfg,
            ]);
            assert_eq!((code, out.as_str()), (0, want), "{err}");
        }
    }

    #[test]
    fn eval_with_field_spec() {
        let d = tmpdir("eval");
        let f = d.join("f.txt");
        let a = d.join("a.txt");
        fs::write(&f, "(exists (y VF) :hint hensel (= (* y y) x))").unwrap();
        fs::write(&a, "x VF 1 + 5\n").unwrap();
        let (code, out, err) = run_str(&[
            "tame-tori",
            "eval",
            f.to_str().unwrap(),
            "--assignment",
            a.to_str().unwrap(),
            "--field",
            "padic:5:10",
        ]);
        assert_eq!((code, out.as_str()), (0, "true\n"), "{err}");
    }

    #[test]
    fn validate_exit_codes() {
        let d = tmpdir("validate");
        let cfg = write_config(&d, RAMIFIED_QUADRATIC);
        let (code, out, _) = run_str(&["tame-tori", "validate", &cfg]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 5);
        let bad = write_config(&d, &RAMIFIED_QUADRATIC.replace("-pi", "-1"));
        let (code, out, _) = run_str(&["tame-tori", "validate", &bad]);
        assert_eq!(code, 2);
        assert!(out.contains("eisenstein-c fail"));
    }

    #[test]
    fn volume_records_fit() {
        let d = tmpdir("vol");
        let cfg = write_config(
            &d,
            "[group]\norder = 1\ninertia = 1\ntable = [[1]]\n[lattice]\nrank = 1\ntheta = [[[1]]]\n\
             [tower]\nb = [\"0\"]\nc = [[\"-pi\"]]\n[field]\nkind = \"padic\"\nq = 5\nprecision = 6\n",
        );
        let (code, out, err) = run_str(&["tame-tori", "vol", "compute", &cfg, "--q", "5,7,11,13,17", "--level", "1"]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(out.lines().next(), Some("5 1 4 4/5"));
        let recs = d.join("recs.txt");
        fs::write(&recs, &out).unwrap();
        let (code, out, err) =
            run_str(&["tame-tori", "vol", "fit", recs.to_str().unwrap(), "--holdout", "17"]);
        assert_eq!((code, out.as_str()), (0, "1 - L^-1\n"), "{err}");
    }
}
