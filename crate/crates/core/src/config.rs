//! Project configuration: the fixed choices, the tower parameters, the base
//! field and search budgets, as one TOML file.
//!
//! ```toml
//! [group]
//! order = 2
//! inertia = 2
//! table = [[1, 2], [2, 1]]   # one-based; the first `inertia` elements form I
//!
//! [lattice]
//! rank = 1
//! theta = [[[1]], [[-1]]]    # one matrix per group element
//!
//! [tower]
//! b = ["0"]                  # f coefficients, x^f + sum b_i x^i
//! c = [["-pi"], ["0"]]       # e coefficients, each f coordinates over F
//!
//! [field]
//! kind = "padic"             # or "laurent"
//! q = 5
//! precision = 20
//! ```
//!
//! Optional sections: `[resolution]` with `surjection` (`n x R`) and
//! `action` (one `R x R` permutation matrix per element), and `[budget]`
//! with `zz_window`, `vf_depth`, `vf_candidates` and `class_bound`.

use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::dpas::Budget;
use crate::error::{Error, Result};
use crate::localfield::{
    check_eisenstein, check_unramified_poly, compute_automorphisms, LocalField, LocalFieldSpec,
    TowerSpec,
};
use crate::measures::DEFAULT_CLASS_BOUND;
use crate::torus::{TorusContext, GUARD_DIGITS};
use crate::zlattice::{FiniteGroup, GammaLattice, IntMatrix, Resolution};

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GroupSection {
    pub order: usize,
    pub inertia: usize,
    pub table: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    pub rank: usize,
    pub theta: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ResolutionSection {
    pub surjection: Vec<Vec<i64>>,
    pub action: Vec<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TowerSection {
    pub b: Vec<String>,
    pub c: Vec<Vec<String>>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Padic,
    Laurent,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    pub kind: FieldKind,
    pub q: u32,
    pub precision: i64,
}

#[derive(Clone, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct BudgetSection {
    pub zz_window: Option<i64>,
    pub vf_depth: Option<i64>,
    pub vf_candidates: Option<u64>,
    pub class_bound: Option<u64>,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    pub group: GroupSection,
    pub lattice: LatticeSection,
    pub resolution: Option<ResolutionSection>,
    pub tower: TowerSection,
    pub field: FieldSection,
    #[serde(default)]
    pub budget: BudgetSection,
}

fn matrix(rows: &[Vec<i64>], what: &str) -> Result<IntMatrix> {
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::Config(format!("{what}: rows have different lengths")));
    }
    Ok(IntMatrix::from_rows(rows))
}

fn config_err(context: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::Config(format!("{context}: {e}"))
}

/// Status of one validation check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail(String),
    Warn(String),
}

/// One line per check, in the order they ran.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<(String, Status)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(|(_, s)| matches!(s, Status::Fail(_)))
    }

    fn push(&mut self, name: &str, status: Status) {
        self.checks.push((name.to_string(), status));
    }
}

impl fmt::Display for ValidationReport {
    /// `name pass`, `name fail: reason` or `name warn: reason`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, s) in &self.checks {
            match s {
                Status::Pass => writeln!(f, "{name} pass")?,
                Status::Fail(m) => writeln!(f, "{name} fail: {m}")?,
                Status::Warn(m) => writeln!(f, "{name} warn: {m}")?,
            }
        }
        Ok(())
    }
}

impl ProjectConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn field_spec(&self) -> LocalFieldSpec {
        let FieldSection { kind, q, precision } = self.field;
        match kind {
            FieldKind::Padic => LocalFieldSpec::padic(q, precision),
            FieldKind::Laurent => LocalFieldSpec::laurent(q, precision),
        }
    }

    /// The same project over a base field with residue field of size `q`.
    pub fn with_q(&self, q: u32) -> Self {
        let mut c = self.clone();
        c.field.q = q;
        c
    }

    pub fn with_precision(&self, precision: i64) -> Self {
        let mut c = self.clone();
        c.field.precision = precision;
        c
    }

    pub fn budget(&self) -> Budget {
        let d = Budget::default();
        Budget {
            zz_window: self.budget.zz_window.unwrap_or(d.zz_window),
            vf_depth: self.budget.vf_depth.unwrap_or(d.vf_depth),
            vf_candidates: self.budget.vf_candidates.unwrap_or(d.vf_candidates),
            certify: None,
        }
    }

    pub fn class_bound(&self) -> u64 {
        self.budget.class_bound.unwrap_or(DEFAULT_CLASS_BOUND)
    }

    pub fn tower_spec(&self) -> TowerSpec {
        TowerSpec {
            b: self.tower.b.clone(),
            c: self.tower.c.clone(),
        }
    }

    pub fn group(&self) -> Result<FiniteGroup> {
        let g = &self.group;
        if g.table.len() != g.order || g.table.iter().any(|r| r.len() != g.order) {
            return Err(Error::Config(format!(
                "group.table must be {0} rows of {0} entries",
                g.order
            )));
        }
        FiniteGroup::from_one_based(g.order, g.inertia, &g.table.concat())
            .map_err(config_err("group"))
    }

    pub fn lattice(&self, group: &FiniteGroup) -> Result<GammaLattice> {
        let l = &self.lattice;
        if l.theta.len() != group.order() {
            return Err(Error::Config(format!(
                "lattice.theta needs one matrix per group element ({})",
                group.order()
            )));
        }
        let thetas = l
            .theta
            .iter()
            .enumerate()
            .map(|(g, rows)| {
                let m = matrix(rows, &format!("lattice.theta[{g}]"))?;
                if m.shape() != (l.rank, l.rank) {
                    return Err(Error::Config(format!(
                        "lattice.theta[{g}] must be {0}x{0}",
                        l.rank
                    )));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        GammaLattice::new(group, l.rank, thetas).map_err(config_err("lattice"))
    }

    pub fn resolution(&self, group: &FiniteGroup, lattice: &GammaLattice) -> Result<Option<Resolution>> {
        let Some(r) = &self.resolution else {
            return Ok(None);
        };
        let surj = matrix(&r.surjection, "resolution.surjection")?;
        let action = r
            .action
            .iter()
            .enumerate()
            .map(|(g, rows)| matrix(rows, &format!("resolution.action[{g}]")))
            .collect::<Result<Vec<_>>>()?;
        Resolution::explicit(lattice, group, surj, &action)
            .map(Some)
            .map_err(config_err("resolution"))
    }

    /// Builds the torus; structural problems are config errors.
    pub fn context(&self) -> Result<TorusContext> {
        let group = self.group()?;
        let lattice = self.lattice(&group)?;
        let res = self.resolution(&group, &lattice)?;
        TorusContext::new(group, lattice, res, self.tower_spec(), self.field_spec())
    }

    /// Runs the tower and Galois checks one by one. Structural errors (bad
    /// tables, wrong dimensions) are returned as `Err`.
    pub fn validate(&self) -> Result<ValidationReport> {
        let group = self.group()?;
        let lattice = self.lattice(&group)?;
        self.resolution(&group, &lattice)?;
        let (m, e) = (group.order(), group.inertia_order());
        let f = m / e;
        if self.tower.c.len() != e || self.tower.b.len() != f {
            return Err(Error::Config(format!(
                "tower needs {f} coefficients in b and {e} in c for |G| = {m}, |I| = {e}"
            )));
        }
        let spec = self.field_spec();
        let field = LocalField::new(spec.with_precision(spec.precision + GUARD_DIGITS))
            .map_err(config_err("field"))?;
        let ts = self.tower_spec();
        let b = ts.parse_b(&field).map_err(config_err("tower.b"))?;
        let c = ts.parse_c(&field).map_err(config_err("tower.c"))?;

        let mut report = ValidationReport { checks: vec![] };
        let p = spec.residue_characteristic() as usize;
        if e % p == 0 {
            report.push("tameness", Status::Warn(format!("p = {p} divides e = {e}")));
        } else if p <= group.order() {
            report.push(
                "tameness",
                Status::Warn(format!("p = {p} does not exceed |G| = {}", group.order())),
            );
        } else if !group.tameness_possible() {
            report.push(
                "tameness",
                Status::Warn("G is not cyclic-by-cyclic with a complement of order f".into()),
            );
        } else {
            report.push("tameness", Status::Pass);
        }
        let irreducible = check_unramified_poly(&field, &b).unwrap_or(false);
        report.push(
            "residue-irreducible-b",
            if irreducible {
                Status::Pass
            } else {
                Status::Fail("the reduction of b is not irreducible".into())
            },
        );
        let eisenstein = check_eisenstein(&field, &c);
        report.push(
            "eisenstein-c",
            if eisenstein {
                Status::Pass
            } else {
                Status::Fail("c is not Eisenstein over L".into())
            },
        );
        if !(irreducible && eisenstein) {
            report.push("galois-group", Status::Fail("skipped: tower is invalid".into()));
            report.push("inertia-fixes-l", Status::Fail("skipped: tower is invalid".into()));
            return Ok(report);
        }
        let tower = ts.build(&field)?;
        let n = spec.precision;
        let galois = match compute_automorphisms(&tower, &group) {
            Ok(g) => g,
            Err(err) => {
                report.push("galois-group", Status::Fail(err.to_string()));
                report.push("inertia-fixes-l", Status::Fail("skipped: no automorphisms".into()));
                return Ok(report);
            }
        };
        let basis: Vec<_> = (0..m)
            .map(|k| {
                let mut z = tower.zero();
                z[k] = field.one();
                z
            })
            .collect();
        let law = galois.check_group_law(&tower, &group, n) == Some(true)
            && (0..m).all(|g| galois.is_ring_automorphism(&tower, g, &basis, n) == Some(true));
        report.push(
            "galois-group",
            if law {
                Status::Pass
            } else {
                Status::Fail("sigma does not realize the group table".into())
            },
        );
        let fixes = (0..e).all(|g| galois.fixes_l(&tower, g, n) == Some(true))
            && (e..m).all(|g| galois.fixes_l(&tower, g, n) == Some(false))
            && galois.order_on_l(&tower, m - 1, n) == Some(f);
        report.push(
            "inertia-fixes-l",
            if fixes {
                Status::Pass
            } else {
                Status::Fail("I is not the subgroup fixing L".into())
            },
        );
        Ok(report)
    }
}
