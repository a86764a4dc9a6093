use std::path::PathBuf;

use num_rational::BigRational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tame_tori::cli::run;
use tame_tori::dpas::{
    context_evaluator, emit_neron_formula, emit_rationality_formula, emit_tower_conditions, parse,
    point_assignment, Budget, Truth,
};
use tame_tori::localfield::{LocalFieldSpec, TowerSpec};
use tame_tori::measures::{stabilized_volume, volume_neron_identity, DEFAULT_CLASS_BOUND};
use tame_tori::torus::{fixtures, PointRecipe, TorusContext};
use tame_tori::zlattice::{FiniteGroup, GammaLattice, IntMatrix};

fn cfg(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
        .display()
        .to_string()
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (vec![], vec![]);
    let argv = std::iter::once("tame-tori").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Norm-one torus of `F(sqrt pi)` times `G_m`, split by the same extension.
fn norm_one_times_split(field: LocalFieldSpec) -> TorusContext {
    let g = FiniteGroup::cyclic(2, 2).unwrap();
    let sign = IntMatrix::from_rows(&[vec![-1, 0], vec![0, 1]]);
    let x = GammaLattice::new(&g, 2, vec![IntMatrix::identity(2), sign]).unwrap();
    let tower = TowerSpec {
        b: vec!["0".into()],
        c: vec![vec!["-pi".into()], vec!["0".into()]],
    };
    TorusContext::new(g, x, None, tower, field).unwrap()
}

#[test]
fn volume_of_a_product_is_the_product_of_volumes() {
    for q in [3, 5] {
        let field = LocalFieldSpec::padic(q, 6);
        let a = volume_neron_identity(&fixtures::norm_one_ramified(field.clone()), 2, DEFAULT_CLASS_BOUND).unwrap();
        let b = volume_neron_identity(&fixtures::split(field.clone()), 2, DEFAULT_CLASS_BOUND).unwrap();
        let ab = volume_neron_identity(&norm_one_times_split(field), 2, DEFAULT_CLASS_BOUND).unwrap();
        assert_eq!(ab.volume, &a.volume * &b.volume, "q = {q}");
    }
}

#[test]
fn split_volume_is_one_minus_inverse_q() {
    for q in [5u32, 7] {
        let v = stabilized_volume(&fixtures::split(LocalFieldSpec::padic(q, 6)), 1, 3, DEFAULT_CLASS_BOUND).unwrap();
        assert_eq!(v.volume, BigRational::new((q - 1).into(), q.into()));
    }
}

#[test]
fn product_torus_component_group_adds() {
    let ctx = norm_one_times_split(LocalFieldSpec::padic(5, 8));
    let cg = ctx.component_group();
    assert_eq!(cg.torsion(), [2]);
    assert_eq!(cg.free_rank(), 1);
}

#[test]
fn doubling_the_budget_never_retracts_an_answer() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for ctx in [
        fixtures::norm_one_ramified(LocalFieldSpec::padic(5, 10)),
        fixtures::unramified_induced(LocalFieldSpec::padic(5, 10), "2"),
    ] {
        let phi = emit_neron_formula(&ctx);
        let small = context_evaluator(&ctx, Budget::default());
        let large = context_evaluator(&ctx, Budget::default().doubled());
        for _ in 0..20 {
            let t = PointRecipe::random(&ctx, &mut rng).realize(&ctx).unwrap();
            let env = point_assignment(&ctx, &t);
            let a = small.evaluate(&phi, &env);
            if a != Truth::Unknown {
                assert_eq!(large.evaluate(&phi, &env), a);
            }
        }
    }
}

#[test]
fn rationality_formula_matches_the_direct_check() {
    let ctx = fixtures::unramified_induced(LocalFieldSpec::padic(7, 10), "3");
    let phi = emit_rationality_formula(&ctx);
    let ev = context_evaluator(&ctx, Budget::default());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let t = PointRecipe::random(&ctx, &mut rng).realize(&ctx).unwrap();
        let want = ctx.is_rational_point(&t).unwrap();
        assert_eq!(ev.evaluate(&phi, &point_assignment(&ctx, &t)), Truth::from_bool(want));
    }
}

#[test]
fn emitted_formulas_print_and_parse_back() {
    let field = LocalFieldSpec::padic(5, 8);
    for ctx in [fixtures::split(field.clone()), fixtures::klein_four(field, "2")] {
        for phi in [
            emit_tower_conditions(ctx.group()),
            emit_rationality_formula(&ctx),
            emit_neron_formula(&ctx),
        ] {
            assert_eq!(parse(&phi.to_string()).unwrap(), phi);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn membership_is_stable_under_extra_precision(seed in any::<u64>()) {
        let lo = fixtures::norm_one_ramified(LocalFieldSpec::padic(5, 10));
        let hi = lo.with_precision(14).unwrap();
        let recipe = PointRecipe::random(&lo, &mut ChaCha8Rng::seed_from_u64(seed));
        let a = lo.neron_membership_direct(&recipe.realize(&lo).unwrap());
        let b = hi.neron_membership_direct(&recipe.realize(&hi).unwrap());
        if let (Ok(a), Ok(b)) = (a, b) {
            prop_assert_eq!(a, b);
        }
    }
}

#[test]
fn cli_component_group_and_validate() {
    let (code, out, _) = cli(&["component-group", &cfg("ramified-quadratic.cfg")]);
    assert_eq!((code, out.trim()), (0, "Z/2"));
    let (code, out, _) = cli(&["validate", &cfg("ramified-quadratic-eps.cfg")]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().all(|l| l.ends_with("pass")), "{out}");
}

#[test]
fn cli_member_reports_both_routes() {
    let (code, out, _) = cli(&["member", &cfg("ramified-quadratic.cfg"), "--point", "[1,0]"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("in ") && out.trim_end().ends_with("agree"), "{out}");
    let (code, out, _) = cli(&["member", &cfg("ramified-quadratic.cfg"), "--point", "[-1,0]"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("out "), "{out}");
    let (code, out, _) = cli(&["member", &cfg("split.cfg"), "--random", "5", "--seed", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn cli_exit_codes() {
    let (code, _, err) = cli(&["component-group", "/nonexistent.cfg"]);
    assert_eq!(code, 2, "{err}");
    let (code, _, _) = cli(&["fdeg", "2", "0"]);
    assert_ne!(code, 0);
    let (code, out, _) = cli(&["fdeg", "2", "4/5"]);
    assert_eq!((code, out.trim()), (0, "5/2"));
}
