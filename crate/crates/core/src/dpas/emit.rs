//! Formulas for the tower conditions, rationality of torus points and
//! membership in the identity component of the Néron model.
//!
//! Variable names:
//! - `b_i`, `c_j_i`: coefficients of `b` and the `L`-coordinates of `c_j`;
//! - `s_g_r_k`: row `r` of column `k` of the matrix of `sigma_g`;
//! - `t_i_k`: coordinate `k` of the `E`-element `t_i`;
//! - `r_b_k`: coordinate `k` of the induced-torus coordinate `r_b`;
//! - `v_o`: `ord_E` of the representative coordinate of inertia orbit `o`.
//!
//! The tower parameters stay free variables because their values are
//! `p`-adic numbers, which the term language cannot write down.

use super::ast::{Cmp, Formula, Sort, Term};
use super::eval::{Assignment, Budget, Evaluator, Value};
use super::hints::{HintProvider, HintRequest, HintResult};
use crate::error::{Error, Result};
use crate::localfield::tower::{apply_columns, e_mul};
use crate::localfield::{CoeffRing, EElem, Tower};
use crate::localfield::GaloisData;
use crate::torus::{TorusContext, TorusPoint};
use crate::zlattice::{FiniteGroup, IntMatrix};

/// Terms of one sort as a coefficient ring, folding integer constants.
struct Sym(Sort);

fn int_of(t: &Term) -> Option<i64> {
    match t {
        Term::Int(k, _) => Some(*k),
        _ => None,
    }
}

impl CoeffRing for Sym {
    type Elem = Term;
    fn zero(&self) -> Term {
        Term::Int(0, self.0)
    }
    fn one(&self) -> Term {
        Term::Int(1, self.0)
    }
    fn add(&self, a: &Term, b: &Term) -> Term {
        match (int_of(a), int_of(b)) {
            (Some(0), _) => b.clone(),
            (_, Some(0)) => a.clone(),
            (Some(x), Some(y)) if x.checked_add(y).is_some() => Term::Int(x + y, self.0),
            _ => {
                let mut parts = vec![];
                for t in [a, b] {
                    match t {
                        Term::Add(v) => parts.extend(v.iter().cloned()),
                        t => parts.push(t.clone()),
                    }
                }
                Term::Add(parts)
            }
        }
    }
    fn sub(&self, a: &Term, b: &Term) -> Term {
        match (int_of(a), int_of(b)) {
            (_, Some(0)) => a.clone(),
            (Some(x), Some(y)) if x.checked_sub(y).is_some() => Term::Int(x - y, self.0),
            (Some(0), _) => Term::Neg(Box::new(b.clone())),
            _ => Term::Sub(Box::new(a.clone()), Box::new(b.clone())),
        }
    }
    fn mul(&self, a: &Term, b: &Term) -> Term {
        match (int_of(a), int_of(b)) {
            (Some(0), _) | (_, Some(0)) => self.zero(),
            (Some(1), _) => b.clone(),
            (_, Some(1)) => a.clone(),
            (Some(x), Some(y)) if x.checked_mul(y).is_some() => Term::Int(x * y, self.0),
            _ => {
                let mut parts = vec![];
                for t in [a, b] {
                    match t {
                        Term::Mul(v) => parts.extend(v.iter().cloned()),
                        t => parts.push(t.clone()),
                    }
                }
                Term::Mul(parts)
            }
        }
    }
}

const VF: Sym = Sym(Sort::VF);

fn vf(name: String) -> Term {
    Term::Var(name, Sort::VF)
}

fn zero_vf() -> Term {
    Term::Int(0, Sort::VF)
}

fn eq(a: Term, b: Term) -> Formula {
    Formula::Eq(a, b)
}

fn is_zero(a: &Term) -> Formula {
    eq(a.clone(), zero_vf())
}

fn ord(a: &Term) -> Term {
    Term::Ord(Box::new(a.clone()))
}

fn zz(k: i64) -> Term {
    Term::Int(k, Sort::ZZ)
}

/// `a = 0` or `ord a >= k`.
fn ord_at_least(a: &Term, k: i64) -> Formula {
    Formula::or(vec![is_zero(a), Formula::Cmp(Cmp::Ge, ord(a), zz(k))])
}

fn vec_eq(a: &[Term], b: &[Term]) -> Vec<Formula> {
    a.iter().zip(b).map(|(x, y)| eq(x.clone(), y.clone())).collect()
}

fn unit_vector(m: usize, k: usize) -> Vec<Term> {
    (0..m).map(|i| Term::Int((i == k) as i64, Sort::VF)).collect()
}

/// Symbolic tower data: `b`, `c` and the columns of every `sigma_g`.
struct Params {
    b: Vec<Term>,
    c: Vec<Vec<Term>>,
    sigma: Vec<Vec<Vec<Term>>>,
}

impl Params {
    fn new(m: usize, f: usize, e: usize) -> Self {
        Params {
            b: (0..f).map(|i| vf(format!("b_{i}"))).collect(),
            c: (0..e)
                .map(|j| (0..f).map(|i| vf(format!("c_{j}_{i}"))).collect())
                .collect(),
            sigma: (0..m)
                .map(|g| {
                    (0..m)
                        .map(|k| (0..m).map(|r| vf(format!("s_{g}_{r}_{k}"))).collect())
                        .collect()
                })
                .collect(),
        }
    }

    fn mul(&self, u: &[Term], v: &[Term]) -> Vec<Term> {
        e_mul(&VF, &self.b, &self.c, u, v)
    }

    fn apply(&self, g: usize, z: &[Term]) -> Vec<Term> {
        apply_columns(&VF, &self.sigma[g], z)
    }

    fn one(&self, m: usize) -> Vec<Term> {
        unit_vector(m, 0)
    }

    /// `prod_i z_i^{k_i}` for non-negative exponents.
    fn monomial(&self, m: usize, z: &[Vec<Term>], exps: &[i64]) -> Vec<Term> {
        let mut acc = self.one(m);
        for (zi, &k) in z.iter().zip(exps) {
            for _ in 0..k {
                acc = self.mul(&acc, zi);
            }
        }
        acc
    }

    /// `prod_i z_i^{row_i} = w` with negative exponents moved to the right.
    fn monomial_eq(&self, m: usize, z: &[Vec<Term>], row: &[i64], w: &[Term]) -> Vec<Formula> {
        let pos: Vec<i64> = row.iter().map(|&k| k.max(0)).collect();
        let neg: Vec<i64> = row.iter().map(|&k| (-k).max(0)).collect();
        let lhs = self.monomial(m, z, &pos);
        let rhs = self.mul(w, &self.monomial(m, z, &neg));
        vec_eq(&lhs, &rhs)
    }
}

/// Residue of `b` equals the `RF`-term `p`.
fn residue_is(b: &Term, p: Term) -> Formula {
    let rf0 = Term::Int(0, Sort::RF);
    Formula::or(vec![
        Formula::and(vec![ord_at_least(b, 1), eq(p.clone(), rf0)]),
        Formula::and(vec![
            Formula::not(is_zero(b)),
            eq(ord(b), zz(0)),
            eq(p, Term::Ac(Box::new(b.clone()))),
        ]),
    ])
}

/// No monic factor of degree `d` divides the reduction of
/// `x^f + sum b_i x^i`.
fn no_factor_of_degree(b: &[Term], d: usize) -> Formula {
    let f = b.len();
    let rf = Sym(Sort::RF);
    let var = |n: String| Term::Var(n, Sort::RF);
    let mut g: Vec<Term> = (0..d).map(|i| var(format!("g_{i}"))).collect();
    g.push(rf.one());
    let mut h: Vec<Term> = (0..f - d).map(|i| var(format!("h_{i}"))).collect();
    h.push(rf.one());
    let mut prod = vec![rf.zero(); f + 1];
    for (i, gi) in g.iter().enumerate() {
        for (j, hj) in h.iter().enumerate() {
            prod[i + j] = rf.add(&prod[i + j], &rf.mul(gi, hj));
        }
    }
    let body = Formula::and(
        b.iter()
            .zip(prod)
            .map(|(bk, pk)| residue_is(bk, pk))
            .collect(),
    );
    let vars = (0..d)
        .map(|i| (format!("g_{i}"), Sort::RF))
        .chain((0..f - d).map(|i| (format!("h_{i}"), Sort::RF)))
        .collect();
    Formula::not(Formula::exists(vars, None, body))
}

/// Conditions on `(b, c, sigma)` for a group `G` with inertia `I` and
/// residue degree `f`: `b` integral with irreducible reduction, `c`
/// Eisenstein over `L`, each `sigma_g` a ring endomorphism of `E`, the
/// group law, and `sigma_g` fixing `L` exactly when `g` lies in `I`.
pub fn emit_tower_conditions(group: &FiniteGroup) -> Formula {
    let (m, e) = (group.order(), group.inertia_order());
    let f = m / e;
    if m == 1 {
        return Formula::True;
    }
    let p = Params::new(m, f, e);
    let mut parts = vec![];
    parts.extend(p.b.iter().map(|b| ord_at_least(b, 0)));
    parts.extend((1..=f / 2).map(|d| no_factor_of_degree(&p.b, d)));
    parts.extend(p.c.iter().flatten().map(|c| ord_at_least(c, 1)));
    parts.push(Formula::or(
        p.c[0]
            .iter()
            .map(|c| Formula::and(vec![Formula::not(is_zero(c)), eq(ord(c), zz(1))]))
            .collect(),
    ));
    for g in 0..m {
        parts.extend(vec_eq(&p.sigma[g][0], &p.one(m)));
        for a in 0..m {
            for b in a..m {
                let prod = p.mul(&unit_vector(m, a), &unit_vector(m, b));
                parts.extend(vec_eq(&p.apply(g, &prod), &p.mul(&p.sigma[g][a], &p.sigma[g][b])));
            }
        }
    }
    parts.extend(vec_eq(&p.sigma[0].concat(), &(0..m).flat_map(|k| unit_vector(m, k)).collect::<Vec<_>>()));
    for a in 0..m {
        for b in 0..m {
            let ab = group.mul(a, b);
            for k in 0..m {
                parts.extend(vec_eq(&p.apply(a, &p.sigma[b][k]), &p.sigma[ab][k]));
            }
        }
    }
    if f > 1 {
        for g in 0..m {
            let fixes = Formula::and(vec_eq(&p.sigma[g][1], &unit_vector(m, 1)));
            parts.push(if g < e { fixes } else { Formula::not(fixes) });
        }
    }
    Formula::and(parts)
}

fn point_vars(n: usize, m: usize) -> Vec<Vec<Term>> {
    (0..n)
        .map(|i| (0..m).map(|k| vf(format!("t_{i}_{k}"))).collect())
        .collect()
}

fn rationality(ctx: &TorusContext, p: &Params, t: &[Vec<Term>]) -> Formula {
    let m = ctx.tower().m();
    let mut parts = vec![];
    for g in 1..ctx.group().order() {
        let sig: Vec<Vec<Term>> = t.iter().map(|ti| p.apply(g, ti)).collect();
        let th = ctx.lattice().theta(g);
        for j in 0..ctx.rank() {
            parts.extend(p.monomial_eq(m, &sig, th.row(j), &t[j]));
        }
    }
    Formula::and(parts)
}

/// `gamma . t = t` for every `gamma`, as polynomial identities in the
/// coordinates `t_i_k` and the tower parameters.
pub fn emit_rationality_formula(ctx: &TorusContext) -> Formula {
    let tw = ctx.tower();
    let p = Params::new(ctx.group().order(), tw.f(), tw.e());
    rationality(ctx, &p, &point_vars(ctx.rank(), tw.m()))
}

/// `ord_E z = v`: `v <= e ord(z_k) + j_k` for every nonzero coordinate,
/// with equality for one of them.
fn ord_e_is(z: &[Term], v: &Term, e: usize, f: usize) -> Formula {
    let bound = |k: usize, zk: &Term| {
        let j = (k / f) as i64;
        Term::Add(vec![Term::Mul(vec![zz(e as i64), ord(zk)]), zz(j)])
    };
    let lower = z
        .iter()
        .enumerate()
        .map(|(k, zk)| Formula::or(vec![is_zero(zk), Formula::Cmp(Cmp::Le, v.clone(), bound(k, zk))]))
        .collect();
    let attained = z
        .iter()
        .enumerate()
        .map(|(k, zk)| Formula::and(vec![Formula::not(is_zero(zk)), eq(v.clone(), bound(k, zk))]))
        .collect();
    Formula::and(vec![Formula::and(lower), Formula::or(attained)])
}

/// Rationality of `t` and an inertia-fixed `r` in the induced torus with
/// `alpha(r) = t` and `beta(r) = 0` in `X_I`. The `r`-quantifier carries the
/// `neron-lift` hint.
pub fn emit_neron_formula(ctx: &TorusContext) -> Formula {
    let tw = ctx.tower();
    let (m, e, f) = (tw.m(), tw.e(), tw.f());
    let p = Params::new(ctx.group().order(), f, e);
    let t = point_vars(ctx.rank(), m);
    let res = ctx.resolution();
    let big_r = res.rank();
    let r: Vec<Vec<Term>> = (0..big_r)
        .map(|b| (0..m).map(|k| vf(format!("r_{b}_{k}"))).collect())
        .collect();
    let inert = ctx.inertia();

    let mut body = vec![];
    // inertia-fixed: r_{tau b} = sigma_tau(r_b)
    if inert.order() > 1 {
        let tau = inert.tau();
        let perm = res.permutation(tau);
        for b in 0..big_r {
            body.extend(vec_eq(&p.apply(tau, &r[b]), &r[perm[b]]));
        }
    }
    let a = res.surjection();
    for j in 0..ctx.rank() {
        body.extend(p.monomial_eq(m, &r, a.row(j), &t[j]));
    }

    // beta(r) = 0 in the canonical coordinates of X_I
    let orbits = res.orbits(&inert.elements);
    let x_i = &inert.coinvariants;
    let proj: IntMatrix = x_i.projection() * a;
    let v: Vec<Term> = (0..orbits.len())
        .map(|o| Term::Var(format!("v_{o}"), Sort::ZZ))
        .collect();
    let mut classes = vec![];
    for i in 0..proj.rows() {
        let terms: Vec<Term> = orbits
            .iter()
            .zip(&v)
            .filter(|(o, _)| proj[(i, o.rep)] != 0)
            .map(|(o, vo)| Term::Mul(vec![zz(proj[(i, o.rep)]), vo.clone()]))
            .collect();
        let sum = match terms.len() {
            0 => continue,
            1 => terms.into_iter().next().expect("one"),
            _ => Term::Add(terms),
        };
        classes.push(match x_i.torsion().get(i) {
            Some(&d) => Formula::Cong(d as u64, sum, zz(0)),
            None => eq(sum, zz(0)),
        });
    }
    let mut beta = Formula::and(classes);
    for (o, orbit) in orbits.iter().enumerate().rev() {
        beta = Formula::exists(
            vec![(format!("v_{o}"), Sort::ZZ)],
            None,
            Formula::and(vec![ord_e_is(&r[orbit.rep], &v[o], e, f), beta]),
        );
    }
    body.push(beta);

    let r_vars = (0..big_r)
        .flat_map(|b| (0..m).map(move |k| (format!("r_{b}_{k}"), Sort::VF)))
        .collect();
    Formula::and(vec![
        rationality(ctx, &p, &t),
        Formula::exists(r_vars, Some("neron-lift"), Formula::and(body)),
    ])
}

/// Values of `b_i`, `c_j_i` and `s_g_r_k` for a built tower.
pub fn tower_assignment(tower: &Tower, galois: &GaloisData) -> Assignment {
    let mut env = Assignment::new();
    for (i, b) in tower.b().iter().enumerate() {
        env.insert(format!("b_{i}"), Value::VF(b.clone()));
    }
    for (j, cj) in tower.c().iter().enumerate() {
        for (i, c) in cj.iter().enumerate() {
            env.insert(format!("c_{j}_{i}"), Value::VF(c.clone()));
        }
    }
    for g in 0..galois.order() {
        for (k, col) in galois.columns(g).iter().enumerate() {
            for (r, x) in col.iter().enumerate() {
                env.insert(format!("s_{g}_{r}_{k}"), Value::VF(x.clone()));
            }
        }
    }
    env
}

/// Tower parameters together with the coordinates `t_i_k` of `t`.
pub fn point_assignment(ctx: &TorusContext, t: &TorusPoint) -> Assignment {
    let mut env = tower_assignment(ctx.tower(), ctx.galois());
    for (i, ti) in t.coords.iter().enumerate() {
        for (k, x) in ti.iter().enumerate() {
            env.insert(format!("t_{i}_{k}"), Value::VF(x.clone()));
        }
    }
    env
}

/// Reads the point `t` back out of an assignment.
pub fn point_from_assignment(ctx: &TorusContext, env: &Assignment) -> Result<TorusPoint> {
    let m = ctx.tower().m();
    let coords = (0..ctx.rank())
        .map(|i| {
            (0..m)
                .map(|k| match env.get(&format!("t_{i}_{k}")) {
                    Some(Value::VF(x)) => Ok(ctx.field().coerce(x)),
                    _ => Err(Error::Invalid(format!("assignment lacks VF value t_{i}_{k}"))),
                })
                .collect::<Result<EElem>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TorusPoint { coords })
}

/// `neron-lift`: the witness produced by the lift route. Complete, since
/// `beta(r)` equals the Kottwitz class of `t` for every `r` with
/// `alpha(r) = t`, so when the lift finds a nonzero class no `r` works.
pub struct NeronLift {
    ctx: TorusContext,
}

impl NeronLift {
    pub fn new(ctx: TorusContext) -> Self {
        NeronLift { ctx }
    }
}

impl HintProvider for NeronLift {
    fn propose(&self, req: &HintRequest<'_>) -> Option<HintResult> {
        if req.name != "neron-lift" {
            return None;
        }
        let t = point_from_assignment(&self.ctx, req.env).ok()?;
        let out = self.ctx.neron_membership_lift(&t).ok()?;
        let candidates = match out.witness {
            Some(r) => vec![r
                .coords
                .iter()
                .flatten()
                .map(|x| Value::VF(x.clone()))
                .collect()],
            None => vec![],
        };
        Some(HintResult {
            candidates,
            complete: true,
        })
    }
}

/// An evaluator over the context's field that certifies equalities at the
/// context precision and knows the `neron-lift` hint.
pub fn context_evaluator(ctx: &TorusContext, budget: Budget) -> Evaluator {
    let budget = Budget {
        certify: budget.certify.or(Some(ctx.precision())),
        ..budget
    };
    Evaluator::new(ctx.field().clone(), budget).with_hint(Box::new(NeronLift::new(ctx.clone())))
}

#[cfg(test)]
mod tests {
    use super::super::eval::Truth;
    use super::super::parse::parse;
    use super::*;
    use crate::localfield::LocalFieldSpec;
    use crate::torus::{fixtures, PointRecipe};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn norm_one() -> TorusContext {
        fixtures::norm_one_ramified(LocalFieldSpec::padic(5, 10))
    }

    fn lit(ctx: &TorusContext, s: &str) -> TorusPoint {
        ctx.point_from_literals(&crate::torus::parse_point_literals(s).unwrap()).unwrap()
    }

    #[test]
    fn tower_conditions_hold_for_example_tower() {
        let ctx = norm_one();
        let phi = emit_tower_conditions(ctx.group());
        let ev = context_evaluator(&ctx, Budget::default());
        let env = tower_assignment(ctx.tower(), ctx.galois());
        assert_eq!(ev.evaluate(&phi, &env), Truth::True);

        // c = y^2 - 1 is not Eisenstein
        let mut bad = env.clone();
        bad.insert("c_0_0".into(), Value::VF(ctx.field().from_int(-1)));
        assert_eq!(ev.evaluate(&phi, &bad), Truth::False);
    }

    #[test]
    fn tower_conditions_for_unramified_and_trivial() {
        let ctx = fixtures::unramified_induced(LocalFieldSpec::padic(5, 10), "2");
        let phi = emit_tower_conditions(ctx.group());
        let ev = context_evaluator(&ctx, Budget::default());
        let env = tower_assignment(ctx.tower(), ctx.galois());
        assert_eq!(ev.evaluate(&phi, &env), Truth::True);
        // x^2 - 4 = (x - 2)(x + 2) is reducible
        let mut bad = env.clone();
        bad.insert("b_0".into(), Value::VF(ctx.field().from_int(-4)));
        assert_eq!(ev.evaluate(&phi, &bad), Truth::False);

        assert_eq!(emit_tower_conditions(&FiniteGroup::trivial()), Formula::True);
    }

    #[test]
    fn rationality_matches_direct_check() {
        let ctx = norm_one();
        let phi = emit_rationality_formula(&ctx);
        let ev = context_evaluator(&ctx, Budget::default());
        for (s, want) in [("[-3/2, -1/2]", true), ("[0, 1]", false), ("[-1, 0]", true)] {
            let t = lit(&ctx, s);
            assert_eq!(ctx.is_rational_point(&t).unwrap(), want);
            assert_eq!(ev.evaluate(&phi, &point_assignment(&ctx, &t)), Truth::from_bool(want), "{s}");
        }
    }

    #[test]
    fn neron_formula_examples() {
        let ctx = norm_one();
        let phi = emit_neron_formula(&ctx);
        let ev = context_evaluator(&ctx, Budget::default());
        let at = |s: &str| ev.evaluate(&phi, &point_assignment(&ctx, &lit(&ctx, s)));
        assert_eq!(at("[-1, 0]"), Truth::False);
        assert_eq!(at("[1, 0]"), Truth::True);
        assert_eq!(at("[-3/2, -1/2]"), Truth::True);

        let split = fixtures::split(LocalFieldSpec::padic(5, 10));
        let phi = emit_neron_formula(&split);
        let ev = context_evaluator(&split, Budget::default());
        let at = |s: &str| ev.evaluate(&phi, &point_assignment(&split, &lit(&split, s)));
        assert_eq!(at("[3]"), Truth::True);
        assert_eq!(at("[5]"), Truth::False);
    }

    #[test]
    fn generated_formulas_round_trip() {
        for ctx in [norm_one(), fixtures::unramified_induced(LocalFieldSpec::padic(5, 10), "2")] {
            for phi in [
                emit_tower_conditions(ctx.group()),
                emit_rationality_formula(&ctx),
                emit_neron_formula(&ctx),
            ] {
                assert_eq!(parse(&phi.to_string()).unwrap(), phi);
            }
        }
    }

    #[test]
    fn neron_formula_agrees_on_random_points() {
        let ctx = fixtures::unramified_induced(LocalFieldSpec::padic(5, 10), "2");
        let phi = emit_neron_formula(&ctx);
        let ev = context_evaluator(&ctx, Budget::default());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let t = PointRecipe::random(&ctx, &mut rng).realize(&ctx).unwrap();
            let want = ctx.neron_membership_direct(&t).unwrap();
            assert_eq!(ev.evaluate(&phi, &point_assignment(&ctx, &t)), Truth::from_bool(want));
        }
    }
}
