//! Witness generators consulted by hinted quantifiers.

use super::ast::{Formula, Sort, Term};
use super::eval::{Assignment, Value};
use crate::localfield::{FElem, LocalField};

pub struct HintRequest<'a> {
    pub name: &'a str,
    pub vars: &'a [(String, Sort)],
    pub body: &'a Formula,
    pub env: &'a Assignment,
    pub field: &'a LocalField,
}

/// Candidate values for the block of bound variables.
pub struct HintResult {
    pub candidates: Vec<Vec<Value>>,
    /// Every satisfying assignment, if one exists, is among the candidates,
    /// so failing all of them decides the quantifier.
    pub complete: bool,
}

pub trait HintProvider: Send + Sync {
    /// `None` when the hint is not addressed to this provider or does not apply.
    fn propose(&self, req: &HintRequest<'_>) -> Option<HintResult>;
}

/// `hensel`: roots of a polynomial equation in a single `VF` variable,
/// lifted by Newton iteration from residues. Not complete.
pub struct Hensel;

const HENSEL_DEPTH: i64 = 2;

type Poly = Vec<FElem>;

fn padd(k: &LocalField, a: &Poly, b: &Poly) -> Poly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| match (a.get(i), b.get(i)) {
            (Some(x), Some(y)) => k.add(x, y),
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => unreachable!(),
        })
        .collect()
}

fn pmul(k: &LocalField, a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![k.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = k.add(&out[i + j], &k.mul(x, y));
        }
    }
    out
}

fn pneg(k: &LocalField, a: &Poly) -> Poly {
    a.iter().map(|x| k.neg(x)).collect()
}

/// `t` as a polynomial in `y`, other variables read from `env`.
fn as_poly(k: &LocalField, t: &Term, y: &str, env: &Assignment) -> Option<Poly> {
    Some(match t {
        Term::Var(n, Sort::VF) if n == y => vec![k.zero(), k.one()],
        Term::Var(n, Sort::VF) => match env.get(n)? {
            Value::VF(x) => vec![x.clone()],
            _ => return None,
        },
        Term::Int(c, Sort::VF) => vec![k.from_int(*c)],
        Term::Pi => vec![k.uniformizer()],
        Term::Add(v) => v.iter().try_fold(vec![], |acc, x| Some(padd(k, &acc, &as_poly(k, x, y, env)?)))?,
        Term::Mul(v) => v
            .iter()
            .try_fold(vec![k.one()], |acc, x| Some(pmul(k, &acc, &as_poly(k, x, y, env)?)))?,
        Term::Sub(a, b) => padd(k, &as_poly(k, a, y, env)?, &pneg(k, &as_poly(k, b, y, env)?)),
        Term::Neg(a) => pneg(k, &as_poly(k, a, y, env)?),
        Term::Pow(a, e) => {
            let p = as_poly(k, a, y, env)?;
            (0..*e).fold(vec![k.one()], |acc, _| pmul(k, &acc, &p))
        }
        _ => return None,
    })
}

fn horner(k: &LocalField, p: &Poly, x: &FElem) -> FElem {
    p.iter().rev().fold(k.zero(), |acc, c| k.add(&k.mul(&acc, x), c))
}

fn derivative(k: &LocalField, p: &Poly) -> Poly {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| k.mul(&k.from_int(i as i64), c))
        .collect()
}

fn equations<'a>(f: &'a Formula, y: &str, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::Eq(a, b) if a.sort() == Sort::VF && (a.mentions(y) || b.mentions(y)) => out.push(f),
        Formula::And(v) => v.iter().for_each(|g| equations(g, y, out)),
        _ => {}
    }
}

/// Newton iteration from `x0`; `None` unless it converges to a root.
fn newton(k: &LocalField, p: &Poly, dp: &Poly, x0: FElem) -> Option<FElem> {
    let mut x = x0;
    for _ in 0..2 * (64 - k.precision().max(1).leading_zeros()) + 4 {
        let fx = horner(k, p, &x);
        if fx.ord().is_none() {
            return Some(x);
        }
        let d = k.div(&fx, &horner(k, dp, &x)).ok()?;
        x = k.sub(&x, &d);
    }
    horner(k, p, &x).ord().is_none().then_some(x)
}

impl HintProvider for Hensel {
    fn propose(&self, req: &HintRequest<'_>) -> Option<HintResult> {
        if req.name != "hensel" {
            return None;
        }
        let [(y, Sort::VF)] = req.vars else {
            return None;
        };
        let k = req.field;
        let mut eqs = vec![];
        equations(req.body, y, &mut eqs);
        let mut candidates: Vec<Vec<Value>> = vec![];
        for eq in eqs {
            let Formula::Eq(a, b) = eq else { continue };
            let Some(p) = as_poly(k, a, y, req.env)
                .zip(as_poly(k, b, y, req.env))
                .map(|(a, b)| padd(k, &a, &pneg(k, &b)))
            else {
                continue;
            };
            let dp = derivative(k, &p);
            for s in -HENSEL_DEPTH..=HENSEL_DEPTH {
                let scale = k.uniformizer_pow(s);
                for a in k.residue_field().elements().filter(|&a| a != 0) {
                    let x0 = k.mul(&scale, &k.lift_residue(a));
                    if let Some(r) = newton(k, &p, &dp, x0) {
                        let dup = candidates.iter().any(|c| match &c[0] {
                            Value::VF(z) => k.sub(z, &r).ord().is_none(),
                            _ => false,
                        });
                        if !dup {
                            candidates.push(vec![Value::VF(r)]);
                        }
                    }
                }
            }
        }
        Some(HintResult {
            candidates,
            complete: false,
        })
    }
}
