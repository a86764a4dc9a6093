use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::motivic::{Laurent, MotivicConstant};
use crate::error::{Error, Result};

/// A value observed at residue field size `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub q: u64,
    pub value: BigRational,
}

impl Sample {
    pub fn new(q: u64, value: BigRational) -> Self {
        Sample { q, value }
    }
}

/// Basis of the null space of `rows` (exact Gaussian elimination).
fn null_space(mut rows: Vec<Vec<BigRational>>, cols: usize) -> Vec<Vec<BigRational>> {
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..cols {
                    let d = &f * &rows[r][j];
                    rows[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![BigRational::zero(); cols];
            v[fc] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[i][fc].clone();
            }
            v
        })
        .collect()
}

fn eval(p: &[BigRational], q: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * q + c)
}

fn as_laurent(p: &[BigRational]) -> Laurent<BigRational> {
    p.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k as i64, c.clone()))
        .collect::<BTreeMap<_, _>>()
}

/// Fits `P(q) / Q(q)` with `deg P, deg Q <= k` for the smallest `k <= degree`
/// that interpolates every sample, checks it at `holdout`, and converts it
/// into a motivic constant.
pub fn fit_rational_function(
    samples: &[Sample],
    holdout: &Sample,
    degree: usize,
) -> Result<MotivicConstant> {
    let mut qs: Vec<u64> = samples.iter().map(|s| s.q).collect();
    qs.sort_unstable();
    qs.dedup();
    if qs.len() != samples.len() || qs.contains(&holdout.q) {
        return Err(Error::Invalid("samples need pairwise distinct q".into()));
    }
    for k in 0..=degree {
        let unknowns = 2 * k + 2;
        if samples.len() < unknowns - 1 {
            return Err(Error::Underdetermined(format!(
                "{} samples cannot pin down degree {k}",
                samples.len()
            )));
        }
        // sum p_j q^j - v sum r_j q^j = 0
        let rows = samples
            .iter()
            .map(|s| {
                let q = BigRational::from_integer(BigInt::from(s.q));
                let mut row = Vec::with_capacity(unknowns);
                let mut pw = BigRational::one();
                for _ in 0..=k {
                    row.push(pw.clone());
                    pw *= &q;
                }
                let mut pw = BigRational::one();
                for _ in 0..=k {
                    row.push(-(&s.value * &pw));
                    pw *= &q;
                }
                row
            })
            .collect();
        let ns = null_space(rows, unknowns);
        if ns.is_empty() {
            continue;
        }
        if ns.len() > 1 {
            return Err(Error::Underdetermined(format!("degree {k} fit is not unique")));
        }
        let (p, r) = ns[0].split_at(k + 1);
        let hq = BigRational::from_integer(BigInt::from(holdout.q));
        let dq = eval(r, &hq);
        if samples
            .iter()
            .any(|s| eval(r, &BigRational::from_integer(BigInt::from(s.q))).is_zero())
            || dq.is_zero()
        {
            return Err(Error::NoFit("denominator vanishes at a sample".into()));
        }
        if eval(p, &hq) / dq != holdout.value {
            return Err(Error::NoFit(format!(
                "degree {k} interpolant misses the held-out value at q = {}",
                holdout.q
            )));
        }
        return MotivicConstant::from_rational_function(&as_laurent(p), &as_laurent(r)).ok_or_else(
            || Error::NoFit("the denominator is not a power of L times factors 1 - L^-i".into()),
        );
    }
    Err(Error::NoFit(format!("no rational function of degree <= {degree} fits")))
}
