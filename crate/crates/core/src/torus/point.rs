use std::fmt::Write as _;

use rand::Rng;

use super::context::TorusContext;
use crate::error::{invalid, Error, Result};
use crate::localfield::{parse_felem, EElem, EOrd, FElem};
use crate::zlattice::{snf::solve_integer, IntMatrix};

/// A point of `E^x (x) X = (E^x)^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusPoint {
    pub coords: Vec<EElem>,
}

/// A point of the induced torus `E^x (x) Y`, indexed by the permuted basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedPoint {
    pub coords: Vec<EElem>,
}

/// Parses `[a0, a1, ..]` (at most `m` base-field literals).
pub fn parse_eelem_literals(text: &str) -> Result<Vec<String>> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| Error::Syntax {
            pos: 0,
            msg: format!("expected [a0, a1, ...], got '{t}'"),
        })?;
    Ok(inner.split(',').map(|s| s.trim().to_string()).collect())
}

/// Parses `[..]; [..]; ..` into per-coordinate literal lists.
pub fn parse_point_literals(text: &str) -> Result<Vec<Vec<String>>> {
    text.split(';').map(parse_eelem_literals).collect()
}

impl TorusContext {
    /// An `E`-element from up to `m` coordinate literals (missing ones are 0).
    pub fn eelem_from_literals(&self, lits: &[String]) -> Result<EElem> {
        let m = self.tower().m();
        if lits.len() > m {
            return invalid(format!("an element of E has {m} coordinates, got {}", lits.len()));
        }
        let mut z = self.tower().zero();
        for (k, s) in lits.iter().enumerate() {
            z[k] = parse_felem(self.field(), s)?;
        }
        Ok(z)
    }

    pub fn point(&self, coords: Vec<EElem>) -> Result<TorusPoint> {
        if coords.len() != self.rank() {
            return invalid(format!(
                "a point has {} coordinates, got {}",
                self.rank(),
                coords.len()
            ));
        }
        for (i, c) in coords.iter().enumerate() {
            if c.len() != self.tower().m() {
                return invalid(format!("coordinate {i} has the wrong length"));
            }
            if self.tower().ord(c).finite().is_none() {
                return invalid(format!("coordinate {i} is zero at this precision"));
            }
        }
        Ok(TorusPoint { coords })
    }

    pub fn point_from_literals(&self, lits: &[Vec<String>]) -> Result<TorusPoint> {
        let coords = lits
            .iter()
            .map(|l| self.eelem_from_literals(l))
            .collect::<Result<Vec<_>>>()?;
        self.point(coords)
    }

    pub fn format_point(&self, t: &TorusPoint) -> String {
        t.coords
            .iter()
            .map(|c| self.tower().format(c))
            .collect::<Vec<_>>()
            .join("; ")
    }

    pub fn format_induced(&self, r: &InducedPoint) -> String {
        let mut out = String::new();
        for (k, c) in r.coords.iter().enumerate() {
            if k > 0 {
                out.push_str("; ");
            }
            let _ = write!(out, "{}", self.tower().format(c));
        }
        out
    }

    /// `prod_i z_i^{exps_i}` in `E`.
    pub(crate) fn monomial(&self, z: &[EElem], exps: &[i64]) -> Result<EElem> {
        let tw = self.tower();
        let mut acc = tw.one();
        for (zi, &k) in z.iter().zip(exps) {
            if k != 0 {
                acc = tw.mul(&acc, &tw.pow(zi, k)?);
            }
        }
        Ok(acc)
    }

    /// `gamma . t`: coordinate `j` is `prod_i sigma_gamma(t_i)^{theta(gamma)_{ji}}`.
    pub fn act(&self, g: usize, t: &TorusPoint) -> Result<TorusPoint> {
        let sig: Vec<EElem> = t
            .coords
            .iter()
            .map(|c| self.galois().apply(self.tower(), g, c))
            .collect();
        let th = self.lattice().theta(g);
        let coords = (0..self.rank())
            .map(|j| self.monomial(&sig, th.row(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TorusPoint { coords })
    }

    /// Compares `a` and `b` to relative precision `n` with respect to `b`.
    pub(crate) fn same(&self, a: &[FElem], b: &[FElem], n: i64) -> Option<bool> {
        let tw = self.tower();
        let shift = match tw.ord(b) {
            EOrd::Finite(v) => v.div_euclid(tw.e() as i64),
            EOrd::AtLeast(_) => return None,
        };
        tw.eq_mod(a, b, n + shift)
    }

    /// Whether `gamma . t = t` for all `gamma`, to relative precision `n`,
    /// comparing `prod_{theta>0} sigma(t_i)^theta` with
    /// `t_j prod_{theta<0} sigma(t_i)^{-theta}` so no inverses are needed.
    pub fn rational_at(&self, t: &TorusPoint, n: i64) -> Option<bool> {
        let tw = self.tower();
        let mut verdict = Some(true);
        for g in 1..self.group().order() {
            let sig: Vec<EElem> = t
                .coords
                .iter()
                .map(|c| self.galois().apply(tw, g, c))
                .collect();
            let th = self.lattice().theta(g);
            for j in 0..self.rank() {
                let row = th.row(j);
                let pos: Vec<i64> = row.iter().map(|&k| k.max(0)).collect();
                let neg: Vec<i64> = row.iter().map(|&k| (-k).max(0)).collect();
                let lhs = self.monomial(&sig, &pos).ok()?;
                let rhs = tw.mul(&t.coords[j], &self.monomial(&sig, &neg).ok()?);
                match self.same(&lhs, &rhs, n) {
                    Some(false) => return Some(false),
                    None => verdict = None,
                    Some(true) => {}
                }
            }
        }
        verdict
    }

    pub fn is_rational_point(&self, t: &TorusPoint) -> Result<bool> {
        self.rational_at(t, self.precision()).ok_or_else(|| {
            Error::InsufficientPrecision("rationality is undetermined at this precision".into())
        })
    }

    /// Basis of `X^Gamma`.
    pub fn invariant_basis(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let id = IntMatrix::identity(n);
        let blocks: Vec<IntMatrix> = self.lattice().thetas().iter().map(|t| t.sub(&id)).collect();
        let stacked = IntMatrix::vcat(&blocks);
        solve_integer(&stacked, &vec![0; stacked.rows()])
            .map(|(_, k)| k)
            .unwrap_or_default()
    }

    /// `prod_gamma gamma . s`.
    pub fn norm_point(&self, s: &TorusPoint) -> Result<TorusPoint> {
        let tw = self.tower();
        let mut acc = vec![tw.one(); self.rank()];
        for g in 0..self.group().order() {
            let gs = self.act(g, s)?;
            for (a, c) in acc.iter_mut().zip(&gs.coords) {
                *a = tw.mul(a, c);
            }
        }
        Ok(TorusPoint { coords: acc })
    }
}

/// A rational point described by exact data: the norm of `s` times
/// `prod_k u_k (x) lambda_k` for a basis `lambda_k` of `X^Gamma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointRecipe {
    pub s: Vec<Vec<String>>,
    pub fixed: Vec<String>,
}

impl PointRecipe {
    /// Small random data; coordinates are short expansions in `pi` with
    /// occasional extra powers of `pi`.
    pub fn random<R: Rng + ?Sized>(ctx: &TorusContext, rng: &mut R) -> Self {
        let p = ctx.field_spec().residue_characteristic() as i64;
        let m = ctx.tower().m();
        let digit = |rng: &mut R| rng.gen_range(0..p);
        let s = (0..ctx.rank())
            .map(|_| {
                (0..m)
                    .map(|k| {
                        let mut d0 = digit(rng);
                        if k == 0 && d0 == 0 {
                            d0 = 1;
                        }
                        let d1 = digit(rng);
                        let shift = if rng.gen_bool(0.25) { rng.gen_range(1..3) } else { 0 };
                        format!("({d0} + {d1}*pi)*pi^{shift}")
                    })
                    .collect()
            })
            .collect();
        let fixed = ctx
            .invariant_basis()
            .iter()
            .map(|_| {
                let d0 = rng.gen_range(1..p);
                let d1 = digit(rng);
                let v: i64 = rng.gen_range(-1..3);
                if v < 0 {
                    format!("({d0} + {d1}*pi)/pi")
                } else {
                    format!("({d0} + {d1}*pi)*pi^{v}")
                }
            })
            .collect();
        PointRecipe { s, fixed }
    }

    pub fn realize(&self, ctx: &TorusContext) -> Result<TorusPoint> {
        let s = ctx.point_from_literals(&self.s)?;
        let mut t = ctx.norm_point(&s)?;
        let tw = ctx.tower();
        for (lit, lambda) in self.fixed.iter().zip(ctx.invariant_basis()) {
            let u = tw.from_f(&parse_felem(ctx.field(), lit)?);
            for (c, &k) in t.coords.iter_mut().zip(&lambda) {
                *c = tw.mul(c, &tw.pow(&u, k)?);
            }
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::super::context::tests::norm_one;
    use super::*;

    #[test]
    fn hilbert_90_point_is_rational() {
        let ctx = norm_one(8);
        // (1 + y) / (1 - y) = (6 + 2y) / (-4)
        let u = ctx
            .point_from_literals(&[vec!["-3/2".into(), "-1/2".into()]])
            .unwrap();
        assert!(ctx.is_rational_point(&u).unwrap());
        let y = ctx.point_from_literals(&[vec!["0".into(), "1".into()]]).unwrap();
        assert!(!ctx.is_rational_point(&y).unwrap());
    }

    #[test]
    fn act_inverts_for_norm_one() {
        let ctx = norm_one(8);
        let y = ctx.point_from_literals(&[vec!["0".into(), "1".into()]]).unwrap();
        let sy = ctx.act(1, &y).unwrap();
        // sigma(y)^{-1} = -1/y = -y/5
        let expected = ctx.eelem_from_literals(&["0".into(), "-1/5".into()]).unwrap();
        assert_eq!(ctx.same(&sy.coords[0], &expected, 8), Some(true));
    }

    #[test]
    fn point_literal_syntax() {
        let lits = parse_point_literals("[1, 2]; [pi, 0]").unwrap();
        assert_eq!(lits, vec![vec!["1", "2"], vec!["pi", "0"]]);
        assert!(parse_point_literals("1, 2").is_err());
    }

    #[test]
    fn recipes_give_rational_points() {
        use rand::SeedableRng;
        let ctx = norm_one(8);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let t = PointRecipe::random(&ctx, &mut rng).realize(&ctx).unwrap();
            assert!(ctx.is_rational_point(&t).unwrap());
        }
    }
}
