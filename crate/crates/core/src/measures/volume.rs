use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::localfield::EElem;
use crate::torus::{TorusContext, TorusPoint};

/// Default bound on the number of residue classes enumerated.
pub const DEFAULT_CLASS_BOUND: u64 = 20_000_000;

/// Chart volume of `T°(O_F)` at one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumeSample {
    pub q: u64,
    pub level: u32,
    /// Classes of `T°(O_F)` modulo `pi^level`.
    pub count: u64,
    /// `count / q^(level n)`: Haar measure with the integral coordinate box
    /// of volume one.
    pub volume: BigRational,
    /// Volume for the canonical normalization, which gives `T°(O_F)` volume one.
    pub canonical: BigRational,
}

impl VolumeSample {
    /// `q level count volume`, the line format of `vol compute`.
    pub fn to_record(&self) -> String {
        format!("{} {} {} {}", self.q, self.level, self.count, self.volume)
    }

    pub fn from_record(line: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("bad volume record '{line}'"));
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 {
            return Err(bad());
        }
        Ok(VolumeSample {
            q: f[0].parse().map_err(|_| bad())?,
            level: f[1].parse().map_err(|_| bad())?,
            count: f[2].parse().map_err(|_| bad())?,
            volume: f[3].parse().map_err(|_| bad())?,
            canonical: BigRational::one(),
        })
    }
}

/// Counts classes modulo `pi^level` of unit points that are `Gamma`-fixed
/// modulo `pi^level` and lie in the kernel of the Kottwitz map. Points of
/// `T°(O_F)` have all coordinates units, so nothing else contributes.
pub fn volume_neron_identity(ctx: &TorusContext, level: u32, bound: u64) -> Result<VolumeSample> {
    if level == 0 || level as i64 > ctx.precision() {
        return Err(Error::Invalid(format!(
            "level must lie in 1..={}",
            ctx.precision()
        )));
    }
    let q = ctx.field().q() as u64;
    let m = ctx.tower().m();
    let n = ctx.rank();
    let digits = m * n * level as usize;
    let total = (q as u128).checked_pow(digits as u32).unwrap_or(u128::MAX);
    if total > bound as u128 {
        return Err(Error::EnumerationTooLarge(format!(
            "{q}^{digits} residue classes exceed the bound {bound}"
        )));
    }
    let k = level as i64;
    let field = ctx.field();
    let tw = ctx.tower();
    let decode = |mut idx: u64| -> Vec<EElem> {
        (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| {
                        let ds: Vec<u32> = (0..level)
                            .map(|_| {
                                let d = (idx % q) as u32;
                                idx /= q;
                                d
                            })
                            .collect();
                        field.truncate(&field.from_digits(0, &ds), k)
                    })
                    .collect()
            })
            .collect()
    };
    let counted: Result<u64> = (0..total as u64)
        .into_par_iter()
        .map(|idx| {
            let coords = decode(idx);
            if coords.iter().any(|c| tw.ord(c).finite() != Some(0)) {
                return Ok(0);
            }
            let t = TorusPoint { coords };
            match ctx.rational_at(&t, k) {
                Some(true) => {}
                Some(false) => return Ok(0),
                None => {
                    return Err(Error::InsufficientPrecision(
                        "rationality undetermined at this level".into(),
                    ))
                }
            }
            let class = ctx.solve_norm(&t)?.class;
            Ok(class.iter().all(|&c| c == 0) as u64)
        })
        .sum();
    let count = counted?;
    let denom = num_traits::pow(BigInt::from(q), level as usize * n);
    Ok(VolumeSample {
        q,
        level,
        count,
        volume: BigRational::new(BigInt::from(count), denom),
        canonical: BigRational::one(),
    })
}

/// Raises the level from `start` until two consecutive levels agree.
/// Returns the sample at the first level of the agreeing pair.
pub fn stabilized_volume(
    ctx: &TorusContext,
    start: u32,
    max_level: u32,
    bound: u64,
) -> Result<VolumeSample> {
    let mut prev = volume_neron_identity(ctx, start, bound)?;
    for level in start + 1..=max_level {
        let next = volume_neron_identity(ctx, level, bound)?;
        if next.volume == prev.volume {
            return Ok(prev);
        }
        prev = next;
    }
    Err(Error::Unstable(format!(
        "volume did not stabilize by level {max_level}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::LocalFieldSpec;
    use crate::torus::fixtures;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn split_units() {
        let ctx = fixtures::split(LocalFieldSpec::padic(5, 4));
        let v = volume_neron_identity(&ctx, 1, DEFAULT_CLASS_BOUND).unwrap();
        assert_eq!(v.volume, r(4, 5));
        let v2 = volume_neron_identity(&ctx, 2, DEFAULT_CLASS_BOUND).unwrap();
        assert_eq!(v2.count, 20);
        assert_eq!(v2.volume, r(4, 5));
    }

    #[test]
    fn norm_one_is_stable() {
        let ctx = fixtures::norm_one_ramified(LocalFieldSpec::laurent(5, 4));
        let v = stabilized_volume(&ctx, 1, 3, DEFAULT_CLASS_BOUND).unwrap();
        assert_eq!(v.volume, r(1, 1));
    }

    #[test]
    fn bound_is_enforced() {
        let ctx = fixtures::split(LocalFieldSpec::padic(5, 4));
        assert!(matches!(
            volume_neron_identity(&ctx, 3, 10),
            Err(Error::EnumerationTooLarge(_))
        ));
    }

    #[test]
    fn records_round_trip() {
        let s = VolumeSample {
            q: 7,
            level: 2,
            count: 42,
            volume: r(6, 7),
            canonical: r(1, 1),
        };
        assert_eq!(VolumeSample::from_record(&s.to_record()).unwrap(), s);
    }
}
