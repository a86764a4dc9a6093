//! Motivic constants, chart volumes of Néron identity components, fitting
//! rational functions in `q`, and formal degrees.

pub mod fit;
pub mod motivic;
pub mod volume;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

pub use fit::{fit_rational_function, Sample};
pub use motivic::MotivicConstant;
pub use volume::{stabilized_volume, volume_neron_identity, VolumeSample, DEFAULT_CLASS_BOUND};

use crate::error::{Error, Result};

/// `deg(sigma) / vol(J / C)`.
pub fn formal_degree(deg_sigma: u64, vol: &BigRational) -> Result<BigRational> {
    if deg_sigma == 0 {
        return Err(Error::Invalid("deg(sigma) must be positive".into()));
    }
    if vol.is_zero() || *vol < BigRational::zero() {
        return Err(Error::Invalid("the volume must be positive".into()));
    }
    Ok(BigRational::from_integer(BigInt::from(deg_sigma)) / vol)
}

/// `c d / m` for a motivic scaling constant `c` and motivic volume `m`;
/// `m` has to be a unit of the ring.
pub fn formal_degree_motivic(
    c: &MotivicConstant,
    deg_sigma: u64,
    m: &MotivicConstant,
) -> Result<MotivicConstant> {
    if deg_sigma == 0 {
        return Err(Error::Invalid("deg(sigma) must be positive".into()));
    }
    if m.is_zero() {
        return Err(Error::Invalid("the volume must be nonzero".into()));
    }
    c.scale(deg_sigma as i64).div(m)
}
