//! Local fields: the base field `F`, its residue field and literal syntax.

pub mod base;
pub mod galois;
pub mod literal;
pub mod residue;
pub mod tower;

pub use base::{Backend, FElem, LocalField, LocalFieldSpec, MAX_LAURENT_Q};
pub use literal::{format_fq, parse_felem};
pub use residue::{Fq, FqExt};
pub use tower::{check_eisenstein, check_unramified_poly, CoeffRing, EElem, EOrd, Tower, TowerSpec};
pub use galois::{compute_automorphisms, GaloisData};
