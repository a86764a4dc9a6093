//! Integer lattices with finite group actions: Smith normal form,
//! coinvariants and induced resolutions.

mod group;
mod lattice;
mod matrix;
mod resolution;
pub mod snf;

pub use group::FiniteGroup;
pub use lattice::{coinvariants, coinvariants_of, quotient_by_relations, FinAbGroup, GammaLattice};
pub use matrix::IntMatrix;
pub use resolution::{check_y_i_torsion_free, BasisOrbit, Resolution};
pub use snf::{smith_normal_form, SmithForm};
