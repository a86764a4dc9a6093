pub mod context;
pub mod fixtures;
pub mod kottwitz;
pub mod point;

pub use context::{InertiaData, TorusContext, GUARD_DIGITS};
pub use point::{parse_eelem_literals, parse_point_literals, InducedPoint, PointRecipe, TorusPoint};
pub use kottwitz::{LiftOutcome, MembershipReport, NormSolution};
