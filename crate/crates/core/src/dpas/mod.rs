//! Formulas in the three-sorted language of valued fields: syntax, a
//! bounded evaluator and emitters for torus membership.

pub mod ast;
pub mod emit;
pub mod eval;
pub mod hints;
pub mod parse;

pub use ast::{Cmp, Formula, Quant, Sort, Term, WitnessHint};
pub use emit::{
    context_evaluator, emit_neron_formula, emit_rationality_formula, emit_tower_conditions,
    point_assignment, point_from_assignment, tower_assignment, NeronLift,
};
pub use eval::{Assignment, Budget, Evaluator, Truth, Value};
pub use hints::{Hensel, HintProvider, HintRequest, HintResult};
pub use parse::{parse, parse_term};
