pub mod cli;
pub mod config;
pub mod dpas;
pub mod error;
pub mod localfield;
pub mod measures;
pub mod torus;
pub mod zlattice;

pub use error::{Error, Result};
