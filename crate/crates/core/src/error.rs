use thiserror::Error;

/// Errors surfaced by the library.
///
/// The variants are grouped so that callers (in particular the command line
/// front end) can map them onto distinct exit codes: configuration and
/// validation problems, precision/obstruction problems, and everything else.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("division by zero at precision")]
    DivisionByZero,

    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),

    #[error("lifting obstruction: {0}")]
    LiftingObstruction(String),

    #[error("unstable answer: {0}")]
    Unstable(String),

    #[error("not Galois: {0}")]
    NotGalois(String),

    #[error("no isomorphism to the fixed group: {0}")]
    NoIsomorphism(String),

    #[error("point is not rational: {0}")]
    NotRational(String),

    #[error("membership algorithms disagree: {0}")]
    Disagreement(String),

    #[error("enumeration too large: {0}")]
    EnumerationTooLarge(String),

    #[error("underdetermined: {0}")]
    Underdetermined(String),

    #[error("no fit: {0}")]
    NoFit(String),

    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("sort error in {term}: {msg}")]
    Sort { term: String, msg: String },
}

impl Error {
    /// True for errors caused by finite precision or a failed root extraction.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::DivisionByZero
                | Error::InsufficientPrecision(_)
                | Error::LiftingObstruction(_)
                | Error::Unstable(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
