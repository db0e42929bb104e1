use thiserror::Error;

use crate::class::ClassId;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An exact division that must be integral left a remainder. This always
    /// indicates a bug in one of the counting formulas.
    #[error("non-integral result in {context}: remainder {remainder}")]
    NonIntegral {
        context: &'static str,
        remainder: String,
    },

    /// A quantity that counts objects came out negative (formula bug).
    #[error("negative count in {context}: {value}")]
    NegativeCount {
        context: &'static str,
        value: String,
    },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    /// The series truncation could not certify the requested tolerance
    /// within the term budget.
    #[error("requested tolerance {rel_tol} not certified after {terms} terms")]
    Precision { rel_tol: f64, terms: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("conflicting values for {class}({n}): {existing} vs {new}")]
    Conflict {
        class: ClassId,
        n: u32,
        existing: String,
        new: String,
    },

    #[error("no closed form for {0}; only the brute-force census covers it")]
    NoFormula(ClassId),

    #[error("unknown sampler `{0}` (expected one of: preorder, matrix, symmetric, rejection)")]
    UnknownSampler(String),

    #[error("no hard-coded 0.999 chi-square quantile for {0} degrees of freedom")]
    UnsupportedDegreesOfFreedom(usize),

    #[error("sampler produced an outcome outside the enumerated support: {0}")]
    UnexpectedOutcome(String),
}

pub type Result<T> = std::result::Result<T, Error>;
