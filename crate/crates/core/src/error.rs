use thiserror::Error;

use crate::words::Word;

/// Errors raised by the measure, GNS, transform and decomposition layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,

    #[error("letter {letter} outside alphabet 1..={d}")]
    LetterOutOfRange { letter: u8, d: usize },

    #[error("alphabet mismatch: expected d = {expected}, found d = {found}")]
    AlphabetMismatch { expected: usize, found: usize },

    #[error("word {word} (length {len}) exceeds moment budget {budget}")]
    OutOfBudget {
        word: Word,
        len: usize,
        budget: usize,
    },

    #[error("degree {degree} exceeds moment budget {budget}")]
    DegreeOutOfBudget { degree: usize, budget: usize },

    #[error("Gram matrix at degree {degree} is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { degree: usize, asymmetry: f64 },

    #[error(
        "Gram matrix at degree {degree} is not positive semidefinite: eigenvalue {eigenvalue:.6e} \
         below -{tolerance:.1e} x {largest:.6e}"
    )]
    NotPositive {
        degree: usize,
        eigenvalue: f64,
        largest: f64,
        tolerance: f64,
    },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("degenerate measure: total mass {mass:.3e} is not positive")]
    DegenerateMeasure { mass: f64 },

    #[error("co-embedding norm {norm:.9} exceeds 1; splitting measure is not dominated")]
    OrderingViolation { norm: f64 },

    #[error("matrix point has row norm {norm:.9} >= 1")]
    OutsideRowBall { norm: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid degree ladder: {0}")]
    InvalidLadder(String),

    #[error("internal invariant breached: {0}")]
    Invariant(String),

    #[error("spec parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
