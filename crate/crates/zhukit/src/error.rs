use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("laurent exponent overflow")]
    ExponentOverflow,

    #[error("weight cutoff exceeded: needed {needed}, cutoff {cutoff}")]
    CutoffExceeded { needed: i64, cutoff: i64 },

    #[error("sector parameters {0} and {1} are congruent mod Z; decomposition hypothesis violated")]
    CongruentSectors(String, String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("linear system is singular; this violates the nonsingularity certificate")]
    SingularSystem,

    #[error("mode index {0} is not an integer on the untwisted module")]
    NonIntegralModeIndex(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown check id `{0}`")]
    UnknownCheck(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
