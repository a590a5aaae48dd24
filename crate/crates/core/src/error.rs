use thiserror::Error;

use crate::gmm::Method;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty dataset: {0}")]
    EmptyDataset(&'static str),

    #[error("invalid label {0}: labels must be exactly -1 or +1")]
    InvalidLabel(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An iterative solver ran out of iterations. `last` is the final iterate.
    #[error("{solver} did not converge within {iterations} iterations")]
    NotConverged {
        solver: &'static str,
        iterations: usize,
        last: Vec<f64>,
    },

    #[error("validity condition violated: {0}")]
    Validity(String),

    #[error("both classes must be present")]
    SingleClass,

    #[error("every weight candidate produced the zero vector")]
    AllCandidatesZero,

    #[error("method {0} is not present in the sweep")]
    MissingMethod(Method),

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("label column has {0} distinct values, exactly two are required")]
    LabelCount(usize),

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("unsupported results schema version {found} (expected {expected})")]
    SchemaVersion { found: String, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
