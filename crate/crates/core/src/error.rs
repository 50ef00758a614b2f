use thiserror::Error;

use crate::dist::DistError;
use crate::pgf::PgfError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Distribution(#[from] DistError),
    #[error(transparent)]
    Pgf(#[from] PgfError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// The requested accuracy was not reached; carries the best value and its bound.
    #[error("tolerance not reached: best value {value} with error bound {error_bound}")]
    ToleranceNotReached { value: f64, error_bound: f64 },
    #[error("{count} compositions exceed the enumeration guard of {limit}")]
    EnumerationTooLarge { count: u128, limit: u128 },
    #[error("f - g has {zeros} zeros in [0, 1); at most one is required")]
    ConditionViolated { zeros: usize },
    #[error("f and g are identical; their difference has no isolated zeros")]
    DegeneratePgfPair,
    #[error("simulation of rep {rep} exceeded {cap} generations")]
    GenerationCapExceeded { rep: u64, cap: u64 },
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::ToleranceNotReached { .. }
                | Error::GenerationCapExceeded { .. }
                | Error::Inconsistent(_)
        )
    }
}
