use thiserror::Error;

use crate::kernel::Multipliers;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("dimension {dim} exceeds the configured cap of {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },

    #[error("invalid rational {0:?}")]
    InvalidRational(String),

    #[error("{0} is not a finite number")]
    NonFinite(f64),

    #[error("point is not in the constraint set (violated inequality rows {inequality_rows:?}, equality rows {equality_rows:?})")]
    PointOutside {
        inequality_rows: Vec<usize>,
        equality_rows: Vec<usize>,
        /// Farkas multipliers when the constraint set itself is empty.
        emptiness: Option<Multipliers>,
    },

    #[error("direction is not in the tangent cone (violated rows {violated_rows:?})")]
    NotTangent { violated_rows: Vec<usize> },

    #[error("direction is not critical: {0}")]
    NotCritical(String),

    #[error("matrix is not symmetric (entry ({row}, {col}) differs from its transpose)")]
    NotSymmetric { row: usize, col: usize },

    #[error("smooth constraint is not active at the point (value {value:e}, tolerance {tolerance:e})")]
    InactiveConstraint { value: f64, tolerance: f64 },

    #[error("constraint gradient vanishes at the point")]
    VanishingGradient,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("objective has no Hessian evaluator")]
    MissingHessian,

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal invariant broken: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn dims(context: &'static str, expected: usize, found: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            found,
        }
    }
}

pub(crate) fn ensure_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::dims(context, expected, found))
    }
}
