use crate::linalg::CMatrix;

/// Errors produced by the dilation pipeline.
///
/// Input-validation failures (bad shapes, non-positive effects, non-normalized
/// sums) are distinguished from internal consistency failures
/// ([`Error::TheoremViolation`], [`Error::Inconsistent`]), which signal a defect
/// rather than a bad input.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("vectors are not orthonormal{} (residual {residual:.3e})", outcome_suffix(*.outcome))]
    NotOrthonormal {
        outcome: Option<usize>,
        residual: f64,
    },
    #[error("{count} vectors cannot be completed in dimension {dim}")]
    TooManyVectors { count: usize, dim: usize },

    #[error("observable has no outcomes")]
    EmptyObservable,
    #[error("effect {outcome} is not positive (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { outcome: usize, min_eigenvalue: f64 },
    #[error("effects do not sum to the identity (residual {residual:.3e})")]
    NotNormalized { residual: f64, deficit: CMatrix },
    #[error("effect {outcome} is zero")]
    ZeroEffect { outcome: usize },

    #[error("instrument has no outcomes")]
    EmptyInstrument,
    #[error("outcome {outcome} has no non-zero Kraus operator")]
    ZeroOutcome { outcome: usize },
    #[error("Kraus operators are not trace preserving (residual {residual:.3e})")]
    NotTracePreserving { residual: f64 },
    #[error("Kraus list is empty or all operators vanish")]
    AllZero,
    #[error("outcome {outcome} out of range for {count} outcomes")]
    OutcomeOutOfRange { outcome: usize, count: usize },
    #[error("outcome {outcome}: expected {expected} vectors, got {found}")]
    CountMismatch {
        outcome: usize,
        expected: usize,
        found: usize,
    },
    #[error("Kraus reconstruction from structure vectors failed for outcome {outcome} (residual {residual:.3e})")]
    ReconstructionFailed { outcome: usize, residual: f64 },
    #[error("isometric channel with non-trivial observable (residual {residual:.3e})")]
    TheoremViolation { residual: f64 },
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("operator is not an isometry (residual {residual:.3e})")]
    NotIsometry { residual: f64 },
    #[error("probe vector is not a unit vector (norm {norm})")]
    NotUnitVector { norm: f64 },
    #[error("operator is not a contraction (norm {norm})")]
    NotContraction { norm: f64 },
    #[error("not a Stinespring dilation of the instrument (residual {residual:.3e})")]
    NotADilation { residual: f64 },
    #[error("invalid measurement model: {0}")]
    InvalidModel(String),

    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("outcome {outcome} has probability {probability:.3e}")]
    ZeroProbabilityOutcome { outcome: usize, probability: f64 },

    #[error("index map is not injective: {0}")]
    NotInjective(String),
    #[error("co-rank {corank} is inconsistent with dimensions {dim_a} and {dim_b}")]
    InconsistentCorank {
        dim_a: String,
        dim_b: String,
        corank: String,
    },
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
}

fn outcome_suffix(outcome: Option<usize>) -> String {
    match outcome {
        Some(i) => format!(" for outcome {i}"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
