use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("empty matrix ({rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("singular value decomposition did not converge for a {rows}x{cols} matrix")]
    SvdNonConvergence { rows: usize, cols: usize },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("index {index} outside the window 0..={horizon}")]
    IndexOutOfWindow { index: usize, horizon: usize },

    #[error("evolution requested for n = {n} < i = {i}")]
    BackwardEvolution { n: usize, i: usize },

    #[error("invalid boundary specification: {0}")]
    InvalidBoundary(String),

    #[error(
        "linear part is only solvable in the least-squares sense (defect {defect:.3e}); \
         the generating family is not a family of exact solutions"
    )]
    QuasisolutionFamily { defect: f64 },

    #[error("sufficient condition fails: rank(B0) = {rank} < {required}")]
    SufficientConditionFailed { rank: usize, required: usize },

    #[error("derivative check failed at probe {probe}: deviation {deviation:.3e}")]
    DerivativeMismatch { probe: usize, deviation: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
