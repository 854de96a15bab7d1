use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes shared by every numerical module.
///
/// The CLI maps these onto exit codes through [`Error::category`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("no ground state: {0}")]
    NoGroundState(String),

    #[error("ODE step underflow at r = {r}")]
    StepSize { r: f64 },

    #[error("assumption A1 violated at node {node} (x = {x:?}): V1 = {v1}, V2 = {v2}")]
    AssumptionA1 {
        node: usize,
        x: [f64; 2],
        v1: f64,
        v2: f64,
    },

    #[error("grid too coarse: {0}")]
    Resolution(String),

    #[error("kernel assembly produced a non-finite value at nodes ({row}, {col})")]
    Assembly { row: usize, col: usize },

    #[error("threshold is not regular: smallest singular value of QTQ is {qtq_min_sv:e} (threshold {threshold:e})")]
    NonRegularThreshold { qtq_min_sv: f64, threshold: f64 },

    #[error("M(lambda) is numerically singular at lambda = {lambda}")]
    Singular { lambda: f64 },

    #[error("Neumann correction diverges at lambda = {lambda} (|E1 A^-1|_HS = {ratio:.3}); use a smaller lambda_1")]
    ExpansionRadius { lambda: f64, ratio: f64 },

    #[error("Born series diverges: increments grew for three consecutive orders (last ratio {ratio:.3})")]
    BornDivergence { ratio: f64 },

    #[error("vector is not in the kernel of QTQ: relative residual {residual:e}")]
    NotKernelElement { residual: f64 },

    #[error("contour passes too close to the spectrum: {0}")]
    Contour(String),

    #[error("eigen-solver failure: {0}")]
    Eigen(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

/// Coarse classification used for process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorCategory {
    Usage,
    Assumption,
    Numerical,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidArgument(_)
            | Error::Domain(_)
            | Error::Dimension { .. }
            | Error::Parse(_)
            | Error::Io(_) => ErrorCategory::Usage,
            Error::AssumptionA1 { .. } | Error::NonRegularThreshold { .. } => {
                ErrorCategory::Assumption
            }
            _ => ErrorCategory::Numerical,
        }
    }
}
