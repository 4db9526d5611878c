use thiserror::Error;

#[derive(Debug, Error)]
pub enum TorzetaError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian: max asymmetry {max_asym:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { max_asym: f64, tol: f64 },
    #[error("matrix is not positive definite: smallest eigenvalue {min_eig:.6e} below floor {floor:.6e}")]
    NotPositiveDefinite { min_eig: f64, floor: f64 },
    #[error("fiber dimension {0} exceeds supported maximum 16")]
    FiberDimTooLarge(usize),
    #[error("contour touches spectrum: {0}")]
    ContourTouchesSpectrum(String),
    #[error("contour power requires Re(s) < 0, got Re(s) = {0}")]
    ContourPositiveOrder(f64),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("truncation depth {requested} exceeds stored depth {available}")]
    TruncationExceeded { requested: usize, available: usize },
    #[error("leading symbol term not invertible: smallest singular value {min_sv:.3e} at grid point (x={x}, angle={ang})")]
    NonInvertibleLeadingTerm { min_sv: f64, x: usize, ang: usize },
    #[error("evaluation at ξ = 0 is not defined for homogeneous terms")]
    ZeroCovector,
    #[error("cocycle verification failed: max violation {max_violation:.3e} at (a,b,c) = ({a}, {b}, {c})")]
    CocycleViolation {
        max_violation: f64,
        a: num_complex::Complex<f64>,
        b: num_complex::Complex<f64>,
        c: num_complex::Complex<f64>,
    },
    #[error("scalar symbol required: fiber dimension is {0}")]
    NotScalar(usize),
    #[error("evaluation at pole s = {0}: use meromorphic extension instead")]
    EvaluationAtPole(num_complex::Complex<f64>),
    #[error("requested window exceeds implemented pole range: {0}")]
    WindowOutOfRange(String),
    #[error("direct trace mode requires Re(s) < -m, got Re(s) = {re_s} with m = {m}")]
    NotInConvergenceRegion { re_s: f64, m: usize },
    #[error("gamma0 calibration disagreement: values {0:?} differ beyond tolerance {1:.1e}")]
    CalibrationDisagreement(Vec<f64>, f64),
    #[error("operator spec invalid: {0}")]
    SpecValidation(String),
    #[error("unknown verification suite '{0}'")]
    UnknownSuite(String),
    #[error("verification suite '{suite}' failed: {detail}")]
    SuiteFailed { suite: String, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, TorzetaError>;
