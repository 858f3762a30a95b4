use thiserror::Error;

/// Failures raised by field evaluation and the geometric constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("point {point:?} lies outside the domain of chart `{chart}`")]
    DomainViolation { chart: String, point: Vec<f64> },
    #[error("metric is degenerate (relative |det| = {rel_det:e})")]
    DegenerateMetric { rel_det: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector field is not Killing (residual {residual:e})")]
    NotKilling { residual: f64 },
    #[error("moment section vanishes (|mu| = {norm:e})")]
    ZeroMoment { norm: f64 },
    #[error("function is not a moment map (residual {residual:e})")]
    NotMomentMap { residual: f64 },
    #[error("point is off the level set (residual {residual:e})")]
    OffLevelSet { residual: f64 },
    #[error("gauge patch is degenerate (modulus margin {margin:e})")]
    GaugeDegenerate { margin: f64 },
    #[error("matrix size {0} is odd")]
    OddDimension(usize),
    #[error("matrix is singular (|det| = {0:e})")]
    Singular(f64),
    #[error("integrator error estimate {estimate:e} exceeds tolerance {tol:e}")]
    ToleranceNotMet { estimate: f64, tol: f64 },
    #[error("{0} is not available at the requested derivative order")]
    DerivativeUnavailable(&'static str),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
