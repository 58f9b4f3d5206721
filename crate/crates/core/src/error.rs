use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {deviation:e}")]
    NonHermitianInput { deviation: f64 },

    #[error("matrix data is malformed: {0}")]
    MalformedMatrix(String),

    #[error("eigenvalue {eigenvalue} lies outside the window [{m}, {big_m}]")]
    SpectrumOutOfWindow { eigenvalue: f64, m: f64, big_m: f64 },

    #[error("function value is not finite at t = {at}")]
    NonFiniteFunctionValue { at: f64 },

    #[error("element is not positive: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("contour does not enclose the spectrum (eigenvalue {eigenvalue})")]
    ContourDoesNotEncloseSpectrum { eigenvalue: f64 },

    #[error("resolvent is singular at a quadrature node")]
    SingularResolvent,

    #[error("invalid contour: {0}")]
    InvalidContour(String),

    #[error("invalid spectral interval [{m}, {big_m}]: need m < M")]
    InvalidInterval { m: f64, big_m: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported functional family: {0}")]
    UnsupportedFamily(String),

    #[error("invalid functional: {0}")]
    InvalidFunctional(String),

    #[error("invalid function selector: {0}")]
    InvalidSelector(String),

    #[error("point {t} is within the endpoint guard of ({m}, {big_m})")]
    EndpointDegenerate { t: f64, m: f64, big_m: f64 },

    #[error("point {t} is outside [{m}, {big_m}]")]
    TOutOfWindow { t: f64, m: f64, big_m: f64 },

    #[error("window [{m}, {big_m}] is outside the domain of {function}")]
    WindowOutsideDomain { m: f64, big_m: f64, function: String },

    #[error("empty input")]
    EmptyInput,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("integral did not converge on [{m}, {big_m}]")]
    NonIntegrable { m: f64, big_m: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
