use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A phase point lies outside the model's domain (JC: `q1^2 + p1^2 >= 4J`).
    #[error("phase point outside model domain: {0}")]
    Domain(String),

    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),

    #[error("no positive p2 reaches energy {energy}")]
    InfeasibleEnergy { energy: f64 },

    /// Probability in the outermost basis shells exceeds the leakage threshold.
    #[error("truncation leakage {leakage:e} exceeds {threshold:e}")]
    Truncation { leakage: f64, threshold: f64 },

    #[error("resource budget exceeded: {what} needs {requested}, limit {limit}")]
    Resource { what: &'static str, requested: usize, limit: usize },

    #[error("relative energy drift {drift:e} at t = {time} exceeds budget {budget:e}")]
    IntegrationQuality { drift: f64, budget: f64, time: f64 },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("no spectral lines above threshold")]
    EmptyLines,

    #[error("density matrix has eigenvalue {eigenvalue:e} below -1e-8")]
    InvalidDensity { eigenvalue: f64 },

    #[error("operator is not Hermitian (max defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("LAPACK eigensolver failed with info = {info}")]
    Eigensolver { info: i32 },
}
