use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeomError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("point outside the metric domain: B = {scale:e}")]
    Domain { scale: f64 },
    #[error("negative discriminant Δ = {value:e} at u = {u}")]
    NegativeDiscriminant { u: f64, value: f64 },
    #[error("degenerate radius at u = {u}")]
    DegenerateRadius { u: f64 },
    #[error("negative radicand {value:e} at u = {u}")]
    NegativeRadicand { u: f64, value: f64 },
    #[error("quadrature on [{lo}, {hi}] did not converge (error estimate {estimate:e} after {panels} panels)")]
    QuadratureFailure { lo: f64, hi: f64, estimate: f64, panels: usize },
    #[error("empty domain of validity: {0}")]
    EmptyDomain(String),
    #[error("degenerate orbit (ω = 0) at u = {u}")]
    DegenerateOrbit { u: f64 },
    #[error("inconsistent profile curve at u = {u}: {reason}")]
    InconsistentCurve { u: f64, reason: String },
    #[error("no real family: {0}")]
    NoRealFamily(String),
    #[error("degenerate family: {0}")]
    DegenerateFamily(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("finite-difference stencil leaves the domain at ({u}, {t})")]
    StencilOutOfDomain { u: f64, t: f64 },
    #[error("degenerate immersion at ({u}, {t}): EG - F² = {det:e}")]
    DegenerateImmersion { u: f64, t: f64, det: f64 },
    #[error("no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
