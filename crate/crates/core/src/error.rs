use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is numerically singular (pivot {pivot:e} below threshold {threshold:e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("QR iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("gave up after {attempts} consecutive ill-conditioned draws")]
    ResampleLimit { attempts: usize },

    #[error("exact G_n is only available for m = 1 (got m = {m})")]
    ExactUnavailable { m: usize },

    #[error("adaptive quadrature exceeded its subdivision budget (estimate {estimate:e}, error {error:e})")]
    QuadratureFailure { estimate: f64, error: f64 },

    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("zero eigenvalue in spectrum; trial rejected")]
    ZeroEigenvalue,

    #[error("angles are surrogate data; uniformity test is not meaningful")]
    SurrogateAngles,
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
