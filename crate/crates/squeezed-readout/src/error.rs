use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReadoutError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("noise sum must be positive (got {0:e})")]
    DegenerateNoise(f64),
    #[error("unstable configuration: {0}")]
    Unstable(String),
    #[error("steady-state cavity correlations are undefined: {0}")]
    SteadyStateUndefined(String),
    #[error("qubit is resonant with the squeezed cavity mode (delta_q = omega_sq)")]
    Resonance,
    #[error("no sign change of the perpendicular separation for omega_sq/kappa in [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("bracket endpoints do not straddle a root: f(lo) = {flo:e}, f(hi) = {fhi:e}")]
    InvalidBracket { flo: f64, fhi: f64 },
    #[error("oracle did not converge: relative change {change:e} at {steps} steps")]
    NonConvergence { steps: usize, change: f64 },
    #[error("covariance is not positive definite: {0}")]
    IndefiniteCovariance(String),
    #[error("covariance is singular")]
    SingularCovariance,
    #[error("scheme has zero SNR at unit tone amplitude")]
    ZeroSignal,
}

impl ReadoutError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        ReadoutError::InvalidParameter { name, reason: reason.into() }
    }
}

pub type Result<T> = std::result::Result<T, ReadoutError>;
