use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("division by the zero transfer function")]
    DivisionByZero,

    #[error("transfer function evaluated at a pole (omega = {omega} rad/s)")]
    PoleEvaluation { omega: f64 },

    #[error("empty frequency grid requested")]
    EmptyGrid,

    #[error("simulation diverged at t = {t} s")]
    Diverged { t: f64 },

    #[error("unknown signal `{0}`")]
    UnknownSignal(String),

    #[error("response is unbounded: {0}")]
    Unbounded(String),

    #[error("traces are sampled differently: {0}")]
    MismatchedSampling(String),

    #[error("window {start}..{end} s is not covered by the trace")]
    WindowOutOfRange { start: f64, end: f64 },

    #[error("signal `{signal}` has not settled (final-window slope {slope:e} per s)")]
    NotSettled { signal: String, slope: f64 },

    #[error("inconsistent operating point: {0}")]
    InconsistentOperatingPoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be strictly positive, got {value}"
        )))
    }
}
