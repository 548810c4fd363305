use thiserror::Error;

/// Errors raised by the simulator, the analytic helpers and the estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The adaptive integrator could not make progress.
    #[error("step size underflow at t = {time} us (stiff or singular right-hand side)")]
    Stiffness { time: f64 },

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("geometry outside the paraxial regime: {0}")]
    Geometry(String),

    #[error("undefined quantity: {0}")]
    Undefined(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidInput(msg()))
    }
}
