use thiserror::Error;

/// Failures shared by the solvers, bound evaluators and simulators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A power series was evaluated at or beyond its radius of convergence.
    #[error("series diverges: {0}")]
    Divergence(String),
    /// A bracketing root finder could not find (or could not isolate) a sign change.
    #[error("bracket failure: {0}")]
    Bracket(String),
    /// A computed quantity left its admissible range.
    #[error("range error: {0}")]
    Range(String),
    /// A simulated replicate activated more vertices than the configured cap.
    #[error("replicate {replicate} exceeded the cap of {cap} activated vertices")]
    ActivationCap { replicate: u64, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "tolerance must be positive and finite, got {tol}"
        )))
    }
}
