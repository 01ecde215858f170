use thiserror::Error;

/// Failure modes shared by every module in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain where the model is defined.
    #[error("parameter out of domain: {0}")]
    Domain(String),
    /// The requested design cannot be realized (geometry or band constraints).
    #[error("infeasible design: {0}")]
    Infeasible(String),
    /// A numerical procedure did not meet its convergence budget.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Fewer than two interior resonance peaks were found in a frequency response.
    #[error("no dual resonance: {0}")]
    NoDualResonance(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
