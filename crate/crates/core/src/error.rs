use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A density matrix violated Hermiticity, normalization or positivity.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A physical or architectural parameter is out of its domain.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Purification post-selection has zero probability of success.
    #[error("degenerate purification: heralding probability is zero")]
    DegeneratePurification,

    /// An expected waiting time is infinite (a success probability is zero).
    #[error("divergent waiting time: {0}")]
    Divergence(String),

    /// Two independent evaluations of the same quantity disagree.
    #[error("internal consistency error: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(param(format!("{name} = {p} is not a probability")));
    }
    Ok(())
}
