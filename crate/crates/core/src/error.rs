use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// `A = (1 + α − i g δp0) / (2α)` is singular at g = 1.
    #[error("coherence terms are singular at g = 1; evaluate the limit form instead")]
    DegenerateBranch,

    #[error("invalid time grid: {0}")]
    Grid(&'static str),

    #[error("invalid density matrix: {0}")]
    NonPhysical(String),

    #[error("series step {step} exceeds {max_step} (20 points per oscillation period required)")]
    Resolution { step: f64, max_step: f64 },

    #[error("revival predicate is {value} at both ends of bracket [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64, value: bool },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(
    cond: bool,
    name: &'static str,
    value: f64,
    reason: &'static str,
) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            reason,
        })
    }
}
