use std::fmt;

use serde::{Deserialize, Serialize};

/// Which ordering requirement of a coordination game failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GameViolation {
    /// Some payoff is NaN or infinite.
    NonFinite,
    /// `a <= c`.
    ANotAboveC,
    /// `b <= d`.
    BNotAboveD,
    /// `b <= a`: (Y,Y) does not Pareto-dominate (X,X).
    BNotAboveA,
    /// `a <= d`: X is not a strict best response to X, so `gamma <= 0`.
    ANotAboveD,
}

impl fmt::Display for GameViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GameViolation::NonFinite => "payoffs must be finite",
            GameViolation::ANotAboveC => "a <= c",
            GameViolation::BNotAboveD => "b <= d",
            GameViolation::BNotAboveA => "b <= a",
            GameViolation::ANotAboveD => "a <= d",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(GameViolation),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("contraction modulus {modulus} >= 1; enumerate all fixed points instead")]
    NotContraction { modulus: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("regime {label} at p = {p} disagrees with tax {t} vs threshold {threshold}")]
    RegimeInconsistent {
        label: &'static str,
        p: f64,
        t: f64,
        threshold: f64,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(domain(format!("probability {p} outside [0, 1]")))
    }
}

pub(crate) fn check_tax(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(domain(format!("tax {t} must be finite and >= 0")))
    }
}
