//! The symmetric 2x2 coordination game, its behavioural parameters and the
//! payoff primitives every solver builds on.
//!
//! Payoffs to the row player:
//!
//! ```text
//!            X      Y
//!     X      a      c
//!     Y      d      b
//! ```
//!
//! X is the inherited default (status quo), Y the superior alternative.
//! Choosing Y costs `kappa`; a tax `t` lowers both X cells by `t`.

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, check_tax, domain, Error, GameViolation, Result};

/// A validated symmetric coordination game.
///
/// Fields are private so `alpha`, `gamma` and `welfare_monotone` can never
/// drift from the payoffs they are derived from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoordinationGame {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    alpha: f64,
    gamma: f64,
    welfare_monotone: bool,
}

impl CoordinationGame {
    /// Validates `a > c`, `b > d`, `b > a` and `a > d` (all strict).
    ///
    /// The first three do not imply `a > d`, so `gamma > 0` is checked on
    /// its own. Together they imply `c + d < a + b`, so every valid game is
    /// welfare-monotone.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidGame(GameViolation::NonFinite));
        }
        if a <= c {
            return Err(Error::InvalidGame(GameViolation::ANotAboveC));
        }
        if b <= d {
            return Err(Error::InvalidGame(GameViolation::BNotAboveD));
        }
        if b <= a {
            return Err(Error::InvalidGame(GameViolation::BNotAboveA));
        }
        if a <= d {
            return Err(Error::InvalidGame(GameViolation::ANotAboveD));
        }
        Ok(Self {
            a,
            b,
            c,
            d,
            alpha: b - c,
            gamma: a - d,
            welfare_monotone: c + d <= a + b,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// `b - c`: gain from Y over X against a Y-playing opponent.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `a - d`: loss from Y relative to X against an X-playing opponent.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// True iff `c + d <= a + b`, the condition under which deletion is
    /// guaranteed to beat every finite tax on welfare.
    pub fn welfare_monotone(&self) -> bool {
        self.welfare_monotone
    }
}

impl<'de> Deserialize<'de> for CoordinationGame {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            a: f64,
            b: f64,
            c: f64,
            d: f64,
        }
        let raw = Raw::deserialize(de)?;
        CoordinationGame::new(raw.a, raw.b, raw.c, raw.d).map_err(serde::de::Error::custom)
    }
}

/// Logit precision and switching cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BehavioralParams {
    beta: f64,
    kappa: f64,
}

impl BehavioralParams {
    pub fn new(beta: f64, kappa: f64) -> Result<Self> {
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(domain(format!("beta {beta} must be finite and >= 0")));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(domain(format!("kappa {kappa} must be finite and >= 0")));
        }
        Ok(Self { beta, kappa })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn with_beta(self, beta: f64) -> Result<Self> {
        Self::new(beta, self.kappa)
    }

    pub fn with_kappa(self, kappa: f64) -> Result<Self> {
        Self::new(self.beta, kappa)
    }
}

/// An intervention on the status-quo action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Policy {
    /// Per-unit tax on X. `Tax { t: 0.0 }` is the no-intervention baseline.
    Tax { t: f64 },
    /// X is removed from the feasible set.
    Deletion,
}

impl Policy {
    pub fn tax(t: f64) -> Result<Self> {
        check_tax(t)?;
        Ok(Policy::Tax { t })
    }

    pub fn baseline() -> Self {
        Policy::Tax { t: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Policy::Tax { t } => check_tax(t),
            Policy::Deletion => Ok(()),
        }
    }
}

/// `U(X, p) = p a + (1 - p) c`, where `p` is the opponent's probability of X.
pub fn expected_payoff_x(game: &CoordinationGame, p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(p * game.a + (1.0 - p) * game.c)
}

/// `U(Y, p) = p d + (1 - p) b`, gross of the switching cost.
pub fn expected_payoff_y(game: &CoordinationGame, p: f64) -> Result<f64> {
    check_probability(p)?;
    Ok(p * game.d + (1.0 - p) * game.b)
}

/// Effective advantage of Y over X, `alpha - kappa + t - p (alpha + gamma)`.
///
/// Positive values favour switching away from the status quo.
pub fn payoff_difference(
    game: &CoordinationGame,
    params: &BehavioralParams,
    t: f64,
    p: f64,
) -> Result<f64> {
    check_probability(p)?;
    check_tax(t)?;
    Ok(game.alpha - params.kappa + t - p * (game.alpha + game.gamma))
}

/// Expected per-player welfare when both players mix independently with
/// probability `p` on X.
pub fn welfare(game: &CoordinationGame, p: f64) -> Result<f64> {
    check_probability(p)?;
    let q = 1.0 - p;
    Ok(p * p * game.a + p * q * (game.c + game.d) + q * q * game.b)
}

/// `W(0) - W(p)`, evaluated in the factored form
/// `p [(b - a) + (1 - p)(a + b - c - d)]` so that tiny `p` keeps its sign.
pub fn welfare_shortfall(game: &CoordinationGame, p: f64) -> Result<f64> {
    check_probability(p)?;
    let excess = game.a + game.b - game.c - game.d;
    Ok(p * ((game.b - game.a) + (1.0 - p) * excess))
}
