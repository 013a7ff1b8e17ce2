//! Independent checks of the solvers against the model's analytical claims.
//!
//! [`run_verification`] executes every check once and returns them sorted by
//! name, together with an informational [`AuditReport`] of the published
//! worked example.

mod audit;
mod checks;
mod oracle;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::equilibrium::SolverSettings;
use crate::game::{BehavioralParams, CoordinationGame};

pub use audit::{audit_worked_example, AuditFinding, AuditReport};
pub use checks::{
    check_comparative_statics, check_deletion_dominance, check_derivative, check_limits,
    check_oracle_agreement, check_tax_statics, check_threshold_invariance, check_welfare_algebra,
    monte_carlo_consistency, monte_carlo_determinism, welfare_expanded,
};
pub use oracle::oracle_fixed_points;

/// Seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub label: String,
    pub value: f64,
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// Short tag for the property being tested.
    pub claim: String,
    pub status: CheckStatus,
    pub tolerance: f64,
    pub measured: Vec<Measurement>,
    pub detail: String,
}

impl CheckResult {
    pub(crate) fn new(name: &str, claim: &str, tolerance: f64) -> Self {
        Self {
            name: name.to_owned(),
            claim: claim.to_owned(),
            status: CheckStatus::Pass,
            tolerance,
            measured: Vec::new(),
            detail: String::new(),
        }
    }

    pub(crate) fn measure(mut self, label: &str, value: f64) -> Self {
        self.measured.push(Measurement {
            label: label.to_owned(),
            value,
        });
        self
    }

    pub(crate) fn verdict(mut self, ok: bool, detail: impl Into<String>) -> Self {
        self.status = if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        };
        self.detail = detail.into();
        self
    }

    pub(crate) fn skipped(mut self, detail: impl Into<String>) -> Self {
        self.status = CheckStatus::Skipped;
        self.detail = detail.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn value(&self, label: &str) -> Option<f64> {
        self.measured
            .iter()
            .find(|m| m.label == label)
            .map(|m| m.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub audit: AuditReport,
}

impl VerificationReport {
    /// No check failed. Skipped checks and audit findings do not count.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Inputs for a full verification run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub game: CoordinationGame,
    pub params: BehavioralParams,
    pub t: f64,
    pub seed: u64,
    pub settings: SolverSettings,
    /// Random instances per randomized check.
    pub draws: usize,
    /// Monte Carlo sample size.
    pub mc_draws: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            game: CoordinationGame::new(6.0, 7.0, 1.0, 2.0).expect("valid game"),
            params: BehavioralParams::new(0.3, 1.5).expect("valid params"),
            t: 0.0,
            seed: DEFAULT_SEED,
            settings: SolverSettings::default(),
            draws: 50,
            mc_draws: 1_000_000,
        }
    }
}

/// Deterministic generator for randomized checks.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random valid game with payoffs in [0, 10].
pub fn random_game<R: Rng>(rng: &mut R) -> CoordinationGame {
    loop {
        let a = rng.gen_range(0.5..9.5);
        let b = rng.gen_range(a..10.0);
        let c = rng.gen_range(0.0..a);
        let d = rng.gen_range(0.0..a);
        if let Ok(game) = CoordinationGame::new(a, b, c, d) {
            return game;
        }
    }
}

/// Random `(game, params, t)` with contraction modulus below 0.9,
/// `kappa` in [0, 3] and `t` in [0, 2].
pub fn random_contraction_instance<R: Rng>(
    rng: &mut R,
) -> (CoordinationGame, BehavioralParams, f64) {
    let game = random_game(rng);
    let beta_max = 0.9 * 4.0 / (game.alpha() + game.gamma());
    let beta = rng.gen_range(0.0..beta_max);
    let kappa = rng.gen_range(0.0..=3.0);
    let t = rng.gen_range(0.0..=2.0);
    let params = BehavioralParams::new(beta, kappa).expect("sampled params are valid");
    (game, params, t)
}

/// Runs every check once. Checks come back sorted by name.
pub fn run_verification(cfg: &VerifyConfig) -> VerificationReport {
    let mut checks = vec![
        check_oracle_agreement(cfg.seed, cfg.draws, &cfg.settings),
        check_derivative(cfg.seed, 2 * cfg.draws),
        check_threshold_invariance(&cfg.game, cfg.params.kappa()),
        check_welfare_algebra(cfg.seed, cfg.draws),
        check_deletion_dominance(cfg, &[0.0, 0.5, 1.0, 2.0, 5.0]),
        check_comparative_statics(
            &cfg.game,
            cfg.params.beta(),
            cfg.t,
            &[0.0, 0.75, 1.5, 2.25, 3.0],
            &cfg.settings,
        )
        .unwrap_or_else(|e| {
            CheckResult::new("comparative_statics_kappa", "p* increasing in kappa", 0.0)
                .verdict(false, e.to_string())
        }),
        check_tax_statics(
            &cfg.game,
            &cfg.params,
            &[0.0, 0.25, 0.5, 0.75, 1.0],
            &cfg.settings,
        ),
        check_limits(&cfg.game, &cfg.params, cfg.t, &cfg.settings),
        checks::monte_carlo_at_config(cfg),
        monte_carlo_determinism(cfg),
    ];
    checks.sort_by(|x, y| x.name.cmp(&y.name));
    VerificationReport {
        seed: cfg.seed,
        checks,
        audit: audit_worked_example(),
    }
}
