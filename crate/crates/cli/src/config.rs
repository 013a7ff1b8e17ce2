//! Run configuration: JSON file, then command-line overrides.

use std::path::Path;

use qresb_core::equilibrium::SolverSettings;
use qresb_core::game::{BehavioralParams, CoordinationGame, Policy};
use qresb_core::policy::SweepParameter;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Payoffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Default for Payoffs {
    fn default() -> Self {
        Self {
            a: 6.0,
            b: 7.0,
            c: 1.0,
            d: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub tol: f64,
    pub max_iter: usize,
    pub grid_n: usize,
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverSettings::default();
        Self {
            tol: s.tol,
            max_iter: s.max_iter,
            grid_n: s.grid_n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub payoffs: Payoffs,
    pub kappa: f64,
    pub beta: f64,
    pub policy: Policy,
    pub solver: SolverSection,
    pub sweep: Option<SweepSection>,
    pub seed: u64,
    /// Tax levels for `compare`.
    pub taxes: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            payoffs: Payoffs::default(),
            kappa: 1.5,
            beta: 0.3,
            policy: Policy::baseline(),
            solver: SolverSection::default(),
            sweep: None,
            seed: 0,
            taxes: Vec::new(),
        }
    }
}

/// Validated pieces of a [`RunConfig`].
#[derive(Debug, Clone, Copy)]
pub struct Model {
    pub game: CoordinationGame,
    pub params: BehavioralParams,
    pub policy: Policy,
    pub settings: SolverSettings,
}

impl Model {
    /// Tax rate, zero under deletion.
    pub fn t(&self) -> f64 {
        match self.policy {
            Policy::Tax { t } => t,
            Policy::Deletion => 0.0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("bad config {}: {e}", path.display())))
    }

    pub fn model(&self) -> Result<Model, CliError> {
        let p = self.payoffs;
        let game = CoordinationGame::new(p.a, p.b, p.c, p.d)?;
        let params = BehavioralParams::new(self.beta, self.kappa)?;
        self.policy.validate()?;
        let settings = SolverSettings {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            grid_n: self.solver.grid_n,
        };
        settings.validate()?;
        Ok(Model {
            game,
            params,
            policy: self.policy,
            settings,
        })
    }
}
