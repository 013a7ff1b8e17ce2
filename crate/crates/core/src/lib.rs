//! Symmetric logit equilibrium with a status-quo switching cost in 2x2
//! coordination games.
//!
//! Players choose between an inherited default X and a Pareto-superior
//! alternative Y through a logit rule with precision `beta`; choosing Y
//! costs `kappa`. The crate solves for the symmetric equilibrium
//! probability of X, compares a tax on X with deleting X outright, and
//! checks the solvers against independent oracles.
//!
//! ```
//! use qresb_core::{
//!     game::{BehavioralParams, CoordinationGame},
//!     equilibrium::solve_banach,
//!     policy::threshold_tax,
//! };
//!
//! let game = CoordinationGame::new(6.0, 7.0, 1.0, 2.0)?;
//! let params = BehavioralParams::new(0.3, 1.5)?;
//! assert_eq!(threshold_tax(&game, &params), 0.5);
//! let eq = solve_banach(&game, &params, 0.5, 1e-12, 100_000)?;
//! assert_eq!(eq.p, 0.5);
//! # Ok::<(), qresb_core::Error>(())
//! ```

pub mod equilibrium;
pub mod error;
pub mod game;
pub mod policy;
pub mod verification;

pub use error::{Error, GameViolation, Result};
