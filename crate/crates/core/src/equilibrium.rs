//! Logit fixed-point map and its solvers.
//!
//! A symmetric equilibrium is a probability `p` on X with `p = f(p)`, where
//! `f(p) = 1 / (1 + exp(beta * delta_t(p)))` and `delta_t` is
//! [`payoff_difference`]. When `beta (alpha + gamma) / 4 < 1` the map is a
//! contraction and [`solve_banach`] applies; otherwise use
//! [`find_all_fixed_points`].

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, check_tax, domain, Error, Result};
use crate::game::{payoff_difference, BehavioralParams, CoordinationGame};

/// Smallest probability the logistic will return. Keeps `f` inside (0, 1)
/// even when `exp` underflows.
const PROB_FLOOR: f64 = f64::MIN_POSITIVE;
/// Largest double strictly below one.
const PROB_CEIL: f64 = 1.0 - f64::EPSILON / 2.0;

/// Solver knobs shared by every entry point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub grid_n: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 100_000,
            grid_n: 10_000,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(domain(format!("tol {} must be finite and > 0", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(domain("max_iter must be positive"));
        }
        if self.grid_n < 100 {
            return Err(domain(format!("grid_n {} must be >= 100", self.grid_n)));
        }
        Ok(())
    }
}

/// A symmetric fixed point of the logit map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    /// Probability of the status-quo action X.
    pub p: f64,
    /// `|f(p) - p|`.
    pub residual: f64,
    pub iterations: usize,
    /// `|f'(p)| < 1`.
    pub stable: bool,
    /// `f'(p)`; always `>= 0`.
    pub slope: f64,
    /// `beta (alpha + gamma) / 4`.
    pub contraction_modulus: f64,
}

impl Equilibrium {
    /// Slope within `1e-9` of the stability boundary. Such points are
    /// classified unstable, but callers may want to warn.
    pub fn marginal(&self) -> bool {
        (self.slope - 1.0).abs() <= 1e-9
    }
}

fn logistic(x: f64) -> f64 {
    let s = if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    };
    s.clamp(PROB_FLOOR, PROB_CEIL)
}

fn check_logit_args(beta: f64, delta: f64) -> Result<()> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(domain(format!("beta {beta} must be finite and >= 0")));
    }
    if !delta.is_finite() {
        return Err(domain(format!("payoff difference {delta} must be finite")));
    }
    Ok(())
}

/// `1 / (1 + exp(beta * delta))`, the logit probability of X when Y holds an
/// effective advantage of `delta`.
///
/// Never evaluates `exp` of a large positive argument. Saturates at the
/// nearest doubles inside (0, 1) instead of returning 0 or 1.
pub fn logit_prob_x(beta: f64, delta: f64) -> Result<f64> {
    if beta == 0.0 {
        return Ok(0.5);
    }
    check_logit_args(beta, delta)?;
    Ok(logistic(-beta * delta))
}

/// `1 - logit_prob_x(beta, delta)`, evaluated without cancellation.
pub fn logit_prob_y(beta: f64, delta: f64) -> Result<f64> {
    if beta == 0.0 {
        return Ok(0.5);
    }
    check_logit_args(beta, delta)?;
    Ok(logistic(beta * delta))
}

/// The logit best-response map `f(p)`.
pub fn fixed_point_map(
    game: &CoordinationGame,
    params: &BehavioralParams,
    t: f64,
    p: f64,
) -> Result<f64> {
    let delta = payoff_difference(game, params, t, p)?;
    logit_prob_x(params.beta(), delta)
}

/// `f(p) - p`. Above one half the difference is taken between complements,
/// `(1 - p) - (1 - f(p))`, so the sign survives when `f(p)` rounds to 1.
pub fn excess(game: &CoordinationGame, params: &BehavioralParams, t: f64, p: f64) -> Result<f64> {
    let delta = payoff_difference(game, params, t, p)?;
    if p <= 0.5 {
        Ok(logit_prob_x(params.beta(), delta)? - p)
    } else {
        Ok((1.0 - p) - logit_prob_y(params.beta(), delta)?)
    }
}

/// `f'(p) = beta (alpha + gamma) L(beta delta_t(p))` with
/// `L(x) = e^x / (1 + e^x)^2`.
pub fn map_derivative(
    game: &CoordinationGame,
    params: &BehavioralParams,
    t: f64,
    p: f64,
) -> Result<f64> {
    let delta = payoff_difference(game, params, t, p)?;
    let beta = params.beta();
    if beta == 0.0 {
        return Ok(0.0);
    }
    let e = (-(beta * delta).abs()).exp();
    let logistic_density = e / ((1.0 + e) * (1.0 + e));
    Ok(beta * (game.alpha() + game.gamma()) * logistic_density)
}

/// Global Lipschitz bound `beta (alpha + gamma) / 4` of the map on [0, 1].
pub fn contraction_modulus(game: &CoordinationGame, params: &BehavioralParams) -> f64 {
    params.beta() * (game.alpha() + game.gamma()) / 4.0
}

/// Successive iterates `p0, f(p0), f(f(p0)), ...`.
pub fn iterate_map<'a>(
    game: &'a CoordinationGame,
    params: &'a BehavioralParams,
    t: f64,
    p0: f64,
) -> Result<impl Iterator<Item = f64> + 'a> {
    check_probability(p0)?;
    check_tax(t)?;
    Ok(std::iter::successors(Some(p0), move |&p| {
        // inputs were validated and f maps into (0, 1)
        fixed_point_map(game, params, t, p).ok()
    }))
}

/// Banach iteration from `p0 = 1/2`.
pub fn solve_banach(
    game: &CoordinationGame,
    params: &BehavioralParams,
    t: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Equilibrium> {
    solve_banach_from(game, params, t, 0.5, tol, max_iter)
}

/// Banach iteration from an arbitrary start. Stops at the first iterate with
/// `|f(p) - p| <= tol` and returns that iterate.
pub fn solve_banach_from(
    game: &CoordinationGame,
    params: &BehavioralParams,
    t: f64,
    p0: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Equilibrium> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(domain(format!("tol {tol} must be finite and > 0")));
    }
    check_tax(t)?;
    check_probability(p0)?;
    let modulus = contraction_modulus(game, params);
    if modulus >= 1.0 {
        return Err(Error::NotContraction { modulus });
    }

    let mut p = p0;
    let mut residual = f64::INFINITY;
    for k in 1..=max_iter {
        let next = fixed_point_map(game, params, t, p)?;
        residual = (next - p).abs();
        if residual <= tol {
            let slope = map_derivative(game, params, t, p)?;
            return Ok(Equilibrium {
                p,
                residual,
                iterations: k,
                stable: true,
                slope,
                contraction_modulus: modulus,
            });
        }
        p = next;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}

/// Every fixed point of `f` on [0, 1], ascending.
///
/// Scans `f(p) - p` on `grid_n + 1` uniform points, bisects each sign change
/// to width below `tol` and merges roots closer than `10 tol`. The list is
/// never empty: `f(0) > 0` and `f(1) < 1`.
pub fn find_all_fixed_points(
    game: &CoordinationGame,
    params: &BehavioralParams,
    t: f64,
    grid_n: usize,
    tol: f64,
) -> Result<Vec<Equilibrium>> {
    if grid_n < 100 {
        return Err(domain(format!("grid_n {grid_n} must be >= 100")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(domain(format!("tol {tol} must be finite and > 0")));
    }
    check_tax(t)?;

    let g = |p: f64| excess(game, params, t, p);
    let modulus = contraction_modulus(game, params);
    let node = |i: usize| i as f64 / grid_n as f64;

    let mut roots: Vec<(f64, usize)> = Vec::new();
    let mut lo = 0.0;
    let mut g_lo = g(lo)?;
    for i in 1..=grid_n {
        let hi = node(i);
        let g_hi = g(hi)?;
        if g_lo == 0.0 {
            roots.push((lo, 0));
        } else if g_hi != 0.0 && (g_lo > 0.0) != (g_hi > 0.0) {
            roots.push(bisect(&g, lo, hi, g_lo, tol)?);
        }
        lo = hi;
        g_lo = g_hi;
    }
    if g_lo == 0.0 {
        roots.push((lo, 0));
    }

    let mut merged: Vec<(f64, usize)> = Vec::with_capacity(roots.len());
    for (root, iters) in roots {
        match merged.last() {
            Some(&(prev, _)) if root - prev < 10.0 * tol => {}
            _ => merged.push((root, iters)),
        }
    }

    merged
        .into_iter()
        .map(|(p, iterations)| {
            let slope = map_derivative(game, params, t, p)?;
            Ok(Equilibrium {
                p,
                residual: g(p)?.abs(),
                iterations,
                stable: slope.abs() < 1.0,
                slope,
                contraction_modulus: modulus,
            })
        })
        .collect()
}

fn bisect<F>(g: &F, mut lo: f64, mut hi: f64, mut g_lo: f64, tol: f64) -> Result<(f64, usize)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut iterations = 0;
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let g_mid = g(mid)?;
        if g_mid == 0.0 {
            return Ok((mid, iterations));
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), iterations))
}
