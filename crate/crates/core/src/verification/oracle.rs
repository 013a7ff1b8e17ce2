//! Brute-force fixed-point oracle.
//!
//! Shares nothing with [`crate::equilibrium`] beyond the expected-payoff
//! primitives: choice probabilities come from a max-shifted two-action
//! softmax over tax- and cost-adjusted payoffs, and roots from a plain
//! sign scan plus bisection.

use crate::game::{expected_payoff_x, expected_payoff_y, BehavioralParams, CoordinationGame};

const ORACLE_WIDTH: f64 = 1e-12;

/// Softmax probabilities `(P[X], P[Y])` against an opponent mixing at `p`.
fn softmax_choice(
    game: &CoordinationGame,
    params: &BehavioralParams,
    t: f64,
    p: f64,
) -> (f64, f64) {
    let ux = params.beta() * (expected_payoff_x(game, p).expect("p in [0,1]") - t);
    let uy = params.beta() * (expected_payoff_y(game, p).expect("p in [0,1]") - params.kappa());
    let top = ux.max(uy);
    let ex = (ux - top).exp();
    let ey = (uy - top).exp();
    (ex / (ex + ey), ey / (ex + ey))
}

fn gap(game: &CoordinationGame, params: &BehavioralParams, t: f64, p: f64) -> f64 {
    let (px, py) = softmax_choice(game, params, t, p);
    if p < 0.5 {
        px - p
    } else {
        (1.0 - p) - py
    }
}

/// All roots of `P[X](p) - p` on [0, 1], ascending, each bisected to width
/// `1e-12`.
///
/// # Panics
///
/// If `grid_n < 1000`.
pub fn oracle_fixed_points(
    game: &CoordinationGame,
    params: &BehavioralParams,
    t: f64,
    grid_n: usize,
) -> Vec<f64> {
    assert!(grid_n >= 1000, "oracle grid must have at least 1000 cells");
    let h = |p| gap(game, params, t, p);
    let values: Vec<(f64, f64)> = (0..=grid_n)
        .map(|i| {
            let p = i as f64 / grid_n as f64;
            (p, h(p))
        })
        .collect();

    let mut roots = Vec::new();
    for pair in values.windows(2) {
        let (p0, h0) = pair[0];
        let (p1, h1) = pair[1];
        if h0 == 0.0 {
            roots.push(p0);
            continue;
        }
        if h1 == 0.0 || h0.signum() == h1.signum() {
            continue;
        }
        let (mut lo, mut hi) = (p0, p1);
        let positive_at_lo = h0 > 0.0;
        while hi - lo > ORACLE_WIDTH {
            let mid = lo + (hi - lo) / 2.0;
            if mid == lo || mid == hi {
                break;
            }
            if (h(mid) > 0.0) == positive_at_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(lo + (hi - lo) / 2.0);
    }
    if let Some(&(p, v)) = values.last() {
        if v == 0.0 {
            roots.push(p);
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_has_three_roots_and_not_078() {
        let g = CoordinationGame::new(6.0, 7.0, 1.0, 2.0).unwrap();
        let k = BehavioralParams::new(1.0, 1.5).unwrap();
        let roots = oracle_fixed_points(&g, &k, 0.0, 10_000);
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().all(|r| (r - 0.78).abs() > 0.1));
    }

    #[test]
    fn beta_zero_gives_half() {
        let g = CoordinationGame::new(6.0, 7.0, 1.0, 2.0).unwrap();
        let k = BehavioralParams::new(0.0, 1.5).unwrap();
        assert_eq!(oracle_fixed_points(&g, &k, 0.3, 1000), vec![0.5]);
    }

    #[test]
    #[should_panic]
    fn coarse_grid_panics() {
        let g = CoordinationGame::new(6.0, 7.0, 1.0, 2.0).unwrap();
        let k = BehavioralParams::new(0.0, 1.5).unwrap();
        oracle_fixed_points(&g, &k, 0.0, 999);
    }
}
