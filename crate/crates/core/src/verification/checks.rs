use rand::Rng;

use super::oracle::oracle_fixed_points;
use super::{random_contraction_instance, random_game, seeded_rng, CheckResult, VerifyConfig};
use crate::equilibrium::{
    contraction_modulus, find_all_fixed_points, fixed_point_map, map_derivative, solve_banach,
    SolverSettings,
};
use crate::error::{domain, Result};
use crate::game::{
    payoff_difference, welfare, welfare_shortfall, BehavioralParams, CoordinationGame,
};
use crate::policy::{
    classify_regime, deletion_outcome, tax_equilibria, threshold_tax, DEFAULT_TIE_TOL,
};

/// `b - p (b - a) + p (1 - p)(c + d - a - b)`, the expanded welfare form.
pub fn welfare_expanded(game: &CoordinationGame, p: f64) -> f64 {
    let (a, b, c, d) = (game.a(), game.b(), game.c(), game.d());
    b - p * (b - a) + p * (1.0 - p) * (c + d - a - b)
}

/// Banach solver vs. brute-force oracle on random contraction instances.
pub fn check_oracle_agreement(seed: u64, draws: usize, settings: &SolverSettings) -> CheckResult {
    const TOL: f64 = 1e-10;
    let check = CheckResult::new(
        "oracle_agreement",
        "unique fixed point under contraction",
        TOL,
    );
    let mut rng = seeded_rng(seed);
    let grid_n = settings.grid_n.max(1000);
    let mut worst = 0.0_f64;
    let mut bad_counts = 0usize;
    for i in 0..draws {
        let (game, params, t) = random_contraction_instance(&mut rng);
        let eq = match solve_banach(&game, &params, t, settings.tol, settings.max_iter) {
            Ok(eq) => eq,
            Err(e) => return check.verdict(false, format!("draw {i}: {e}")),
        };
        let roots = oracle_fixed_points(&game, &params, t, grid_n);
        if roots.len() != 1 {
            bad_counts += 1;
        }
        for r in roots {
            worst = worst.max((r - eq.p).abs());
        }
    }
    check
        .measure("draws", draws as f64)
        .measure("max_abs_diff", worst)
        .measure("draws_without_unique_root", bad_counts as f64)
        .verdict(
            worst < TOL && bad_counts == 0,
            format!("{draws} seeded draws, modulus < 0.9"),
        )
}

/// Analytic `f'` vs. central differences with `h = 1e-6`.
pub fn check_derivative(seed: u64, draws: usize) -> CheckResult {
    const H: f64 = 1e-6;
    const TOL: f64 = 1e-6;
    let check = CheckResult::new("derivative_finite_difference", "map derivative", TOL);
    let mut rng = seeded_rng(seed.wrapping_add(1));
    let mut worst = 0.0_f64;
    for _ in 0..draws {
        let game = random_game(&mut rng);
        let params = BehavioralParams::new(rng.gen_range(0.0..2.0), rng.gen_range(0.0..3.0))
            .expect("sampled params are valid");
        let t = rng.gen_range(0.0..2.0);
        let p = rng.gen_range(H..1.0 - H);
        let f = |q| fixed_point_map(&game, &params, t, q).expect("valid inputs");
        let numeric = (f(p + H) - f(p - H)) / (2.0 * H);
        let analytic = map_derivative(&game, &params, t, p).expect("valid inputs");
        worst = worst.max((numeric - analytic).abs());
    }
    check
        .measure("max_abs_diff", worst)
        .verdict(worst < TOL, format!("{draws} seeded draws"))
}

/// The threshold ignores `beta`, and `f(1/2) = 1/2` there for every `beta`.
pub fn check_threshold_invariance(game: &CoordinationGame, kappa: f64) -> CheckResult {
    let check = CheckResult::new(
        "threshold_beta_invariance",
        "threshold independent of beta",
        0.0,
    );
    let betas = [0.01, 0.3, 1.0, 10.0];
    let mut thresholds = Vec::new();
    let mut worst = 0.0_f64;
    for beta in betas {
        let params = match BehavioralParams::new(beta, kappa) {
            Ok(p) => p,
            Err(e) => return check.verdict(false, e.to_string()),
        };
        let t_bar = threshold_tax(game, &params);
        thresholds.push(t_bar);
        // a negative threshold is not an admissible tax; only its beta-invariance is checked
        if t_bar >= 0.0 {
            let p = fixed_point_map(game, &params, t_bar, 0.5).expect("valid inputs");
            worst = worst.max((p - 0.5).abs());
        }
    }
    let identical = thresholds
        .iter()
        .all(|t| t.to_bits() == thresholds[0].to_bits());
    check
        .measure("threshold", thresholds[0])
        .measure("max_abs_map_minus_half", worst)
        .verdict(identical && worst < 1e-14, "beta in {0.01, 0.3, 1, 10}")
}

/// Direct and expanded welfare forms agree on a 1000-point grid.
pub fn check_welfare_algebra(seed: u64, draws: usize) -> CheckResult {
    const TOL: f64 = 1e-12;
    let check = CheckResult::new("welfare_algebra", "two welfare forms agree", TOL);
    let mut rng = seeded_rng(seed.wrapping_add(2));
    let mut worst = 0.0_f64;
    for _ in 0..draws {
        let game = random_game(&mut rng);
        for i in 0..=1000 {
            let p = i as f64 / 1000.0;
            let direct = welfare(&game, p).expect("p in [0,1]");
            worst = worst.max((direct - welfare_expanded(&game, p)).abs());
        }
    }
    check
        .measure("max_abs_diff", worst)
        .verdict(worst < TOL, format!("{draws} seeded games"))
}

/// Deletion is parameter-free and beats every listed tax; `W(p) < W(0)` on
/// a grid for random games.
pub fn check_deletion_dominance(cfg: &VerifyConfig, taxes: &[f64]) -> CheckResult {
    let check = CheckResult::new(
        "deletion_dominance",
        "W(0) > W(p_t) for every finite tax",
        0.0,
    );
    let game = &cfg.game;
    if deletion_outcome(game) != (0.0, game.b()) {
        return check.verdict(false, "deletion outcome is not (0, b)");
    }
    let mut min_gap = f64::INFINITY;
    for &t in taxes {
        match tax_equilibria(game, &cfg.params, t, &cfg.settings) {
            Ok(eqs) => {
                for eq in eqs {
                    min_gap = min_gap.min(welfare_shortfall(game, eq.p).expect("p in [0,1]"));
                }
            }
            Err(e) => return check.verdict(false, format!("t = {t}: {e}")),
        }
    }
    let mut rng = seeded_rng(cfg.seed.wrapping_add(3));
    let mut grid_violations = 0usize;
    for _ in 0..cfg.draws {
        let g = random_game(&mut rng);
        let w0 = welfare(&g, 0.0).expect("p in [0,1]");
        for i in 1..=1000 {
            let p = i as f64 / 1000.0;
            if welfare(&g, p).expect("p in [0,1]") >= w0 {
                grid_violations += 1;
            }
        }
    }
    check
        .measure("min_gap", min_gap)
        .measure("grid_violations", grid_violations as f64)
        .verdict(
            min_gap > 0.0 && grid_violations == 0,
            format!(
                "taxes {taxes:?} at the configured game; {} random games",
                cfg.draws
            ),
        )
}

fn strictly_sorted_unique(grid: &[f64]) -> Result<Vec<f64>> {
    let mut sorted = grid.to_vec();
    if sorted.iter().any(|x| !x.is_finite()) {
        return Err(domain("grid values must be finite"));
    }
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(domain("grid contains duplicate values"));
    }
    Ok(sorted)
}

/// `p*` strictly increasing along `kappa_grid`, with positive central
/// differences at interior grid points.
pub fn check_comparative_statics(
    game: &CoordinationGame,
    beta: f64,
    t: f64,
    kappa_grid: &[f64],
    settings: &SolverSettings,
) -> Result<CheckResult> {
    let check = CheckResult::new("comparative_statics_kappa", "p* increasing in kappa", 0.0);
    let grid = strictly_sorted_unique(kappa_grid)?;
    let probe = BehavioralParams::new(beta, 0.0)?;
    let modulus = contraction_modulus(game, &probe);
    if modulus >= 1.0 {
        return Ok(check
            .measure("contraction_modulus", modulus)
            .skipped("not a contraction; uniqueness not guaranteed"));
    }
    let solve = |kappa: f64| -> Result<f64> {
        let params = BehavioralParams::new(beta, kappa)?;
        Ok(solve_banach(game, &params, t, settings.tol, settings.max_iter)?.p)
    };
    let ps = grid.iter().map(|&k| solve(k)).collect::<Result<Vec<_>>>()?;
    let increasing = ps.windows(2).all(|w| w[1] > w[0]);

    let mut min_slope = f64::INFINITY;
    for &kappa in grid.iter().skip(1).take(grid.len().saturating_sub(2)) {
        let h = (1e-4_f64).min(kappa / 2.0);
        let slope = (solve(kappa + h)? - solve(kappa - h)?) / (2.0 * h);
        min_slope = min_slope.min(slope);
    }
    let slope_ok = grid.len() < 3 || min_slope > 0.0;
    let mut check = check;
    for (k, p) in grid.iter().zip(&ps) {
        check = check.measure(&format!("p*(kappa={k})"), *p);
    }
    if grid.len() >= 3 {
        check = check.measure("min_interior_slope", min_slope);
    }
    Ok(check.verdict(increasing && slope_ok, format!("beta = {beta}, t = {t}")))
}

/// `p_t` strictly decreasing along `taxes`, regime labels consistent with
/// the threshold.
pub fn check_tax_statics(
    game: &CoordinationGame,
    params: &BehavioralParams,
    taxes: &[f64],
    settings: &SolverSettings,
) -> CheckResult {
    let check = CheckResult::new(
        "comparative_statics_tax",
        "p_t decreasing in t",
        DEFAULT_TIE_TOL,
    );
    let grid = match strictly_sorted_unique(taxes) {
        Ok(g) => g,
        Err(e) => return check.verdict(false, e.to_string()),
    };
    let modulus = contraction_modulus(game, params);
    if modulus >= 1.0 {
        return check
            .measure("contraction_modulus", modulus)
            .skipped("not a contraction; uniqueness not guaranteed");
    }
    let mut ps = Vec::new();
    let mut check = check;
    for &t in &grid {
        let eq = match solve_banach(game, params, t, settings.tol, settings.max_iter) {
            Ok(eq) => eq,
            Err(e) => return check.verdict(false, format!("t = {t}: {e}")),
        };
        // classify_regime errors if the label contradicts sign(threshold - t)
        if let Err(e) = classify_regime(game, params, t, DEFAULT_TIE_TOL, settings) {
            return check.verdict(false, format!("t = {t}: {e}"));
        }
        check = check.measure(&format!("p(t={t})"), eq.p);
        ps.push(eq.p);
    }
    let decreasing = ps.windows(2).all(|w| w[1] < w[0]);
    check.verdict(
        decreasing,
        format!("threshold = {}", threshold_tax(game, params)),
    )
}

/// Low- and high-precision limits of the logit equilibrium.
pub fn check_limits(
    game: &CoordinationGame,
    params: &BehavioralParams,
    t: f64,
    settings: &SolverSettings,
) -> CheckResult {
    const LOW_BETA: f64 = 1e-9;
    const HIGH_BETA: f64 = 50.0;
    let check = CheckResult::new("limits", "beta -> 0 and beta -> infinity limits", 1e-3);
    let run = || -> Result<(f64, f64, usize, bool)> {
        let low = params.with_beta(LOW_BETA)?;
        let p_low = solve_banach(game, &low, t, settings.tol, settings.max_iter)?.p;
        let low_dev = (p_low - 0.5).abs();

        let high = params.with_beta(HIGH_BETA)?;
        let roots = find_all_fixed_points(game, &high, t, settings.grid_n, settings.tol)?;
        let mut targets = Vec::new();
        if payoff_difference(game, &high, t, 0.0)? > 0.0 {
            targets.push(0.0);
        }
        if payoff_difference(game, &high, t, 1.0)? < 0.0 {
            targets.push(1.0);
        }
        let stable: Vec<f64> = roots.iter().filter(|e| e.stable).map(|e| e.p).collect();
        let dist = |p: f64| {
            targets
                .iter()
                .map(|x| (p - x).abs())
                .fold(f64::INFINITY, f64::min)
        };
        let worst = stable.iter().map(|&p| dist(p)).fold(0.0, f64::max);
        let covered = targets
            .iter()
            .all(|x| stable.iter().any(|p| (p - x).abs() < 1e-3));
        Ok((low_dev, worst, stable.len(), covered))
    };
    match run() {
        Ok((low_dev, worst, n_stable, covered)) => check
            .measure("low_beta_abs_dev_from_half", low_dev)
            .measure("high_beta_max_dist_to_pure", worst)
            .measure("high_beta_stable_points", n_stable as f64)
            .verdict(
                low_dev < 1e-6 && worst < 1e-3 && covered,
                format!("beta = {LOW_BETA} and {HIGH_BETA}"),
            ),
        Err(e) => check.verdict(false, e.to_string()),
    }
}

fn sample_frequency(prob: f64, n: usize, seed: u64) -> f64 {
    let mut rng = seeded_rng(seed);
    let hits = (0..n).filter(|_| rng.gen::<f64>() < prob).count();
    hits as f64 / n as f64
}

/// Samples `n` logit choices against an opponent at `p_star` and compares
/// the empirical X-frequency with `p_star` (4-sigma band).
pub fn monte_carlo_consistency(
    game: &CoordinationGame,
    params: &BehavioralParams,
    t: f64,
    p_star: f64,
    n: usize,
    seed: u64,
) -> Result<CheckResult> {
    if n < 10_000 {
        return Err(domain(format!("sample size {n} must be >= 10000")));
    }
    let prob = fixed_point_map(game, params, t, p_star)?;
    let residual = (prob - p_star).abs();
    if residual >= 1e-10 {
        return Err(domain(format!(
            "p* = {p_star} is not a fixed point (residual {residual:e})"
        )));
    }
    let freq = sample_frequency(prob, n, seed);
    let band = 4.0 * (p_star * (1.0 - p_star) / n as f64).sqrt();
    let dev = (freq - p_star).abs();
    Ok(CheckResult::new(
        "monte_carlo_consistency",
        "equilibrium is a choice frequency",
        band,
    )
    .measure("p_star", p_star)
    .measure("frequency", freq)
    .measure("abs_dev", dev)
    .verdict(dev <= band, format!("n = {n}, seed = {seed}")))
}

fn config_equilibrium(cfg: &VerifyConfig) -> Result<f64> {
    let eqs = tax_equilibria(&cfg.game, &cfg.params, cfg.t, &cfg.settings)?;
    eqs.iter()
        .find(|e| e.stable)
        .or(eqs.first())
        .map(|e| e.p)
        .ok_or_else(|| domain("no equilibrium found"))
}

pub(super) fn monte_carlo_at_config(cfg: &VerifyConfig) -> CheckResult {
    config_equilibrium(cfg)
        .and_then(|p| {
            monte_carlo_consistency(&cfg.game, &cfg.params, cfg.t, p, cfg.mc_draws, cfg.seed)
        })
        .unwrap_or_else(|e| {
            CheckResult::new(
                "monte_carlo_consistency",
                "equilibrium is a choice frequency",
                0.0,
            )
            .verdict(false, e.to_string())
        })
}

/// Two runs with the same seed give bit-identical frequencies.
pub fn monte_carlo_determinism(cfg: &VerifyConfig) -> CheckResult {
    let check = CheckResult::new(
        "monte_carlo_determinism",
        "seeded sampling reproducible",
        0.0,
    );
    let p = match config_equilibrium(cfg) {
        Ok(p) => p,
        Err(e) => return check.verdict(false, e.to_string()),
    };
    let prob = match fixed_point_map(&cfg.game, &cfg.params, cfg.t, p) {
        Ok(prob) => prob,
        Err(e) => return check.verdict(false, e.to_string()),
    };
    let first = sample_frequency(prob, cfg.mc_draws, cfg.seed);
    let second = sample_frequency(prob, cfg.mc_draws, cfg.seed);
    check.measure("frequency", first).verdict(
        first.to_bits() == second.to_bits(),
        format!("seed = {}", cfg.seed),
    )
}
