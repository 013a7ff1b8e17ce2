//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line;
//! run with `--nocapture` to see them all.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::Command;

use qresb_core::equilibrium::{
    find_all_fixed_points, fixed_point_map, solve_banach, SolverSettings,
};
use qresb_core::game::{welfare, BehavioralParams, CoordinationGame};
use qresb_core::policy::{
    classify_regime, deletion_outcome, threshold_tax, welfare_gap, RegimeLabel, DEFAULT_TIE_TOL,
};
use qresb_core::verification::{
    audit_worked_example, check_limits, monte_carlo_consistency, oracle_fixed_points,
    random_contraction_instance, random_game, seeded_rng, welfare_expanded, DEFAULT_SEED,
};

const TOL: f64 = 1e-12;
const MAX_ITER: usize = 100_000;

fn example() -> CoordinationGame {
    CoordinationGame::new(6.0, 7.0, 1.0, 2.0).unwrap()
}

fn params(beta: f64, kappa: f64) -> BehavioralParams {
    BehavioralParams::new(beta, kappa).unwrap()
}

fn report(n: u32, title: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("criterion {n}: PASS  {title}");
    } else {
        println!("criterion {n}: FAIL  {title}");
        for f in failures {
            println!("    {f}");
        }
    }
    assert!(failures.is_empty(), "criterion {n} failed: {failures:#?}");
}

#[test]
fn criterion_1_threshold_formula() {
    let mut failures = Vec::new();
    let g = example();
    let t_bar = threshold_tax(&g, &params(1.0, 1.5));
    if t_bar != 0.5 {
        failures.push(format!("threshold {t_bar} != 0.5"));
    }
    for beta in [0.01, 0.3, 1.0, 10.0] {
        let f = fixed_point_map(&g, &params(beta, 1.5), 0.5, 0.5).unwrap();
        if (f - 0.5).abs() >= 1e-14 {
            failures.push(format!("beta {beta}: f(1/2) = {f}"));
        }
    }
    report(
        1,
        "threshold 0.5 exactly; f(1/2) = 1/2 at t = 0.5 for four betas",
        &failures,
    );
}

#[test]
fn criterion_2_banach_matches_oracle() {
    let mut failures = Vec::new();
    let mut rng = seeded_rng(DEFAULT_SEED);
    let mut worst = 0.0_f64;
    for i in 0..50 {
        let (g, k, t) = random_contraction_instance(&mut rng);
        let eq = solve_banach(&g, &k, t, TOL, MAX_ITER).unwrap();
        let roots = oracle_fixed_points(&g, &k, t, 10_000);
        if roots.len() != 1 {
            failures.push(format!("draw {i}: oracle found {} roots", roots.len()));
            continue;
        }
        let diff = (roots[0] - eq.p).abs();
        worst = worst.max(diff);
        if diff >= 1e-10 {
            failures.push(format!("draw {i}: |banach - oracle| = {diff:e}"));
        }
    }
    report(
        2,
        &format!("50 contraction draws, max |banach - oracle| = {worst:.3e} < 1e-10"),
        &failures,
    );
}

#[test]
fn criterion_3_comparative_statics() {
    let mut failures = Vec::new();
    let g = example();
    let s = SolverSettings::default();

    let p_kappa: Vec<f64> = [0.0, 0.75, 1.5, 2.25, 3.0]
        .iter()
        .map(|&k| {
            solve_banach(&g, &params(0.3, k), 0.0, TOL, MAX_ITER)
                .unwrap()
                .p
        })
        .collect();
    if !p_kappa.windows(2).all(|w| w[1] > w[0]) {
        failures.push(format!("p*(kappa) not strictly increasing: {p_kappa:?}"));
    }

    let k = params(0.3, 1.5);
    let taxes = [0.0, 0.25, 0.5, 0.75, 1.0];
    let p_tax: Vec<f64> = taxes
        .iter()
        .map(|&t| solve_banach(&g, &k, t, TOL, MAX_ITER).unwrap().p)
        .collect();
    if !p_tax.windows(2).all(|w| w[1] < w[0]) {
        failures.push(format!("p*(t) not strictly decreasing: {p_tax:?}"));
    }

    let t_bar = threshold_tax(&g, &k);
    for t in taxes {
        let label = classify_regime(&g, &k, t, DEFAULT_TIE_TOL, &s).unwrap();
        let expected = match (t_bar - t).partial_cmp(&0.0).unwrap() {
            std::cmp::Ordering::Greater => RegimeLabel::StatusQuoPersists,
            std::cmp::Ordering::Less => RegimeLabel::Transition,
            std::cmp::Ordering::Equal => RegimeLabel::Indifferent,
        };
        if label != expected {
            failures.push(format!("t = {t}: label {label}, expected {expected}"));
        }
    }
    report(
        3,
        "p* increasing in kappa, decreasing in t, regimes match threshold",
        &failures,
    );
}

#[test]
fn criterion_4_deletion_and_welfare_dominance() {
    let mut failures = Vec::new();
    let g = example();
    if deletion_outcome(&g) != (0.0, 7.0) {
        failures.push(format!("deletion outcome {:?}", deletion_outcome(&g)));
    }
    let k = params(0.3, 1.5);
    let s = SolverSettings::default();
    let taxes = [0.0, 0.5, 1.0, 2.0, 5.0];
    let mut gaps = Vec::new();
    for t in taxes {
        let entries = welfare_gap(&g, &k, t, &s).unwrap();
        assert_eq!(entries.len(), 1);
        let gap = entries[0].gap;
        if !(gap > 0.0) {
            failures.push(format!("t = {t}: gap {gap} not positive"));
        }
        gaps.push(gap);
    }
    for (w, pair) in gaps.windows(2).zip(taxes.windows(2)) {
        if !(w[1] < w[0]) {
            failures.push(format!(
                "gap not decreasing from t = {} ({:.6}) to t = {} ({:.6})",
                pair[0], w[0], pair[1], w[1]
            ));
        }
    }
    report(
        4,
        "deletion (0, 7); gaps positive and decreasing in t",
        &failures,
    );
}

#[test]
fn criterion_5_welfare_monotonicity() {
    let mut failures = Vec::new();
    let mut rng = seeded_rng(DEFAULT_SEED);
    let mut not_decreasing = 0;
    let mut slope_violations = 0;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_algebra = 0.0_f64;
    let n = 1000;
    for _ in 0..50 {
        let g = random_game(&mut rng);
        assert!(g.welfare_monotone());
        let ws: Vec<f64> = (0..=n)
            .map(|i| welfare(&g, i as f64 / n as f64).unwrap())
            .collect();
        for (i, w) in ws.iter().enumerate() {
            worst_algebra =
                worst_algebra.max((w - welfare_expanded(&g, i as f64 / n as f64)).abs());
        }
        if !ws.windows(2).all(|w| w[1] < w[0]) {
            not_decreasing += 1;
        }
        let bound = -(g.b() - g.a()) + 1e-9;
        let mut bad = false;
        for w in ws.windows(2) {
            let slope = (w[1] - w[0]) * n as f64;
            worst_excess = worst_excess.max(slope - bound);
            bad |= slope > bound;
        }
        if bad {
            slope_violations += 1;
        }
    }
    if not_decreasing > 0 {
        failures.push(format!(
            "{not_decreasing}/50 games: W not strictly decreasing on the grid"
        ));
    }
    if slope_violations > 0 {
        failures.push(format!(
            "{slope_violations}/50 games: slope exceeds -(b - a) + 1e-9 (worst excess {worst_excess:.4})"
        ));
    }
    if worst_algebra >= 1e-12 {
        failures.push(format!("welfare forms differ by {worst_algebra:e}"));
    }
    report(
        5,
        "W strictly decreasing with slope <= -(b - a); welfare forms agree",
        &failures,
    );
}

#[test]
fn criterion_6_limits() {
    let mut failures = Vec::new();
    let g = example();
    let low = solve_banach(&g, &params(1e-9, 1.5), 0.0, TOL, MAX_ITER).unwrap();
    if (low.p - 0.5).abs() >= 1e-6 {
        failures.push(format!("beta = 1e-9: p* = {}", low.p));
    }
    let roots = find_all_fixed_points(&g, &params(50.0, 1.5), 0.0, 10_000, TOL).unwrap();
    let stable: Vec<f64> = roots.iter().filter(|e| e.stable).map(|e| e.p).collect();
    let near = |x: f64| stable.iter().any(|p| (p - x).abs() < 1e-3);
    if !(near(0.0) && near(1.0)) {
        failures.push(format!(
            "beta = 50 stable points {stable:?} do not reach both 0 and 1"
        ));
    }
    if stable.iter().any(|&p| p.min(1.0 - p) >= 1e-3) {
        failures.push(format!(
            "beta = 50 stable point away from pure play: {stable:?}"
        ));
    }
    let check = check_limits(&g, &params(1.0, 1.5), 0.0, &SolverSettings::default());
    if !check.passed() {
        failures.push(format!("check_limits: {}", check.detail));
    }
    report(
        6,
        "beta -> 0 gives 1/2; beta = 50 stable points near 0 and 1",
        &failures,
    );
}

#[test]
fn criterion_7_worked_example_audit() {
    let mut failures = Vec::new();
    let audit = audit_worked_example();
    let measured = |name: &str| audit.finding(name).unwrap().measured;
    if measured("contraction_modulus") != 2.5 {
        failures.push(format!("modulus {}", measured("contraction_modulus")));
    }
    if !(measured("residual_at_quoted_p_t0") > 0.1) {
        failures.push(format!(
            "residual at 0.78 = {}",
            measured("residual_at_quoted_p_t0")
        ));
    }
    if audit.fixed_points.len() != 3 {
        failures.push(format!("oracle fixed points {:?}", audit.fixed_points));
    }
    if measured("threshold_tax") != 0.5 || !audit.finding("threshold_tax").unwrap().consistent {
        failures.push("threshold not confirmed".into());
    }
    if measured("deletion_welfare") != 7.0 || !audit.finding("deletion_welfare").unwrap().consistent
    {
        failures.push("W(0) = 7 not confirmed".into());
    }
    report(
        7,
        &format!(
            "audit: modulus 2.5, residual {:.4} at 0.78, roots {:.6?}, threshold 0.5, W(0) = 7",
            measured("residual_at_quoted_p_t0"),
            audit.fixed_points
        ),
        &failures,
    );
}

#[test]
fn criterion_8_monte_carlo() {
    let mut failures = Vec::new();
    let g = example();
    let k = params(0.3, 1.5);
    let eq = solve_banach(&g, &k, 0.0, TOL, MAX_ITER).unwrap();
    let n = 1_000_000;
    let first = monte_carlo_consistency(&g, &k, 0.0, eq.p, n, 42).unwrap();
    let second = monte_carlo_consistency(&g, &k, 0.0, eq.p, n, 42).unwrap();
    let band = 4.0 * (eq.p * (1.0 - eq.p) / n as f64).sqrt();
    let freq = first.value("frequency").unwrap();
    if (freq - eq.p).abs() > band {
        failures.push(format!("frequency {freq} outside {} +- {band}", eq.p));
    }
    if freq.to_bits() != second.value("frequency").unwrap().to_bits() {
        failures.push("same seed gave different frequencies".into());
    }
    report(
        8,
        &format!(
            "n = 1e6: |{freq} - {:.6}| <= {band:.2e}; reproducible",
            eq.p
        ),
        &failures,
    );
}

#[test]
fn criterion_9_figure1_determinism() {
    let mut failures = Vec::new();
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_qresb"))
            .args([
                "sweep",
                "--figure1",
                "--a",
                "6",
                "--b",
                "7",
                "--c",
                "1",
                "--d",
                "2",
            ])
            .args(["--kappa", "1.5", "--beta", "0.3"])
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let first = run();
    if first != run() {
        failures.push("two runs differ".into());
    }
    let text = String::from_utf8(first).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            (cols[1].parse().unwrap(), cols[2].parse().unwrap())
        })
        .collect();
    let t_bar = 0.5;
    let below = rows.iter().rev().find(|(t, _)| *t < t_bar).unwrap();
    let above = rows.iter().find(|(t, _)| *t > t_bar).unwrap();
    if !(below.1 > 0.5 && above.1 < 0.5) {
        failures.push(format!("no crossing between {below:?} and {above:?}"));
    }
    for (t, p) in &rows {
        let ok = if *t < t_bar {
            *p > 0.5
        } else if *t > t_bar {
            *p < 0.5
        } else {
            *p == 0.5
        };
        if !ok {
            failures.push(format!("t = {t}: p = {p} on the wrong side of 1/2"));
        }
    }
    report(
        9,
        "figure-1 sweep byte-identical; p crosses 1/2 at the threshold",
        &failures,
    );
}
