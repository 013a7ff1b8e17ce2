//! Audit of the published worked example.
//!
//! The example quotes an equilibrium and welfare levels for the game
//! `(a, b, c, d) = (6, 7, 1, 2)` with `kappa = 1.5` and `beta = 1`. Each
//! quoted number is re-derived from the model's own equations and reported
//! as consistent or not. Findings are informational; they never fail a run.

use serde::{Deserialize, Serialize};

use super::oracle::oracle_fixed_points;
use crate::equilibrium::{contraction_modulus, fixed_point_map};
use crate::game::{welfare, BehavioralParams, CoordinationGame};
use crate::policy::{deletion_outcome, threshold_tax};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditFinding {
    pub name: String,
    /// Value quoted in the example, if it quotes one.
    pub quoted: Option<f64>,
    pub measured: f64,
    pub consistent: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub findings: Vec<AuditFinding>,
    /// Oracle fixed points at `t = 0`.
    pub fixed_points: Vec<f64>,
}

impl AuditReport {
    pub fn finding(&self, name: &str) -> Option<&AuditFinding> {
        self.findings.iter().find(|f| f.name == name)
    }
}

const QUOTED_P_UNTAXED: f64 = 0.78;
const QUOTED_P_HIGH_TAX: f64 = 0.22;
const QUOTED_WELFARE: [(f64, f64); 3] = [(0.78, 6.34), (0.5, 6.25), (0.22, 6.20)];
const QUOTED_THRESHOLD: f64 = 0.5;
const QUOTED_DELETION_WELFARE: f64 = 7.0;
/// Residual below which a quoted two-decimal probability counts as a fixed
/// point.
const ROUNDING_SLACK: f64 = 0.01;

fn finding(
    name: &str,
    quoted: Option<f64>,
    measured: f64,
    consistent: bool,
    note: String,
) -> AuditFinding {
    AuditFinding {
        name: name.to_owned(),
        quoted,
        measured,
        consistent,
        note,
    }
}

pub fn audit_worked_example() -> AuditReport {
    let game = CoordinationGame::new(6.0, 7.0, 1.0, 2.0).expect("valid game");
    let params = BehavioralParams::new(1.0, 1.5).expect("valid params");
    let f = |t: f64, p: f64| fixed_point_map(&game, &params, t, p).expect("valid inputs");
    let w = |p: f64| welfare(&game, p).expect("p in [0,1]");
    let mut findings = Vec::new();

    let modulus = contraction_modulus(&game, &params);
    findings.push(finding(
        "contraction_modulus",
        None,
        modulus,
        modulus < 1.0,
        "uniqueness needs beta (alpha + gamma) / 4 < 1".into(),
    ));

    let roots = oracle_fixed_points(&game, &params, 0.0, 10_000);
    findings.push(finding(
        "fixed_point_count_t0",
        Some(1.0),
        roots.len() as f64,
        roots.len() == 1,
        format!("oracle fixed points {roots:.6?}"),
    ));

    let residual = (f(0.0, QUOTED_P_UNTAXED) - QUOTED_P_UNTAXED).abs();
    findings.push(finding(
        "residual_at_quoted_p_t0",
        Some(QUOTED_P_UNTAXED),
        residual,
        residual < ROUNDING_SLACK,
        format!("f({QUOTED_P_UNTAXED}) = {:.6}", f(0.0, QUOTED_P_UNTAXED)),
    ));

    let nearest = roots
        .iter()
        .map(|r| (r - QUOTED_P_UNTAXED).abs())
        .fold(f64::INFINITY, f64::min);
    findings.push(finding(
        "distance_quoted_p_to_nearest_root_t0",
        Some(QUOTED_P_UNTAXED),
        nearest,
        nearest < ROUNDING_SLACK,
        "distance from the quoted equilibrium to the closest oracle root".into(),
    ));

    let residual = (f(0.5, 0.5) - 0.5).abs();
    findings.push(finding(
        "residual_at_threshold",
        Some(0.5),
        residual,
        residual == 0.0,
        "p = 1/2 at t = 0.5".into(),
    ));

    let residual = (f(1.0, QUOTED_P_HIGH_TAX) - QUOTED_P_HIGH_TAX).abs();
    findings.push(finding(
        "residual_at_quoted_p_t1",
        Some(QUOTED_P_HIGH_TAX),
        residual,
        residual < ROUNDING_SLACK,
        format!(
            "f({QUOTED_P_HIGH_TAX}) = {:.6} at t = 1",
            f(1.0, QUOTED_P_HIGH_TAX)
        ),
    ));

    for (p, quoted) in QUOTED_WELFARE {
        let measured = w(p);
        findings.push(finding(
            &format!("welfare_at_{p}"),
            Some(quoted),
            measured,
            (measured - quoted).abs() < 0.005,
            format!("W({p}) from the welfare formula"),
        ));
    }

    let t_bar = threshold_tax(&game, &params);
    findings.push(finding(
        "threshold_tax",
        Some(QUOTED_THRESHOLD),
        t_bar,
        t_bar == QUOTED_THRESHOLD,
        "kappa - (alpha - gamma) / 2".into(),
    ));

    let (_, deletion_welfare) = deletion_outcome(&game);
    findings.push(finding(
        "deletion_welfare",
        Some(QUOTED_DELETION_WELFARE),
        deletion_welfare,
        deletion_welfare == QUOTED_DELETION_WELFARE,
        "W(0) = b".into(),
    ));

    // W'(1) = 2a - c - d
    let slope_at_one = 2.0 * game.a() - game.c() - game.d();
    let excess = game.a() + game.b() - game.c() - game.d();
    let minimiser = 0.5 + (game.b() - game.a()) / (2.0 * excess);
    findings.push(finding(
        "welfare_slope_at_one",
        None,
        slope_at_one,
        slope_at_one <= 0.0,
        format!(
            "W is not monotone on (0, 1]: it is minimised at p = {minimiser:.6} (W = {:.6})",
            w(minimiser)
        ),
    ));

    AuditReport {
        findings,
        fixed_points: roots,
    }
}
