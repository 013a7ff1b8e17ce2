//! Tax and deletion interventions, the indifference threshold, welfare
//! comparison and parameter sweeps.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibrium::{
    contraction_modulus, find_all_fixed_points, solve_banach, Equilibrium, SolverSettings,
};
use crate::error::{check_tax, domain, Error, Result};
use crate::game::{welfare, welfare_shortfall, BehavioralParams, CoordinationGame};

/// Default half-width of the indifference band around `p = 1/2`.
pub const DEFAULT_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeLabel {
    StatusQuoPersists,
    Indifferent,
    Transition,
}

impl RegimeLabel {
    /// Position of `p` relative to the indifference band `1/2 +- tie_tol`.
    pub fn from_probability(p: f64, tie_tol: f64) -> Self {
        if p > 0.5 + tie_tol {
            RegimeLabel::StatusQuoPersists
        } else if p < 0.5 - tie_tol {
            RegimeLabel::Transition
        } else {
            RegimeLabel::Indifferent
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeLabel::StatusQuoPersists => "status_quo_persists",
            RegimeLabel::Indifferent => "indifferent",
            RegimeLabel::Transition => "transition",
        }
    }
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tax at which X and Y are equally likely: `kappa - (alpha - gamma) / 2`.
///
/// Does not depend on `beta`. Negative values mean Y already wins the
/// coin-flip comparison without any tax.
pub fn threshold_tax(game: &CoordinationGame, params: &BehavioralParams) -> f64 {
    params.kappa() - (game.alpha() - game.gamma()) / 2.0
}

/// Solves for the unique equilibrium at tax `t` and labels it.
///
/// Refuses outside the contraction regime. A strict label that contradicts
/// the sign of `threshold - t` is reported as [`Error::RegimeInconsistent`].
pub fn classify_regime(
    game: &CoordinationGame,
    params: &BehavioralParams,
    t: f64,
    tie_tol: f64,
    settings: &SolverSettings,
) -> Result<RegimeLabel> {
    classify_with_equilibrium(game, params, t, tie_tol, settings).map(|(label, _)| label)
}

fn classify_with_equilibrium(
    game: &CoordinationGame,
    params: &BehavioralParams,
    t: f64,
    tie_tol: f64,
    settings: &SolverSettings,
) -> Result<(RegimeLabel, Equilibrium)> {
    if !(tie_tol.is_finite() && tie_tol > 0.0) {
        return Err(domain(format!("tie_tol {tie_tol} must be finite and > 0")));
    }
    let modulus = contraction_modulus(game, params);
    if modulus >= 1.0 {
        return Err(Error::NotContraction { modulus });
    }
    let eq = solve_banach(game, params, t, settings.tol, settings.max_iter)?;
    let label = RegimeLabel::from_probability(eq.p, tie_tol);
    let threshold = threshold_tax(game, params);
    let consistent = match label {
        RegimeLabel::StatusQuoPersists => t < threshold,
        RegimeLabel::Transition => t > threshold,
        RegimeLabel::Indifferent => true,
    };
    if !consistent {
        return Err(Error::RegimeInconsistent {
            label: label.as_str(),
            p: eq.p,
            t,
            threshold,
        });
    }
    Ok((label, eq))
}

/// Outcome of deleting X: everyone plays Y, so `p = 0` and welfare is `b`.
/// Takes no behavioural parameters because none can matter.
pub fn deletion_outcome(game: &CoordinationGame) -> (f64, f64) {
    (0.0, game.b())
}

/// Welfare advantage of deletion over the tax equilibrium at one fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapEntry {
    pub p: f64,
    pub stable: bool,
    /// `W(0) - W(p)`.
    pub gap: f64,
}

/// Solves at tax `t` with Banach iteration in the contraction regime and
/// enumeration otherwise.
pub fn tax_equilibria(
    game: &CoordinationGame,
    params: &BehavioralParams,
    t: f64,
    settings: &SolverSettings,
) -> Result<Vec<Equilibrium>> {
    check_tax(t)?;
    settings.validate()?;
    if contraction_modulus(game, params) < 1.0 {
        Ok(vec![solve_banach(
            game,
            params,
            t,
            settings.tol,
            settings.max_iter,
        )?])
    } else {
        find_all_fixed_points(game, params, t, settings.grid_n, settings.tol)
    }
}

/// `W(0) - W(p_t)` for each equilibrium at tax `t`; a single entry in the
/// contraction regime.
pub fn welfare_gap(
    game: &CoordinationGame,
    params: &BehavioralParams,
    t: f64,
    settings: &SolverSettings,
) -> Result<Vec<GapEntry>> {
    tax_equilibria(game, params, t, settings)?
        .into_iter()
        .map(|eq| {
            Ok(GapEntry {
                p: eq.p,
                stable: eq.stable,
                gap: welfare_shortfall(game, eq.p)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    T,
    Kappa,
    Beta,
}

impl SweepParameter {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParameter::T => "t",
            SweepParameter::Kappa => "kappa",
            SweepParameter::Beta => "beta",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t" => Ok(SweepParameter::T),
            "kappa" => Ok(SweepParameter::Kappa),
            "beta" => Ok(SweepParameter::Beta),
            other => Err(domain(format!("unknown sweep parameter {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub p: f64,
    pub welfare: f64,
    pub regime: RegimeLabel,
    pub stable: bool,
    pub residual: f64,
}

/// One equilibrium at one grid value, or the error that grid value hit.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub parameter: SweepParameter,
    pub value: f64,
    pub outcome: Result<SweepPoint>,
}

fn sweep_value(
    game: &CoordinationGame,
    params: &BehavioralParams,
    base_t: f64,
    which: SweepParameter,
    value: f64,
    settings: &SolverSettings,
) -> Result<Vec<SweepPoint>> {
    let (params, t) = match which {
        SweepParameter::T => (*params, value),
        SweepParameter::Kappa => (params.with_kappa(value)?, base_t),
        SweepParameter::Beta => (params.with_beta(value)?, base_t),
    };
    tax_equilibria(game, &params, t, settings)?
        .into_iter()
        .map(|eq| {
            Ok(SweepPoint {
                p: eq.p,
                welfare: welfare(game, eq.p)?,
                regime: RegimeLabel::from_probability(eq.p, DEFAULT_TIE_TOL),
                stable: eq.stable,
                residual: eq.residual,
            })
        })
        .collect()
}

/// Solves at every grid value of `which`, holding the others at `params` and
/// `base_t`. Grid values are solved in parallel; rows come back in grid
/// order, one per equilibrium. Failures land in the row, not the return.
pub fn sweep(
    game: &CoordinationGame,
    params: &BehavioralParams,
    base_t: f64,
    which: SweepParameter,
    grid: &[f64],
    settings: &SolverSettings,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(domain("sweep grid is empty"));
    }
    let rows: Vec<Vec<SweepRow>> = grid
        .par_iter()
        .map(|&value| {
            let row = |outcome| SweepRow {
                parameter: which,
                value,
                outcome,
            };
            match sweep_value(game, params, base_t, which, value, settings) {
                Ok(points) => points.into_iter().map(|pt| row(Ok(pt))).collect(),
                Err(e) => vec![row(Err(e))],
            }
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// `steps` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 {
        return Err(domain(format!("steps {steps} must be >= 2")));
    }
    if !(start.is_finite() && stop.is_finite()) || start > stop {
        return Err(domain(format!("invalid sweep bounds [{start}, {stop}]")));
    }
    let span = stop - start;
    let last = (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i == steps - 1 {
                stop
            } else {
                start + span * i as f64 / last
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaxOutcome {
    pub t: f64,
    pub equilibrium: Equilibrium,
    pub welfare: f64,
    pub regime: RegimeLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaxGap {
    pub t: f64,
    /// `W(0) - W(p_t)`; with several equilibria, the smallest one.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Dominance {
    Certified,
    /// `c + d > a + b`.
    HypothesisFails,
    NonPositiveGap {
        t: f64,
        gap: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub threshold_tax: f64,
    pub contraction_modulus: f64,
    pub tax_equilibria: Vec<TaxOutcome>,
    pub deletion_p: f64,
    pub deletion_welfare: f64,
    pub welfare_gaps: Vec<TaxGap>,
    pub dominance_certified: bool,
    pub dominance: Dominance,
}

impl ComparisonReport {
    pub fn min_gap(&self) -> Option<TaxGap> {
        self.welfare_gaps
            .iter()
            .copied()
            .min_by(|x, y| x.gap.total_cmp(&y.gap))
    }

    /// All tax equilibria put positive weight on X.
    pub fn all_interior(&self) -> bool {
        self.tax_equilibria.iter().all(|o| o.equilibrium.p > 0.0)
    }
}

/// Deletion against each tax in `taxes`.
///
/// Outside the contraction regime every fixed point is listed and the gap for
/// that tax is taken at the fixed point with the highest welfare.
pub fn compare_policies(
    game: &CoordinationGame,
    params: &BehavioralParams,
    taxes: &[f64],
    settings: &SolverSettings,
) -> Result<ComparisonReport> {
    settings.validate()?;
    let contracting = contraction_modulus(game, params) < 1.0;
    let mut outcomes = Vec::new();
    let mut gaps = Vec::with_capacity(taxes.len());

    for &t in taxes {
        check_tax(t)?;
        let eqs = if contracting {
            let (_, eq) = classify_with_equilibrium(game, params, t, DEFAULT_TIE_TOL, settings)?;
            vec![eq]
        } else {
            find_all_fixed_points(game, params, t, settings.grid_n, settings.tol)?
        };
        let mut worst = f64::INFINITY;
        for eq in eqs {
            worst = worst.min(welfare_shortfall(game, eq.p)?);
            outcomes.push(TaxOutcome {
                t,
                welfare: welfare(game, eq.p)?,
                regime: RegimeLabel::from_probability(eq.p, DEFAULT_TIE_TOL),
                equilibrium: eq,
            });
        }
        gaps.push(TaxGap { t, gap: worst });
    }

    let dominance = if !game.welfare_monotone() {
        Dominance::HypothesisFails
    } else if let Some(bad) = gaps.iter().find(|g| g.gap.is_nan() || g.gap <= 0.0) {
        Dominance::NonPositiveGap {
            t: bad.t,
            gap: bad.gap,
        }
    } else {
        Dominance::Certified
    };

    let (deletion_p, deletion_welfare) = deletion_outcome(game);
    Ok(ComparisonReport {
        threshold_tax: threshold_tax(game, params),
        contraction_modulus: contraction_modulus(game, params),
        tax_equilibria: outcomes,
        deletion_p,
        deletion_welfare,
        welfare_gaps: gaps,
        dominance_certified: dominance == Dominance::Certified,
        dominance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::fixed_point_map;

    fn example() -> CoordinationGame {
        CoordinationGame::new(6.0, 7.0, 1.0, 2.0).unwrap()
    }

    fn params(beta: f64, kappa: f64) -> BehavioralParams {
        BehavioralParams::new(beta, kappa).unwrap()
    }

    #[test]
    fn threshold_examples() {
        let g = example();
        assert_eq!(threshold_tax(&g, &params(1.0, 1.5)), 0.5);
        assert_eq!(threshold_tax(&g, &params(1.0, 1.0)), 0.0);
        let sym = CoordinationGame::new(4.0, 5.0, 2.0, 1.0).unwrap();
        assert_eq!(sym.alpha(), sym.gamma());
        assert_eq!(threshold_tax(&sym, &params(1.0, 0.0)), 0.0);
        // negative threshold is reported, not rejected
        assert_eq!(threshold_tax(&g, &params(1.0, 0.25)), -0.75);
    }

    #[test]
    fn map_is_half_at_threshold_for_any_beta() {
        let g = example();
        for beta in [0.01, 0.3, 1.0, 10.0] {
            let k = params(beta, 1.5);
            let t = threshold_tax(&g, &k);
            assert_eq!(fixed_point_map(&g, &k, t, 0.5).unwrap(), 0.5);
        }
    }

    #[test]
    fn classify_examples() {
        let g = example();
        let k = params(0.3, 1.5);
        let s = SolverSettings::default();
        let label = |t| classify_regime(&g, &k, t, DEFAULT_TIE_TOL, &s).unwrap();
        assert_eq!(label(0.5), RegimeLabel::Indifferent);
        assert_eq!(label(0.2), RegimeLabel::StatusQuoPersists);
        assert_eq!(label(0.9), RegimeLabel::Transition);
        assert!(matches!(
            classify_regime(&g, &params(1.0, 1.5), 0.0, DEFAULT_TIE_TOL, &s),
            Err(Error::NotContraction { .. })
        ));
        assert!(classify_regime(&g, &k, 0.0, 0.0, &s).is_err());
    }

    #[test]
    fn deletion_examples() {
        assert_eq!(deletion_outcome(&example()), (0.0, 7.0));
        let g = CoordinationGame::new(3.0, 4.0, 1.0, 2.0).unwrap();
        assert_eq!(deletion_outcome(&g), (0.0, 4.0));
    }

    #[test]
    fn gap_at_threshold() {
        let gaps = welfare_gap(
            &example(),
            &params(0.3, 1.5),
            0.5,
            &SolverSettings::default(),
        )
        .unwrap();
        assert_eq!(gaps.len(), 1);
        assert_eq!(gaps[0].p, 0.5);
        assert_eq!(gaps[0].gap, 3.0);
    }

    #[test]
    fn gap_beta_zero_and_large_tax() {
        let g = example();
        let s = SolverSettings::default();
        let gaps = welfare_gap(&g, &params(0.0, 1.5), 17.0, &s).unwrap();
        assert_eq!(gaps[0].gap, 3.0);
        let gaps = welfare_gap(&g, &params(0.3, 1.5), 50.0, &s).unwrap();
        assert!(gaps[0].gap > 0.0 && gaps[0].gap < 1e-3);
    }

    #[test]
    fn gap_lists_every_equilibrium_outside_contraction() {
        let gaps = welfare_gap(
            &example(),
            &params(1.0, 1.5),
            0.0,
            &SolverSettings::default(),
        )
        .unwrap();
        assert_eq!(gaps.len(), 3);
        assert!(gaps.iter().all(|g| g.gap > 0.0));
        assert!(!gaps[1].stable);
    }

    #[test]
    fn sweep_examples() {
        let g = example();
        let s = SolverSettings::default();
        let rows = sweep(
            &g,
            &params(0.3, 1.5),
            0.0,
            SweepParameter::T,
            &[0.0, 0.25, 0.5, 0.75, 1.0],
            &s,
        )
        .unwrap();
        let ps: Vec<f64> = rows.iter().map(|r| r.outcome.as_ref().unwrap().p).collect();
        assert!(ps.windows(2).all(|w| w[1] < w[0]));

        let rows = sweep(
            &g,
            &params(0.3, 1.5),
            0.0,
            SweepParameter::Kappa,
            &[0.0, 1.0, 2.0, 3.0],
            &s,
        )
        .unwrap();
        let ps: Vec<f64> = rows.iter().map(|r| r.outcome.as_ref().unwrap().p).collect();
        assert!(ps.windows(2).all(|w| w[1] > w[0]));

        let rows = sweep(
            &g,
            &params(0.3, 1.5),
            0.0,
            SweepParameter::Beta,
            &[0.0, 0.2],
            &s,
        )
        .unwrap();
        assert_eq!(rows[0].outcome.as_ref().unwrap().p, 0.5);
    }

    #[test]
    fn sweep_records_row_errors() {
        let rows = sweep(
            &example(),
            &params(0.3, 1.5),
            0.0,
            SweepParameter::Kappa,
            &[-1.0, 1.0],
            &SolverSettings::default(),
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].outcome.is_err());
        assert!(rows[1].outcome.is_ok());
    }

    #[test]
    fn sweep_multi_equilibrium_rows() {
        let rows = sweep(
            &example(),
            &params(0.3, 1.5),
            0.0,
            SweepParameter::Beta,
            &[1.0],
            &SolverSettings::default(),
        )
        .unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.value == 1.0));
    }

    #[test]
    fn linspace_hits_endpoints() {
        let v = linspace(0.0, 4.0, 81).unwrap();
        assert_eq!(v.len(), 81);
        assert_eq!(v[10], 0.5);
        assert_eq!(v[80], 4.0);
        assert!(linspace(0.0, 1.0, 1).is_err());
        assert!(linspace(1.0, 0.0, 5).is_err());
    }

    #[test]
    fn compare_certified() {
        let r = compare_policies(
            &example(),
            &params(0.3, 1.5),
            &[0.0, 0.5, 1.0],
            &SolverSettings::default(),
        )
        .unwrap();
        assert!(r.dominance_certified);
        assert_eq!(r.welfare_gaps.len(), 3);
        assert!(r.welfare_gaps.iter().all(|g| g.gap > 0.0));
        assert_eq!((r.deletion_p, r.deletion_welfare), (0.0, 7.0));
        assert_eq!(r.threshold_tax, 0.5);
    }

    #[test]
    fn compare_empty_taxes() {
        let r = compare_policies(
            &example(),
            &params(0.3, 1.5),
            &[],
            &SolverSettings::default(),
        )
        .unwrap();
        assert!(r.tax_equilibria.is_empty());
        assert_eq!(r.deletion_welfare, 7.0);
        assert_eq!(r.min_gap(), None);
    }

    #[test]
    fn compare_uses_worst_case_outside_contraction() {
        let r = compare_policies(
            &example(),
            &params(1.0, 1.5),
            &[0.0],
            &SolverSettings::default(),
        )
        .unwrap();
        assert_eq!(r.tax_equilibria.len(), 3);
        let best_welfare = r
            .tax_equilibria
            .iter()
            .map(|o| o.welfare)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((r.welfare_gaps[0].gap - (7.0 - best_welfare)).abs() < 1e-12);
        assert!(r.dominance_certified);
    }

    #[test]
    fn compare_rejects_negative_tax() {
        assert!(compare_policies(
            &example(),
            &params(0.3, 1.5),
            &[-0.5],
            &SolverSettings::default()
        )
        .is_err());
    }
}
