//! `qresb`: solve, sweep and compare policies for the status-quo logit
//! equilibrium.
//!
//! Exit codes: 0 ok, 2 invalid input, 3 solver failure, 4 internal
//! dominance violation, 5 verification failure.

mod config;
mod render;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qresb_core::equilibrium::{contraction_modulus, fixed_point_map, Equilibrium};
use qresb_core::game::{welfare, Policy};
use qresb_core::policy::{
    compare_policies, deletion_outcome, linspace, sweep, tax_equilibria, threshold_tax, Dominance,
    SweepParameter,
};
use qresb_core::verification::{run_verification, VerifyConfig};
use serde::Serialize;

use crate::config::{Model, RunConfig, SweepSection};
use crate::render::text;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("internal error: {0}")]
    Dominance(String),
    #[error("verification failed")]
    Verification,
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Dominance(_) => 4,
            CliError::Verification => 5,
            CliError::Io(_) => 1,
        }
    }
}

impl From<qresb_core::Error> for CliError {
    fn from(e: qresb_core::Error) -> Self {
        use qresb_core::Error as E;
        match e {
            E::NoConvergence { .. } | E::RegimeInconsistent { .. } => {
                CliError::Solver(e.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qresb",
    version,
    about = "Logit equilibrium with status-quo bias: taxes vs. deletion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Equilibria at the configured policy.
    Solve(CommonArgs),
    /// Tax at which both actions are equally likely.
    Threshold(CommonArgs),
    /// CSV of equilibria along a parameter grid.
    Sweep(SweepArgs),
    /// Deletion against a list of taxes.
    Compare(CompareArgs),
    /// Run the verification suite.
    Verify(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    d: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Tax rate on the status-quo action.
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Delete the status-quo action instead of taxing it.
    #[arg(long, conflicts_with = "t")]
    deletion: bool,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    grid_n: Option<usize>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Tax sweep over [0, 4] with 81 steps.
    #[arg(long)]
    figure1: bool,
    /// Swept parameter: t, kappa or beta.
    #[arg(long)]
    param: Option<SweepParameter>,
    #[arg(long, allow_negative_numbers = true)]
    start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    stop: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated tax levels.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    taxes: Option<Vec<f64>>,
}

impl CommonArgs {
    fn run_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut cfg.payoffs.a, self.a);
        set(&mut cfg.payoffs.b, self.b);
        set(&mut cfg.payoffs.c, self.c);
        set(&mut cfg.payoffs.d, self.d);
        set(&mut cfg.kappa, self.kappa);
        set(&mut cfg.beta, self.beta);
        set(&mut cfg.solver.tol, self.tol);
        if let Some(t) = self.t {
            cfg.policy = Policy::Tax { t };
        }
        if self.deletion {
            cfg.policy = Policy::Deletion;
        }
        if let Some(n) = self.max_iter {
            cfg.solver.max_iter = n;
        }
        if let Some(n) = self.grid_n {
            cfg.solver.grid_n = n;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }

    fn output(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct SolvedPoint {
    equilibrium: Equilibrium,
    welfare: f64,
}

#[derive(Debug, Serialize)]
struct SolveReport {
    policy: Policy,
    contraction_modulus: f64,
    contraction: bool,
    equilibria: Vec<SolvedPoint>,
    warning: Option<String>,
}

fn cmd_solve(args: &CommonArgs) -> Result<(), CliError> {
    let model = args.run_config()?.model()?;
    let modulus = contraction_modulus(&model.game, &model.params);
    let mut out = args.output()?;

    let (equilibria, warning) = match model.policy {
        Policy::Deletion => {
            let (p, w) = deletion_outcome(&model.game);
            let eq = Equilibrium {
                p,
                residual: 0.0,
                iterations: 0,
                stable: true,
                slope: 0.0,
                contraction_modulus: modulus,
            };
            (
                vec![SolvedPoint {
                    equilibrium: eq,
                    welfare: w,
                }],
                None,
            )
        }
        Policy::Tax { t } => {
            let eqs = tax_equilibria(&model.game, &model.params, t, &model.settings)?;
            let points = eqs
                .into_iter()
                .map(|eq| {
                    Ok(SolvedPoint {
                        welfare: welfare(&model.game, eq.p)?,
                        equilibrium: eq,
                    })
                })
                .collect::<Result<Vec<_>, qresb_core::Error>>()?;
            let warning = (modulus >= 1.0).then(|| {
                format!(
                    "contraction modulus {} >= 1: uniqueness not guaranteed, listing every fixed point",
                    text(modulus)
                )
            });
            (points, warning)
        }
    };

    if args.json {
        return emit_json(
            &mut out,
            &SolveReport {
                policy: model.policy,
                contraction_modulus: modulus,
                contraction: modulus < 1.0,
                equilibria,
                warning,
            },
        );
    }
    match model.policy {
        Policy::Deletion => writeln!(out, "policy: deletion")?,
        Policy::Tax { t } => writeln!(out, "policy: tax t = {}", text(t))?,
    }
    writeln!(out, "contraction modulus: {}", text(modulus))?;
    if let Some(w) = &warning {
        writeln!(out, "warning: {w}")?;
    }
    writeln!(out, "equilibria: {}", equilibria.len())?;
    for pt in &equilibria {
        let eq = &pt.equilibrium;
        let marginal = if eq.marginal() { " (marginal)" } else { "" };
        writeln!(
            out,
            "p = {}  welfare = {}  stable = {}{}  slope = {}  residual = {}",
            text(eq.p),
            text(pt.welfare),
            eq.stable,
            marginal,
            text(eq.slope),
            text(eq.residual)
        )?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct ThresholdReport {
    threshold_tax: f64,
    /// `f(1/2)` at the threshold; absent when the threshold is negative.
    map_at_half: Option<f64>,
}

fn cmd_threshold(args: &CommonArgs) -> Result<(), CliError> {
    let model = args.run_config()?.model()?;
    let t_bar = threshold_tax(&model.game, &model.params);
    let map_at_half = if t_bar >= 0.0 {
        Some(fixed_point_map(&model.game, &model.params, t_bar, 0.5)?)
    } else {
        None
    };
    let mut out = args.output()?;
    if args.json {
        return emit_json(
            &mut out,
            &ThresholdReport {
                threshold_tax: t_bar,
                map_at_half,
            },
        );
    }
    writeln!(out, "threshold tax: {}", text(t_bar))?;
    match map_at_half {
        Some(v) => writeln!(
            out,
            "f(1/2) at threshold: {} (|f(1/2) - 1/2| = {})",
            text(v),
            text((v - 0.5).abs())
        )?,
        None => writeln!(
            out,
            "threshold is negative: Y is already favoured at p = 1/2 without a tax"
        )?,
    }
    out.flush()?;
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let cfg = args.common.run_config()?;
    let model = cfg.model()?;
    let section = if args.figure1 {
        SweepSection {
            parameter: SweepParameter::T,
            start: 0.0,
            stop: 4.0,
            steps: 81,
        }
    } else {
        let mut s = match cfg.sweep {
            Some(s) => s,
            None => match (args.param, args.start, args.stop, args.steps) {
                (Some(parameter), Some(start), Some(stop), Some(steps)) => SweepSection {
                    parameter,
                    start,
                    stop,
                    steps,
                },
                _ => {
                    return Err(CliError::Invalid(
                        "sweep needs a config sweep section, --figure1, or --param/--start/--stop/--steps".into(),
                    ))
                }
            },
        };
        if let Some(p) = args.param {
            s.parameter = p;
        }
        if let Some(v) = args.start {
            s.start = v;
        }
        if let Some(v) = args.stop {
            s.stop = v;
        }
        if let Some(v) = args.steps {
            s.steps = v;
        }
        s
    };
    let grid = linspace(section.start, section.stop, section.steps)?;
    let rows = sweep(
        &model.game,
        &model.params,
        model.t(),
        section.parameter,
        &grid,
        &model.settings,
    )?;
    for row in &rows {
        if let Err(e) = &row.outcome {
            eprintln!("{} = {}: {e}", row.parameter, row.value);
        }
    }
    let mut out = args.common.output()?;
    render::write_sweep_csv(&mut out, &rows).map_err(|e| CliError::Io(io::Error::other(e)))?;
    out.flush()?;
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let cfg = args.common.run_config()?;
    let model: Model = cfg.model()?;
    let taxes = args.taxes.clone().unwrap_or_else(|| cfg.taxes.clone());
    let report = compare_policies(&model.game, &model.params, &taxes, &model.settings)?;
    let mut out = args.common.output()?;
    if args.common.json {
        emit_json(&mut out, &report)?;
    } else {
        write!(out, "{}", render::comparison_text(&report))?;
    }
    out.flush()?;
    if let Dominance::NonPositiveGap { t, gap } = report.dominance {
        if model.game.welfare_monotone() && report.all_interior() {
            return Err(CliError::Dominance(format!(
                "non-positive welfare gap {gap:e} at t = {t} although every p_t > 0"
            )));
        }
    }
    Ok(())
}

fn cmd_verify(args: &CommonArgs) -> Result<(), CliError> {
    let run = args.run_config()?;
    let model = run.model()?;
    let cfg = VerifyConfig {
        game: model.game,
        params: model.params,
        t: model.t(),
        seed: run.seed,
        settings: model.settings,
        ..VerifyConfig::default()
    };
    let report = run_verification(&cfg);
    let mut out = args.output()?;
    if args.json {
        emit_json(&mut out, &report)?;
    } else {
        write!(out, "{}", render::verification_text(&report))?;
    }
    out.flush()?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Verification)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
