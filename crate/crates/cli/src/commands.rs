//! Dispatch of a resolved [`RunConfig`] to the compute crates.

use qbat_core::{
    boundary_residuals, dispersion, momentum_grid, spectral_gap, stored_energy_curve, sweep_point,
    CriticalPoint, ModelParams, QuenchScenario, ScenarioKind, SweepResult,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{float, write_atomic, Table};
use crate::verify::run_verify;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Runs the command inside a pool capped at `config.threads` workers.
pub fn run_command(config: &RunConfig) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    pool.install(|| dispatch(config))
}

fn dispatch(config: &RunConfig) -> Result<()> {
    let table = match &config.command {
        Command::Dispersion { params, n_dimers } => dispersion_table(params, *n_dimers)?,
        Command::PhaseDiagram {
            field,
            grid,
            gap_samples,
        } => phase_diagram_table(*field, *grid, *gap_samples)?,
        Command::Sweep {
            scenario,
            nu_min,
            nu_step,
            nu_grid,
            n_dimers,
        } => {
            let sweep = parallel_sweep(scenario, nu_grid, *n_dimers)?;
            sweep_table(&sweep, *nu_min, *nu_step)
        }
        Command::ChargeCurve {
            pre,
            post,
            times,
            n_dimers,
        } => charge_curve_table(pre, post, times, *n_dimers)?,
        Command::Verify {
            sizes,
            trials,
            seed,
        } => {
            let report = run_verify(sizes, *trials, *seed)?;
            print!("{}", report.render());
            let failed = report.failed();
            let table = report.table();
            write_atomic(&config.output, &table.render(config.format))?;
            if failed > 0 {
                return Err(CliError::VerificationFailed { failed });
            }
            return Ok(());
        }
    };
    write_atomic(&config.output, &table.render(config.format))
}

fn params_json(p: &ModelParams) -> Value {
    json!({ "gamma": float(p.gamma()), "delta": float(p.delta()), "h": float(p.field()) })
}

fn markers_json(markers: &[CriticalPoint]) -> Value {
    Value::Array(
        markers
            .iter()
            .map(|m| json!({ "nu": float(m.nu), "boundary": m.boundary.name() }))
            .collect(),
    )
}

pub fn dispersion_table(params: &ModelParams, n_dimers: usize) -> Result<Table> {
    let grid = momentum_grid(n_dimers)?;
    let mut table = Table::new(&["q", "k", "omega1", "omega2"]);
    let r = boundary_residuals(params);
    table
        .meta("command", "dispersion")
        .meta("params", params_json(params))
        .meta("n_dimers", n_dimers)
        .meta("r_hyp", float(r.r_hyperbolic))
        .meta("r_con", float(r.r_conic))
        .meta("tool_version", TOOL_VERSION);
    for (&q, &k) in grid.q_values().iter().zip(grid.k_values()) {
        let (w1, w2) = dispersion(params, k)?;
        table.push_row(vec![q, k, w1, w2]);
    }
    Ok(table)
}

/// Gap and residuals on a `grid x grid` lattice over `[0, 2]^2` in
/// `(gamma, delta)`, gamma varying slowest.
pub fn phase_diagram_table(field: f64, grid: usize, gap_samples: usize) -> Result<Table> {
    let axis: Vec<f64> = (0..grid)
        .map(|i| 2.0 * i as f64 / (grid - 1) as f64)
        .collect();
    let points: Vec<(f64, f64)> = axis
        .iter()
        .flat_map(|&g| axis.iter().map(move |&d| (g, d)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(g, d)| {
            let p = ModelParams::new(g, d, field)?;
            let r = boundary_residuals(&p);
            Ok(vec![
                g,
                d,
                spectral_gap(&p, gap_samples)?,
                r.r_hyperbolic,
                r.r_conic,
            ])
        })
        .collect::<std::result::Result<Vec<_>, qbat_core::Error>>()?;
    let mut table = Table::new(&["gamma", "delta", "gap", "r_hyp", "r_con"]);
    table
        .meta("command", "phase-diagram")
        .meta("h", float(field))
        .meta("grid", grid)
        .meta("gap_samples", gap_samples)
        .meta("tool_version", TOOL_VERSION);
    table.rows = rows;
    Ok(table)
}

/// [`qbat_core::sweep_scenario`] with the points spread over the current
/// rayon pool. Each point is computed independently and collected in grid
/// order, so the result does not depend on the number of threads.
pub fn parallel_sweep(
    scenario: &QuenchScenario,
    nu_grid: &[f64],
    n_dimers: usize,
) -> Result<SweepResult> {
    let energies = nu_grid
        .par_iter()
        .map(|&nu| sweep_point(scenario, nu, n_dimers))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(SweepResult::from_parts(
        *scenario,
        n_dimers,
        nu_grid.to_vec(),
        energies,
    )?)
}

fn scenario_json(scenario: &QuenchScenario) -> Value {
    let fixed = match scenario.kind {
        ScenarioKind::Anisotropy { delta, field } => {
            json!({ "delta": float(delta), "h": float(field) })
        }
        ScenarioKind::Field { gamma, delta } => {
            json!({ "gamma": float(gamma), "delta": float(delta) })
        }
        ScenarioKind::Diagonal { delta } => json!({ "delta": float(delta) }),
        ScenarioKind::Explicit { pre, post } => {
            json!({ "pre": params_json(&pre), "post": params_json(&post) })
        }
    };
    json!({ "kind": scenario.kind.name(), "fixed": fixed })
}

pub fn sweep_table(sweep: &SweepResult, nu_min: f64, nu_step: f64) -> Table {
    let mut table = Table::new(&["nu_i", "delta_e_per_dimer"]);
    table
        .meta("command", "sweep")
        .meta("scenario", scenario_json(&sweep.scenario))
        .meta("nu_f", float(sweep.scenario.nu_f))
        .meta("nu_min", float(nu_min))
        .meta("nu_step", float(nu_step))
        .meta("n_dimers", sweep.n_dimers)
        .meta("critical_points", markers_json(&sweep.critical_markers))
        .meta("tool_version", TOOL_VERSION);
    for (&nu, &e) in sweep.nu_values.iter().zip(&sweep.energies) {
        table.push_row(vec![nu, e]);
    }
    table
}

pub fn charge_curve_table(
    pre: &ModelParams,
    post: &ModelParams,
    times: &[f64],
    n_dimers: usize,
) -> Result<Table> {
    let curve = stored_energy_curve(pre, post, times, n_dimers)?;
    let residuals = |p: &ModelParams| {
        let r = boundary_residuals(p);
        json!({ "r_hyp": float(r.r_hyperbolic), "r_con": float(r.r_conic) })
    };
    let mut table = Table::new(&["tau", "e_per_dimer"]);
    table
        .meta("command", "charge-curve")
        .meta("pre", params_json(pre))
        .meta("post", params_json(post))
        .meta("n_dimers", n_dimers)
        .meta("pre_residuals", residuals(pre))
        .meta("post_residuals", residuals(post))
        .meta("tool_version", TOOL_VERSION);
    for (&t, &e) in curve.times.iter().zip(&curve.energies) {
        table.push_row(vec![t, e]);
    }
    Ok(table)
}
