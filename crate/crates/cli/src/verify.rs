//! Cross-checks of the free-fermion engine against exact diagonalization
//! and against closed-form properties, on seeded random parameter draws.

use std::f64::consts::PI;
use std::fmt::Write;

use qbat_core::{
    bdg_block, dispersion, mode_decomposition, momentum_grid, spectral_gap,
    stored_energy_asymptotic, stored_energy_curve, stored_energy_time_average, ModelParams,
};
use qbat_ed::{build_spin_hamiltonian, ground_state, Parity, ParitySector, QuenchDynamics};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::error::Result;
use crate::output::Table;

pub const GAP_SAMPLES: usize = 1024;
pub const TAUS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// Pass when the observed value is at most the tolerance.
    AtMost,
    /// Pass when the observed value is at least the tolerance.
    AtLeast,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub n_sites: Option<usize>,
    pub samples: usize,
    /// Worst case over the samples: largest error, or smallest value for
    /// [`Bound::AtLeast`].
    pub worst: f64,
    pub tolerance: f64,
    pub bound: Bound,
}

impl Check {
    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.worst <= self.tolerance,
            Bound::AtLeast => self.worst >= self.tolerance,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }

    pub fn render(&self) -> String {
        let mut out = format!("seed {}  trials {}\n", self.seed, self.trials);
        let _ = writeln!(
            out,
            "{:<26} {:>5} {:>7} {:>12}    {:>9}  result",
            "check", "N", "samples", "worst", "tolerance"
        );
        for c in &self.checks {
            let n = c.n_sites.map_or("-".to_string(), |n| n.to_string());
            let op = match c.bound {
                Bound::AtMost => "<=",
                Bound::AtLeast => ">=",
            };
            let verdict = if c.passed() { "ok" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{:<26} {:>5} {:>7} {:>12.3e} {} {:>9.1e}  {}",
                c.name, n, c.samples, c.worst, op, c.tolerance, verdict
            );
        }
        let _ = writeln!(
            out,
            "{} of {} checks failed",
            self.failed(),
            self.checks.len()
        );
        out
    }

    /// Numeric export; check names are listed in the metadata in row order.
    pub fn table(&self) -> Table {
        let mut table = Table::new(&[
            "check",
            "n_sites",
            "samples",
            "worst",
            "tolerance",
            "passed",
        ]);
        let names: Vec<&str> = self.checks.iter().map(|c| c.name).collect();
        table
            .meta("command", "verify")
            .meta("seed", self.seed)
            .meta("trials", self.trials)
            .meta("checks", json!(names))
            .meta("tool_version", crate::commands::TOOL_VERSION);
        for (i, c) in self.checks.iter().enumerate() {
            table.push_row(vec![
                i as f64,
                c.n_sites.map_or(0.0, |n| n as f64),
                c.samples as f64,
                c.worst,
                c.tolerance,
                if c.passed() { 1.0 } else { 0.0 },
            ]);
        }
        table
    }
}

fn draw_params(rng: &mut ChaCha8Rng) -> ModelParams {
    let mut x = || rng.random_range(-2.0..2.0);
    ModelParams::new(x(), x(), x()).expect("finite draw")
}

/// Ground energy of the even sector predicted by the free-fermion modes.
pub fn free_fermion_ground_energy(params: &ModelParams, n_dimers: usize) -> Result<f64> {
    let grid = momentum_grid(n_dimers)?;
    let mut total = 0.0;
    for &k in grid.k_values() {
        let (w1, w2) = dispersion(params, k)?;
        total -= 0.5 * (w1 + w2);
    }
    Ok(total)
}

/// A point on the surface `h^2 = 1 - gamma^2 delta^2` or `h^2 = delta^2 - gamma^2`.
pub fn draw_boundary_point(rng: &mut ChaCha8Rng, conic: bool) -> ModelParams {
    loop {
        let gamma: f64 = rng.random_range(-2.0..2.0);
        let delta: f64 = rng.random_range(-2.0..2.0);
        let h2 = if conic {
            delta * delta - gamma * gamma
        } else {
            1.0 - gamma * gamma * delta * delta
        };
        if h2 >= 0.0 {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            return ModelParams::new(gamma, delta, sign * h2.sqrt()).expect("finite draw");
        }
    }
}

/// A point whose residuals from both surfaces are at least `margin` in magnitude.
pub fn draw_generic_point(rng: &mut ChaCha8Rng, margin: f64) -> ModelParams {
    loop {
        let p = draw_params(rng);
        let r = qbat_core::boundary_residuals(&p);
        if r.r_hyperbolic.abs() >= margin && r.r_conic.abs() >= margin {
            return p;
        }
    }
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn run_verify(sizes: &[usize], trials: usize, seed: u64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    let mut errors = Vec::with_capacity(trials);
    for _ in 0..trials {
        let p = draw_params(&mut rng);
        let k = rng.random_range(0.0..2.0 * PI);
        let modes = mode_decomposition(&bdg_block(&p, k))?;
        let (w1, w2) = dispersion(&p, k)?;
        let expected = [w1, w2, -w1, -w2];
        errors.extend(modes.energies.iter().zip(expected).map(|(a, b)| a - b));
    }
    checks.push(Check {
        name: "bdg spectrum",
        n_sites: None,
        samples: trials,
        worst: max_abs(errors),
        tolerance: 1e-10,
        bound: Bound::AtMost,
    });

    let mut stored = Vec::new();
    for &n_sites in sizes {
        let n_dimers = n_sites / 2;
        let sector = ParitySector::new(n_sites, Parity::Even);

        let mut gs_errors = Vec::with_capacity(trials);
        for _ in 0..trials {
            let p = draw_params(&mut rng);
            let ed = ground_state(&build_spin_hamiltonian(&p, n_sites)?, &sector)?.energy;
            gs_errors.push(ed - free_fermion_ground_energy(&p, n_dimers)?);
        }
        checks.push(Check {
            name: "ground energy vs ED",
            n_sites: Some(n_sites),
            samples: trials,
            worst: max_abs(gs_errors),
            tolerance: 1e-9,
            bound: Bound::AtMost,
        });

        let mut ed_errors = Vec::with_capacity(trials);
        let mut avg_errors = Vec::with_capacity(trials);
        let mut tau_errors = Vec::with_capacity(trials * TAUS.len());
        let mut origin = Vec::with_capacity(trials);
        for _ in 0..trials {
            let pre = draw_params(&mut rng);
            let post = draw_params(&mut rng);
            let asymptotic = stored_energy_asymptotic(&pre, &post, n_dimers)?;
            stored.push(asymptotic);
            let dynamics = QuenchDynamics::new(&pre, &post, n_sites)?;
            ed_errors.push(asymptotic - dynamics.dephased_energy()?);
            avg_errors.push(asymptotic - stored_energy_time_average(&pre, &post, n_dimers)?);

            let mut times = vec![0.0];
            times.extend(TAUS);
            let curve = stored_energy_curve(&pre, &post, &times, n_dimers)?;
            origin.push(curve.energies[0]);
            for (&tau, &e) in TAUS.iter().zip(&curve.energies[1..]) {
                tau_errors.push(e * n_dimers as f64 - dynamics.energy_at(tau)?);
            }
        }
        checks.push(Check {
            name: "dephased energy vs ED",
            n_sites: Some(n_sites),
            samples: trials,
            worst: max_abs(ed_errors),
            tolerance: 1e-8,
            bound: Bound::AtMost,
        });
        checks.push(Check {
            name: "dephased vs time average",
            n_sites: Some(n_sites),
            samples: trials,
            worst: max_abs(avg_errors),
            tolerance: 1e-10,
            bound: Bound::AtMost,
        });
        checks.push(Check {
            name: "E(tau) vs ED",
            n_sites: Some(n_sites),
            samples: trials * TAUS.len(),
            worst: max_abs(tau_errors),
            tolerance: 1e-8,
            bound: Bound::AtMost,
        });
        checks.push(Check {
            name: "E(0)",
            n_sites: Some(n_sites),
            samples: trials,
            worst: max_abs(origin),
            tolerance: 1e-12,
            bound: Bound::AtMost,
        });
    }

    for (name, conic) in [
        ("gap on hyperbolic surface", false),
        ("gap on conic surface", true),
    ] {
        let mut gaps = Vec::with_capacity(trials);
        for _ in 0..trials {
            gaps.push(spectral_gap(
                &draw_boundary_point(&mut rng, conic),
                GAP_SAMPLES,
            )?);
        }
        checks.push(Check {
            name,
            n_sites: None,
            samples: trials,
            worst: max_abs(gaps),
            tolerance: 1e-6,
            bound: Bound::AtMost,
        });
    }
    let mut gaps = Vec::with_capacity(trials);
    for _ in 0..trials {
        gaps.push(spectral_gap(
            &draw_generic_point(&mut rng, 0.05),
            GAP_SAMPLES,
        )?);
    }
    checks.push(Check {
        name: "gap off both surfaces",
        n_sites: None,
        samples: trials,
        worst: gaps.iter().copied().fold(f64::INFINITY, f64::min),
        tolerance: 1e-3,
        bound: Bound::AtLeast,
    });

    let mut null = Vec::with_capacity(trials);
    for _ in 0..trials {
        let p = draw_params(&mut rng);
        null.push(stored_energy_asymptotic(&p, &p, 8)?);
    }
    checks.push(Check {
        name: "null quench",
        n_sites: None,
        samples: trials,
        worst: max_abs(null),
        tolerance: 1e-12,
        bound: Bound::AtMost,
    });
    checks.push(Check {
        name: "stored energy >= 0",
        n_sites: None,
        samples: stored.len(),
        worst: stored.iter().copied().fold(f64::INFINITY, f64::min),
        tolerance: -1e-12,
        bound: Bound::AtLeast,
    });

    Ok(Report {
        seed,
        trials,
        checks,
    })
}
