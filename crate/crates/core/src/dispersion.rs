//! Structure functions, quasiparticle dispersion, spectral gap and the two
//! gap-closing surfaces of the dimerized XY chain.

use core::f64::consts::PI;

use libm::{cos, sin, sqrt};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Outer radicands in `[-CLAMP_WINDOW, 0)` are round-off at a gap closure.
pub const CLAMP_WINDOW: f64 = 1e-12;
/// Outer radicands below `-RADICAND_FAILURE` mean the closed form is broken.
pub const RADICAND_FAILURE: f64 = 1e-9;
/// Absolute tolerance of the golden-section refinement in `k`.
pub const GAP_K_TOLERANCE: f64 = 1e-10;
pub const MIN_GAP_SAMPLES: usize = 64;

/// Intra-cell (`Z`) and pairing (`W`) structure functions at momentum `k`.
pub fn structure_functions(params: &ModelParams, k: f64) -> (Complex64, Complex64) {
    let strong = 1.0 + params.delta();
    let weak = 1.0 - params.delta();
    let phase = Complex64::new(cos(k), -sin(k));
    let z = -(phase * weak + strong);
    let w = -(Complex64::new(strong, 0.0) - phase * weak) * params.gamma();
    (z, w)
}

/// Quasiparticle energies `(omega_1, omega_2)` with `omega_1 >= omega_2 >= 0`.
pub fn dispersion(params: &ModelParams, k: f64) -> Result<(f64, f64)> {
    let (z, w) = structure_functions(params, k);
    let h2 = params.field() * params.field();
    let gd = params.gamma() * params.delta();
    let z2 = z.norm_sqr();
    let outer = 4.0 * h2 + z2 + w.norm_sqr();
    let inner = 2.0 * sqrt(4.0 * h2 * z2 + 16.0 * gd * gd);
    let omega1 = sqrt(outer + inner);
    let mut radicand = outer - inner;
    if radicand < 0.0 {
        if radicand < -RADICAND_FAILURE {
            return Err(Error::NegativeRadicand(radicand));
        }
        // Anything between the clamp window and the failure threshold is
        // still treated as cancellation noise; see CLAMP_WINDOW.
        radicand = 0.0;
    }
    Ok((omega1, sqrt(radicand)))
}

/// Signed distances of `h^2` from the two gap-closing surfaces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResidual {
    /// `h^2 - (1 - gamma^2 delta^2)`; zero where the `k = 0` gap closes.
    pub r_hyperbolic: f64,
    /// `h^2 - (delta^2 - gamma^2)`; zero where the `k = pi` gap closes.
    pub r_conic: f64,
}

impl BoundaryResidual {
    pub fn get(&self, boundary: Boundary) -> f64 {
        match boundary {
            Boundary::Hyperbolic => self.r_hyperbolic,
            Boundary::Conic => self.r_conic,
        }
    }
}

/// The two phase-boundary surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Boundary {
    /// `h^2 = 1 - gamma^2 delta^2`
    Hyperbolic,
    /// `h^2 = delta^2 - gamma^2`
    Conic,
}

impl Boundary {
    pub const ALL: [Boundary; 2] = [Boundary::Hyperbolic, Boundary::Conic];

    pub fn name(self) -> &'static str {
        match self {
            Boundary::Hyperbolic => "hyperbolic",
            Boundary::Conic => "conic",
        }
    }
}

pub fn boundary_residuals(params: &ModelParams) -> BoundaryResidual {
    let g2 = params.gamma() * params.gamma();
    let d2 = params.delta() * params.delta();
    let h2 = params.field() * params.field();
    BoundaryResidual {
        r_hyperbolic: h2 - 1.0 + g2 * d2,
        r_conic: h2 - d2 + g2,
    }
}

/// Smallest quasiparticle energy over the whole Brillouin zone.
///
/// Scans `omega_2` on `n_samples + 1` equally spaced momenta covering
/// `[0, 2 pi]` and refines the best sample by golden-section search over its
/// two neighbouring intervals.
pub fn spectral_gap(params: &ModelParams, n_samples: usize) -> Result<f64> {
    if n_samples < MIN_GAP_SAMPLES {
        return Err(Error::TooFewSamples(n_samples));
    }
    let step = 2.0 * PI / n_samples as f64;
    let lower = |k: f64| dispersion(params, k).map(|(_, w2)| w2);

    let mut best_index = 0;
    let mut best = f64::INFINITY;
    for i in 0..=n_samples {
        let value = lower(i as f64 * step)?;
        if value < best {
            best = value;
            best_index = i;
        }
    }

    let a = (best_index.saturating_sub(1)) as f64 * step;
    let b = ((best_index + 1).min(n_samples)) as f64 * step;
    let refined = golden_section_min(lower, a, b, GAP_K_TOLERANCE)?;
    Ok(best.min(refined))
}

fn golden_section_min<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(fc.min(fd).min(f(0.5 * (a + b))?))
}
