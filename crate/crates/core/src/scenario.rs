//! Quench lines through parameter space and the critical points met along them.

use alloc::vec::Vec;

use crate::dispersion::{boundary_residuals, Boundary};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Default bracketing step of [`critical_points_on_segment`].
pub const ROOT_SCAN_STEP: f64 = 1e-3;
/// Bisection stops once the bracket is narrower than this.
pub const ROOT_TOLERANCE: f64 = 1e-10;

/// Which parameters a sweep moves, and which it holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioKind {
    /// `gamma = nu` at fixed `delta` and `h`.
    Anisotropy { delta: f64, field: f64 },
    /// `h = nu` at fixed `gamma` and `delta`.
    Field { gamma: f64, delta: f64 },
    /// `gamma = nu`, `h = nu + delta - 1` at fixed `delta`: the line on the
    /// plane `h = gamma + delta - 1`.
    Diagonal { delta: f64 },
    /// A single literal battery/charger pair.
    Explicit { pre: ModelParams, post: ModelParams },
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Anisotropy { .. } => "anisotropy",
            ScenarioKind::Field { .. } => "field",
            ScenarioKind::Diagonal { .. } => "diagonal",
            ScenarioKind::Explicit { .. } => "explicit",
        }
    }
}

/// A sudden quench `map(nu_i) -> map(nu_i + nu_f)` along a parameter line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchScenario {
    pub kind: ScenarioKind,
    pub nu_f: f64,
}

impl QuenchScenario {
    pub fn anisotropy(delta: f64, field: f64, nu_f: f64) -> Self {
        Self {
            kind: ScenarioKind::Anisotropy { delta, field },
            nu_f,
        }
    }

    pub fn field(gamma: f64, delta: f64, nu_f: f64) -> Self {
        Self {
            kind: ScenarioKind::Field { gamma, delta },
            nu_f,
        }
    }

    pub fn diagonal(delta: f64, nu_f: f64) -> Self {
        Self {
            kind: ScenarioKind::Diagonal { delta },
            nu_f,
        }
    }

    pub fn explicit(pre: ModelParams, post: ModelParams) -> Self {
        Self {
            kind: ScenarioKind::Explicit { pre, post },
            nu_f: 0.0,
        }
    }

    /// Point of the parameter line at `nu`.
    pub fn params_at(&self, nu: f64) -> Result<ModelParams> {
        match self.kind {
            ScenarioKind::Anisotropy { delta, field } => ModelParams::new(nu, delta, field),
            ScenarioKind::Field { gamma, delta } => ModelParams::new(gamma, delta, nu),
            ScenarioKind::Diagonal { delta } => ModelParams::new(nu, delta, nu + delta - 1.0),
            ScenarioKind::Explicit { .. } => Err(Error::ExplicitScenario),
        }
    }

    /// Battery Hamiltonian parameters for initial value `nu`.
    pub fn pre(&self, nu: f64) -> Result<ModelParams> {
        match self.kind {
            ScenarioKind::Explicit { pre, .. } => Ok(pre),
            _ => self.params_at(nu),
        }
    }

    /// Charging Hamiltonian parameters for initial value `nu`.
    pub fn post(&self, nu: f64) -> Result<ModelParams> {
        match self.kind {
            ScenarioKind::Explicit { post, .. } => Ok(post),
            _ => self.params_at(nu + self.nu_f),
        }
    }
}

pub fn scenario_params(scenario: &QuenchScenario, nu: f64) -> Result<ModelParams> {
    scenario.params_at(nu)
}

/// Whether critical points refer to the battery or the charging Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Pre,
    Post,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub nu: f64,
    pub boundary: Boundary,
}

/// Values of `nu` in `[lo, hi]` at which the targeted Hamiltonian sits on a
/// phase boundary, sorted ascending. Uses [`ROOT_SCAN_STEP`].
pub fn critical_points_on_segment(
    scenario: &QuenchScenario,
    lo: f64,
    hi: f64,
    target: Target,
) -> Result<Vec<CriticalPoint>> {
    critical_points_with_step(scenario, lo, hi, target, ROOT_SCAN_STEP)
}

pub fn critical_points_with_step(
    scenario: &QuenchScenario,
    lo: f64,
    hi: f64,
    target: Target,
    step: f64,
) -> Result<Vec<CriticalPoint>> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidInterval { lo: step, hi: step });
    }
    if let ScenarioKind::Explicit { .. } = scenario.kind {
        return Ok(Vec::new());
    }

    let shift = match target {
        Target::Pre => 0.0,
        Target::Post => scenario.nu_f,
    };
    let mut roots = Vec::new();
    let n_steps = libm::ceil((hi - lo) / step) as usize;
    for boundary in Boundary::ALL {
        let residual = |nu: f64| {
            scenario
                .params_at(nu + shift)
                .map(|p| boundary_residuals(&p).get(boundary))
        };
        let mut a = lo;
        let mut fa = residual(a)?;
        if fa == 0.0 {
            roots.push(CriticalPoint { nu: a, boundary });
        }
        for i in 1..=n_steps {
            let b = if i == n_steps {
                hi
            } else {
                lo + i as f64 * step
            };
            let fb = residual(b)?;
            if fb == 0.0 {
                roots.push(CriticalPoint { nu: b, boundary });
            } else if fa != 0.0 && (fa < 0.0) != (fb < 0.0) {
                roots.push(CriticalPoint {
                    nu: bisect(&residual, a, b, fa)?,
                    boundary,
                });
            }
            a = b;
            fa = fb;
        }
    }
    roots.sort_by(|x, y| x.nu.total_cmp(&y.nu).then(x.boundary.cmp(&y.boundary)));
    Ok(roots)
}

fn bisect<F>(f: &F, mut a: f64, mut b: f64, mut fa: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    while b - a > ROOT_TOLERANCE {
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
