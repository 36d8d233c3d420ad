use crate::error::{Error, Result};

/// Exchange coupling `J`. Every energy in the crate is measured in units of it.
pub const COUPLING: f64 = 1.0;

/// Parameters of the dimerized XY chain in a transverse field.
///
/// The same triple describes either the battery Hamiltonian (before the
/// quench) or the charging Hamiltonian (after it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    gamma: f64,
    delta: f64,
    field: f64,
}

impl ModelParams {
    /// Anisotropy `gamma`, dimerization `delta` and transverse field `h`.
    pub fn new(gamma: f64, delta: f64, field: f64) -> Result<Self> {
        for (name, value) in [("gamma", gamma), ("delta", delta), ("field", field)] {
            if !value.is_finite() {
                return Err(Error::NonFiniteParameter { name, value });
            }
        }
        Ok(Self {
            gamma,
            delta,
            field,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Transverse field `h` in units of `J`.
    pub fn field(&self) -> f64 {
        self.field
    }

    pub fn coupling(&self) -> f64 {
        COUPLING
    }
}

/// Validates a raw `(gamma, delta, h)` triple.
pub fn validate_params(gamma: f64, delta: f64, field: f64) -> Result<ModelParams> {
    ModelParams::new(gamma, delta, field)
}
