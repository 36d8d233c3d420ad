use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Antiperiodic momentum grid of a chain with `n_dimers` two-site unit cells.
///
/// `q` runs over the half-integers `1/2, 3/2, ..., n_dimers - 1/2` and maps to
/// `k = 2 pi q / n_dimers`. Only even dimer counts are accepted, so no momentum
/// sits at `k = pi` where the `(k, -k)` pairing degenerates.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    n_dimers: usize,
    q_values: Vec<f64>,
    k_values: Vec<f64>,
}

impl MomentumGrid {
    pub fn new(n_dimers: usize) -> Result<Self> {
        if n_dimers < 2 || !n_dimers.is_multiple_of(2) {
            return Err(Error::OddDimerCount(n_dimers));
        }
        let q_values: Vec<f64> = (0..n_dimers).map(|i| i as f64 + 0.5).collect();
        let k_values = q_values
            .iter()
            .map(|q| 2.0 * PI * q / n_dimers as f64)
            .collect();
        Ok(Self {
            n_dimers,
            q_values,
            k_values,
        })
    }

    pub fn n_dimers(&self) -> usize {
        self.n_dimers
    }

    /// Number of spins, two per dimer.
    pub fn n_sites(&self) -> usize {
        2 * self.n_dimers
    }

    pub fn q_values(&self) -> &[f64] {
        &self.q_values
    }

    pub fn k_values(&self) -> &[f64] {
        &self.k_values
    }

    pub fn len(&self) -> usize {
        self.n_dimers
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn momentum_grid(n_dimers: usize) -> Result<MomentumGrid> {
    MomentumGrid::new(n_dimers)
}
