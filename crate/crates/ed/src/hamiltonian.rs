use qbat_core::ModelParams;

use crate::error::{EdError, Result};
use crate::{MAX_SITES, MIN_SITES};

/// Spin-flip parity `prod_j sigma^z_j` of a computational basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(state: usize) -> Parity {
        if state.count_ones().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Basis states of one parity sector, with the reverse lookup table.
#[derive(Debug, Clone)]
pub struct ParitySector {
    pub parity: Parity,
    pub basis: Vec<usize>,
    position: Vec<u32>,
}

impl ParitySector {
    pub fn new(n_sites: usize, parity: Parity) -> Self {
        let dim = 1usize << n_sites;
        let mut position = vec![u32::MAX; dim];
        let mut basis = Vec::with_capacity(dim / 2);
        for (state, slot) in position.iter_mut().enumerate() {
            if Parity::of(state) == parity {
                *slot = basis.len() as u32;
                basis.push(state);
            }
        }
        Self {
            parity,
            basis,
            position,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, state: usize) -> Option<usize> {
        match self.position[state] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Bond {
    mask: usize,
    /// Amplitude between states whose two bond spins are antiparallel.
    hopping: f64,
    /// Amplitude between states whose two bond spins are parallel.
    pairing: f64,
    left: usize,
    right: usize,
}

/// Dimerized XY chain on a periodic ring, stored as its bond list.
///
/// Bit `j` of a basis state is 1 when spin `j + 1` points up
/// (`sigma^z = +1`). Bond `(j, j + 1)`, counted from `j = 1`, carries
/// `1 - (-1)^j delta`, so the first bond has strength `1 + delta`.
#[derive(Debug, Clone)]
pub struct SpinHamiltonian {
    pub params: ModelParams,
    pub n_sites: usize,
    bonds: Vec<Bond>,
}

impl SpinHamiltonian {
    /// Diagonal element `h sum_j sigma^z_j`.
    pub fn diagonal(&self, state: usize) -> f64 {
        let up = state.count_ones() as f64;
        self.params.field() * (2.0 * up - self.n_sites as f64)
    }

    /// Calls `f(target, amplitude)` for every non-zero off-diagonal element
    /// in the column of `state`.
    pub fn for_each_flip(&self, state: usize, mut f: impl FnMut(usize, f64)) {
        for bond in &self.bonds {
            let parallel = ((state >> bond.left) & 1) == ((state >> bond.right) & 1);
            let amplitude = if parallel { bond.pairing } else { bond.hopping };
            if amplitude != 0.0 {
                f(state ^ bond.mask, amplitude);
            }
        }
    }

    /// `y = H x` restricted to `sector`.
    pub fn apply(&self, sector: &ParitySector, x: &[f64], y: &mut [f64]) {
        for (i, &state) in sector.basis.iter().enumerate() {
            let mut acc = self.diagonal(state) * x[i];
            self.for_each_flip(state, |target, amplitude| {
                // Flips preserve parity, so the target is always in the sector.
                let j = sector.position[target] as usize;
                acc += amplitude * x[j];
            });
            y[i] = acc;
        }
    }

    /// Dense matrix of the sector block.
    pub fn sector_matrix(&self, sector: &ParitySector) -> nalgebra::DMatrix<f64> {
        let dim = sector.dim();
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        for (j, &state) in sector.basis.iter().enumerate() {
            m[(j, j)] = self.diagonal(state);
            self.for_each_flip(state, |target, amplitude| {
                if let Some(i) = sector.index_of(target) {
                    m[(i, j)] += amplitude;
                }
            });
        }
        m
    }

    /// Largest `|<a|H|b>|` with `a`, `b` in different parity sectors.
    pub fn sector_coupling(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for state in 0..(1usize << self.n_sites) {
            self.for_each_flip(state, |target, amplitude| {
                if Parity::of(target) != Parity::of(state) {
                    worst = worst.max(amplitude.abs());
                }
            });
        }
        worst
    }

    /// Upper bound on the spectral radius (maximum absolute row sum).
    pub fn norm_bound(&self) -> f64 {
        let bonds: f64 = self
            .bonds
            .iter()
            .map(|b| b.hopping.abs().max(b.pairing.abs()))
            .sum();
        bonds + self.params.field().abs() * self.n_sites as f64
    }
}

pub fn build_spin_hamiltonian(params: &ModelParams, n_sites: usize) -> Result<SpinHamiltonian> {
    if n_sites > MAX_SITES {
        return Err(EdError::SizeLimit(n_sites));
    }
    if n_sites < MIN_SITES || !n_sites.is_multiple_of(2) {
        return Err(EdError::InvalidSize(n_sites));
    }
    let (gamma, delta) = (params.gamma(), params.delta());
    let bonds = (1..=n_sites)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let strength = params.coupling() * (1.0 - sign * delta);
            let left = j - 1;
            let right = j % n_sites;
            // (1+g)/2 XX + (1-g)/2 YY flips both spins with amplitude 1 on
            // antiparallel pairs and g on parallel ones.
            Bond {
                mask: (1 << left) | (1 << right),
                hopping: -strength,
                pairing: -strength * gamma,
                left,
                right,
            }
        })
        .collect();
    Ok(SpinHamiltonian {
        params: *params,
        n_sites,
        bonds,
    })
}
