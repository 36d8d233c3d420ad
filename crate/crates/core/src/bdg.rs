//! Per-momentum Bogoliubov-de Gennes blocks and their eigenmodes.
//!
//! Jordan-Wigner fermions on the two sublattices of dimer `m` are `A_m` and
//! `B_m`; with antiperiodic Fourier modes the Hamiltonian splits into
//! `1/2 sum_k Psi_k^dag H_k Psi_k` with Nambu spinor
//! `Psi_k = (A_k, B_k, A^dag_{-k}, B^dag_{-k})`.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;

use crate::dispersion::structure_functions;
use crate::error::{Error, Result};
use crate::params::ModelParams;

pub type CMatrix4 = Matrix4<Complex64>;

/// Eigenvalues closer than this are treated as one degenerate level.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;
/// `omega_2` at or below this makes the ground state ambiguous.
pub const GAPLESS_THRESHOLD: f64 = 1e-12;

const EIGEN_MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct BdgBlock {
    pub k: f64,
    pub matrix: CMatrix4,
}

impl BdgBlock {
    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let diff = self.matrix - self.matrix.adjoint();
        diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Builds the 4x4 block at momentum `k`.
pub fn bdg_block(params: &ModelParams, k: f64) -> BdgBlock {
    let (z, w) = structure_functions(params, k);
    let (z_m, w_m) = structure_functions(params, -k);
    let h2 = Complex64::new(2.0 * params.field(), 0.0);
    let zero = Complex64::new(0.0, 0.0);
    #[rustfmt::skip]
    let matrix = CMatrix4::new(
        h2,        z,            zero,          w,
        z.conj(),  h2,           -w_m,          zero,
        zero,      -w_m.conj(),  -h2,           -z_m.conj(),
        w.conj(),  zero,         -z_m,          -h2,
    );
    BdgBlock { k, matrix }
}

/// Eigenmodes of a block in the order `(+w1, +w2, -w1, -w2)`.
///
/// Column `j` of `vectors` belongs to `energies[j]`. Each column is scaled so
/// that its entry of largest modulus is real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeDecomposition {
    pub block: BdgBlock,
    pub energies: [f64; 4],
    pub vectors: CMatrix4,
}

impl ModeDecomposition {
    pub fn k(&self) -> f64 {
        self.block.k
    }

    pub fn omega1(&self) -> f64 {
        self.energies[0]
    }

    pub fn omega2(&self) -> f64 {
        self.energies[1]
    }

    /// Largest entry of `V^dag V - 1`.
    pub fn unitarity_error(&self) -> f64 {
        max_abs(&(self.vectors.adjoint() * self.vectors - CMatrix4::identity()))
    }

    /// Largest entry of `H V - V diag(E)`.
    pub fn residual(&self) -> f64 {
        let diag = CMatrix4::from_diagonal(&Vector4::from_fn(|i, _| {
            Complex64::new(self.energies[i], 0.0)
        }));
        max_abs(&(self.block.matrix * self.vectors - self.vectors * diag))
    }
}

pub(crate) fn max_abs(m: &CMatrix4) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn mode_decomposition(block: &BdgBlock) -> Result<ModeDecomposition> {
    let eig = SymmetricEigen::try_new(block.matrix, f64::EPSILON, EIGEN_MAX_ITERATIONS)
        .ok_or(Error::EigensolverFailure)?;

    // Descending energies: e0 >= e1 >= e2 >= e3, i.e. (+w1, +w2, -w2, -w1).
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let slots = [order[0], order[1], order[3], order[2]];

    let mut energies = [0.0; 4];
    let mut columns = [Vector4::<Complex64>::zeros(); 4];
    for (slot, &src) in slots.iter().enumerate() {
        energies[slot] = eig.eigenvalues[src];
        columns[slot] = fix_phase(eig.eigenvectors.column(src).into_owned());
    }

    // Inside a degenerate level the basis is whatever the solver produced;
    // order it by the real part of the first component instead.
    for i in 0..4 {
        for j in (i + 1)..4 {
            if (energies[i] - energies[j]).abs() <= DEGENERACY_TOLERANCE
                && columns[j][0].re > columns[i][0].re
            {
                columns.swap(i, j);
            }
        }
    }

    // Quasiparticle energies are non-negative by construction of the slots;
    // fold -0.0 and round-off so that the two halves mirror each other.
    let omega1 = 0.5 * (energies[0] - energies[2]);
    let omega2 = 0.5 * (energies[1] - energies[3]);
    let energies = [omega1, omega2, -omega1, -omega2];

    Ok(ModeDecomposition {
        block: block.clone(),
        energies,
        vectors: CMatrix4::from_columns(&columns),
    })
}

fn fix_phase(mut v: Vector4<Complex64>) -> Vector4<Complex64> {
    let largest = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v
        .iter()
        .position(|z| z.norm() >= largest * (1.0 - 1e-12))
        .unwrap_or(0);
    let modulus = v[pivot].norm();
    if modulus > 0.0 {
        let rotation = v[pivot].conj() / modulus;
        v *= rotation;
        v[pivot] = Complex64::new(modulus, 0.0);
    }
    v
}

/// Overlaps between battery and charger eigenmodes, `V^dag U`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    pub m: CMatrix4,
}

impl OverlapMatrix {
    /// `|M_ij|^2`, row `i` indexing charger modes and column `j` battery modes.
    pub fn weights(&self) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, w) in row.iter_mut().enumerate() {
                *w = self.m[(i, j)].norm_sqr();
            }
        }
        out
    }

    pub fn unitarity_error(&self) -> f64 {
        max_abs(&(self.m.adjoint() * self.m - CMatrix4::identity()))
    }
}

/// `M = V^{-1} U = V^dag U` with `U` from the battery and `V` from the charger.
pub fn overlap_matrix(pre: &ModeDecomposition, post: &ModeDecomposition) -> Result<OverlapMatrix> {
    if (pre.k() - post.k()).abs() > 1e-12 {
        return Err(Error::MomentumMismatch {
            pre: pre.k(),
            post: post.k(),
        });
    }
    Ok(OverlapMatrix {
        m: post.vectors.adjoint() * pre.vectors,
    })
}

/// Projector onto the negative-energy modes, i.e. the Nambu correlation
/// matrix `<Psi Psi^dag>^T` of the quasiparticle vacuum.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundProjector {
    pub matrix: CMatrix4,
    /// Set when `omega_2 <= GAPLESS_THRESHOLD`: the vacuum is then degenerate
    /// and `matrix` is built from the deterministic degenerate basis.
    pub gapless: bool,
    omega2: f64,
}

impl GroundProjector {
    /// Refuses a projector whose ground state is ambiguous.
    pub fn strict(self) -> Result<CMatrix4> {
        if self.gapless {
            Err(Error::GaplessAmbiguity(self.omega2))
        } else {
            Ok(self.matrix)
        }
    }
}

pub fn ground_state_projector(decomp: &ModeDecomposition) -> GroundProjector {
    let v3 = decomp.vectors.column(2);
    let v4 = decomp.vectors.column(3);
    let matrix = v3 * v3.adjoint() + v4 * v4.adjoint();
    GroundProjector {
        matrix,
        gapless: decomp.omega2() <= GAPLESS_THRESHOLD,
        omega2: decomp.omega2(),
    }
}
