//! Ground states and exact quench dynamics inside one parity sector.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use qbat_core::ModelParams;

use crate::error::{EdError, Result};
use crate::hamiltonian::{build_spin_hamiltonian, Parity, ParitySector, SpinHamiltonian};
use crate::MAX_DENSE_SITES;

/// H1 eigenvalues closer than this are dephased as one level.
pub const LEVEL_TOLERANCE: f64 = 1e-9;

const LANCZOS_MAX_STEPS: usize = 400;
const LANCZOS_TOLERANCE: f64 = 1e-13;

/// Lowest eigenpair of a sector. `psi` is expressed in the sector basis.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub psi: Vec<f64>,
}

fn fix_sign(mut psi: Vec<f64>) -> Vec<f64> {
    let pivot = psi
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |best, (i, x)| {
            if x.abs() > best.1 * (1.0 + 1e-12) {
                (i, x.abs())
            } else {
                best
            }
        })
        .0;
    let norm = psi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = if psi[pivot] < 0.0 {
        -1.0 / norm
    } else {
        1.0 / norm
    };
    psi.iter_mut().for_each(|x| *x *= scale);
    psi
}

fn dense_eigen(
    h: &SpinHamiltonian,
    sector: &ParitySector,
) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    SymmetricEigen::try_new(h.sector_matrix(sector), f64::EPSILON, 0).ok_or(
        EdError::EigensolverFailure("dense symmetric QR did not converge"),
    )
}

fn lowest(eig: &SymmetricEigen<f64, nalgebra::Dyn>) -> usize {
    let values = &eig.eigenvalues;
    (0..values.len())
        .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
        .expect("non-empty spectrum")
}

/// Lowest eigenpair of `h` in `sector`.
///
/// Dense diagonalization up to [`MAX_DENSE_SITES`] sites, Lanczos with full
/// reorthogonalization above.
pub fn ground_state(h: &SpinHamiltonian, sector: &ParitySector) -> Result<GroundState> {
    if h.n_sites <= MAX_DENSE_SITES {
        let eig = dense_eigen(h, sector)?;
        let i = lowest(&eig);
        Ok(GroundState {
            energy: eig.eigenvalues[i],
            psi: fix_sign(eig.eigenvectors.column(i).iter().copied().collect()),
        })
    } else {
        lanczos_ground_state(h, sector)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn lanczos_ground_state(h: &SpinHamiltonian, sector: &ParitySector) -> Result<GroundState> {
    let dim = sector.dim();
    // Deterministic start vector with overlap on every basis state.
    let mut v: Vec<f64> = (0..dim)
        .map(|i| 1.0 + ((i * 7919) % 104_729) as f64 / 104_729.0)
        .collect();
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);

    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let mut previous = f64::INFINITY;

    for step in 0..LANCZOS_MAX_STEPS.min(dim) {
        h.apply(sector, &basis[step], &mut w);
        let alpha = dot(&w, &basis[step]);
        alphas.push(alpha);
        for q in &basis {
            let overlap = dot(&w, q);
            w.iter_mut().zip(q).for_each(|(x, y)| *x -= overlap * y);
        }
        for q in &basis {
            let overlap = dot(&w, q);
            w.iter_mut().zip(q).for_each(|(x, y)| *x -= overlap * y);
        }
        let beta = dot(&w, &w).sqrt();

        let (theta, coeffs) = tridiagonal_lowest(&alphas, &betas)?;
        let residual = beta * coeffs.last().copied().unwrap_or(0.0).abs();
        let converged = residual < LANCZOS_TOLERANCE * theta.abs().max(1.0)
            || (previous - theta).abs() < 1e-15 * theta.abs().max(1.0) && residual < 1e-10;
        if converged || beta < 1e-14 || step + 1 == LANCZOS_MAX_STEPS.min(dim) {
            if !converged && beta >= 1e-14 && residual > 1e-8 {
                return Err(EdError::EigensolverFailure("Lanczos did not converge"));
            }
            let mut psi = vec![0.0; dim];
            for (c, q) in coeffs.iter().zip(&basis) {
                psi.iter_mut().zip(q).for_each(|(x, y)| *x += c * y);
            }
            let psi = fix_sign(psi);
            h.apply(sector, &psi, &mut w);
            return Ok(GroundState {
                energy: dot(&psi, &w),
                psi,
            });
        }
        previous = theta;
        betas.push(beta);
        basis.push(w.iter().map(|x| x / beta).collect());
    }
    Err(EdError::EigensolverFailure("Lanczos did not converge"))
}

fn tridiagonal(alphas: &[f64], betas: &[f64]) -> DMatrix<f64> {
    let m = alphas.len();
    DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    })
}

fn tridiagonal_lowest(alphas: &[f64], betas: &[f64]) -> Result<(f64, Vec<f64>)> {
    let eig = SymmetricEigen::try_new(tridiagonal(alphas, betas), f64::EPSILON, 0)
        .ok_or(EdError::EigensolverFailure("tridiagonal eigensolver"))?;
    let i = lowest(&eig);
    Ok((
        eig.eigenvalues[i],
        eig.eigenvectors.column(i).iter().copied().collect(),
    ))
}

/// `exp(-i H t) psi` by Krylov projection, split into substeps that keep
/// `||H|| dt` small enough for a fixed 40-dimensional subspace.
fn krylov_propagate(
    h: &SpinHamiltonian,
    sector: &ParitySector,
    psi: &[Complex64],
    t: f64,
) -> Result<Vec<Complex64>> {
    const KRYLOV_DIM: usize = 40;
    let substeps = ((h.norm_bound() * t.abs()) / 4.0).ceil().max(1.0) as usize;
    let dt = t / substeps as f64;
    let dim = sector.dim();
    let mut state = psi.to_vec();
    let mut re = vec![0.0; dim];
    let mut im = vec![0.0; dim];
    let mut hre = vec![0.0; dim];
    let mut him = vec![0.0; dim];

    for _ in 0..substeps {
        let norm = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut basis: Vec<Vec<Complex64>> = vec![state.iter().map(|z| z / norm).collect()];
        let mut alphas = Vec::new();
        let mut betas = Vec::new();
        for j in 0..KRYLOV_DIM.min(dim) {
            for (i, z) in basis[j].iter().enumerate() {
                re[i] = z.re;
                im[i] = z.im;
            }
            h.apply(sector, &re, &mut hre);
            h.apply(sector, &im, &mut him);
            let mut w: Vec<Complex64> = hre
                .iter()
                .zip(&him)
                .map(|(a, b)| Complex64::new(*a, *b))
                .collect();
            for _ in 0..2 {
                for q in &basis {
                    let overlap: Complex64 = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                    w.iter_mut().zip(q).for_each(|(x, y)| *x -= overlap * y);
                }
            }
            let alpha: Complex64 = basis[j]
                .iter()
                .zip(&hre)
                .zip(&him)
                .map(|((q, a), b)| q.conj() * Complex64::new(*a, *b))
                .sum();
            alphas.push(alpha.re);
            let beta = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if beta < 1e-13 || j + 1 == KRYLOV_DIM.min(dim) {
                break;
            }
            betas.push(beta);
            basis.push(w.iter().map(|z| z / beta).collect());
        }
        let eig = SymmetricEigen::try_new(
            tridiagonal(&alphas, &betas[..alphas.len() - 1]),
            f64::EPSILON,
            0,
        )
        .ok_or(EdError::EigensolverFailure("Krylov tridiagonal"))?;
        let m = alphas.len();
        // c = norm * Q exp(-i T dt) e_0
        let coeffs: Vec<Complex64> = (0..m)
            .map(|r| {
                (0..m)
                    .map(|s| {
                        let u = &eig.eigenvectors;
                        Complex64::from_polar(u[(r, s)] * u[(0, s)], -eig.eigenvalues[s] * dt)
                    })
                    .sum::<Complex64>()
                    * norm
            })
            .collect();
        state = vec![Complex64::new(0.0, 0.0); dim];
        for (c, q) in coeffs.iter().zip(&basis) {
            state.iter_mut().zip(q).for_each(|(x, y)| *x += c * y);
        }
    }
    Ok(state)
}

/// `<psi| H |psi>` for a complex state and a real symmetric `H`.
fn expectation(h: &SpinHamiltonian, sector: &ParitySector, psi: &[Complex64]) -> f64 {
    let re: Vec<f64> = psi.iter().map(|z| z.re).collect();
    let im: Vec<f64> = psi.iter().map(|z| z.im).collect();
    let mut buf = vec![0.0; psi.len()];
    h.apply(sector, &re, &mut buf);
    let mut total = dot(&re, &buf);
    h.apply(sector, &im, &mut buf);
    total += dot(&im, &buf);
    total
}

enum Propagator {
    Dense {
        energies: Vec<f64>,
        vectors: DMatrix<f64>,
        amplitudes: Vec<f64>,
    },
    Krylov,
}

/// Sudden quench from the even-sector ground state of `H0` under `H1`.
pub struct QuenchDynamics {
    pub battery: SpinHamiltonian,
    pub charger: SpinHamiltonian,
    pub sector: ParitySector,
    pub ground: GroundState,
    propagator: Propagator,
}

impl QuenchDynamics {
    pub fn new(pre: &ModelParams, post: &ModelParams, n_sites: usize) -> Result<Self> {
        let battery = build_spin_hamiltonian(pre, n_sites)?;
        let charger = build_spin_hamiltonian(post, n_sites)?;
        let sector = ParitySector::new(n_sites, Parity::Even);
        let ground = ground_state(&battery, &sector)?;
        let propagator = if n_sites <= MAX_DENSE_SITES {
            let eig = dense_eigen(&charger, &sector)?;
            let amplitudes = (0..sector.dim())
                .map(|n| dot(eig.eigenvectors.column(n).as_slice(), &ground.psi))
                .collect();
            Propagator::Dense {
                energies: eig.eigenvalues.iter().copied().collect(),
                vectors: eig.eigenvectors,
                amplitudes,
            }
        } else {
            Propagator::Krylov
        };
        Ok(Self {
            battery,
            charger,
            sector,
            ground,
            propagator,
        })
    }

    /// `exp(-i H1 tau) |psi0>` in the sector basis.
    pub fn evolve(&self, tau: f64) -> Result<Vec<Complex64>> {
        match &self.propagator {
            Propagator::Dense {
                energies,
                vectors,
                amplitudes,
            } => {
                let mut psi = vec![Complex64::new(0.0, 0.0); self.sector.dim()];
                for (n, (e, a)) in energies.iter().zip(amplitudes).enumerate() {
                    let c = Complex64::from_polar(*a, -e * tau);
                    psi.iter_mut()
                        .zip(vectors.column(n).iter())
                        .for_each(|(x, v)| *x += c * v);
                }
                Ok(psi)
            }
            Propagator::Krylov => {
                let psi0: Vec<Complex64> = self
                    .ground
                    .psi
                    .iter()
                    .map(|x| Complex64::new(*x, 0.0))
                    .collect();
                krylov_propagate(&self.charger, &self.sector, &psi0, tau)
            }
        }
    }

    /// Stored energy `<psi(tau)| H0 |psi(tau)> - E0`.
    pub fn energy_at(&self, tau: f64) -> Result<f64> {
        let psi = self.evolve(tau)?;
        Ok(expectation(&self.battery, &self.sector, &psi) - self.ground.energy)
    }

    /// `<psi(tau)| H1 |psi(tau)>`, conserved by the evolution.
    pub fn charger_energy_at(&self, tau: f64) -> Result<f64> {
        let psi = self.evolve(tau)?;
        Ok(expectation(&self.charger, &self.sector, &psi))
    }

    /// Infinite-time average of the stored energy; needs the dense spectrum.
    pub fn dephased_energy(&self) -> Result<f64> {
        let Propagator::Dense {
            energies,
            vectors,
            amplitudes,
        } = &self.propagator
        else {
            return Err(EdError::DenseLimit(self.battery.n_sites));
        };
        let dim = self.sector.dim();
        let mut total = 0.0;
        let mut n = 0;
        let mut projected = vec![0.0; dim];
        let mut buf = vec![0.0; dim];
        // Eigenvalues come unsorted; walk them in ascending order so that
        // degenerate levels are contiguous.
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]).then(a.cmp(&b)));
        while n < dim {
            let start = energies[order[n]];
            projected.iter_mut().for_each(|x| *x = 0.0);
            while n < dim && energies[order[n]] - start <= LEVEL_TOLERANCE {
                let col = order[n];
                let a = amplitudes[col];
                projected
                    .iter_mut()
                    .zip(vectors.column(col).iter())
                    .for_each(|(x, v)| *x += a * v);
                n += 1;
            }
            self.battery.apply(&self.sector, &projected, &mut buf);
            total += dot(&projected, &buf);
        }
        Ok(total - self.ground.energy)
    }
}

/// Stored energy after charging for `tau`, in units of `J` (not per dimer).
pub fn evolved_energy(
    pre: &ModelParams,
    post: &ModelParams,
    tau: f64,
    n_sites: usize,
) -> Result<f64> {
    QuenchDynamics::new(pre, post, n_sites)?.energy_at(tau)
}

/// Infinite-time average of the stored energy, `n_sites <= 10`.
pub fn dephased_energy(pre: &ModelParams, post: &ModelParams, n_sites: usize) -> Result<f64> {
    if n_sites > MAX_DENSE_SITES {
        return Err(EdError::DenseLimit(n_sites));
    }
    QuenchDynamics::new(pre, post, n_sites)?.dephased_energy()
}

/// Ground energies of both parity sectors.
#[derive(Debug, Clone, Copy)]
pub struct SectorDiagnostic {
    pub even: f64,
    pub odd: f64,
}

impl SectorDiagnostic {
    /// True when the odd sector holds the global ground state.
    pub fn odd_is_lower(&self) -> bool {
        self.odd < self.even - 1e-12
    }
}

pub fn sector_diagnostic(params: &ModelParams, n_sites: usize) -> Result<SectorDiagnostic> {
    let h = build_spin_hamiltonian(params, n_sites)?;
    let even = ground_state(&h, &ParitySector::new(n_sites, Parity::Even))?.energy;
    let odd = ground_state(&h, &ParitySector::new(n_sites, Parity::Odd))?.energy;
    Ok(SectorDiagnostic { even, odd })
}
