//! Brute-force many-body oracle for the dimerized XY chain.
//!
//! Builds the spin Hamiltonian on a periodic ring of up to [`MAX_SITES`]
//! spins, restricts it to a spin-flip parity sector, and evaluates ground
//! states and sudden-quench dynamics without any free-fermion input.

pub mod error;
pub mod hamiltonian;
pub mod solver;

pub use error::{EdError, Result};
pub use hamiltonian::{build_spin_hamiltonian, Parity, ParitySector, SpinHamiltonian};
pub use solver::{
    dephased_energy, evolved_energy, ground_state, sector_diagnostic, GroundState, QuenchDynamics,
    SectorDiagnostic,
};

pub const MIN_SITES: usize = 4;
pub const MAX_SITES: usize = 14;
/// Largest ring diagonalized densely; larger rings use Krylov methods.
pub const MAX_DENSE_SITES: usize = 10;
