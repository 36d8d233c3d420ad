//! Exact free-fermion treatment of the dimerized XY chain in a transverse
//! field, used as a quantum battery charged by sudden quenches.
//!
//! The crate is `no_std` and only needs `alloc`. Module map:
//!
//! - [`params`], [`grid`], [`dispersion`]: model parameters, antiperiodic
//!   momentum grid, closed-form spectrum, gap and phase boundaries.
//! - [`scenario`]: quench lines through parameter space and their critical
//!   points.
//! - [`bdg`]: 4x4 Bogoliubov-de Gennes blocks, eigenmodes and overlaps.
//! - [`quench`]: stored energy after charging, finite time and asymptotic.

#![no_std]

extern crate alloc;

pub mod bdg;
pub mod dispersion;
pub mod error;
pub mod grid;
pub mod params;
pub mod quench;
pub mod scenario;
pub mod sum;

pub use bdg::{
    bdg_block, ground_state_projector, mode_decomposition, overlap_matrix, BdgBlock, CMatrix4,
    GroundProjector, ModeDecomposition, OverlapMatrix,
};
pub use dispersion::{
    boundary_residuals, dispersion, spectral_gap, structure_functions, Boundary, BoundaryResidual,
};
pub use error::{Error, Result};
pub use grid::{momentum_grid, MomentumGrid};
pub use params::{validate_params, ModelParams, COUPLING};
pub use quench::{
    stored_energy_asymptotic, stored_energy_curve, stored_energy_time_average,
    stored_energy_two_channel, sweep_point, sweep_scenario, EnergyCurve, SweepResult,
};
pub use scenario::{
    critical_points_on_segment, critical_points_with_step, scenario_params, CriticalPoint,
    QuenchScenario, ScenarioKind, Target,
};
