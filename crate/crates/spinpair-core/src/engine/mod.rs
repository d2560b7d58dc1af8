//! Ground-manifold rate generator for two driven atoms at arbitrary separation.
//!
//! Each atom has ground sublevels `down, up` and excited sublevels
//! `beta (m = -1/2), alpha (m = +1/2)`; the drive couples only `down -> alpha`.
//! The excited one-excitation amplitudes are eliminated quasistatically and
//! the ground density matrix obeys `d rho / dt = L rho` with `L` expressed in
//! units of the optical pumping rate.
//!
//! Ground pair states are ordered `(down down, down up, up down, up up)` with
//! index `2 * atom1 + atom2`; density entries are vectorised row-major as
//! `ket * 4 + bra`.

mod amplitude;
mod basis;
mod generator;
mod params;

use nalgebra::SMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::propagator::PropagatorError;

pub use amplitude::{
    build_amplitude_system, leading_order_eliminate, quasistatic_eliminate, AmplitudeSystem, ExcitedEliminationMap,
    CONDITION_LIMIT,
};
pub use basis::{
    coherence_expectation, excited_index, ground_index, one_atom_coherence, population_expectation, GroundDensity,
    Observable,
};
pub use generator::{assemble_generator, in_terms, out_terms, Generator};
pub use params::{DriveParams, GeneratorOptions, PairGeometry, Regime};

pub type Mat4 = SMatrix<Complex64, 4, 4>;
pub type Mat8 = SMatrix<Complex64, 8, 8>;
pub type Mat8x4 = SMatrix<Complex64, 8, 4>;
pub type Mat16 = SMatrix<Complex64, 16, 16>;
pub type Vec16 = SMatrix<Complex64, 16, 1>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid drive parameters: {0}")]
    InvalidDrive(String),
    #[error(
        "atoms at zero separation: the propagator is singular there, use the small-separation analytic results instead"
    )]
    CoincidentAtoms,
    #[error(transparent)]
    Geometry(#[from] PropagatorError),
    #[error("invalid ground density: {0}")]
    InvalidDensity(String),
    #[error("amplitude system is ill-conditioned (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },
}
