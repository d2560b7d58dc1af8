//! Cooperative decoherence, optical pumping and polarization swap of two
//! laser-driven four-level atoms coupled through the vacuum field.
//!
//! - [`angular`]: coupling coefficients and the repopulation tensor.
//! - [`propagator`]: the dipole-dipole exchange propagator `G`.
//! - [`analytic`]: closed-form single-atom and small-separation results.
//! - [`engine`]: the 16-dimensional ground-manifold rate generator.
//! - [`dynamics`]: exact propagation and rate extraction.
//! - [`experiments`]: figure presets, sweeps, swap runs, config and CSV.

pub mod analytic;
pub mod angular;
pub mod dynamics;
pub mod engine;
pub mod experiments;
pub mod propagator;
