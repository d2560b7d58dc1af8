//! Exact propagation of `d rho / dt = L rho` for a constant generator, with
//! observables sampled on a time grid and instantaneous rates taken from the
//! generator action rather than finite differences.
//!
//! Times are in units of `1 / gamma_op`.

mod expm;
pub mod runge_kutta;

use num_complex::Complex64;
use thiserror::Error;

use crate::engine::{Generator, GroundDensity, Mat16, Mat4, Observable, Vec16};

pub use expm::{Propagator, EIGEN_CONDITION_LIMIT};

/// Below this magnitude an observable is treated as zero and no rate is reported.
pub const RATE_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("propagation produced non-finite values at time index {index}")]
    NonFinite { index: usize },
    #[error("invalid time grid: {0}")]
    InvalidTimes(String),
    #[error("time {t} lies outside the trajectory span [{start}, {end}]")]
    OutOfSpan { t: f64, start: f64, end: f64 },
    #[error("rate undefined near zero crossing: |observable| = {magnitude:.3e} at t = {t}")]
    RateUndefined { t: f64, magnitude: f64 },
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
}

/// Values of the three collective observables for one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRecord {
    pub coherence: Complex64,
    pub population: f64,
    pub one_atom_coherence: Complex64,
}

impl ObservableRecord {
    pub fn of(rho: &GroundDensity) -> Self {
        let m = rho.matrix();
        ObservableRecord {
            coherence: Observable::Coherence.evaluate(m),
            population: Observable::Population.evaluate(m).re,
            one_atom_coherence: Observable::OneAtomCoherence.evaluate(m),
        }
    }

    pub fn get(&self, observable: Observable) -> Complex64 {
        match observable {
            Observable::Coherence => self.coherence,
            Observable::Population => Complex64::new(self.population, 0.0),
            Observable::OneAtomCoherence => self.one_atom_coherence,
        }
    }
}

/// Sampled solution of the rate equations.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<GroundDensity>,
    observables: Vec<ObservableRecord>,
    propagator: Propagator,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[GroundDensity] {
        &self.states
    }

    pub fn observables(&self) -> &[ObservableRecord] {
        &self.observables
    }

    pub fn series(&self, observable: Observable) -> Vec<Complex64> {
        self.observables.iter().map(|r| r.get(observable)).collect()
    }

    pub fn generator(&self) -> &Mat16 {
        self.propagator.generator()
    }

    /// Exact state at any time inside the sampled span.
    pub fn state_at(&self, t: f64) -> Result<GroundDensity, DynamicsError> {
        let start = self.times[0];
        let end = *self.times.last().unwrap_or(&start);
        if !(t >= start && t <= end) {
            return Err(DynamicsError::OutOfSpan { t, start, end });
        }
        let k = self.times.partition_point(|&s| s <= t).saturating_sub(1);
        if self.times[k] == t {
            return Ok(self.states[k].clone());
        }
        let v = self.propagator.evolve(&self.states[k].to_vector(), t - self.times[k]);
        Ok(GroundDensity::from_vector_unchecked(&v))
    }
}

fn check_times(times: &[f64]) -> Result<(), DynamicsError> {
    if times.is_empty() {
        return Err(DynamicsError::InvalidTimes("no sample times".into()));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(DynamicsError::InvalidTimes(
            "times must be finite and non-negative".into(),
        ));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DynamicsError::InvalidTimes("times must be strictly increasing".into()));
    }
    Ok(())
}

fn is_finite(v: &Vec16) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `states[k] = exp(L t_k) rho0`.
pub fn propagate(generator: &Generator, rho0: &GroundDensity, times: &[f64]) -> Result<Trajectory, DynamicsError> {
    check_times(times)?;
    let propagator = Propagator::new(generator);
    let v0 = rho0.to_vector();
    let mut states = Vec::with_capacity(times.len());
    let mut observables = Vec::with_capacity(times.len());
    for (index, &t) in times.iter().enumerate() {
        let v = propagator.evolve(&v0, t);
        if !is_finite(&v) {
            return Err(DynamicsError::NonFinite { index });
        }
        let rho = GroundDensity::from_vector_unchecked(&v);
        observables.push(ObservableRecord::of(&rho));
        states.push(rho);
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        observables,
        propagator,
    })
}

/// `-Re[(dO/dt) / O]` at time `t`, i.e. the decay rate of `|O|`.
pub fn instantaneous_rate(traj: &Trajectory, observable: Observable, t: f64) -> Result<f64, DynamicsError> {
    let rho = traj.state_at(t)?;
    let value = observable.evaluate(rho.matrix());
    if value.norm() < RATE_THRESHOLD {
        return Err(DynamicsError::RateUndefined {
            t,
            magnitude: value.norm(),
        });
    }
    let dv = traj.generator() * rho.to_vector();
    let derivative = observable.evaluate(&Mat4::from_fn(|i, j| dv[4 * i + j]));
    Ok(-(derivative / value).re)
}
