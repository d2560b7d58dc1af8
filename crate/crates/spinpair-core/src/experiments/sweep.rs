use rayon::prelude::*;

use crate::analytic::{independent_coherence_rate, independent_population_rate, SuperpositionCoeffs};
use crate::dynamics::{instantaneous_rate, propagate, DynamicsError};
use crate::engine::{assemble_generator, DriveParams, GeneratorOptions, Observable};

use super::csv::CsvTable;
use super::scenario::{base_metadata, InitialState, Orientation};
use super::ExperimentError;

/// Rate against separation at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub x_min: f64,
    pub x_max: f64,
    pub samples: usize,
    pub orientations: Vec<Orientation>,
    /// Evaluation time in units of `1 / gamma_op`.
    pub t_star: f64,
    pub observable: Observable,
    pub initial: InitialState,
    pub drive: DriveParams,
    pub options: GeneratorOptions,
}

impl SweepSpec {
    /// Coherence sweeps start from the balanced product state, population
    /// sweeps from `|down down>`.
    pub fn new(
        x_min: f64,
        x_max: f64,
        samples: usize,
        orientations: Vec<Orientation>,
        t_star: f64,
        observable: Observable,
    ) -> Result<Self, ExperimentError> {
        let initial = match observable {
            Observable::Population => InitialState::both(SuperpositionCoeffs::down()),
            _ => InitialState::both(SuperpositionCoeffs::balanced()),
        };
        let spec = SweepSpec {
            name: "sweep".to_string(),
            x_min,
            x_max,
            samples,
            orientations,
            t_star,
            observable,
            initial,
            drive: DriveParams::desk_scale(),
            options: GeneratorOptions::dissipative(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn fig7() -> Self {
        SweepSpec {
            name: "fig7".to_string(),
            ..Self::new(
                0.05,
                10.0,
                200,
                vec![Orientation::Parallel, Orientation::Perpendicular],
                1.0,
                Observable::Coherence,
            )
            .expect("valid preset")
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if !(self.x_min.is_finite() && self.x_max.is_finite() && 0.0 < self.x_min && self.x_min < self.x_max) {
            return Err(ExperimentError::Invalid(format!(
                "need 0 < x_min < x_max, got x_min = {}, x_max = {}",
                self.x_min, self.x_max
            )));
        }
        if self.samples < 2 {
            return Err(ExperimentError::Invalid(format!(
                "need at least 2 samples, got {}",
                self.samples
            )));
        }
        if !(self.t_star.is_finite() && self.t_star >= 0.0) {
            return Err(ExperimentError::Invalid(format!(
                "t_star must be non-negative, got {}",
                self.t_star
            )));
        }
        if self.orientations.is_empty() {
            return Err(ExperimentError::Invalid("no orientation".into()));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        let n = (self.samples - 1) as f64;
        (0..self.samples)
            .map(|k| self.x_min + (self.x_max - self.x_min) * k as f64 / n)
            .collect()
    }

    /// Independent-atom value of the reported rate.
    pub fn independent_rate(&self) -> f64 {
        let scale = self.drive.scale();
        match self.observable {
            Observable::Population => {
                independent_population_rate(self.t_star / scale.gamma_op(), &scale) / scale.gamma_op()
            }
            _ => independent_coherence_rate(&scale) / scale.gamma_op(),
        }
    }

    fn rate_at(&self, x: f64, orientation: Orientation) -> Result<Option<f64>, ExperimentError> {
        let geom = orientation.geometry(x)?;
        let generator = assemble_generator(&self.drive, &geom, &self.options)?;
        let times: Vec<f64> = if self.t_star > 0.0 {
            vec![0.0, self.t_star]
        } else {
            vec![0.0]
        };
        let traj = propagate(&generator, &self.initial.density(), &times)?;
        match instantaneous_rate(&traj, self.observable, self.t_star) {
            // Populations grow, so their rate is reported with the opposite sign.
            Ok(r) if self.observable == Observable::Population => Ok(Some(-r)),
            Ok(r) => Ok(Some(r)),
            Err(DynamicsError::RateUndefined { .. }) => Ok(None),
            Err(e) => Err(e.into()),
        }
    }
}

/// Rates at one separation, one entry per orientation; `None` where the
/// observable is too close to zero for a rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub x: f64,
    pub rates: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
pub struct SweepRun {
    points: Vec<SweepPoint>,
    table: CsvTable,
}

impl SweepRun {
    pub fn points(&self) -> &[SweepPoint] {
        &self.points
    }

    pub fn table(&self) -> &CsvTable {
        &self.table
    }

    pub fn into_table(self) -> CsvTable {
        self.table
    }
}

/// Evaluates the rate at every separation in parallel; rows keep input order.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepRun, ExperimentError> {
    spec.validate()?;
    let points = spec
        .xs()
        .into_par_iter()
        .map(|x| {
            let rates = spec
                .orientations
                .iter()
                .map(|&o| spec.rate_at(x, o))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(SweepPoint { x, rates })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;

    let mut names = vec!["x".to_string()];
    names.extend(spec.orientations.iter().map(|o| format!("rate_{}", o.name())));
    names.push("rate_independent".to_string());
    let mut table = CsvTable::new(names);
    base_metadata(&mut table, &spec.name, &spec.drive, &spec.options);
    table.meta("observable", spec.observable.name());
    table.meta("t_star", spec.t_star.to_string());
    table.meta("initial", spec.initial.describe());
    let baseline = spec.independent_rate();
    for p in &points {
        let mut row = vec![Some(p.x)];
        row.extend(p.rates.iter().copied());
        row.push(Some(baseline));
        table.push_row(row);
    }
    Ok(SweepRun { points, table })
}
