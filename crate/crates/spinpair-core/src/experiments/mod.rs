//! Figure presets, distance sweeps, polarization-swap runs, a plain-text
//! config format and deterministic CSV output.
//!
//! All times are in units of `1 / gamma_op` and all rates in units of
//! `gamma_op`.

mod config;
mod csv;
mod scenario;
mod swap;
mod sweep;

use thiserror::Error;

use crate::analytic::AnalyticError;
use crate::dynamics::DynamicsError;
use crate::engine::EngineError;

pub use config::{load_config, parse_config};
pub use csv::{format_value, CsvTable, CSV_VERSION};
pub use scenario::{
    run_scenario, Baseline, CurveRun, FigureId, GeometrySpec, InitialState, Orientation, Scenario, ScenarioRun,
    TimeGrid, SMALL_R_X,
};
pub use swap::{run_swap, SwapRun, SwapSlope, SwapSpec};
pub use sweep::{run_sweep, SweepPoint, SweepRun, SweepSpec};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("{}key `{key}`: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Config {
        line: Option<usize>,
        key: String,
        message: String,
    },
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ExperimentError {
    pub(crate) fn config(line: Option<usize>, key: &str, message: impl Into<String>) -> Self {
        ExperimentError::Config {
            line,
            key: key.to_string(),
            message: message.into(),
        }
    }

    /// True for errors in the user's input, false for failures of the
    /// numerics on valid input.
    pub fn is_config_error(&self) -> bool {
        match self {
            ExperimentError::Config { .. }
            | ExperimentError::Invalid(_)
            | ExperimentError::Analytic(_)
            | ExperimentError::Io { .. } => true,
            ExperimentError::Engine(e) => !matches!(e, EngineError::IllConditioned { .. }),
            ExperimentError::Dynamics(e) => matches!(e, DynamicsError::InvalidTimes(_)),
        }
    }
}

/// Anything the CLI can run.
#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Scenario(Scenario),
    Sweep(SweepSpec),
    Swap(SwapSpec),
}

impl Experiment {
    /// Runs the experiment and returns its CSV table.
    pub fn run(&self) -> Result<CsvTable, ExperimentError> {
        Ok(match self {
            Experiment::Scenario(s) => run_scenario(s)?.into_table(),
            Experiment::Sweep(s) => run_sweep(s)?.into_table(),
            Experiment::Swap(s) => run_swap(s)?.into_table(),
        })
    }

    /// Applies the level-shift switch to every separated geometry.
    pub fn with_im_shift(mut self, on: bool) -> Self {
        match &mut self {
            Experiment::Scenario(s) => s.options.include_im_shift = on,
            Experiment::Sweep(s) => s.options.include_im_shift = on,
            Experiment::Swap(s) => s.options.include_im_shift = on,
        }
        self
    }
}

impl FigureId {
    /// The built-in experiment that produces this figure's curves.
    pub fn preset(self) -> Experiment {
        match self {
            FigureId::Fig7 => Experiment::Sweep(SweepSpec::fig7()),
            FigureId::Fig10 => Experiment::Swap(SwapSpec::fig10()),
            FigureId::Fig11 => Experiment::Swap(SwapSpec::fig11()),
            other => Experiment::Scenario(Scenario::preset(other).expect("scenario figure")),
        }
    }
}
