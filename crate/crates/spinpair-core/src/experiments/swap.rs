use crate::analytic::{swap_rates_small_r, SuperpositionCoeffs, ZState};
use crate::engine::{DriveParams, GeneratorOptions, Observable};

use super::csv::{format_value, CsvTable};
use super::scenario::{
    run_scenario, Baseline, GeometrySpec, InitialState, Orientation, Scenario, ScenarioRun, TimeGrid,
};
use super::ExperimentError;

/// Atom 1 starts in a z eigenstate, atom 2 in `a|down> + b|up>`; the
/// coherence that appears on atom 1 is followed at each separation.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapSpec {
    pub name: String,
    pub initial: ZState,
    pub atom2: SuperpositionCoeffs,
    pub separations: Vec<GeometrySpec>,
    pub times: TimeGrid,
    pub drive: DriveParams,
    pub options: GeneratorOptions,
}

impl SwapSpec {
    pub fn new(initial: ZState, atom2: SuperpositionCoeffs, separations: Vec<GeometrySpec>) -> Self {
        SwapSpec {
            name: "swap".to_string(),
            initial,
            atom2,
            separations,
            times: TimeGrid::new(5.0, 101).expect("valid grid"),
            drive: DriveParams::desk_scale(),
            options: GeneratorOptions::dissipative(),
        }
    }

    fn figure(name: &str, initial: ZState) -> Self {
        let parallel = |x| GeometrySpec::Separated {
            x,
            orientation: Orientation::Parallel,
        };
        SwapSpec {
            name: name.to_string(),
            ..Self::new(
                initial,
                SuperpositionCoeffs::balanced(),
                vec![GeometrySpec::SmallR, parallel(1.0), parallel(2.0)],
            )
        }
    }

    pub fn fig10() -> Self {
        Self::figure("fig10", ZState::Down)
    }

    pub fn fig11() -> Self {
        Self::figure("fig11", ZState::Up)
    }

    pub fn initial_state(&self) -> InitialState {
        let atom1 = match self.initial {
            ZState::Up => SuperpositionCoeffs::up(),
            ZState::Down => SuperpositionCoeffs::down(),
        };
        InitialState {
            atom1,
            atom2: self.atom2,
        }
    }

    pub fn scenario(&self) -> Scenario {
        let mut notes = Vec::new();
        if self.atom2 == SuperpositionCoeffs::balanced() {
            notes.push(("atom2".to_string(), "a = b = 1/sqrt(2) (default)".to_string()));
        }
        Scenario {
            name: self.name.clone(),
            initials: vec![self.initial_state()],
            geometries: self.separations.clone(),
            times: self.times,
            observables: vec![Observable::OneAtomCoherence],
            options: self.options,
            drive: self.drive,
            baselines: Vec::<Baseline>::new(),
            notes,
        }
    }
}

/// Initial slope of `Re <sigma_-^(1)>` in units of `gamma_op`, with the
/// small-separation closed form where it applies.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapSlope {
    pub label: String,
    pub numeric: f64,
    pub closed_form: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SwapRun {
    run: ScenarioRun,
    slopes: Vec<SwapSlope>,
}

impl SwapRun {
    pub fn scenario_run(&self) -> &ScenarioRun {
        &self.run
    }

    pub fn slopes(&self) -> &[SwapSlope] {
        &self.slopes
    }

    pub fn into_table(self) -> CsvTable {
        self.run.into_table()
    }
}

pub fn run_swap(spec: &SwapSpec) -> Result<SwapRun, ExperimentError> {
    let mut run = run_scenario(&spec.scenario())?;
    let scale = spec.drive.scale();
    let rho0 = spec.initial_state().density();
    let slopes: Vec<SwapSlope> = run
        .curves()
        .iter()
        .map(|c| SwapSlope {
            label: c.label.clone(),
            numeric: Observable::OneAtomCoherence.evaluate(&c.generator.apply(&rho0)).re,
            closed_form: c
                .geometry
                .is_small_r()
                .then(|| swap_rates_small_r(spec.initial, &spec.atom2, &scale).net() / scale.gamma_op()),
        })
        .collect();
    let z = match spec.initial {
        ZState::Up => "up",
        ZState::Down => "down",
    };
    let table = run.table_mut();
    table.meta("atom1", z);
    for s in &slopes {
        let closed = s.closed_form.map(format_value).unwrap_or_else(|| "n/a".into());
        table.meta(
            format!("initial_slope.{}", s.label),
            format!("numeric {}, closed form {closed}", format_value(s.numeric)),
        );
    }
    Ok(SwapRun { run, slopes })
}
