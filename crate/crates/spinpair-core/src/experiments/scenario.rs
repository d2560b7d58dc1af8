use std::fmt;

use crate::analytic::{
    coupled_coherence_small_r, coupled_population_small_r, independent_coherence, independent_up_population,
    SuperpositionCoeffs,
};
use crate::dynamics::{propagate, Trajectory};
use crate::engine::{
    assemble_generator, DriveParams, Generator, GeneratorOptions, GroundDensity, Observable, PairGeometry, Regime,
};

use super::csv::CsvTable;
use super::ExperimentError;

/// Separation `k_L R` used in place of `R = 0`, where the propagator is singular.
pub const SMALL_R_X: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Fig11,
}

impl FigureId {
    pub const ALL: [FigureId; 9] = [
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig8,
        FigureId::Fig9,
        FigureId::Fig10,
        FigureId::Fig11,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8 => "fig8",
            FigureId::Fig9 => "fig9",
            FigureId::Fig10 => "fig10",
            FigureId::Fig11 => "fig11",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.tag() == s.trim())
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Direction of the separation relative to the drive wavevector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Parallel,
    Perpendicular,
}

impl Orientation {
    pub fn name(self) -> &'static str {
        match self {
            Orientation::Parallel => "parallel",
            Orientation::Perpendicular => "perpendicular",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "parallel" => Some(Orientation::Parallel),
            "perpendicular" => Some(Orientation::Perpendicular),
            _ => None,
        }
    }

    pub fn geometry(self, x: f64) -> Result<PairGeometry, ExperimentError> {
        Ok(match self {
            Orientation::Parallel => PairGeometry::parallel(x)?,
            Orientation::Perpendicular => PairGeometry::perpendicular(x)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometrySpec {
    /// `x = SMALL_R_X` across the drive axis with the level shift off.
    SmallR,
    Separated {
        x: f64,
        orientation: Orientation,
    },
}

impl GeometrySpec {
    pub fn separated(x: f64, orientation: Orientation) -> Result<Self, ExperimentError> {
        if !(x.is_finite() && x > 0.0) {
            return Err(ExperimentError::Invalid(format!(
                "separation must be positive and finite, got x = {x}; for coincident atoms use the small-r mode"
            )));
        }
        Ok(GeometrySpec::Separated { x, orientation })
    }

    pub fn geometry(&self) -> Result<PairGeometry, ExperimentError> {
        match *self {
            // Across the beam both atoms see the same drive phase, as they do at R = 0.
            GeometrySpec::SmallR => Orientation::Perpendicular.geometry(SMALL_R_X),
            GeometrySpec::Separated { x, orientation } => orientation.geometry(x),
        }
    }

    /// Generator options for this geometry; the small-r proxy never carries
    /// the level shift, which diverges as the separation goes to zero.
    pub fn options(&self, base: &GeneratorOptions) -> GeneratorOptions {
        match self {
            GeometrySpec::SmallR => GeneratorOptions {
                include_im_shift: false,
                ..*base
            },
            GeometrySpec::Separated { .. } => *base,
        }
    }

    pub fn is_small_r(&self) -> bool {
        matches!(self, GeometrySpec::SmallR)
    }

    pub fn label(&self) -> String {
        match self {
            GeometrySpec::SmallR => "small_r".to_string(),
            GeometrySpec::Separated { x, orientation } => format!("x{x}_{}", orientation.name()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GeometrySpec::SmallR => format!("x = {SMALL_R_X} perpendicular, level shift off"),
            GeometrySpec::Separated { x, orientation } => format!("x = {x} {}", orientation.name()),
        }
    }
}

/// Uniform grid `0, dt, ..., t_max` in units of `1 / gamma_op`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_max: f64,
    samples: usize,
}

impl TimeGrid {
    pub fn new(t_max: f64, samples: usize) -> Result<Self, ExperimentError> {
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(ExperimentError::Invalid(format!("t_max must be positive, got {t_max}")));
        }
        if samples < 2 {
            return Err(ExperimentError::Invalid(format!(
                "need at least 2 samples, got {samples}"
            )));
        }
        Ok(TimeGrid { t_max, samples })
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn times(&self) -> Vec<f64> {
        let n = (self.samples - 1) as f64;
        (0..self.samples).map(|k| self.t_max * k as f64 / n).collect()
    }
}

/// Product state `(a1|down> + b1|up>) (a2|down> + b2|up>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    pub atom1: SuperpositionCoeffs,
    pub atom2: SuperpositionCoeffs,
}

impl InitialState {
    pub fn both(c: SuperpositionCoeffs) -> Self {
        InitialState { atom1: c, atom2: c }
    }

    pub fn density(&self) -> GroundDensity {
        GroundDensity::product(&self.atom1, &self.atom2)
    }

    pub fn describe(&self) -> String {
        format!(
            "atom1 (a = {}, b = {}), atom2 (a = {}, b = {})",
            self.atom1.a(),
            self.atom1.b(),
            self.atom2.a(),
            self.atom2.b()
        )
    }
}

/// Reference curves computed from the closed-form results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    /// Two atoms with no vacuum coupling.
    Independent,
    /// Small-separation closed form; only emitted where it applies.
    SmallRClosedForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub initials: Vec<InitialState>,
    pub geometries: Vec<GeometrySpec>,
    pub times: TimeGrid,
    pub observables: Vec<Observable>,
    pub options: GeneratorOptions,
    pub drive: DriveParams,
    pub baselines: Vec<Baseline>,
    /// Free-form metadata lines copied into the CSV header.
    pub notes: Vec<(String, String)>,
}

fn grid(t_max: f64, samples: usize) -> TimeGrid {
    TimeGrid { t_max, samples }
}

pub(crate) fn imbalanced() -> (SuperpositionCoeffs, SuperpositionCoeffs) {
    let small = 0.1;
    let large = 99f64.sqrt() / 10.0;
    (
        SuperpositionCoeffs::new(small, large).expect("normalized"),
        SuperpositionCoeffs::new(large, small).expect("normalized"),
    )
}

fn both_orientations(x: f64) -> Vec<GeometrySpec> {
    vec![
        GeometrySpec::Separated {
            x,
            orientation: Orientation::Parallel,
        },
        GeometrySpec::Separated {
            x,
            orientation: Orientation::Perpendicular,
        },
    ]
}

impl Scenario {
    /// Scenario defaults shared by the presets and by config files.
    pub fn base(name: &str) -> Self {
        Scenario {
            name: name.to_string(),
            initials: vec![InitialState::both(SuperpositionCoeffs::balanced())],
            geometries: vec![GeometrySpec::SmallR],
            times: grid(5.0, 101),
            observables: vec![Observable::Coherence],
            options: GeneratorOptions::dissipative(),
            drive: DriveParams::desk_scale(),
            baselines: vec![Baseline::Independent],
            notes: Vec::new(),
        }
    }

    /// Built-in time-series scenario for a figure; `None` for the sweep figure.
    pub fn preset(id: FigureId) -> Option<Self> {
        let mut s = Scenario::base(id.tag());
        let down = InitialState::both(SuperpositionCoeffs::down());
        match id {
            FigureId::Fig3 => {
                s.baselines.push(Baseline::SmallRClosedForm);
            }
            FigureId::Fig4 => {
                let (lo, hi) = imbalanced();
                s.initials = vec![InitialState::both(lo), InitialState::both(hi)];
                s.baselines.push(Baseline::SmallRClosedForm);
            }
            FigureId::Fig5 => {
                s.initials = vec![down];
                s.times = grid(10.0, 201);
                s.observables = vec![Observable::Population];
                s.baselines.push(Baseline::SmallRClosedForm);
            }
            FigureId::Fig6 => {
                s.geometries = both_orientations(0.7);
            }
            FigureId::Fig7 => return None,
            FigureId::Fig8 => {
                let (lo, hi) = imbalanced();
                s.initials = vec![InitialState::both(lo), InitialState::both(hi)];
                s.geometries = both_orientations(1.0);
            }
            FigureId::Fig9 => {
                s.initials = vec![down];
                s.geometries = both_orientations(0.7);
                s.times = grid(10.0, 201);
                s.observables = vec![Observable::Population];
            }
            FigureId::Fig10 => return Some(super::SwapSpec::fig10().scenario()),
            FigureId::Fig11 => return Some(super::SwapSpec::fig11().scenario()),
        }
        Some(s)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.initials.is_empty() {
            return Err(ExperimentError::Invalid("no initial state".into()));
        }
        if self.geometries.is_empty() {
            return Err(ExperimentError::Invalid("no geometry".into()));
        }
        if self.observables.is_empty() {
            return Err(ExperimentError::Invalid("no observable".into()));
        }
        for g in &self.geometries {
            g.geometry()?;
        }
        Ok(())
    }

    fn curve_label(&self, geometry: usize, initial: usize) -> String {
        let g = self.geometries[geometry].label();
        if self.initials.len() > 1 {
            format!("{g}_i{}", initial + 1)
        } else {
            g
        }
    }
}

/// One propagated curve of a scenario.
#[derive(Debug, Clone)]
pub struct CurveRun {
    pub label: String,
    pub initial: InitialState,
    pub geometry: GeometrySpec,
    pub generator: Generator,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    curves: Vec<CurveRun>,
    table: CsvTable,
}

impl ScenarioRun {
    pub fn curves(&self) -> &[CurveRun] {
        &self.curves
    }

    pub fn curve(&self, label: &str) -> Option<&CurveRun> {
        self.curves.iter().find(|c| c.label == label)
    }

    pub fn table(&self) -> &CsvTable {
        &self.table
    }

    pub(crate) fn table_mut(&mut self) -> &mut CsvTable {
        &mut self.table
    }

    pub fn into_table(self) -> CsvTable {
        self.table
    }
}

fn independent_value(obs: Observable, init: &InitialState, t: f64, drive: &DriveParams) -> f64 {
    let scale = drive.scale();
    let t = t / scale.gamma_op();
    match obs {
        Observable::Coherence => {
            0.5 * (independent_coherence(t, &init.atom1, &scale) + independent_coherence(t, &init.atom2, &scale))
        }
        Observable::Population => {
            0.5 * (independent_up_population(t, &init.atom1, &scale)
                + independent_up_population(t, &init.atom2, &scale))
        }
        Observable::OneAtomCoherence => 0.5 * independent_coherence(t, &init.atom1, &scale),
    }
}

fn closed_form_value(obs: Observable, init: &InitialState, t: f64, drive: &DriveParams) -> Option<f64> {
    let scale = drive.scale();
    let t = t / scale.gamma_op();
    match obs {
        Observable::Coherence if init.atom1 == init.atom2 => Some(coupled_coherence_small_r(t, &init.atom1, &scale)),
        Observable::Population if *init == InitialState::both(SuperpositionCoeffs::down()) => {
            Some(coupled_population_small_r(t, &scale))
        }
        _ => None,
    }
}

pub(crate) fn base_metadata(table: &mut CsvTable, name: &str, drive: &DriveParams, options: &GeneratorOptions) {
    table.meta("scenario", name);
    table.meta("units", "times in 1/gamma_op, rates in gamma_op");
    table.meta(
        "drive",
        format!(
            "chi/delta = {}, gamma/delta = {}",
            drive.chi() / drive.delta(),
            drive.gamma() / drive.delta()
        ),
    );
    let on_off = |b: bool| if b { "on" } else { "off" };
    let regime = match options.regime {
        Regime::LeadingOrder => "leading-order",
        Regime::Exact => "exact",
    };
    table.meta(
        "options",
        format!(
            "im_shift = {}, stark = {}, regime = {regime}",
            on_off(options.include_im_shift),
            on_off(options.include_stark),
        ),
    );
}

/// Propagates every (geometry, initial state) pair and tabulates the
/// requested observables with their baselines.
pub fn run_scenario(s: &Scenario) -> Result<ScenarioRun, ExperimentError> {
    s.validate()?;
    let times = s.times.times();
    let mut curves = Vec::new();
    for (gi, spec) in s.geometries.iter().enumerate() {
        let geom = spec.geometry()?;
        let generator = assemble_generator(&s.drive, &geom, &spec.options(&s.options))?;
        for (ii, init) in s.initials.iter().enumerate() {
            let trajectory = propagate(&generator, &init.density(), &times)?;
            curves.push(CurveRun {
                label: s.curve_label(gi, ii),
                initial: *init,
                geometry: *spec,
                generator: generator.clone(),
                trajectory,
            });
        }
    }

    type Column = Box<dyn Fn(usize, f64) -> Option<f64>>;
    let mut names = vec!["t".to_string()];
    let mut cols: Vec<Column> = Vec::new();
    for &obs in &s.observables {
        for curve in &curves {
            let series = curve.trajectory.series(obs);
            if obs.is_complex() {
                names.push(format!("{}_{}_re", obs.name(), curve.label));
                names.push(format!("{}_{}_im", obs.name(), curve.label));
                let im = series.clone();
                cols.push(Box::new(move |k, _| Some(series[k].re)));
                cols.push(Box::new(move |k, _| Some(im[k].im)));
            } else {
                names.push(format!("{}_{}", obs.name(), curve.label));
                cols.push(Box::new(move |k, _| Some(series[k].re)));
            }
        }
        for (ii, init) in s.initials.iter().enumerate() {
            let suffix = if s.initials.len() > 1 {
                format!("_i{}", ii + 1)
            } else {
                String::new()
            };
            let drive = s.drive;
            let init = *init;
            if s.baselines.contains(&Baseline::Independent) {
                names.push(format!("{}_independent{suffix}", obs.name()));
                cols.push(Box::new(move |_, t| Some(independent_value(obs, &init, t, &drive))));
            }
            let small_r = s.geometries.iter().any(GeometrySpec::is_small_r);
            if small_r
                && s.baselines.contains(&Baseline::SmallRClosedForm)
                && closed_form_value(obs, &init, 0.0, &drive).is_some()
            {
                names.push(format!("{}_closed_form{suffix}", obs.name()));
                cols.push(Box::new(move |_, t| closed_form_value(obs, &init, t, &drive)));
            }
        }
    }

    let mut table = CsvTable::new(names);
    base_metadata(&mut table, &s.name, &s.drive, &s.options);
    for g in &s.geometries {
        table.meta(format!("geometry.{}", g.label()), g.describe());
    }
    for (ii, init) in s.initials.iter().enumerate() {
        table.meta(format!("initial.i{}", ii + 1), init.describe());
    }
    for (k, v) in &s.notes {
        table.meta(k.clone(), v.clone());
    }
    for (k, &t) in times.iter().enumerate() {
        let mut row = vec![Some(t)];
        row.extend(cols.iter().map(|c| c(k, t)));
        table.push_row(row);
    }
    Ok(ScenarioRun { curves, table })
}
