//! Plain-text experiment files.
//!
//! ```text
//! # coherence at small separation
//! [scenario]
//! id = fig3
//!
//! [geometry]
//! separation = small-r
//!
//! [initial]
//! a = sqrt(1/2)
//! b = sqrt(1/2)
//!
//! [time]
//! t_max = 5
//! samples = 101
//! ```
//!
//! One `key = value` per line; `#` starts a comment. Sections:
//!
//! - `[scenario]`: `id` (a figure tag such as `fig6`, whose preset fills in
//!   anything not given, or any other name), `observables` (comma list of
//!   `coherence`, `population`, `one_atom_coherence`).
//! - `[geometry]`, repeatable: `separation` (`small-r` or `k_L R`),
//!   `orientation` (`parallel` or `perpendicular`, required with a number).
//! - `[initial]`, repeatable: `a`, `b` for both atoms, optional
//!   `atom1 = up|down` to put atom 1 in a z eigenstate.
//! - `[time]`: `t_max` (units of `1 / gamma_op`), `samples`.
//! - `[drive]`: `chi_over_delta`, `gamma_over_delta`.
//! - `[options]`: `im_shift`, `stark` (`on`/`off`), `regime`
//!   (`leading-order`/`exact`).
//! - `[sweep]`: `x_min`, `x_max`, `samples`, `orientation` (or `both`),
//!   `t_star`, `observable`. Its presence makes the file a sweep.
//!
//! Numbers may be written as `p/q` or with `sqrt(...)` factors.

use std::collections::HashMap;
use std::path::Path;

use crate::analytic::SuperpositionCoeffs;
use crate::engine::{DriveParams, Observable, Regime};

use super::scenario::{FigureId, GeometrySpec, InitialState, Orientation, Scenario, TimeGrid};
use super::sweep::SweepSpec;
use super::{Experiment, ExperimentError};

const SECTIONS: [(&str, &[&str]); 7] = [
    ("scenario", &["id", "observables"]),
    ("geometry", &["separation", "orientation"]),
    ("initial", &["a", "b", "atom1"]),
    ("time", &["t_max", "samples"]),
    ("drive", &["chi_over_delta", "gamma_over_delta"]),
    ("options", &["im_shift", "stark", "regime"]),
    (
        "sweep",
        &["x_min", "x_max", "samples", "orientation", "t_star", "observable"],
    ),
];

const REPEATABLE: [&str; 2] = ["geometry", "initial"];

#[derive(Debug)]
struct Entry {
    line: usize,
    value: String,
}

#[derive(Debug)]
struct Section {
    line: usize,
    entries: HashMap<String, Entry>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn required(&self, key: &str) -> Result<&Entry, ExperimentError> {
        self.get(key)
            .ok_or_else(|| ExperimentError::config(Some(self.line), key, "missing required key"))
    }

    fn number(&self, key: &str) -> Result<Option<f64>, ExperimentError> {
        self.get(key)
            .map(|e| {
                parse_number(&e.value).ok_or_else(|| {
                    ExperimentError::config(Some(e.line), key, format!("malformed number `{}`", e.value))
                })
            })
            .transpose()
    }

    fn count(&self, key: &str) -> Result<Option<usize>, ExperimentError> {
        self.get(key)
            .map(|e| {
                e.value.parse::<usize>().map_err(|_| {
                    ExperimentError::config(Some(e.line), key, format!("expected a count, got `{}`", e.value))
                })
            })
            .transpose()
    }

    fn switch(&self, key: &str) -> Result<Option<bool>, ExperimentError> {
        self.get(key)
            .map(|e| match e.value.as_str() {
                "on" | "true" => Ok(true),
                "off" | "false" => Ok(false),
                other => Err(ExperimentError::config(
                    Some(e.line),
                    key,
                    format!("expected on or off, got `{other}`"),
                )),
            })
            .transpose()
    }
}

fn parse_factor(s: &str) -> Option<f64> {
    let s = s.trim();
    match s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
        Some(inner) => {
            let v = parse_number(inner)?;
            (v >= 0.0).then(|| v.sqrt())
        }
        None => s.parse().ok(),
    }
}

/// `v`, `sqrt(...)`, or a quotient of two such terms.
fn parse_number(s: &str) -> Option<f64> {
    let mut depth = 0i32;
    let mut split = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => split = Some(i),
            _ => {}
        }
    }
    let v = match split {
        Some(i) => parse_factor(&s[..i])? / parse_factor(&s[i + 1..])?,
        None => parse_factor(s)?,
    };
    v.is_finite().then_some(v)
}

fn parse_sections(text: &str) -> Result<HashMap<String, Vec<Section>>, ExperimentError> {
    let mut sections: HashMap<String, Vec<Section>> = HashMap::new();
    let mut current: Option<String> = None;
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let name = name.trim();
            if !SECTIONS.iter().any(|(s, _)| *s == name) {
                return Err(ExperimentError::config(Some(line), name, "unknown section"));
            }
            let list = sections.entry(name.to_string()).or_default();
            if !list.is_empty() && !REPEATABLE.contains(&name) {
                return Err(ExperimentError::config(Some(line), name, "section given twice"));
            }
            list.push(Section {
                line,
                entries: HashMap::new(),
            });
            current = Some(name.to_string());
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ExperimentError::config(Some(line), body, "expected `key = value`"));
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(section) = current.as_deref() else {
            return Err(ExperimentError::config(Some(line), key, "key outside of any section"));
        };
        let allowed = SECTIONS
            .iter()
            .find(|(s, _)| *s == section)
            .map(|(_, k)| *k)
            .unwrap_or(&[]);
        if !allowed.contains(&key) {
            return Err(ExperimentError::config(
                Some(line),
                key,
                format!("unknown key in [{section}]"),
            ));
        }
        let target = sections
            .get_mut(section)
            .and_then(|l| l.last_mut())
            .expect("section exists");
        if target.entries.contains_key(key) {
            return Err(ExperimentError::config(Some(line), key, "key given twice"));
        }
        target.entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        );
    }
    Ok(sections)
}

fn orientation(e: &Entry, key: &str) -> Result<Orientation, ExperimentError> {
    Orientation::parse(&e.value).ok_or_else(|| {
        ExperimentError::config(
            Some(e.line),
            key,
            format!("expected parallel or perpendicular, got `{}`", e.value),
        )
    })
}

fn observable(value: &str, line: usize, key: &str) -> Result<Observable, ExperimentError> {
    Observable::parse(value)
        .ok_or_else(|| ExperimentError::config(Some(line), key, format!("unknown observable `{value}`")))
}

fn geometry(sec: &Section) -> Result<GeometrySpec, ExperimentError> {
    let sep = sec.required("separation")?;
    if matches!(sep.value.as_str(), "small-r" | "small_r") {
        if let Some(o) = sec.get("orientation") {
            return Err(ExperimentError::config(
                Some(o.line),
                "orientation",
                "not used with separation = small-r",
            ));
        }
        return Ok(GeometrySpec::SmallR);
    }
    let x = sec.number("separation")?.expect("present");
    if x == 0.0 {
        return Err(ExperimentError::config(
            Some(sep.line),
            "separation",
            "x = 0 puts the atoms on top of each other where the propagator is singular; use `separation = small-r` for the small-separation closed-form regime",
        ));
    }
    if x.is_nan() || x < 0.0 {
        return Err(ExperimentError::config(
            Some(sep.line),
            "separation",
            format!("must be positive, got {x}"),
        ));
    }
    let o = orientation(sec.required("orientation")?, "orientation")?;
    GeometrySpec::separated(x, o)
}

fn initial(sec: &Section) -> Result<InitialState, ExperimentError> {
    let a = sec.number("a")?;
    let b = sec.number("b")?;
    let (Some(a), Some(b)) = (a, b) else {
        let missing = if a.is_none() { "a" } else { "b" };
        return Err(ExperimentError::config(Some(sec.line), missing, "missing required key"));
    };
    let b_line = sec.get("b").map(|e| e.line);
    let coeffs = SuperpositionCoeffs::new(a, b).map_err(|e| ExperimentError::config(b_line, "b", e.to_string()))?;
    let atom1 = match sec.get("atom1") {
        None => coeffs,
        Some(e) => match e.value.as_str() {
            "up" => SuperpositionCoeffs::up(),
            "down" => SuperpositionCoeffs::down(),
            other => {
                return Err(ExperimentError::config(
                    Some(e.line),
                    "atom1",
                    format!("expected up or down, got `{other}`"),
                ))
            }
        },
    };
    Ok(InitialState { atom1, atom2: coeffs })
}

fn apply_common(
    sections: &HashMap<String, Vec<Section>>,
    drive: &mut DriveParams,
    options: &mut crate::engine::GeneratorOptions,
) -> Result<(), ExperimentError> {
    if let Some(sec) = sections.get("drive").and_then(|l| l.first()) {
        let chi = sec.number("chi_over_delta")?.unwrap_or(drive.chi() / drive.delta());
        let gamma = sec.number("gamma_over_delta")?.unwrap_or(drive.gamma() / drive.delta());
        *drive = DriveParams::from_ratios(chi, gamma)
            .map_err(|e| ExperimentError::config(Some(sec.line), "gamma_over_delta", e.to_string()))?;
    }
    if let Some(sec) = sections.get("options").and_then(|l| l.first()) {
        if let Some(v) = sec.switch("im_shift")? {
            options.include_im_shift = v;
        }
        if let Some(v) = sec.switch("stark")? {
            options.include_stark = v;
        }
        if let Some(e) = sec.get("regime") {
            options.regime = match e.value.as_str() {
                "leading-order" | "leading_order" => Regime::LeadingOrder,
                "exact" => Regime::Exact,
                other => {
                    return Err(ExperimentError::config(
                        Some(e.line),
                        "regime",
                        format!("expected leading-order or exact, got `{other}`"),
                    ))
                }
            };
        }
    }
    Ok(())
}

fn build_sweep(sections: &HashMap<String, Vec<Section>>, sec: &Section) -> Result<SweepSpec, ExperimentError> {
    let mut spec = SweepSpec::fig7();
    spec.name = "sweep".to_string();
    if let Some(id) = sections
        .get("scenario")
        .and_then(|l| l.first())
        .and_then(|s| s.get("id"))
    {
        spec.name = id.value.clone();
    }
    spec.x_min = sec.number("x_min")?.unwrap_or(spec.x_min);
    spec.x_max = sec.number("x_max")?.unwrap_or(spec.x_max);
    spec.samples = sec.count("samples")?.unwrap_or(spec.samples);
    spec.t_star = sec.number("t_star")?.unwrap_or(spec.t_star);
    if let Some(e) = sec.get("orientation") {
        spec.orientations = if e.value == "both" {
            vec![Orientation::Parallel, Orientation::Perpendicular]
        } else {
            vec![orientation(e, "orientation")?]
        };
    }
    if let Some(e) = sec.get("observable") {
        let obs = observable(&e.value, e.line, "observable")?;
        let fresh = SweepSpec::new(
            spec.x_min,
            spec.x_max,
            spec.samples,
            spec.orientations.clone(),
            spec.t_star,
            obs,
        );
        spec.observable = obs;
        if let Ok(f) = fresh {
            spec.initial = f.initial;
        }
    }
    apply_common(sections, &mut spec.drive, &mut spec.options)?;
    spec.validate()
        .map_err(|e| ExperimentError::config(Some(sec.line), "sweep", e.to_string()))?;
    Ok(spec)
}

/// Parses a config file's text into a scenario or a sweep.
pub fn parse_config(text: &str) -> Result<Experiment, ExperimentError> {
    let sections = parse_sections(text)?;
    if let Some(sec) = sections.get("sweep").and_then(|l| l.first()) {
        return build_sweep(&sections, sec).map(Experiment::Sweep);
    }

    let head = sections.get("scenario").and_then(|l| l.first());
    let id = head.map(|h| h.required("id")).transpose()?;
    let figure = id.and_then(|e| FigureId::parse(&e.value));
    let mut s = match figure {
        Some(FigureId::Fig7) => {
            return Err(ExperimentError::config(
                id.map(|e| e.line),
                "id",
                "fig7 is a sweep; add a [sweep] section",
            ))
        }
        Some(f) => Scenario::preset(f).expect("scenario figure"),
        None => {
            let mut s = Scenario::base(id.map(|e| e.value.as_str()).unwrap_or("custom"));
            s.baselines.clear();
            for required in ["geometry", "initial", "time"] {
                if !sections.contains_key(required) {
                    return Err(ExperimentError::config(
                        None,
                        required,
                        "section required unless id names a built-in figure",
                    ));
                }
            }
            s
        }
    };

    if let Some(list) = sections.get("geometry") {
        s.geometries = list.iter().map(geometry).collect::<Result<_, _>>()?;
    }
    if let Some(list) = sections.get("initial") {
        s.initials = list.iter().map(initial).collect::<Result<_, _>>()?;
    }
    if let Some(sec) = sections.get("time").and_then(|l| l.first()) {
        let t_max = sec.number("t_max")?.unwrap_or(s.times.t_max());
        let samples = sec.count("samples")?.unwrap_or(s.times.samples());
        s.times = TimeGrid::new(t_max, samples)
            .map_err(|e| ExperimentError::config(Some(sec.line), "time", e.to_string()))?;
    }
    if let Some(e) = head.and_then(|h| h.get("observables")) {
        s.observables = e
            .value
            .split(',')
            .map(|v| observable(v, e.line, "observables"))
            .collect::<Result<_, _>>()?;
    }
    apply_common(&sections, &mut s.drive, &mut s.options)?;
    s.validate()?;
    Ok(Experiment::Scenario(s))
}

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<Experiment, ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}
