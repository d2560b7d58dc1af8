//! `spinpair`: CSV curves for two driven atoms coupled through the vacuum.
//!
//! Exit status is 0 on success, 2 for invalid input and 3 when the numerics
//! fail on valid input.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use spinpair::analytic::{SuperpositionCoeffs, ZState};
use spinpair::engine::{assemble_generator, DriveParams, GeneratorOptions, Observable, PairGeometry, Regime};
use spinpair::experiments::{
    format_value, load_config, Experiment, ExperimentError, FigureId, GeometrySpec, Orientation, SwapSpec, SweepSpec,
    TimeGrid, CSV_VERSION,
};
use spinpair::propagator::{PropagatorMatrix, SphericalPoint};

#[derive(Parser, Debug)]
#[command(
    name = "spinpair",
    version,
    about = "Cooperative decoherence and optical pumping of two driven atoms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Switch {
    On,
    Off,
}

impl Switch {
    fn on(self) -> bool {
        matches!(self, Switch::On)
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrientationArg {
    Parallel,
    Perpendicular,
    Both,
}

impl OrientationArg {
    fn list(self) -> Vec<Orientation> {
        match self {
            OrientationArg::Parallel => vec![Orientation::Parallel],
            OrientationArg::Perpendicular => vec![Orientation::Perpendicular],
            OrientationArg::Both => vec![Orientation::Parallel, Orientation::Perpendicular],
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ObservableArg {
    Coherence,
    Population,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ZArg {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RegimeArg {
    LeadingOrder,
    Exact,
}

#[derive(clap::Args, Debug)]
struct Output {
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Level shift from the reactive part of the propagator.
    #[arg(long, value_enum)]
    im_shift: Option<Switch>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Curves for one of the built-in figures (fig3 .. fig11).
    Figure {
        id: String,
        #[command(flatten)]
        output: Output,
    },
    /// Rate against separation at a fixed time.
    Sweep {
        #[arg(long)]
        x_min: f64,
        #[arg(long)]
        x_max: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, value_enum, default_value = "both")]
        orientation: OrientationArg,
        /// Evaluation time in units of 1/gamma_op.
        #[arg(long, default_value_t = 1.0)]
        t_star: f64,
        #[arg(long, value_enum, default_value = "coherence")]
        observable: ObservableArg,
        #[command(flatten)]
        output: Output,
    },
    /// Coherence induced on a z-polarized atom 1 by its neighbour.
    Swap {
        #[arg(long, value_enum)]
        initial: ZArg,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        /// Comma-separated separations k_L R; `small-r` selects the small-separation proxy.
        #[arg(long, value_delimiter = ',', default_value = "small-r,1,2")]
        x: Vec<String>,
        #[arg(long, value_enum, default_value = "parallel")]
        orientation: OrientationArg,
        #[arg(long, default_value_t = 5.0)]
        t_max: f64,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Tabulate the 3x3 exchange propagator, or dump the rate generator.
    Propagator {
        #[arg(long)]
        x: f64,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        /// Print the 16x16 generator for this geometry instead, one row per
        /// line as `re,im` pairs in units of gamma_op.
        #[arg(long)]
        generator: bool,
        #[arg(long, value_enum, default_value = "off")]
        im_shift: Switch,
        #[arg(long, value_enum, default_value = "leading-order")]
        regime: RegimeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment described by a config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

fn bad_input(key: &str, message: impl Into<String>) -> ExperimentError {
    ExperimentError::Config {
        line: None,
        key: key.to_string(),
        message: message.into(),
    }
}

fn parse_separation(s: &str, orientation: Orientation) -> Result<GeometrySpec, ExperimentError> {
    let s = s.trim();
    if matches!(s, "small-r" | "small_r") {
        return Ok(GeometrySpec::SmallR);
    }
    let x: f64 = s
        .parse()
        .map_err(|_| bad_input("x", format!("malformed separation `{s}`")))?;
    if x == 0.0 {
        return Err(bad_input(
            "x",
            "x = 0 puts the atoms on top of each other; pass `small-r` for the small-separation closed-form regime",
        ));
    }
    GeometrySpec::separated(x, orientation)
}

fn experiment(command: &Command) -> Result<Experiment, ExperimentError> {
    Ok(match command {
        Command::Figure { id, .. } => FigureId::parse(id)
            .ok_or_else(|| bad_input("id", format!("unknown figure `{id}`, expected fig3 .. fig11")))?
            .preset(),
        Command::Sweep {
            x_min,
            x_max,
            samples,
            orientation,
            t_star,
            observable,
            ..
        } => {
            let obs = match observable {
                ObservableArg::Coherence => Observable::Coherence,
                ObservableArg::Population => Observable::Population,
            };
            Experiment::Sweep(SweepSpec::new(
                *x_min,
                *x_max,
                *samples,
                orientation.list(),
                *t_star,
                obs,
            )?)
        }
        Command::Swap {
            initial,
            a,
            b,
            x,
            orientation,
            t_max,
            samples,
            ..
        } => {
            let o = match orientation {
                OrientationArg::Parallel => Orientation::Parallel,
                OrientationArg::Perpendicular => Orientation::Perpendicular,
                OrientationArg::Both => return Err(bad_input("orientation", "swap runs take a single orientation")),
            };
            let z = match initial {
                ZArg::Up => ZState::Up,
                ZArg::Down => ZState::Down,
            };
            let separations = x
                .iter()
                .map(|s| parse_separation(s, o))
                .collect::<Result<Vec<_>, _>>()?;
            let mut spec = SwapSpec::new(z, SuperpositionCoeffs::new(*a, *b)?, separations);
            spec.times = TimeGrid::new(*t_max, *samples)?;
            Experiment::Swap(spec)
        }
        Command::Run { config, .. } => load_config(config)?,
        Command::Propagator { .. } => unreachable!("handled separately"),
    })
}

fn propagator_text(x: f64, theta: f64, phi: f64) -> Result<String, ExperimentError> {
    let point = SphericalPoint::new(x, theta, phi).map_err(|e| bad_input("x", e.to_string()))?;
    let g = PropagatorMatrix::evaluate(&point);
    let mut out = String::new();
    let _ = writeln!(out, "# {CSV_VERSION}");
    let _ = writeln!(out, "# geometry = x = {x}, theta = {theta}, phi = {phi}");
    let _ = writeln!(out, "q,q',re,im");
    for q in -1i8..=1 {
        for qp in -1i8..=1 {
            let z = g.get(q, qp);
            let _ = writeln!(out, "{q},{qp},{},{}", format_value(z.re), format_value(z.im));
        }
    }
    Ok(out)
}

fn generator_text(x: f64, theta: f64, phi: f64, im_shift: bool, regime: Regime) -> Result<String, ExperimentError> {
    let geom = PairGeometry::new(x, theta, phi)?;
    let options = GeneratorOptions {
        include_im_shift: im_shift,
        include_stark: false,
        regime,
    };
    Ok(assemble_generator(&DriveParams::desk_scale(), &geom, &options)?.to_text())
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), ExperimentError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| ExperimentError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<(), ExperimentError> {
    if let Command::Propagator {
        x,
        theta,
        phi,
        generator,
        im_shift,
        regime,
        out,
    } = &cli.command
    {
        let regime = match regime {
            RegimeArg::LeadingOrder => Regime::LeadingOrder,
            RegimeArg::Exact => Regime::Exact,
        };
        let text = if *generator {
            generator_text(*x, *theta, *phi, im_shift.on(), regime)?
        } else {
            propagator_text(*x, *theta, *phi)?
        };
        return emit(&text, out.as_ref());
    }
    let output = match &cli.command {
        Command::Figure { output, .. }
        | Command::Sweep { output, .. }
        | Command::Swap { output, .. }
        | Command::Run { output, .. } => output,
        Command::Propagator { .. } => unreachable!(),
    };
    let mut exp = experiment(&cli.command)?;
    if let Some(s) = output.im_shift {
        exp = exp.with_im_shift(s.on());
    }
    emit(&exp.run()?.render(), output.out.as_ref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}
