//! Quantitative acceptance checks, one line per criterion.
//!
//! Run with `cargo test -p spinpair-core --test acceptance`. The process
//! exits non-zero when any criterion fails.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::process::ExitCode;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use common::*;
use spinpair::analytic::ZState;
use spinpair::analytic::{coupled_coherence_small_r, coupled_population_small_r, SuperpositionCoeffs};
use spinpair::dynamics::{instantaneous_rate, propagate, runge_kutta, Propagator};
use spinpair::engine::{
    assemble_generator, DriveParams, Generator, GeneratorOptions, GroundDensity, Mat4, Observable, PairGeometry, Vec16,
};
use spinpair::experiments::{run_swap, run_sweep, FigureId, GeometrySpec, Orientation, SwapSpec, SweepSpec};
use spinpair::propagator::{PropagatorMatrix, SphericalPoint};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn gen(x: f64, theta: f64, phi: f64, options: GeneratorOptions) -> Generator {
    assemble_generator(
        &DriveParams::desk_scale(),
        &PairGeometry::new(x, theta, phi).unwrap(),
        &options,
    )
    .unwrap()
}

fn small_r() -> Generator {
    gen(1e-4, FRAC_PI_2, 0.0, GeneratorOptions::dissipative())
}

fn product(a: &SuperpositionCoeffs) -> GroundDensity {
    GroundDensity::product(a, a)
}

fn grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| t_max * k as f64 / n as f64).collect()
}

fn gamma_op() -> f64 {
    DriveParams::desk_scale().gamma_op()
}

fn re_g(x: f64, theta: f64, q: i8) -> Complex64 {
    PropagatorMatrix::evaluate(&SphericalPoint::new(x, theta, 0.0).unwrap()).get(q, q)
}

fn criterion_1() -> Outcome {
    let times = grid(3.0, 300);
    let traj = propagate(&small_r(), &product(&SuperpositionCoeffs::balanced()), &times).unwrap();
    let scale = DriveParams::desk_scale().scale();
    let mut worst: f64 = 0.0;
    for (t, z) in times.iter().zip(traj.series(Observable::Coherence)) {
        let want = coupled_coherence_small_r(t / gamma_op(), &SuperpositionCoeffs::balanced(), &scale);
        worst = worst.max((z.re - want).abs() / want.abs());
    }
    let spot = traj.state_at(1.0).unwrap();
    let spot = Observable::Coherence.evaluate(spot.matrix()).re;
    outcome(
        worst <= 1e-3 && (spot - 0.327758).abs() <= 5e-4,
        format!("max relative error {worst:.2e}, value at t = 1 is {spot:.6}"),
    )
}

fn criterion_2() -> Outcome {
    let times = grid(10.0, 200);
    let traj = propagate(&small_r(), &product(&SuperpositionCoeffs::down()), &times).unwrap();
    let scale = DriveParams::desk_scale().scale();
    let mut worst: f64 = 0.0;
    for (t, z) in times.iter().zip(traj.series(Observable::Population)) {
        worst = worst.max((z.re - coupled_population_small_r(t / gamma_op(), &scale)).abs());
    }
    let spot = traj.observables()[20].population;
    outcome(
        worst <= 1e-3 && (spot - 0.560672).abs() <= 5e-4,
        format!("max error {worst:.2e}, value at t = 1 is {spot:.6}"),
    )
}

fn criterion_3() -> Outcome {
    let times = grid(5.0, 100);
    let mut worst_c: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    for theta in [0.0, FRAC_PI_2] {
        let l = gen(1e3, theta, 0.0, GeneratorOptions::dissipative());
        let c = propagate(&l, &product(&SuperpositionCoeffs::balanced()), &times).unwrap();
        let p = propagate(&l, &product(&SuperpositionCoeffs::down()), &times).unwrap();
        for (k, t) in times.iter().enumerate() {
            worst_c = worst_c.max((c.observables()[k].coherence.re - (-t).exp()).abs());
            worst_p = worst_p.max((p.observables()[k].population - (1.0 - (-2.0 * t / 3.0).exp())).abs());
        }
    }
    outcome(
        worst_c <= 2e-3 && worst_p <= 2e-3,
        format!("coherence error {worst_c:.2e}, population error {worst_p:.2e}"),
    )
}

fn initial_rate(l: &Generator, a: f64) -> f64 {
    let coeffs = SuperpositionCoeffs::new(a, (1.0 - a * a).sqrt()).unwrap();
    let traj = propagate(l, &product(&coeffs), &[0.0]).unwrap();
    instantaneous_rate(&traj, Observable::Coherence, 0.0).unwrap()
}

fn criterion_4() -> Outcome {
    let l = small_r();
    let imbalanced = initial_rate(&l, 0.1);
    let want = 1.0 + (0.99 - 0.01) / 3.0;
    let balanced = initial_rate(&l, FRAC_1_SQRT_2);
    let e1 = (imbalanced / want - 1.0).abs();
    let e2 = (balanced - 1.0).abs();
    outcome(
        e1 <= 1e-3 && e2 <= 1e-6,
        format!(
            "imbalanced rate {imbalanced:.6} (relative error {e1:.2e}), balanced rate {balanced:.9} (error {e2:.2e})"
        ),
    )
}

fn criterion_5() -> Outcome {
    let p = symmetric_projection(small_r().matrix());
    // rows of the symmetric-sector equations, indices 0, 1, 2 for m = 1, 0, -1
    let mut want = [[[[Complex64::new(0.0, 0.0); 3]; 3]; 3]; 3];
    let w = |v: f64| Complex64::new(v, 0.0);
    want[0][1][0][1] = w(-4.0 / 3.0);
    want[0][1][1][2] = w(4.0 / 3.0);
    want[1][2][1][2] = w(-2.0);
    want[0][0][1][1] = w(4.0 / 3.0);
    want[1][1][2][2] = w(4.0 / 3.0);
    want[1][1][1][1] = w(-4.0 / 3.0);
    want[2][2][2][2] = w(-4.0 / 3.0);
    let rows = [(0, 1), (1, 2), (0, 0), (1, 1), (2, 2)];
    let mut worst: f64 = 0.0;
    for (i, j) in rows {
        for k in 0..3 {
            for l in 0..3 {
                worst = worst.max((p[i][j][k][l] - want[i][j][k][l]).norm());
            }
        }
    }
    outcome(
        worst <= 1e-10,
        format!("largest coefficient residual {worst:.2e} at x = 1e-4"),
    )
}

fn criterion_6() -> Outcome {
    let fig6 = FigureId::Fig6.preset().run().unwrap();
    let col = |t: &spinpair::experiments::CsvTable, n: &str| -> Vec<f64> {
        t.column(n).unwrap().into_iter().map(|v| v.unwrap()).collect()
    };
    let time = col(&fig6, "t");
    let par = col(&fig6, "coherence_x0.7_parallel_re");
    let perp = col(&fig6, "coherence_x0.7_perpendicular_re");
    let ind = col(&fig6, "coherence_independent");
    let ordered = (1..time.len())
        .filter(|&k| time[k] <= 3.0)
        .all(|k| par[k] < perp[k] && perp[k] < ind[k]);
    let fig9 = FigureId::Fig9.preset().run().unwrap();
    let base = col(&fig9, "population_independent");
    let crossings: Vec<usize> = ["parallel", "perpendicular"]
        .iter()
        .map(|o| {
            let p = col(&fig9, &format!("population_x0.7_{o}"));
            let d: Vec<f64> = p.iter().zip(&base).skip(1).map(|(a, b)| a - b).collect();
            d.windows(2).filter(|w| w[0].signum() != w[1].signum()).count()
        })
        .collect();
    outcome(
        ordered && crossings.iter().all(|&n| n == 1),
        format!("coherence ordered on (0, 3]: {ordered}, population crossings {crossings:?}"),
    )
}

fn criterion_7() -> Outcome {
    let spec = SweepSpec::new(
        1.0,
        10.0,
        25,
        vec![Orientation::Perpendicular],
        1.0,
        Observable::Coherence,
    )
    .unwrap();
    let run = run_sweep(&spec).unwrap();
    let mut worst: f64 = 0.0;
    for p in run.points() {
        let want = 1.0 + 0.21 * re_g(p.x, FRAC_PI_2, 0).re;
        worst = worst.max((p.rates[0].unwrap() / want - 1.0).abs());
    }
    outcome(worst <= 0.05, format!("worst relative deviation {:.2}%", 100.0 * worst))
}

/// Linear coefficient of a cubic least-squares fit.
fn linear_coefficient(t: &[f64], y: &[f64]) -> f64 {
    let a = DMatrix::from_fn(t.len(), 4, |i, j| t[i].powi(j as i32));
    let b = DVector::from_column_slice(y);
    let c = a.svd(true, true).solve(&b, 1e-14).unwrap();
    c[1]
}

fn criterion_8() -> Outcome {
    let times = grid(0.05, 50);
    let mut pass = true;
    let mut parts = Vec::new();
    for x in [0.7, 1.5] {
        let l = gen(x, 0.0, 0.0, GeneratorOptions::dissipative());
        let traj = propagate(&l, &product(&SuperpositionCoeffs::balanced()), &times).unwrap();
        let rates: Vec<f64> = times
            .iter()
            .map(|&t| instantaneous_rate(&traj, Observable::Coherence, t).unwrap())
            .collect();
        let slope = linear_coefficient(&times, &rates);
        // the run has the level shift off, so the reference uses the same propagator
        let g11 = PropagatorMatrix::dissipative(&SphericalPoint::new(x, 0.0, 0.0).unwrap()).get(1, 1);
        let want = (2.0 / 9.0) * (g11 * g11 * x.sin().powi(2)).re;
        let err = (slope / want - 1.0).abs();
        pass &= err <= 0.1;
        parts.push(format!("x = {x}: slope {slope:.4} vs {want:.4}"));
    }
    outcome(pass, parts.join(", "))
}

fn criterion_9() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (z, sign) in [(ZState::Up, -1.0), (ZState::Down, 1.0)] {
        let mut spec = match z {
            ZState::Up => SwapSpec::fig11(),
            ZState::Down => SwapSpec::fig10(),
        };
        spec.separations = vec![
            GeometrySpec::SmallR,
            GeometrySpec::separated(1.0, Orientation::Parallel).unwrap(),
            GeometrySpec::separated(2.0, Orientation::Parallel).unwrap(),
        ];
        let run = run_swap(&spec).unwrap();
        let s = run.slopes();
        let small = s[0].numeric;
        let want = sign / 6.0;
        pass &= (small - want).abs() <= 1e-3;
        for (slope, x) in [(s[1].numeric, 1.0f64), (s[2].numeric, 2.0f64)] {
            let reference = re_g(x, 0.0, 0).re * x.cos();
            pass &= slope.signum() == sign * reference.signum();
        }
        parts.push(format!(
            "{z:?}: small-r slope {small:.6} (want {want:.6}), x = 1 slope {:+.4}, x = 2 slope {:+.4}",
            s[1].numeric, s[2].numeric
        ));
    }
    outcome(pass, parts.join("; "))
}

fn exp_vs_rk(l: &Generator, rho: &GroundDensity, t_max: f64) -> f64 {
    let times = grid(t_max, 20);
    let v0 = rho.to_vector();
    let rk = runge_kutta::integrate(l.matrix(), &v0, &times, 1e-11).unwrap();
    let p = Propagator::new(l);
    times
        .iter()
        .zip(&rk)
        .map(|(t, v): (&f64, &Vec16)| (p.evolve(&v0, *t) - v).iter().map(|z| z.norm()).fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

fn criterion_10() -> Outcome {
    let mut r = rng(2024);
    let mut fails = Vec::new();

    let mut sym: f64 = 0.0;
    for _ in 0..500 {
        let (x, theta, phi) = random_point(&mut r, 1e-3, 1e3);
        let g = PropagatorMatrix::evaluate(&SphericalPoint::new(x, theta, phi).unwrap());
        let rel = |a: Complex64, b: Complex64| (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE);
        sym = sym
            .max(rel(g.get(-1, -1), g.get(1, 1)))
            .max(rel(g.get(0, -1), -g.get(1, 0)))
            .max(rel(g.get(0, 1), -g.get(-1, 0)));
    }
    if sym > 1e-12 {
        fails.push(format!("propagator symmetry {sym:.1e}"));
    }

    let mut near: f64 = 0.0;
    let mut far: f64 = 0.0;
    for theta in [0.0, 0.4, FRAC_PI_2, 2.5] {
        let g = PropagatorMatrix::evaluate(&SphericalPoint::new(1e-4, theta, 0.0).unwrap());
        for q in -1..=1 {
            for qp in -1..=1 {
                let want = if q == qp { 1.0 } else { 0.0 };
                near = near.max((g.get(q, qp).re - want).abs());
            }
        }
        far = far.max(PropagatorMatrix::evaluate(&SphericalPoint::new(1e3, theta, 1.0).unwrap()).max_abs());
    }
    if near > 1e-4 || far > 2e-3 {
        fails.push(format!("propagator limits near {near:.1e} far {far:.1e}"));
    }

    let mut trace: f64 = 0.0;
    let mut herm: f64 = 0.0;
    let mut closure: f64 = 0.0;
    let mut relabel: f64 = 0.0;
    for _ in 0..20 {
        let (x, theta, phi) = random_point(&mut r, 0.05, 20.0);
        for options in [GeneratorOptions::default(), GeneratorOptions::dissipative()] {
            let l = gen(x, theta, phi, options);
            closure = closure
                .max(leakage_into(l.matrix(), &coherence_set()))
                .max(leakage_into(l.matrix(), &population_set()));
            let swapped = assemble_generator(
                &DriveParams::desk_scale(),
                &PairGeometry::new(x, theta, phi).unwrap().swapped(),
                &options,
            )
            .unwrap();
            let rho = random_density(&mut r);
            let a = propagate(&l, &rho, &[0.0, 1.0]).unwrap();
            let b = propagate(&swapped, &rho.swap_atoms(), &[0.0, 1.0]).unwrap();
            for obs in [Observable::Coherence, Observable::Population] {
                relabel = relabel.max((a.series(obs)[1] - b.series(obs)[1]).norm());
            }
        }
        let l = gen(x, theta, phi, GeneratorOptions::default());
        for _ in 0..1000 {
            let d: Mat4 = l.apply(&random_density(&mut r));
            trace = trace.max(d.trace().norm());
            herm = herm.max((d - d.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    if trace > 1e-10 || herm > 1e-10 {
        fails.push(format!("trace {trace:.1e} hermiticity {herm:.1e}"));
    }
    if closure > 1e-12 {
        fails.push(format!("subset closure {closure:.1e}"));
    }
    if relabel > 1e-10 {
        fails.push(format!("relabelling {relabel:.1e}"));
    }

    let imbalanced = SuperpositionCoeffs::new(0.1, 99f64.sqrt() / 10.0).unwrap();
    let scenarios = [
        (small_r(), product(&SuperpositionCoeffs::balanced()), 3.0),
        (small_r(), product(&imbalanced), 5.0),
        (small_r(), product(&SuperpositionCoeffs::down()), 10.0),
        (
            gen(1e3, 0.0, 0.0, GeneratorOptions::dissipative()),
            product(&SuperpositionCoeffs::balanced()),
            5.0,
        ),
        (
            gen(0.7, 0.0, 0.0, GeneratorOptions::dissipative()),
            product(&SuperpositionCoeffs::balanced()),
            3.0,
        ),
        (
            gen(0.7, FRAC_PI_2, 0.0, GeneratorOptions::dissipative()),
            product(&SuperpositionCoeffs::down()),
            10.0,
        ),
        (
            gen(1.0, 0.0, 0.0, GeneratorOptions::dissipative()),
            GroundDensity::product(&SuperpositionCoeffs::up(), &SuperpositionCoeffs::balanced()),
            5.0,
        ),
        (
            gen(2.0, 0.0, 0.0, GeneratorOptions::dissipative()),
            GroundDensity::product(&SuperpositionCoeffs::down(), &SuperpositionCoeffs::balanced()),
            5.0,
        ),
    ];
    let rk = scenarios
        .iter()
        .map(|(l, rho, t)| exp_vs_rk(l, rho, *t))
        .fold(0.0, f64::max);
    if rk > 1e-7 {
        fails.push(format!("exp vs Runge-Kutta {rk:.1e}"));
    }

    let detail = format!(
        "symmetry {sym:.1e}, limits {near:.1e}/{far:.1e}, trace {trace:.1e}, hermiticity {herm:.1e}, closure {closure:.1e}, relabelling {relabel:.1e}, exp vs RK {rk:.1e}"
    );
    outcome(
        fails.is_empty(),
        if fails.is_empty() {
            detail
        } else {
            format!("{detail}; failing: {}", fails.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let criteria: [fn() -> Outcome; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let mut failed = 0;
    for (n, check) in criteria.iter().enumerate() {
        let o = check();
        println!(
            "criterion {}: {} ({})",
            n + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
