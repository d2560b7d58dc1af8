use std::fmt::Write as _;

use num_complex::Complex64;

use crate::angular::gamma_repop;
use crate::propagator::RadialPart;

use super::amplitude::{
    build_amplitude_system, channel_coupling, channels, drive_pattern, leading_order_eliminate, lowering_pairs,
    quasistatic_eliminate, ExcitedEliminationMap,
};
use super::basis::GroundDensity;
use super::params::{DriveParams, GeneratorOptions, PairGeometry, Regime};
use super::{EngineError, Mat16, Mat4, Mat8x4, Vec16};

/// Superoperator of `rho -> D rho + rho D^dagger` on row-major vectorised `rho`.
fn sandwich_superoperator(d: &Mat4) -> Mat16 {
    let mut l = Mat16::zeros();
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                l[(4 * i + j, 4 * k + j)] += d[(i, k)];
                l[(4 * i + j, 4 * i + k)] += d[(j, k)].conj();
            }
        }
    }
    l
}

fn anti_hermitian(d: &Mat4) -> Mat4 {
    (d - d.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Depletion of the ground states by the drive, in units of `gamma_op`.
///
/// With the leading-order map the depletion operator is `C M_1`, where
/// `C = -B^dagger` closes the loop back to the ground states and `M_1` is the
/// first-order map; it carries the cooperative decay and, through `Im G`, the
/// collective level shift. The AC Stark term `C M_0` is added only on request.
/// With the exact map, the anti-Hermitian part that the same solve produces
/// without `Im G` is removed instead when the Stark phase is off.
pub fn out_terms(
    map: &ExcitedEliminationMap,
    params: &DriveParams,
    geom: &PairGeometry,
    options: &GeneratorOptions,
) -> Result<Mat16, EngineError> {
    let b = drive_pattern(geom) * Complex64::new(0.0, params.chi());
    let c = -b.adjoint();
    let d = match map.regime() {
        Regime::LeadingOrder => {
            if options.include_stark {
                c * map.map()
            } else {
                c * map.correction()
            }
        }
        Regime::Exact => {
            let d = c * map.map();
            if options.include_stark {
                d
            } else if options.include_im_shift {
                let plain = quasistatic_eliminate(&build_amplitude_system(params, geom, false))?;
                d - anti_hermitian(&(c * plain.map()))
            } else {
                d - anti_hermitian(&d)
            }
        }
    };
    Ok(sandwich_superoperator(&d) / Complex64::new(params.gamma_op(), 0.0))
}

/// Spontaneous repopulation of the ground states, in units of `gamma_op`.
///
/// The excited-state density `M rho M^dagger` returns to the ground manifold
/// through single-atom decay (weighted by the repopulation tensor) and
/// through cross-atom exchange weighted by the dissipative part of `G`.
pub fn in_terms(map: &ExcitedEliminationMap, params: &DriveParams, geom: &PairGeometry) -> Mat16 {
    let m = map.excitation();
    let g = geom.propagator(RadialPart::Dissipative);
    let gamma = params.gamma();
    let chans = channels();
    // X_l = S_l M, the ground image of each channel's decay.
    let images: Vec<Mat4> = chans.iter().map(|ch| lowered(m, ch)).collect();

    let mut l = Mat16::zeros();
    for (ki, k) in chans.iter().enumerate() {
        for (li, lc) in chans.iter().enumerate() {
            let w = if k.atom == lc.atom {
                Complex64::new(gamma_repop(lc.ground, lc.excited, k.ground, k.excited, gamma), 0.0)
            } else {
                channel_coupling(k, lc, &g) * (2.0 * gamma)
            };
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (xl, xk) = (&images[li], &images[ki]);
            for i in 0..4 {
                for j in 0..4 {
                    for a in 0..4 {
                        if xl[(i, a)] == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for bb in 0..4 {
                            l[(4 * i + j, 4 * a + bb)] += w * xl[(i, a)] * xk[(j, bb)].conj();
                        }
                    }
                }
            }
        }
    }
    l / Complex64::new(params.gamma_op(), 0.0)
}

fn lowered(m: &Mat8x4, ch: &super::amplitude::Channel) -> Mat4 {
    let mut x = Mat4::zeros();
    for (e, g) in lowering_pairs(ch) {
        for col in 0..4 {
            x[(g, col)] += m[(e, col)];
        }
    }
    x
}

/// Rate generator `d rho / dt = L rho` in units of `gamma_op`.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    matrix: Mat16,
    options: GeneratorOptions,
    gamma_op: f64,
}

impl Generator {
    pub fn from_matrix(matrix: Mat16, options: GeneratorOptions, gamma_op: f64) -> Self {
        Generator {
            matrix,
            options,
            gamma_op,
        }
    }

    pub fn matrix(&self) -> &Mat16 {
        &self.matrix
    }

    pub fn options(&self) -> &GeneratorOptions {
        &self.options
    }

    /// Physical rate that sets the time unit.
    pub fn gamma_op(&self) -> f64 {
        self.gamma_op
    }

    pub fn apply_vector(&self, v: &Vec16) -> Vec16 {
        self.matrix * v
    }

    /// `L rho` as a 4x4 matrix.
    pub fn apply(&self, rho: &GroundDensity) -> Mat4 {
        let v = self.matrix * rho.to_vector();
        Mat4::from_fn(|i, j| v[4 * i + j])
    }

    /// One row per generator row, `re,im` pairs separated by spaces, in
    /// units of `gamma_op`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..16 {
            let row: Vec<String> = (0..16)
                .map(|j| {
                    let z = self.matrix[(i, j)];
                    format!("{:.16e},{:.16e}", z.re + 0.0, z.im + 0.0)
                })
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

/// Out-terms plus in-terms for the given drive, geometry and options.
pub fn assemble_generator(
    params: &DriveParams,
    geom: &PairGeometry,
    options: &GeneratorOptions,
) -> Result<Generator, EngineError> {
    let system = build_amplitude_system(params, geom, options.include_im_shift);
    let map = match options.regime {
        Regime::LeadingOrder => leading_order_eliminate(&system),
        Regime::Exact => quasistatic_eliminate(&system)?,
    };
    let matrix = out_terms(&map, params, geom, options)? + in_terms(&map, params, geom);
    Ok(Generator::from_matrix(matrix, *options, params.gamma_op()))
}
