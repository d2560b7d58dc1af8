use num_complex::Complex64;

use crate::angular::{cg_exact, photon_q, MagneticQN, SqrtRational};
use crate::propagator::{PropagatorMatrix, RadialPart};

use super::basis::{excited_index, ground_index};
use super::params::{DriveParams, PairGeometry, Regime};
use super::{EngineError, Mat8, Mat8x4};

/// Largest accepted 1-norm condition number of the amplitude matrix.
pub const CONDITION_LIMIT: f64 = 1e12;

/// One decay channel: `atom` falls from `excited` to `ground`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Channel {
    pub atom: usize,
    pub ground: MagneticQN,
    pub excited: MagneticQN,
    pub coeff: SqrtRational,
    pub q: i8,
}

pub(crate) fn channels() -> Vec<Channel> {
    let mut out = Vec::with_capacity(8);
    for atom in 0..2 {
        for excited in MagneticQN::ALL {
            for ground in MagneticQN::ALL {
                out.push(Channel {
                    atom,
                    ground,
                    excited,
                    coeff: cg_exact(ground, excited),
                    q: photon_q(ground, excited),
                });
            }
        }
    }
    out
}

/// Vacuum coupling between channel `k` (absorbing) and channel `l` (emitting).
pub(crate) fn channel_coupling(k: &Channel, l: &Channel, g: &PropagatorMatrix) -> Complex64 {
    let weight = k.coeff.product(l.coeff);
    if k.atom == l.atom {
        if k.q == l.q {
            Complex64::new(weight, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    } else {
        weight * g.get(k.q, l.q)
    }
}

/// `(excited index, ground index)` pairs linked by the lowering operator of a channel.
pub(crate) fn lowering_pairs(ch: &Channel) -> [(usize, usize); 2] {
    std::array::from_fn(|o| {
        let other = MagneticQN::ALL[o];
        let e = excited_index(ch.atom, ch.excited, other);
        let g = if ch.atom == 0 {
            ground_index(ch.ground, other)
        } else {
            ground_index(other, ch.ground)
        };
        (e, g)
    })
}

/// Drive operator from the ground pair states to the excited states, with
/// unit Rabi frequency and the spatial phase on atom 2.
pub(crate) fn drive_pattern(geom: &PairGeometry) -> Mat8x4 {
    let phases = [Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, geom.drive_phase())];
    let mut p = Mat8x4::zeros();
    for (atom, phase) in phases.iter().enumerate() {
        for other in MagneticQN::ALL {
            let e = excited_index(atom, MagneticQN::Up, other);
            let g = if atom == 0 {
                ground_index(MagneticQN::Down, other)
            } else {
                ground_index(other, MagneticQN::Down)
            };
            p[(e, g)] = *phase;
        }
    }
    p
}

/// Decay and exchange couplings among the 8 one-excitation states, in units of gamma.
pub(crate) fn exchange_matrix(g: &PropagatorMatrix) -> Mat8 {
    let chans = channels();
    let mut m = Mat8::zeros();
    for k in &chans {
        for l in &chans {
            let w = channel_coupling(k, l, g);
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            // sigma_k^dagger sigma_l: lower with l, raise with k, same spectator.
            for (el, gl) in lowering_pairs(l) {
                for (ek, gk) in lowering_pairs(k) {
                    if gk == gl {
                        m[(ek, el)] += w;
                    }
                }
            }
        }
    }
    m
}

/// Quasistatic amplitude equations `0 = A b_exc + B b_gnd`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSystem {
    exchange: Mat8,
    gamma: f64,
    delta: f64,
    drive: Mat8x4,
}

impl AmplitudeSystem {
    /// `A = -gamma K - i delta`, with `K` the exchange matrix.
    pub fn a(&self) -> Mat8 {
        -(self.exchange * Complex64::new(self.gamma, 0.0)) - Mat8::identity() * Complex64::new(0.0, self.delta)
    }

    /// `B = i chi P`, with `P` the spatially phased `down -> alpha` drive.
    pub fn b(&self) -> &Mat8x4 {
        &self.drive
    }

    /// Exchange matrix `K` in units of gamma; its diagonal self-decay is 1.
    pub fn exchange(&self) -> &Mat8 {
        &self.exchange
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Amplitude equations with `G` or, when `include_im_shift` is off, its dissipative part.
pub fn build_amplitude_system(params: &DriveParams, geom: &PairGeometry, include_im_shift: bool) -> AmplitudeSystem {
    let radial = if include_im_shift {
        RadialPart::Full
    } else {
        RadialPart::Dissipative
    };
    let g = geom.propagator(radial);
    AmplitudeSystem {
        exchange: exchange_matrix(&g),
        gamma: params.gamma(),
        delta: params.delta(),
        drive: drive_pattern(geom) * Complex64::new(0.0, params.chi()),
    }
}

/// Excited amplitudes as a linear function of the ground amplitudes.
///
/// For the exact solve `leading` holds the whole map and `correction` is
/// zero. In the leading-order expansion `leading` is the zeroth order term
/// `B / (i delta)` and `correction` the first order term in `gamma / delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitedEliminationMap {
    regime: Regime,
    leading: Mat8x4,
    correction: Mat8x4,
    residual: f64,
    condition: f64,
}

impl ExcitedEliminationMap {
    pub fn regime(&self) -> Regime {
        self.regime
    }

    /// The full map `b_exc = M b_gnd`.
    pub fn map(&self) -> Mat8x4 {
        self.leading + self.correction
    }

    /// Part of the map that populates the excited states.
    pub fn excitation(&self) -> &Mat8x4 {
        &self.leading
    }

    /// First order term of the expansion (zero for the exact solve).
    pub fn correction(&self) -> &Mat8x4 {
        &self.correction
    }

    /// Relative residual `|A M + B| / (|A| |M| + |B|)` in the max norm.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// 1-norm condition number of `A`.
    pub fn condition(&self) -> f64 {
        self.condition
    }
}

fn norm1<const R: usize, const C: usize>(m: &nalgebra::SMatrix<Complex64, R, C>) -> f64 {
    (0..C)
        .map(|j| (0..R).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn max_abs<const R: usize, const C: usize>(m: &nalgebra::SMatrix<Complex64, R, C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn relative_residual(a: &Mat8, b: &Mat8x4, map: &Mat8x4) -> f64 {
    let scale = max_abs(a) * max_abs(map) + max_abs(b);
    if scale == 0.0 {
        0.0
    } else {
        max_abs(&(a * map + b)) / scale
    }
}

/// Solves `A M = -B` by LU factorisation.
pub fn quasistatic_eliminate(system: &AmplitudeSystem) -> Result<ExcitedEliminationMap, EngineError> {
    let a = system.a();
    let inverse = a.try_inverse().ok_or(EngineError::IllConditioned {
        condition: f64::INFINITY,
    })?;
    let condition = norm1(&a) * norm1(&inverse);
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(EngineError::IllConditioned { condition });
    }
    let lu = a.lu();
    let map = -lu
        .solve(&system.drive)
        .ok_or(EngineError::IllConditioned { condition })?;
    Ok(ExcitedEliminationMap {
        regime: Regime::Exact,
        residual: relative_residual(&a, &system.drive, &map),
        leading: map,
        correction: Mat8x4::zeros(),
        condition,
    })
}

/// Expansion of the map to first order in `gamma / delta`.
pub fn leading_order_eliminate(system: &AmplitudeSystem) -> ExcitedEliminationMap {
    let inv_i_delta = Complex64::new(0.0, -1.0 / system.delta);
    let leading = system.drive * inv_i_delta;
    let correction = -(system.exchange * leading) * (inv_i_delta * system.gamma);
    let a = system.a();
    let map = leading + correction;
    ExcitedEliminationMap {
        regime: Regime::LeadingOrder,
        residual: relative_residual(&a, &system.drive, &map),
        leading,
        correction,
        condition: f64::NAN,
    }
}
