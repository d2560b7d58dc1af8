//! Closed-form results: single-atom optical pumping and the two-atom
//! solutions valid when the separation is much smaller than the wavelength.
//!
//! All functions take physical times and rates; [`PumpScale`] converts to
//! the dimensionless `gamma_op * t` used internally.
//!
//! In the coupled-basis quasistatic solution the amplitude `r_-1` is of
//! order `(chi/delta)^2` relative to the others and is returned as exactly
//! zero.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("coefficients must be non-negative with a^2 + b^2 = 1, got a = {a}, b = {b}")]
    NotNormalized { a: f64, b: f64 },
    #[error("pump scale needs gamma > 0 and a nonzero finite detuning")]
    InvalidScale,
}

/// Real amplitudes of a single-atom state `a|down> + b|up>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuperpositionCoeffs {
    a: f64,
    b: f64,
}

impl SuperpositionCoeffs {
    pub const NORM_TOLERANCE: f64 = 1e-12;

    pub fn new(a: f64, b: f64) -> Result<Self, AnalyticError> {
        let ok = a.is_finite()
            && b.is_finite()
            && a >= 0.0
            && b >= 0.0
            && (a * a + b * b - 1.0).abs() <= Self::NORM_TOLERANCE;
        if ok {
            Ok(SuperpositionCoeffs { a, b })
        } else {
            Err(AnalyticError::NotNormalized { a, b })
        }
    }

    pub fn down() -> Self {
        SuperpositionCoeffs { a: 1.0, b: 0.0 }
    }

    pub fn up() -> Self {
        SuperpositionCoeffs { a: 0.0, b: 1.0 }
    }

    /// `(|down> + |up>) / sqrt(2)`.
    pub fn balanced() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        SuperpositionCoeffs { a: s, b: s }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// Drive parameters reduced to the optical pumping rate `gamma chi^2 / delta^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpScale {
    gamma_op: f64,
    gamma: f64,
    chi: f64,
    delta: f64,
}

impl PumpScale {
    pub fn new(gamma: f64, chi: f64, delta: f64) -> Result<Self, AnalyticError> {
        if !(gamma.is_finite() && gamma > 0.0 && chi.is_finite() && delta.is_finite() && delta != 0.0) {
            return Err(AnalyticError::InvalidScale);
        }
        Ok(PumpScale {
            gamma_op: gamma * (chi / delta).powi(2),
            gamma,
            chi,
            delta,
        })
    }

    pub fn gamma_op(&self) -> f64 {
        self.gamma_op
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Dimensionless time `gamma_op * t`.
    pub fn tau(&self, t: f64) -> f64 {
        self.gamma_op * t
    }

    /// Whether `chi << delta` and `gamma << delta` hold comfortably.
    pub fn is_perturbative(&self) -> bool {
        (self.chi / self.delta).abs() < 0.3 && (self.gamma / self.delta).abs() < 0.1
    }
}

/// Single-atom rate equations over `(rho_upup, rho_downup, rho_downdown)`.
///
/// Entries are physical rates. The AC Stark phase `i chi^2 / delta` on the
/// coherence is added only when `include_stark` is set.
pub fn single_atom_generator(scale: &PumpScale, include_stark: bool) -> [[Complex64; 3]; 3] {
    let g = scale.gamma_op;
    let zero = Complex64::new(0.0, 0.0);
    let stark = if include_stark {
        Complex64::new(0.0, scale.chi * scale.chi / scale.delta)
    } else {
        zero
    };
    [
        [zero, zero, Complex64::new(2.0 * g / 3.0, 0.0)],
        [zero, Complex64::new(-g, 0.0) + stark, zero],
        [zero, zero, Complex64::new(-2.0 * g / 3.0, 0.0)],
    ]
}

/// Ground-manifold elements fed to [`single_atom_quasistatic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleAtomGround {
    pub down_down: f64,
    pub down_up: Complex64,
    pub up_up: f64,
}

/// Excited-manifold elements that follow the ground state adiabatically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleAtomExcited {
    pub alpha_alpha: f64,
    pub beta_beta: f64,
    pub alpha_beta: Complex64,
    pub alpha_up: Complex64,
    pub down_alpha: Complex64,
    pub alpha_down: Complex64,
}

/// Excited elements to first order in `gamma / delta`.
///
/// The driven amplitude is `b_alpha = (chi/delta + i gamma chi / delta^2) b_down`,
/// so `rho_{alpha,x} = b_alpha b_x^*` carries that factor and
/// `rho_{down,alpha}` its conjugate.
pub fn single_atom_quasistatic(scale: &PumpScale, ground: &SingleAtomGround) -> SingleAtomExcited {
    let (chi, delta, gamma) = (scale.chi, scale.delta, scale.gamma);
    let factor = Complex64::new(chi / delta, gamma * chi / (delta * delta));
    let alpha_down = factor * ground.down_down;
    SingleAtomExcited {
        alpha_alpha: (chi / delta).powi(2) * ground.down_down,
        beta_beta: 0.0,
        alpha_beta: Complex64::new(0.0, 0.0),
        alpha_up: factor * ground.down_up,
        down_alpha: alpha_down.conj(),
        alpha_down,
    }
}

/// Collective coherence of two independent atoms in the same state: `2ab e^{-gamma_op t}`.
pub fn independent_coherence(t: f64, coeffs: &SuperpositionCoeffs, scale: &PumpScale) -> f64 {
    2.0 * coeffs.a * coeffs.b * (-scale.tau(t)).exp()
}

/// Decay rate `-(dP/dt)/P` of [`independent_coherence`]; equal to `gamma_op`.
pub fn independent_coherence_rate(scale: &PumpScale) -> f64 {
    scale.gamma_op
}

/// Coupled-atom coherence at small separation:
/// `2ab e^{-2 tau} [-a^2 + (1 + a^2) e^{2 tau / 3}]`.
pub fn coupled_coherence_small_r(t: f64, coeffs: &SuperpositionCoeffs, scale: &PumpScale) -> f64 {
    let tau = scale.tau(t);
    let a2 = coeffs.a * coeffs.a;
    2.0 * coeffs.a * coeffs.b * (-2.0 * tau).exp() * (-a2 + (1.0 + a2) * (2.0 * tau / 3.0).exp())
}

/// Time derivative of [`coupled_coherence_small_r`].
pub fn coupled_coherence_small_r_derivative(t: f64, coeffs: &SuperpositionCoeffs, scale: &PumpScale) -> f64 {
    let tau = scale.tau(t);
    let a2 = coeffs.a * coeffs.a;
    let d_tau = 2.0
        * coeffs.a
        * coeffs.b
        * (2.0 * a2 * (-2.0 * tau).exp() - (4.0 / 3.0) * (1.0 + a2) * (-4.0 * tau / 3.0).exp());
    d_tau * scale.gamma_op
}

/// Population `<P_upup>` at small separation starting from `|down down>`.
pub fn coupled_population_small_r(t: f64, scale: &PumpScale) -> f64 {
    let tau = scale.tau(t);
    1.0 - (-4.0 * tau / 3.0).exp() * (3.0 + 2.0 * tau) / 3.0
}

/// Population `<P_upup>` of independent atoms starting from `|down down>`.
pub fn independent_population(t: f64, scale: &PumpScale) -> f64 {
    1.0 - (-2.0 * scale.tau(t) / 3.0).exp()
}

/// Up-state population of one independent atom starting in `a|down> + b|up>`.
pub fn independent_up_population(t: f64, coeffs: &SuperpositionCoeffs, scale: &PumpScale) -> f64 {
    let b2 = coeffs.b * coeffs.b;
    b2 + (1.0 - b2) * independent_population(t, scale)
}

/// Growth rate `(dP/dt)/P` of [`independent_population`].
pub fn independent_population_rate(t: f64, scale: &PumpScale) -> f64 {
    let e = (-2.0 * scale.tau(t) / 3.0).exp();
    scale.gamma_op * (2.0 / 3.0) * e / (1.0 - e)
}

/// Symmetric-basis amplitudes `(s_1, r_1, r_-1, s_-1)` following the
/// ground amplitudes `g_-1 = <down down|psi>` and `g_0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledAmplitudes {
    pub s1: Complex64,
    pub r1: Complex64,
    pub r_minus1: Complex64,
    pub s_minus1: Complex64,
}

pub fn coupled_basis_quasistatic(scale: &PumpScale, g_minus1: Complex64, g0: Complex64) -> CoupledAmplitudes {
    let i = Complex64::i();
    let (chi, delta, gamma) = (scale.chi, scale.delta, scale.gamma);
    let d53 = Complex64::new(5.0 * gamma / 3.0, delta);
    let s1 = i * 2f64.sqrt() * chi * d53 / (d53 * d53 - gamma * gamma / 9.0) * g_minus1;
    let r1 = i * chi / Complex64::new(4.0 * gamma / 3.0, delta) * g0;
    let zero = Complex64::new(0.0, 0.0);
    CoupledAmplitudes {
        s1,
        r1,
        r_minus1: zero,
        s_minus1: zero,
    }
}

/// Which z eigenstate atom 1 starts in for a polarization-swap run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZState {
    Up,
    Down,
}

/// Initial rates of the one-atom coherence when atom 1 starts in a z state
/// and atom 2 in `a|down> + b|up>`, at small separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapRates {
    pub out_rate: f64,
    pub in_rate: f64,
}

impl SwapRates {
    pub fn net(&self) -> f64 {
        self.out_rate + self.in_rate
    }
}

pub fn swap_rates_small_r(initial: ZState, coeffs: &SuperpositionCoeffs, scale: &PumpScale) -> SwapRates {
    let ab = coeffs.a * coeffs.b * scale.gamma_op;
    match initial {
        ZState::Up => SwapRates {
            out_rate: -ab / 3.0,
            in_rate: 0.0,
        },
        ZState::Down => SwapRates {
            out_rate: -ab / 3.0,
            in_rate: 2.0 * ab / 3.0,
        },
    }
}
