//! Vacuum-mediated exchange propagator between the Zeeman transitions of two
//! atoms separated by `R`, expressed through spherical Hankel functions of
//! the first kind and spherical harmonics of the separation direction.
//!
//! `G[q][q']` couples a photon of helicity `q` on one atom with helicity `q'`
//! on the other. Its real part modifies decay, its imaginary part shifts the
//! collective levels.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagatorError {
    #[error("radial argument must be positive and finite, got {0}")]
    NonPositiveArgument(f64),
    #[error("polar angle must lie in [0, pi], got {0}")]
    PolarAngle(f64),
    #[error("azimuthal angle must be finite, got {0}")]
    AzimuthalAngle(f64),
    #[error("spherical harmonic (l = {l}, m = {m}) is not supported")]
    UnsupportedHarmonic { l: u8, m: i8 },
    #[error("helicity index must be -1, 0 or 1, got {0}")]
    InvalidHelicity(i8),
}

/// Location of the second atom relative to the first, in units where the
/// radial coordinate is `x = k R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    x: f64,
    theta: f64,
    phi: f64,
}

impl SphericalPoint {
    /// `phi` is reduced into `[0, 2 pi)`.
    pub fn new(x: f64, theta: f64, phi: f64) -> Result<Self, PropagatorError> {
        if !(x.is_finite() && x > 0.0) {
            return Err(PropagatorError::NonPositiveArgument(x));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(PropagatorError::PolarAngle(theta));
        }
        if !phi.is_finite() {
            return Err(PropagatorError::AzimuthalAngle(phi));
        }
        let phi = phi.rem_euclid(2.0 * PI);
        Ok(SphericalPoint { x, theta, phi })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// The point reflected through the origin.
    pub fn inverted(&self) -> Self {
        SphericalPoint {
            x: self.x,
            theta: PI - self.theta,
            phi: (self.phi + PI).rem_euclid(2.0 * PI),
        }
    }
}

fn check_argument(x: f64) -> Result<(), PropagatorError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(PropagatorError::NonPositiveArgument(x))
    }
}

/// Below this argument `j2` is summed from its power series.
pub const J2_SERIES_CROSSOVER: f64 = 1e-2;

pub fn spherical_bessel_j0(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

pub fn spherical_bessel_j2(x: f64) -> f64 {
    if x.abs() < J2_SERIES_CROSSOVER {
        // x^2/15 * sum_k (-x^2/2)^k / (k! (2k+5)!! / 15)
        let y = -x * x / 2.0;
        let mut term = x * x / 15.0;
        let mut sum = term;
        for k in 1..8 {
            term *= y / (f64::from(k) * f64::from(2 * k + 5));
            sum += term;
        }
        sum
    } else {
        let (s, c) = x.sin_cos();
        (3.0 / x.powi(3) - 1.0 / x) * s - 3.0 * c / (x * x)
    }
}

pub fn spherical_neumann_y0(x: f64) -> f64 {
    -x.cos() / x
}

pub fn spherical_neumann_y2(x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    (-3.0 / x.powi(3) + 1.0 / x) * c - 3.0 * s / (x * x)
}

/// `h0(x) = j0(x) + i y0(x)`.
pub fn spherical_hankel_h0(x: f64) -> Result<Complex64, PropagatorError> {
    check_argument(x)?;
    Ok(Complex64::new(spherical_bessel_j0(x), spherical_neumann_y0(x)))
}

/// `h2(x) = j2(x) + i y2(x)`.
pub fn spherical_hankel_h2(x: f64) -> Result<Complex64, PropagatorError> {
    check_argument(x)?;
    Ok(Complex64::new(spherical_bessel_j2(x), spherical_neumann_y2(x)))
}

/// Orthonormal spherical harmonics with the Condon-Shortley phase, for the
/// pairs `(0, 0)` and `(2, -2..=2)`.
pub fn spherical_harmonic(l: u8, m: i8, theta: f64, phi: f64) -> Result<Complex64, PropagatorError> {
    let (st, ct) = theta.sin_cos();
    let phase = Complex64::from_polar(1.0, f64::from(m) * phi);
    let value = match (l, m) {
        (0, 0) => Complex64::new(0.5 / PI.sqrt(), 0.0),
        (2, 0) => Complex64::new(0.25 * (5.0 / PI).sqrt() * (3.0 * ct * ct - 1.0), 0.0),
        (2, 1) => phase * (-0.5 * (15.0 / (2.0 * PI)).sqrt() * st * ct),
        (2, -1) => phase * (0.5 * (15.0 / (2.0 * PI)).sqrt() * st * ct),
        (2, 2) | (2, -2) => phase * (0.25 * (15.0 / (2.0 * PI)).sqrt() * st * st),
        _ => return Err(PropagatorError::UnsupportedHarmonic { l, m }),
    };
    Ok(value)
}

/// Which radial functions enter the propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RadialPart {
    /// Hankel functions `h_l = j_l + i y_l`.
    #[default]
    Full,
    /// Bessel functions `j_l` only: the part of `G` responsible for
    /// cooperative decay, with the level-shift contribution removed.
    Dissipative,
}

/// The 3x3 propagator, indexed by helicities `q, q'` in `{-1, 0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorMatrix {
    entries: [[Complex64; 3]; 3],
}

fn slot(q: i8) -> Result<usize, PropagatorError> {
    match q {
        -1 => Ok(0),
        0 => Ok(1),
        1 => Ok(2),
        _ => Err(PropagatorError::InvalidHelicity(q)),
    }
}

impl PropagatorMatrix {
    pub fn evaluate(point: &SphericalPoint) -> Self {
        Self::with_radial(point, RadialPart::Full)
    }

    pub fn dissipative(point: &SphericalPoint) -> Self {
        Self::with_radial(point, RadialPart::Dissipative)
    }

    pub fn with_radial(point: &SphericalPoint, radial: RadialPart) -> Self {
        let x = point.x;
        let (h0, h2) = match radial {
            RadialPart::Full => (
                Complex64::new(spherical_bessel_j0(x), spherical_neumann_y0(x)),
                Complex64::new(spherical_bessel_j2(x), spherical_neumann_y2(x)),
            ),
            RadialPart::Dissipative => (
                Complex64::new(spherical_bessel_j0(x), 0.0),
                Complex64::new(spherical_bessel_j2(x), 0.0),
            ),
        };
        let (theta, phi) = (point.theta, point.phi);
        // The pairs below are all supported, so the lookups cannot fail.
        let y = |l: u8, m: i8| spherical_harmonic(l, m, theta, phi).unwrap_or_default();

        let monopole = (4.0 * PI).sqrt() * h0 * y(0, 0);
        let quad = (4.0 * PI / 5.0).sqrt() * h2 * y(2, 0);
        let g11 = monopole - 0.5 * quad;
        let g00 = monopole + quad;
        let g1m1 = -1.5 * (8.0 * PI / 15.0).sqrt() * h2 * y(2, -2);
        let gm11 = -1.5 * (8.0 * PI / 15.0).sqrt() * h2 * y(2, 2);
        let g10 = -1.5 * (4.0 * PI / 15.0).sqrt() * h2 * y(2, -1);
        let gm10 = -1.5 * (4.0 * PI / 15.0).sqrt() * h2 * y(2, 1);

        // Rows and columns ordered q = -1, 0, 1.
        let entries = [[g11, gm10, gm11], [-g10, g00, -gm10], [g1m1, g10, g11]];
        PropagatorMatrix { entries }
    }

    /// Entry `G[q][q']`. Panics on an invalid helicity; see [`PropagatorMatrix::try_get`].
    pub fn get(&self, q: i8, q_prime: i8) -> Complex64 {
        self.try_get(q, q_prime).expect("helicity must be -1, 0 or 1")
    }

    pub fn try_get(&self, q: i8, q_prime: i8) -> Result<Complex64, PropagatorError> {
        Ok(self.entries[slot(q)?][slot(q_prime)?])
    }

    /// Entries as a 3x3 array with rows and columns ordered `-1, 0, 1`.
    pub fn entries(&self) -> &[[Complex64; 3]; 3] {
        &self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Single entry `G[q][q']` at `point`.
pub fn propagator(q: i8, q_prime: i8, point: &SphericalPoint) -> Result<Complex64, PropagatorError> {
    slot(q)?;
    slot(q_prime)?;
    PropagatorMatrix::evaluate(point).try_get(q, q_prime)
}

pub fn propagator_matrix(point: &SphericalPoint) -> PropagatorMatrix {
    PropagatorMatrix::evaluate(point)
}
