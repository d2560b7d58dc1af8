use std::f64::consts::FRAC_PI_2;

use crate::analytic::PumpScale;
use crate::propagator::{PropagatorMatrix, RadialPart, SphericalPoint};

use super::EngineError;

/// Physical drive and decay parameters.
///
/// `chi` is the Rabi frequency, `delta` the detuning, `gamma` the amplitude
/// decay rate (half the excited population decay rate) and `k_l` the drive
/// wavenumber, which also stands in for the atomic wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveParams {
    chi: f64,
    delta: f64,
    gamma: f64,
    k_l: f64,
}

impl DriveParams {
    pub fn new(chi: f64, delta: f64, gamma: f64, k_l: f64) -> Result<Self, EngineError> {
        if !(chi.is_finite() && delta.is_finite() && gamma.is_finite() && k_l.is_finite()) {
            return Err(EngineError::InvalidDrive("parameters must be finite".into()));
        }
        if gamma <= 0.0 {
            return Err(EngineError::InvalidDrive(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        if k_l <= 0.0 {
            return Err(EngineError::InvalidDrive(format!("k_L must be positive, got {k_l}")));
        }
        if delta == 0.0 {
            return Err(EngineError::InvalidDrive("detuning must be nonzero".into()));
        }
        Ok(DriveParams { chi, delta, gamma, k_l })
    }

    /// Drive with the given ratios to a unit detuning and unit wavenumber.
    pub fn from_ratios(chi_over_delta: f64, gamma_over_delta: f64) -> Result<Self, EngineError> {
        Self::new(chi_over_delta, 1.0, gamma_over_delta, 1.0)
    }

    /// `chi / delta = 0.1`, `gamma / delta = 1e-3`.
    pub fn desk_scale() -> Self {
        DriveParams {
            chi: 0.1,
            delta: 1.0,
            gamma: 1e-3,
            k_l: 1.0,
        }
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn k_l(&self) -> f64 {
        self.k_l
    }

    pub fn gamma_op(&self) -> f64 {
        self.gamma * (self.chi / self.delta).powi(2)
    }

    pub fn scale(&self) -> PumpScale {
        // Validated at construction, so this cannot fail.
        PumpScale::new(self.gamma, self.chi, self.delta).expect("validated drive parameters")
    }

    /// Warnings for parameters outside the weak-drive, far-detuned regime.
    pub fn advisories(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if self.chi.abs() >= self.delta.abs() {
            notes.push(format!(
                "|chi| = {} is not below |delta| = {}",
                self.chi.abs(),
                self.delta.abs()
            ));
        }
        if self.gamma >= 0.1 * self.delta.abs() {
            notes.push(format!(
                "gamma = {} is not small against |delta| = {}",
                self.gamma,
                self.delta.abs()
            ));
        }
        notes
    }
}

impl Default for DriveParams {
    fn default() -> Self {
        Self::desk_scale()
    }
}

/// Position of atom 2 relative to atom 1, with the drive propagating along z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry {
    point: SphericalPoint,
}

impl PairGeometry {
    /// `x = k_L R`, polar angle `theta` from the drive axis, azimuth `phi`.
    pub fn new(x: f64, theta: f64, phi: f64) -> Result<Self, EngineError> {
        if x == 0.0 {
            return Err(EngineError::CoincidentAtoms);
        }
        Ok(PairGeometry {
            point: SphericalPoint::new(x, theta, phi)?,
        })
    }

    pub fn from_distance(r: f64, theta: f64, phi: f64, k_l: f64) -> Result<Self, EngineError> {
        Self::new(k_l * r, theta, phi)
    }

    /// Separation along the drive wavevector.
    pub fn parallel(x: f64) -> Result<Self, EngineError> {
        Self::new(x, 0.0, 0.0)
    }

    /// Separation perpendicular to the drive wavevector.
    pub fn perpendicular(x: f64) -> Result<Self, EngineError> {
        Self::new(x, FRAC_PI_2, 0.0)
    }

    pub fn point(&self) -> &SphericalPoint {
        &self.point
    }

    pub fn x(&self) -> f64 {
        self.point.x()
    }

    /// Drive phase `k_L . R` picked up by atom 2.
    pub fn drive_phase(&self) -> f64 {
        self.point.x() * self.point.theta().cos()
    }

    pub fn propagator(&self, radial: RadialPart) -> PropagatorMatrix {
        PropagatorMatrix::with_radial(&self.point, radial)
    }

    /// Geometry seen after exchanging the atom labels.
    pub fn swapped(&self) -> Self {
        PairGeometry {
            point: self.point.inverted(),
        }
    }
}

/// How the excited amplitudes are eliminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Regime {
    /// Expansion to first order in `gamma / delta`; the generator is then a
    /// pure function of the geometry in units of `gamma_op`.
    #[default]
    LeadingOrder,
    /// Full solve of the quasistatic linear system at the given `gamma / delta`.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorOptions {
    /// Let `Im G` shift the collective excited levels in the amplitude solve.
    pub include_im_shift: bool,
    /// Keep the AC Stark phase `chi^2 / delta` on the ground coherences.
    pub include_stark: bool,
    pub regime: Regime,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        GeneratorOptions {
            include_im_shift: true,
            include_stark: false,
            regime: Regime::LeadingOrder,
        }
    }
}

impl GeneratorOptions {
    /// Defaults with the level shift switched off.
    pub fn dissipative() -> Self {
        GeneratorOptions {
            include_im_shift: false,
            ..Self::default()
        }
    }

    pub fn radial_part(&self) -> RadialPart {
        if self.include_im_shift {
            RadialPart::Full
        } else {
            RadialPart::Dissipative
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drive_validation() {
        assert!(DriveParams::new(0.1, 1.0, 0.0, 1.0).is_err());
        assert!(DriveParams::new(0.1, 1.0, 1e-3, -1.0).is_err());
        assert!(DriveParams::new(0.1, 0.0, 1e-3, 1.0).is_err());
        let d = DriveParams::desk_scale();
        assert!((d.gamma_op() - 1e-5).abs() < 1e-18);
        assert!(d.advisories().is_empty());
        let strong = DriveParams::new(2.0, 1.0, 1e-3, 1.0).unwrap();
        assert_eq!(strong.advisories().len(), 1);
    }

    #[test]
    fn geometry_rejects_contact() {
        assert_eq!(PairGeometry::parallel(0.0), Err(EngineError::CoincidentAtoms));
        assert!(PairGeometry::new(-1.0, 0.0, 0.0).is_err());
        let g = PairGeometry::from_distance(2.0, 0.0, 0.0, 0.5).unwrap();
        assert_eq!(g.x(), 1.0);
        assert!((g.drive_phase() - 1.0).abs() < 1e-15);
        assert!(PairGeometry::perpendicular(1.0).unwrap().drive_phase().abs() < 1e-15);
        assert!((g.swapped().drive_phase() + 1.0).abs() < 1e-15);
    }
}
