//! Clebsch-Gordan coefficients for a J = 1/2 ground level coupled to a
//! J = 1/2 excited level, and the repopulation tensor built from them.
//!
//! The four coefficients are kept as signed square roots of rationals so that
//! products of two of them (the only form in which they enter the generator)
//! are evaluated with a single square root.

use std::fmt;

/// Magnetic quantum number of a J = 1/2 sublevel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MagneticQN {
    /// m = -1/2
    Down,
    /// m = +1/2
    Up,
}

impl MagneticQN {
    pub const ALL: [MagneticQN; 2] = [MagneticQN::Down, MagneticQN::Up];

    pub fn value(self) -> f64 {
        f64::from(self.twice()) / 2.0
    }

    /// Twice the quantum number, so that it fits an integer.
    pub fn twice(self) -> i8 {
        match self {
            MagneticQN::Down => -1,
            MagneticQN::Up => 1,
        }
    }

    pub fn from_twice(twice_m: i8) -> Option<Self> {
        match twice_m {
            -1 => Some(MagneticQN::Down),
            1 => Some(MagneticQN::Up),
            _ => None,
        }
    }

    /// Position of the sublevel in the `(Down, Up)` ordering.
    pub fn index(self) -> usize {
        match self {
            MagneticQN::Down => 0,
            MagneticQN::Up => 1,
        }
    }
}

impl fmt::Display for MagneticQN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MagneticQN::Down => f.write_str("-1/2"),
            MagneticQN::Up => f.write_str("+1/2"),
        }
    }
}

/// Photon helicity `q = m' - m` carried away when the excited sublevel `m'`
/// decays to the ground sublevel `m`.
pub fn photon_q(ground: MagneticQN, excited: MagneticQN) -> i8 {
    (excited.twice() - ground.twice()) / 2
}

/// A number of the form `sign * sqrt(num / den)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SqrtRational {
    pub sign: i8,
    pub num: u32,
    pub den: u32,
}

impl SqrtRational {
    pub const fn new(sign: i8, num: u32, den: u32) -> Self {
        SqrtRational { sign, num, den }
    }

    pub fn value(self) -> f64 {
        f64::from(self.sign) * (f64::from(self.num) / f64::from(self.den)).sqrt()
    }

    /// The square as an exact fraction `(num, den)`.
    pub fn squared(self) -> (u32, u32) {
        (self.num, self.den)
    }

    /// Product of two coefficients, evaluated under one square root.
    pub fn product(self, other: SqrtRational) -> f64 {
        let sign = f64::from(self.sign * other.sign);
        let num = f64::from(self.num) * f64::from(other.num);
        let den = f64::from(self.den) * f64::from(other.den);
        sign * (num / den).sqrt()
    }
}

/// Coefficients indexed by (ground m, excited m').
///
/// Magnitudes follow the Condon-Shortley coupling of the ground spin with a
/// unit photon angular momentum. The excited `m' = -1/2` state carries an
/// extra phase of -1, which makes the symmetric-state coupling between
/// `(|a,down> + |down,a>)` and `(|b,up> + |up,b>)` come out as `-gamma/3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CGTable {
    entries: [[SqrtRational; 2]; 2],
}

impl CGTable {
    pub const fn standard() -> Self {
        CGTable {
            entries: [
                // ground m = -1/2: excited -1/2, +1/2
                [SqrtRational::new(1, 1, 3), SqrtRational::new(-1, 2, 3)],
                // ground m = +1/2
                [SqrtRational::new(-1, 2, 3), SqrtRational::new(1, 1, 3)],
            ],
        }
    }

    pub fn coeff(&self, ground: MagneticQN, excited: MagneticQN) -> SqrtRational {
        self.entries[ground.index()][excited.index()]
    }
}

impl Default for CGTable {
    fn default() -> Self {
        CGTable::standard()
    }
}

const TABLE: CGTable = CGTable::standard();

/// Signed coupling coefficient between ground sublevel `m` and excited sublevel `m_prime`.
pub fn cg(m: MagneticQN, m_prime: MagneticQN) -> f64 {
    TABLE.coeff(m, m_prime).value()
}

/// Exact form of [`cg`].
pub fn cg_exact(m: MagneticQN, m_prime: MagneticQN) -> SqrtRational {
    TABLE.coeff(m, m_prime)
}

/// Repopulation rate that transfers the excited-state element `rho_{a'b'}`
/// into the ground-state element `rho_{ab}`.
///
/// Nonzero only when both sides emit a photon of the same helicity.
pub fn gamma_repop(a: MagneticQN, a_prime: MagneticQN, b: MagneticQN, b_prime: MagneticQN, gamma: f64) -> f64 {
    if photon_q(a, a_prime) != photon_q(b, b_prime) {
        return 0.0;
    }
    2.0 * gamma * cg_exact(a, a_prime).product(cg_exact(b, b_prime))
}
