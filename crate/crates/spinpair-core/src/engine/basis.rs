use num_complex::Complex64;

use crate::analytic::SuperpositionCoeffs;
use crate::angular::MagneticQN;

use super::{EngineError, Mat4, Vec16};

/// Index of the ground pair state `|m1 m2>`.
pub fn ground_index(atom1: MagneticQN, atom2: MagneticQN) -> usize {
    2 * atom1.index() + atom2.index()
}

/// Index of the one-excitation state in which `atom` (0 or 1) is in the
/// excited sublevel `excited` and the other atom in the ground sublevel `other`.
///
/// Atom-1 excitations come first, ordered `(excited, other)`; atom-2
/// excitations follow, ordered `(other, excited)`.
pub fn excited_index(atom: usize, excited: MagneticQN, other: MagneticQN) -> usize {
    if atom == 0 {
        2 * excited.index() + other.index()
    } else {
        4 + 2 * other.index() + excited.index()
    }
}

/// Density matrix of the two-atom ground manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundDensity {
    matrix: Mat4,
}

impl GroundDensity {
    pub const TOLERANCE: f64 = 1e-10;

    /// Checks Hermiticity, unit trace and real diagonal entries in `[0, 1]`.
    pub fn from_matrix(matrix: Mat4) -> Result<Self, EngineError> {
        let rho = GroundDensity { matrix };
        rho.validate(Self::TOLERANCE)?;
        Ok(rho)
    }

    pub fn from_matrix_unchecked(matrix: Mat4) -> Self {
        GroundDensity { matrix }
    }

    pub fn from_vector_unchecked(v: &Vec16) -> Self {
        GroundDensity {
            matrix: Mat4::from_fn(|i, j| v[4 * i + j]),
        }
    }

    pub fn from_pure(psi: [Complex64; 4]) -> Result<Self, EngineError> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > Self::TOLERANCE {
            return Err(EngineError::InvalidDensity(format!("state norm is {norm}, expected 1")));
        }
        Ok(GroundDensity {
            matrix: Mat4::from_fn(|i, j| psi[i] * psi[j].conj()),
        })
    }

    /// Product of single-atom states `a_i|down> + b_i|up>`.
    pub fn product(atom1: &SuperpositionCoeffs, atom2: &SuperpositionCoeffs) -> Self {
        let one = [atom1.a(), atom1.b()];
        let two = [atom2.a(), atom2.b()];
        let psi: [f64; 4] = std::array::from_fn(|k| one[k / 2] * two[k % 2]);
        GroundDensity {
            matrix: Mat4::from_fn(|i, j| Complex64::new(psi[i] * psi[j], 0.0)),
        }
    }

    /// `|atom1 atom2>` as a pure state.
    pub fn basis_state(atom1: MagneticQN, atom2: MagneticQN) -> Self {
        let k = ground_index(atom1, atom2);
        let mut matrix = Mat4::zeros();
        matrix[(k, k)] = Complex64::new(1.0, 0.0);
        GroundDensity { matrix }
    }

    pub fn validate(&self, tol: f64) -> Result<(), EngineError> {
        let m = &self.matrix;
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(EngineError::InvalidDensity("non-finite entry".into()));
        }
        let defect = self.hermiticity_defect();
        if defect > tol {
            return Err(EngineError::InvalidDensity(format!(
                "not Hermitian (defect {defect:.3e})"
            )));
        }
        let trace = self.trace();
        if (trace.re - 1.0).abs() > tol || trace.im.abs() > tol {
            return Err(EngineError::InvalidDensity(format!("trace is {trace}, expected 1")));
        }
        for k in 0..4 {
            let d = m[(k, k)];
            if d.im.abs() > tol || d.re < -tol || d.re > 1.0 + tol {
                return Err(EngineError::InvalidDensity(format!("diagonal entry {k} is {d}")));
            }
        }
        Ok(())
    }

    pub fn get(&self, ket: usize, bra: usize) -> Complex64 {
        self.matrix[(ket, bra)]
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.matrix
    }

    /// Row-major vectorisation, entry `ket * 4 + bra`.
    pub fn to_vector(&self) -> Vec16 {
        Vec16::from_fn(|k, _| self.matrix[(k / 4, k % 4)])
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// The same state with atoms 1 and 2 relabelled.
    pub fn swap_atoms(&self) -> Self {
        let swap = |k: usize| 2 * (k % 2) + k / 2;
        GroundDensity {
            matrix: Mat4::from_fn(|i, j| self.matrix[(swap(i), swap(j))]),
        }
    }

    /// Single-atom reduced density matrix `[[down down, down up], [up down, up up]]`.
    pub fn reduced(&self, atom: usize) -> [[Complex64; 2]; 2] {
        let mut r = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                for o in 0..2 {
                    let (ket, bra) = if atom == 0 {
                        (2 * i + o, 2 * j + o)
                    } else {
                        (2 * o + i, 2 * o + j)
                    };
                    *cell += self.matrix[(ket, bra)];
                }
            }
        }
        r
    }
}

// Entries as (ket, bra) with ket/bra = ground_index.
const UU: usize = 3;
const UD: usize = 2;
const DU: usize = 1;
const DD: usize = 0;

fn collective_coherence(m: &Mat4) -> Complex64 {
    m[(UU, DU)] + m[(UD, DD)] + m[(UU, UD)] + m[(DU, DD)]
}

fn up_population(m: &Mat4) -> Complex64 {
    0.5 * (2.0 * m[(UU, UU)] + m[(UD, UD)] + m[(DU, DU)])
}

fn atom1_coherence(m: &Mat4) -> Complex64 {
    m[(UU, DU)] + m[(UD, DD)]
}

/// `<P_downup>`, the sum of both atoms' `|down><up|` expectation values.
pub fn coherence_expectation(rho: &GroundDensity) -> Complex64 {
    collective_coherence(&rho.matrix)
}

/// `<P_upup> = (2 rho_{uu,uu} + rho_{ud,ud} + rho_{du,du}) / 2`.
pub fn population_expectation(rho: &GroundDensity) -> f64 {
    up_population(&rho.matrix).re
}

/// `<sigma_-^(1)>`, the coherence carried by atom 1 alone.
pub fn one_atom_coherence(rho: &GroundDensity) -> Complex64 {
    atom1_coherence(&rho.matrix)
}

/// Linear observables of the ground density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    Coherence,
    Population,
    OneAtomCoherence,
}

impl Observable {
    pub const ALL: [Observable; 3] = [
        Observable::Coherence,
        Observable::Population,
        Observable::OneAtomCoherence,
    ];

    /// Applies the observable's linear functional to any 4x4 matrix, such as
    /// a time derivative `L rho`.
    pub fn evaluate(self, m: &Mat4) -> Complex64 {
        match self {
            Observable::Coherence => collective_coherence(m),
            Observable::Population => up_population(m),
            Observable::OneAtomCoherence => atom1_coherence(m),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Observable::Coherence => "coherence",
            Observable::Population => "population",
            Observable::OneAtomCoherence => "one_atom_coherence",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "coherence" => Some(Observable::Coherence),
            "population" => Some(Observable::Population),
            "one_atom_coherence" | "one-atom-coherence" => Some(Observable::OneAtomCoherence),
            _ => None,
        }
    }

    /// Whether the value can carry an imaginary part.
    pub fn is_complex(self) -> bool {
        !matches!(self, Observable::Population)
    }
}
