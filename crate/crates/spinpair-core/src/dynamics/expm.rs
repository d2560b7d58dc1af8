use nalgebra::linalg::Schur;
use num_complex::Complex64;

use crate::engine::{Generator, Mat16, Vec16};

/// Eigenvector matrices with a larger 1-norm condition number are not
/// trusted; propagation then falls back to scaling and squaring.
pub const EIGEN_CONDITION_LIMIT: f64 = 1e8;

// one per trajectory, so the unboxed eigen variant costs nothing
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone)]
enum Method {
    Eigen {
        values: [Complex64; 16],
        vectors: Mat16,
        inverse: Mat16,
    },
    Squaring,
}

/// `t -> exp(L t)` for a fixed 16x16 generator.
#[derive(Debug, Clone)]
pub struct Propagator {
    generator: Mat16,
    method: Method,
}

fn norm1(m: &Mat16) -> f64 {
    (0..16)
        .map(|j| (0..16).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

// Eigenvectors of an upper triangular matrix by back substitution. Nearly
// equal eigenvalues are separated by a tiny floor on the pivot; the
// resulting loss of independence shows up in the condition check.
fn triangular_eigenvectors(t: &Mat16) -> Mat16 {
    let floor = (f64::EPSILON * norm1(t)).max(f64::MIN_POSITIVE);
    let mut y = Mat16::zeros();
    for k in 0..16 {
        let lambda = t[(k, k)];
        y[(k, k)] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for m in j + 1..=k {
                s += t[(j, m)] * y[(m, k)];
            }
            let mut pivot = t[(j, j)] - lambda;
            if pivot.norm() < floor {
                pivot = Complex64::new(floor, 0.0);
            }
            y[(j, k)] = -s / pivot;
        }
        let norm = y.column(k).norm();
        y.column_mut(k).unscale_mut(norm);
    }
    y
}

impl Propagator {
    pub fn new(generator: &Generator) -> Self {
        Self::from_matrix(*generator.matrix())
    }

    pub fn from_matrix(generator: Mat16) -> Self {
        let method = Self::diagonalize(&generator).unwrap_or(Method::Squaring);
        Propagator { generator, method }
    }

    /// Always use scaling and squaring.
    pub fn squaring(generator: Mat16) -> Self {
        Propagator {
            generator,
            method: Method::Squaring,
        }
    }

    fn diagonalize(l: &Mat16) -> Option<Method> {
        if l.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return None;
        }
        let (q, t) = Schur::try_new(*l, f64::EPSILON, 10_000)?.unpack();
        let vectors = q * triangular_eigenvectors(&t);
        if vectors.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return None;
        }
        let inverse = vectors.try_inverse()?;
        let condition = norm1(&vectors) * norm1(&inverse);
        if !condition.is_finite() || condition > EIGEN_CONDITION_LIMIT {
            return None;
        }
        let values = std::array::from_fn(|k| t[(k, k)]);
        Some(Method::Eigen {
            values,
            vectors,
            inverse,
        })
    }

    pub fn generator(&self) -> &Mat16 {
        &self.generator
    }

    pub fn uses_eigendecomposition(&self) -> bool {
        matches!(self.method, Method::Eigen { .. })
    }

    pub fn exp(&self, t: f64) -> Mat16 {
        match &self.method {
            Method::Eigen {
                values,
                vectors,
                inverse,
            } => {
                let mut scaled = *vectors;
                for (k, lambda) in values.iter().enumerate() {
                    let f = (lambda * t).exp();
                    scaled.column_mut(k).iter_mut().for_each(|z| *z *= f);
                }
                scaled * inverse
            }
            Method::Squaring if t == 0.0 || self.generator.iter().all(|z| z.norm() == 0.0) => Mat16::identity(),
            Method::Squaring => (self.generator * Complex64::new(t, 0.0)).exp(),
        }
    }

    /// `exp(L t) v`.
    pub fn evolve(&self, v: &Vec16, t: f64) -> Vec16 {
        match &self.method {
            Method::Eigen {
                values,
                vectors,
                inverse,
            } => {
                let mut c = inverse * v;
                for (k, lambda) in values.iter().enumerate() {
                    c[k] *= (lambda * t).exp();
                }
                vectors * c
            }
            Method::Squaring => self.exp(t) * v,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &Mat16) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn sample_matrix() -> Mat16 {
        Mat16::from_fn(|i, j| {
            let x = (i * 16 + j) as f64;
            Complex64::new((0.37 * x).sin() * 0.3, (0.11 * x).cos() * 0.2)
                - if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
        })
    }

    #[test]
    fn eigen_and_squaring_agree() {
        let l = sample_matrix();
        let p = Propagator::from_matrix(l);
        assert!(p.uses_eigendecomposition());
        let s = Propagator::squaring(l);
        for t in [0.0, 0.3, 2.0] {
            assert!(max_abs(&(p.exp(t) - s.exp(t))) < 1e-10);
        }
    }

    #[test]
    fn defective_matrix_falls_back() {
        let mut l = Mat16::zeros();
        for k in 0..15 {
            l[(k, k + 1)] = Complex64::new(1.0, 0.0);
        }
        let p = Propagator::from_matrix(l);
        assert!(!p.uses_eigendecomposition());
        let e = p.exp(1.0);
        // exp of a nilpotent shift has 1/k! along the k-th superdiagonal
        assert!((e[(0, 3)].re - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn zero_generator() {
        let p = Propagator::from_matrix(Mat16::zeros());
        assert!(max_abs(&(p.exp(3.0) - Mat16::identity())) < 1e-15);
    }
}
