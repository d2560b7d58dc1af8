#![allow(dead_code)]

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use spinpair::angular::MagneticQN::{self, Down, Up};
use spinpair::engine::{ground_index, GroundDensity, Mat16, Mat4};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Random full-rank density matrix `A A^dagger / tr`.
pub fn random_density(rng: &mut StdRng) -> GroundDensity {
    let a = Mat4::from_fn(|_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = a * a.adjoint();
    let tr = m.trace();
    GroundDensity::from_matrix_unchecked(m / tr)
}

/// Random point with `x` log-uniform in `[lo, hi]`.
pub fn random_point(rng: &mut StdRng, lo: f64, hi: f64) -> (f64, f64, f64) {
    let x = (rng.gen_range(lo.ln()..hi.ln())).exp();
    let theta = rng.gen_range(0.0..std::f64::consts::PI);
    let phi = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
    (x, theta, phi)
}

pub fn vec_index(ket: (MagneticQN, MagneticQN), bra: (MagneticQN, MagneticQN)) -> usize {
    4 * ground_index(ket.0, ket.1) + ground_index(bra.0, bra.1)
}

/// The twelve density elements that carry the coherence decay.
pub fn coherence_set() -> Vec<usize> {
    let (dd, ud, du, uu) = ((Down, Down), (Up, Down), (Down, Up), (Up, Up));
    [
        (dd, dd),
        (ud, dd),
        (du, dd),
        (dd, ud),
        (dd, du),
        (uu, dd),
        (ud, ud),
        (ud, du),
        (du, du),
        (du, ud),
        (uu, ud),
        (uu, du),
    ]
    .iter()
    .map(|&(k, b)| vec_index(k, b))
    .collect()
}

/// The coherence set plus `rho_{uu,uu}`.
pub fn population_set() -> Vec<usize> {
    let mut s = coherence_set();
    s.push(vec_index((Up, Up), (Up, Up)));
    s
}

/// Largest `|L[i, j]|` with `i` in the set and `j` outside it.
pub fn leakage_into(l: &Mat16, set: &[usize]) -> f64 {
    let mut worst: f64 = 0.0;
    for &i in set {
        for j in (0..16).filter(|j| !set.contains(j)) {
            worst = worst.max(l[(i, j)].norm());
        }
    }
    worst
}

/// Symmetric ground states `g_1, g_0, g_-1` as columns of a 4x3 isometry,
/// returned as three 4-vectors.
pub fn symmetric_states() -> [[Complex64; 4]; 3] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut g = [[c(0.0, 0.0); 4]; 3];
    g[0][ground_index(Up, Up)] = c(1.0, 0.0);
    g[1][ground_index(Up, Down)] = c(s, 0.0);
    g[1][ground_index(Down, Up)] = c(s, 0.0);
    g[2][ground_index(Down, Down)] = c(1.0, 0.0);
    g
}

/// Generator restricted to the symmetric sector: entry `[(i, j), (k, l)]`
/// is the rate at which `rho_kl` feeds `rho_ij`, indices ordered `1, 0, -1`.
pub fn symmetric_projection(l: &Mat16) -> [[[[Complex64; 3]; 3]; 3]; 3] {
    let g = symmetric_states();
    let mut out = [[[[c(0.0, 0.0); 3]; 3]; 3]; 3];
    for k in 0..3 {
        for ll in 0..3 {
            // rho = |g_k><g_l|
            let v = spinpair::engine::Vec16::from_fn(|n, _| g[k][n / 4] * g[ll][n % 4].conj());
            let w = l * v;
            for i in 0..3 {
                for j in 0..3 {
                    let mut z = c(0.0, 0.0);
                    for a in 0..4 {
                        for b in 0..4 {
                            z += g[i][a].conj() * w[4 * a + b] * g[j][b];
                        }
                    }
                    out[i][j][k][ll] = z;
                }
            }
        }
    }
    out
}

pub fn max_abs16(m: &Mat16) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
