//! Adaptive Dormand-Prince 5(4) integration of `dv/dt = L v`, kept as an
//! independent check on the matrix exponential.

use num_complex::Complex64;

use super::DynamicsError;
use crate::engine::{Mat16, Vec16};

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn step(l: &Mat16, v: &Vec16, h: f64) -> (Vec16, f64) {
    let mut k = [Vec16::zeros(); 7];
    k[0] = l * v;
    for s in 1..7 {
        let mut arg = *v;
        for (j, kj) in k.iter().enumerate().take(s) {
            if A[s][j] != 0.0 {
                arg += kj * Complex64::new(h * A[s][j], 0.0);
            }
        }
        k[s] = l * arg;
    }
    let mut high = *v;
    let mut err = Vec16::zeros();
    for s in 0..7 {
        high += k[s] * Complex64::new(h * B5[s], 0.0);
        err += k[s] * Complex64::new(h * (B5[s] - B4[s]), 0.0);
    }
    let scale = 1.0 + v.iter().chain(high.iter()).map(|z| z.norm()).fold(0.0, f64::max);
    let e = err.iter().map(|z| z.norm()).fold(0.0, f64::max) / scale;
    (high, e)
}

/// Values of `v(t)` at each requested time (sorted, non-negative), starting
/// from `v(0) = v0`, with local error per step below `tol` in a mixed
/// absolute/relative max norm.
pub fn integrate(l: &Mat16, v0: &Vec16, times: &[f64], tol: f64) -> Result<Vec<Vec16>, DynamicsError> {
    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    let mut v = *v0;
    let mut h = 1e-3;
    for (index, &target) in times.iter().enumerate() {
        if target < t {
            return Err(DynamicsError::InvalidTimes(
                "times must be sorted and non-negative".into(),
            ));
        }
        while t < target {
            let last = h >= target - t;
            let h_try = if last { target - t } else { h };
            let (next, err) = step(l, &v, h_try);
            if !err.is_finite() {
                return Err(DynamicsError::NonFinite { index });
            }
            if err <= tol {
                t = if last { target } else { t + h_try };
                v = next;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * (tol / err).powf(0.2)).clamp(0.2, 5.0)
            };
            h = h_try * factor;
            if h < 1e-14 * (1.0 + t) {
                return Err(DynamicsError::StepSizeUnderflow { t });
            }
        }
        out.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_decay() {
        let mut l = Mat16::zeros();
        for k in 0..16 {
            l[(k, k)] = Complex64::new(-(k as f64) / 4.0, 0.5);
        }
        let v0 = Vec16::from_element(Complex64::new(1.0, 0.0));
        let out = integrate(&l, &v0, &[0.0, 1.0, 3.0], 1e-12).unwrap();
        for (n, &t) in [0.0, 1.0, 3.0].iter().enumerate() {
            for (k, z) in out[n].iter().enumerate() {
                let want = (Complex64::new(-(k as f64) / 4.0, 0.5) * t).exp();
                assert!((z - want).norm() < 1e-9);
            }
        }
    }
}
