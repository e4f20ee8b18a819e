//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the transform or moment code under test.

#![allow(dead_code)]

use std::f64::consts::PI;

use barron_gauge::{chi_eval, profile_eval, ActivationPower};
use num_complex::Complex64;

/// Spot grid for the transform oracle.
pub const SPOT_XI: [f64; 4] = [0.0, 1.0, 5.0, 20.0];
pub const SPOT_S: [u32; 4] = [0, 1, 2, 3];
pub const SPOT_B: [f64; 5] = [-3.0, -0.5, 0.0, 0.5, 3.0];

/// `S(R)` for the triangular hat, from the sine and cosine integrals at
/// 40 digits.
pub const S_REFERENCE: [(f64, f64); 8] = [
    (1.0, 0.462_311_444_105_324_2),
    (2.0, 1.110_724_252_058_650_3),
    (10.0, 2.800_934_505_104_520_7),
    (1e2, 4.296_154_260_440_49),
    (1e3, 5.763_917_304_219_569),
    (1e4, 7.230_907_486_153_461),
    (1e5, 8.696_816_300_143_356),
    (1e6, 10.162_693_677_943_58),
];

/// `(1/2π)∫χ = 3/(2π)`: χ is 1 on `[-1, 1]` and point-symmetric about 1/2
/// on each transition band.
pub const DC_S0_B3: f64 = 0.477_464_829_275_686;
/// `(1/2π)∫_0^2 z χ(z) dz` by 30-digit adaptive quadrature.
pub const DC_S1_B0: f64 = 0.181_191_433_871_075_16;

/// Trapezoid rule with `n` uniform intervals on `[-2, 2]`. A jump landing on
/// a node takes the mean of its one-sided values.
pub fn trapezoid_ft(s: u32, b: f64, xi: f64, n: usize) -> Complex64 {
    let h = 4.0 / n as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..=n {
        let z = -2.0 + 4.0 * i as f64 / n as f64;
        let mut f = profile_eval(ActivationPower(s), b, z);
        if s == 0 && z + b == 0.0 {
            f = 0.5 * chi_eval(z);
        }
        let w = if i == 0 || i == n { 0.5 * h } else { h };
        sum += Complex64::from_polar(w * f, -xi * z);
    }
    sum / (2.0 * PI)
}

fn simpson_weights(n: usize, step: f64) -> impl Iterator<Item = f64> {
    (0..=n).map(move |j| {
        let c = if j == 0 || j == n {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        c * step / 3.0
    })
}

/// `∫_ℝ (1+|v|)^p |ĥ(v)| dv` for `h = χ(z) max(z+b, 0)` with `|b| < 1` and
/// `0 < p < 1`.
///
/// `ĥ` is Simpson's rule in `y = z + b` on `[0, 2+b]`. The moment is Simpson
/// in `u = ln(1+v)` up to `v_max`, plus the tail of the leading kink term
/// `|ĥ| ≈ 1/(2π v²)`; the next term is smaller by `v^{-2}`.
pub fn dense_moment_oracle(b: f64, p: f64, v_max: f64) -> f64 {
    assert!(b.abs() < 1.0 && p > 0.0 && p < 1.0);
    let nz = 100_000;
    let len = 2.0 + b;
    let dz = len / nz as f64;
    let samples: Vec<(f64, f64)> = simpson_weights(nz, dz)
        .enumerate()
        .map(|(j, w)| {
            let y = j as f64 * dz;
            (y, w * y * chi_eval(y - b))
        })
        .collect();
    let spectrum = |v: f64| -> f64 {
        let rot = Complex64::from_polar(1.0, -v * dz);
        let mut phase = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for (j, (y, f)) in samples.iter().enumerate() {
            if j % 1024 == 0 {
                phase = Complex64::from_polar(1.0, -v * y);
            }
            sum += phase * f;
            phase *= rot;
        }
        sum.norm() / (2.0 * PI)
    };

    let nu = 4000;
    let umax = v_max.ln_1p();
    let du = umax / nu as f64;
    let body: f64 = simpson_weights(nu, du)
        .enumerate()
        .map(|(k, w)| {
            let v = (k as f64 * du).exp_m1();
            w * (1.0 + v).powf(p + 1.0) * spectrum(v)
        })
        .sum();

    // ∫_V^∞ (1+v)^p v^{-2} dv with v = 1/t and t = w^{1/(1-p)}.
    let nw = 2000;
    let wmax = (1.0 / v_max).powf(1.0 - p);
    let tail: f64 = simpson_weights(nw, wmax / nw as f64)
        .enumerate()
        .map(|(k, wt)| {
            let t = (k as f64 * wmax / nw as f64).powf(1.0 / (1.0 - p));
            wt * (1.0 + t).powf(p) / (1.0 - p)
        })
        .sum();
    2.0 * (body + tail / (2.0 * PI))
}
