//! Independent reference values for the integration tests.
//!
//! Nothing here calls into the library's quadrature; the oracles are either
//! closed forms or plain composite rules with a Richardson error estimate.

#![allow(dead_code)]

use std::f64::consts::PI;

use lpfz_core::kernel::{Kernel, KernelSpec};

/// Lanczos approximation (g = 7, 9 terms), accurate to ~1e-15 relative for x > 0.
pub fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// `K₀(x)` from its power series, fine for `0 < x ≤ 2`.
pub fn bessel_k0(x: f64) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut i0 = 1.0;
    let mut tail = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= y / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += term;
        tail += term * harmonic;
    }
    -((0.5 * x).ln() + EULER) * i0 + tail
}

/// Composite Simpson with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n % 2 == 0);
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

/// Simpson at `n` and `2n` panels: `(refined value, |difference| / 15)`.
pub fn simpson_checked(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> (f64, f64) {
    let coarse = simpson(&f, a, b, n);
    let fine = simpson(&f, a, b, 2 * n);
    (fine, (fine - coarse).abs() / 15.0)
}

/// Simpson weights for `n` (even) panels on `[a, b]`: `(nodes, weights)`.
pub fn simpson_nodes(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n % 2 == 0);
    let h = (b - a) / n as f64;
    let nodes = (0..=n).map(|i| a + i as f64 * h).collect();
    let weights = (0..=n)
        .map(|i| {
            let c = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            c * h / 3.0
        })
        .collect();
    (nodes, weights)
}

pub fn quartic() -> Kernel {
    KernelSpec::monomial(2).validate().unwrap()
}

pub fn sextic() -> Kernel {
    KernelSpec::monomial(3).validate().unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Moments `∫_{-1}^{1} ½ (1 − t⁴)² t^{2k} dt` of the first quartic approximant.
pub fn g1_moment(k: usize) -> f64 {
    let j = 2.0 * k as f64;
    1.0 / (j + 1.0) - 2.0 / (j + 5.0) + 1.0 / (j + 9.0)
}
