//! The compactly supported approximants
//! `g_n(t) = χ_{[−λ_n, λ_n]}(t) · (n/(n+1)) · (1 − q(t)/n)^{n+1}`
//! and the explicit bounds on `|G(z) − G_n(z)|` over a disc `|z| ≤ M`.
//!
//! The error splits at a point `t₁` into a head term `J_n ≤ 2e^{M t₁}/(M n)`
//! (valid once `n > q(t₁)`) and a tail term
//! `K_n ≤ 2 ∫_{t₁}^∞ e^{-q(t) + M t} dt` that does not depend on `n`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::quadrature::{integrate_interval, truncation_point, QuadratureSettings};
use crate::transform::{cft, cft_of_approximant, ComplexPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproximantParams {
    pub n: u64,
    /// `λ_n`, the support half-width.
    pub lambda: f64,
}

/// `g_n` bound to its kernel, with `λ_n` solved once.
#[derive(Debug, Clone, Copy)]
pub struct Approximant<'a> {
    kernel: &'a Kernel,
    params: ApproximantParams,
}

impl<'a> Approximant<'a> {
    pub fn new(kernel: &'a Kernel, n: u64) -> Self {
        assert!(n >= 1, "approximant index must be positive");
        Approximant { kernel, params: ApproximantParams { n, lambda: kernel.lambda_n(n) } }
    }

    pub fn with_params(kernel: &'a Kernel, params: ApproximantParams) -> Self {
        Approximant { kernel, params }
    }

    pub fn params(&self) -> ApproximantParams {
        self.params
    }

    pub fn kernel(&self) -> &'a Kernel {
        self.kernel
    }

    /// `g_n(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        g_n_eval(self.kernel, &self.params, t)
    }

    /// `d_n(t) = e^{-q(t)} − g_n(t)`, nonnegative and nonincreasing on `[0, λ_n]`.
    pub fn difference(&self, t: f64) -> f64 {
        self.kernel.density(t) - self.eval(t)
    }
}

pub fn g_n_eval(kernel: &Kernel, params: &ApproximantParams, t: f64) -> f64 {
    let n = params.n as f64;
    if t.abs() > params.lambda {
        return 0.0;
    }
    let x = kernel.q(t) / n;
    if x >= 1.0 {
        return 0.0;
    }
    n / (n + 1.0) * ((n + 1.0) * (-x).ln_1p()).exp()
}

/// `0 ≤ g_n(t) ≤ e^{-q(t)}`.
pub fn envelope_check(kernel: &Kernel, params: &ApproximantParams, t: f64) -> bool {
    let g = g_n_eval(kernel, params, t);
    g >= 0.0 && g <= kernel.density(t)
}

/// Upper bound for every `K_n`: `2 ∫_{t₁}^∞ e^{-q(t) + M t} dt`.
pub fn kn_bound(kernel: &Kernel, radius: f64, t1: f64, settings: &QuadratureSettings) -> Result<f64> {
    if !(radius > 0.0 && t1 > 0.0) {
        return Err(Error::InvalidArgument("kn_bound needs M > 0 and t1 > 0".into()));
    }
    let decay = |t: f64| kernel.q(t) - radius * t;
    let base = decay(t1);
    if base == f64::INFINITY {
        return Ok(0.0);
    }
    // Integrate e^{-(decay(t1 + s) - decay(t1))} over s >= 0, then rescale.
    let shifted = |s: f64| decay(t1 + s) - base;
    let cut = truncation_point(shifted, 1e-16)?;
    let r = integrate_interval(|s| (-shifted(s)).exp(), 0.0, cut, 1.0, settings)?;
    Ok(2.0 * (-base).exp() * r.value)
}

/// The head bound `J_n < 2 e^{M t₁} / (M n)`, valid for `n > q(t₁)`.
pub fn jn_bound(kernel: &Kernel, radius: f64, t1: f64, n: u64) -> Result<f64> {
    let q_t1 = kernel.q(t1);
    if (n as f64) <= q_t1 {
        return Err(Error::NTooSmall { n, q_t1 });
    }
    Ok(2.0 * (radius * t1).exp() / (radius * n as f64))
}

/// A choice of `(t₁, n_min)` guaranteeing `|G − G_n| < ε` on `|z| ≤ M` for `n ≥ n_min`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceBound {
    pub radius: f64,
    pub t1: f64,
    pub n_min: u64,
    pub epsilon: f64,
    pub jn_bound: f64,
    pub kn_bound: f64,
}

/// Picks the smallest power-of-two `t₁` with `K_n < ε/2`, then
/// `n_min = ⌈max(q(t₁), 4 e^{M t₁}/(M ε))⌉ + 1`.
pub fn n_for_epsilon(
    kernel: &Kernel,
    radius: f64,
    epsilon: f64,
    settings: &QuadratureSettings,
) -> Result<ConvergenceBound> {
    if !(radius > 0.0 && epsilon > 0.0) {
        return Err(Error::InvalidArgument("n_for_epsilon needs M > 0 and epsilon > 0".into()));
    }
    let half = 0.5 * epsilon;
    let mut t1 = 1.0_f64;
    let mut k = kn_bound(kernel, radius, t1, settings)?;
    if k < half {
        for _ in 0..30 {
            let smaller = kn_bound(kernel, radius, 0.5 * t1, settings)?;
            if smaller >= half {
                break;
            }
            t1 *= 0.5;
            k = smaller;
        }
    } else {
        while k >= half {
            t1 *= 2.0;
            if t1 > 1e6 {
                return Err(Error::InvalidArgument("no t1 found with K_n < epsilon/2".into()));
            }
            k = kn_bound(kernel, radius, t1, settings)?;
        }
    }
    let head = 4.0 * (radius * t1).exp() / (radius * epsilon);
    let n_min = kernel.q(t1).max(head).ceil() as u64 + 1;
    let j = jn_bound(kernel, radius, t1, n_min)?;
    Ok(ConvergenceBound { radius, t1, n_min, epsilon, jn_bound: j, kn_bound: k })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalGap {
    /// `max |G(z) − G_n(z)|` over the grid.
    pub gap: f64,
    /// Largest combined quadrature error estimate over the grid.
    pub error_estimate: f64,
    pub points: usize,
}

/// Polar grid `grid_size` radii × `grid_size` angles over `|z| ≤ M`, plus the origin.
pub fn polar_grid(radius: f64, grid_size: usize) -> Vec<ComplexPoint> {
    let mut pts = vec![ComplexPoint::real(0.0)];
    if radius == 0.0 || grid_size == 0 {
        return pts;
    }
    for i in 0..grid_size {
        let r = radius * (i + 1) as f64 / grid_size as f64;
        for j in 0..grid_size {
            let theta = 2.0 * PI * j as f64 / grid_size as f64;
            pts.push(ComplexPoint::from_complex(num_complex::Complex64::from_polar(r, theta)));
        }
    }
    pts
}

pub fn empirical_gap(
    kernel: &Kernel,
    n: u64,
    radius: f64,
    grid_size: usize,
    settings: &QuadratureSettings,
) -> Result<EmpiricalGap> {
    let approx = Approximant::new(kernel, n);
    let points = polar_grid(radius, grid_size);
    let diffs = points
        .par_iter()
        .map(|&z| {
            let g = cft(kernel, z, settings)?;
            let gn = cft_of_approximant(&approx, z, settings)?;
            let d = (g.to_complex() - gn.to_complex()).norm();
            Ok((d, g.error_estimate + gn.error_estimate))
        })
        .collect::<Result<Vec<_>>>()?;
    let gap = diffs.iter().map(|d| d.0).fold(0.0, f64::max);
    let error_estimate = diffs.iter().map(|d| d.1).fold(0.0, f64::max);
    Ok(EmpiricalGap { gap, error_estimate, points: points.len() })
}
