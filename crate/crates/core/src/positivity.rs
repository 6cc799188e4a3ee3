//! Off-axis Taylor coefficients of `|G(w − iσ)|²`.
//!
//! For an even real-kernel transform `G`, set `Φ_w(u) = G(u + w) · G(u − w)`.
//! Then `Φ_w(−iσ) = |G(w − iσ)|²` and
//!
//! ```text
//! |G(w − iσ)|² = ½ Σ_m σ^{2m}/(2m)! · B_{2m}(w),
//! B_{2m}(w)    = (−1)^m · 2 · Φ_w^{(2m)}(0).
//! ```
//!
//! When `G` has only real zeros every `B_{2m}(w)` is nonnegative, which makes
//! `|G|²` nondecreasing as `σ` moves away from the real axis. For even
//! polynomials the same coefficients (`T_{N,m}`) are computed exactly in
//! rational arithmetic; for transforms they are extracted from ring samples
//! of `Φ_w`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::{ComplexPoint, ComplexValue, Evaluator};

/// Relative size of the estimated series tail accepted by [`series_reconstruct`].
pub const SERIES_TAIL_RTOL: f64 = 1e-8;

/// `Σ_j coeffs[j] · z^{2j}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvenPolynomial {
    pub coeffs: Vec<f64>,
    /// Set when built from real zeros.
    pub real_rooted: bool,
}

impl EvenPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least one coefficient");
        EvenPolynomial { coeffs, real_rooted: false }
    }

    /// `c · ∏ (1 − z²/α_r²)`.
    pub fn from_roots(c: f64, roots: &[f64]) -> Self {
        let mut coeffs = vec![c];
        for a in roots {
            let s = -1.0 / (a * a);
            coeffs.push(0.0);
            for j in (1..coeffs.len()).rev() {
                coeffs[j] += s * coeffs[j - 1];
            }
        }
        EvenPolynomial { coeffs, real_rooted: true }
    }

    /// Half the degree, `N`.
    pub fn degree_half(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let z2 = z * z;
        self.coeffs.iter().rev().fold(Complex64::zero(), |acc, c| acc * z2 + c)
    }
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coefficient")
}

/// Coefficients of `P(u + shift)` in powers of `u`, exactly.
fn taylor_shift(full: &[BigRational], shift: &BigRational) -> Vec<BigRational> {
    // Horner-style synthetic division repeated: O(d²).
    let mut c = full.to_vec();
    let d = c.len();
    for i in 0..d {
        for j in (i..d - 1).rev() {
            let t = &c[j + 1] * shift;
            c[j] += t;
        }
    }
    c
}

/// `T_{N,m}(w)` for every `m = 0 ..= 2N`, each `(−1)^m · 2 · (2m)! · [u^{2m}] P(u+w) P(u−w)`
/// evaluated exactly from the stored `f64` coefficients.
pub fn t_coeffs_exact(p: &EvenPolynomial, w: f64) -> Vec<f64> {
    let n = p.degree_half();
    let mut full = vec![BigRational::zero(); 2 * n + 1];
    for (j, c) in p.coeffs.iter().enumerate() {
        full[2 * j] = rational(*c);
    }
    let w = rational(w);
    let plus = taylor_shift(&full, &w);
    let minus = taylor_shift(&full, &(-w));
    let mut product = vec![BigRational::zero(); 4 * n + 1];
    for (i, a) in plus.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in minus.iter().enumerate() {
            product[i + j] += a * b;
        }
    }
    let mut factorial = BigInt::one();
    let mut out = Vec::with_capacity(2 * n + 1);
    for m in 0..=2 * n {
        if m > 0 {
            factorial *= BigInt::from((2 * m - 1) * (2 * m));
        }
        let mut t = &product[2 * m] * BigRational::from_integer(&factorial * 2);
        if m % 2 == 1 {
            t = -t;
        }
        let value = t.to_f64().unwrap_or(if t.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY });
        // Keep the exact sign even if the magnitude underflows.
        out.push(if value == 0.0 && t.is_negative() { -0.0 } else { value });
    }
    out
}

pub fn t_coeff_exact(p: &EvenPolynomial, m: usize, w: f64) -> f64 {
    if m > 2 * p.degree_half() {
        return 0.0;
    }
    t_coeffs_exact(p, w)[m]
}

/// Ring parameters for Cauchy-coefficient extraction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingSettings {
    pub radius: f64,
    pub samples: usize,
}

impl Default for RingSettings {
    fn default() -> Self {
        RingSettings { radius: 0.5, samples: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoeffEstimate {
    pub m: usize,
    pub value: f64,
    pub error_band: f64,
    pub ring_radius: f64,
    /// The sign of `value` is resolved, `|value| > error_band`.
    pub conclusive: bool,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

struct RingSample {
    values: Vec<ComplexValue>,
}

fn sample_ring<E: Evaluator + ?Sized>(ev: &E, w: f64, radius: f64, samples: usize) -> Result<RingSample> {
    let values = (0..samples)
        .into_par_iter()
        .map(|j| {
            let u = Complex64::from_polar(radius, 2.0 * PI * j as f64 / samples as f64);
            let a = ev.eval(ComplexPoint::from_complex(u + w))?;
            let b = ev.eval(ComplexPoint::from_complex(u - w))?;
            Ok(a.mul(b))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RingSample { values })
}

/// `(coefficient, band, max|Φ|)` for `u^{2m}` at the given radius.
fn extract(ring: &RingSample, m: usize, radius: f64) -> (f64, f64, f64) {
    let n = ring.values.len();
    let k = 2 * m;
    let fourier = |stride: usize| {
        let count = n / stride;
        let sum: Complex64 = (0..count)
            .map(|j| {
                let idx = j * stride;
                let theta = 2.0 * PI * (idx * k % n) as f64 / n as f64;
                ring.values[idx].to_complex() * Complex64::from_polar(1.0, -theta)
            })
            .sum();
        sum.re / count as f64
    };
    let scale = radius.powi(k as i32);
    let full = fourier(1) / scale;
    let half = fourier(2) / scale;
    let max_abs = ring.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let max_err = ring.values.iter().map(|v| v.error_estimate).fold(0.0, f64::max);
    let band = (max_err + 8.0 * f64::EPSILON * max_abs) / scale + (full - half).abs();
    (full, band, max_abs / scale)
}

/// `B_{2m}(w)` from ring samples of `Φ_w`.
///
/// Starts at `ring.radius` and doubles (then halves) the radius while the
/// error band keeps shrinking, keeping the best radius seen.
pub fn b_coeff<E: Evaluator + ?Sized>(ev: &E, m: usize, w: f64, ring: RingSettings) -> Result<CoeffEstimate> {
    if ring.samples < 4 * m + 8 || !ring.samples.is_power_of_two() || !(ring.radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "ring needs a power-of-two sample count >= {} and a positive radius",
            4 * m + 8
        )));
    }
    let scale = if m % 2 == 1 { -2.0 } else { 2.0 } * factorial(2 * m);
    let attempt = |radius: f64| -> Result<(f64, f64, f64, f64)> {
        let sample = sample_ring(ev, w, radius, ring.samples)?;
        let (c, band, cauchy) = extract(&sample, m, radius);
        Ok((radius, c, band, cauchy))
    };
    let good_enough = |c: f64, band: f64| band <= 1e-3 * c.abs();

    let mut best = attempt(ring.radius)?;
    if !good_enough(best.1, best.2) {
        let mut improved = false;
        let mut r = ring.radius;
        for _ in 0..4 {
            r *= 2.0;
            let next = attempt(r)?;
            if !(next.2 < best.2) {
                break;
            }
            best = next;
            improved = true;
            if good_enough(best.1, best.2) {
                break;
            }
        }
        if !improved {
            let mut r = ring.radius;
            for _ in 0..2 {
                r *= 0.5;
                let next = attempt(r)?;
                if !(next.2 < best.2) {
                    break;
                }
                best = next;
            }
        }
    }
    let (radius, c, band, cauchy) = best;
    if !band.is_finite() || band >= cauchy {
        return Err(Error::RingTooLarge { m, band: scale.abs() * band });
    }
    let value = scale * c;
    let error_band = scale.abs() * band;
    Ok(CoeffEstimate { m, value, error_band, ring_radius: radius, conclusive: value.abs() > error_band })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientTable {
    pub w: f64,
    /// `n` for `B_{2m,n}` or `N` for `T_{N,m}`, when known.
    pub index: Option<u64>,
    pub max_m: usize,
    pub entries: Vec<CoeffEstimate>,
}

impl CoefficientTable {
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    /// Entries that are conclusively negative (below `−3 ×` their band).
    pub fn negative_entries(&self) -> Vec<CoeffEstimate> {
        self.entries.iter().filter(|e| e.value < -3.0 * e.error_band).copied().collect()
    }

    pub fn has_conclusive_positive(&self) -> bool {
        self.entries.iter().any(|e| e.conclusive && e.value > 0.0)
    }
}

pub fn b_table<E: Evaluator + ?Sized>(ev: &E, w: f64, max_m: usize, ring: RingSettings) -> Result<CoefficientTable> {
    let mut entries = Vec::with_capacity(max_m + 1);
    for m in 0..=max_m {
        let entry = match b_coeff(ev, m, w, ring) {
            Ok(e) => e,
            Err(Error::RingTooLarge { band, .. }) => CoeffEstimate {
                m,
                value: 0.0,
                error_band: band,
                ring_radius: ring.radius,
                conclusive: false,
            },
            Err(e) => return Err(e),
        };
        entries.push(entry);
    }
    Ok(CoefficientTable { w, index: None, max_m, entries })
}

fn series_terms(table: &CoefficientTable, sigma: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
    let s2 = sigma * sigma;
    table.entries.iter().scan(0.5, move |weight, e| {
        let current = *weight;
        let m = e.m as f64;
        *weight *= s2 / ((2.0 * m + 1.0) * (2.0 * m + 2.0));
        Some((current * e.value, current * e.error_band))
    })
}

/// `½ Σ_{m ≤ max_m} σ^{2m}/(2m)! · B_{2m}(w)`.
pub fn series_reconstruct(table: &CoefficientTable, sigma: f64) -> Result<f64> {
    let terms: Vec<f64> = series_terms(table, sigma).map(|t| t.0).collect();
    let sum: f64 = terms.iter().sum();
    if sigma == 0.0 || terms.len() < 2 {
        return Ok(sum);
    }
    let last = terms[terms.len() - 1].abs();
    let prev = terms[terms.len() - 2].abs();
    let tail = if last == 0.0 {
        0.0
    } else if prev == 0.0 || last >= prev {
        f64::INFINITY
    } else {
        let ratio = last / prev;
        last * ratio / (1.0 - ratio)
    };
    if tail > SERIES_TAIL_RTOL * sum.abs() {
        return Err(Error::TailNotConverged { sigma, tail });
    }
    Ok(sum)
}

/// Error band of [`series_reconstruct`] inherited from the coefficient bands.
pub fn series_error_band(table: &CoefficientTable, sigma: f64) -> f64 {
    series_terms(table, sigma).map(|t| t.1).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotoneSample {
    pub w: f64,
    pub sigma: f64,
    pub modulus_sq: f64,
    pub error_band: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub w: f64,
    pub sigma_from: f64,
    pub sigma_to: f64,
    pub drop: f64,
    pub error_band: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub samples: Vec<MonotoneSample>,
    pub violations: Vec<Violation>,
}

/// `|F(w − iσ)|²` along each vertical line; flags any decrease larger than
/// the combined error bands of the two samples.
pub fn monotonicity_scan<E: Evaluator + ?Sized>(
    ev: &E,
    w_grid: &[f64],
    sigma_grid: &[f64],
) -> Result<MonotonicityReport> {
    if sigma_grid.first().copied() != Some(0.0) || sigma_grid.windows(2).any(|p| !(p[0] < p[1])) {
        return Err(Error::InvalidArgument("sigma grid must start at 0 and increase".into()));
    }
    let points: Vec<(f64, f64)> =
        w_grid.iter().flat_map(|&w| sigma_grid.iter().map(move |&s| (w, s))).collect();
    let samples = points
        .par_iter()
        .map(|&(w, sigma)| {
            let v = ev.eval(ComplexPoint::new(w, sigma))?;
            let a = v.abs();
            let e = v.error_estimate;
            Ok(MonotoneSample { w, sigma, modulus_sq: a * a, error_band: 2.0 * a * e + e * e })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut violations = Vec::new();
    for line in samples.chunks(sigma_grid.len()) {
        for p in line.windows(2) {
            let drop = p[0].modulus_sq - p[1].modulus_sq;
            let band = p[0].error_band + p[1].error_band;
            if drop > band {
                violations.push(Violation {
                    w: p[0].w,
                    sigma_from: p[0].sigma,
                    sigma_to: p[1].sigma,
                    drop,
                    error_band: band,
                });
            }
        }
    }
    Ok(MonotonicityReport { samples, violations })
}
