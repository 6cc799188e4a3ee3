//! Admissible kernels `e^{-q(t)}`.
//!
//! A kernel exponent is either the parametric even entire function
//!
//! ```text
//! q(t) = k · t^{2m} · e^{μ t²} · ∏_n (1 + t²/β_n²)
//! ```
//!
//! with finitely many `β_n`, or the closed form `q(t) = a (cosh t − 1)`.
//! Every admissible `q` vanishes at the origin, is even, strictly increasing
//! on `(0, ∞)` and eventually dominates `t^{2+α}` for some `α > 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default absolute tolerance used when solving `q(λ) = n`.
pub const DEFAULT_LAMBDA_TOL: f64 = 1e-12;

/// Default exponent slack in the growth witness `q(t) > t^{2+α}`.
pub const DEFAULT_GROWTH_ALPHA: f64 = 1.0;

/// Raw, unvalidated description of a kernel exponent `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum KernelSpec {
    Parametric {
        k: f64,
        m: u32,
        mu: f64,
        #[serde(default)]
        betas: Vec<f64>,
    },
    Cosh {
        a: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("leading coefficient k = {0} must be positive")]
    NonPositiveK(f64),
    #[error("vanishing half-order m must be at least 1")]
    ZeroM,
    #[error("mu = {0} must be nonnegative")]
    NegativeMu(f64),
    #[error("beta = {0} must be positive")]
    NonPositiveBeta(f64),
    #[error("cosh amplitude a = {0} must be positive")]
    NonPositiveA(f64),
    #[error("q(t) = k t^2 grows too slowly: need m >= 2, mu > 0 or at least one beta")]
    GrowthTooSlow,
}

impl KernelSpec {
    /// `q(t) = t^{2m}`, the exponent behind `F_{2m}`.
    pub fn monomial(m: u32) -> Self {
        KernelSpec::Parametric { k: 1.0, m, mu: 0.0, betas: Vec::new() }
    }

    pub fn cosh(a: f64) -> Self {
        KernelSpec::Cosh { a }
    }

    pub fn validate(self) -> Result<Kernel, KernelError> {
        Kernel::new(self)
    }
}

/// A kernel exponent that has passed validation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Kernel {
    spec: KernelSpec,
}

/// Constants `(T, α)` with `q(t) > t^{2+α}` for all `t ≥ T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthWitness {
    pub threshold: f64,
    pub alpha: f64,
    /// Series coefficient used in the construction and its power of `t`.
    pub coefficient: f64,
    pub degree: u32,
}

impl Kernel {
    pub fn new(spec: KernelSpec) -> Result<Self, KernelError> {
        match &spec {
            KernelSpec::Parametric { k, m, mu, betas } => {
                if !(*k > 0.0 && k.is_finite()) {
                    return Err(KernelError::NonPositiveK(*k));
                }
                if *m == 0 {
                    return Err(KernelError::ZeroM);
                }
                if !(*mu >= 0.0 && mu.is_finite()) {
                    return Err(KernelError::NegativeMu(*mu));
                }
                if let Some(b) = betas.iter().find(|b| !(**b > 0.0 && b.is_finite())) {
                    return Err(KernelError::NonPositiveBeta(*b));
                }
                if *m == 1 && *mu == 0.0 && betas.is_empty() {
                    return Err(KernelError::GrowthTooSlow);
                }
            }
            KernelSpec::Cosh { a } => {
                if !(*a > 0.0 && a.is_finite()) {
                    return Err(KernelError::NonPositiveA(*a));
                }
            }
        }
        Ok(Kernel { spec })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    /// `q(t)`; saturates to `+∞` on overflow.
    pub fn q(&self, t: f64) -> f64 {
        let t = t.abs();
        match &self.spec {
            KernelSpec::Parametric { k, m, mu, betas } => {
                let t2 = t * t;
                let mut value = k * t.powi(2 * *m as i32) * (mu * t2).exp();
                for b in betas {
                    value *= 1.0 + t2 / (b * b);
                }
                value
            }
            KernelSpec::Cosh { a } => {
                let s = (0.5 * t).sinh();
                2.0 * a * s * s
            }
        }
    }

    /// `q'(t)`, odd in `t`.
    pub fn q_prime(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        let sign = t.signum();
        let t = t.abs();
        let magnitude = match &self.spec {
            KernelSpec::Parametric { m, mu, betas, .. } => {
                let q = self.q(t);
                if q.is_infinite() {
                    return sign * f64::INFINITY;
                }
                let log_derivative = 2.0 * *m as f64 / t
                    + 2.0 * mu * t
                    + betas.iter().map(|b| 2.0 * t / (b * b + t * t)).sum::<f64>();
                q * log_derivative
            }
            KernelSpec::Cosh { a } => a * t.sinh(),
        };
        sign * magnitude
    }

    /// The kernel itself, `e^{-q(t)}`; exactly 0 once `q` overflows.
    pub fn density(&self, t: f64) -> f64 {
        (-self.q(t)).exp()
    }

    /// The unique `λ > 0` with `q(λ) = n`.
    pub fn lambda_n(&self, n: u64) -> f64 {
        self.solve_level(n as f64, DEFAULT_LAMBDA_TOL)
    }

    /// The unique `t > 0` with `q(t) = level`, to absolute tolerance `tol`.
    ///
    /// Bisection on a doubling bracket, then safeguarded Newton steps that
    /// never leave the bracket.
    pub fn solve_level(&self, level: f64, tol: f64) -> f64 {
        assert!(level > 0.0 && level.is_finite(), "level must be positive and finite");
        let mut lo = 0.0_f64;
        let mut hi = 1.0_f64;
        while self.q(hi) < level {
            lo = hi;
            hi *= 2.0;
        }
        while hi - lo > 1e-3 * hi.max(1e-300) {
            let mid = 0.5 * (lo + hi);
            if self.q(mid) < level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..100 {
            let residual = self.q(x) - level;
            if residual == 0.0 {
                return x;
            }
            if residual < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let slope = self.q_prime(x);
            let mut next = x - residual / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - x).abs();
            x = next;
            if step <= 1e-3 * tol || hi - lo <= tol {
                break;
            }
        }
        x
    }

    /// Lowest-order series coefficient of `q` about 0 with power at least 4.
    ///
    /// All series coefficients of an admissible `q` are nonnegative, so
    /// `q(t) ≥ c · t^{d}` for every real `t`.
    pub fn leading_high_coefficient(&self) -> (f64, u32) {
        match &self.spec {
            KernelSpec::Parametric { k, m, mu, betas } => {
                // Coefficients in s = t^2 of e^{μ s} ∏ (1 + s/β²), up to the degree needed.
                let m = *m as usize;
                let needed = 2usize.saturating_sub(m);
                let mut poly = vec![0.0; needed + 1];
                let mut term = 1.0;
                for (j, c) in poly.iter_mut().enumerate() {
                    if j > 0 {
                        term *= mu / j as f64;
                    }
                    *c = term;
                }
                for b in betas {
                    let inv = 1.0 / (b * b);
                    for j in (1..poly.len()).rev() {
                        poly[j] += inv * poly[j - 1];
                    }
                }
                let start = needed;
                let (j, c) = poly
                    .iter()
                    .enumerate()
                    .skip(start)
                    .find(|(_, c)| **c > 0.0)
                    .map(|(j, c)| (j, *c))
                    .expect("admissible kernel has a t^4-or-higher term");
                (k * c, 2 * (m + j) as u32)
            }
            KernelSpec::Cosh { a } => (a / 24.0, 4),
        }
    }

    pub fn growth_witness(&self) -> GrowthWitness {
        self.growth_witness_with_alpha(DEFAULT_GROWTH_ALPHA)
    }

    /// `T = (1/c)^{1/(d − 2 − α)}` from `q(t) ≥ c t^d`, nudged up by one part in 1e9.
    pub fn growth_witness_with_alpha(&self, alpha: f64) -> GrowthWitness {
        assert!(alpha > 0.0 && alpha < 2.0, "alpha must lie in (0, 2)");
        let (coefficient, degree) = self.leading_high_coefficient();
        let threshold = (1.0 / coefficient).powf(1.0 / (degree as f64 - 2.0 - alpha)) * (1.0 + 1e-9);
        GrowthWitness { threshold, alpha, coefficient, degree }
    }

    /// Half-width of the region where the kernel is not negligible, `λ` with `q(λ) = 1`.
    pub fn unit_scale(&self) -> f64 {
        self.solve_level(1.0, 1e-10)
    }
}
