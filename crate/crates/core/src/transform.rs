//! Complex Fourier transforms `G(z) = ∫ e^{-q(t)} e^{izt} dt` of admissible
//! kernels, their compactly supported approximants `G_n`, the reference
//! transforms `F_{2k}`, the products `H_n = G_n · F_4` and the extended
//! (convolution) class.
//!
//! Points are written `z = w − iσ`. Because every kernel here is even and
//! real, the full-line integral folds onto `[0, ∞)`:
//!
//! ```text
//! Re G = 2 ∫_0^∞ e^{-q(t)} cosh(σt) cos(wt) dt
//! Im G = 2 ∫_0^∞ e^{-q(t)} sinh(σt) sin(wt) dt
//! ```
//!
//! so `G(−z) = G(z)` holds bit-for-bit and `Im G = 0` exactly on the real axis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::approx::Approximant;
use crate::error::{Error, Result};
use crate::kernel::{Kernel, KernelSpec};
use crate::quadrature::{
    integrate_interval, integrate_semi_infinite, truncation_point, IntegralValue, QuadratureSettings,
};

/// `z = w − iσ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub w: f64,
    pub sigma: f64,
}

impl ComplexPoint {
    pub fn new(w: f64, sigma: f64) -> Self {
        ComplexPoint { w, sigma }
    }

    pub fn real(w: f64) -> Self {
        ComplexPoint { w, sigma: 0.0 }
    }

    pub fn from_complex(z: Complex64) -> Self {
        ComplexPoint { w: z.re, sigma: -z.im }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.w, -self.sigma)
    }

    pub fn neg(self) -> Self {
        ComplexPoint { w: -self.w, sigma: -self.sigma }
    }

    pub fn abs(self) -> f64 {
        self.w.hypot(self.sigma)
    }
}

/// `R(σ, w) + i I(σ, w)` with an absolute error estimate on the pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
    pub error_estimate: f64,
}

impl ComplexValue {
    pub fn new(re: f64, im: f64, error_estimate: f64) -> Self {
        ComplexValue { re, im, error_estimate }
    }

    pub fn exact(z: Complex64) -> Self {
        ComplexValue { re: z.re, im: z.im, error_estimate: 0.0 }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn conj(self) -> Self {
        ComplexValue { im: -self.im, ..self }
    }

    /// Product with first-order error propagation.
    pub fn mul(self, other: ComplexValue) -> ComplexValue {
        let p = self.to_complex() * other.to_complex();
        let err = self.abs() * other.error_estimate
            + other.abs() * self.error_estimate
            + self.error_estimate * other.error_estimate;
        ComplexValue { re: p.re, im: p.im, error_estimate: err }
    }

    /// Scaling by a real constant.
    pub fn scale(self, c: f64) -> ComplexValue {
        ComplexValue { re: c * self.re, im: c * self.im, error_estimate: c.abs() * self.error_estimate }
    }
}

/// Anything that evaluates an entire function at a point with an error estimate.
pub trait Evaluator: Sync {
    fn eval(&self, z: ComplexPoint) -> Result<ComplexValue>;
}

impl<F> Evaluator for F
where
    F: Fn(ComplexPoint) -> Result<ComplexValue> + Sync,
{
    fn eval(&self, z: ComplexPoint) -> Result<ComplexValue> {
        self(z)
    }
}

/// A kernel in the extended class: the iterated convolution of its components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtendedKernel {
    components: Vec<Kernel>,
}

impl ExtendedKernel {
    pub fn new(components: Vec<Kernel>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::ComponentCount(0));
        }
        Ok(ExtendedKernel { components })
    }

    pub fn components(&self) -> &[Kernel] {
        &self.components
    }
}

fn two_sided<F, D>(
    even: F,
    odd: Option<impl Fn(f64) -> f64>,
    decay: D,
    w: f64,
    settings: &QuadratureSettings,
) -> Result<ComplexValue>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64 + Copy,
{
    let re = integrate_semi_infinite(even, decay, w, settings)?;
    let (im, im_err) = match odd {
        Some(odd) => {
            let v = integrate_semi_infinite(odd, decay, w, settings)?;
            (v.value, v.error_estimate)
        }
        None => (0.0, 0.0),
    };
    Ok(ComplexValue::new(2.0 * re.value, 2.0 * im, 2.0 * (re.error_estimate + im_err)))
}

/// `G(z)` for a basis kernel.
pub fn cft(kernel: &Kernel, z: ComplexPoint, settings: &QuadratureSettings) -> Result<ComplexValue> {
    let ComplexPoint { w, sigma } = z;
    let shift = sigma.abs();
    let decay = |t: f64| kernel.q(t) - shift * t;
    if sigma == 0.0 {
        two_sided(|t| kernel.density(t) * (w * t).cos(), None::<fn(f64) -> f64>, decay, w, settings)
    } else {
        two_sided(
            |t| kernel.density(t) * (sigma * t).cosh() * (w * t).cos(),
            Some(|t: f64| kernel.density(t) * (sigma * t).sinh() * (w * t).sin()),
            decay,
            w,
            settings,
        )
    }
}

/// `G_n(z)`, the transform of the compactly supported approximant `g_n`.
pub fn cft_approx(
    kernel: &Kernel,
    n: u64,
    z: ComplexPoint,
    settings: &QuadratureSettings,
) -> Result<ComplexValue> {
    let approx = Approximant::new(kernel, n);
    cft_of_approximant(&approx, z, settings)
}

/// `G_n(z)` for an already-solved approximant (reuses the cached `λ_n`).
pub fn cft_of_approximant(
    approx: &Approximant<'_>,
    z: ComplexPoint,
    settings: &QuadratureSettings,
) -> Result<ComplexValue> {
    let ComplexPoint { w, sigma } = z;
    let lambda = approx.params().lambda;
    let re = integrate_interval(|t| approx.eval(t) * (sigma * t).cosh() * (w * t).cos(), 0.0, lambda, w, settings)?;
    let im = if sigma == 0.0 {
        IntegralValue { value: 0.0, error_estimate: 0.0, truncation_point: lambda }
    } else {
        integrate_interval(|t| approx.eval(t) * (sigma * t).sinh() * (w * t).sin(), 0.0, lambda, w, settings)?
    };
    Ok(ComplexValue::new(2.0 * re.value, 2.0 * im.value, 2.0 * (re.error_estimate + im.error_estimate)))
}

/// `F_{2k}(z) = ∫ e^{-y^{2k}} e^{izy} dy`, `k ≥ 2`.
pub fn f2k(k: u32, z: ComplexPoint, settings: &QuadratureSettings) -> Result<ComplexValue> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("F_2k needs k >= 2, got {k}")));
    }
    let kernel = KernelSpec::monomial(k).validate()?;
    cft(&kernel, z, settings)
}

/// `H_n(z) = G_n(z) · F_4(z)`, the transform of `h_n = g_n ∗ e^{-t⁴}`.
pub fn hn(kernel: &Kernel, n: u64, z: ComplexPoint, settings: &QuadratureSettings) -> Result<ComplexValue> {
    Ok(cft_approx(kernel, n, z, settings)?.mul(f2k(2, z, settings)?))
}

/// `c_{[q₁,q₂]}(t) = ∫ e^{-q₁(v)} e^{-q₂(t−v)} dv`.
///
/// The `v` range is cut where `e^{-q₁}` alone has spent the tail budget,
/// using `e^{-q₂} ≤ 1`.
pub fn convolve_kernels(ext: &ExtendedKernel, t: f64, settings: &QuadratureSettings) -> Result<f64> {
    let [q1, q2] = ext.components() else {
        return Err(Error::ComponentCount(ext.components().len()));
    };
    let budget = 0.5 * settings.tail_budget();
    let cut = truncation_point(|v| q1.q(v), budget)?;
    // Symmetrize around the origin so c(t) = c(-t) exactly.
    let t = t.abs();
    let integrand = |v: f64| {
        let a = q1.density(v) * q2.density(t - v);
        let b = q1.density(-v) * q2.density(t + v);
        a + b
    };
    let r = integrate_interval(integrand, 0.0, cut, 1.0, settings)?;
    Ok(r.value)
}

/// Transform of an extended kernel: the product of the component transforms.
pub fn cft_extended(ext: &ExtendedKernel, z: ComplexPoint, settings: &QuadratureSettings) -> Result<ComplexValue> {
    let mut acc = ComplexValue::new(1.0, 0.0, 0.0);
    for k in ext.components() {
        acc = acc.mul(cft(k, z, settings)?);
    }
    Ok(acc)
}

/// Every transform family the zero, factorization and positivity layers operate on.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Transform {
    /// `G` of a basis kernel.
    Basis { kernel: Kernel },
    /// `G_n`.
    Approx { kernel: Kernel, n: u64 },
    /// `H_n = G_n · F_4`.
    Hn { kernel: Kernel, n: u64 },
    /// `F_{2k}`.
    F2k { k: u32 },
    /// Product of component transforms.
    Extended { kernel: ExtendedKernel },
}

impl Transform {
    pub fn eval(&self, z: ComplexPoint, settings: &QuadratureSettings) -> Result<ComplexValue> {
        match self {
            Transform::Basis { kernel } => cft(kernel, z, settings),
            Transform::Approx { kernel, n } => cft_approx(kernel, *n, z, settings),
            Transform::Hn { kernel, n } => hn(kernel, *n, z, settings),
            Transform::F2k { k } => f2k(*k, z, settings),
            Transform::Extended { kernel } => cft_extended(kernel, z, settings),
        }
    }

    /// Binds quadrature settings, giving an [`Evaluator`].
    pub fn evaluator(&self, settings: QuadratureSettings) -> impl Evaluator + '_ {
        move |z: ComplexPoint| self.eval(z, &settings)
    }

    /// Half-width of the kernel's effective support; zero gaps are of order `π / scale`.
    pub fn support_scale(&self) -> f64 {
        match self {
            Transform::Basis { kernel } => kernel.unit_scale(),
            Transform::Approx { kernel, n } | Transform::Hn { kernel, n } => {
                kernel.lambda_n(*n).max(kernel.unit_scale())
            }
            Transform::F2k { .. } => 1.0,
            Transform::Extended { kernel } => {
                kernel.components().iter().map(Kernel::unit_scale).fold(0.0, f64::max)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartic() -> Kernel {
        KernelSpec::monomial(2).validate().unwrap()
    }

    #[test]
    fn real_axis_is_exactly_real() {
        let s = QuadratureSettings::default();
        for w in [0.0, 0.3, 2.0, 17.5] {
            assert_eq!(cft(&quartic(), ComplexPoint::real(w), &s).unwrap().im, 0.0);
            assert_eq!(cft_approx(&quartic(), 3, ComplexPoint::real(w), &s).unwrap().im, 0.0);
        }
    }

    #[test]
    fn evenness_is_exact() {
        let s = QuadratureSettings::default();
        let z = ComplexPoint::new(1.3, 0.7);
        let a = cft(&quartic(), z, &s).unwrap();
        let b = cft(&quartic(), z.neg(), &s).unwrap();
        assert_eq!(a.re, b.re);
        assert_eq!(a.im, b.im);
    }

    #[test]
    fn f2k_rejects_small_k() {
        let s = QuadratureSettings::default();
        assert!(f2k(1, ComplexPoint::real(0.0), &s).is_err());
    }

    #[test]
    fn convolution_needs_two_components() {
        let s = QuadratureSettings::default();
        let one = ExtendedKernel::new(vec![quartic()]).unwrap();
        assert_eq!(convolve_kernels(&one, 0.0, &s), Err(Error::ComponentCount(1)));
        assert!(ExtendedKernel::new(vec![]).is_err());
    }

    #[test]
    fn complex_point_round_trip() {
        let z = ComplexPoint::new(0.5, 0.25);
        assert_eq!(z.to_complex(), Complex64::new(0.5, -0.25));
        assert_eq!(ComplexPoint::from_complex(z.to_complex()), z);
    }
}
