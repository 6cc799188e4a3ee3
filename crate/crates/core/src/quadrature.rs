//! Real-valued adaptive quadrature for the transform integrals.
//!
//! Every transform in this crate reduces to integrals of the form
//! `∫ f(t) · e^{σt} · {cos, sin}(wt) dt`, either over a finite interval or
//! over `[0, ∞)` with a super-exponentially decaying `f`. Infinite ranges are
//! cut at a point `T*` where an exponential majorant bounds the discarded
//! tail; the remaining interval is split into panels no wider than half an
//! oscillation period and refined adaptively with a 7/15-point
//! Gauss–Kronrod pair.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { rel_tol: 1e-10, abs_tol: 1e-14, max_subdivisions: 2000 }
    }
}

impl QuadratureSettings {
    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) || self.max_subdivisions == 0 {
            return Err(QuadratureError::InvalidSettings);
        }
        Ok(())
    }

    /// Budget for the discarded tail of a semi-infinite integral.
    pub fn tail_budget(&self) -> f64 {
        0.1 * self.abs_tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralValue {
    pub value: f64,
    pub error_estimate: f64,
    /// Upper integration limit actually used (the interval end for finite ranges).
    pub truncation_point: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrigMode {
    Cos,
    Sin,
}

impl TrigMode {
    fn apply(self, x: f64) -> f64 {
        match self {
            TrigMode::Cos => x.cos(),
            TrigMode::Sin => x.sin(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QuadratureError {
    #[error("decay function is not eventually increasing (searched up to t = {searched_to:e})")]
    NoDecay { searched_to: f64 },
    #[error("subdivision limit reached: value {value:e}, error estimate {error_estimate:e}")]
    MaxSubdivisionsExceeded { value: f64, error_estimate: f64 },
    #[error("integrand is not finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("tolerances must be positive and max_subdivisions at least 1")]
    InvalidSettings,
}

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    /// Error level below which the rule cannot resolve this panel in f64.
    floor: f64,
}

impl Panel {
    fn refinable(&self) -> bool {
        self.error > self.floor && (self.hi - self.lo) > 1e-13 * self.hi.abs().max(1.0)
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then(other.lo.total_cmp(&self.lo))
    }
}

fn eval_checked<F: Fn(f64) -> f64>(f: &F, t: f64) -> Result<f64, QuadratureError> {
    let v = f(t);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(QuadratureError::NonFinite { t })
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Panel, QuadratureError> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = eval_checked(f, center)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs_sum = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = eval_checked(f, center - dx)?;
        let f2 = eval_checked(f, center + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    let floor = 50.0 * f64::EPSILON * abs_sum * half.abs();
    let error = ((kronrod - gauss) * half).abs().max(floor);
    Ok(Panel { lo, hi, value, error, floor })
}

/// Globally adaptive Gauss–Kronrod quadrature on `[lo, hi]` with panels no
/// wider than `max_width` at the start.
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    max_width: f64,
    settings: &QuadratureSettings,
) -> Result<(f64, f64), QuadratureError> {
    settings.validate()?;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(QuadratureError::InvalidInterval { lo, hi });
    }
    let count = ((hi - lo) / max_width).ceil().max(1.0) as usize;
    let width = (hi - lo) / count as f64;

    let mut heap = BinaryHeap::with_capacity(count + settings.max_subdivisions);
    let mut done = Vec::new();
    let mut total_value = 0.0;
    let mut total_error = 0.0;
    for i in 0..count {
        let a = lo + i as f64 * width;
        let b = if i + 1 == count { hi } else { lo + (i + 1) as f64 * width };
        let p = gauss_kronrod(f, a, b)?;
        total_value += p.value;
        total_error += p.error;
        if p.refinable() {
            heap.push(p);
        } else {
            done.push(p);
        }
    }

    let mut subdivisions = 0;
    loop {
        let target = settings.abs_tol.max(settings.rel_tol * total_value.abs());
        if total_error <= target {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        if subdivisions >= settings.max_subdivisions {
            heap.push(worst);
            return Err(QuadratureError::MaxSubdivisionsExceeded {
                value: total_value,
                error_estimate: total_error,
            });
        }
        subdivisions += 1;
        let mid = 0.5 * (worst.lo + worst.hi);
        let left = gauss_kronrod(f, worst.lo, mid)?;
        let right = gauss_kronrod(f, mid, worst.hi)?;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        for p in [left, right] {
            if p.refinable() {
                heap.push(p);
            } else {
                done.push(p);
            }
        }
    }

    // Fixed summation order for run-to-run determinism.
    done.extend(heap.into_vec());
    done.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let value = done.iter().map(|p| p.value).sum();
    let error = done.iter().map(|p| p.error).sum();
    Ok((value, error))
}

fn panel_width(w: f64) -> f64 {
    PI / w.abs().max(1.0)
}

fn tail_condition<D: Fn(f64) -> f64>(decay: &D, t: f64, log_budget: f64) -> bool {
    let d = decay(t);
    if d == f64::INFINITY {
        return true;
    }
    let h = 1e-6 * t.max(1.0);
    let (dp, dm) = (decay(t + h), decay((t - h).max(0.0)));
    let slope = if dp.is_finite() && dm.is_finite() {
        (dp - dm) / (t + h - (t - h).max(0.0))
    } else {
        // Saturating decay: the majorant collapses, treat the slope as huge.
        f64::INFINITY
    };
    slope > 0.0 && -d - slope.ln() <= log_budget
}

/// Smallest `T*` (found by bracketing and bisection) with
/// `e^{-decay(T*)} / decay'(T*) ≤ tail_budget`.
///
/// For a decay that is convex beyond `T*` this bounds
/// `∫_{T*}^∞ e^{-decay(t)} dt` by the budget.
pub fn truncation_point<D: Fn(f64) -> f64>(decay: D, tail_budget: f64) -> Result<f64, QuadratureError> {
    assert!(tail_budget > 0.0, "tail budget must be positive");
    let log_budget = tail_budget.ln();
    let holds = |t: f64| tail_condition(&decay, t, log_budget);

    let (mut lo, mut hi);
    if holds(1.0) {
        hi = 1.0;
        lo = 0.5;
        while holds(lo) {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-12 {
                return Ok(hi);
            }
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        while !holds(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > 1e8 {
                return Err(QuadratureError::NoDecay { searched_to: hi });
            }
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(hi)
}

/// `∫_0^∞ integrand(t) dt` where `|integrand(t)| ≤ e^{-decay(t)}`; `oscillation`
/// is the angular frequency that sets the panel width.
pub fn integrate_semi_infinite<F, D>(
    integrand: F,
    decay: D,
    oscillation: f64,
    settings: &QuadratureSettings,
) -> Result<IntegralValue, QuadratureError>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    settings.validate()?;
    let budget = settings.tail_budget();
    let cut = truncation_point(decay, budget)?;
    let (value, error) = adaptive(&integrand, 0.0, cut, panel_width(oscillation), settings)?;
    Ok(IntegralValue { value, error_estimate: error + budget, truncation_point: cut })
}

/// `∫_lo^hi integrand(t) dt` with panels sized for angular frequency `oscillation`.
pub fn integrate_interval<F: Fn(f64) -> f64>(
    integrand: F,
    lo: f64,
    hi: f64,
    oscillation: f64,
    settings: &QuadratureSettings,
) -> Result<IntegralValue, QuadratureError> {
    let (value, error) = adaptive(&integrand, lo, hi, panel_width(oscillation), settings)?;
    Ok(IntegralValue { value, error_estimate: error, truncation_point: hi })
}

/// `∫_0^∞ f(t) e^{σt} trig(wt) dt` for `f` decaying faster than `e^{-|σ|t}`.
pub fn integrate_decaying<F: Fn(f64) -> f64>(
    f: F,
    sigma: f64,
    w: f64,
    mode: TrigMode,
    settings: &QuadratureSettings,
) -> Result<IntegralValue, QuadratureError> {
    integrate_semi_infinite(
        |t| {
            let ft = f(t);
            if ft == 0.0 {
                0.0
            } else {
                ft * (sigma * t).exp() * mode.apply(w * t)
            }
        },
        |t| -f(t).abs().ln() - sigma * t,
        w,
        settings,
    )
}

/// `∫_lo^hi f(t) trig(wt) dt`.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    w: f64,
    mode: TrigMode,
    settings: &QuadratureSettings,
) -> Result<IntegralValue, QuadratureError> {
    integrate_interval(|t| f(t) * mode.apply(w * t), lo, hi, w, settings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_on_unit_interval() {
        let s = QuadratureSettings::default();
        let r = integrate_finite(|_| 1.0, 0.0, 1.0, 0.0, TrigMode::Cos, &s).unwrap();
        assert!((r.value - 1.0).abs() < 1e-15);
        let r = integrate_finite(|_| 1.0, 0.0, 1.0, PI, TrigMode::Cos, &s).unwrap();
        assert!(r.value.abs() < s.abs_tol);
    }

    #[test]
    fn rejects_bad_interval_and_settings() {
        let s = QuadratureSettings::default();
        assert!(matches!(
            integrate_finite(|_| 1.0, 1.0, 1.0, 0.0, TrigMode::Cos, &s),
            Err(QuadratureError::InvalidInterval { .. })
        ));
        let bad = QuadratureSettings { rel_tol: 0.0, ..s };
        assert_eq!(
            integrate_finite(|_| 1.0, 0.0, 1.0, 0.0, TrigMode::Cos, &bad),
            Err(QuadratureError::InvalidSettings)
        );
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let s = QuadratureSettings::default();
        let r = integrate_finite(|t| 1.0 / (t - 0.5), 0.0, 1.0, 0.0, TrigMode::Cos, &s);
        assert!(matches!(r, Err(QuadratureError::NonFinite { .. })));
    }

    #[test]
    fn subdivision_limit_is_reported() {
        let s = QuadratureSettings { max_subdivisions: 3, rel_tol: 1e-14, abs_tol: 1e-300 };
        let r = integrate_finite(|t| t.sqrt(), 0.0, 1.0, 0.0, TrigMode::Cos, &s);
        assert!(matches!(r, Err(QuadratureError::MaxSubdivisionsExceeded { .. })));
    }

    #[test]
    fn truncation_point_examples() {
        let t = truncation_point(|t| t * t, 0.5).unwrap();
        assert!(t <= 1.0);
        let t = truncation_point(|t| t.powi(4) - 3.0 * t, 1e-16).unwrap();
        assert!(t.is_finite() && t > 1.0);
        assert!(matches!(truncation_point(|t| -t, 1e-3), Err(QuadratureError::NoDecay { .. })));
    }

    #[test]
    fn semi_infinite_gaussian() {
        let s = QuadratureSettings::default();
        let r = integrate_decaying(|t| (-t * t).exp(), 0.0, 0.0, TrigMode::Cos, &s).unwrap();
        let exact = PI.sqrt() / 2.0;
        assert!((r.value - exact).abs() <= r.error_estimate.max(1e-15));
        assert!((r.value - 0.8862269255).abs() < 1e-10);
    }
}
