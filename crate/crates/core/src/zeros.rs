//! Real-zero location and argument-principle certification.
//!
//! Two independent counts are compared: sign changes of the transform along
//! `[0, R]` (refined by bisection), and the winding number of the transform
//! around the rectangle `[−R, R] × [−Y, Y]`. For an even function with only
//! real zeros the winding number is exactly twice the number of positive real
//! zeros (plus one for a zero at the origin). A mismatch is reported through
//! [`ZeroReport::certified`], never as an error.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::QuadratureSettings;
use crate::transform::{ComplexPoint, Evaluator, Transform};

/// A sub-interval of the real axis with certified opposite signs at its ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub a: f64,
    pub b: f64,
}

/// The rectangle `[−half_width, half_width] × [−half_height, half_height]` in the z-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rectangle {
    pub half_width: f64,
    pub half_height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroReport {
    /// Scanned range `[0, R]` of the positive real axis.
    pub interval: [f64; 2],
    pub real_zeros: Vec<f64>,
    /// Achieved half-width for each entry of `real_zeros`.
    pub zero_tols: Vec<f64>,
    pub zero_at_origin: bool,
    pub refine_tol: f64,
    pub rectangle: Rectangle,
    pub winding_count: u32,
    pub samples_per_side: usize,
    /// Real-axis scan step that produced `real_zeros`.
    pub scan_step: f64,
    pub certified: bool,
    pub notes: Vec<String>,
}

impl ZeroReport {
    /// Winding count predicted by the real zeros alone.
    pub fn expected_winding(&self) -> u32 {
        2 * self.real_zeros.len() as u32 + u32::from(self.zero_at_origin)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifyOptions {
    /// Scan resolution on the real axis; `None` picks `π / (4 · support scale)`.
    pub step: Option<f64>,
    pub refine_tol: f64,
    pub samples_per_side: usize,
    /// How many times the contour sampling may be doubled after a phase jump.
    pub max_doublings: u32,
    /// How many times the scan step may be halved while the winding count
    /// exceeds the real count (two zeros closer than one step cancel out).
    pub max_step_halvings: u32,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { step: None, refine_tol: 1e-10, samples_per_side: 500, max_doublings: 5, max_step_halvings: 6 }
    }
}

fn certified_sign<F>(f: &F, t: f64) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let (v, e) = f(t)?;
    Ok(if v.abs() > e { Some(v.signum()) } else { None })
}

/// Restriction of an evaluator to the real axis: `(Re F(w), error)`.
pub fn real_axis<E: Evaluator + ?Sized>(ev: &E) -> impl Fn(f64) -> Result<(f64, f64)> + Sync + '_ {
    move |w| {
        let v = ev.eval(ComplexPoint::real(w))?;
        Ok((v.re, v.error_estimate))
    }
}

/// Certified signs at `lo, lo + step, …` up to `hi` (the last sample is `hi`).
fn sample_signs<F>(f: &F, lo: f64, hi: f64, step: f64) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> Result<(f64, f64)> + Sync,
{
    let count = ((hi - lo) / step).ceil() as usize;
    let nominal: Vec<f64> = (0..=count).map(|j| (lo + j as f64 * step).min(hi)).collect();
    nominal
        .par_iter()
        .map(|&t| {
            const NUDGES: [f64; 7] = [0.0, 0.125, -0.125, 0.25, -0.25, 0.375, -0.375];
            let mut last = (0.0, 0.0);
            for nudge in NUDGES {
                let s = t + nudge * step;
                if !(lo..=hi).contains(&s) {
                    continue;
                }
                let (v, e) = f(s)?;
                if v.abs() > e {
                    return Ok((s, v.signum()));
                }
                last = (v.abs(), e);
            }
            Err(Error::InconclusiveSample { t, value_abs: last.0, error: last.1 })
        })
        .collect()
}

fn sign_changes(samples: &[(f64, f64)]) -> Vec<Bracket> {
    samples
        .windows(2)
        .filter(|p| p[0].1 != p[1].1)
        .map(|p| Bracket { a: p[0].0, b: p[1].0 })
        .collect()
}

/// All sign changes of `f` on `[0, R]` at resolution `step`.
///
/// A sample whose value does not exceed its error estimate is nudged by
/// fractions of a step before giving up with [`Error::InconclusiveSample`].
pub fn scan_real_zeros<F>(f: &F, r: f64, step: f64) -> Result<Vec<Bracket>>
where
    F: Fn(f64) -> Result<(f64, f64)> + Sync,
{
    if !(r > 0.0 && step > 0.0) {
        return Err(Error::InvalidArgument("scan needs R > 0 and step > 0".into()));
    }
    Ok(sign_changes(&sample_signs(f, 0.0, r, step)?))
}

/// A refined zero and the half-width actually achieved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefinedZero {
    pub zero: f64,
    /// Half-width of the final certified bracket; at least the requested tolerance
    /// unless the bracket closed exactly.
    pub tol: f64,
}

/// Bisection inside a certified bracket down to half-width `tol`.
///
/// If a midpoint falls inside the quadrature noise band its sign is not
/// guessed: the bracket is shrunk from both sides onto the band instead, and
/// the achieved half-width (possibly wider than `tol`) is reported.
pub fn refine_zero<F>(f: &F, bracket: Bracket, tol: f64) -> Result<RefinedZero>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let Bracket { mut a, mut b } = bracket;
    if !(a < b) || !(tol > 0.0) {
        return Err(Error::InvalidBracket { a, b });
    }
    let lost = |a, b| Error::LostBracket { a, b };
    let sa = certified_sign(f, a)?.ok_or(lost(a, b))?;
    let sb = certified_sign(f, b)?.ok_or(lost(a, b))?;
    if sa == sb {
        return Err(lost(a, b));
    }
    'outer: while b - a > 2.0 * tol {
        let mid = 0.5 * (a + b);
        match certified_sign(f, mid)? {
            Some(s) if s == sa => a = mid,
            Some(_) => b = mid,
            None => {
                // Walk a up towards the band from the left.
                let mut hi = mid;
                while hi - a > 0.5 * tol {
                    let m = 0.5 * (a + hi);
                    match certified_sign(f, m)? {
                        Some(s) if s == sa => a = m,
                        Some(_) => {
                            b = m;
                            continue 'outer;
                        }
                        None => hi = m,
                    }
                }
                // And b down towards it from the right.
                let mut lo = mid;
                while b - lo > 0.5 * tol {
                    let m = 0.5 * (lo + b);
                    match certified_sign(f, m)? {
                        Some(s) if s != sa => b = m,
                        Some(_) => {
                            a = m;
                            continue 'outer;
                        }
                        None => lo = m,
                    }
                }
                break;
            }
        }
    }
    Ok(RefinedZero { zero: 0.5 * (a + b), tol: (0.5 * (b - a)).max(tol) })
}

/// Closed counterclockwise contour with `samples_per_side` segments per side.
fn rectangle_contour(rect: Rectangle, samples_per_side: usize) -> Vec<Complex64> {
    let (x, y) = (rect.half_width, rect.half_height);
    let corners = [
        Complex64::new(-x, -y),
        Complex64::new(x, -y),
        Complex64::new(x, y),
        Complex64::new(-x, y),
    ];
    let mut pts = Vec::with_capacity(4 * samples_per_side);
    for side in 0..4 {
        let (p, q) = (corners[side], corners[(side + 1) % 4]);
        for j in 0..samples_per_side {
            pts.push(p + (q - p) * (j as f64 / samples_per_side as f64));
        }
    }
    pts
}

/// Argument-principle zero count inside `rect`.
///
/// The argument is unwrapped sample to sample; any step of `π/2` or more is
/// refused with [`Error::PhaseJumpTooLarge`] rather than guessed.
pub fn winding_count<E: Evaluator + ?Sized>(ev: &E, rect: Rectangle, samples_per_side: usize) -> Result<u32> {
    if !(rect.half_width > 0.0 && rect.half_height > 0.0) || samples_per_side == 0 {
        return Err(Error::InvalidArgument("rectangle and sampling must be positive".into()));
    }
    let contour = rectangle_contour(rect, samples_per_side);
    let values = contour
        .par_iter()
        .map(|&z| {
            let v = ev.eval(ComplexPoint::from_complex(z))?;
            if v.abs() <= 3.0 * v.error_estimate || v.abs() == 0.0 {
                return Err(Error::ZeroOnContour { re: z.re, im: z.im, value_abs: v.abs() });
            }
            Ok(v.to_complex())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = 0.0;
    for j in 0..values.len() {
        let step = (values[(j + 1) % values.len()] / values[j]).arg();
        if step.abs() >= 0.5 * PI {
            return Err(Error::PhaseJumpTooLarge { jump: step });
        }
        total += step;
    }
    let turns = (total / (2.0 * PI)).round();
    if turns < 0.0 {
        return Err(Error::InvalidArgument(format!("negative winding {turns} for an entire function")));
    }
    Ok(turns as u32)
}

/// Winding count with automatic doubling of the sampling on phase jumps.
pub fn winding_count_adaptive<E: Evaluator + ?Sized>(
    ev: &E,
    rect: Rectangle,
    samples_per_side: usize,
    max_doublings: u32,
) -> Result<(u32, usize)> {
    let mut samples = samples_per_side;
    let mut attempt = 0;
    loop {
        match winding_count(ev, rect, samples) {
            Err(Error::PhaseJumpTooLarge { .. }) if attempt < max_doublings => {
                samples *= 2;
                attempt += 1;
            }
            other => return other.map(|c| (c, samples)),
        }
    }
}

/// Scan-and-refine on `[0, R]` plus winding count on `[−R, R] × [−Y, Y]`.
pub fn certify_zeros<E: Evaluator + ?Sized>(
    ev: &E,
    r: f64,
    y: f64,
    step: f64,
    options: &CertifyOptions,
) -> Result<ZeroReport> {
    let f = real_axis(ev);
    let (v0, e0) = f(0.0)?;
    let zero_at_origin = v0.abs() <= e0;
    let rectangle = Rectangle { half_width: r, half_height: y };
    let (winding, samples_per_side) =
        winding_count_adaptive(ev, rectangle, options.samples_per_side, options.max_doublings)?;

    let predicted = |count: usize| 2 * count as u32 + u32::from(zero_at_origin);
    let mut scan_step = step;
    let mut brackets = scan_real_zeros(&f, r, scan_step)?;
    let mut halvings = 0;
    while predicted(brackets.len()) < winding && halvings < options.max_step_halvings {
        scan_step *= 0.5;
        halvings += 1;
        brackets = scan_real_zeros(&f, r, scan_step)?;
    }
    let refined = brackets
        .par_iter()
        .map(|&b| refine_zero(&f, b, options.refine_tol))
        .collect::<Result<Vec<_>>>()?;
    let (real_zeros, zero_tols) = refined.iter().map(|z| (z.zero, z.tol)).unzip();

    let mut report = ZeroReport {
        interval: [0.0, r],
        real_zeros,
        zero_tols,
        zero_at_origin,
        refine_tol: options.refine_tol,
        rectangle,
        winding_count: winding,
        samples_per_side,
        scan_step,
        certified: false,
        notes: Vec::new(),
    };
    report.certified = report.winding_count == report.expected_winding();
    if !report.certified {
        report.notes.push(format!(
            "winding count {} but real zeros account for {}: non-real zeros, a sign-change pair closer than step {scan_step}, or a multiple zero",
            report.winding_count,
            report.expected_winding()
        ));
    }
    Ok(report)
}

/// Default real-axis scan step for a transform.
pub fn default_step(transform: &Transform) -> f64 {
    PI / (4.0 * transform.support_scale())
}

pub fn certify_real_zeros(
    transform: &Transform,
    r: f64,
    y: f64,
    settings: &QuadratureSettings,
    options: &CertifyOptions,
) -> Result<ZeroReport> {
    let step = options.step.unwrap_or_else(|| default_step(transform));
    certify_zeros(&transform.evaluator(*settings), r, y, step, options)
}

/// A half-width `R` lying midway between the `count`-th and `(count+1)`-th
/// positive zeros, so that `[0, R]` holds exactly `count` zeros and the
/// contour stays clear of them.
pub fn choose_window<E: Evaluator + ?Sized>(ev: &E, count: usize, step: f64, r_max: f64) -> Result<f64> {
    if count == 0 {
        return Err(Error::InvalidArgument("window must hold at least one zero".into()));
    }
    if !(step > 0.0 && r_max > 0.0) {
        return Err(Error::InvalidArgument("window search needs step > 0 and r_max > 0".into()));
    }
    let f = real_axis(ev);
    // Extend the scan a few steps at a time so it never reaches past the
    // zero it needs into the quadrature noise floor.
    const CHUNK: f64 = 8.0;
    let mut samples = sample_signs(&f, 0.0, (CHUNK * step).min(r_max), step)?;
    let brackets = loop {
        let brackets = sign_changes(&samples);
        if brackets.len() > count {
            break brackets;
        }
        let reach = samples.last().map_or(0.0, |s| s.0);
        if reach >= r_max {
            return Err(Error::InvalidArgument(format!(
                "found {} sign changes below {r_max}, need more than {count}",
                brackets.len()
            )));
        }
        let next = sample_signs(&f, reach, (reach + CHUNK * step).min(r_max), step)?;
        samples.extend_from_slice(&next[1..]);
    };
    let (p, q) = (brackets[count - 1], brackets[count]);
    Ok(0.25 * (p.a + p.b + q.a + q.b))
}

/// Least-squares slope of `ln ln max_{|z|=r} |F(z)|` against `ln r`, from 64
/// samples per circle.
pub fn estimate_order<E: Evaluator + ?Sized>(ev: &E, radii: &[f64]) -> Result<f64> {
    if radii.len() < 3 || radii.windows(2).any(|p| !(p[0] < p[1])) || radii[0] <= 0.0 {
        return Err(Error::TooFewRadii);
    }
    const POINTS: usize = 64;
    let mut xs = Vec::with_capacity(radii.len());
    let mut ys = Vec::with_capacity(radii.len());
    for &r in radii {
        let max_abs = (0..POINTS)
            .into_par_iter()
            .map(|j| {
                let z = Complex64::from_polar(r, 2.0 * PI * j as f64 / POINTS as f64);
                Ok(ev.eval(ComplexPoint::from_complex(z))?.abs())
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        if !(max_abs > 1.0) || !max_abs.is_finite() {
            return Err(Error::OrderDomain { radius: r, max_abs });
        }
        xs.push(r.ln());
        ys.push(max_abs.ln().ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::ComplexValue;

    fn cosine(t: f64) -> Result<(f64, f64)> {
        Ok((t.cos(), 1e-15))
    }

    fn poly(f: impl Fn(Complex64) -> Complex64 + Sync) -> impl Evaluator {
        move |z: ComplexPoint| Ok(ComplexValue::exact(f(z.to_complex())))
    }

    #[test]
    fn cosine_scan_and_refine() {
        let br = scan_real_zeros(&cosine, 10.0, 0.1).unwrap();
        assert_eq!(br.len(), 3);
        let z = refine_zero(&cosine, Bracket { a: 1.5, b: 1.6 }, 1e-10).unwrap();
        assert!((z.zero - 1.5707963268).abs() < 1e-10);
        assert_eq!(z.tol, 1e-10);
        for (b, k) in br.iter().zip([1.0, 3.0, 5.0]) {
            let z = refine_zero(&cosine, *b, 1e-12).unwrap();
            assert!((z.zero - k * PI / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_bracket_is_rejected() {
        assert!(matches!(
            refine_zero(&cosine, Bracket { a: 1.0, b: 1.0 }, 1e-10),
            Err(Error::InvalidBracket { .. })
        ));
        assert!(matches!(
            refine_zero(&cosine, Bracket { a: 0.0, b: 1.0 }, 1e-10),
            Err(Error::LostBracket { .. })
        ));
    }

    #[test]
    fn noise_band_widens_the_reported_tolerance() {
        // A line through 0.3 whose values below 1e-6 are indistinguishable from noise.
        let noisy = |t: f64| Ok((t - 0.3, 1e-6));
        let z = refine_zero(&noisy, Bracket { a: 0.0, b: 1.0 }, 1e-12).unwrap();
        assert!((z.zero - 0.3).abs() <= z.tol);
        assert!(z.tol >= 1e-6 && z.tol < 2e-6);
    }

    #[test]
    fn inconclusive_sample_is_reported() {
        let flat = |_t: f64| Ok((0.0, 1e-10));
        assert!(matches!(scan_real_zeros(&flat, 1.0, 0.1), Err(Error::InconclusiveSample { .. })));
    }

    #[test]
    fn winding_of_polynomials() {
        let rect = Rectangle { half_width: 2.0, half_height: 1.0 };
        assert_eq!(winding_count(&poly(|z| z * z - 1.0), rect, 100).unwrap(), 2);
        assert_eq!(winding_count(&poly(|z| z * z + 4.0), rect, 100).unwrap(), 0);
        assert_eq!(winding_count(&poly(|z| z * z * z), rect, 100).unwrap(), 3);
    }

    #[test]
    fn zero_on_contour_and_phase_jump() {
        let rect = Rectangle { half_width: 1.0, half_height: 1.0 };
        assert!(matches!(
            winding_count(&poly(|z| z - 1.0), rect, 100),
            Err(Error::ZeroOnContour { .. })
        ));
        assert!(matches!(
            winding_count(&poly(|z| z.powu(12) + 0.5), rect, 2),
            Err(Error::PhaseJumpTooLarge { .. })
        ));
        let (count, used) = winding_count_adaptive(&poly(|z| z.powu(12) + 0.5), rect, 2, 8).unwrap();
        assert_eq!(count, 12);
        assert!(used > 2);
    }

    #[test]
    fn constant_has_order_zero() {
        let c = poly(|_| Complex64::new(5.0, 0.0));
        assert!(estimate_order(&c, &[4.0, 8.0, 16.0]).unwrap().abs() < 1e-12);
        assert_eq!(estimate_order(&c, &[4.0, 8.0]), Err(Error::TooFewRadii));
    }

    #[test]
    fn mismatch_is_a_report_not_an_error() {
        // z^2 + 1/4 on the real axis never changes sign but has zeros at ±i/2.
        let ev = poly(|z| z * z + 0.25);
        let r = certify_zeros(&ev, 3.0, 1.0, 0.1, &CertifyOptions::default()).unwrap();
        assert!(r.real_zeros.is_empty());
        assert_eq!(r.winding_count, 2);
        assert!(!r.certified);
        assert_eq!(r.notes.len(), 1);
    }
}
