//! Truncated product representations `c · ∏ (1 − z²/α_r²)` built from
//! certified zero sets, their comparison against the transform they came
//! from, and the quotient `G_n = H_n / F_4` as a multiset difference of zeros.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::approx::polar_grid;
use crate::error::{Error, Result};
use crate::transform::{ComplexPoint, ComplexValue, Evaluator};
use crate::zeros::ZeroReport;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductRep {
    pub c: f64,
    pub zeros: Vec<f64>,
    /// The zero list is complete up to this radius.
    pub truncation_r: f64,
}

impl ProductRep {
    pub fn new(c: f64, mut zeros: Vec<f64>, truncation_r: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::NonPositiveConstant(c));
        }
        zeros.sort_by(f64::total_cmp);
        if zeros.iter().any(|z| !(*z > 0.0 && *z <= truncation_r)) {
            return Err(Error::InvalidArgument("zeros must lie in (0, truncation_r]".into()));
        }
        Ok(ProductRep { c, zeros, truncation_r })
    }
}

/// `c = F(0)` and the certified positive zeros.
pub fn build_product<E: Evaluator + ?Sized>(ev: &E, report: &ZeroReport) -> Result<ProductRep> {
    if !report.certified {
        return Err(Error::NotCertified);
    }
    let c = ev.eval(ComplexPoint::real(0.0))?.re;
    ProductRep::new(c, report.real_zeros.clone(), report.rectangle.half_width)
}

/// The truncated product at `z`; exact apart from floating-point rounding.
pub fn eval_product(rep: &ProductRep, z: ComplexPoint) -> ComplexValue {
    let z2 = z.to_complex() * z.to_complex();
    let p = rep
        .zeros
        .iter()
        .fold(Complex64::new(rep.c, 0.0), |acc, a| acc * (1.0 - z2 / (a * a)));
    ComplexValue::exact(p)
}

/// `max |F(z) − P(z)| / (|F(z)| + |F(0)|)` over a polar grid of `|z| ≤ test_radius`.
pub fn compare_product<E: Evaluator + ?Sized>(
    ev: &E,
    rep: &ProductRep,
    test_radius: f64,
    grid: usize,
) -> Result<f64> {
    let f0 = ev.eval(ComplexPoint::real(0.0))?.abs();
    let devs = polar_grid(test_radius, grid)
        .par_iter()
        .map(|&z| {
            let f = ev.eval(z)?;
            let p = eval_product(rep, z);
            Ok((f.to_complex() - p.to_complex()).norm() / (f.abs() + f0))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(devs.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quotient {
    pub rep: ProductRep,
    /// Divisor zeros that had more than one dividend zero within `match_tol`.
    pub ambiguous: Vec<f64>,
}

/// `h / f4` as a multiset difference of zeros; every divisor zero must be
/// matched one-for-one by a dividend zero within `match_tol`.
pub fn divide_products(h: &ProductRep, f4: &ProductRep, match_tol: f64) -> Result<Quotient> {
    let mut remaining = h.zeros.clone();
    let mut ambiguous = Vec::new();
    for &b in &f4.zeros {
        let candidates: Vec<usize> = remaining
            .iter()
            .enumerate()
            .filter(|(_, a)| (**a - b).abs() <= match_tol)
            .map(|(i, _)| i)
            .collect();
        if candidates.len() > 1 {
            ambiguous.push(b);
        }
        let Some(&best) = candidates
            .iter()
            .min_by(|&&i, &&j| (remaining[i] - b).abs().total_cmp(&(remaining[j] - b).abs()))
        else {
            return Err(Error::UnmatchedDivisorZero { zero: b, tol: match_tol });
        };
        remaining.remove(best);
    }
    let rep = ProductRep::new(h.c / f4.c, remaining, h.truncation_r.min(f4.truncation_r))?;
    Ok(Quotient { rep, ambiguous })
}

/// Matches two zero multisets one-for-one; returns the largest pairing distance.
pub fn match_zero_sets(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Some(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zeros::Rectangle;

    fn rep(c: f64, zeros: &[f64]) -> ProductRep {
        ProductRep::new(c, zeros.to_vec(), 10.0).unwrap()
    }

    #[test]
    fn eval_examples() {
        let r = rep(3.0, &[1.0, 2.0]);
        assert_eq!(eval_product(&r, ComplexPoint::real(0.0)).re, 3.0);
        assert_eq!(eval_product(&rep(3.0, &[1.0]), ComplexPoint::real(1.0)).abs(), 0.0);
        let v = eval_product(&r, ComplexPoint::new(0.0, -1.0));
        assert!((v.re - 7.5).abs() < 1e-15 && v.im.abs() < 1e-15);
        assert_eq!(v.error_estimate, 0.0);
        let z = ComplexPoint::new(0.7, 0.4);
        assert_eq!(eval_product(&r, z), eval_product(&r, z.neg()));
    }

    #[test]
    fn divide_examples() {
        let q = divide_products(&rep(6.0, &[1.0, 2.0, 3.0]), &rep(2.0, &[2.0]), 1e-6).unwrap();
        assert_eq!(q.rep.zeros, vec![1.0, 3.0]);
        assert_eq!(q.rep.c, 3.0);
        assert!(q.ambiguous.is_empty());
        let same = rep(2.5, &[1.0, 2.0]);
        let q = divide_products(&same, &same, 1e-6).unwrap();
        assert!(q.rep.zeros.is_empty());
        assert_eq!(q.rep.c, 1.0);
        assert!(matches!(
            divide_products(&rep(1.0, &[1.0]), &rep(1.0, &[1.5]), 1e-6),
            Err(Error::UnmatchedDivisorZero { .. })
        ));
    }

    #[test]
    fn multiset_semantics_and_ambiguity() {
        let q = divide_products(&rep(1.0, &[2.0, 2.0, 5.0]), &rep(1.0, &[2.0]), 1e-6).unwrap();
        assert_eq!(q.rep.zeros, vec![2.0, 5.0]);
        assert_eq!(q.ambiguous, vec![2.0]);
    }

    #[test]
    fn uncertified_report_is_rejected() {
        let report = ZeroReport {
            interval: [0.0, 1.0],
            real_zeros: vec![],
            zero_tols: vec![],
            zero_at_origin: false,
            refine_tol: 1e-10,
            rectangle: Rectangle { half_width: 1.0, half_height: 1.0 },
            winding_count: 2,
            samples_per_side: 10,
            scan_step: 0.1,
            certified: false,
            notes: vec![],
        };
        let ev = |_z: ComplexPoint| Ok(ComplexValue::new(1.0, 0.0, 0.0));
        assert_eq!(build_product(&ev, &report), Err(Error::NotCertified));
    }

    #[test]
    fn product_compared_with_itself() {
        let r = rep(2.0, &[1.5, 4.0]);
        let ev = |z: ComplexPoint| Ok(eval_product(&r, z));
        assert_eq!(compare_product(&ev, &r, 1.0, 6).unwrap(), 0.0);
    }
}
