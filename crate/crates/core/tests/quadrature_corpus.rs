mod common;

use std::f64::consts::PI;

use common::gamma;
use lpfz_core::quadrature::{
    integrate_decaying, integrate_finite, integrate_interval, truncation_point, IntegralValue,
    QuadratureSettings, TrigMode,
};
use proptest::prelude::*;

struct Case {
    name: &'static str,
    exact: f64,
    /// Accuracy of `exact` itself.
    oracle_err: f64,
    run: fn(&QuadratureSettings) -> IntegralValue,
}

fn gaussian(t: f64) -> f64 {
    (-t * t).exp()
}

fn corpus() -> Vec<Case> {
    let sqrt_pi = PI.sqrt();
    vec![
        Case {
            name: "gaussian",
            exact: 0.5 * sqrt_pi,
            oracle_err: 0.0,
            run: |s| integrate_decaying(gaussian, 0.0, 0.0, TrigMode::Cos, s).unwrap(),
        },
        Case {
            name: "gaussian cos t",
            exact: 0.5 * sqrt_pi * (-0.25f64).exp(),
            oracle_err: 0.0,
            run: |s| integrate_decaying(gaussian, 0.0, 1.0, TrigMode::Cos, s).unwrap(),
        },
        Case {
            name: "gaussian cos 5t",
            exact: 0.5 * sqrt_pi * (-6.25f64).exp(),
            oracle_err: 0.0,
            run: |s| integrate_decaying(gaussian, 0.0, 5.0, TrigMode::Cos, s).unwrap(),
        },
        Case {
            name: "t gaussian sin 3t",
            exact: 0.25 * sqrt_pi * 3.0 * (-2.25f64).exp(),
            oracle_err: 0.0,
            run: |s| integrate_decaying(|t| t * gaussian(t), 0.0, 3.0, TrigMode::Sin, s).unwrap(),
        },
        Case {
            name: "exp(-t^4)",
            exact: gamma(1.25),
            oracle_err: 1e-15,
            run: |s| integrate_decaying(|t: f64| (-t.powi(4)).exp(), 0.0, 0.0, TrigMode::Cos, s).unwrap(),
        },
        Case {
            name: "exp(-t^6)",
            exact: gamma(7.0 / 6.0),
            oracle_err: 1e-15,
            run: |s| integrate_decaying(|t: f64| (-t.powi(6)).exp(), 0.0, 0.0, TrigMode::Cos, s).unwrap(),
        },
        Case {
            name: "gaussian e^{+t}",
            exact: 0.5 * sqrt_pi * 0.25f64.exp() * (1.0 + erf_half()),
            oracle_err: 1e-15,
            run: |s| integrate_decaying(gaussian, 1.0, 0.0, TrigMode::Cos, s).unwrap(),
        },
        Case {
            name: "t^2 cos 4t on [0,1]",
            exact: {
                let w: f64 = 4.0;
                ((w * w - 2.0) * w.sin() + 2.0 * w * w.cos()) / w.powi(3)
            },
            oracle_err: 0.0,
            run: |s| integrate_finite(|t| t * t, 0.0, 1.0, 4.0, TrigMode::Cos, s).unwrap(),
        },
        Case {
            name: "t sin 7t on [0,1]",
            exact: (7f64.sin() - 7.0 * 7f64.cos()) / 49.0,
            oracle_err: 0.0,
            run: |s| integrate_finite(|t| t, 0.0, 1.0, 7.0, TrigMode::Sin, s).unwrap(),
        },
        Case {
            name: "(1 - t^2/4)^3 on [0,2]",
            exact: 32.0 / 35.0,
            oracle_err: 0.0,
            run: |s| integrate_finite(|t| (1.0 - t * t / 4.0).powi(3), 0.0, 2.0, 0.0, TrigMode::Cos, s).unwrap(),
        },
        Case {
            name: "gaussian cos 200t",
            exact: 0.0,
            oracle_err: 0.0,
            run: |s| integrate_decaying(gaussian, 0.0, 200.0, TrigMode::Cos, s).unwrap(),
        },
        Case {
            name: "t^2 cos 200t on [0,1]",
            exact: {
                let w: f64 = 200.0;
                ((w * w - 2.0) * w.sin() + 2.0 * w * w.cos()) / w.powi(3)
            },
            oracle_err: 0.0,
            run: |s| integrate_finite(|t| t * t, 0.0, 1.0, 200.0, TrigMode::Cos, s).unwrap(),
        },
        Case {
            name: "t sin 150t on [0,1]",
            exact: (150f64.sin() - 150.0 * 150f64.cos()) / (150.0 * 150.0),
            oracle_err: 0.0,
            run: |s| integrate_finite(|t| t, 0.0, 1.0, 150.0, TrigMode::Sin, s).unwrap(),
        },
    ]
}

/// `erf(1/2)` from its Maclaurin series.
fn erf_half() -> f64 {
    let x: f64 = 0.5;
    let mut sum = 0.0;
    let mut term = x;
    for n in 0..40 {
        sum += term / (2 * n + 1) as f64;
        term *= -x * x / (n + 1) as f64;
    }
    2.0 / PI.sqrt() * sum
}

fn levels() -> Vec<QuadratureSettings> {
    [1e-6, 1e-8, 1e-10, 1e-12]
        .iter()
        .map(|&rel_tol| QuadratureSettings { rel_tol, ..QuadratureSettings::default() })
        .collect()
}

/// Oracle accuracy plus summation roundoff; every integrand has `∫|f| ≤ 1`.
fn slack(case: &Case) -> f64 {
    case.oracle_err + 4.0 * f64::EPSILON * case.exact.abs().max(1.0)
}

#[test]
fn error_estimate_bounds_true_error() {
    for s in levels() {
        for case in corpus() {
            let r = (case.run)(&s);
            let err = (r.value - case.exact).abs();
            assert!(
                err <= r.error_estimate + slack(&case),
                "{} at rel_tol {:e}: error {err:e} > estimate {:e}",
                case.name,
                s.rel_tol,
                r.error_estimate
            );
        }
    }
}

#[test]
fn tightening_never_hurts() {
    for case in corpus() {
        let mut rel_tol = 1e-4;
        let mut previous = f64::INFINITY;
        while rel_tol > 1e-13 {
            let s = QuadratureSettings { rel_tol, ..QuadratureSettings::default() };
            let err = ((case.run)(&s).value - case.exact).abs();
            assert!(
                err <= previous + slack(&case),
                "{}: error grew from {previous:e} to {err:e} at rel_tol {rel_tol:e}",
                case.name
            );
            previous = err;
            rel_tol *= 0.5;
        }
    }
}

#[test]
fn truncation_point_matches_bisection_oracle() {
    // e^{-T^4} / (4 T^3) = 1e-16, solved here by plain bisection.
    let g = |t: f64| -t.powi(4) - (4.0 * t.powi(3)).ln() - (1e-16f64).ln();
    let (mut lo, mut hi) = (1.0, 4.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = truncation_point(|t: f64| t.powi(4), 1e-16).unwrap();
    assert!((t - hi).abs() < 1e-9, "{t} vs {hi}");
    let g2 = truncation_point(|t: f64| t * t, 1e-16).unwrap();
    assert!(g2 > 5.0 && g2 < 7.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn linearity(a in -3.0f64..3.0, b in -3.0f64..3.0, w in 0.0f64..40.0) {
        let s = QuadratureSettings::default();
        let f = move |t: f64| (-t * t).exp() * (w * t).cos();
        let g = |t: f64| t.powi(3) * (-t).exp();
        let i_f = integrate_interval(f, 0.0, 6.0, w, &s).unwrap();
        let i_g = integrate_interval(g, 0.0, 6.0, w, &s).unwrap();
        let i_fg = integrate_interval(|t| a * f(t) + b * g(t), 0.0, 6.0, w, &s).unwrap();
        let combined = a.abs() * i_f.error_estimate + b.abs() * i_g.error_estimate + i_fg.error_estimate;
        let diff = (i_fg.value - (a * i_f.value + b * i_g.value)).abs();
        prop_assert!(diff <= combined + 8.0 * f64::EPSILON * (a.abs() + b.abs()), "{diff:e} > {combined:e}");
    }
}
