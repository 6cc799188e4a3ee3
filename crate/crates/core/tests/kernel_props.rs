use lpfz_core::kernel::{Kernel, KernelSpec};
use proptest::prelude::*;

fn arb_kernel() -> impl Strategy<Value = Kernel> {
    let parametric = (
        0.1f64..5.0,
        1u32..=4,
        prop_oneof![Just(0.0), 0.01f64..0.5],
        prop::collection::vec(0.5f64..5.0, 0..3),
    )
        .prop_filter_map("admissible", |(k, m, mu, betas)| {
            KernelSpec::Parametric { k, m, mu, betas }.validate().ok()
        });
    let cosh = (0.1f64..5.0).prop_map(|a| KernelSpec::cosh(a).validate().unwrap());
    prop_oneof![3 => parametric, 1 => cosh]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn q_is_even(kernel in arb_kernel(), t in -50.0f64..50.0) {
        prop_assert_eq!(kernel.q(t).to_bits(), kernel.q(-t).to_bits());
    }

    #[test]
    fn q_is_increasing(kernel in arb_kernel(), t1 in 1e-3f64..8.0, gap in 1e-3f64..2.0) {
        let t2 = t1 + gap;
        prop_assert!(kernel.q(t1) < kernel.q(t2));
    }

    #[test]
    fn q_prime_matches_central_differences(kernel in arb_kernel(), t in 0.1f64..10.0) {
        let h = 1e-6 * t;
        let fd = (kernel.q(t + h) - kernel.q(t - h)) / (2.0 * h);
        let d = kernel.q_prime(t);
        prop_assume!(d.is_finite() && fd.is_finite());
        prop_assert!(((fd - d) / d).abs() < 1e-6, "t = {t}: {fd} vs {d}");
        prop_assert_eq!(kernel.q_prime(-t), -d);
    }

    #[test]
    fn growth_witness_holds_on_its_range(kernel in arb_kernel()) {
        let w = kernel.growth_witness();
        let lo = w.threshold;
        for i in 0..200 {
            let t = lo + 9.0 * lo * i as f64 / 199.0;
            prop_assert!(kernel.q(t) > t.powf(2.0 + w.alpha), "t = {t}, T = {lo}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lambda_solves_the_level_equation(kernel in arb_kernel()) {
        for n in 1..=200u64 {
            let lambda = kernel.lambda_n(n);
            let residual = (kernel.q(lambda) - n as f64).abs();
            prop_assert!(residual <= 1e-10 * (n as f64).max(1.0), "n = {n}: residual {residual}");
        }
    }
}

#[test]
fn quartic_lambda_anchors() {
    let q = KernelSpec::monomial(2).validate().unwrap();
    assert!((q.lambda_n(16) - 2.0).abs() < 1e-12);
    assert!((q.lambda_n(81) - 3.0).abs() < 1e-12);
    assert!((q.lambda_n(1) - 1.0).abs() < 1e-12);
}

#[test]
fn spec_round_trips_through_json() {
    let spec = KernelSpec::Parametric { k: 2.0, m: 2, mu: 0.5, betas: vec![1.0, 3.0] };
    let text = serde_json::to_string(&spec).unwrap();
    assert!(text.contains("\"form\":\"parametric\""));
    let back: KernelSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(back, spec);
}
