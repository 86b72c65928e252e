//! Property tests for the field dynamics invariants.

use gridfield::kfield::{
    attachment_probabilities, evolve_constant_m, k_case3_exact, k_case3_first_order,
    EvolutionParams, GradientHistory, SumMode,
};
use proptest::prelude::*;

fn positive_field() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-6..1e6f64, 1..200)
}

proptest! {
    #[test]
    fn probabilities_sum_to_one(k in positive_field()) {
        let p = attachment_probabilities(&k).unwrap();
        let sum: f64 = p.iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-12);
        prop_assert_eq!(p.len(), k.len());
        prop_assert!(p.iter().all(|&v| v > 0.0 && v <= 1.0));
    }

    #[test]
    fn constant_m_preserves_ratios(
        c in prop::collection::vec(1e-3..1e3f64, 2..50),
        m in -5.0..5.0f64,
        s in 0.1..100.0f64,
        t in 0.0..10.0f64,
    ) {
        let k = evolve_constant_m(&c, m, s, t).unwrap();
        for i in 1..c.len() {
            let before = c[i] / c[0];
            let after = k[i] / k[0];
            prop_assert!(
                (after - before).abs() <= 1e-12 * before.abs(),
                "ratio drifted: {} vs {}", after, before
            );
        }
    }

    #[test]
    fn case3_monotone_decreasing_in_viscosity(
        c in 0.1..10.0f64,
        m1 in 0.01..1.0f64,
        m2 in 0.01..1.0f64,
        s in 0.5..10.0f64,
        l1 in 0.01..1.0f64,
    ) {
        // t chosen so the history satisfies Cauchy-Schwarz with l2sq = l1^2 / t
        let t = 1.0;
        let l2sq = l1 * l1 / t;
        let hist = GradientHistory::new(l1, l2sq, t).unwrap();
        let mut prev = f64::INFINITY;
        for mu in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let params = EvolutionParams::new(0.0, m1, m2, s, mu, SumMode::FixedS).unwrap();
            let k = k_case3_exact(c, &params, &hist).unwrap();
            prop_assert!(k < prev, "k not decreasing in mu: {} then {}", prev, k);
            prev = k;
        }
    }

    #[test]
    fn case3_first_order_gap_bound(
        c in 0.1..10.0f64,
        m0 in -0.2..0.2f64,
        m1 in 0.0..0.3f64,
        m2 in 0.0..0.3f64,
        l1 in 0.0..0.5f64,
    ) {
        let t = 1.0;
        let l2sq = if l1 > 0.0 { l1 * l1 / t } else { 0.0 };
        let hist = GradientHistory::new(l1, l2sq, t).unwrap();
        let params = EvolutionParams::new(m0, m1, m2, 1.0, 1.0, SumMode::FixedS).unwrap();
        let arg = m0 * t + m1 * l1 + m2 * l2sq;
        prop_assume!(arg > -0.9);
        let exact = k_case3_exact(c, &params, &hist).unwrap();
        let lin = k_case3_first_order(c, &params, &hist).unwrap();
        let bound = c * (arg * arg / 2.0) * arg.abs().exp() + 1e-15 * c;
        prop_assert!((exact - lin).abs() <= bound,
            "gap {} exceeds Taylor bound {} at arg {}", (exact - lin).abs(), bound, arg);
    }
}

// Larger-scale normalization check than proptest shrinking can afford, with
// field sizes up to 10^4.
#[test]
fn probabilities_normalize_large_fields() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let m = rng.gen_range(1..=10_000);
        let k: Vec<f64> = (0..m).map(|_| rng.gen_range(1e-9..1e9f64)).collect();
        let p = attachment_probabilities(&k).unwrap();
        let sum: f64 = p.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12, "M = {m}, sum = {sum}");
    }
}
