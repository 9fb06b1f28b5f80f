mod common;

use common::{bh_brute, bonferroni_brute, dual_brute, ks_uniform};
use iteb::simulation::{Design, Noise, ScenarioConfig, ScenarioGenerator, VarianceSource};
use iteb::testing::{bh, bonferroni, dual_threshold, oracle_reject, pvalues};
use iteb::{student_t_sf, GeneSummary};
use proptest::prelude::*;

fn pvals() -> impl Strategy<Value = Vec<f64>> {
    // A coarse grid mixed with continuous values produces ties.
    prop::collection::vec(
        prop_oneof![
            (0u32..=20).prop_map(|k| k as f64 / 200.0),
            1e-6f64..1.0,
            Just(1.0),
        ],
        0..=10,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn bh_matches_definition(p in pvals(), alpha in 0.001f64..0.5) {
        prop_assert_eq!(bh(&p, alpha), bh_brute(&p, alpha));
    }

    #[test]
    fn bonferroni_and_dual_match_definition(p in pvals(), a1 in 0.001f64..0.5, a2 in 0.0f64..=1.0) {
        prop_assert_eq!(bonferroni(&p, a1), bonferroni_brute(&p, a1));
        prop_assert_eq!(dual_threshold(&p, a1, a2), dual_brute(&p, a1, a2));
        prop_assert_eq!(dual_threshold(&p, a1, 1.0), bh(&p, a1));
    }

    #[test]
    fn bh_is_nested_in_alpha(p in pvals(), a in 0.001f64..0.5, b in 0.001f64..0.5) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let small = bh(&p, lo);
        let large = bh(&p, hi);
        prop_assert!(small.iter().all(|i| large.contains(i)));
    }

    #[test]
    fn rejections_are_down_sets(p in pvals(), alpha in 0.001f64..0.5) {
        for set in [bh(&p, alpha), bonferroni(&p, alpha)] {
            for &i in &set {
                for j in 0..p.len() {
                    if p[j] <= p[i] {
                        prop_assert!(set.contains(&j));
                    }
                }
            }
        }
    }

    #[test]
    fn pvalues_decrease_in_effect_size(a in 0.0f64..5.0, b in 0.0f64..5.0, s2 in 0.01f64..3.0, tau2 in 0.0f64..3.0) {
        let g = |x: f64| GeneSummary::new("g", x, s2, 5.0).unwrap();
        let p = pvalues(&[g(a), g(-b)], tau2).unwrap();
        prop_assert!(p.iter().all(|&x| x > 0.0 && x <= 1.0));
        if a <= b {
            prop_assert!(p[1] <= p[0]);
        } else {
            prop_assert!(p[0] <= p[1]);
        }
    }
}

#[test]
fn zero_spread_reduces_to_t_test() {
    let s: Vec<GeneSummary> = (0..20)
        .map(|i| GeneSummary::new("g", i as f64 * 0.3 - 3.0, 0.5 + 0.05 * i as f64, 3.0 + i as f64).unwrap())
        .collect();
    let p = pvalues(&s, 0.0).unwrap();
    for (g, p) in s.iter().zip(p) {
        let t = g.xbar.abs() / g.s2.sqrt();
        assert!((p - 2.0 * student_t_sf(t, g.df_sigma).unwrap()).abs() < 1e-14);
    }
}

#[test]
fn oracle_rule_equals_pvalue_rule() {
    let s: Vec<GeneSummary> = (0..200)
        .map(|i| {
            let x = ((i * 7919) % 400) as f64 / 50.0 - 4.0;
            GeneSummary::new("g", x, 0.1 + (i % 13) as f64 * 0.1, 2.0 + (i % 7) as f64).unwrap()
        })
        .collect();
    for &(tau2, alpha) in &[(0.0, 0.05), (0.7, 0.01), (2.0, 0.2)] {
        let r = oracle_reject(&s, tau2, alpha).unwrap();
        let p = pvalues(&s, tau2).unwrap();
        let disagreements = r.iter().zip(&p).filter(|(r, p)| **r != (**p <= alpha)).count();
        assert_eq!(disagreements, 0, "tau2={tau2} alpha={alpha}");
    }
}

#[test]
fn null_pvalues_are_uniform_at_true_spread() {
    let cfg = ScenarioConfig {
        n_genes: 10_000,
        m1: 5,
        m0: 5,
        gamma: 0.0,
        tau: 1.0,
        noise: Noise::Gaussian,
        variance_source: VarianceSource::Chisq1,
        design: Design::TwoSamplePooled,
        seed: 4242,
        reps: 1,
    };
    let (_, s) = ScenarioGenerator::new(&cfg).unwrap().summaries(0).unwrap();
    let p = pvalues(&s, 1.0).unwrap();
    let d = ks_uniform(&p);
    assert!(d < 0.02, "KS distance {d}");
}
