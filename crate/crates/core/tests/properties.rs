//! Property-based invariants of the numerics, Bayes factor, power, sample
//! size and simulation modules.

use approx::assert_relative_eq;
use bfdesign::bf::{bf01, bf01_point_linear};
use bfdesign::mc::{simulate_power, Condition, McConfig};
use bfdesign::model::{predictive_sd, AnalysisPrior as GenericPrior};
use bfdesign::numerics::{
    find_root, integrate, lambert_w, ln_t_density, nct_density, std_normal_cdf, std_normal_quantile, t_density, Branch,
};
use bfdesign::power::{power, PowerQuery};
use bfdesign::ssd::{feasibility, n_for, n_local_normal};
use bfdesign::{AnalysisPrior, DesignPrior, EstimateInput, Error, TestSpec, Threshold};
use proptest::prelude::*;

fn spec(null: f64, k: f64, s2: f64) -> TestSpec {
    TestSpec::new(null, Threshold::from_k(k).unwrap(), s2).unwrap()
}

fn h1_k() -> impl Strategy<Value = f64> {
    (-7.0f64..-0.1).prop_map(f64::exp)
}

fn any_k() -> impl Strategy<Value = f64> {
    prop_oneof![h1_k(), (0.1f64..7.0).prop_map(f64::exp)]
}

fn analysis_prior() -> impl Strategy<Value = AnalysisPrior> {
    prop_oneof![
        (0.1f64..1.5, any::<bool>()).prop_map(|(m, neg)| AnalysisPrior::point(if neg { -m } else { m }).unwrap()),
        (-1.0f64..1.0, 0.05f64..2.0).prop_map(|(m, s)| AnalysisPrior::normal(m, s).unwrap()),
        (0.05f64..1.5).prop_map(|s| AnalysisPrior::normal_moment(s).unwrap()),
    ]
}

fn design_prior() -> impl Strategy<Value = DesignPrior> {
    (-1.0f64..1.0, prop_oneof![Just(0.0), 0.01f64..0.8]).prop_map(|(m, s)| DesignPrior::normal(m, s).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    // Φ(x) keeps enough resolution to recover x to 1e-9 up to about 5.6
    #[test]
    fn quantile_inverts_cdf(x in -8.0f64..5.5) {
        let back = std_normal_quantile(std_normal_cdf(x)).unwrap();
        prop_assert!((back - x).abs() <= 1e-9, "x {x} back {back}");
    }

    #[test]
    fn cdf_inverts_quantile(logp in -700.0f64..-1e-12) {
        let p = logp.exp();
        let x = std_normal_quantile(p).unwrap();
        prop_assert!((std_normal_cdf(x) / p - 1.0).abs() <= 1e-12, "p {p}");
    }

    #[test]
    fn lambert_identity_principal(y in prop_oneof![-(-1.0f64).exp()..0.0, (-25.0f64..25.0).prop_map(f64::exp)]) {
        let w = lambert_w(y, Branch::Principal).unwrap();
        prop_assert!(w >= -1.0);
        prop_assert!(((w * w.exp() - y) / y).abs() <= 1e-11);
    }

    #[test]
    fn lambert_identity_non_principal(y in prop_oneof![-(-1.0f64).exp()..-1e-300, (-690.0f64..-1.0).prop_map(|l| -l.exp())]) {
        let w = lambert_w(y, Branch::NonPrincipal).unwrap();
        prop_assert!(w <= -1.0);
        prop_assert!(((w * w.exp() - y) / y).abs() <= 1e-11);
    }

    #[test]
    fn central_nct_is_student_t(x in -30.0f64..30.0, df in prop::sample::select(vec![1.0f64, 5.0, 30.0])) {
        let nct = nct_density(x, df, 0.0).unwrap();
        assert_relative_eq!(nct, ln_t_density(x, df).exp(), max_relative = 1e-12);
    }

    #[test]
    fn point_forms_agree(est in -5.0f64..5.0, null in -1.0f64..1.0, mean in -2.0f64..2.0, se in 0.05f64..3.0) {
        let input = EstimateInput::StandardError { estimate: est, se };
        let a = bf01(&input, null, &AnalysisPrior::point(mean).unwrap()).unwrap();
        let b = bf01_point_linear(&input, null, mean).unwrap();
        prop_assert!((a.ln - b.ln).abs() <= 1e-10 * (1.0 + a.ln.abs()));
    }

    #[test]
    fn point_prior_is_the_normal_limit(est in -3.0f64..3.0, mean in -2.0f64..2.0, se in 0.1f64..3.0) {
        let input = EstimateInput::StandardError { estimate: est, se };
        let point = bf01(&input, 0.0, &AnalysisPrior::point(mean).unwrap()).unwrap().value();
        let near = bf01(&input, 0.0, &AnalysisPrior::normal(mean, 1e-8).unwrap()).unwrap().value();
        assert_relative_eq!(near, point, max_relative = 1e-4);
    }

    #[test]
    fn prior_text_round_trips(prior in analysis_prior(), design in design_prior()) {
        prop_assert_eq!(prior.to_string().parse::<AnalysisPrior>().unwrap(), prior);
        prop_assert_eq!(design.to_string().parse::<DesignPrior>().unwrap(), design);
    }

    #[test]
    fn predictive_sd_decreases_to_design_sd(design in design_prior(), n in 1.0f64..1e6, s2 in 0.5f64..5.0) {
        let a = predictive_sd(&design, n, s2);
        let b = predictive_sd(&design, 2.0 * n, s2);
        prop_assert!(b <= a);
        prop_assert!(b >= design.sd);
        prop_assert_eq!(predictive_sd(&design, f64::INFINITY, s2), design.sd);
    }

    #[test]
    fn power_is_a_probability(
        prior in analysis_prior(), design in design_prior(), k in any_k(),
        s2 in 0.5f64..5.0, n in (0.0f64..14.0).prop_map(f64::exp),
    ) {
        let r = power(&PowerQuery::new(spec(0.0, k, s2), prior, design, n)).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.probability), "{r:?}");
        prop_assert_eq!(r.probability + r.complement().probability, 1.0);
    }

    #[test]
    fn normal_analysis_power_tends_to_one(
        m in -1.0f64..1.0, s in 0.1f64..2.0, k in h1_k(),
        dm in prop_oneof![-1.0f64..-0.1, 0.1f64..1.0], ds in 0.0f64..0.25,
    ) {
        // the design must not put appreciable mass right at the null, and evidence
        // for H0 under the null design tends to one only logarithmically in n
        let design = DesignPrior::normal(dm, ds * dm.abs()).unwrap();
        let r = power(&PowerQuery::new(spec(0.0, k, 2.0), AnalysisPrior::normal(m, s).unwrap(), design, 1e8)).unwrap();
        prop_assert!(r.probability >= 1.0 - 1e-3, "{r:?}");
    }

    #[test]
    fn bayes_factors_are_generic(est in -3.0f64..3.0, se in 0.1f64..2.0, m in -1.0f64..1.0, s in 0.1f64..2.0) {
        let wide = bf01(&EstimateInput::StandardError { estimate: est, se }, 0.0, &AnalysisPrior::normal(m, s).unwrap()).unwrap();
        let narrow = bf01(
            &bfdesign::bf::EstimateInput::StandardError { estimate: est as f32, se: se as f32 },
            0.0,
            &GenericPrior::<f32>::normal(m as f32, s as f32).unwrap(),
        ).unwrap();
        prop_assert!((f64::from(narrow.ln) - wide.ln).abs() <= 1e-4 * (1.0 + wide.ln.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // below one degree of freedom the |x|^-(1+df) tails are too heavy for
    // quadrature on an infinite range to reach 1e-8
    #[test]
    fn truncated_t_integrates_to_one(
        df in 1.0f64..40.0, loc in -2.0f64..2.0, scale in 0.1f64..3.0,
        bounds in prop_oneof![
            Just((f64::NEG_INFINITY, f64::INFINITY)),
            (-3.0f64..3.0).prop_map(|a| (a, f64::INFINITY)),
            (-3.0f64..3.0).prop_map(|b| (f64::NEG_INFINITY, b)),
            (-3.0f64..0.0, 0.1f64..4.0).prop_map(|(a, w)| (a, a + w)),
        ],
    ) {
        let (a, b) = bounds;
        let mass = integrate(|x| t_density(x, df, loc, scale, a, b).unwrap(), a, b, 1e-11).unwrap();
        prop_assert!((mass - 1.0).abs() <= 1e-8, "mass {mass}");
    }

    #[test]
    fn matched_point_power_increases(mu in 0.1f64..1.5, k in h1_k(), s2 in 0.5f64..5.0, ds in 0.0f64..0.5) {
        let q = PowerQuery::new(spec(0.0, k, s2), AnalysisPrior::point(mu).unwrap(), DesignPrior::normal(mu, ds).unwrap(), 1.0);
        let mut last = 0.0;
        for i in 0..=80 {
            let n = 10f64.powf(i as f64 / 20.0);
            let p = power(&q.at(n)).unwrap().probability;
            prop_assert!(p >= last - 1e-12, "n {n}: {p} < {last}");
            last = p;
        }
    }

    #[test]
    fn point_and_normal_designs_cross_at_one_half(mu in 0.1f64..1.5, k in h1_k(), s2 in 0.5f64..5.0, ds in 0.01f64..0.5) {
        let t = spec(0.0, k, s2);
        let a = AnalysisPrior::point(mu).unwrap();
        let fixed = PowerQuery::new(t.clone(), a, DesignPrior::point(mu).unwrap(), 1.0);
        let spread = PowerQuery::new(t, a, DesignPrior::normal(mu, ds).unwrap(), 1.0);
        let half = find_root(|n: f64| power(&fixed.at(n)).unwrap().probability - 0.5, 1e-6, 1e9, 1e-12).unwrap();
        prop_assert!((power(&fixed.at(half)).unwrap().probability - 0.5).abs() <= 1e-6);
        prop_assert!((power(&spread.at(half)).unwrap().probability - 0.5).abs() <= 1e-3);
    }

    #[test]
    fn closed_forms_invert_the_power(
        null in -0.5f64..0.5, delta in 0.2f64..1.5, k in h1_k(), s2 in 0.5f64..5.0,
        shift in -0.1f64..0.3, ds in prop_oneof![Just(0.0), 0.01f64..0.3], target in 0.5f64..0.99,
    ) {
        let mu = null + delta;
        let t = spec(null, k, s2);
        let a = AnalysisPrior::point(mu).unwrap();
        let d = DesignPrior::normal(mu + shift * delta, ds * delta).unwrap();
        match n_for(&t, &a, &d, target) {
            Ok(r) => {
                let p = power(&PowerQuery::new(t.clone(), a, d, r.n_real)).unwrap().probability;
                prop_assert!((p - target).abs() <= 1e-8, "{r:?} gives {p}");
                prop_assert!(r.achieved_power >= target - 1e-9);
            }
            Err(Error::Infeasible { .. }) => {
                prop_assert!(!feasibility(&t, &a, &d, target).unwrap().is_feasible());
                prop_assert!(power(&PowerQuery::new(t, a, d, 1e8)).unwrap().probability < target);
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn lambert_approximation_is_close(k in h1_k(), target in 0.5f64..0.95, s2 in 0.5f64..4.0, tau in 0.2f64..2.0) {
        match n_local_normal(k, target, s2, tau) {
            Ok(r) => {
                let q = PowerQuery::new(spec(0.0, k, s2), AnalysisPrior::normal(0.0, tau).unwrap(), DesignPrior::normal(0.0, tau).unwrap(), 1.0);
                // dropping the 1 in log(1 + n/m) costs O(1/n_kβ) in power
                let nkb = r.unit_information_n.unwrap();
                if nkb >= 10.0 {
                    let at_real = power(&q.at(r.n_real)).unwrap().probability;
                    prop_assert!((at_real - target).abs() <= 0.1 / nkb, "{r:?}: {at_real}");
                }
                // the exact refinement always reaches the target
                let refined = r.refined.unwrap();
                let exact = power(&q.at(refined.n_integer as f64)).unwrap().probability;
                prop_assert!(exact >= target - 1e-9, "{r:?}: {exact}");
            }
            Err(Error::Infeasible { limit, .. }) => prop_assert!(target < limit),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn searched_sample_sizes_reach_the_target(
        prior in analysis_prior(), design in design_prior(), k in any_k(), target in 0.5f64..0.95,
    ) {
        let t = spec(0.0, k, 2.0);
        match n_for(&t, &prior, &design, target) {
            Ok(r) => {
                let p = power(&PowerQuery::new(t, prior, design, r.n_integer as f64)).unwrap().probability;
                prop_assert!(p >= target - 1e-9, "{r:?}: {p}");
            }
            // either the limit is below the target, or a design close to the null
            // needs more than the search range allows
            Err(Error::Infeasible { .. }) => {
                prop_assert!(power(&PowerQuery::new(t, prior, design, 1e8)).unwrap().probability < target);
            }
            // power that first rises and then falls below a point analysis prior's limit
            Err(Error::NonMonotone { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn simulation_is_reproducible_and_order_free(
        prior in analysis_prior(), design in design_prior(), k in any_k(), n in 5.0f64..200.0, seed in any::<u64>(),
    ) {
        let condition = Condition::Z { test: spec(0.0, k, 2.0), analysis: prior, design, n };
        let serial = McConfig::new(condition, 9_000, seed);
        let a = simulate_power(&serial).unwrap();
        prop_assert_eq!(&simulate_power(&serial).unwrap(), &a);
        let parallel = McConfig { threads: 3, ..serial };
        prop_assert_eq!(simulate_power(&parallel).unwrap().successes, a.successes);
    }
}
