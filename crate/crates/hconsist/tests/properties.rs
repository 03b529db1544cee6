use hconsist::bounds::tables::table_transform;
use hconsist::bounds::{
    constrained_enhanced_bound, evaluate_tool_bound, FactorSpec, ToolSetup, Variant, HYPOTHESIS_TOL,
};
use hconsist::dist::{
    fit_tsybakov_envelope, margin_gamma, sample_distribution, DiscreteDistribution, SampleConstraints,
};
use hconsist::experiments::{ranking_instance, train_boosting, train_logistic, Init, StepPolicy, StumpPool};
use hconsist::hypothesis::Hypothesis;
use hconsist::losses::{CompSumFamily, LossSpec, PhiSpec};
use hconsist::oracle::{grid_infimum, Domain};
use hconsist::ranking::{
    pair_best_from_weights, pair_conditional_from_diff, pair_regret_records, ranking_generalization_error,
};
use hconsist::regret::{conditional_error, estimation_error, generalization_error, regrets, HypothesisSet};
use proptest::prelude::*;

const CONVEX: [PhiSpec; 4] = [PhiSpec::Hinge, PhiSpec::Logistic, PhiSpec::Exp, PhiSpec::SqHinge];

fn phi_any() -> impl Strategy<Value = PhiSpec> {
    prop_oneof![
        Just(PhiSpec::Hinge),
        Just(PhiSpec::Logistic),
        Just(PhiSpec::Exp),
        Just(PhiSpec::SqHinge),
        (0.5f64..4.0).prop_map(|k| PhiSpec::Sigmoid { k }),
        (0.2f64..3.0).prop_map(|rho| PhiSpec::RhoMargin { rho }),
    ]
}

fn surrogate() -> impl Strategy<Value = LossSpec> {
    prop_oneof![
        prop::sample::select(CONVEX.to_vec()).prop_map(LossSpec::margin),
        Just(LossSpec::CompSum { family: CompSumFamily::MultinomialLogistic }),
        Just(LossSpec::CompSum { family: CompSumFamily::SumExp }),
        Just(LossSpec::CompSum { family: CompSumFamily::Mae }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn binary_margin_is_two_eta_minus_one(etas in prop::collection::vec(0.0f64..=1.0, 1..8)) {
        let m = vec![1.0 / etas.len() as f64; etas.len()];
        let d = DiscreteDistribution::binary(&etas, &m).unwrap();
        for (i, eta) in etas.iter().enumerate() {
            prop_assert_eq!(margin_gamma(&d, d.id(i)).unwrap(), (2.0 * eta - 1.0).abs());
        }
    }

    #[test]
    fn envelope_is_valid_and_minimal(seed in any::<u64>(), k in 1usize..8, alpha in 0.05f64..0.95) {
        let d = sample_distribution(seed, k, 3, SampleConstraints { massart_floor: Some(0.05), ..SampleConstraints::default() }).unwrap();
        let fit = fit_tsybakov_envelope(&d, alpha).unwrap();
        let e = alpha / (1.0 - alpha);
        let mut tight = false;
        for i in 0..d.len() {
            let t = d.margin_at(i);
            let mass: f64 = (0..d.len()).filter(|&j| d.margin_at(j) <= t).map(|j| d.marginal()[j]).sum();
            let env = fit.b * t.powf(e);
            prop_assert!(mass <= env + 1e-12, "mass {} above envelope {}", mass, env);
            tight |= (mass - env).abs() <= 1e-9 * env.max(1.0);
        }
        prop_assert!(tight);
    }

    #[test]
    fn sampling_is_valid_and_deterministic(seed in any::<u64>(), k in 1usize..10, n in 2usize..6, dim in 0usize..3) {
        let c = SampleConstraints { feature_dim: dim, ..SampleConstraints::default() };
        let a = sample_distribution(seed, k, n, c).unwrap();
        prop_assert_eq!(&a, &sample_distribution(seed, k, n, c).unwrap());
        let conds = (0..k).map(|i| a.conditional(i).to_vec()).collect();
        prop_assert!(DiscreteDistribution::new(a.support().to_vec(), a.marginal().to_vec(), conds).is_ok());
    }

    #[test]
    fn phi_non_increasing_and_non_negative(phi in phi_any()) {
        let mut prev = f64::INFINITY;
        for i in 0..1000 {
            let u = -10.0 + 20.0 * i as f64 / 999.0;
            let v = phi.eval(u);
            prop_assert!(v >= 0.0 && v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn convex_flags_hold_at_midpoints(phi in prop::sample::select(CONVEX.to_vec()), a in -8.0f64..8.0, b in -8.0f64..8.0) {
        prop_assert!(phi.is_convex());
        prop_assert!(phi.eval(0.5 * (a + b)) <= 0.5 * (phi.eval(a) + phi.eval(b)) + 1e-12);
    }

    #[test]
    fn logistic_and_square_inequalities(a in -20.0f64..20.0, b in -20.0f64..20.0) {
        let l = PhiSpec::Logistic;
        prop_assert!(l.eval(a - b) <= l.eval(a) + l.eval(-b) + 1e-12);
        prop_assert!(l.eval(2.0 * a) <= 2.0 * l.eval(a) + 1e-12);
        prop_assert!((a + b).powi(2) <= 2.0 * (a * a + b * b) + 1e-9);
    }

    #[test]
    fn regret_identities(seed in any::<u64>(), k in 1usize..6, loss in surrogate(), scores in prop::collection::vec(-3.0f64..3.0, 18)) {
        let n = if matches!(loss, LossSpec::Margin { .. }) { 2 } else { 3 };
        let d = sample_distribution(seed, k, n, SampleConstraints::default()).unwrap();
        let h = if n == 2 {
            Hypothesis::scalar(&scores[..k])
        } else {
            Hypothesis::tabular(scores.chunks(3).take(k).map(|c| c.to_vec()).collect())
        };
        let r = regrets(&loss, &h, &d, &HypothesisSet::Complete).unwrap();
        prop_assert!(r.iter().all(|x| *x >= -1e-10));
        let e = generalization_error(&loss, &h, &d).unwrap();
        let sum: f64 = (0..k).map(|i| d.marginal()[i] * conditional_error(&loss, &h, &d, i).unwrap()).sum();
        prop_assert!((e - sum).abs() <= 1e-12 * e.max(1.0));
        let est = estimation_error(&loss, &h, &d, &HypothesisSet::Complete).unwrap();
        prop_assert!((est - d.expect(|i| r[i])).abs() <= 1e-10);
    }

    #[test]
    fn table_gammas_monotone_and_subadditive(loss in surrogate(), a in 0.0f64..5.0, b in 0.0f64..5.0) {
        let g = table_transform(&loss, 3).unwrap();
        prop_assert!(g.gamma(a.min(b)) <= g.gamma(a.max(b)));
        prop_assert!(g.gamma(a + b) <= g.gamma(a) + g.gamma(b) + 1e-12);
    }

    #[test]
    fn tool_reports_are_gated(seed in any::<u64>(), k in 1usize..6, phi in prop::sample::select(CONVEX.to_vec()),
                              scores in prop::collection::vec(-3.0f64..3.0, 6), c in 0.2f64..3.0) {
        let d = sample_distribution(seed, k, 2, SampleConstraints::default()).unwrap();
        let s = LossSpec::margin(phi);
        let setup = ToolSetup::new(LossSpec::ZeroOneBinary, s, HypothesisSet::Complete, table_transform(&s, 2).unwrap())
            .factors(FactorSpec::Const { v: c }, FactorSpec::UMax);
        let r = evaluate_tool_bound(&setup, &Hypothesis::scalar(&scores[..k]), &d, Variant::SupForm).unwrap();
        if r.applicable {
            prop_assert!(r.min_residual() >= -HYPOTHESIS_TOL);
        } else {
            prop_assert!(!r.violated());
        }
    }

    #[test]
    fn constrained_enhanced_dominates_baseline(seed in any::<u64>(), k in 1usize..5, n in 2usize..6,
                                               raw in prop::collection::vec(-3.0f64..3.0, 25),
                                               phi in prop::sample::select(vec![PhiSpec::Exp, PhiSpec::Hinge, PhiSpec::SqHinge])) {
        let d = sample_distribution(seed, k, n, SampleConstraints::default()).unwrap();
        let table: Vec<Vec<f64>> = raw.chunks(5).take(k).map(|c| {
            let m = c[..n].iter().sum::<f64>() / n as f64;
            c[..n].iter().map(|x| x - m).collect()
        }).collect();
        let b = constrained_enhanced_bound(phi, &Hypothesis::sum_zero_tabular(table).unwrap(), &d).unwrap();
        prop_assert!(b.lambda >= 0.0);
        prop_assert!(b.dominates());
    }

    #[test]
    fn pair_records_symmetric_and_sum(seed in any::<u64>(), k in 1usize..5, scores in prop::collection::vec(-2.0f64..2.0, 5),
                                      phi in prop::sample::select(CONVEX.to_vec())) {
        let d = sample_distribution(seed, k, 2, SampleConstraints::default()).unwrap();
        let h = Hypothesis::scalar(&scores[..k]);
        let loss = LossSpec::RankingPair { phi };
        let recs = pair_regret_records(&loss, &h, &d).unwrap();
        for i in 0..k {
            for j in 0..k {
                prop_assert!((recs[i * k + j].regret - recs[j * k + i].regret).abs() <= 1e-10);
            }
        }
        let sum: f64 = recs.iter().enumerate().map(|(idx, r)| d.marginal()[idx / k] * d.marginal()[idx % k] * r.cond_error).sum();
        let e = ranking_generalization_error(&loss, &h, &d).unwrap();
        prop_assert!((e - sum).abs() <= 1e-12 * e.max(1.0));
    }

    #[test]
    fn pair_closed_forms_match_scalar_search(a in 0.01f64..1.0, b in 0.01f64..1.0, phi in prop::sample::select(vec![PhiSpec::Exp, PhiSpec::Hinge])) {
        let loss = LossSpec::RankingPair { phi };
        let o = grid_infimum(|x| pair_conditional_from_diff(&loss, a, b, x[0]).unwrap(), &Domain::Interval { lo: -20.0, hi: 20.0, points: 401 }).unwrap();
        prop_assert!((pair_best_from_weights(&loss, a, b).unwrap().0 - o.value).abs() <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn trainers_are_deterministic(seed in any::<u64>()) {
        let d = ranking_instance(seed, 12, 2).unwrap();
        let pool = StumpPool::build(&d, true).unwrap();
        prop_assert_eq!(train_boosting(&d, &pool, 10, seed).unwrap(), train_boosting(&d, &pool, 10, seed).unwrap());
        let a = train_logistic(&d, 10, StepPolicy::default(), Init::Random(seed)).unwrap();
        prop_assert_eq!(a, train_logistic(&d, 10, StepPolicy::default(), Init::Random(seed)).unwrap());
    }
}
