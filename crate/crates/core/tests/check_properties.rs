use lorentz_bounds::check::{checker_names, form_slacks, lookup, run_check, Bound, CheckOptions, Verdict};
use lorentz_bounds::harness::{cross_validate, default_hubs, lattice, ExperimentPlan, SpaceSpec};
use lorentz_bounds::model::Curvature;
use lorentz_bounds::space::{sprinkle, ConfigClass, Diamond, FiniteLorentzSpace};
use proptest::prelude::*;

const FOUR_POINT: [&str; 4] = ["four-point-timelike", "four-point-angle", "four-point-causal", "four-point-strict-causal"];

fn bound() -> impl Strategy<Value = Bound> {
    prop_oneof![Just(Bound::Lower), Just(Bound::Upper)]
}

fn model_lattice(k0: f64, m: usize) -> FiniteLorentzSpace {
    let k = Curvature::new(k0);
    lattice(k, &default_hubs(k), m).unwrap()
}

fn run(name: &str, s: &FiniteLorentzSpace, k: f64, bound: Bound) -> lorentz_bounds::check::CheckReport {
    run_check(name, s, Curvature::new(k), bound, CheckOptions::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn removing_points_never_breaks_four_point_passes(
        seed in any::<u64>(),
        k in -1.0..1.0f64,
        bound in bound(),
        keep in prop::collection::vec(any::<bool>(), 16),
    ) {
        let s = sprinkle(Curvature::new(0.0), Diamond { height: 1.5 }, 16, seed).unwrap();
        let kept: Vec<usize> = (0..16).filter(|&i| keep[i]).collect();
        let sub = s.subspace(&kept);
        for name in FOUR_POINT {
            let (full, part) = (run(name, &s, k, bound), run(name, &sub, k, bound));
            if full.verdict == Verdict::Pass {
                prop_assert_ne!(part.verdict, Verdict::Fail, "{}", name);
            }
        }
    }

    #[test]
    fn verdicts_are_scale_covariant(k0 in prop::sample::select(vec![-1.0, 0.0, 1.0]), dk in -0.5..0.5f64, bound in bound(), scale in prop::sample::select(vec![0.5, 2.0])) {
        let s = model_lattice(k0, 3);
        let scaled = s.scaled(scale);
        let k = k0 + dk;
        for name in checker_names() {
            let (a, b) = (run(name, &s, k, bound), run(name, &scaled, k / (scale * scale), bound));
            prop_assert_eq!(a.verdict, b.verdict, "{} at K={}", name, k);
            prop_assert_eq!(a.tested, b.tested, "{}", name);
        }
    }

    #[test]
    fn verdicts_survive_time_reversal(k0 in prop::sample::select(vec![-1.0, 0.0, 1.0]), dk in -0.5..0.5f64, bound in bound()) {
        let s = model_lattice(k0, 3);
        let r = s.reversed();
        for name in checker_names() {
            prop_assert_eq!(run(name, &s, k0 + dk, bound).verdict, run(name, &r, k0 + dk, bound).verdict, "{}", name);
        }
    }

    #[test]
    fn angle_and_tau_forms_agree_per_configuration(seed in any::<u64>(), k in -1.5..1.5f64, causal in any::<bool>()) {
        let s = sprinkle(Curvature::new(0.0), Diamond { height: 1.5 }, 14, seed).unwrap();
        let class = if causal { ConfigClass::Causal } else { ConfigClass::Timelike };
        for (tau_slack, angle_slack) in form_slacks(&s, Curvature::new(k), class) {
            let clear = tau_slack.abs() > 1e-7 && angle_slack.abs() > 1e-7;
            prop_assert!(!clear || tau_slack.signum() == angle_slack.signum(), "{} vs {}", tau_slack, angle_slack);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn equivalent_senses_agree_on_model_lattices(k0 in prop::sample::select(vec![-1.0, 0.0, 1.0]), bound in bound(), m in 2usize..5) {
        let senses: Vec<String> = checker_names()
            .into_iter()
            .filter(|n| lookup(n).unwrap().sense().is_some())
            .map(String::from)
            .collect();
        let k_grid = vec![k0 - 0.5, k0 - 0.25, k0, k0 + 0.25, k0 + 0.5];
        let space = SpaceSpec::Lattice { k: k0, hubs: default_hubs(Curvature::new(k0)), m };
        let plan = ExperimentPlan { space, senses, k_grid, bound, options: CheckOptions::default() };
        let first = cross_validate(&plan).unwrap();
        prop_assert!(first.disagreements.is_empty(), "{:?}", first.disagreements);
        prop_assert_eq!(first.to_json(), cross_validate(&plan).unwrap().to_json());
        // comparison τ grows with K, so a lower bound holds on an up-set of K and an upper bound on a down-set
        for (sense, row) in first.senses.iter().zip(&first.cells) {
            if first.approximate.contains(sense) {
                continue;
            }
            let ok: Vec<bool> = row.iter().map(|c| c.verdict != Verdict::Fail).collect();
            let monotone = match bound {
                Bound::Lower => ok.windows(2).all(|w| w[0] <= w[1]),
                Bound::Upper => ok.windows(2).all(|w| w[0] >= w[1]),
            };
            prop_assert!(monotone, "{} {:?}", sense, ok);
        }
    }
}
