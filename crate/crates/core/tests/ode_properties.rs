use lorentz_bounds::model::Curvature;
use lorentz_bounds::ode::{jensen_check, modified, solve_bvp, JensenVerdict, SampledFunction};
use proptest::prelude::*;

fn curvature() -> impl Strategy<Value = Curvature> {
    prop::sample::select(vec![-1.0, -0.5, 0.0, 1.0]).prop_map(Curvature::new)
}

/// Strictly increasing sample points spanning less than the anti-de Sitter diameter.
fn grid(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05..0.5f64, n).prop_map(|steps| {
        steps.iter().scan(0.0, |t, s| {
            *t += s;
            Some(*t)
        }).collect()
    })
}

proptest! {
    // the splitting premises hold on roughly one draw in nine
    #![proptest_config(ProptestConfig { max_global_rejects: 20_000, ..ProptestConfig::default() })]

    #[test]
    fn sn_is_positive_on_the_open_diameter(k in curvature(), u in 0.001..0.999f64) {
        let reach = k.diameter().min(10.0);
        let t = u * reach;
        prop_assert!(modified(k, t).sn > 0.0);
        prop_assert!(modified(k, -t).sn < 0.0);
    }

    #[test]
    fn solutions_cross_at_most_once_per_diameter(
        k in curvature(),
        lambda in -1.0..1.0f64,
        (t1, len, f1, g2, lift) in (-1.0..1.0f64, 0.1..2.0f64, -1.0..1.0f64, -1.0..1.0f64, 0.01..1.0f64),
        u in 0.001..0.999f64,
    ) {
        let t2 = t1 + len;
        let lo = solve_bvp(k, lambda, t1, f1, t2, g2).unwrap();
        let hi = solve_bvp(k, lambda, t1, f1, t2, g2 + lift).unwrap();
        let reach = k.diameter().min(6.0);
        let (ahead, behind) = (t1 + u * reach, t1 - u * reach);
        prop_assert!(lo.eval(ahead) < hi.eval(ahead));
        prop_assert!(lo.eval(behind) > hi.eval(behind));
    }

    #[test]
    fn splitting_jensen(k in curvature(), ts in grid(4), vals in prop::collection::vec(-1.0..1.0f64, 4)) {
        let check = |i: usize, j: usize, l: usize| {
            let f = SampledFunction::new(vec![(ts[i], vals[i]), (ts[j], vals[j]), (ts[l], vals[l])]).unwrap();
            jensen_check(&f, k, 1.0, 1e-12).verdict.is_sub()
        };
        prop_assume!(check(0, 1, 2) && check(1, 2, 3));
        prop_assert!(check(0, 1, 3) && check(0, 2, 3));
    }

    #[test]
    fn max_of_solutions_is_sub_and_min_is_super(
        k in curvature(),
        ts in grid(7),
        (f1, f2, g1, g2) in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
    ) {
        let (a, b) = (ts[0], ts[6]);
        let p = solve_bvp(k, 1.0, a, f1, b, f2).unwrap();
        let q = solve_bvp(k, 1.0, a, g1, b, g2).unwrap();
        let hi = SampledFunction::from_fn(&ts, |t| p.eval(t).max(q.eval(t))).unwrap();
        let lo = SampledFunction::from_fn(&ts, |t| p.eval(t).min(q.eval(t))).unwrap();
        prop_assert!(jensen_check(&hi, k, 1.0, 1e-9).verdict.is_sub());
        prop_assert!(jensen_check(&lo, k, 1.0, 1e-9).verdict.is_super());
    }

    #[test]
    fn exact_solutions_are_both(k in curvature(), ts in grid(6), lambda in -1.0..1.0f64, f1 in -1.0..1.0f64, f2 in -1.0..1.0f64) {
        let g = solve_bvp(k, lambda, ts[0], f1, ts[5], f2).unwrap();
        let f = SampledFunction::from_fn(&ts, |t| g.eval(t)).unwrap();
        let r = jensen_check(&f, k, lambda, 1e-9);
        prop_assert_eq!(r.verdict, JensenVerdict::Both);
        prop_assert!(r.sub_margin.abs() <= 1e-9 && r.super_margin.abs() <= 1e-9);
    }
}
