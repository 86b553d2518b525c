use kerr_bounds::dephasing;
use kerr_bounds::lossbounds::{self, LossConfig, LossQuadratic, VariationalPoint};
use kerr_bounds::report::format_float;
use kerr_bounds::states::{self, ProbeState, StateFamily, TruncationPolicy};
use num_complex::Complex64;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = StateFamily> {
    prop_oneof![Just(StateFamily::Coherent), Just(StateFamily::SqueezedVacuum)]
}

fn random_state() -> impl Strategy<Value = ProbeState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12).prop_filter_map("nonzero", |v| {
        ProbeState::normalized(v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect()).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn binomial_weights_sum_to_one(n in 0usize..400, eta in 0.0f64..=1.0) {
        let total: f64 = (0..=n).map(|k| lossbounds::kraus_weight(n, k, eta).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-11);
    }

    #[test]
    fn minimum_lies_below_every_variational_point(
        s in random_state(),
        eta in 0.01f64..0.99,
        l1 in 0.0f64..=1.0,
        l2 in -3.0f64..3.0,
    ) {
        let cfg = LossConfig::new(eta).unwrap();
        let m = lossbounds::minimize_variational_qfi(&s, &cfg).unwrap();
        let f = lossbounds::variational_qfi(&s, &cfg, VariationalPoint::new(l1, l2));
        prop_assert!(m.f_min <= f * (1.0 + 1e-10) + 1e-10);
        prop_assert!((0.0..=1.0).contains(&m.point.lambda1));
        let grid = lossbounds::minimize_variational_qfi_grid(&s, &cfg, 101).unwrap();
        prop_assert!(m.f_min <= grid.f_min * (1.0 + 1e-10) + 1e-10);
    }

    #[test]
    fn quadratic_form_matches_direct_sum(
        s in random_state(),
        eta in 0.0f64..=1.0,
        l1 in 0.0f64..=1.0,
        l2 in -2.0f64..2.0,
    ) {
        let cfg = LossConfig::new(eta).unwrap();
        let pt = VariationalPoint::new(l1, l2);
        let direct = lossbounds::variational_qfi(&s, &cfg, pt);
        let quad = LossQuadratic::from_state(&s, eta).eval(pt);
        prop_assert!((direct - quad).abs() <= 1e-9 * direct.abs().max(1.0));
        prop_assert!(direct >= -1e-9);
    }

    #[test]
    fn closed_form_minimum_matches_numerics(n in 0.2f64..8.0, eta in 0.05f64..0.98) {
        let state = states::squeezed_vacuum_state(n, TruncationPolicy::default()).unwrap();
        let numeric = lossbounds::minimize_variational_qfi(&state, &LossConfig::new(eta).unwrap()).unwrap();
        let closed = lossbounds::fmin_analytic_general(&states::moments_from_state(&state), eta).unwrap();
        prop_assert!((closed - numeric.f_min).abs() <= 1e-6 * numeric.f_min);
        let sv = lossbounds::fmin_analytic_sv(n, eta).unwrap();
        let general = lossbounds::fmin_analytic_general(&states::gaussian_saturating_moments(n).unwrap(), eta).unwrap();
        prop_assert!((sv - general).abs() <= 1e-10 * sv);
    }

    #[test]
    fn loss_bounds_never_exceed_lossless(fam in family(), n in 0.1f64..10.0, eta in 0.0f64..=1.0) {
        let mom = fam.moments(n).unwrap();
        let lossless = lossbounds::bound_lossless(&mom);
        let f = lossbounds::fmin_analytic_general(&mom, eta).unwrap();
        prop_assert!(f <= lossless * (1.0 + 1e-9));
        prop_assert!(f >= -1e-9 * lossless);
    }

    #[test]
    fn repetitions_scale_as_inverse_root(f in 1e-6f64..1e12, m in 1u32..10_000) {
        let one = lossbounds::delta_phi_from_f(f, 1);
        let many = lossbounds::delta_phi_from_f(f, m);
        prop_assert!((many * f64::from(m).sqrt() / one - 1.0).abs() < 1e-12);
    }

    #[test]
    fn moment_identity_holds_for_any_state(s in random_state()) {
        let m = states::moments_from_state(&s);
        prop_assert!(m.var_n2 >= -1e-12 * m.m4.max(1.0));
        prop_assert!((m.var_n2 - (m.m4 - m.m2 * m.m2)).abs() <= 1e-10 * m.m4.max(1.0));
        prop_assert!(m.m2 >= m.m1 * m.m1 - 1e-12 * m.m2.max(1.0));
    }

    #[test]
    fn family_moments_match_their_states(fam in family(), n in 0.0f64..10.0) {
        let from_state = states::moments_from_state(&fam.state(n, TruncationPolicy::default()).unwrap());
        let closed = fam.moments(n).unwrap();
        for (a, b) in [(from_state.m1, closed.m1), (from_state.m2, closed.m2), (from_state.m4, closed.m4)] {
            prop_assert!((a - b).abs() <= 1e-9 * b.max(1.0));
        }
    }

    #[test]
    fn dephasing_bounds_grow_with_noise(fam in family(), n in 0.1f64..50.0, a in 0.0f64..3.0, b in 0.0f64..3.0) {
        let mom = fam.moments(n).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let noiseless = 1.0 / (2.0 * mom.var_n2.sqrt());
        let lin = |x| dephasing::bound_linear_dephasing(&mom, x).unwrap();
        let sec = |x| dephasing::bound_second_order_dephasing(&mom, x).unwrap();
        prop_assert!(lin(lo) <= lin(hi) && sec(lo) <= sec(hi));
        prop_assert!(lin(lo) >= noiseless && sec(lo) >= noiseless);
        let lam = dephasing::lambda_min(&mom, hi).unwrap();
        prop_assert!((0.0..1.0).contains(&lam));
    }

    #[test]
    fn environment_squeezing_shrinks_spread(a in 0.0f64..1e6, b in 0.0f64..1e6) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let d_lo = dephasing::env_squeezing_delta(lo).unwrap();
        let d_hi = dephasing::env_squeezing_delta(hi).unwrap();
        prop_assert!(d_hi <= d_lo && d_lo <= 1.0 && d_hi > 0.0);
        prop_assert!((d_lo - (-(lo.sqrt()).asinh()).exp()).abs() < 1e-12);
    }

    #[test]
    fn csv_floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }
}
