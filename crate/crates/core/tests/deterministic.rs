mod common;

use common::{cx, oracle, rel, rng, spectral_points};
use proptest::prelude::*;
use rmtbias::fixed_point::identity_residuals;
use rmtbias::{scenario, solve, table1, ChannelModel, EntryMoments, SpectralPoint};

fn check_against_oracle(model: &ChannelModel, z: num_complex::Complex64) {
    let sol = solve(model, SpectralPoint::new(z).unwrap(), &Default::default()).unwrap();
    let q = table1(model, &sol).unwrap();
    let o = oracle(model, z);
    let pairs = [
        ("delta", q.delta, o.delta),
        ("delta_t", q.delta_t, o.delta_t),
        ("gamma", q.gamma, o.gamma),
        ("gamma_t", q.gamma_t, o.gamma_t),
        ("gamma_T", q.gamma_tr, o.gamma_tr),
        ("gamma_t_T", q.gamma_t_tr, o.gamma_t_tr),
        ("eta", q.eta, o.eta),
        ("eta_t", q.eta_t, o.eta_t),
        ("F", q.f, o.f),
        ("F vs F~", q.f, o.f_tilde),
        ("F_T", q.f_tr, o.f_tr),
        ("F_T_under", q.f_tr_under, o.f_tr_under),
        ("Ft_T", q.ft_tr, o.ft_tr),
        ("Ft_T_under", q.ft_tr_under, o.ft_tr_under),
        ("Delta", q.det, o.det),
        ("Delta_T", q.det_tr, o.det_tr),
    ];
    for (name, got, want) in pairs {
        assert!(rel(got, want, 1e-3) < 1e-9, "{name} at z = {z}: {got} vs {want}");
    }
}

#[test]
fn table_matches_naive_oracle() {
    let mut r = rng(101);
    for _ in 0..25 {
        let model = scenario::random_model(&mut r, 7).unwrap();
        for z in spectral_points() {
            check_against_oracle(&model, z);
        }
    }
}

#[test]
fn table_matches_oracle_on_ula_scenario() {
    let model = scenario::ula_rician(6, 1.0, scenario::weibull_noncircular()).unwrap();
    for z in spectral_points() {
        check_against_oracle(&model, z);
    }
}

#[test]
fn delta_derivatives_match_finite_differences() {
    let mut r = rng(7);
    for _ in 0..20 {
        let model = scenario::random_model(&mut r, 6).unwrap();
        for z in spectral_points() {
            let opts = Default::default();
            let q = table1(&model, &solve(&model, SpectralPoint::new(z).unwrap(), &opts).unwrap()).unwrap();
            let h = 1e-5 * z.norm();
            let at = |w| solve(&model, SpectralPoint::new(w).unwrap(), &opts).unwrap();
            let (p, m) = (at(z + h), at(z - h));
            let fd = (p.delta - m.delta) / (2.0 * h);
            let fdt = (p.delta_t - m.delta_t) / (2.0 * h);
            assert!(rel(q.dprime, fd, 1e-3) < 1e-6, "δ' at {z}: {} vs {fd}", q.dprime);
            assert!(rel(q.dtprime, fdt, 1e-3) < 1e-6, "δ̃' at {z}: {} vs {fdt}", q.dtprime);
        }
    }
}

#[test]
fn circular_gaussian_determinant_is_one() {
    let mut r = rng(3);
    let model = scenario::random_model(&mut r, 6).unwrap().with_moments(EntryMoments::GAUSSIAN).unwrap();
    let sol = solve(&model, SpectralPoint::new(cx(-0.3, 0.0)).unwrap(), &Default::default()).unwrap();
    assert_eq!(table1(&model, &sol).unwrap().det_tr, cx(1.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identities_hold(seed in any::<u64>(), zi in 0usize..4) {
        let model = scenario::random_model(&mut rng(seed), 10).unwrap();
        let z = spectral_points()[zi];
        let sol = solve(&model, SpectralPoint::new(z).unwrap(), &Default::default()).unwrap();
        let r = identity_residuals(&model, &sol);
        prop_assert!(r.woodbury < 1e-10, "{r:?}");
        prop_assert!(r.intertwining < 1e-10, "{r:?}");
        prop_assert!(r.trace_symmetry < 1e-10, "{r:?}");
    }

    #[test]
    fn solutions_live_in_the_right_half_planes(seed in any::<u64>(), x in 0.05f64..5.0, y in 0.01f64..3.0) {
        // Im z > 0 gives Im δ > 0 and Im(zδ) > 0.
        let model = scenario::random_model(&mut rng(seed), 8).unwrap();
        let z = cx(-x + 2.0, y);
        let sol = solve(&model, SpectralPoint::new(z).unwrap(), &Default::default()).unwrap();
        prop_assert!(sol.delta.im > 0.0 && sol.delta_t.im > 0.0);
        prop_assert!((z * sol.delta).im > 0.0);
    }

    #[test]
    fn real_negative_points_give_positive_deltas(seed in any::<u64>(), s in 1e-3f64..1e3) {
        let model = scenario::random_model(&mut rng(seed), 8).unwrap();
        let sol = solve(&model, SpectralPoint::from_noise(s).unwrap(), &Default::default()).unwrap();
        prop_assert!(sol.delta.re > 0.0 && sol.delta.im == 0.0);
        prop_assert!(sol.delta_t.re > 0.0 && sol.delta_t.im == 0.0);
        prop_assert!(sol.residual <= 1e-12);
    }
}
