mod common;

use common::{cx, oracle, rel, rng, spectral_points};
use proptest::prelude::*;
use rmtbias::contour::{lss_mean, ContourSpec, SpectralFn};
use rmtbias::mi::mi_clt;
use rmtbias::model::{rician_model, ula_los};
use rmtbias::{
    bias_theorem1, bias_theorem2, moments_of, scenario, solve, ChannelModel, EntryDistribution, EntryMoments,
    SpectralPoint,
};

fn t1(model: &ChannelModel, z: num_complex::Complex64) -> rmtbias::BiasValue {
    bias_theorem1(model, &solve(model, SpectralPoint::new(z).unwrap(), &Default::default()).unwrap()).unwrap()
}

#[test]
fn circular_gaussian_has_no_bias() {
    let mut r = rng(17);
    for _ in 0..10 {
        let model = scenario::random_model(&mut r, 8).unwrap().with_moments(EntryMoments::GAUSSIAN).unwrap();
        for z in spectral_points() {
            assert_eq!(t1(&model, z).total, cx(0.0, 0.0));
        }
        let s = mi_clt(&model, 0.3, &Default::default()).unwrap();
        assert_eq!((s.b_c, s.theta_b), (0.0, 0.0));
    }
}

#[test]
fn circular_non_gaussian_has_only_kappa_part() {
    let mut r = rng(18);
    let model = scenario::random_model(&mut r, 8).unwrap();
    let model = model.with_moments(EntryMoments::new(cx(0.0, 0.0), 1.5, cx(0.0, 0.0)).unwrap()).unwrap();
    for z in spectral_points() {
        let b = t1(&model, z);
        assert!(b.b_theta.norm() < 1e-15);
        assert!(b.b_kappa.norm() > 0.0);
    }
}

#[test]
fn centered_mean_bias_closed_form() {
    let mut r = rng(19);
    for _ in 0..10 {
        let model = scenario::random_model(&mut r, 8).unwrap();
        let model = ChannelModel::centered(model.n(), model.d().to_vec(), model.dt().to_vec(), *model.moments()).unwrap();
        let sigma2 = 0.4;
        let o = oracle(&model, cx(-sigma2, 0.0));
        let mo = model.moments();
        let s4gg = sigma2 * sigma2 * (o.gamma * o.gamma_t).re;
        let expected = 0.5 * ((1.0 - mo.vartheta.norm_sqr() * s4gg).ln() - mo.kappa * s4gg);
        let s = mi_clt(&model, sigma2, &Default::default()).unwrap();
        assert!((s.b_c - expected).abs() <= 1e-10 * expected.abs().max(1.0), "{} vs {expected}", s.b_c);
    }
}

#[test]
fn strong_line_of_sight_kills_the_bias() {
    let dist = scenario::weibull_noncircular();
    let los = ula_los(6, 12, None).unwrap();
    let model = rician_model(&los, 1e6, vec![1.0; 6], vec![1.0; 12], moments_of(&dist).unwrap()).unwrap();
    let s = mi_clt(&model, 0.2, &Default::default()).unwrap();
    assert!(s.b_c.abs() < 1e-4 && s.theta_g < 1e-4, "{s:?}");
}

#[test]
fn nakagami_limit_approaches_pure_phase() {
    // m → ∞ makes the modulus deterministic, so E|x|⁴ → 1 and κ → −1.
    let dist = EntryDistribution::new(rmtbias::ModulusLaw::Nakagami { m: 1e4 }, 1.0, 1.0).unwrap();
    let mo = moments_of(&dist).unwrap();
    assert!((mo.kappa + 1.0).abs() < 1e-3);
}

#[test]
fn theorem2_agrees_on_ula_scenario() {
    let model = scenario::ula_rician(8, 1.0, scenario::weibull_noncircular()).unwrap();
    for z in spectral_points() {
        let a = t1(&model, z);
        let b = bias_theorem2(&model, SpectralPoint::new(z).unwrap(), 1e-4 * z.norm(), &Default::default()).unwrap();
        assert!(rmtbias::bias::relative_gap(&a, &b) < 1e-5);
    }
}

#[test]
fn tiny_step_is_rejected() {
    let model = scenario::ula_rician(4, 1.0, scenario::weibull_noncircular()).unwrap();
    let err = bias_theorem2(&model, SpectralPoint::from_noise(0.2).unwrap(), 1e-30, &Default::default());
    assert!(matches!(err, Err(rmtbias::Error::StepSize(_))));
}

#[test]
fn contour_reproduces_mi_statistics() {
    let mut r = rng(23);
    for _ in 0..3 {
        let model = scenario::random_model(&mut r, 6).unwrap();
        let sigma2 = 0.5;
        let f = SpectralFn::Mi { sigma2 };
        let spec = ContourSpec::for_function(&model, &f);
        let l = lss_mean(&model, &f, &spec, &Default::default()).unwrap();
        let s = mi_clt(&model, sigma2, &Default::default()).unwrap();
        assert!(rel(l.v_f, cx(s.v, 0.0), 1e-12) < 1e-4);
        assert!(rel(l.b_f, cx(s.b_c, 0.0), 1e-6) < 1e-4);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn theorems_agree(seed in any::<u64>(), zi in 0usize..4) {
        let model = scenario::random_model(&mut rng(seed), 8).unwrap();
        let z = spectral_points()[zi];
        let a = t1(&model, z);
        let b = bias_theorem2(&model, SpectralPoint::new(z).unwrap(), 1e-4 * z.norm(), &Default::default()).unwrap();
        prop_assert!(rmtbias::bias::relative_gap(&a, &b) < 1e-5);
    }

    #[test]
    fn mean_and_variance_corrections_are_coupled(seed in any::<u64>(), s in 0.05f64..5.0) {
        let model = scenario::random_model(&mut rng(seed), 8).unwrap();
        let st = mi_clt(&model, s, &Default::default()).unwrap();
        prop_assert!((st.b_c + 0.5 * st.theta_b).abs() <= 1e-14);
        prop_assert!(st.theta_g > 0.0);
        prop_assert_eq!(st.mean, st.v + st.b_c);
    }

    #[test]
    fn conjugate_symmetry(seed in any::<u64>(), x in -2.0f64..2.0, y in 0.1f64..2.0) {
        // B(z̄) = conj B(z)
        let model = scenario::random_model(&mut rng(seed), 6).unwrap();
        let a = t1(&model, cx(x, y)).total;
        let b = t1(&model, cx(x, -y)).total;
        prop_assert!(rel(a, b.conj(), 1e-8) < 1e-9);
    }
}
