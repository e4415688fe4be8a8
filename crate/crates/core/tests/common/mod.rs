//! Shared helpers for the integration tests. Everything here is computed
//! from the definitions with full matrices and a plain Jacobi iteration,
//! independently of the library's solver and kernels.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rmtbias::ChannelModel;

pub type M = DMatrix<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn diag(v: &[f64]) -> M {
    M::from_diagonal(&nalgebra::DVector::from_iterator(v.len(), v.iter().map(|&x| cx(x, 0.0))))
}

fn diag_c(v: &[Complex64]) -> M {
    M::from_diagonal(&nalgebra::DVector::from_column_slice(v))
}

fn inv(m: M) -> M {
    m.try_inverse().expect("oracle matrix is invertible")
}

/// Reference values for the scalar functionals.
#[derive(Debug)]
pub struct Oracle {
    pub delta: Complex64,
    pub delta_t: Complex64,
    pub t: M,
    pub tt: M,
    pub gamma: Complex64,
    pub gamma_t: Complex64,
    pub gamma_tr: Complex64,
    pub gamma_t_tr: Complex64,
    pub eta: Complex64,
    pub eta_t: Complex64,
    pub f: Complex64,
    pub f_tilde: Complex64,
    pub f_tr: Complex64,
    pub f_tr_under: Complex64,
    pub ft_tr: Complex64,
    pub ft_tr_under: Complex64,
    pub det: Complex64,
    pub det_tr: Complex64,
}

fn t_pair(model: &ChannelModel, z: Complex64, delta: Complex64, delta_t: Complex64) -> (M, M) {
    let a = model.los();
    let ah = a.adjoint();
    let (n, m) = (model.n(), model.m());
    let d = diag(model.d());
    let dt = diag(model.dt());
    let r = inv(M::identity(n, n) + &d * delta_t);
    let rt = inv(M::identity(m, m) + &dt * delta);
    let t = inv((M::identity(n, n) + &d * delta_t) * (-z) + a * &rt * &ah);
    let tt = inv((M::identity(m, m) + &dt * delta) * (-z) + &ah * &r * a);
    (t, tt)
}

pub fn oracle(model: &ChannelModel, z: Complex64) -> Oracle {
    let mf = model.m() as f64;
    let d = diag(model.d());
    let dt = diag(model.dt());
    let (mut delta, mut delta_t) = (cx(1.0, 0.0), cx(1.0, 0.0));
    for it in 0.. {
        let (t, tt) = t_pair(model, z, delta, delta_t);
        let nd = (&d * &t).trace() / mf;
        let ndt = (&dt * &tt).trace() / mf;
        let change = (nd - delta).norm().max((ndt - delta_t).norm());
        delta = 0.5 * (delta + nd);
        delta_t = 0.5 * (delta_t + ndt);
        if change < 1e-15 * (1.0 + delta.norm().max(delta_t.norm())) {
            break;
        }
        assert!(it < 200_000, "oracle iteration did not settle");
    }
    let (t, tt) = t_pair(model, z, delta, delta_t);
    let a = model.los();
    let (ah, at, abar) = (a.adjoint(), a.transpose(), a.map(|x| x.conj()));
    let (n, m) = (model.n(), model.m());
    let r = inv(M::identity(n, n) + &d * delta_t);
    let rt = inv(M::identity(m, m) + &dt * delta);
    let r2 = &r * &r;
    let rt2 = &rt * &rt;
    let s = diag_c(&(0..n).map(|i| t[(i, i)]).collect::<Vec<_>>());
    let st = diag_c(&(0..m).map(|j| tt[(j, j)]).collect::<Vec<_>>());

    let tr = |x: M| x.trace() / mf;
    let gamma = tr(&d * &t * &d * &t);
    let gamma_t = tr(&dt * &tt * &dt * &tt);
    let gamma_tr = tr(&d * &t * &d * t.transpose());
    let gamma_t_tr = tr(&dt * &tt * &dt * tt.transpose());
    let eta = tr(&s * &s * &d * &d);
    let eta_t = tr(&st * &st * &dt * &dt);
    let f = tr(&d * &t * a * &rt2 * &dt * &ah * &t);
    let f_tilde = tr(&dt * &tt * &ah * &r2 * &d * a * &tt);
    let f_tr = tr(&d * t.transpose() * &abar * &rt2 * &dt * &ah * &t);
    let f_tr_under = tr(&d * &t * a * &rt2 * &dt * &at * t.transpose());
    let ft_tr = tr(&dt * tt.transpose() * &at * &r2 * &d * a * &tt);
    let ft_tr_under = tr(&dt * &tt * &ah * &r2 * &d * &abar * tt.transpose());

    let theta = model.moments().vartheta;
    let one = cx(1.0, 0.0);
    let det = (one - f) * (one - f_tilde) - z * z * gamma * gamma_t;
    let det_tr = (one - theta * f_tr) * (one - theta.conj() * f_tr_under)
        - theta.norm_sqr() * z * z * gamma_tr * gamma_t_tr;
    Oracle {
        delta,
        delta_t,
        t,
        tt,
        gamma,
        gamma_t,
        gamma_tr,
        gamma_t_tr,
        eta,
        eta_t,
        f,
        f_tilde,
        f_tr,
        f_tr_under,
        ft_tr,
        ft_tr_under,
        det,
        det_tr,
    }
}

/// `|a − b| / max(|a|, |b|, floor)`
pub fn rel(a: Complex64, b: Complex64, floor: f64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(floor)
}

/// Spectral points used across the suites: the noise point and a few
/// off-axis points.
pub fn spectral_points() -> [Complex64; 4] {
    [cx(-0.2, 0.0), cx(-1.5, 0.0), cx(-0.5, 0.7), cx(1.0, 1.0)]
}
