//! Ready-made scenarios: ULA line of sight with Rician mixing, and random
//! small models for property tests.

use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::linalg::CMatrix;
use crate::model::{moments_of, rician_model, ula_los, ChannelModel, EntryDistribution, EntryMoments, ModulusLaw};

/// Weibull `k = 1` modulus with `σ_r² = 1.6`, `σ_i² = 0.4` (`ϑ = 0.6`, `κ = 4.72`).
pub fn weibull_noncircular() -> EntryDistribution {
    EntryDistribution {
        modulus_law: ModulusLaw::Weibull { k: 1.0 },
        sigma_r2: 1.6,
        sigma_i2: 0.4,
    }
}

/// `N × 2N` ULA line of sight with default angles, Rician factor `K`,
/// `D = D̃ = I` and entries drawn from `dist`.
pub fn ula_rician(n: usize, k_factor: f64, dist: EntryDistribution) -> Result<ChannelModel> {
    ula_rician_ratio(n, 2 * n, k_factor, dist)
}

pub fn ula_rician_ratio(n: usize, m: usize, k_factor: f64, dist: EntryDistribution) -> Result<ChannelModel> {
    let los = ula_los(n, m, None)?;
    rician_model(&los, k_factor, vec![1.0; n], vec![1.0; m], moments_of(&dist)?)
}

/// Random model with `N, M ∈ [2, max_dim]`, profiles in `[0.2, 2]`, unit-norm
/// LoS columns scaled by `1/√M`, `|ϑ| ≤ 0.9` with random phase and
/// `κ ∈ [−1, 6]`, clipped so that `E|x|⁴ ≥ 1`.
pub fn random_model<R: Rng>(rng: &mut R, max_dim: usize) -> Result<ChannelModel> {
    let n = rng.random_range(2..=max_dim);
    let m = rng.random_range(2..=max_dim);
    random_model_with_dims(rng, n, m)
}

pub fn random_model_with_dims<R: Rng>(rng: &mut R, n: usize, m: usize) -> Result<ChannelModel> {
    let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..2.0)).collect();
    let dt: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..2.0)).collect();
    let mut a = CMatrix::from_fn(n, m, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    for mut col in a.column_iter_mut() {
        let norm = col.norm();
        col /= Complex64::new(norm * (m as f64).sqrt(), 0.0);
    }
    let moments = random_moments(rng);
    ChannelModel::new(a, d, dt, moments)
}

pub fn random_moments<R: Rng>(rng: &mut R) -> EntryMoments {
    let vartheta = Complex64::from_polar(rng.random_range(0.0..0.9), rng.random_range(0.0..std::f64::consts::TAU));
    let floor = 1.0 - vartheta.norm_sqr() - 2.0;
    let kappa = rng.random_range(-1.0..6.0f64).max(floor);
    EntryMoments {
        vartheta,
        kappa,
        zeta: Complex64::new(0.0, 0.0),
    }
}
