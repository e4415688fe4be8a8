use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::{moments_of, ChannelModel, EntryDistribution, EntryMoments, ModulusLaw};

/// Stream reserved for ECDF reservoir sampling; trial streams count up from 0.
pub(crate) const RESERVOIR_STREAM: u64 = u64::MAX;

/// Generator for stream `stream` of `seed`. Streams are independent, so a
/// trial's draws do not depend on which worker runs it.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A law for unit-variance complex entries.
pub trait EntrySampler: Sync {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Complex64;

    /// `(ϑ, κ, ζ)` of the law.
    fn moments(&self) -> Result<EntryMoments>;
}

impl EntrySampler for EntryDistribution {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Complex64 {
        sample_entry(self, rng)
    }

    fn moments(&self) -> Result<EntryMoments> {
        moments_of(self)
    }
}

/// Draw of the modulus `r` with `E r² = 1`.
pub fn sample_modulus(law: &ModulusLaw, rng: &mut ChaCha8Rng) -> f64 {
    match *law {
        ModulusLaw::Weibull { k } => {
            // Inverse CDF on (0, 1].
            let u = 1.0 - rng.random::<f64>();
            ModulusLaw::weibull_scale(k) * (-u.ln()).powf(1.0 / k)
        }
        ModulusLaw::Lognormal { sigma } => {
            let z: f64 = StandardNormal.sample(rng);
            (-sigma * sigma + sigma * z).exp()
        }
        ModulusLaw::Nakagami { m } => {
            // Validated laws have m > 0, so the shape is always accepted.
            let g = Gamma::new(m, 1.0 / m).expect("validated Nakagami shape");
            g.sample(rng).sqrt()
        }
    }
}

/// `X = r σ_r cos φ + j r σ_i sin φ` with `φ ~ U[0, 2π)`.
pub fn sample_entry(dist: &EntryDistribution, rng: &mut ChaCha8Rng) -> Complex64 {
    let r = sample_modulus(&dist.modulus_law, rng);
    let phi = 2.0 * PI * rng.random::<f64>();
    let (s, c) = phi.sin_cos();
    Complex64::new(r * dist.sigma_r2.sqrt() * c, r * dist.sigma_i2.sqrt() * s)
}

/// Checks that the sampler's moments are the model's, so analytic and
/// empirical results refer to the same law.
pub fn check_consistent(model: &ChannelModel, sampler: &dyn EntrySampler) -> Result<()> {
    let mine = model.moments();
    let theirs = sampler.moments()?;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()));
    if !(close(mine.vartheta.re, theirs.vartheta.re)
        && close(mine.vartheta.im, theirs.vartheta.im)
        && close(mine.kappa, theirs.kappa))
    {
        return Err(Error::Config(format!(
            "model moments (ϑ = {}, κ = {}) differ from the sampling law (ϑ = {}, κ = {})",
            mine.vartheta, mine.kappa, theirs.vartheta, theirs.kappa
        )));
    }
    Ok(())
}

/// `H = A + M^{-1/2} D^{1/2} X D̃^{1/2}`; entries of `X` drawn row by row.
pub fn sample_channel_with(model: &ChannelModel, sampler: &dyn EntrySampler, rng: &mut ChaCha8Rng) -> CMatrix {
    let (n, m) = (model.n(), model.m());
    let inv_sqrt_m = 1.0 / (m as f64).sqrt();
    let sd: Vec<f64> = model.d().iter().map(|x| x.sqrt() * inv_sqrt_m).collect();
    let sdt: Vec<f64> = model.dt().iter().map(|x| x.sqrt()).collect();
    let mut h = model.los().clone();
    for i in 0..n {
        for j in 0..m {
            h[(i, j)] += sampler.sample(rng) * (sd[i] * sdt[j]);
        }
    }
    h
}

/// [`sample_channel_with`] after checking the law against the model.
pub fn sample_channel(model: &ChannelModel, dist: &EntryDistribution, rng: &mut ChaCha8Rng) -> Result<CMatrix> {
    check_consistent(model, dist)?;
    Ok(sample_channel_with(model, dist, rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let a: f64 = stream_rng(7, 0).random();
        let b: f64 = stream_rng(7, 1).random();
        let a2: f64 = stream_rng(7, 0).random();
        assert_ne!(a, b);
        assert_eq!(a, a2);
    }

    #[test]
    fn moment_mismatch_is_a_config_error() {
        let dist = EntryDistribution::new(ModulusLaw::Weibull { k: 1.0 }, 1.6, 0.4).unwrap();
        let model = ChannelModel::centered(2, vec![1.0; 2], vec![1.0; 2], EntryMoments::GAUSSIAN).unwrap();
        let mut rng = stream_rng(1, 0);
        assert!(matches!(sample_channel(&model, &dist, &mut rng), Err(Error::Config(_))));
        let ok = model.with_moments(moments_of(&dist).unwrap()).unwrap();
        assert!(sample_channel(&ok, &dist, &mut rng).is_ok());
    }
}
