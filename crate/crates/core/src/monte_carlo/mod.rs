//! Monte-Carlo counterparts of the analytic quantities.
//!
//! Trial `t` of a run with seed `s` draws from ChaCha stream `t` of `s`.
//! Trials are grouped into fixed-size blocks; blocks run in parallel and
//! their accumulators are merged in block order, so every summary is
//! bit-identical for any number of workers.

pub mod oracle;
pub mod sampling;
pub mod stats;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixed_point::{resolvent_trace_de, solve, SolverOptions, SpectralPoint};
use crate::linalg::{c, inverse_general, inverse_hpd};
use crate::mi::{mi_and_resolvent_trace, mi_clt};
use crate::model::{ChannelModel, EntryDistribution};

pub use oracle::{quadratic_form_cov_oracle, CovarianceCheck};
pub use sampling::{sample_channel, sample_entry, stream_rng, EntrySampler};
pub use stats::{ks_distance, Moments};

use sampling::{check_consistent, sample_channel_with, RESERVOIR_STREAM};
use stats::Reservoir;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Trials per work unit. Part of the result's identity: changing it
    /// changes the merge order and hence the last bits.
    pub block: usize,
    /// Maximum number of samples kept for the ECDF.
    pub ecdf_cap: usize,
    pub solver: SolverOptions,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            workers: None,
            block: 64,
            ecdf_cap: 200_000,
            solver: SolverOptions::default(),
        }
    }
}

/// Run `f` on a pool with the requested number of workers.
pub fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Config(format!("cannot start {w} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MonteCarloSummary {
    pub trials: u64,
    pub seed: u64,
    pub sigma2: f64,
    pub mean_c: f64,
    pub var_c: f64,
    pub se_mean: f64,
    pub se_var: f64,
    /// Sorted MI samples (uniform subsample beyond the cap).
    #[serde(skip)]
    pub ecdf: Vec<f64>,
    /// `mean_C − V`
    pub emp_bias_mean: f64,
    /// `var_C − Θ_G`
    pub emp_bias_var: f64,
    /// `E Tr Q(−σ²) − Tr T(−σ²)`, a by-product of the MI factorization.
    pub emp_resolvent_bias: Complex64,
    pub se_resolvent: f64,
}

struct Block {
    c: Moments,
    trace: Moments,
    values: Vec<f64>,
}

fn trial_error(trial: u64, e: Error) -> Error {
    Error::Trial {
        trial,
        source: Box::new(e),
    }
}

// Runs `per_trial` over all trials in blocks and merges in block order. The
// callback returns the value to accumulate and an auxiliary value.
fn run_blocks<F>(trials: u64, opts: &McOptions, per_trial: F) -> Result<Vec<Block>>
where
    F: Fn(u64) -> Result<(f64, f64)> + Sync,
{
    let block = opts.block.max(1) as u64;
    let n_blocks = trials.div_ceil(block);
    with_workers(opts.workers, || {
        (0..n_blocks)
            .into_par_iter()
            .map(|b| {
                let start = b * block;
                let end = (start + block).min(trials);
                let mut out = Block {
                    c: Moments::default(),
                    trace: Moments::default(),
                    values: Vec::with_capacity((end - start) as usize),
                };
                for t in start..end {
                    let (x, y) = per_trial(t).map_err(|e| trial_error(t, e))?;
                    out.c.push(x);
                    out.trace.push(y);
                    out.values.push(x);
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()
    })?
}

/// MI statistics over `trials` sampled channels at noise variance `σ²`.
pub fn run_mi_experiment(
    model: &ChannelModel,
    dist: &EntryDistribution,
    sigma2: f64,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloSummary> {
    run_mi_experiment_with(model, dist, sigma2, trials, seed, &McOptions::default())
}

pub fn run_mi_experiment_with(
    model: &ChannelModel,
    sampler: &dyn EntrySampler,
    sigma2: f64,
    trials: u64,
    seed: u64,
    opts: &McOptions,
) -> Result<MonteCarloSummary> {
    if trials < 2 {
        return Err(Error::Config(format!("need at least 2 trials, got {trials}")));
    }
    check_consistent(model, sampler)?;
    let stats = mi_clt(model, sigma2, &opts.solver)?;
    let sol = solve(model, SpectralPoint::from_noise(sigma2)?, &opts.solver)?;
    let de_trace = resolvent_trace_de(&sol).re;

    let blocks = run_blocks(trials, opts, |t| {
        let mut rng = stream_rng(seed, t);
        let h = sample_channel_with(model, sampler, &mut rng);
        mi_and_resolvent_trace(&h, sigma2)
    })?;

    let mut c_acc = Moments::default();
    let mut tr_acc = Moments::default();
    let mut reservoir = Reservoir::new(opts.ecdf_cap);
    let mut res_rng = stream_rng(seed, RESERVOIR_STREAM);
    for b in blocks {
        c_acc = c_acc.merge(&b.c);
        tr_acc = tr_acc.merge(&b.trace);
        for x in b.values {
            reservoir.push(x, &mut res_rng);
        }
    }
    let var_c = c_acc.variance();
    Ok(MonteCarloSummary {
        trials,
        seed,
        sigma2,
        mean_c: c_acc.mean,
        var_c,
        se_mean: c_acc.se_mean(),
        se_var: c_acc.se_variance(),
        ecdf: reservoir.into_sorted(),
        emp_bias_mean: c_acc.mean - stats.v,
        emp_bias_var: var_c - stats.theta_g,
        emp_resolvent_bias: c(tr_acc.mean - de_trace),
        se_resolvent: tr_acc.se_mean(),
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ResolventSummary {
    pub trials: u64,
    pub seed: u64,
    pub z: Complex64,
    /// Empirical `E Tr Q(z)`.
    pub mean_trace: Complex64,
    /// `Tr T(z)`
    pub de_trace: Complex64,
    /// `E Tr Q(z) − Tr T(z)`
    pub bias: Complex64,
    /// Standard errors of the real and imaginary parts.
    pub se_re: f64,
    pub se_im: f64,
}

/// Empirical `E Tr Q(z) − Tr T(z)`.
pub fn run_resolvent_experiment(
    model: &ChannelModel,
    dist: &EntryDistribution,
    z: SpectralPoint,
    trials: u64,
    seed: u64,
) -> Result<ResolventSummary> {
    run_resolvent_experiment_with(model, dist, z, trials, seed, &McOptions::default())
}

pub fn run_resolvent_experiment_with(
    model: &ChannelModel,
    sampler: &dyn EntrySampler,
    z: SpectralPoint,
    trials: u64,
    seed: u64,
    opts: &McOptions,
) -> Result<ResolventSummary> {
    if trials < 2 {
        return Err(Error::Config(format!("need at least 2 trials, got {trials}")));
    }
    check_consistent(model, sampler)?;
    let sol = solve(model, z, &opts.solver)?;
    let de_trace = resolvent_trace_de(&sol);
    let zz = z.z();
    let n = model.n();

    let blocks = run_blocks(trials, opts, |t| {
        let mut rng = stream_rng(seed, t);
        let h = sample_channel_with(model, sampler, &mut rng);
        let mut b = &h * h.adjoint();
        for i in 0..n {
            b[(i, i)] -= zz;
        }
        let q = if z.is_real() { inverse_hpd(b)? } else { inverse_general(b)? };
        let tr = q.trace();
        Ok((tr.re, tr.im))
    })?;

    let mut re = Moments::default();
    let mut im = Moments::default();
    for b in blocks {
        re = re.merge(&b.c);
        im = im.merge(&b.trace);
    }
    let mean_trace = Complex64::new(re.mean, im.mean);
    Ok(ResolventSummary {
        trials,
        seed,
        z: zz,
        mean_trace,
        de_trace,
        bias: mean_trace - de_trace,
        se_re: re.se_mean(),
        se_im: if z.is_real() { 0.0 } else { im.se_mean() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{moments_of, ModulusLaw};

    fn small() -> (ChannelModel, EntryDistribution) {
        let dist = EntryDistribution::new(ModulusLaw::Weibull { k: 1.0 }, 1.6, 0.4).unwrap();
        let los = crate::model::ula_los(3, 6, None).unwrap();
        let model = crate::model::rician_model(&los, 1.0, vec![1.0; 3], vec![1.0; 6], moments_of(&dist).unwrap()).unwrap();
        (model, dist)
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let (model, dist) = small();
        let run = |w| {
            let opts = McOptions {
                workers: Some(w),
                block: 7,
                ecdf_cap: 50,
                ..Default::default()
            };
            run_mi_experiment_with(&model, &dist, 0.3, 300, 11, &opts).unwrap()
        };
        let a = run(1);
        let b = run(3);
        assert_eq!(a.mean_c.to_bits(), b.mean_c.to_bits());
        assert_eq!(a.var_c.to_bits(), b.var_c.to_bits());
        assert_eq!(a.se_var.to_bits(), b.se_var.to_bits());
        assert_eq!(a.ecdf, b.ecdf);
        assert_eq!(a.ecdf.len(), 50);
    }

    #[test]
    fn too_few_trials() {
        let (model, dist) = small();
        assert!(run_mi_experiment(&model, &dist, 0.3, 1, 0).is_err());
    }

    #[test]
    fn resolvent_trace_matches_mi_byproduct() {
        let (model, dist) = small();
        let opts = McOptions::default();
        let a = run_mi_experiment_with(&model, &dist, 0.4, 50, 3, &opts).unwrap();
        let b = run_resolvent_experiment_with(&model, &dist, SpectralPoint::from_noise(0.4).unwrap(), 50, 3, &opts).unwrap();
        assert!((a.emp_resolvent_bias - b.bias).norm() < 1e-10);
    }
}
