//! Mutual information `C = log det(I + HHᴴ/σ²)` (nats): deterministic mean,
//! non-Gaussian mean bias, CLT variance and outage probability.

use nalgebra::Cholesky;
use serde::Serialize;

use crate::bias::potential_terms;
use crate::error::{Error, Result};
use crate::fixed_point::{solve, SolverOptions, SpectralPoint};
use crate::linalg::{c, log_det_hpd, CMatrix};
use crate::model::ChannelModel;
use crate::quantities::table1;
use crate::special::normal_cdf;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MIStatistics {
    pub sigma2: f64,
    /// Deterministic equivalent of `E C`.
    pub v: f64,
    /// Mean bias from non-circularity and non-Gaussianity.
    pub b_c: f64,
    pub b_c_theta: f64,
    pub b_c_kappa: f64,
    /// Gaussian variance `−log Δ`.
    pub theta_g: f64,
    /// Variance correction; `b_c = −θ_B/2`.
    pub theta_b: f64,
    pub theta: f64,
    /// Corrected mean `V + B_C`.
    pub mean: f64,
}

/// CLT statistics of `C` at noise variance `σ²`:
///
/// ```text
/// V   = −log det(σ²T) + log det(I + δD̃) − Mσ²δδ̃
/// g   = −log Δ_T + (κσ⁴/M²) Tr D²S² Tr D̃²S̃²      (at z = −σ²)
/// B_C = −g/2,  Θ_B = g,  Θ_G = −log Δ,  Θ = Θ_G + Θ_B
/// ```
pub fn mi_clt(model: &ChannelModel, sigma2: f64, opts: &SolverOptions) -> Result<MIStatistics> {
    let z = SpectralPoint::from_noise(sigma2)?;
    let sol = solve(model, z, opts)?;
    let q = table1(model, &sol)?;
    let delta = sol.delta.re;
    let delta_t = sol.delta_t.re;
    let m = model.m() as f64;

    let log_det_t = -log_det_hpd(sol.t.map(|x| x * sigma2))?;
    let log_det_rt: f64 = model.dt().iter().map(|&d| (1.0 + delta * d).ln()).sum();
    let v = log_det_t + log_det_rt - m * sigma2 * delta * delta_t;

    if !(q.det.re > 0.0) {
        return Err(Error::Degenerate(format!("Δ = {} is not positive", q.det)));
    }
    if !(q.det_tr.re > 0.0) {
        return Err(Error::Degenerate(format!("Δ_T = {} is not positive", q.det_tr)));
    }
    let (g_theta, g_kappa) = potential_terms(model, &q);
    let (g_theta, g_kappa) = (g_theta.re, g_kappa.re);
    let theta_b = g_theta + g_kappa;
    // `0 − x` rather than `−x` keeps the Gaussian case at +0.
    let b_c = 0.0 - 0.5 * theta_b;
    let theta_g = -q.det.re.ln();
    Ok(MIStatistics {
        sigma2,
        v,
        b_c,
        b_c_theta: 0.0 - 0.5 * g_theta,
        b_c_kappa: 0.0 - 0.5 * g_kappa,
        theta_g,
        theta_b,
        theta: theta_g + theta_b,
        mean: v + b_c,
    })
}

/// `log det(I + HHᴴ/σ²)` in nats via Cholesky.
pub fn mutual_information(h: &CMatrix, sigma2: f64) -> Result<f64> {
    if !(sigma2 > 0.0) {
        return Err(Error::Domain(format!("σ² = {sigma2} must be positive")));
    }
    let n = h.nrows();
    let mut g = h * h.adjoint() / c(sigma2);
    for i in 0..n {
        g[(i, i)] += 1.0;
    }
    log_det_hpd(g)
}

/// `log det(I + HHᴴ/σ²)` and `Tr (HHᴴ + σ²I)⁻¹` from one factorization.
pub fn mi_and_resolvent_trace(h: &CMatrix, sigma2: f64) -> Result<(f64, f64)> {
    let n = h.nrows();
    let mut g = h * h.adjoint() / c(sigma2);
    for i in 0..n {
        g[(i, i)] += 1.0;
    }
    let ch = Cholesky::new(g).ok_or_else(|| Error::Numeric("I + HHᴴ/σ² is not positive definite".into()))?;
    let l = ch.l();
    let log_det: f64 = (0..n).map(|i| 2.0 * l[(i, i)].re.ln()).sum();
    // Tr G⁻¹ = ‖L⁻¹‖²_F
    let mut linv = CMatrix::identity(n, n);
    if !l.solve_lower_triangular_mut(&mut linv) {
        return Err(Error::Numeric("singular Cholesky factor".into()));
    }
    Ok((log_det, linv.norm_squared() / sigma2))
}

/// `P(C ≤ R) ≈ Φ((R − (V + B_C))/√Θ)`.
pub fn outage_probability(stats: &MIStatistics, rate: f64) -> f64 {
    normal_cdf((rate - stats.mean) / stats.theta.sqrt())
}

/// Outage with the Gaussian-entry statistics only (`V`, `Θ_G`), for comparison.
pub fn outage_probability_gaussian(stats: &MIStatistics, rate: f64) -> f64 {
    normal_cdf((rate - stats.v) / stats.theta_g.sqrt())
}

/// Natural-log values to bits.
pub fn nats_to_bits(x: f64) -> f64 {
    x / std::f64::consts::LN_2
}
