//! Covariance of two quadratic forms `zᴴΓz`, `zᴴΛz` with
//! `z = a + N^{-1/2} D^{1/2} x`, `x` i.i.d. with moments `(ϑ, κ, ζ)`.
//!
//! The covariance is `E[(X − EX)(Y − EY)]`, without conjugation:
//!
//! ```text
//! N⁻¹  [aᴴΓDΛa + aᴴΛDΓa + ϑ aᴴΓDΛᵀā + ϑ̄ aᵀΓᵀDΛa]
//! + N^{-3/2} ζ  [aᴴΓD^{3/2}λ + aᴴΛD^{3/2}γ]
//! + N^{-3/2} ζ̄ [λᵀD^{3/2}Γa + γᵀD^{3/2}Λa]
//! + N⁻² [Tr DΓDΛ + |ϑ|² Tr DΓDΛᵀ + κ Σᵢ dᵢ² Γᵢᵢ Λᵢᵢ]
//! ```
//!
//! where `γ`, `λ` are the diagonals of `Γ`, `Λ`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{diag_matrix, CMatrix, CVector};
use crate::model::EntryMoments;

use super::sampling::{stream_rng, EntrySampler};
use super::stats::Moments;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CovarianceCheck {
    pub analytic: Complex64,
    pub empirical: Complex64,
    pub se_re: f64,
    pub se_im: f64,
}

impl CovarianceCheck {
    /// Largest deviation in standard errors over the real and imaginary parts.
    pub fn z_score(&self) -> f64 {
        let dev = self.empirical - self.analytic;
        let score = |d: f64, se: f64| if se > 0.0 { d.abs() / se } else if d == 0.0 { 0.0 } else { f64::INFINITY };
        score(dev.re, self.se_re).max(score(dev.im, self.se_im))
    }
}

fn check_dims(a: &CVector, d: &[f64], gamma: &CMatrix, lambda: &CMatrix) -> Result<usize> {
    let n = a.len();
    if n == 0 || d.len() != n || gamma.shape() != (n, n) || lambda.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "a has {n} entries, D {}, Γ {:?}, Λ {:?}",
            d.len(),
            gamma.shape(),
            lambda.shape()
        )));
    }
    Ok(n)
}

fn bilinear(u: &CVector, m: &CMatrix, v: &CVector) -> Complex64 {
    (u.transpose() * m * v)[(0, 0)]
}

/// Closed-form covariance.
pub fn quadratic_form_cov(
    a: &CVector,
    d: &[f64],
    gamma: &CMatrix,
    lambda: &CMatrix,
    moments: &EntryMoments,
) -> Result<Complex64> {
    let n = check_dims(a, d, gamma, lambda)? as f64;
    let EntryMoments { vartheta, kappa, zeta } = *moments;
    let dm = diag_matrix(d);
    let d32: Vec<f64> = d.iter().map(|x| x.powf(1.5)).collect();
    let d32m = diag_matrix(&d32);
    let a_conj = a.map(|x| x.conj());
    let gd = CVector::from_iterator(a.len(), (0..a.len()).map(|i| gamma[(i, i)]));
    let ld = CVector::from_iterator(a.len(), (0..a.len()).map(|i| lambda[(i, i)]));

    let linear = bilinear(&a_conj, &(gamma * &dm * lambda), a)
        + bilinear(&a_conj, &(lambda * &dm * gamma), a)
        + vartheta * bilinear(&a_conj, &(gamma * &dm * lambda.transpose()), &a_conj)
        + vartheta.conj() * bilinear(a, &(gamma.transpose() * &dm * lambda), a);
    let third = zeta * (bilinear(&a_conj, &(gamma * &d32m), &ld) + bilinear(&a_conj, &(lambda * &d32m), &gd))
        + zeta.conj() * (bilinear(&ld, &(&d32m * gamma), a) + bilinear(&gd, &(&d32m * lambda), a));
    let fourth_diag: Complex64 = (0..a.len()).map(|i| d[i] * d[i] * gamma[(i, i)] * lambda[(i, i)]).sum();
    let quadratic = (gamma * &dm * lambda * &dm).trace()
        + vartheta.norm_sqr() * (gamma * &dm * lambda.transpose() * &dm).trace()
        + kappa * fourth_diag;
    Ok(linear / n + third / n.powf(1.5) + quadratic / (n * n))
}

/// Closed form against the sample covariance over `trials` draws.
#[allow(clippy::too_many_arguments)]
pub fn quadratic_form_cov_oracle(
    a: &CVector,
    d: &[f64],
    gamma: &CMatrix,
    lambda: &CMatrix,
    sampler: &dyn EntrySampler,
    trials: u64,
    seed: u64,
) -> Result<CovarianceCheck> {
    if trials < 2 {
        return Err(Error::Config("need at least 2 trials".into()));
    }
    let analytic = quadratic_form_cov(a, d, gamma, lambda, &sampler.moments()?)?;
    let n = a.len();
    let scale: Vec<f64> = d.iter().map(|x| (x / n as f64).sqrt()).collect();

    const BLOCK: u64 = 4096;
    let blocks = trials.div_ceil(BLOCK);
    let pairs: Vec<(Complex64, Complex64)> = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let start = b * BLOCK;
            let end = (start + BLOCK).min(trials);
            let scale = &scale;
            (start..end).map(move |t| {
                let mut rng = stream_rng(seed, t);
                let z = CVector::from_iterator(n, (0..n).map(|i| a[i] + sampler.sample(&mut rng) * scale[i]));
                let zh = z.adjoint();
                ((&zh * gamma * &z)[(0, 0)], (&zh * lambda * &z)[(0, 0)])
            })
        })
        .collect();

    let count = pairs.len() as f64;
    let (sx, sy) = pairs.iter().fold((Complex64::default(), Complex64::default()), |(sx, sy), (x, y)| (sx + x, sy + y));
    let (mx, my) = (sx / count, sy / count);
    let mut re = Moments::default();
    let mut im = Moments::default();
    for (x, y) in &pairs {
        let p = (x - mx) * (y - my);
        re.push(p.re);
        im.push(p.im);
    }
    Ok(CovarianceCheck {
        analytic,
        empirical: Complex64::new(re.mean, im.mean),
        se_re: re.se_mean(),
        se_im: im.se_mean(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn zero_forms() {
        let a = CVector::from_element(3, c(1.0));
        let z = CMatrix::zeros(3, 3);
        let mo = EntryMoments::new(c(0.5), 2.0, Complex64::new(0.3, 0.1)).unwrap();
        assert_eq!(quadratic_form_cov(&a, &[1.0, 2.0, 3.0], &z, &z, &mo).unwrap(), c(0.0));
    }

    #[test]
    fn centered_identity_gaussian() {
        let a = CVector::zeros(3);
        let id = CMatrix::identity(3, 3);
        let d = [1.0, 2.0, 3.0];
        let v = quadratic_form_cov(&a, &d, &id, &id, &EntryMoments::GAUSSIAN).unwrap();
        assert!((v - c(14.0 / 9.0)).norm() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let a = CVector::zeros(3);
        let id = CMatrix::identity(2, 2);
        assert!(quadratic_form_cov(&a, &[1.0; 3], &id, &id, &EntryMoments::GAUSSIAN).is_err());
    }
}
