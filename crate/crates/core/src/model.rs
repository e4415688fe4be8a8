//! Channel scenario `H = A + M^{-1/2} D^{1/2} X D̃^{1/2}`, entry moments and
//! the non-circular, non-Gaussian entry construction `X = r σ_r cos φ + j r σ_i sin φ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, CMatrix};
use crate::special::{ellipe, gamma};

/// Pseudo-variance `ϑ = E x²`, fourth cumulant `κ = E|x|⁴ − |ϑ|² − 2` and
/// crossed third moment `ζ = E|x|²x` of a unit-variance entry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryMoments {
    pub vartheta: Complex64,
    pub kappa: f64,
    pub zeta: Complex64,
}

impl EntryMoments {
    pub const GAUSSIAN: EntryMoments = EntryMoments {
        vartheta: Complex64::new(0.0, 0.0),
        kappa: 0.0,
        zeta: Complex64::new(0.0, 0.0),
    };

    pub fn new(vartheta: Complex64, kappa: f64, zeta: Complex64) -> Result<Self> {
        let m = EntryMoments {
            vartheta,
            kappa,
            zeta,
        };
        m.validate()?;
        Ok(m)
    }

    /// `E|x|⁴ = κ + |ϑ|² + 2`
    pub fn fourth_moment(&self) -> f64 {
        self.kappa + self.vartheta.norm_sqr() + 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.vartheta.re.is_finite() && self.vartheta.im.is_finite()) {
            return Err(Error::Domain("pseudo-variance must be finite".into()));
        }
        if self.vartheta.norm() > 1.0 + 1e-12 {
            return Err(Error::Domain(format!(
                "|ϑ| = {} exceeds 1",
                self.vartheta.norm()
            )));
        }
        // Cauchy–Schwarz: E|x|⁴ ≥ (E|x|²)² = 1.
        if !self.kappa.is_finite() || self.fourth_moment() < 1.0 - 1e-12 {
            return Err(Error::Domain(format!(
                "E|x|^4 = {} is below 1",
                self.fourth_moment()
            )));
        }
        Ok(())
    }
}

/// Law of the modulus `r`, with the normalization `E r² = 1` built in.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", content = "params", rename_all = "lowercase")]
pub enum ModulusLaw {
    /// Scale `λ = 1/√Γ(1+2/k)`.
    Weibull { k: f64 },
    /// Log-location `μ = −σ²`.
    Lognormal { sigma: f64 },
    /// Spread `Ω = 1`.
    Nakagami { m: f64 },
}

impl ModulusLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ModulusLaw::Weibull { k } if !(k > 0.0 && k.is_finite()) => {
                Err(Error::Domain(format!("Weibull shape k = {k} must be positive")))
            }
            ModulusLaw::Lognormal { sigma } if !(sigma >= 0.0 && sigma.is_finite()) => Err(
                Error::Domain(format!("lognormal sigma = {sigma} must be non-negative")),
            ),
            ModulusLaw::Nakagami { m } if !(m > 0.0 && m.is_finite()) => {
                Err(Error::Domain(format!("Nakagami m = {m} must be positive")))
            }
            _ => Ok(()),
        }
    }

    pub fn weibull_scale(k: f64) -> f64 {
        1.0 / gamma(1.0 + 2.0 / k).sqrt()
    }

    pub fn mean(&self) -> f64 {
        match *self {
            ModulusLaw::Weibull { k } => gamma(1.0 + 1.0 / k) * Self::weibull_scale(k),
            ModulusLaw::Lognormal { sigma } => (-0.5 * sigma * sigma).exp(),
            ModulusLaw::Nakagami { m } => {
                // Γ(m+½)/(Γ(m)√m), via logs so large m does not overflow.
                (crate::special::ln_gamma(m + 0.5) - crate::special::ln_gamma(m)).exp() / m.sqrt()
            }
        }
    }

    /// `E r⁴` under the `E r² = 1` normalization.
    pub fn fourth_moment(&self) -> f64 {
        match *self {
            ModulusLaw::Weibull { k } => gamma(1.0 + 4.0 / k) / gamma(1.0 + 2.0 / k).powi(2),
            ModulusLaw::Lognormal { sigma } => (4.0 * sigma * sigma).exp(),
            ModulusLaw::Nakagami { m } => 1.0 + 1.0 / m,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModulusLaw::Weibull { .. } => "weibull",
            ModulusLaw::Lognormal { .. } => "lognormal",
            ModulusLaw::Nakagami { .. } => "nakagami",
        }
    }

    /// The law's single shape parameter (k, σ or m).
    pub fn parameter(&self) -> f64 {
        match *self {
            ModulusLaw::Weibull { k } => k,
            ModulusLaw::Lognormal { sigma } => sigma,
            ModulusLaw::Nakagami { m } => m,
        }
    }

    pub fn with_parameter(&self, p: f64) -> ModulusLaw {
        match self {
            ModulusLaw::Weibull { .. } => ModulusLaw::Weibull { k: p },
            ModulusLaw::Lognormal { .. } => ModulusLaw::Lognormal { sigma: p },
            ModulusLaw::Nakagami { .. } => ModulusLaw::Nakagami { m: p },
        }
    }
}

/// Entry law `X = r σ_r cos φ + j r σ_i sin φ`, `φ ~ U[0, 2π)` independent of `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryDistribution {
    #[serde(flatten)]
    pub modulus_law: ModulusLaw,
    pub sigma_r2: f64,
    pub sigma_i2: f64,
}

impl EntryDistribution {
    pub fn new(modulus_law: ModulusLaw, sigma_r2: f64, sigma_i2: f64) -> Result<Self> {
        let d = EntryDistribution {
            modulus_law,
            sigma_r2,
            sigma_i2,
        };
        d.validate()?;
        Ok(d)
    }

    /// Rayleigh modulus with equal weights: exactly `CN(0, 1)`.
    pub fn circular_gaussian() -> Self {
        EntryDistribution {
            modulus_law: ModulusLaw::Nakagami { m: 1.0 },
            sigma_r2: 1.0,
            sigma_i2: 1.0,
        }
    }

    /// Non-circular entry with pseudo-variance `ϑ`, i.e. `σ_r² = 1 + ϑ`, `σ_i² = 1 − ϑ`.
    pub fn with_pseudo_variance(modulus_law: ModulusLaw, vartheta: f64) -> Result<Self> {
        Self::new(modulus_law, 1.0 + vartheta, 1.0 - vartheta)
    }

    pub fn validate(&self) -> Result<()> {
        self.modulus_law.validate()?;
        if !(self.sigma_r2 >= 0.0 && self.sigma_i2 >= 0.0)
            || !self.sigma_r2.is_finite()
            || !self.sigma_i2.is_finite()
        {
            return Err(Error::Domain(format!(
                "weights must be non-negative (σ_r² = {}, σ_i² = {})",
                self.sigma_r2, self.sigma_i2
            )));
        }
        if (self.sigma_r2 + self.sigma_i2 - 2.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "σ_r² + σ_i² = {} must equal 2 for unit entry variance",
                self.sigma_r2 + self.sigma_i2
            )));
        }
        Ok(())
    }

    /// Advisory notes that do not make the law invalid.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if let ModulusLaw::Lognormal { sigma } = self.modulus_law {
            if sigma > 1.0 {
                w.push(format!(
                    "lognormal sigma = {sigma} > 1: heavy tails, Monte-Carlo estimates converge slowly"
                ));
            }
        }
        w
    }
}

/// Moments of the constructed entry law.
pub fn moments_of(dist: &EntryDistribution) -> Result<EntryMoments> {
    dist.validate()?;
    let (sr2, si2) = (dist.sigma_r2, dist.sigma_i2);
    // E r² = 1 under every normalization.
    let vartheta = 0.5 * (sr2 - si2);
    let er4 = dist.modulus_law.fourth_moment();
    let kappa =
        (3.0 / 8.0 * sr2 * sr2 + 3.0 / 8.0 * si2 * si2 + 2.0 / 8.0 * sr2 * si2) * er4
            - vartheta * vartheta
            - 2.0;
    Ok(EntryMoments {
        vartheta: Complex64::new(vartheta, 0.0),
        kappa,
        // Odd trigonometric moments of a uniform phase vanish.
        zeta: Complex64::new(0.0, 0.0),
    })
}

/// Coefficient of variation `√(Var|X| / (E|X|)²)` of the entry modulus.
pub fn cv_of(dist: &EntryDistribution) -> Result<f64> {
    dist.validate()?;
    let e_abs = mean_abs(dist)?;
    Ok((1.0 / (e_abs * e_abs) - 1.0).max(0.0).sqrt())
}

/// `E|X| = E r · E√(σ_r² cos²φ + σ_i² sin²φ)`.
pub fn mean_abs(dist: &EntryDistribution) -> Result<f64> {
    let (sr, si) = (dist.sigma_r2.sqrt(), dist.sigma_i2.sqrt());
    let (big, small) = if sr >= si { (sr, si) } else { (si, sr) };
    if big == 0.0 {
        return Err(Error::Domain("both weights vanish".into()));
    }
    let m = 1.0 - (small * small) / (big * big);
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::Domain(format!("elliptic parameter {m} outside [0, 1]")));
    }
    let phase_factor = 2.0 / PI * big * ellipe(m);
    Ok(phase_factor * dist.modulus_law.mean())
}

/// Uniform-linear-array steering matrix; column `m` is `[1, e^{jα_m}, …, e^{j(N−1)α_m}]ᵀ`.
/// `None` selects `α_m = 2πm/N`.
pub fn ula_los(n: usize, m: usize, angles: Option<&[f64]>) -> Result<CMatrix> {
    if n == 0 || m == 0 {
        return Err(Error::Dimension("ULA dimensions must be positive".into()));
    }
    let alphas: Vec<f64> = match angles {
        Some(a) if a.len() != m => {
            return Err(Error::Dimension(format!(
                "{} angles given for {m} columns",
                a.len()
            )))
        }
        Some(a) => a.to_vec(),
        None => (0..m).map(|k| 2.0 * PI * k as f64 / n as f64).collect(),
    };
    Ok(CMatrix::from_fn(n, m, |row, col| {
        Complex64::from_polar(1.0, row as f64 * alphas[col])
    }))
}

/// A validated channel scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelModel {
    a: CMatrix,
    d: Vec<f64>,
    dt: Vec<f64>,
    moments: EntryMoments,
}

impl ChannelModel {
    /// Validates with the default spectral-norm cap, see [`default_norm_cap`].
    pub fn new(a: CMatrix, d: Vec<f64>, dt: Vec<f64>, moments: EntryMoments) -> Result<Self> {
        let cap = default_norm_cap(&a);
        Self::with_norm_cap(a, d, dt, moments, cap)
    }

    pub fn with_norm_cap(
        a: CMatrix,
        d: Vec<f64>,
        dt: Vec<f64>,
        moments: EntryMoments,
        norm_cap: f64,
    ) -> Result<Self> {
        let (n, m) = a.shape();
        if n == 0 || m == 0 {
            return Err(Error::Dimension("N and M must be positive".into()));
        }
        if d.len() != n || dt.len() != m {
            return Err(Error::Dimension(format!(
                "A is {n}x{m} but D has {} and D̃ has {} entries",
                d.len(),
                dt.len()
            )));
        }
        if d.iter().chain(dt.iter()).any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidModel(
                "variance profiles must be finite and non-negative".into(),
            ));
        }
        let mf = m as f64;
        if d.iter().sum::<f64>() / mf <= 0.0 || dt.iter().sum::<f64>() / mf <= 0.0 {
            return Err(Error::InvalidModel(
                "normalized traces of D and D̃ must be positive".into(),
            ));
        }
        if a.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::InvalidModel("LoS matrix has non-finite entries".into()));
        }
        let norm = spectral_norm(&a);
        if norm > norm_cap * (1.0 + 1e-12) {
            return Err(Error::InvalidModel(format!(
                "‖A‖ = {norm} exceeds the cap {norm_cap}"
            )));
        }
        moments.validate()?;
        Ok(ChannelModel { a, d, dt, moments })
    }

    /// Centered model `A = 0`.
    pub fn centered(n: usize, d: Vec<f64>, dt: Vec<f64>, moments: EntryMoments) -> Result<Self> {
        Self::new(CMatrix::zeros(n, dt.len()), d, dt, moments)
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn m(&self) -> usize {
        self.a.ncols()
    }

    /// `c = N/M`
    pub fn ratio(&self) -> f64 {
        self.n() as f64 / self.m() as f64
    }

    pub fn los(&self) -> &CMatrix {
        &self.a
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn dt(&self) -> &[f64] {
        &self.dt
    }

    pub fn moments(&self) -> &EntryMoments {
        &self.moments
    }

    pub fn with_moments(&self, moments: EntryMoments) -> Result<Self> {
        moments.validate()?;
        Ok(ChannelModel {
            moments,
            ..self.clone()
        })
    }

    pub fn is_centered(&self) -> bool {
        self.a.iter().all(|x| *x == Complex64::new(0.0, 0.0))
    }
}

/// `10 · max(1, √(N/M)) · max_j ‖a_j‖`
pub fn default_norm_cap(a: &CMatrix) -> f64 {
    let (n, m) = a.shape();
    let max_col = a
        .column_iter()
        .map(|col| col.norm())
        .fold(0.0, f64::max);
    10.0 * (n as f64 / m as f64).sqrt().max(1.0) * max_col
}

/// Rician mixing: `A = √(K/(K+1)) · los / √M`, and the non-LoS power
/// `1/(K+1)` folded into the receive profile `D`.
pub fn rician_model(
    los: &CMatrix,
    k_factor: f64,
    d: Vec<f64>,
    dt: Vec<f64>,
    moments: EntryMoments,
) -> Result<ChannelModel> {
    if !(k_factor >= 0.0) || k_factor.is_nan() {
        return Err(Error::Domain(format!("Rician factor K = {k_factor} must be ≥ 0")));
    }
    let m = los.ncols() as f64;
    let los_scale = if k_factor.is_infinite() {
        1.0
    } else {
        (k_factor / (k_factor + 1.0)).sqrt()
    };
    let nlos_power = 1.0 / (k_factor + 1.0);
    let a = los * Complex64::new(los_scale / m.sqrt(), 0.0);
    let d = d.into_iter().map(|x| x * nlos_power).collect();
    ChannelModel::new(a, d, dt, moments)
}
