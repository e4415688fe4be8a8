//! The coupled system
//!
//! ```text
//! δ  = (1/M) Tr D T(z),    T(z) = (−z(I + δ̃D) + A(I + δD̃)⁻¹Aᴴ)⁻¹
//! δ̃ = (1/M) Tr D̃ T̃(z),  T̃(z) = (−z(I + δD̃) + Aᴴ(I + δ̃D)⁻¹A)⁻¹
//! ```
//!
//! solved by Gauss–Seidel fixed-point iteration from `δ = δ̃ = 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, inverse_general, inverse_hpd, scale_cols, trace_diag, CMatrix, ONE};
use crate::model::ChannelModel;

/// Non-monotone iterations tolerated before damping switches on.
const AUTO_DAMPING_AFTER: usize = 200;
const AUTO_DAMPING: f64 = 0.5;

/// A point `z ∈ ℂ ∖ ℝ⁺`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint(Complex64);

impl SpectralPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::Domain(format!("z = {z} is not finite")));
        }
        if z.im == 0.0 && z.re >= 0.0 {
            return Err(Error::Domain(format!("z = {z} lies on the non-negative real axis")));
        }
        Ok(SpectralPoint(z))
    }

    /// `z = −σ²`
    pub fn from_noise(sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) {
            return Err(Error::Domain(format!("noise variance σ² = {sigma2} must be positive")));
        }
        Self::new(c(-sigma2))
    }

    pub fn z(&self) -> Complex64 {
        self.0
    }

    pub fn is_real(&self) -> bool {
        self.0.im == 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Fixed relaxation `θ ∈ (0, 1]`; `None` starts undamped and switches to
    /// `θ = 0.5` once the residual has failed to decrease 200 times.
    pub damping: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-12,
            max_iter: 10_000,
            damping: None,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tolerance {} must be positive", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be at least 1".into()));
        }
        if let Some(theta) = self.damping {
            if !(theta > 0.0 && theta <= 1.0) {
                return Err(Error::Config(format!("damping {theta} must lie in (0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct FixedPointSolution {
    pub z: SpectralPoint,
    pub delta: Complex64,
    pub delta_t: Complex64,
    /// `T(z)`, N×N
    pub t: CMatrix,
    /// `T̃(z)`, M×M
    pub tt: CMatrix,
    pub iterations: usize,
    /// `max(|δ − f(δ, δ̃)|, |δ̃ − f̃(δ, δ̃)|)` at the returned point.
    pub residual: f64,
}

impl FixedPointSolution {
    pub fn z(&self) -> Complex64 {
        self.z.z()
    }

    /// Diagonal of `R = (I + δ̃D)⁻¹`.
    pub fn r_diag(&self, model: &ChannelModel) -> Vec<Complex64> {
        model.d().iter().map(|&d| ONE / (ONE + self.delta_t * d)).collect()
    }

    /// Diagonal of `R̃ = (I + δD̃)⁻¹`.
    pub fn rt_diag(&self, model: &ChannelModel) -> Vec<Complex64> {
        model.dt().iter().map(|&d| ONE / (ONE + self.delta * d)).collect()
    }
}

/// `T(δ, δ̃)`
fn t_matrix(model: &ChannelModel, z: SpectralPoint, delta: Complex64, delta_t: Complex64) -> Result<CMatrix> {
    let a = model.los();
    let rt: Vec<Complex64> = model.dt().iter().map(|&d| ONE / (ONE + delta * d)).collect();
    let mut m = scale_cols(a, &rt) * a.adjoint();
    for (i, &d) in model.d().iter().enumerate() {
        m[(i, i)] -= z.z() * (ONE + delta_t * d);
    }
    invert(m, z, delta, delta_t)
}

/// `T̃(δ, δ̃)`
fn tt_matrix(model: &ChannelModel, z: SpectralPoint, delta: Complex64, delta_t: Complex64) -> Result<CMatrix> {
    let a = model.los();
    let r: Vec<Complex64> = model.d().iter().map(|&d| ONE / (ONE + delta_t * d)).collect();
    let ah = a.adjoint();
    let mut m = scale_cols(&ah, &r) * a;
    for (j, &d) in model.dt().iter().enumerate() {
        m[(j, j)] -= z.z() * (ONE + delta * d);
    }
    invert(m, z, delta, delta_t)
}

// On the negative real axis with positive (δ, δ̃) the matrix is Hermitian
// positive definite; anywhere else fall back to LU.
fn invert(m: CMatrix, z: SpectralPoint, delta: Complex64, delta_t: Complex64) -> Result<CMatrix> {
    let hpd = z.is_real() && delta.im == 0.0 && delta_t.im == 0.0 && delta.re > 0.0 && delta_t.re > 0.0;
    if hpd {
        inverse_hpd(m)
    } else {
        inverse_general(m)
    }
}

fn normalized_trace(diag: &[f64], m: &CMatrix, dim: usize, real: bool) -> Complex64 {
    let v = trace_diag(diag, m) / dim as f64;
    if real {
        c(v.re)
    } else {
        v
    }
}

/// Solve for `(δ, δ̃)` at `z` and build `T`, `T̃` from the returned pair.
pub fn solve(model: &ChannelModel, z: SpectralPoint, opts: &SolverOptions) -> Result<FixedPointSolution> {
    opts.validate()?;
    let m = model.m();
    let real = z.is_real();
    let mut delta = ONE;
    let mut delta_t = ONE;
    let mut theta = opts.damping.unwrap_or(1.0);
    let mut non_monotone = 0usize;
    let mut last_residual = f64::INFINITY;

    for iteration in 0..=opts.max_iter {
        let t = t_matrix(model, z, delta, delta_t)?;
        let tt = tt_matrix(model, z, delta, delta_t)?;
        let f = normalized_trace(model.d(), &t, m, real);
        let ft = normalized_trace(model.dt(), &tt, m, real);
        let residual = (delta - f).norm().max((delta_t - ft).norm());
        if !residual.is_finite() {
            return Err(Error::Numeric(format!(
                "fixed-point iterate became non-finite at z = {}",
                z.z()
            )));
        }
        if residual <= opts.tol {
            return Ok(FixedPointSolution {
                z,
                delta,
                delta_t,
                t,
                tt,
                iterations: iteration,
                residual,
            });
        }
        if iteration == opts.max_iter {
            return Err(Error::IterationLimit {
                iterations: opts.max_iter,
                residual,
            });
        }
        if residual >= last_residual {
            non_monotone += 1;
            if opts.damping.is_none() && non_monotone >= AUTO_DAMPING_AFTER {
                theta = AUTO_DAMPING;
            }
        }
        last_residual = residual;

        // Gauss–Seidel: δ̃ is refreshed with the new δ.
        delta = theta * f + (1.0 - theta) * delta;
        let tt = tt_matrix(model, z, delta, delta_t)?;
        let ft = normalized_trace(model.dt(), &tt, m, real);
        delta_t = theta * ft + (1.0 - theta) * delta_t;
    }
    unreachable!("loop returns on its last iteration")
}

/// `Tr T(z)`, the deterministic equivalent of `E Tr Q(z)`.
pub fn resolvent_trace_de(sol: &FixedPointSolution) -> Complex64 {
    sol.t.trace()
}

/// Relative residuals of the structural identities satisfied by any exact
/// solution.
#[derive(Clone, Copy, Debug)]
pub struct IdentityResiduals {
    /// `T̃ = −z⁻¹R̃ + z⁻¹R̃AᴴTAR̃`
    pub woodbury: f64,
    /// `TAR̃ = RAT̃`
    pub intertwining: f64,
    /// `Tr D̃T̃AᴴDR²AT̃ = Tr DTAD̃R̃²AᴴT`
    pub trace_symmetry: f64,
}

pub fn identity_residuals(model: &ChannelModel, sol: &FixedPointSolution) -> IdentityResiduals {
    use crate::linalg::{diag_matrix, max_rel_diff, rel_gap};
    let z = sol.z();
    let a = model.los();
    let ah = a.adjoint();
    let r = diag_matrix(&sol.r_diag(model));
    let rt = diag_matrix(&sol.rt_diag(model));
    let d = diag_matrix(model.d());
    let dt = diag_matrix(model.dt());

    let rhs = (&rt * &ah * &sol.t * a * &rt - &rt) / z;
    let woodbury = max_rel_diff(&sol.tt, &rhs);

    let lhs = &sol.t * a * &rt;
    let rhs = &r * a * &sol.tt;
    let intertwining = max_rel_diff(&lhs, &rhs);

    let left = (&dt * &sol.tt * &ah * &d * &r * &r * a * &sol.tt).trace();
    let right = (&d * &sol.t * a * &dt * &rt * &rt * &ah * &sol.t).trace();
    let trace_symmetry = rel_gap(left, right);

    IdentityResiduals {
        woodbury,
        intertwining,
        trace_symmetry,
    }
}
