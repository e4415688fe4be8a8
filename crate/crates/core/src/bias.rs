//! `O(1)` bias `B(z) ≈ E Tr Q(z) − Tr T(z)` caused by non-circular (`ϑ`) and
//! non-Gaussian (`κ`) entries.
//!
//! Two independent routes are provided. [`bias_theorem1`] evaluates the
//! explicit combination
//!
//! ```text
//! B = 𝒴(I) + (δ̃ + zδ̃')𝒴(D) + zδ'𝒴̃(D̃)
//! ```
//!
//! for both the `ϑ` and the `κ` parts. [`bias_theorem2`] differentiates the
//! scalar potential
//!
//! ```text
//! g(z) = −log Δ_T + (κz²/M²) Tr D²S² Tr D̃²S̃²,   B = ½ g'(z)
//! ```
//!
//! numerically. Agreement between the two is the main consistency check.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixed_point::{solve, FixedPointSolution, SolverOptions, SpectralPoint};
use crate::linalg::{diag_matrix, scale_cols, scale_rows, trace_product, CMatrix, ONE, ZERO};
use crate::model::ChannelModel;
use crate::quantities::{table1_with, DeterministicQuantities, Kernels};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BiasMethod {
    Theorem1,
    Theorem2FiniteDiff,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BiasValue {
    pub b_theta: Complex64,
    pub b_kappa: Complex64,
    pub total: Complex64,
    pub method: BiasMethod,
}

/// Everything the `𝒴` terms need, built once per solution.
pub struct BiasContext<'a> {
    model: &'a ChannelModel,
    sol: &'a FixedPointSolution,
    q: DeterministicQuantities,
    k: Kernels,
    /// `T A D̃²S̃R̃² Aᴴ T`
    kappa_rx: CMatrix,
    /// `T S D² T`
    kappa_rx2: CMatrix,
    /// `T̃ Aᴴ D²SR² A T̃`
    kappa_tx: CMatrix,
    /// `T̃ S̃ D̃² T̃`
    kappa_tx2: CMatrix,
}

impl<'a> BiasContext<'a> {
    pub fn new(model: &'a ChannelModel, sol: &'a FixedPointSolution) -> Result<Self> {
        let k = Kernels::new(model, sol);
        let q = table1_with(model, sol, &k)?;
        let a = model.los();
        let ah = a.adjoint();
        let d = model.d();
        let dt = model.dt();
        let w_t: Vec<Complex64> = (0..model.m())
            .map(|j| dt[j] * dt[j] * q.st_diag[j] * q.rt_diag[j] * q.rt_diag[j])
            .collect();
        let w: Vec<Complex64> = (0..model.n())
            .map(|i| d[i] * d[i] * q.s_diag[i] * q.r_diag[i] * q.r_diag[i])
            .collect();
        let s_d2: Vec<Complex64> = (0..model.n()).map(|i| q.s_diag[i] * d[i] * d[i]).collect();
        let st_dt2: Vec<Complex64> = (0..model.m()).map(|j| q.st_diag[j] * dt[j] * dt[j]).collect();

        let ta = &sol.t * a;
        let kappa_rx = scale_cols(&ta, &w_t) * (&ah * &sol.t);
        let kappa_rx2 = &sol.t * scale_rows(&s_d2, &sol.t);
        let tah = &sol.tt * &ah;
        let kappa_tx = scale_cols(&tah, &w) * (a * &sol.tt);
        let kappa_tx2 = &sol.tt * scale_rows(&st_dt2, &sol.tt);
        Ok(BiasContext {
            model,
            sol,
            q,
            k,
            kappa_rx,
            kappa_rx2,
            kappa_tx,
            kappa_tx2,
        })
    }

    pub fn quantities(&self) -> &DeterministicQuantities {
        &self.q
    }

    fn z(&self) -> Complex64 {
        self.sol.z()
    }

    fn m(&self) -> f64 {
        self.model.m() as f64
    }

    /// `𝒴_ϑ(U)`, `U` N×N.
    pub fn y_theta(&self, u: &CMatrix) -> Result<Complex64> {
        let theta = self.model.moments().vartheta;
        if u.nrows() != self.model.n() || u.ncols() != self.model.n() {
            return Err(Error::Dimension("U must be N×N".into()));
        }
        if theta == ZERO {
            return Ok(ZERO);
        }
        let q = &self.q;
        let z = self.z();
        let t = &self.sol.t;
        let dm = diag_matrix(self.model.d());
        let dtu = &dm * t * u;
        let utd = u * t * &dm;
        let th_bar = theta.conj();
        let th2 = theta.norm_sqr();
        let num = th_bar * self.k.f_tr_under(&dtu) * (ONE - theta * q.f_tr)
            + theta * self.k.f_tr(&utd) * (ONE - th_bar * q.f_tr_under)
            + th2 * z * q.gamma_tr * self.k.script_ft_tr(u)
            + th2 * z * z * q.gamma_t_tr * self.k.gamma_tr(&utd);
        Ok(num / q.det_tr)
    }

    /// `𝒴̃_ϑ(Ũ)`, `Ũ` M×M.
    pub fn y_theta_tilde(&self, u: &CMatrix) -> Result<Complex64> {
        let theta = self.model.moments().vartheta;
        if u.nrows() != self.model.m() || u.ncols() != self.model.m() {
            return Err(Error::Dimension("Ũ must be M×M".into()));
        }
        if theta == ZERO {
            return Ok(ZERO);
        }
        let q = &self.q;
        let z = self.z();
        let tt = &self.sol.tt;
        let dtm = diag_matrix(self.model.dt());
        let dtu = &dtm * tt * u;
        let utd = u * tt * &dtm;
        let th_bar = theta.conj();
        let th2 = theta.norm_sqr();
        let num = theta * self.k.ft_tr_under(&dtu) * (ONE - th_bar * q.ft_tr)
            + th_bar * self.k.ft_tr(&utd) * (ONE - theta * q.ft_tr_under)
            + th2 * z * q.gamma_t_tr * self.k.script_f_tr(u)
            + th2 * z * z * q.gamma_tr * self.k.gamma_t_tr(&utd);
        Ok(num / q.det_tr)
    }

    /// `𝒴_κ(U) = (zκη/M) Tr D̃²S̃R̃²AᴴTUTA + (κz²η̃/M) Tr SD²TUT`
    pub fn y_kappa(&self, u: &CMatrix) -> Result<Complex64> {
        if u.nrows() != self.model.n() || u.ncols() != self.model.n() {
            return Err(Error::Dimension("U must be N×N".into()));
        }
        let kappa = self.model.moments().kappa;
        if kappa == 0.0 {
            return Ok(ZERO);
        }
        let z = self.z();
        let m = self.m();
        Ok(z * kappa * self.q.eta / m * trace_product(u, &self.kappa_rx)
            + kappa * z * z * self.q.eta_t / m * trace_product(u, &self.kappa_rx2))
    }

    /// `𝒴̃_κ(Ũ) = (zκη̃/M) Tr D²SR²AT̃ŨT̃Aᴴ + (κz²η/M) Tr S̃D̃²T̃ŨT̃`
    pub fn y_kappa_tilde(&self, u: &CMatrix) -> Result<Complex64> {
        if u.nrows() != self.model.m() || u.ncols() != self.model.m() {
            return Err(Error::Dimension("Ũ must be M×M".into()));
        }
        let kappa = self.model.moments().kappa;
        if kappa == 0.0 {
            return Ok(ZERO);
        }
        let z = self.z();
        let m = self.m();
        Ok(z * kappa * self.q.eta_t / m * trace_product(u, &self.kappa_tx)
            + kappa * z * z * self.q.eta / m * trace_product(u, &self.kappa_tx2))
    }

    pub fn bias(&self) -> Result<BiasValue> {
        let z = self.z();
        let n = self.model.n();
        let id = CMatrix::identity(n, n);
        let dm = diag_matrix(self.model.d());
        let dtm = diag_matrix(self.model.dt());
        let w_d = self.q.delta_t + z * self.q.dtprime;
        let w_dt = z * self.q.dprime;
        let b_theta = self.y_theta(&id)? + w_d * self.y_theta(&dm)? + w_dt * self.y_theta_tilde(&dtm)?;
        let b_kappa = self.y_kappa(&id)? + w_d * self.y_kappa(&dm)? + w_dt * self.y_kappa_tilde(&dtm)?;
        Ok(BiasValue {
            b_theta,
            b_kappa,
            total: b_theta + b_kappa,
            method: BiasMethod::Theorem1,
        })
    }
}

/// Explicit bias formula at a converged solution.
pub fn bias_theorem1(model: &ChannelModel, sol: &FixedPointSolution) -> Result<BiasValue> {
    BiasContext::new(model, sol)?.bias()
}

/// The two addends of `g(z)`: `(−log Δ_T, (κz²/M²) Tr D²S² Tr D̃²S̃²)`.
pub fn potential_terms(model: &ChannelModel, q: &DeterministicQuantities) -> (Complex64, Complex64) {
    let z = q.z;
    let theta_part = -q.det_tr.ln();
    let kappa = model.moments().kappa;
    let kappa_part = if kappa == 0.0 {
        ZERO
    } else {
        // Tr D²S² / M = η
        kappa * z * z * q.eta * q.eta_t
    };
    (theta_part, kappa_part)
}

/// `½ g'(z)` by central difference with step `h`.
pub fn bias_theorem2(model: &ChannelModel, z: SpectralPoint, h: f64, opts: &SolverOptions) -> Result<BiasValue> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::StepSize(format!("h = {h} must be positive")));
    }
    let zp = SpectralPoint::new(z.z() + h)?;
    let zm = SpectralPoint::new(z.z() - h)?;
    let eval = |p: SpectralPoint| -> Result<(Complex64, Complex64)> {
        let sol = solve(model, p, opts)?;
        let q = crate::quantities::table1(model, &sol)?;
        Ok(potential_terms(model, &q))
    };
    let (plus, minus) = rayon::join(|| eval(zp), || eval(zm));
    let (tp, kp) = plus?;
    let (tm, km) = minus?;
    let gp = tp + kp;
    let gm = tm + km;
    if gp == ZERO && gm == ZERO {
        return Ok(BiasValue {
            b_theta: ZERO,
            b_kappa: ZERO,
            total: ZERO,
            method: BiasMethod::Theorem2FiniteDiff,
        });
    }
    let scale = gp.norm().max(gm.norm());
    if (gp - gm).norm() < 1e3 * f64::EPSILON * scale {
        return Err(Error::StepSize(format!(
            "h = {h:e}: g(z ± h) differ by {:e}, below rounding level",
            (gp - gm).norm()
        )));
    }
    let b_theta = 0.25 * (tp - tm) / h;
    let b_kappa = 0.25 * (kp - km) / h;
    Ok(BiasValue {
        b_theta,
        b_kappa,
        total: b_theta + b_kappa,
        method: BiasMethod::Theorem2FiniteDiff,
    })
}

/// Relative gap `|B₁ − B₂| / max(|B₁|, |B₂|)`.
pub fn relative_gap(a: &BiasValue, b: &BiasValue) -> f64 {
    crate::linalg::rel_gap(a.total, b.total)
}
