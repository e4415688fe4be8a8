//! Scalar functionals of `T`, `T̃` used by the bias and variance formulas.
//!
//! Naming: a `_t` suffix marks the transmit-side (tilde) counterpart, `_tr`
//! marks the transposed variants (`γ_T`, `F_T`, …) and `_under` the
//! underlined ones (`F̲_T`). Nothing is ever conjugated: every functional is
//! holomorphic in `z`.
//!
//! Every `U`-parameterized functional is linear in `U`, so each is stored as
//! a kernel `K` with `f(U) = Tr(U K)/M`; evaluating one costs `O(n²)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fixed_point::FixedPointSolution;
use crate::linalg::{scale_cols, scale_rows, trace_diag, trace_product, CMatrix, ONE};
use crate::model::ChannelModel;

/// Below this `|Δ_T|` the bias formulas divide by noise.
pub const DEGENERATE_DET: f64 = 1e-8;

#[derive(Clone, Debug, Serialize)]
pub struct DeterministicQuantities {
    pub z: Complex64,
    pub delta: Complex64,
    pub delta_t: Complex64,
    /// Diagonal of `R = (I + δ̃D)⁻¹`
    pub r_diag: Vec<Complex64>,
    /// Diagonal of `R̃ = (I + δD̃)⁻¹`
    pub rt_diag: Vec<Complex64>,
    /// Diagonal of `T`
    pub s_diag: Vec<Complex64>,
    /// Diagonal of `T̃`
    pub st_diag: Vec<Complex64>,
    /// `γ = Tr DTDT / M`
    pub gamma: Complex64,
    /// `γ̃ = Tr D̃T̃D̃T̃ / M`
    pub gamma_t: Complex64,
    /// `γ_T = Tr DTDTᵀ / M`
    pub gamma_tr: Complex64,
    /// `γ̃_T = Tr D̃T̃D̃T̃ᵀ / M`
    pub gamma_t_tr: Complex64,
    /// `η = Tr S²D² / M`
    pub eta: Complex64,
    /// `η̃ = Tr S̃²D̃² / M`
    pub eta_t: Complex64,
    /// `F = Tr DTAR̃²D̃AᴴT / M`
    pub f: Complex64,
    /// `F_T = F_T(D)`
    pub f_tr: Complex64,
    /// `F̲_T = F̲_T(D)`
    pub f_tr_under: Complex64,
    /// `F̃_T = F̃_T(D̃)`
    pub ft_tr: Complex64,
    /// `F̲̃_T = F̲̃_T(D̃)`
    pub ft_tr_under: Complex64,
    /// `Δ = (1 − F)² − z²γγ̃`
    pub det: Complex64,
    /// `Δ_T = (1 − ϑF_T)(1 − ϑ̄F̲_T) − |ϑ|²z²γ_Tγ̃_T`
    pub det_tr: Complex64,
    /// `δ' = dδ/dz`
    pub dprime: Complex64,
    /// `δ̃' = dδ̃/dz`
    pub dtprime: Complex64,
}

/// Receive-side (`U` is N×N) functionals.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct UFunctionals {
    /// `γ(U) = Tr UTDT / M`
    pub gamma: Complex64,
    /// `γ_T(U) = Tr DTUTᵀ / M`
    pub gamma_tr: Complex64,
    /// `F(U) = Tr UTAR̃²D̃AᴴT / M`
    pub f: Complex64,
    /// `F_T(U) = Tr UTᵀĀR̃²D̃AᴴT / M`
    pub f_tr: Complex64,
    /// `F̲_T(U) = Tr UTAR̃²D̃AᵀTᵀ / M`
    pub f_tr_under: Complex64,
    /// `𝓕̃_T(U) = Tr D̃T̃ᵀD̃T̃AᴴR²UAT̃ / M`
    pub script_ft_tr: Complex64,
}

/// Transmit-side (`Ũ` is M×M) functionals.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct UFunctionalsTilde {
    /// `γ̃(Ũ) = Tr ŨT̃D̃T̃ / M`
    pub gamma: Complex64,
    /// `γ̃_T(Ũ) = Tr D̃T̃ŨT̃ᵀ / M`
    pub gamma_tr: Complex64,
    /// `F̃(Ũ) = Tr ŨT̃AᴴR²DAT̃ / M`
    pub f: Complex64,
    /// `F̃_T(Ũ) = Tr ŨT̃ᵀAᵀR²DAT̃ / M`
    pub f_tr: Complex64,
    /// `F̲̃_T(Ũ) = Tr ŨT̃AᴴR²DĀT̃ᵀ / M`
    pub f_tr_under: Complex64,
    /// `𝓕_T(Ũ) = Tr DTᵀDTAR̃²ŨAᴴT / M`
    pub script_f_tr: Complex64,
}

/// Kernels of the linear functionals, built once per solution.
#[derive(Clone, Debug)]
pub struct Kernels {
    m: f64,
    gamma: CMatrix,
    gamma_tr: CMatrix,
    f: CMatrix,
    f_tr: CMatrix,
    f_tr_under: CMatrix,
    script_ft_tr: CMatrix,
    gamma_t: CMatrix,
    gamma_t_tr: CMatrix,
    ft: CMatrix,
    ft_tr: CMatrix,
    ft_tr_under: CMatrix,
    script_f_tr: CMatrix,
}

impl Kernels {
    pub fn new(model: &ChannelModel, sol: &FixedPointSolution) -> Self {
        let a = model.los();
        let ah = a.adjoint();
        let at = a.transpose();
        let abar = a.map(|x| x.conj());
        let t = &sol.t;
        let tt = &sol.tt;
        let t_tr = t.transpose();
        let tt_tr = tt.transpose();
        let d = model.d();
        let dt = model.dt();
        let r = sol.r_diag(model);
        let rt = sol.rt_diag(model);
        // R̃²D̃ and R²D as diagonals
        let w_t: Vec<Complex64> = rt.iter().zip(dt).map(|(&x, &y)| x * x * y).collect();
        let w: Vec<Complex64> = r.iter().zip(d).map(|(&x, &y)| x * x * y).collect();
        let r2: Vec<Complex64> = r.iter().map(|&x| x * x).collect();
        let rt2: Vec<Complex64> = rt.iter().map(|&x| x * x).collect();

        let dt_mat = scale_rows(d, t); // DT
        let ta = t * a; // TA
        let aht = &ah * t; // AᴴT
        let tt_dt = scale_rows(dt, tt); // D̃T̃
        let tta = tt * &ah; // T̃Aᴴ
        let att = a * tt; // AT̃

        let gamma = t * &dt_mat;
        let gamma_tr = &t_tr * &dt_mat;
        let f = scale_cols(&ta, &w_t) * &aht;
        let f_tr = &t_tr * scale_cols(&abar, &w_t) * &aht;
        let f_tr_under = scale_cols(&ta, &w_t) * (&at * &t_tr);
        // A T̃ D̃T̃ᵀ D̃T̃ Aᴴ R²
        let script_ft_tr = scale_cols(&(&att * scale_rows(dt, &tt_tr) * &tt_dt * &ah), &r2);

        let gamma_t = tt * &tt_dt;
        let gamma_t_tr = &tt_tr * &tt_dt;
        let ft = scale_cols(&tta, &w) * &att;
        let ft_tr = &tt_tr * scale_cols(&at, &w) * &att;
        let ft_tr_under = scale_cols(&tta, &w) * (&abar * &tt_tr);
        // Aᴴ T D Tᵀ D T A R̃²
        let script_f_tr = scale_cols(&(&aht * scale_rows(d, &t_tr) * &dt_mat * a), &rt2);

        Kernels {
            m: model.m() as f64,
            gamma,
            gamma_tr,
            f,
            f_tr,
            f_tr_under,
            script_ft_tr,
            gamma_t,
            gamma_t_tr,
            ft,
            ft_tr,
            ft_tr_under,
            script_f_tr,
        }
    }

    fn tr(&self, u: &CMatrix, k: &CMatrix) -> Complex64 {
        trace_product(u, k) / self.m
    }

    pub fn receive(&self, u: &CMatrix) -> Result<UFunctionals> {
        check_square(u, self.gamma.nrows(), "U")?;
        Ok(UFunctionals {
            gamma: self.tr(u, &self.gamma),
            gamma_tr: self.tr(u, &self.gamma_tr),
            f: self.tr(u, &self.f),
            f_tr: self.tr(u, &self.f_tr),
            f_tr_under: self.tr(u, &self.f_tr_under),
            script_ft_tr: self.tr(u, &self.script_ft_tr),
        })
    }

    pub fn transmit(&self, u: &CMatrix) -> Result<UFunctionalsTilde> {
        check_square(u, self.gamma_t.nrows(), "Ũ")?;
        Ok(UFunctionalsTilde {
            gamma: self.tr(u, &self.gamma_t),
            gamma_tr: self.tr(u, &self.gamma_t_tr),
            f: self.tr(u, &self.ft),
            f_tr: self.tr(u, &self.ft_tr),
            f_tr_under: self.tr(u, &self.ft_tr_under),
            script_f_tr: self.tr(u, &self.script_f_tr),
        })
    }

    // The individual functionals, for callers that need just one.

    pub fn f_tr(&self, u: &CMatrix) -> Complex64 {
        self.tr(u, &self.f_tr)
    }

    pub fn f_tr_under(&self, u: &CMatrix) -> Complex64 {
        self.tr(u, &self.f_tr_under)
    }

    pub fn gamma_tr(&self, u: &CMatrix) -> Complex64 {
        self.tr(u, &self.gamma_tr)
    }

    pub fn script_ft_tr(&self, u: &CMatrix) -> Complex64 {
        self.tr(u, &self.script_ft_tr)
    }

    pub fn ft_tr(&self, u: &CMatrix) -> Complex64 {
        self.tr(u, &self.ft_tr)
    }

    pub fn ft_tr_under(&self, u: &CMatrix) -> Complex64 {
        self.tr(u, &self.ft_tr_under)
    }

    pub fn gamma_t_tr(&self, u: &CMatrix) -> Complex64 {
        self.tr(u, &self.gamma_t_tr)
    }

    pub fn script_f_tr(&self, u: &CMatrix) -> Complex64 {
        self.tr(u, &self.script_f_tr)
    }
}

fn check_square(u: &CMatrix, n: usize, name: &str) -> Result<()> {
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::Dimension(format!(
            "{name} is {}x{}, expected {n}x{n}",
            u.nrows(),
            u.ncols()
        )));
    }
    Ok(())
}

/// Receive-side functionals at an arbitrary `U`.
pub fn u_functionals(model: &ChannelModel, sol: &FixedPointSolution, u: &CMatrix) -> Result<UFunctionals> {
    Kernels::new(model, sol).receive(u)
}

/// Transmit-side functionals at an arbitrary `Ũ`.
pub fn u_functionals_tilde(
    model: &ChannelModel,
    sol: &FixedPointSolution,
    u: &CMatrix,
) -> Result<UFunctionalsTilde> {
    Kernels::new(model, sol).transmit(u)
}

/// `(δ', δ̃')` from the linear system obtained by differentiating the
/// fixed-point equations in `ω = −z`:
///
/// ```text
/// [1 − F   −zγ ] [δ'_ω ]   [−Tr DT²/M − δ̃γ ]
/// [−zγ̃   1 − F ] [δ̃'_ω] = [−Tr D̃T̃²/M − δγ̃]
/// ```
///
/// with `δ' = −δ'_ω`.
pub fn solve_derivatives(
    model: &ChannelModel,
    sol: &FixedPointSolution,
    f: Complex64,
    gamma: Complex64,
    gamma_t: Complex64,
) -> Result<(Complex64, Complex64)> {
    let m = model.m() as f64;
    let z = sol.z();
    let tr_dt2 = trace_diag(model.d(), &(&sol.t * &sol.t)) / m;
    let tr_dtt2 = trace_diag(model.dt(), &(&sol.tt * &sol.tt)) / m;
    let (a11, a12, a21, a22) = (ONE - f, -z * gamma, -z * gamma_t, ONE - f);
    let det = a11 * a22 - a12 * a21;
    if det.norm() < DEGENERATE_DET {
        return Err(Error::Degenerate(format!("Δ = {det} in the derivative system")));
    }
    let b1 = -tr_dt2 - sol.delta_t * gamma;
    let b2 = -tr_dtt2 - sol.delta * gamma_t;
    let x1 = (b1 * a22 - a12 * b2) / det;
    let x2 = (a11 * b2 - a21 * b1) / det;
    Ok((-x1, -x2))
}

/// Evaluate every scalar functional at a converged solution.
pub fn table1(model: &ChannelModel, sol: &FixedPointSolution) -> Result<DeterministicQuantities> {
    let k = Kernels::new(model, sol);
    table1_with(model, sol, &k)
}

pub fn table1_with(model: &ChannelModel, sol: &FixedPointSolution, k: &Kernels) -> Result<DeterministicQuantities> {
    let m = model.m() as f64;
    let z = sol.z();
    let d = model.d();
    let dt = model.dt();
    let dm = crate::linalg::diag_matrix(d);
    let dtm = crate::linalg::diag_matrix(dt);
    let rx = k.receive(&dm)?;
    let tx = k.transmit(&dtm)?;

    let s_diag: Vec<Complex64> = (0..model.n()).map(|i| sol.t[(i, i)]).collect();
    let st_diag: Vec<Complex64> = (0..model.m()).map(|j| sol.tt[(j, j)]).collect();
    let eta = s_diag.iter().zip(d).map(|(&s, &x)| s * s * x * x).sum::<Complex64>() / m;
    let eta_t = st_diag.iter().zip(dt).map(|(&s, &x)| s * s * x * x).sum::<Complex64>() / m;

    let theta = model.moments().vartheta;
    let det = (ONE - rx.f).powi(2) - z * z * rx.gamma * tx.gamma;
    let det_tr = (ONE - theta * rx.f_tr) * (ONE - theta.conj() * rx.f_tr_under)
        - theta.norm_sqr() * z * z * rx.gamma_tr * tx.gamma_tr;
    if !det_tr.re.is_finite() || det_tr.norm() < DEGENERATE_DET {
        return Err(Error::Degenerate(format!("Δ_T = {det_tr} at z = {z}")));
    }
    let (dprime, dtprime) = solve_derivatives(model, sol, rx.f, rx.gamma, tx.gamma)?;

    Ok(DeterministicQuantities {
        z,
        delta: sol.delta,
        delta_t: sol.delta_t,
        r_diag: sol.r_diag(model),
        rt_diag: sol.rt_diag(model),
        s_diag,
        st_diag,
        gamma: rx.gamma,
        gamma_t: tx.gamma,
        gamma_tr: rx.gamma_tr,
        gamma_t_tr: tx.gamma_tr,
        eta,
        eta_t,
        f: rx.f,
        f_tr: rx.f_tr,
        f_tr_under: rx.f_tr_under,
        ft_tr: tx.f_tr,
        ft_tr_under: tx.f_tr_under,
        det,
        det_tr,
        dprime,
        dtprime,
    })
}

impl DeterministicQuantities {
    /// Flat `(name, value)` listing in a stable order.
    pub fn scalars(&self) -> Vec<(&'static str, Complex64)> {
        vec![
            ("z", self.z),
            ("delta", self.delta),
            ("delta_t", self.delta_t),
            ("gamma", self.gamma),
            ("gamma_t", self.gamma_t),
            ("gamma_T", self.gamma_tr),
            ("gamma_t_T", self.gamma_t_tr),
            ("eta", self.eta),
            ("eta_t", self.eta_t),
            ("F", self.f),
            ("F_T", self.f_tr),
            ("F_T_under", self.f_tr_under),
            ("Ft_T", self.ft_tr),
            ("Ft_T_under", self.ft_tr_under),
            ("Delta", self.det),
            ("Delta_T", self.det_tr),
            ("dprime", self.dprime),
            ("dtprime", self.dtprime),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed_point::{solve, SpectralPoint};
    use crate::linalg::c;
    use crate::model::EntryMoments;

    fn scalar(theta: f64) -> ChannelModel {
        let mo = EntryMoments::new(c(theta), 0.0, c(0.0)).unwrap();
        ChannelModel::centered(1, vec![1.0], vec![1.0], mo).unwrap()
    }

    #[test]
    fn scalar_case() {
        let model = scalar(0.5);
        let sol = solve(&model, SpectralPoint::from_noise(1.0).unwrap(), &Default::default()).unwrap();
        let q = table1(&model, &sol).unwrap();
        let d = sol.delta;
        assert!((q.gamma - d * d).norm() < 1e-11);
        assert!((q.gamma_t - d * d).norm() < 1e-11);
        assert!((q.det - (ONE - d.powi(4))).norm() < 1e-11);
        assert_eq!(q.f, c(0.0));
        // δ'_ω = −δ(1+δ)/(ω(2δ+1)) with ω = 1
        let expected = d * (ONE + d) / (2.0 * d + 1.0);
        assert!((q.dprime - expected).norm() < 1e-12);
        assert!((q.dprime - q.dtprime).norm() < 1e-11);
    }

    #[test]
    fn circular_entries_give_unit_det_tr() {
        let model = ChannelModel::new(
            crate::model::ula_los(3, 5, None).unwrap() * c(0.3),
            vec![1.0, 0.5, 2.0],
            vec![1.0; 5],
            EntryMoments::new(c(0.0), 1.5, c(0.0)).unwrap(),
        )
        .unwrap();
        let sol = solve(&model, SpectralPoint::from_noise(0.3).unwrap(), &Default::default()).unwrap();
        let q = table1(&model, &sol).unwrap();
        assert_eq!(q.det_tr, ONE);
    }

    #[test]
    fn u_functionals_specialize() {
        let model = ChannelModel::new(
            crate::model::ula_los(3, 4, None).unwrap() * c(0.4),
            vec![1.0, 0.5, 2.0],
            vec![0.7, 1.0, 1.2, 0.9],
            EntryMoments::GAUSSIAN,
        )
        .unwrap();
        let sol = solve(&model, SpectralPoint::from_noise(0.5).unwrap(), &Default::default()).unwrap();
        let q = table1(&model, &sol).unwrap();
        let dm = crate::linalg::diag_matrix(model.d());
        let u = u_functionals(&model, &sol, &dm).unwrap();
        assert_eq!(u.gamma, q.gamma);
        assert_eq!(u.f, q.f);
        let zero = u_functionals(&model, &sol, &CMatrix::zeros(3, 3)).unwrap();
        assert_eq!(zero, UFunctionals::default());
        assert!(u_functionals(&model, &sol, &CMatrix::zeros(4, 4)).is_err());
        assert!(u_functionals_tilde(&model, &sol, &CMatrix::zeros(3, 3)).is_err());
    }
}
