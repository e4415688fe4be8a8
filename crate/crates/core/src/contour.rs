//! Linear spectral statistics `Tr f(HHᴴ)` by contour integration:
//!
//! ```text
//! 𝒱_f = −1/(2πj) ∮ f(z) Tr T(z) dz,   ℬ_f = −1/(2πj) ∮ f(z) B(z) dz
//! ```
//!
//! over a counter-clockwise ellipse enclosing the spectrum support `[0, u₊]`.
//! The ellipse is confocal with `[0, u₊]`, which keeps the integrand far
//! from the real axis and lets the periodic trapezoid rule converge
//! geometrically.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bias::bias_theorem1;
use crate::error::{Error, Result};
use crate::fixed_point::{resolvent_trace_de, solve, SolverOptions, SpectralPoint};
use crate::linalg::{spectral_norm, ONE, ZERO};
use crate::model::ChannelModel;

/// Scalar function integrated against the spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpectralFn {
    /// `log(1 + x/σ²)`
    Mi { sigma2: f64 },
    /// `Σ c_k x^k`
    Poly(Vec<f64>),
}

impl SpectralFn {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            SpectralFn::Mi { sigma2 } => (ONE + z / *sigma2).ln(),
            SpectralFn::Poly(coeffs) => coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c),
        }
    }

    /// Parse `mi` (with the given σ²) or `poly:c0,c1,…`.
    pub fn parse(s: &str, sigma2: f64) -> Result<Self> {
        let s = s.trim();
        if s == "mi" {
            return Ok(SpectralFn::Mi { sigma2 });
        }
        if let Some(rest) = s.strip_prefix("poly:") {
            let coeffs = rest
                .trim_matches('"')
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Config(format!("bad coefficient {t:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(SpectralFn::Poly(coeffs));
        }
        Err(Error::Config(format!("unknown function {s:?}; expected mi or poly:c0,c1,...")))
    }

    fn is_zero(&self) -> bool {
        matches!(self, SpectralFn::Poly(c) if c.iter().all(|&x| x == 0.0))
    }
}

/// `u₊ = 2‖A‖² + 2 d_max d̃_max (1 + √c)²`, an upper bound on the support of
/// the spectrum of `HHᴴ`.
pub fn support_bound(model: &ChannelModel) -> f64 {
    let a = spectral_norm(model.los());
    let d_max = model.d().iter().cloned().fold(0.0, f64::max);
    let dt_max = model.dt().iter().cloned().fold(0.0, f64::max);
    2.0 * a * a + 2.0 * d_max * dt_max * (1.0 + model.ratio().sqrt()).powi(2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub u_plus: f64,
    /// Clearance between the contour and `[0, u₊]` on the real axis.
    pub margin: f64,
    pub nodes: usize,
    /// Evaluate the upper half only and reflect (valid for real-coefficient
    /// `f` and a model whose spectrum is real, which is always the case).
    pub symmetric: bool,
}

pub const DEFAULT_NODES: usize = 256;

impl ContourSpec {
    /// Default contour for `f`: margin `min(σ²/2, u₊/10)` for the MI
    /// function, `u₊/10` otherwise.
    pub fn for_function(model: &ChannelModel, f: &SpectralFn) -> Self {
        let u_plus = support_bound(model);
        let margin = match f {
            SpectralFn::Mi { sigma2 } => (0.5 * sigma2).min(0.1 * u_plus),
            SpectralFn::Poly(_) => 0.1 * u_plus,
        };
        ContourSpec {
            u_plus,
            margin,
            nodes: DEFAULT_NODES,
            symmetric: true,
        }
    }

    pub fn with_nodes(self, nodes: usize) -> Self {
        ContourSpec { nodes, ..self }
    }

    pub fn validate(&self, f: &SpectralFn) -> Result<()> {
        if !(self.u_plus > 0.0) || !(self.margin > 0.0) || !self.margin.is_finite() {
            return Err(Error::Contour(format!(
                "need u₊ > 0 and margin > 0 (u₊ = {}, margin = {})",
                self.u_plus, self.margin
            )));
        }
        if self.nodes < 4 || !self.nodes.is_multiple_of(2) {
            return Err(Error::Contour(format!("node count {} must be even and ≥ 4", self.nodes)));
        }
        if let SpectralFn::Mi { sigma2 } = f {
            if !(*sigma2 > self.margin) {
                return Err(Error::Contour(format!(
                    "branch point z = −σ² = {} lies inside the contour (margin {})",
                    -sigma2, self.margin
                )));
            }
        }
        Ok(())
    }

    /// Node `k` and the derivative `dz/dθ` there.
    pub fn node(&self, k: usize) -> (Complex64, Complex64) {
        let center = 0.5 * self.u_plus;
        let a = 0.5 * self.u_plus + self.margin;
        let b = (self.margin * (self.u_plus + self.margin)).sqrt();
        // Half-step offset keeps every node off the real axis.
        let theta = 2.0 * PI * (k as f64 + 0.5) / self.nodes as f64;
        let (s, c) = theta.sin_cos();
        (Complex64::new(center + a * c, b * s), Complex64::new(-a * s, b * c))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LssMean {
    /// Deterministic mean `𝒱_f`.
    pub v_f: Complex64,
    /// Non-Gaussian bias `ℬ_f`.
    pub b_f: Complex64,
}

/// `(𝒱_f, ℬ_f)` by trapezoidal quadrature on the contour. Nodes are solved
/// in parallel but summed in index order, so results do not depend on the
/// thread count.
pub fn lss_mean(model: &ChannelModel, f: &SpectralFn, spec: &ContourSpec, opts: &SolverOptions) -> Result<LssMean> {
    spec.validate(f)?;
    if f.is_zero() {
        return Ok(LssMean { v_f: ZERO, b_f: ZERO });
    }
    let count = if spec.symmetric { spec.nodes / 2 } else { spec.nodes };
    let terms: Vec<(Complex64, Complex64)> = (0..count)
        .into_par_iter()
        .map(|k| {
            let (z, dz) = spec.node(k);
            let wrap = |e: Error| Error::ContourNode {
                index: k,
                z,
                source: Box::new(e),
            };
            let sol = solve(model, SpectralPoint::new(z).map_err(wrap)?, opts).map_err(wrap)?;
            let b = bias_theorem1(model, &sol).map_err(wrap)?;
            let w = f.eval(z) * dz;
            Ok((w * resolvent_trace_de(&sol), w * b.total))
        })
        .collect::<Result<_>>()?;

    let step = 2.0 * PI / spec.nodes as f64;
    let scale = Complex64::new(0.0, 1.0 / (2.0 * PI)) * step; // −1/(2πj) · Δθ
    let (mut v, mut b) = (ZERO, ZERO);
    for (tv, tb) in terms {
        if spec.symmetric {
            // The mirrored node contributes −conj(term).
            v += tv - tv.conj();
            b += tb - tb.conj();
        } else {
            v += tv;
            b += tb;
        }
    }
    let (mut v_f, mut b_f) = (v * scale, b * scale);
    if spec.symmetric {
        // Exactly real by construction; drop the signed zero.
        v_f = Complex64::new(v_f.re, 0.0);
        b_f = Complex64::new(b_f.re, 0.0);
    }
    Ok(LssMean { v_f, b_f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::model::EntryMoments;

    fn iid(n: usize, m: usize) -> ChannelModel {
        ChannelModel::centered(n, vec![1.0; n], vec![1.0; m], EntryMoments::GAUSSIAN).unwrap()
    }

    #[test]
    fn support_bound_arithmetic() {
        assert_eq!(support_bound(&iid(4, 4)), 8.0);
        assert_eq!(support_bound(&iid(2, 8)), 4.5);
    }

    #[test]
    fn function_parsing() {
        assert_eq!(SpectralFn::parse("mi", 0.2).unwrap(), SpectralFn::Mi { sigma2: 0.2 });
        assert_eq!(
            SpectralFn::parse("poly:\"1, 0,2\"", 0.2).unwrap(),
            SpectralFn::Poly(vec![1.0, 0.0, 2.0])
        );
        assert!(SpectralFn::parse("exp", 1.0).is_err());
        let p = SpectralFn::Poly(vec![1.0, 0.0, 2.0]);
        assert_eq!(p.eval(c(3.0)), c(19.0));
    }

    #[test]
    fn nodes_stay_off_axis_and_enclose_support() {
        let spec = ContourSpec {
            u_plus: 8.0,
            margin: 0.1,
            nodes: 16,
            symmetric: true,
        };
        for k in 0..16 {
            let (z, _) = spec.node(k);
            assert!(z.im != 0.0);
        }
        let (a, b) = (4.1, (0.1f64 * 8.1).sqrt());
        for k in 0..16 {
            let (z, _) = spec.node(k);
            assert!((((z.re - 4.0) / a).powi(2) + (z.im / b).powi(2) - 1.0).abs() < 1e-12);
            assert!(z.re > -0.1 && z.re < 8.1);
        }
    }

    #[test]
    fn contour_validation() {
        let f = SpectralFn::Mi { sigma2: 0.2 };
        let mut spec = ContourSpec::for_function(&iid(2, 4), &f);
        assert!(spec.validate(&f).is_ok());
        spec.margin = 0.3;
        assert!(matches!(spec.validate(&f), Err(Error::Contour(_))));
        spec.margin = 0.1;
        spec.nodes = 7;
        assert!(spec.validate(&f).is_err());
    }

    #[test]
    fn zero_function_is_zero() {
        let model = iid(2, 4);
        let f = SpectralFn::Poly(vec![0.0]);
        let spec = ContourSpec::for_function(&model, &f);
        let r = lss_mean(&model, &f, &spec, &Default::default()).unwrap();
        assert_eq!((r.v_f, r.b_f), (ZERO, ZERO));
    }

    #[test]
    fn first_moment_is_exact() {
        // E Tr HHᴴ = ‖A‖²_F + Tr D · Tr D̃ / M, with no bias term.
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
        let model = crate::scenario::random_model_with_dims(&mut rng, 3, 5).unwrap();
        let f = SpectralFn::Poly(vec![0.0, 1.0]);
        let spec = ContourSpec::for_function(&model, &f);
        let r = lss_mean(&model, &f, &spec, &Default::default()).unwrap();
        let expected = model.los().norm_squared()
            + model.d().iter().sum::<f64>() * model.dt().iter().sum::<f64>() / model.m() as f64;
        assert!((r.v_f.re - expected).abs() < 1e-9 * expected);
        assert!(r.b_f.norm() < 1e-9);
    }
}
