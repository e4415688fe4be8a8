//! Deterministic equivalents and non-Gaussian bias corrections for the
//! spectrum of `HHᴴ`, where `H = A + M^{-1/2} D^{1/2} X D̃^{1/2}` has a
//! line-of-sight part `A`, a separable variance profile and i.i.d. entries
//! that may be non-circular (`E x² = ϑ ≠ 0`) and non-Gaussian (`κ ≠ 0`).
//!
//! The pipeline runs bottom-up:
//!
//! * [`model`] builds a [`ChannelModel`] and the entry moments `(ϑ, κ, ζ)`.
//! * [`fixed_point`] solves for `(δ, δ̃)` and the matrices `T(z)`, `T̃(z)`.
//! * [`quantities`] evaluates the scalar functionals derived from `T`, `T̃`.
//! * [`bias`] gives the `O(1)` bias of `E Tr Q(z) − Tr T(z)`, two ways.
//! * [`contour`] integrates any analytic `f` against `Tr T` and the bias.
//! * [`mi`] specializes to the mutual information: mean, bias, variance,
//!   outage probability.
//! * [`monte_carlo`] samples channels to check all of the above.
//!
//! ```
//! use rmtbias::{scenario, mi};
//!
//! let model = scenario::ula_rician(8, 1.0, scenario::weibull_noncircular()).unwrap();
//! let stats = mi::mi_clt(&model, 0.2, &Default::default()).unwrap();
//! assert!((stats.b_c + 0.5 * stats.theta_b).abs() < 1e-14);
//! assert!(stats.theta > 0.0);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bias;
pub mod config;
pub mod contour;
pub mod error;
pub mod experiment;
pub mod fixed_point;
pub mod linalg;
pub mod mi;
pub mod model;
pub mod monte_carlo;
pub mod quantities;
pub mod scenario;
pub mod special;

pub use bias::{bias_theorem1, bias_theorem2, BiasMethod, BiasValue};
pub use contour::{lss_mean, support_bound, ContourSpec, LssMean, SpectralFn};
pub use error::{Error, Result};
pub use fixed_point::{resolvent_trace_de, solve, FixedPointSolution, SolverOptions, SpectralPoint};
pub use mi::{mi_clt, mutual_information, outage_probability, MIStatistics};
pub use model::{
    cv_of, moments_of, rician_model, ula_los, ChannelModel, EntryDistribution, EntryMoments,
    ModulusLaw,
};
pub use monte_carlo::{run_mi_experiment, run_resolvent_experiment, McOptions, MonteCarloSummary};
pub use num_complex::Complex64;
pub use quantities::{table1, DeterministicQuantities};
