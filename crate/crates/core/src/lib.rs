//! G-coupling functions and generalized conjugation on sampled grids.
//!
//! A G-coupling `g(x, x*)` is nonnegative, finite exactly on `ℝⁿ × C` for a
//! non-empty closed set `C`, and has infimum zero. Conjugating a proper `f`
//! against it gives `f^g(x*) = sup_x g(x, x*) − f(x)`, and the gap functional
//! `γ(x, x*) = f(x) + f^g(x*)` certifies zero duality gap when its infimum is
//! zero. The crate evaluates all of this on deterministic truncated grids
//! and applies it to Lagrangian, equilibrium and complementarity problems.

pub mod complementarity;
pub mod conjugate;
pub mod coupling;
pub mod duality_schemes;
pub mod equilibrium;
pub mod error;
pub mod extreal;
pub mod funcdsl;
pub mod grid;
pub mod linalg;
pub mod recession;
pub mod sampling;
pub mod scalar;
pub mod sets;

pub use complementarity::{cp_check, cp_dual_closed_form, cp_zdgp_equivalence, lcp_enumerate, CPInstance};
pub use conjugate::{
    dual_attainment, duality_report, g_biconjugate, g_conjugate, membership_ff, membership_ff_grids, GammaFn, SampledFn,
};
pub use coupling::{builtin_coupling, validate_coupling, BuiltinParams, CouplingFn, ProperFn, BUILTINS};
pub use duality_schemes::{
    classic_recovery_check, lagrangian_dual_report, perturbation_report, ConstrainedProblem, PerturbationScheme,
    SchemeGrids,
};
pub use equilibrium::{
    ep_gap, ep_residual, epvip_gap, ik_and_kstar, jemlws_certificate, vip_gap, zdgp_check, EPInstance, EPVIPInstance,
    VIPInstance, ZdgpCoupling,
};
pub use error::{Error, Result};
pub use extreal::{ext_add_upper, ext_sub_lower, ExtReal};
pub use funcdsl::{parse, var_names, ExprFn};
pub use grid::{optimize_over_grid, optimize_over_points, BoundingBox, GridSpec, Limits, Mode, OptResult, Status};
pub use linalg::{rational, solve, LinearField};
pub use recession::{compactness_verdict, level_set_sample, r_gamma, recession_directions, zero_set, DirectionSet, PointCloud};
pub use scalar::Scalar;
pub use sets::{Halfspace, SetSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exact rational scalar used by the complementarity oracle.
pub type Rational = num_rational::BigRational;

pub type ExtReal64 = ExtReal<f64>;
pub type ExtReal32 = ExtReal<f32>;
pub type GridSpec64 = GridSpec<f64>;
pub type GridSpec32 = GridSpec<f32>;
pub type BoundingBox64 = BoundingBox<f64>;
pub type SetSpec64 = SetSpec<f64>;
