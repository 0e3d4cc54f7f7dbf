//! Schwarzian derivatives of planar harmonic mappings of the unit disk.
//!
//! - [`jets`]: third-order complex jets and truncated power series.
//! - [`catalog`]: the named maps, harmonic maps, Koebe transform and affine change.
//! - [`schwarzian`]: analytic and harmonic Schwarzians, hyperbolic derivatives.
//! - [`norms`]: sup-norm estimation and the closed-form profiles of the extremal map.
//! - [`families`]: order formulas, dilatation bounds, coefficient relation.
//! - [`verify`]: the acceptance suite.

pub mod catalog;
pub mod error;
pub mod families;
pub mod jets;
pub mod norms;
mod quadrature;
pub mod schwarzian;
pub mod verify;

pub use num_complex::Complex64 as Complex;

pub use catalog::{
    affine_change, koebe_transform, make_extremal, make_f_r, make_harmonic_koebe, make_lens,
    make_phi_a, series_coeffs, AnalyticMap, FamilyParams, HarmonicMap,
};
pub use error::{Error, Result};
pub use families::{
    extremal_coefficients, marty_residual, order_f, order_f_measured, order_h, r_from_order,
    r_lower_bound, CoefficientTriple, OrderEstimate, OrderSource,
};
pub use jets::{fd_oracle, jet_arith, jet_compose, jet_pow, Jet2, Jet3, JetOp, Series};
pub use norms::{
    closed_form_scaled, curve_samples, heatmap, psi_monotone_check, psi_profile, sup_norm,
    ClosedFormCoeffs, CurvePoint, Field, GridConfig, NormEstimate, PsiCheck, PsiProfile,
};
pub use schwarzian::{
    hyperbolic_derivative, scaled_schwarzian, schwarzian_analytic, schwarzian_harmonic,
    SchwarzianSample,
};
pub use verify::{run_acceptance, CriterionOutcome};
