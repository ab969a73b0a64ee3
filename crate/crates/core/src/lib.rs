//! Instability certificates for three unit Coulomb charges `{+1, -1, -1}`.
//!
//! The three-body question "is there a bound state below the lowest
//! dissociation threshold?" is reduced to binding of one particle of mass
//! `mu_y` in the effective potential `V_eff`, amplified by
//! `1 + (sqrt(3 / (2 mu_y)) - 1)^-1`. Since `y² V_eff(y) < 3/16`, the Hardy
//! inequality rules binding out whenever `2 mu_y lambda_eff < 4/3`, which in
//! physical units reads `mu_y / mu_x < (11 - 2 sqrt(10)) / 27`.
//!
//! The numeric core is generic over [`Scalar`] (`f32`, `f64`); the `*F64`
//! aliases below fix the usual double-precision instantiation.

// `!(x > 0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod binding;
pub mod catalog;
pub mod criterion;
pub mod error;
pub mod frames;
pub mod oracle;
pub mod potential;
pub mod quad;
pub mod scalar;
pub mod verify;

pub use binding::{BindingKind, BindingVerdict, RadialPotential, TailClass};
pub use catalog::{NamedSystem, ParticleEntry, ParticleTable};
pub use criterion::{GridScheme, GridSpec, RegionRow, StabilityReport, Verdict};
pub use error::{Error, Result};
pub use frames::{
    dissociation_thresholds, jacobi_reduce, normalize_system, CanonicalSystem, Charge, JacobiFrame, Mass,
    ParticleSystem, Warning,
};
pub use oracle::{DenseEigen, McEstimate};
pub use potential::{EffectivePotential, EvalMode, InteractionPoint};
pub use quad::QuadSettings;
pub use scalar::Scalar;

pub type ParticleSystemF64 = ParticleSystem<f64>;
pub type CanonicalSystemF64 = CanonicalSystem<f64>;
pub type JacobiFrameF64 = JacobiFrame<f64>;
pub type EffectivePotentialF64 = EffectivePotential<f64>;
pub type EffectivePotentialF32 = EffectivePotential<f32>;
pub type StabilityReportF64 = StabilityReport<f64>;
pub type StabilityReportF32 = StabilityReport<f32>;
pub type RegionRowF64 = RegionRow<f64>;
