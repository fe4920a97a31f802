//! Energy dissipation of shape-changing microrobots in Stokes flow.
//!
//! Every numeric type is generic over a [`Real`] scalar; the aliases below
//! fix it to `f64` or `f32`.

// `!(x > 0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregation;
pub mod bem;
pub mod error;
pub mod friction;
pub mod geometry;
pub mod numerics;
pub mod profile;
pub mod real;
pub mod scenarios;
pub mod sweep;
pub mod tables;
pub mod validation;

pub use error::{Error, Result};
pub use real::Real;

pub type RingMesh64 = bem::mesh::RingMesh<f64>;
pub type RingMesh32 = bem::mesh::RingMesh<f32>;
pub type SurfaceVelocityBC64 = bem::mesh::SurfaceVelocityBC<f64>;
pub type TractionSolution64 = bem::solver::TractionSolution<f64>;
pub type FluidScenario64 = scenarios::FluidScenario<f64>;
pub type FluidScenario32 = scenarios::FluidScenario<f32>;
pub type CharacteristicScales64 = scenarios::CharacteristicScales<f64>;
pub type CharacteristicScales32 = scenarios::CharacteristicScales<f32>;
pub type DissipationCurve64 = profile::DissipationCurve<f64>;
pub type DissipationCurve32 = profile::DissipationCurve<f32>;
pub type SpeedProfile64 = profile::SpeedProfile<f64>;
pub type SpeedProfile32 = profile::SpeedProfile<f32>;
pub type MobilityCurve64 = aggregation::MobilityCurve<f64>;
pub type MobilityCurve32 = aggregation::MobilityCurve<f32>;
pub type ApproachResult64 = aggregation::ApproachResult<f64>;
