//! Periodic orbits of a particle attracted by a fixed homogeneous circle.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the searches are tuned for.

// `!(x > 0)` is used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments, clippy::type_complexity)]

pub mod dynamics;
pub mod elliptic;
pub mod io;
pub mod potential;
pub mod roots;
pub mod scalar;
pub mod search;
pub mod verify;

pub use scalar::Real;

pub type Ring = potential::RingSystem<f64>;
pub type Ring32 = potential::RingSystem<f32>;
pub type Euler = potential::EulerSystem<f64>;
pub type Euler32 = potential::EulerSystem<f32>;
pub type Trace = dynamics::PlanarTrace<f64>;
pub type Trace3 = dynamics::SpatialTrace<f64>;
pub type Config = dynamics::IntegratorConfig<f64>;
