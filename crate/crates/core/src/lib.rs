//! Closed-form spiral-stretch homeomorphisms of finite distortion and the
//! numerical checks around their rotation bounds.
//!
//! The maps are radial: `t e^{iθ} ↦ s(t) e^{i(θ + a(t))}`. They are built by
//! composing nested blocks (see [`map`]) according to a schedule (see
//! [`construction`]); [`rotation`], [`modulus`] and [`holder`] measure winding,
//! path-family modulus bounds and Hölder exponents of the result.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below are what the CLI and the acceptance suite use.

pub mod construction;
pub mod error;
pub mod holder;
pub mod logspace;
pub mod map;
pub mod modulus;
mod real;
pub mod rotation;
mod serde_ext;

pub use error::{Error, Result};
pub use real::Real;

pub type ComplexPoint64 = map::ComplexPoint<f64>;
pub type Annulus64 = map::Annulus<f64>;
pub type SpiralStretchBlock64 = map::SpiralStretchBlock<f64>;
pub type PiecewiseRadialMap64 = map::PiecewiseRadialMap<f64>;
pub type PiecewiseRadialMap32 = map::PiecewiseRadialMap<f32>;
pub type SchedulePlan64 = construction::SchedulePlan<f64>;
pub type GaugeSpec64 = construction::GaugeSpec<f64>;
pub type RotationProfile64 = rotation::RotationProfile<f64>;
pub type ModulusBounds64 = modulus::ModulusBounds<f64>;
pub type ExponentFit64 = holder::ExponentFit<f64>;
