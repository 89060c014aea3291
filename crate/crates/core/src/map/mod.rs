//! Building blocks, their telescoped composition, and the planar-map trait
//! used by the analyses.

mod block;
mod compose;
mod piecewise;

pub use block::{block_eval, Annulus, ComplexPoint, SpiralStretchBlock};
pub use compose::{compose_schedule, compose_schedule_part, plan_blocks, BlockSpec, MapPart};
pub use piecewise::{
    block_distortion, ln_block_distortion, PiecewiseRadialMap, RegionAction, RegionKind, Wirtinger,
};

use num_complex::Complex;

use crate::Real;

/// A homeomorphism of the plane that can be sampled pointwise.
pub trait PlanarMap<T: Real>: Sync {
    fn apply(&self, z: Complex<T>) -> Complex<T>;

    /// Unit vector in the direction of `f(e^{ln_t + iθ})`. Implementations
    /// for radial maps avoid forming the (possibly underflowing) image point.
    fn direction(&self, ln_t: T, theta: T) -> Complex<T> {
        let w = self.apply(Complex::from_polar(ln_t.exp(), theta));
        w / w.norm()
    }

    /// Upper bound on `|d arg f / d ln t|` along rays with `ln t` in
    /// `[lo, hi]`, when the map can supply one. Argument tracking uses it to
    /// cap its step so no increment can wrap by a full turn.
    fn arg_rate_bound(&self, _lo: T, _hi: T) -> Option<T> {
        None
    }
}

/// The identity map.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl<T: Real> PlanarMap<T> for Identity {
    fn apply(&self, z: Complex<T>) -> Complex<T> {
        z
    }

    fn direction(&self, _ln_t: T, theta: T) -> Complex<T> {
        Complex::from_polar(T::one(), theta)
    }

    fn arg_rate_bound(&self, _lo: T, _hi: T) -> Option<T> {
        Some(T::zero())
    }
}

impl<T: Real> PlanarMap<T> for PiecewiseRadialMap<T> {
    fn apply(&self, z: Complex<T>) -> Complex<T> {
        self.eval(z).unwrap_or_else(|_| Complex::new(T::nan(), T::nan()))
    }

    fn direction(&self, ln_t: T, theta: T) -> Complex<T> {
        let (_, phase) = self.eval_log_polar(ln_t, theta);
        Complex::from_polar(T::one(), phase)
    }

    fn arg_rate_bound(&self, lo: T, hi: T) -> Option<T> {
        Some(self.max_twist(lo, hi))
    }
}

/// The inverse of a radial map, sampled through its exact inverse.
#[derive(Debug, Clone, Copy)]
pub struct Inverse<'a, T>(pub &'a PiecewiseRadialMap<T>);

impl<T: Real> PlanarMap<T> for Inverse<'_, T> {
    fn apply(&self, z: Complex<T>) -> Complex<T> {
        self.0.inverse_eval(z).unwrap_or_else(|_| Complex::new(T::nan(), T::nan()))
    }

    fn arg_rate_bound(&self, lo: T, hi: T) -> Option<T> {
        Some(self.0.max_inverse_twist(lo, hi))
    }
}

impl<T: Real, F: Fn(Complex<T>) -> Complex<T> + Sync> PlanarMap<T> for F {
    fn apply(&self, z: Complex<T>) -> Complex<T> {
        self(z)
    }
}
