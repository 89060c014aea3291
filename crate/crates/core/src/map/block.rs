//! Single spiral-stretch building block on an origin-centred annulus.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::Real;

pub type ComplexPoint<T> = Complex<T>;

/// `B(0, outer) \ B(0, inner)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Annulus<T> {
    inner: T,
    outer: T,
}

impl<T: Real> Annulus<T> {
    pub fn new(inner: T, outer: T) -> Result<Self> {
        if !(inner.is_finite() && outer.is_finite()) || inner <= T::zero() || outer <= inner {
            return domain(format!("annulus requires 0 < r < R, got r={inner}, R={outer}"));
        }
        Ok(Self { inner, outer })
    }

    pub fn inner(&self) -> T {
        self.inner
    }

    pub fn outer(&self) -> T {
        self.outer
    }

    pub fn contains(&self, z: ComplexPoint<T>) -> bool {
        let t = z.norm();
        t >= self.inner && t <= self.outer
    }
}

/// `z ↦ z |z/R|^{q-1} e^{iα log(|z|/R)}` on the annulus, identity outside
/// and the matching similarity inside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SpiralStretchBlock<T> {
    pub annulus: Annulus<T>,
    pub alpha: T,
    pub q: T,
}

impl<T: Real> SpiralStretchBlock<T> {
    pub fn new(annulus: Annulus<T>, alpha: T, q: T) -> Result<Self> {
        if !alpha.is_finite() || !q.is_finite() || q < T::one() {
            return domain(format!("block needs finite alpha and q >= 1, got alpha={alpha}, q={q}"));
        }
        Ok(Self { annulus, alpha, q })
    }

    /// Pure rotation block (`q = 1`).
    pub fn rotation(annulus: Annulus<T>, alpha: T) -> Result<Self> {
        Self::new(annulus, alpha, T::one())
    }

    pub fn eval(&self, z: ComplexPoint<T>) -> Result<ComplexPoint<T>> {
        block_eval(self, z)
    }
}

/// Evaluate a building block; `0` is a fixed point.
pub fn block_eval<T: Real>(block: &SpiralStretchBlock<T>, z: ComplexPoint<T>) -> Result<ComplexPoint<T>> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return domain("non-finite input point");
    }
    let t = z.norm();
    let big_r = block.annulus.outer;
    if t > big_r {
        return Ok(z);
    }
    if t == T::zero() {
        return Ok(z);
    }
    let log_ratio = if t >= block.annulus.inner {
        (t / big_r).ln()
    } else {
        (block.annulus.inner / big_r).ln()
    };
    let scale = ((block.q - T::one()) * log_ratio).exp();
    let turn = Complex::from_polar(scale, block.alpha * log_ratio);
    Ok(z * turn)
}
