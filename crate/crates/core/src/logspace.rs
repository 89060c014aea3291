//! Log-space helpers.
//!
//! Radii, similarity scales and spiral coefficients of the constructions
//! leave the linear floating point range after a handful of blocks, so the
//! crate keeps them as natural logarithms and only exponentiates at the
//! boundary.

use serde::{Deserialize, Serialize};

use crate::Real;

/// A positive quantity stored through its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LogValue<T> {
    pub log_value: T,
}

impl<T: Real> LogValue<T> {
    pub fn from_ln(log_value: T) -> Self {
        Self { log_value }
    }

    pub fn from_linear(x: T) -> Self {
        Self { log_value: x.ln() }
    }

    #[inline]
    pub fn ln(self) -> T {
        self.log_value
    }

    /// Linear value; may be `0` or `inf` when outside the representable range.
    #[inline]
    pub fn value(self) -> T {
        self.log_value.exp()
    }
}

/// A reported number: always the logarithm, plus the linear value when it is
/// a normal finite float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Reported<T> {
    pub log_value: T,
    pub value: Option<T>,
}

impl<T: Real> Reported<T> {
    pub fn from_ln(log_value: T) -> Self {
        let v = log_value.exp();
        let value = if v.is_normal() { Some(v) } else if log_value == T::neg_infinity() { Some(T::zero()) } else { None };
        Self { log_value, value }
    }

    pub fn from_linear(x: T) -> Self {
        Self { log_value: x.ln(), value: Some(x) }
    }
}

/// `ln(Σ exp(x_i))`, exact for a single term; `-inf` for an empty slice.
pub fn log_sum_exp<T: Real>(xs: &[T]) -> T {
    let m = xs.iter().copied().fold(T::neg_infinity(), T::max);
    if m == T::neg_infinity() || m == T::infinity() {
        return m;
    }
    if xs.len() == 1 {
        return m;
    }
    let s = xs.iter().fold(T::zero(), |acc, &x| acc + (x - m).exp());
    m + s.ln()
}

/// `ln(exp(a) + exp(b))`.
pub fn log_add_exp<T: Real>(a: T, b: T) -> T {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == T::neg_infinity() {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(exp(a) - exp(b))` for `a > b`.
pub fn log_sub_exp<T: Real>(a: T, b: T) -> T {
    if b == T::neg_infinity() {
        return a;
    }
    a + (-(b - a).exp_m1()).ln()
}

/// `ln |x + i·exp(ln_y)|` for real `x` and a positive `y` given by its log.
pub fn ln_hypot<T: Real>(x: T, ln_y: T) -> T {
    let ln_x = x.abs().ln();
    let (big, small) = if ln_x >= ln_y { (ln_x, ln_y) } else { (ln_y, ln_x) };
    if small == T::neg_infinity() {
        return big;
    }
    let r = (small - big).exp();
    big + T::half() * (r * r).ln_1p()
}
