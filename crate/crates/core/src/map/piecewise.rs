//! Closed-form region table for a composition of nested spiral-stretch blocks.
//!
//! A radial map acts on `z = t e^{iθ}` as `z ↦ s(t) e^{i(θ + a(t))}`. On each
//! region the modulus profile is `s(t) = λ R (t/R)^q` and the argument offset
//! is `a(t) = μ + α log(t/R)`. Gap regions are similarities (`q = 1`,
//! `α = 0`). Everything that can leave the floating point range is held as a
//! logarithm: `ln t`, `ln λ`, `ln R`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::block::ComplexPoint;
use crate::error::{domain, Error, Result};
use crate::logspace::{ln_hypot, log_add_exp};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "block")]
pub enum RegionKind {
    /// Action annulus of block `n` (1-based).
    Annulus(usize),
    /// Similarity region just inside block `n`.
    Gap(usize),
    /// Identity region outside every block.
    Outer,
}

/// Local action on `ln_t_lo ≤ ln t ≤ ln_t_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct RegionAction<T> {
    pub kind: RegionKind,
    #[serde(with = "crate::serde_ext::lower_edge")]
    pub ln_t_lo: T,
    #[serde(with = "crate::serde_ext::upper_edge")]
    pub ln_t_hi: T,
    pub ln_lambda: T,
    pub mu: T,
    pub q: T,
    pub alpha: T,
    pub ln_r_ref: T,
}

impl<T: Real> RegionAction<T> {
    pub fn is_gap(&self) -> bool {
        !matches!(self.kind, RegionKind::Annulus(_))
    }

    #[inline]
    fn log_ratio(&self, ln_t: T) -> T {
        ln_t - self.ln_r_ref
    }

    /// `ln s(t)`.
    #[inline]
    pub fn ln_modulus(&self, ln_t: T) -> T {
        if self.q == T::one() {
            self.ln_lambda + ln_t
        } else {
            self.ln_lambda + self.ln_r_ref + self.q * self.log_ratio(ln_t)
        }
    }

    /// `ln(t / r_ref)` from `t` itself, which avoids the absolute error of
    /// order `ε |ln t|` in `ln t − ln r_ref` when `r_ref` is representable.
    #[inline]
    fn log_ratio_direct(&self, t: T, ln_t: T) -> T {
        let r = self.ln_r_ref.exp();
        if r.is_normal() && t.is_normal() {
            (t / r).ln()
        } else {
            self.log_ratio(ln_t)
        }
    }

    /// `(ln(s(t)/t), a(t))` for a radius given directly.
    #[inline]
    pub fn gain_and_offset(&self, t: T, ln_t: T) -> (T, T) {
        if self.q == T::one() && self.alpha == T::zero() {
            return (self.ln_lambda, self.mu);
        }
        let lr = self.log_ratio_direct(t, ln_t);
        let gain = if self.q == T::one() { self.ln_lambda } else { self.ln_lambda + (self.q - T::one()) * lr };
        let offset = if self.alpha == T::zero() { self.mu } else { self.mu + self.alpha * lr };
        (gain, offset)
    }

    /// `gain_and_offset` at the preimage `t = e^u` of an image radius `m`,
    /// with `ln(t / r_ref) = ln(m / (λ r_ref)) / q` taken from `m` directly.
    #[inline]
    pub fn inverse_gain_and_offset(&self, m: T, u: T) -> (T, T) {
        if self.q == T::one() && self.alpha == T::zero() {
            return (self.ln_lambda, self.mu);
        }
        let scale = (self.ln_lambda + self.ln_r_ref).exp();
        let lr = if scale.is_normal() && m.is_normal() { (m / scale).ln() / self.q } else { self.log_ratio(u) };
        let gain = if self.q == T::one() { self.ln_lambda } else { self.ln_lambda + (self.q - T::one()) * lr };
        let offset = if self.alpha == T::zero() { self.mu } else { self.mu + self.alpha * lr };
        (gain, offset)
    }

    /// `ln (s(t)/t)`, computed without the cancellation of `ln s - ln t`.
    #[inline]
    pub fn ln_gain(&self, ln_t: T) -> T {
        if self.q == T::one() {
            self.ln_lambda
        } else {
            self.ln_lambda + (self.q - T::one()) * self.log_ratio(ln_t)
        }
    }

    /// `a(t)`, unwrapped.
    #[inline]
    pub fn arg_offset(&self, ln_t: T) -> T {
        if self.alpha == T::zero() {
            self.mu
        } else {
            self.mu + self.alpha * self.log_ratio(ln_t)
        }
    }

    /// `ln t` for a given `ln s(t)` on this region.
    #[inline]
    pub fn ln_preimage(&self, ln_s: T) -> T {
        if self.q == T::one() {
            ln_s - self.ln_lambda
        } else {
            self.ln_r_ref + (ln_s - self.ln_lambda - self.ln_r_ref) / self.q
        }
    }

    /// Distortion of the local action, `(|q+1+iα| + |q-1+iα|)² / 4q`.
    pub fn distortion(&self) -> T {
        block_distortion(self.q, self.alpha)
    }

    /// `ln K`, finite even where `α²` overflows.
    pub fn ln_distortion(&self) -> T {
        ln_block_distortion(self.q, self.alpha.ln())
    }
}

/// `(|q+1+iα| + |q-1+iα|)² / (4q)`.
pub fn block_distortion<T: Real>(q: T, alpha: T) -> T {
    let a = Complex::new(q + T::one(), alpha).norm();
    let b = Complex::new(q - T::one(), alpha).norm();
    (a + b) * (a + b) / (T::c(4.0) * q)
}

/// Logarithm of [`block_distortion`] with the spiral coefficient given as
/// `ln α` (`-inf` for `α = 0`).
pub fn ln_block_distortion<T: Real>(q: T, ln_alpha: T) -> T {
    let a = ln_hypot(q + T::one(), ln_alpha);
    let b = ln_hypot(q - T::one(), ln_alpha);
    T::two() * log_add_exp(a, b) - (T::c(4.0) * q).ln()
}

/// Wirtinger derivatives `(∂f, ∂̄f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wirtinger<T> {
    pub d: Complex<T>,
    pub dbar: Complex<T>,
}

impl<T: Real> Wirtinger<T> {
    /// Operator norm `|∂f| + |∂̄f|`.
    pub fn operator_norm(&self) -> T {
        self.d.norm() + self.dbar.norm()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(bound = "T: Real")]
struct RawMap<T> {
    n_blocks: usize,
    regions: Vec<RegionAction<T>>,
}

/// Exact representation of a composed radial map (truncated after
/// `n_blocks` blocks) as an ordered region table, innermost region first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", try_from = "RawMap<T>")]
pub struct PiecewiseRadialMap<T> {
    n_blocks: usize,
    regions: Vec<RegionAction<T>>,
    #[serde(skip)]
    image_hi: Vec<T>,
}

impl<T: Real> TryFrom<RawMap<T>> for PiecewiseRadialMap<T> {
    type Error = Error;

    fn try_from(raw: RawMap<T>) -> Result<Self> {
        Self::from_regions(raw.regions, raw.n_blocks)
    }
}

fn continuity_tol<T: Real>(x: T) -> T {
    T::c(1e3) * T::epsilon() * (T::one() + x.abs())
}

impl<T: Real> PiecewiseRadialMap<T> {
    pub fn identity() -> Self {
        let outer = RegionAction {
            kind: RegionKind::Outer,
            ln_t_lo: T::neg_infinity(),
            ln_t_hi: T::infinity(),
            ln_lambda: T::zero(),
            mu: T::zero(),
            q: T::one(),
            alpha: T::zero(),
            ln_r_ref: T::zero(),
        };
        Self::from_regions(vec![outer], 0).expect("identity map is valid")
    }

    /// Build from a region table, checking every structural invariant.
    pub fn from_regions(regions: Vec<RegionAction<T>>, n_blocks: usize) -> Result<Self> {
        if regions.is_empty() {
            return domain("empty region table");
        }
        let first = regions[0];
        let last = regions[regions.len() - 1];
        if first.ln_t_lo != T::neg_infinity() || last.ln_t_hi != T::infinity() {
            return domain("regions must cover (0, inf)");
        }
        if last.ln_lambda != T::zero() || last.mu != T::zero() || last.q != T::one() || last.alpha != T::zero() {
            return domain("outermost region must be the identity");
        }
        for (i, r) in regions.iter().enumerate() {
            if !(r.ln_t_lo < r.ln_t_hi) {
                return domain(format!("region {i} has empty modulus interval"));
            }
            if !(r.q >= T::one()) || !r.q.is_finite() || !r.alpha.is_finite() || !r.mu.is_finite() || !r.ln_lambda.is_finite() {
                return domain(format!("region {i} has invalid parameters"));
            }
            if r.is_gap() && (r.q != T::one() || r.alpha != T::zero()) {
                return domain(format!("gap region {i} must be a similarity"));
            }
        }
        for (i, w) in regions.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            if a.ln_t_hi != b.ln_t_lo {
                return domain(format!("regions {i} and {} are not adjacent", i + 1));
            }
            let u = a.ln_t_hi;
            let (sa, sb) = (a.ln_modulus(u), b.ln_modulus(u));
            if (sa - sb).abs() > continuity_tol(sa) {
                return domain(format!("modulus profile jumps at boundary {i}"));
            }
            let (aa, ab) = (a.arg_offset(u), b.arg_offset(u));
            if (aa - ab).abs() > continuity_tol(aa) {
                return domain(format!("argument offset jumps at boundary {i}"));
            }
        }
        let image_hi = regions
            .iter()
            .map(|r| if r.ln_t_hi.is_finite() { r.ln_modulus(r.ln_t_hi) } else { T::infinity() })
            .collect();
        Ok(Self { n_blocks, regions, image_hi })
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn regions(&self) -> &[RegionAction<T>] {
        &self.regions
    }

    /// Finite region boundaries as `ln t`, ascending.
    pub fn ln_boundaries(&self) -> impl Iterator<Item = T> + '_ {
        self.regions[..self.regions.len() - 1].iter().map(|r| r.ln_t_hi)
    }

    /// Region index for `ln t`; boundaries resolve to the annulus side.
    pub fn region_index(&self, ln_t: T) -> usize {
        let i = self.regions.partition_point(|r| r.ln_t_hi < ln_t);
        let i = i.min(self.regions.len() - 1);
        if ln_t == self.regions[i].ln_t_hi && i + 1 < self.regions.len() && !self.regions[i + 1].is_gap() {
            i + 1
        } else {
            i
        }
    }

    pub fn region(&self, ln_t: T) -> &RegionAction<T> {
        &self.regions[self.region_index(ln_t)]
    }

    /// Evaluate the map.
    pub fn eval(&self, z: ComplexPoint<T>) -> Result<ComplexPoint<T>> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return domain("non-finite input point");
        }
        let t = z.norm();
        if t == T::zero() {
            return Ok(z);
        }
        let u = t.ln();
        let (gain, offset) = self.region(u).gain_and_offset(t, u);
        Ok(z * Complex::from_polar(gain.exp(), offset))
    }

    /// `(ln s(t), θ + a(t))` for `z = e^{ln_t + iθ}`; the argument is unwrapped.
    pub fn eval_log_polar(&self, ln_t: T, theta: T) -> (T, T) {
        let reg = self.region(ln_t);
        (reg.ln_modulus(ln_t), theta + reg.arg_offset(ln_t))
    }

    fn check_radius(t: T) -> Result<()> {
        if !(t > T::zero()) || !t.is_finite() {
            return domain(format!("radius must be positive and finite, got {t}"));
        }
        Ok(())
    }

    /// Modulus profile `s(t) = |f(t e^{iθ})|`.
    pub fn radial_profile(&self, t: T) -> Result<T> {
        Self::check_radius(t)?;
        Ok(self.ln_radial_profile(t.ln()).exp())
    }

    pub fn ln_radial_profile(&self, ln_t: T) -> T {
        self.region(ln_t).ln_modulus(ln_t)
    }

    /// Argument offset `a(t) = arg f(t e^{iθ}) − θ`, unwrapped.
    pub fn arg_profile(&self, t: T) -> Result<T> {
        Self::check_radius(t)?;
        Ok(self.arg_profile_ln(t.ln()))
    }

    pub fn arg_profile_ln(&self, ln_t: T) -> T {
        self.region(ln_t).arg_offset(ln_t)
    }

    /// `ln s'(t)`; one-sided (annulus side) on boundaries.
    pub fn ln_radial_derivative(&self, ln_t: T) -> T {
        let reg = self.region(ln_t);
        reg.ln_modulus(ln_t) + reg.q.ln() - ln_t
    }

    fn interior_region(&self, z: ComplexPoint<T>) -> Result<(&RegionAction<T>, T, T)> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return domain("non-finite input point");
        }
        let t = z.norm();
        if t == T::zero() {
            return Err(Error::Boundary { modulus: 0.0 });
        }
        let u = t.ln();
        let tol = T::c(64.0) * T::epsilon() * (T::one() + u.abs());
        if self.ln_boundaries().any(|b| (b - u).abs() <= tol) {
            return Err(Error::Boundary { modulus: t.f64() });
        }
        Ok((self.region(u), t, u))
    }

    /// Closed-form Wirtinger derivatives of the local action.
    pub fn wirtinger(&self, z: ComplexPoint<T>) -> Result<Wirtinger<T>> {
        let (reg, t, u) = self.interior_region(z)?;
        let (gain, offset) = reg.gain_and_offset(t, u);
        let g = Complex::from_polar(gain.exp(), offset);
        let half = T::half();
        let d = g * Complex::new(T::one() + reg.q, reg.alpha) * half;
        let e2 = (z / t) * (z / t);
        let dbar = e2 * g * Complex::new(reg.q - T::one(), reg.alpha) * half;
        Ok(Wirtinger { d, dbar })
    }

    /// Jacobian determinant `|∂f|² − |∂̄f|²`, evaluated through the identity
    /// `|∂f|² − |∂̄f|² = q |s(t)/t|²` which avoids cancellation for large `α`.
    pub fn jacobian(&self, z: ComplexPoint<T>) -> Result<T> {
        let (reg, _, u) = self.interior_region(z)?;
        Ok(reg.q * (T::two() * reg.ln_gain(u)).exp())
    }

    /// Distortion `K(z) = (|∂f| + |∂̄f|)² / J`; scale free, so it never
    /// underflows.
    pub fn distortion(&self, z: ComplexPoint<T>) -> Result<T> {
        let (reg, _, _) = self.interior_region(z)?;
        Ok(reg.distortion())
    }

    /// Distortion looked up by modulus only; boundaries use the annulus side.
    pub fn distortion_at_radius(&self, ln_t: T) -> T {
        self.region(ln_t).distortion()
    }

    pub fn ln_distortion_at_radius(&self, ln_t: T) -> T {
        self.region(ln_t).ln_distortion()
    }

    /// Exact inverse.
    pub fn inverse_eval(&self, w: ComplexPoint<T>) -> Result<ComplexPoint<T>> {
        if !(w.re.is_finite() && w.im.is_finite()) {
            return domain("non-finite input point");
        }
        let m = w.norm();
        if m == T::zero() {
            return Ok(w);
        }
        let v = m.ln();
        let mut i = self.image_hi.partition_point(|&h| h < v).min(self.regions.len() - 1);
        if v == self.image_hi[i] && i + 1 < self.regions.len() && !self.regions[i + 1].is_gap() {
            i += 1;
        }
        let reg = &self.regions[i];
        let u = reg.ln_preimage(v);
        let (ln_gain, offset) = reg.inverse_gain_and_offset(m, u);
        Ok(w * Complex::from_polar((-ln_gain).exp(), -offset))
    }

    /// Largest `|α|` over regions meeting `ln t ∈ [lo, hi]`.
    pub fn max_twist(&self, lo: T, hi: T) -> T {
        let i = self.region_index(lo);
        let j = self.region_index(hi);
        self.regions[i.min(j)..=i.max(j)].iter().fold(T::zero(), |m, r| m.max(r.alpha.abs()))
    }

    /// Largest `|α| / q` over regions meeting `ln s ∈ [lo, hi]`, the rate of
    /// the inverse's argument in `ln s`.
    pub fn max_inverse_twist(&self, lo: T, hi: T) -> T {
        let at = |v: T| self.image_hi.partition_point(|&h| h < v).min(self.regions.len() - 1);
        let (i, j) = (at(lo), at(hi));
        self.regions[i.min(j)..=i.max(j)].iter().fold(T::zero(), |m, r| m.max(r.alpha.abs() / r.q))
    }

    /// `ln t` for a given `ln s(t)`.
    pub fn ln_inverse_profile(&self, ln_s: T) -> T {
        let i = self.image_hi.partition_point(|&h| h < ln_s).min(self.regions.len() - 1);
        self.regions[i].ln_preimage(ln_s)
    }
}
