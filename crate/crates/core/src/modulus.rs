//! The modulus argument at the origin: the chain-of-balls density `ρ₀`,
//! the weighted-modulus upper bound, the winding lower bound, and the full
//! bound chain at a base point `z0 ∈ (0, 1)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::construction::{distortion_lp_norm_on_disc, LpNorm, McEstimate, SchedulePlan};
use crate::construction::lp::radial_stratified_mc;
use crate::error::{domain, Error, Result};
use crate::logspace::{log_sub_exp, log_sum_exp, Reported};
use crate::map::PiecewiseRadialMap;
use crate::rotation::winding_from_difference;
use crate::Real;

/// The family of paths joining `E = [z0, 1]` to `F = (-∞, 0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PathFamilySpec<T> {
    pub z0: T,
}

impl<T: Real> PathFamilySpec<T> {
    pub fn new(z0: T) -> Result<Self> {
        if !(z0 > T::zero() && z0 < T::one()) {
            return domain(format!("z0 must lie in (0, 1), got {z0}"));
        }
        Ok(Self { z0 })
    }

    /// Endpoints of `E`.
    pub fn segment_e(&self) -> (Complex<T>, Complex<T>) {
        (Complex::new(self.z0, T::zero()), Complex::new(T::one(), T::zero()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Ball<T> {
    pub center: T,
    pub radius: T,
}

impl<T: Real> Ball<T> {
    pub fn contains(&self, z: Complex<T>) -> bool {
        (z - Complex::new(self.center, T::zero())).norm() <= self.radius
    }

    /// Length of the part of `[a, b]` inside the closed ball.
    pub fn chord_length(&self, a: Complex<T>, b: Complex<T>) -> T {
        let c = Complex::new(self.center, T::zero());
        let d = b - a;
        let dd = d.norm_sqr();
        if dd == T::zero() {
            return T::zero();
        }
        let w = a - c;
        // |w + s d|² = r²  ⇔  dd s² + 2 (w·d) s + |w|² - r² = 0
        let wd = w.re * d.re + w.im * d.im;
        let disc = wd * wd - dd * (w.norm_sqr() - self.radius * self.radius);
        if disc <= T::zero() {
            return T::zero();
        }
        let sq = disc.sqrt();
        let s0 = ((-wd - sq) / dd).max(T::zero());
        let s1 = ((-wd + sq) / dd).min(T::one());
        if s1 <= s0 {
            T::zero()
        } else {
            (s1 - s0) * dd.sqrt()
        }
    }
}

/// Balls `B_j = B(2^j z0, 2^j z0)`, `j = 0..=n`, with `n` the least integer
/// such that `2^n z0 ≥ 1`. The balls are nested (internally tangent at 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BallChain<T> {
    pub z0: T,
    pub n: usize,
    pub balls: Vec<Ball<T>>,
}

pub fn build_ball_chain<T: Real>(z0: T) -> Result<BallChain<T>> {
    PathFamilySpec::new(z0)?;
    let mut n = 0usize;
    let mut c = z0;
    let mut balls = vec![Ball { center: c, radius: c }];
    while c < T::one() {
        c = c * T::two();
        n += 1;
        balls.push(Ball { center: c, radius: c });
    }
    Ok(BallChain { z0, n, balls })
}

impl<T: Real> BallChain<T> {
    /// Index of the smallest ball containing `z`.
    pub fn ball_index(&self, z: Complex<T>) -> Option<usize> {
        self.balls.iter().position(|b| b.contains(z))
    }

    /// `∫_{[a,b]} ρ₀ ds`, exact.
    pub fn segment_integral(&self, a: Complex<T>, b: Complex<T>) -> T {
        let mut inner = T::zero();
        let mut total = T::zero();
        for ball in &self.balls {
            let len = ball.chord_length(a, b);
            total = total + T::two() / ball.radius * (len - inner).max(T::zero());
            inner = len;
        }
        total
    }

    /// `∫_γ ρ₀ ds` along a polygonal path.
    pub fn path_integral(&self, path: &[Complex<T>]) -> T {
        path.windows(2).fold(T::zero(), |acc, w| acc + self.segment_integral(w[0], w[1]))
    }

    /// `ln ∫ ρ₀^k dA`, exact over the nested shells `B_j \ B_{j-1}`.
    pub fn ln_power_integral(&self, k: T) -> T {
        let quarter = T::c(0.75).ln();
        let terms: Vec<T> = self
            .balls
            .iter()
            .enumerate()
            .map(|(j, b)| {
                let shell = if j == 0 { T::zero() } else { quarter };
                T::PI().ln() + T::two() * b.radius.ln() + shell + k * (T::two().ln() - b.radius.ln())
            })
            .collect();
        log_sum_exp(&terms)
    }

    /// `ln Σ_j |B_j| (2/r(B_j))^k`, the ball-by-ball bound on `∫ ρ₀^k`.
    pub fn ln_power_ball_sum(&self, k: T) -> T {
        let terms: Vec<T> = self
            .balls
            .iter()
            .map(|b| T::PI().ln() + T::two() * b.radius.ln() + k * (T::two().ln() - b.radius.ln()))
            .collect();
        log_sum_exp(&terms)
    }

    /// `Σ_{j≤n} 2^{-2j/(p-1)}`.
    pub fn geometric_factor(&self, p: T) -> T {
        let r = T::two().powf(-T::two() / (p - T::one()));
        (0..=self.n).fold((T::zero(), T::one()), |(s, t), _| (s + t, t * r)).0
    }
}

/// `ρ₀(z) = 2 / r(B_j)` on `B_j \ B_{j-1}`, `0` off the chain.
pub fn rho0_eval<T: Real>(chain: &BallChain<T>, z: Complex<T>) -> T {
    chain.ball_index(z).map_or(T::zero(), |j| T::two() / chain.balls[j].radius)
}

/// `ln ∫_a^b 2s·arccos(min(s/2c, 1)) ds`, the area of `B(c, c)` between
/// the circles `|z| = a` and `|z| = b`. Small radii use a series so deep
/// shells stay accurate in logs.
fn ln_ball_annulus_area<T: Real>(ln_c: T, ln_a: T, ln_b: T) -> T {
    let ln_2c = T::two().ln() + ln_c;
    let ub = (ln_b - ln_2c).min(T::zero());
    let ua = (ln_a - ln_2c).min(T::zero());
    if !(ua < ub) {
        return T::neg_infinity();
    }
    let ln_dg = if ub < T::c(-9.0) {
        // G(u) = πu²/4 − u³/3 + O(u⁵)
        let lr = ua - ub;
        let one_m_r2 = -(T::two() * lr).exp_m1();
        let one_m_r3 = -(T::c(3.0) * lr).exp_m1();
        let corr = T::c(4.0) / (T::c(3.0) * T::PI()) * ub.exp() * one_m_r3 / one_m_r2;
        T::FRAC_PI_4().ln() + T::two() * ub + one_m_r2.ln() + (-corr).ln_1p()
    } else {
        let g = |u: T| u * u * T::half() * u.acos() + (u.asin() - u * (T::one() - u * u).sqrt()) * T::c(0.25);
        (g(ub.exp()) - g(ua.exp())).ln()
    };
    T::c(8.0).ln() + T::two() * ln_c + ln_dg
}

/// `ln ∫ K ρ₀² dA`, exact: `K` is radial and piecewise constant and
/// `ρ₀` is constant on each ball shell, so the integral reduces to areas of
/// ball/annulus intersections.
pub fn ln_weighted_rho0_integral<T: Real>(map: &PiecewiseRadialMap<T>, chain: &BallChain<T>) -> T {
    let mut terms = Vec::new();
    for reg in map.regions() {
        let ln_k = reg.ln_distortion();
        for (j, b) in chain.balls.iter().enumerate() {
            let outer = ln_ball_annulus_area(b.center.ln(), reg.ln_t_lo, reg.ln_t_hi);
            let shell = if j == 0 {
                outer
            } else {
                let inner = ln_ball_annulus_area(chain.balls[j - 1].center.ln(), reg.ln_t_lo, reg.ln_t_hi);
                if inner >= outer { T::neg_infinity() } else { log_sub_exp(outer, inner) }
            };
            if shell > T::neg_infinity() {
                terms.push(ln_k + shell + T::two() * (T::two().ln() - b.radius.ln()));
            }
        }
    }
    log_sum_exp(&terms)
}

/// Stratified Monte-Carlo estimate of `∫ K ρ₀² dA` (reported with `p = 1`,
/// so its "norm" is the integral itself).
pub fn weighted_rho0_integral_mc<T: Real>(
    map: &PiecewiseRadialMap<T>,
    chain: &BallChain<T>,
    sample_count: usize,
    seed: u64,
) -> Result<McEstimate<T>> {
    if sample_count < 10_000 {
        return domain(format!("sample_count must be at least 10^4, got {sample_count}"));
    }
    let top = (T::two() * chain.balls[chain.n].radius).ln();
    let floor = map.ln_boundaries().fold(chain.z0.ln(), T::min) - T::one();
    let mc = radial_stratified_mc(top, floor, sample_count, seed, |ln_t, phi| {
        let z = Complex::from_polar(ln_t.exp(), phi);
        let rho = rho0_eval(chain, z);
        map.ln_distortion_at_radius(ln_t) + T::two() * rho.ln()
    });
    Ok(McEstimate::from_integral(T::one(), mc))
}

/// The weighted-modulus upper bound by Hölder's inequality,
/// `‖K‖_{L^p(B(0,4))} (∫ ρ₀^{2p/(p-1)})^{(p-1)/p}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct UpperBound<T> {
    pub p: T,
    pub k_norm: LpNorm<T>,
    /// `ln Σ_j |B_j| (2/r_j)^{2p/(p-1)}`.
    pub ln_rho_ball_sum: T,
    /// `ln ∫ ρ₀^{2p/(p-1)}` over the nested shells.
    pub ln_rho_exact: T,
    /// Bound with the ball-by-ball sum (the value used in the chain).
    pub ln_upper: T,
    /// Same bound with the exact shell integral.
    pub ln_upper_exact_rho: T,
    /// `ln ∫ K ρ₀² dA`, exact.
    pub ln_direct: T,
}

pub fn weighted_modulus_upper<T: Real>(
    plan: &SchedulePlan<T>,
    map: &PiecewiseRadialMap<T>,
    chain: &BallChain<T>,
) -> Result<UpperBound<T>> {
    let p = plan.p;
    if !(p > T::one() && p.is_finite()) {
        return domain(format!("p must be finite and > 1, got {p}"));
    }
    let k_norm = distortion_lp_norm_on_disc(plan, T::c(4.0));
    let k = T::two() * p / (p - T::one());
    let e = (p - T::one()) / p;
    let ln_rho_ball_sum = chain.ln_power_ball_sum(k);
    let ln_rho_exact = chain.ln_power_integral(k);
    Ok(UpperBound {
        p,
        k_norm,
        ln_rho_ball_sum,
        ln_rho_exact,
        ln_upper: k_norm.ln_norm + e * ln_rho_ball_sum,
        ln_upper_exact_rho: k_norm.ln_norm + e * ln_rho_exact,
        ln_direct: ln_weighted_rho0_integral(map, chain),
    })
}

/// `2π n² / ln(c_f / r_f)`, with the ratio given as its logarithm.
pub fn modulus_lower_from_winding_ln<T: Real>(nz0: u64, ln_ratio: T) -> Result<T> {
    if nz0 == 0 {
        return Ok(T::zero());
    }
    if !(ln_ratio > T::zero()) {
        return Err(Error::Degenerate(format!(
            "winding {nz0} with c_f/r_f = exp({ln_ratio}) <= 1"
        )));
    }
    let n = T::c(nz0 as f64);
    Ok(T::two() * T::PI() * n * n / ln_ratio)
}

pub fn modulus_lower_from_winding<T: Real>(nz0: u64, c_f: T, r_f: T) -> Result<T> {
    if !(r_f > T::zero() && r_f <= c_f) {
        return domain(format!("need 0 < r_f <= c_f, got r_f = {r_f}, c_f = {c_f}"));
    }
    modulus_lower_from_winding_ln(nz0, c_f.ln() - r_f.ln())
}

/// Both sides of the modulus inequality at one base point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ModulusBounds<T> {
    pub z0: T,
    pub n: u64,
    pub upper: Reported<T>,
    /// Lower bound with the exact `r_f`.
    pub lower: Reported<T>,
    /// Lower bound with `r_f ≥ z0^α`.
    pub lower_holder: Reported<T>,
    pub c_f: Reported<T>,
    pub r_f_exact: Reported<T>,
    pub r_f_holder: Reported<T>,
    /// `√(upper · α log(1/z0) / 2π)`, the winding bound the chain implies.
    pub implied_winding_bound: T,
    /// As above with `log(c_f/r_f)` from the exact profile.
    pub implied_winding_bound_exact: T,
    /// `∫ K ρ₀² dA`, which the upper bound must dominate.
    pub direct_integral: Reported<T>,
    pub holds: bool,
}

/// Evaluate the bound chain for the radial map at `z0` on the positive axis.
///
/// `c_f = s(1)` and `r_f = s(z0)` since the modulus profile is increasing.
pub fn verify_bound_chain<T: Real>(
    map: &PiecewiseRadialMap<T>,
    plan: &SchedulePlan<T>,
    z0: T,
    alpha_below: T,
) -> Result<ModulusBounds<T>> {
    let chain = build_ball_chain(z0)?;
    if !(alpha_below > T::zero()) {
        return domain(format!("Hölder-below exponent must be positive, got {alpha_below}"));
    }
    let ln_z0 = z0.ln();
    let ln_c = map.ln_radial_profile(T::zero());
    let ln_r_exact = map.ln_radial_profile(ln_z0);
    let ln_r_holder = alpha_below * ln_z0;
    let n = winding_from_difference(map.arg_profile_ln(ln_z0) - map.arg_profile_ln(T::zero()));
    let up = weighted_modulus_upper(plan, map, &chain)?;
    let lower = modulus_lower_from_winding_ln(n, ln_c - ln_r_exact)?;
    let lower_holder = modulus_lower_from_winding_ln(n, ln_c - ln_r_holder)?;
    let upper = up.ln_upper.exp();
    let two_pi = T::two() * T::PI();
    Ok(ModulusBounds {
        z0,
        n,
        upper: Reported::from_ln(up.ln_upper),
        lower: Reported::from_linear(lower),
        lower_holder: Reported::from_linear(lower_holder),
        c_f: Reported::from_ln(ln_c),
        r_f_exact: Reported::from_ln(ln_r_exact),
        r_f_holder: Reported::from_ln(ln_r_holder),
        implied_winding_bound: (upper * alpha_below * (-ln_z0) / two_pi).sqrt(),
        implied_winding_bound_exact: (upper * (ln_c - ln_r_exact) / two_pi).sqrt(),
        direct_integral: Reported::from_ln(up.ln_direct),
        holds: lower < upper && up.ln_direct <= up.ln_upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{generate_schedule, GaugeSpec, Mode};

    #[test]
    fn chain_sizes() {
        let c = build_ball_chain(0.5_f64).unwrap();
        assert_eq!(c.n, 1);
        assert_eq!(c.balls[1], Ball { center: 1.0, radius: 1.0 });
        assert_eq!(build_ball_chain(0.3_f64).unwrap().n, 2);
        for k in 1..20 {
            assert_eq!(build_ball_chain(0.5_f64.powi(k)).unwrap().n, k as usize);
        }
        assert!(build_ball_chain(1.0_f64).is_err());
        assert!(build_ball_chain(0.0_f64).is_err());
    }

    #[test]
    fn rho0_values() {
        let c = build_ball_chain(0.1_f64).unwrap();
        assert_eq!(rho0_eval(&c, Complex::new(0.1, 0.05)), 20.0);
        assert_eq!(rho0_eval(&c, Complex::new(-1.0, 0.0)), 0.0);
        let radial = c.segment_integral(Complex::new(0.1, 0.0), Complex::new(0.0, 0.0));
        assert!((radial - 2.0).abs() < 1e-12);
    }

    #[test]
    fn chord_through_center() {
        let b = Ball { center: 1.0_f64, radius: 1.0 };
        let l = b.chord_length(Complex::new(-5.0, 0.0), Complex::new(5.0, 0.0));
        assert!((l - 2.0).abs() < 1e-14);
        assert_eq!(b.chord_length(Complex::new(-5.0, 3.0), Complex::new(5.0, 3.0)), 0.0);
    }

    #[test]
    fn lower_bound_formula() {
        assert_eq!(modulus_lower_from_winding(0, 1.0_f64, 0.5).unwrap(), 0.0);
        let v = modulus_lower_from_winding(5, std::f64::consts::E, 1.0).unwrap();
        assert!((v - 2.0 * std::f64::consts::PI * 25.0).abs() < 1e-12);
        let w = modulus_lower_from_winding(10, std::f64::consts::E, 1.0).unwrap();
        assert!((w / v - 4.0).abs() < 1e-14);
        assert!(matches!(modulus_lower_from_winding(3, 1.0_f64, 1.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn unit_field_scaling() {
        let plan = generate_schedule(2.0_f64, 0, GaugeSpec::log_power(1.0), Mode::RotationOnly).unwrap();
        let map = PiecewiseRadialMap::identity();
        // K ≡ 1 and dyadic z0 keep the geometric factor's length in step
        let a = weighted_modulus_upper(&plan, &map, &build_ball_chain(0.5_f64.powi(8)).unwrap()).unwrap();
        let b = weighted_modulus_upper(&plan, &map, &build_ball_chain(0.5_f64.powi(7)).unwrap()).unwrap();
        let ratio = (b.ln_upper - a.ln_upper).exp();
        let fa = build_ball_chain(0.5_f64.powi(8)).unwrap().geometric_factor(2.0);
        let fb = build_ball_chain(0.5_f64.powi(7)).unwrap().geometric_factor(2.0);
        assert!((ratio - 0.5 * (fb / fa).sqrt()).abs() < 1e-10);
        for c in [a, b] {
            assert!(c.ln_direct <= c.ln_upper_exact_rho);
            assert!(c.ln_upper_exact_rho <= c.ln_upper);
        }
    }

    #[test]
    fn identity_chain_is_trivial() {
        let plan = generate_schedule(2.0_f64, 0, GaugeSpec::log_power(1.0), Mode::RotationOnly).unwrap();
        let r = verify_bound_chain(&PiecewiseRadialMap::identity(), &plan, 0.01, 1.0).unwrap();
        assert_eq!(r.n, 0);
        assert_eq!(r.lower.value, Some(0.0));
        assert!(r.holds);
    }

    #[test]
    fn ball_area_series_matches_closed_form() {
        // at the switch-over radius both branches must agree
        let ln_c = 0.0_f64;
        let ln_2c = 2.0_f64.ln();
        let lo = ln_2c - 9.5;
        let hi = ln_2c - 9.0 + 1e-9;
        let series = ln_ball_annulus_area(ln_c, lo, ln_2c - 9.0 - 1e-9);
        let closed = ln_ball_annulus_area(ln_c, lo, hi);
        assert!((series - closed).abs() < 1e-6);
        // whole ball
        let full = ln_ball_annulus_area(ln_c, f64::NEG_INFINITY, 10.0);
        assert!((full - std::f64::consts::PI.ln()).abs() < 1e-14);
    }
}
