//! Pointwise rotation at the origin: continuous argument tracking along
//! rays, winding counts, and the rotation bounds evaluated on plans.

use std::io::Write;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::construction::{Mode, SchedulePlan};
use crate::error::{domain, Error, Result};
use crate::logspace::{log_sum_exp, Reported};
use crate::map::{PiecewiseRadialMap, PlanarMap};
use crate::Real;

/// Relative tolerance for the sharpness comparison (rounding only).
pub const SHARPNESS_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackerConfig<T> {
    /// Largest accepted change of argument per step.
    pub max_increment: T,
    /// Agreement required between a full step and two half steps.
    pub consistency_tol: T,
    /// First step in `ln t`.
    pub initial_step: T,
    /// Largest step in `ln t`.
    pub max_step: T,
    pub max_steps: usize,
}

impl<T: Real> Default for TrackerConfig<T> {
    fn default() -> Self {
        Self {
            max_increment: T::FRAC_PI_2(),
            consistency_tol: T::c(1e-6),
            initial_step: T::c(1e-2),
            max_step: T::c(0.25),
            max_steps: 50_000_000,
        }
    }
}

/// Track `arg f(t e^{iθ})` continuously as `ln t` decreases from
/// `ln_t_start` to `ln_t_end`, returning the lift at each checkpoint
/// (checkpoints outside the range are ignored; the end point is always
/// included). The lift starts from the principal argument at `ln_t_start`.
///
/// Steps are halved until both the full step and its two halves change the
/// argument by less than `max_increment` and agree with each other; the
/// second condition rules out most steps that wrap by a full turn. Maps
/// that report an angular rate bound also have each step capped so that the
/// true increment stays below `max_increment / 2`, which rules it out
/// entirely.
pub fn track_argument<T: Real, M: PlanarMap<T> + ?Sized>(
    map: &M,
    theta: T,
    ln_t_start: T,
    ln_t_end: T,
    checkpoints: &[T],
    cfg: &TrackerConfig<T>,
) -> Result<Vec<(T, T)>> {
    if !(ln_t_end < ln_t_start) || !ln_t_end.is_finite() || !ln_t_start.is_finite() {
        return domain("argument tracking needs t_end < t_start");
    }
    let mut targets: Vec<T> = checkpoints
        .iter()
        .copied()
        .filter(|&c| c < ln_t_start && c > ln_t_end)
        .collect();
    targets.push(ln_t_end);
    targets.sort_by(|a, b| b.partial_cmp(a).expect("finite checkpoints"));
    targets.dedup();

    let arg_between = |a: Complex<T>, b: Complex<T>| (b * a.conj()).arg();
    let mut u = ln_t_start;
    let mut d = map.direction(u, theta);
    let mut phase = d.arg();
    let mut out = vec![(u, phase)];
    let mut h = cfg.initial_step;
    let mut steps = 0usize;
    for &target in &targets {
        while u > target {
            let mut step = h.min(u - target);
            if let Some(rate) = map.arg_rate_bound(u - step, u) {
                let cap = cfg.max_increment * T::half() / rate;
                if cap < step {
                    step = cap;
                    h = cap;
                }
            }
            let u1 = if step >= u - target { target } else { u - step };
            if !(u1 < u) {
                return Err(Error::StepUnderflow { ln_radius: u.f64() });
            }
            let d1 = map.direction(u1, theta);
            let delta = arg_between(d, d1);
            let mut ok = delta.abs() < cfg.max_increment;
            if ok {
                let um = u - (u - u1) * T::half();
                let dm = map.direction(um, theta);
                let (a, b) = (arg_between(d, dm), arg_between(dm, d1));
                ok = a.abs() < cfg.max_increment
                    && b.abs() < cfg.max_increment
                    && (a + b - delta).abs() <= cfg.consistency_tol;
            }
            if !ok {
                h = (u - u1) * T::half();
                if !(u - h < u) {
                    return Err(Error::StepUnderflow { ln_radius: u.f64() });
                }
                continue;
            }
            phase = phase + delta;
            u = u1;
            d = d1;
            steps += 1;
            if steps > cfg.max_steps {
                return Err(Error::StepUnderflow { ln_radius: u.f64() });
            }
            if delta.abs() < cfg.max_increment * T::c(0.25) {
                h = (h * T::two()).min(cfg.max_step);
            }
        }
        out.push((target, phase));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ProfileSample<T> {
    pub ln_t: T,
    pub unwrapped_arg: T,
    /// `√α t^{-1/p} log^{1/2}(1/t)`, with `C = 1`.
    pub bound: Reported<T>,
    /// `|unwrapped_arg - θ| / bound`; absent where the bound vanishes.
    pub ratio: Option<T>,
}

/// Lift of `arg f` along one ray, with the rotation bound alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct RotationProfile<T> {
    pub theta: T,
    pub p: T,
    pub alpha_below: T,
    pub samples: Vec<ProfileSample<T>>,
}

/// `ln(√α t^{-1/p} log^{1/2}(1/t))` for `L = ln(1/t) > 0`.
pub fn ln_rotation_bound<T: Real>(ln_inv_t: T, p: T, alpha_below: T) -> T {
    T::half() * alpha_below.ln() + ln_inv_t / p + T::half() * ln_inv_t.ln()
}

impl<T: Real> RotationProfile<T> {
    pub fn from_lift(theta: T, p: T, alpha_below: T, lift: &[(T, T)]) -> Self {
        let samples = lift
            .iter()
            .map(|&(ln_t, arg)| {
                let (bound, ratio) = if ln_t < T::zero() {
                    let lb = ln_rotation_bound(-ln_t, p, alpha_below);
                    let rel = (arg - theta).abs();
                    let ratio = if rel == T::zero() { T::zero() } else { (rel.ln() - lb).exp() };
                    (Reported::from_ln(lb), Some(ratio))
                } else {
                    (Reported::from_ln(T::neg_infinity()), None)
                };
                ProfileSample { ln_t, unwrapped_arg: arg, bound, ratio }
            })
            .collect();
        Self { theta, p, alpha_below, samples }
    }

    /// CSV with header `t,ln_t,unwrapped_arg,bound_value,ln_bound_value,ratio`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::Domain(format!("csv output failed: {e}"));
        wr.write_record(["t", "ln_t", "unwrapped_arg", "bound_value", "ln_bound_value", "ratio"])
            .map_err(io)?;
        let fmt_opt = |x: Option<T>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        for s in &self.samples {
            wr.write_record([
                format!("{:e}", s.ln_t.exp()),
                format!("{:e}", s.ln_t),
                format!("{:e}", s.unwrapped_arg),
                fmt_opt(s.bound.value),
                fmt_opt(s.bound.log_value.is_finite().then_some(s.bound.log_value)),
                fmt_opt(s.ratio),
            ])
            .map_err(io)?;
        }
        wr.flush().map_err(|e| Error::Domain(format!("csv output failed: {e}")))?;
        Ok(())
    }
}

/// Continuous argument along the ray at angle `theta`, from `t_start` down
/// to `t_end` (both as `ln t`, `ln_t_end < ln_t_start ≤ 0`).
pub fn continuous_arg<T: Real, M: PlanarMap<T> + ?Sized>(
    map: &M,
    theta: T,
    ln_t_start: T,
    ln_t_end: T,
    checkpoints: &[T],
    p: T,
    alpha_below: T,
    cfg: &TrackerConfig<T>,
) -> Result<RotationProfile<T>> {
    if ln_t_start > T::zero() {
        return domain("t_start must not exceed 1");
    }
    let lift = track_argument(map, theta, ln_t_start, ln_t_end, checkpoints, cfg)?;
    Ok(RotationProfile::from_lift(theta, p, alpha_below, &lift))
}

/// Lower estimate of the steps `track_argument` needs on a radial map over
/// `ln t ∈ [lo, hi]`: the argument turns by `∫ |α| d ln t` and each step
/// covers at most `max_increment / 2`.
pub fn tracking_cost<T: Real>(map: &PiecewiseRadialMap<T>, lo: T, hi: T, cfg: &TrackerConfig<T>) -> T {
    let turn = map.regions().iter().fold(T::zero(), |acc, r| {
        let width = r.ln_t_hi.min(hi) - r.ln_t_lo.max(lo);
        if width > T::zero() && r.alpha != T::zero() { acc + r.alpha.abs() * width } else { acc }
    });
    turn / (cfg.max_increment * T::half())
}

/// The lift read off the closed form, `θ + a(t)`, at the same radii
/// `continuous_arg` would report.
pub fn analytic_arg<T: Real>(
    map: &PiecewiseRadialMap<T>,
    theta: T,
    ln_t_start: T,
    ln_t_end: T,
    checkpoints: &[T],
    p: T,
    alpha_below: T,
) -> Result<RotationProfile<T>> {
    if !(ln_t_end < ln_t_start) || ln_t_start > T::zero() || !ln_t_end.is_finite() {
        return domain("profile needs t_end < t_start <= 1");
    }
    let mut radii: Vec<T> = checkpoints.iter().copied().filter(|&c| c < ln_t_start && c > ln_t_end).collect();
    radii.push(ln_t_start);
    radii.push(ln_t_end);
    radii.sort_by(|a, b| b.partial_cmp(a).expect("finite checkpoints"));
    radii.dedup();
    let lift: Vec<(T, T)> = radii.into_iter().map(|u| (u, theta + map.arg_profile_ln(u))).collect();
    Ok(RotationProfile::from_lift(theta, p, alpha_below, &lift))
}

/// `⌊|Δarg| / 2π⌋ − 1`, clamped at 0.
pub fn winding_from_difference<T: Real>(delta: T) -> u64 {
    let turns = (delta.abs() / (T::two() * T::PI())).floor();
    turns.to_u64().unwrap_or(u64::MAX).saturating_sub(1)
}

/// Number of disjoint crossings guaranteed by the winding of `f([z0, z0/|z0|])`.
pub fn winding_count<T: Real, M: PlanarMap<T> + ?Sized>(map: &M, z0: Complex<T>, cfg: &TrackerConfig<T>) -> Result<u64> {
    let t = z0.norm();
    if !(t > T::zero() && t < T::one()) {
        return domain(format!("winding count needs 0 < |z0| < 1, got {t}"));
    }
    let lift = track_argument(map, z0.arg(), T::zero(), t.ln(), &[], cfg)?;
    let delta = lift[lift.len() - 1].1 - lift[0].1;
    Ok(winding_from_difference(delta))
}

/// Hölder-below exponent supplied by theory for the plan's map: `p/(p-1)`
/// for rotation-only maps (their inverse is `(1 - 1/p)`-Hölder) and the
/// threshold `3p/(p-1)` for stretch maps.
pub fn theoretical_holder_below<T: Real>(mode: Mode, p: T) -> T {
    match mode {
        Mode::RotationOnly => p / (p - T::one()),
        Mode::StretchRotation => T::c(3.0) * p / (p - T::one()),
    }
}

/// `|arg f(z0)| / (√α |z0|^{-1/p} log^{1/2}(1/|z0|))`, read from the
/// closed-form argument profile.
pub fn theorem1_ratio<T: Real>(map: &PiecewiseRadialMap<T>, p: T, z0: Complex<T>, alpha_below: T) -> Result<T> {
    let t = z0.norm();
    if !(t > T::zero() && t < T::one()) {
        return domain(format!("theorem-1 ratio needs 0 < |z0| < 1, got {t}"));
    }
    let a = map.arg_profile(t)?.abs();
    if a == T::zero() {
        return Ok(T::zero());
    }
    Ok((a.ln() - ln_rotation_bound(-t.ln(), p, alpha_below)).exp())
}

/// `ln Σ_{j≤n} α_j = ln |arg f̄(r_n)|`.
pub fn ln_total_rotation<T: Real>(plan: &SchedulePlan<T>, n: usize) -> T {
    let xs: Vec<T> = (1..=n).map(|j| plan.ln_alpha(j)).collect();
    log_sum_exp(&xs)
}

/// Theorem-1 ratio at every block radius `r_n`, from the plan alone.
pub fn theorem1_ratio_sequence<T: Real>(plan: &SchedulePlan<T>, alpha_below: T) -> Vec<T> {
    (1..=plan.n_blocks())
        .map(|n| (ln_total_rotation(plan, n) - ln_rotation_bound(plan.ln_inv_r(n), plan.p, alpha_below)).exp())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SharpnessRow<T> {
    pub n: usize,
    pub r: Reported<T>,
    pub lhs: Reported<T>,
    pub rhs: Reported<T>,
    pub pass: bool,
}

/// `ln` of the sharpness target at `r_n`: `r^{-1/p} log^{1/2}(1/r) h(r)` for
/// stretch plans, `r^{-1/p} h(r)` for rotation-only plans.
pub fn ln_sharpness_target<T: Real>(plan: &SchedulePlan<T>, n: usize) -> T {
    let l = plan.ln_inv_r(n);
    let base = l / plan.p + plan.gauge.ln_h(l);
    match plan.mode {
        Mode::RotationOnly => base,
        Mode::StretchRotation => base + T::half() * l.ln(),
    }
}

/// Compare the accumulated rotation `Σ_{j≤n} α_j` at `r_n` with the target.
pub fn sharpness_check<T: Real>(plan: &SchedulePlan<T>) -> Vec<SharpnessRow<T>> {
    (1..=plan.n_blocks())
        .map(|n| {
            let lhs = ln_total_rotation(plan, n);
            let rhs = ln_sharpness_target(plan, n);
            let pass = lhs >= rhs - T::c(SHARPNESS_REL_TOL) * (T::one() + rhs.abs());
            SharpnessRow {
                n,
                r: Reported::from_ln(plan.r[n - 1].ln()),
                lhs: Reported::from_ln(lhs),
                rhs: Reported::from_ln(rhs),
                pass,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::Identity;

    #[test]
    fn floor_arithmetic() {
        let tau = 2.0 * std::f64::consts::PI;
        assert_eq!(winding_from_difference(tau * 3.4), 2);
        assert_eq!(winding_from_difference(-tau * 3.4), 2);
        assert_eq!(winding_from_difference(0.5_f64), 0);
        assert_eq!(winding_from_difference(tau * 1.2), 0);
    }

    #[test]
    fn identity_tracks_constant() {
        let cfg = TrackerConfig::default();
        let lift = track_argument(&Identity, 0.7_f64, 0.0, -10.0, &[-3.0, -5.0], &cfg).unwrap();
        assert_eq!(lift.len(), 4);
        for (_, a) in lift {
            assert!((a - 0.7).abs() < 1e-15);
        }
        assert_eq!(winding_count(&Identity, Complex::new(0.01_f64, 0.0), &cfg).unwrap(), 0);
    }

    #[test]
    fn tracks_fast_spiral() {
        // arg f(t) = θ + 50 ln t, a closure-backed map
        let f = |z: Complex<f64>| {
            let t = z.norm();
            z * Complex::from_polar(1.0, 50.0 * t.ln())
        };
        let cfg = TrackerConfig::default();
        let lift = track_argument(&f, 0.0, 0.0, -2.0, &[], &cfg).unwrap();
        let last = lift.last().unwrap().1;
        assert!((last + 100.0).abs() < 1e-9);
    }

    #[test]
    fn closed_form_lift_matches_tracker() {
        use crate::map::BlockSpec;
        let m = PiecewiseRadialMap::from_blocks(&[BlockSpec { ln_r: -3.0_f64, ln_big_r: -2.0, alpha: 40.0, q: 1.0 }]).unwrap();
        let cfg = TrackerConfig::default();
        let cps = [-2.5, -2.0, -1.0];
        let a = analytic_arg(&m, 0.3, 0.0, -4.0, &cps, 2.0, 2.0).unwrap();
        let t = continuous_arg(&m, 0.3, 0.0, -4.0, &cps, 2.0, 2.0, &cfg).unwrap();
        assert_eq!(a.samples.len(), t.samples.len());
        for (x, y) in a.samples.iter().zip(&t.samples) {
            assert_eq!(x.ln_t, y.ln_t);
            assert!((x.unwrapped_arg - y.unwrapped_arg).abs() < 1e-9);
        }
        // 40 rad over one unit of ln t, π/4 per step
        let cost = tracking_cost(&m, -4.0, 0.0, &cfg);
        assert!((cost - 160.0 / std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn bad_ranges() {
        let cfg = TrackerConfig::default();
        assert!(track_argument(&Identity, 0.0_f64, -1.0, 0.0, &[], &cfg).is_err());
        assert!(winding_count(&Identity, Complex::new(1.5_f64, 0.0), &cfg).is_err());
        let m = PiecewiseRadialMap::<f64>::identity();
        assert!(theorem1_ratio(&m, 2.0, Complex::new(1.0, 0.0), 2.0).is_err());
        assert_eq!(theorem1_ratio(&m, 2.0, Complex::new(0.1, 0.0), 2.0).unwrap(), 0.0);
    }
}
