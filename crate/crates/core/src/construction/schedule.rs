//! Annulus schedules: radii, spiral coefficients and stretch exponents.
//!
//! With `L_n = ln(1/r_n)` every constraint is linear or logarithmic in `L_n`:
//!
//! * `r_1 < 1/e`                      ⇔ `L_1 > 1`
//! * `r_{n+1} < r_n / (2e)`           ⇔ `L_{n+1} > L_n + 1 + ln 2`
//! * `r_n < e^{-(q_1+…+q_{n-1}-(n-1))}` ⇔ `L_n > Σ_{j<n} (q_j - 1)` (stretch mode)
//! * `h(r_n) < n^{-1/2}`              ⇔ `ln h(L_n) < -½ ln n`
//! * `q_n^{p/(2p-1)} < α_n`           (stretch mode)
//!
//! Rotation-only plans use `α_n = h(r_n) r_n^{-1/p}` and `q_n = 1`; stretch
//! plans use `α_n = h(r_n) (log 1/r_n)^{1/2} r_n^{-1/p}` and `q_n = log 1/r_n`.

use serde::{Deserialize, Serialize};

use super::gauge::GaugeSpec;
use crate::error::{domain, Error, Result};
use crate::logspace::LogValue;
use crate::Real;

/// Margin (in `ln r`) between an emitted radius and the supremum of the
/// admissible radii.
pub const RADIUS_LOG_MARGIN: f64 = 1e-3;

/// Relative tolerance for the formula checks on stored `α_n`, `q_n`, `R_n`.
pub const FORMULA_TOL: f64 = 1e-9;

const SEARCH_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    RotationOnly,
    StretchRotation,
}

/// Construction parameters; all radii and exponents stored as logarithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SchedulePlan<T> {
    pub p: T,
    pub mode: Mode,
    pub gauge: GaugeSpec<T>,
    pub r: Vec<LogValue<T>>,
    #[serde(rename = "R")]
    pub big_r: Vec<LogValue<T>>,
    pub alpha: Vec<LogValue<T>>,
    pub q: Vec<LogValue<T>>,
}

impl<T: Real> SchedulePlan<T> {
    pub fn n_blocks(&self) -> usize {
        self.r.len()
    }

    /// `L_n = ln(1/r_n)` for 1-based `n`.
    pub fn ln_inv_r(&self, n: usize) -> T {
        -self.r[n - 1].ln()
    }

    pub fn ln_alpha(&self, n: usize) -> T {
        self.alpha[n - 1].ln()
    }

    pub fn q_value(&self, n: usize) -> T {
        self.q[n - 1].value()
    }

    /// Truncate to the first `n` blocks.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.n_blocks());
        Self {
            p: self.p,
            mode: self.mode,
            gauge: self.gauge.clone(),
            r: self.r[..n].to_vec(),
            big_r: self.big_r[..n].to_vec(),
            alpha: self.alpha[..n].to_vec(),
            q: self.q[..n].to_vec(),
        }
    }

    /// The mode's spiral coefficient for a block at `L = ln(1/r)`, as `ln α`.
    pub fn ln_alpha_formula(&self, ln_inv_r: T) -> T {
        ln_alpha_for(self.mode, self.p, &self.gauge, ln_inv_r)
    }

    pub fn validate_shape(&self) -> Result<()> {
        let n = self.r.len();
        if self.big_r.len() != n || self.alpha.len() != n || self.q.len() != n {
            return domain("plan lists r, R, alpha, q must have equal length");
        }
        if !(self.p.is_finite() && self.p > T::one()) {
            return domain(format!("p must be finite and > 1, got {}", self.p));
        }
        self.gauge.validate()
    }
}

fn ln_alpha_for<T: Real>(mode: Mode, p: T, gauge: &GaugeSpec<T>, ln_inv_r: T) -> T {
    let base = gauge.ln_h(ln_inv_r) + ln_inv_r / p;
    match mode {
        Mode::RotationOnly => base,
        Mode::StretchRotation => base + T::half() * ln_inv_r.ln(),
    }
}

fn q_for<T: Real>(mode: Mode, ln_inv_r: T) -> T {
    match mode {
        Mode::RotationOnly => T::one(),
        Mode::StretchRotation => ln_inv_r,
    }
}

/// Predicates on `L_n` that radii shrinking can always satisfy eventually.
fn shrinkable_ok<T: Real>(mode: Mode, p: T, gauge: &GaugeSpec<T>, n: usize, l: T) -> bool {
    let ln_alpha = ln_alpha_for(mode, p, gauge, l);
    let gauge_ok = gauge.ln_h(l) < -T::half() * T::c(n as f64).ln();
    let alpha_ok = ln_alpha >= T::zero();
    let stretch_ok = match mode {
        Mode::RotationOnly => true,
        Mode::StretchRotation => p / (T::two() * p - T::one()) * l.ln() < ln_alpha,
    };
    gauge_ok && alpha_ok && stretch_ok
}

/// Emit the greedy schedule: each `r_n` is `RADIUS_LOG_MARGIN` (in log
/// scale) below the supremum of the radii that satisfy every constraint.
pub fn generate_schedule<T: Real>(p: T, n_blocks: usize, gauge: GaugeSpec<T>, mode: Mode) -> Result<SchedulePlan<T>> {
    if !(p.is_finite() && p > T::one()) {
        return domain(format!("p must be finite and > 1, got {p}"));
    }
    gauge.validate()?;
    let margin = T::c(RADIUS_LOG_MARGIN);
    let mut ls: Vec<T> = Vec::with_capacity(n_blocks);
    let mut q_excess = T::zero();
    for n in 1..=n_blocks {
        let mut lower = match ls.last() {
            None => T::one(),
            Some(&prev) => prev + T::one() + T::two().ln(),
        };
        if mode == Mode::StretchRotation {
            lower = lower.max(q_excess);
        }
        let ok = |l: T| shrinkable_ok(mode, p, &gauge, n, l);
        let mut l = lower + margin;
        while !ok(l) {
            // bracket: `lo` fails, `hi` passes
            let lo = l;
            let mut step = T::one().max(l.abs());
            let mut hi = lo + step;
            while !ok(hi) {
                step = step * T::two();
                hi = lo + step;
                if hi > T::c(SEARCH_LIMIT) {
                    return Err(Error::Constraint {
                        name: "alpha_at_least_1".into(),
                        index: n,
                        detail: "no radius satisfies the gauge and spiral constraints".into(),
                    });
                }
            }
            let mut lo = lo;
            for _ in 0..200 {
                let mid = lo + (hi - lo) * T::half();
                if mid <= lo || mid >= hi {
                    break;
                }
                if ok(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            l = hi + margin;
        }
        if mode == Mode::StretchRotation {
            q_excess = q_excess + q_for(mode, l) - T::one();
        }
        ls.push(l);
    }
    let plan = SchedulePlan {
        p,
        mode,
        r: ls.iter().map(|&l| LogValue::from_ln(-l)).collect(),
        big_r: ls.iter().map(|&l| LogValue::from_ln(T::one() - l)).collect(),
        alpha: ls.iter().map(|&l| LogValue::from_ln(ln_alpha_for(mode, p, &gauge, l))).collect(),
        q: ls.iter().map(|&l| LogValue::from_ln(q_for(mode, l).ln())).collect(),
        gauge,
    };
    Ok(plan)
}

/// Outcome of one plan invariant, aggregated over blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ConstraintCheck<T> {
    pub name: String,
    pub description: String,
    pub passed: bool,
    /// Smallest log-space margin over all blocks; `null` when vacuous.
    #[serde(with = "crate::serde_ext::upper_edge")]
    pub slack: T,
    /// 1-based block attaining the smallest margin.
    pub worst_block: Option<usize>,
}

struct Acc<T> {
    slack: T,
    worst: Option<usize>,
}

impl<T: Real> Acc<T> {
    fn new() -> Self {
        Self { slack: T::infinity(), worst: None }
    }

    fn push(&mut self, n: usize, s: T) {
        if s < self.slack || s.is_nan() {
            self.slack = s;
            self.worst = Some(n);
        }
    }

    fn finish(self, name: &str, description: &str, strict: bool) -> ConstraintCheck<T> {
        let passed = if strict { self.slack > T::zero() } else { self.slack >= T::zero() };
        ConstraintCheck {
            name: name.into(),
            description: description.into(),
            passed,
            slack: self.slack,
            worst_block: self.worst,
        }
    }
}

/// Check every invariant of a plan; never fails.
pub fn check_feasibility<T: Real>(plan: &SchedulePlan<T>) -> Vec<ConstraintCheck<T>> {
    let mut out = Vec::new();
    let shape_ok = plan.validate_shape().is_ok();
    out.push(ConstraintCheck {
        name: "plan_shape".into(),
        description: "p > 1, valid gauge, equal-length parameter lists".into(),
        passed: shape_ok,
        slack: if shape_ok { T::infinity() } else { -T::one() },
        worst_block: None,
    });
    if !shape_ok {
        return out;
    }
    let n_blocks = plan.n_blocks();
    let p = plan.p;
    let tol = |x: T| T::c(FORMULA_TOL) * (T::one() + x.abs());

    let mut first = Acc::new();
    if n_blocks > 0 {
        first.push(1, plan.ln_inv_r(1) - T::one());
    }
    out.push(first.finish("r1_below_inv_e", "r_1 < 1/e", true));

    let mut sep = Acc::new();
    for n in 2..=n_blocks {
        sep.push(n, plan.ln_inv_r(n) - plan.ln_inv_r(n - 1) - T::one() - T::two().ln());
    }
    out.push(sep.finish("radii_separation", "r_{n+1} < r_n / (2e)", true));

    let mut outer = Acc::new();
    let mut alpha = Acc::new();
    let mut q = Acc::new();
    let mut alpha_min = Acc::new();
    let mut q_min = Acc::new();
    let mut gauge = Acc::new();
    let mut extra = Acc::new();
    let mut stretch = Acc::new();
    let mut q_excess = T::zero();
    for n in 1..=n_blocks {
        let l = plan.ln_inv_r(n);
        let d = plan.big_r[n - 1].ln() - plan.r[n - 1].ln() - T::one();
        outer.push(n, tol(T::one()) - d.abs());
        let want = plan.ln_alpha_formula(l);
        alpha.push(n, tol(want) - (plan.ln_alpha(n) - want).abs());
        let ln_q = plan.q[n - 1].ln();
        let want_q = q_for(plan.mode, l).ln();
        q.push(n, tol(want_q) - (ln_q - want_q).abs());
        alpha_min.push(n, plan.ln_alpha(n));
        q_min.push(n, ln_q);
        gauge.push(n, -T::half() * T::c(n as f64).ln() - plan.gauge.ln_h(l));
        if plan.mode == Mode::StretchRotation {
            extra.push(n, l - q_excess);
            q_excess = q_excess + plan.q_value(n) - T::one();
            stretch.push(n, plan.ln_alpha(n) - p / (T::two() * p - T::one()) * ln_q);
        }
    }
    out.push(outer.finish("outer_radius", "R_n = e r_n", false));
    out.push(alpha.finish("alpha_choice", "alpha_n matches the mode's formula", false));
    out.push(q.finish("q_choice", "q_n matches the mode's formula", false));
    out.push(alpha_min.finish("alpha_at_least_1", "alpha_n >= 1", false));
    out.push(q_min.finish("q_at_least_1", "q_n >= 1", false));
    out.push(gauge.finish("gauge_summability", "h(r_n) < n^{-1/2}", true));
    if plan.mode == Mode::StretchRotation {
        out.push(extra.finish(
            "radii_below_stretch_scale",
            "r_n < e^{-(q_1+...+q_{n-1}-(n-1))}",
            true,
        ));
        out.push(stretch.finish("stretch_below_spiral", "q_n^{p/(2p-1)} < alpha_n", true));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_pass<T: Real>(plan: &SchedulePlan<T>) -> bool {
        check_feasibility(plan).iter().all(|c| c.passed)
    }

    #[test]
    fn single_rotation_block() {
        let plan = generate_schedule(2.0_f64, 1, GaugeSpec::log_power(1.0), Mode::RotationOnly).unwrap();
        let l = plan.ln_inv_r(1);
        // largest admissible radius below 1/e, up to the margin
        assert!((l - 1.0 - RADIUS_LOG_MARGIN).abs() < 1e-15);
        let h = (1.0 / l).min(1.0);
        assert!(h < 1.0);
        let alpha = h * (-l).exp().powf(-0.5);
        assert!((plan.alpha[0].value() - alpha).abs() < 1e-13 * alpha);
        assert_eq!(plan.q[0].value(), 1.0);
        assert!(all_pass(&plan));
    }

    #[test]
    fn emitted_plans_are_feasible() {
        for mode in [Mode::RotationOnly, Mode::StretchRotation] {
            for p in [1.2, 1.5, 2.0, 4.0, 10.0] {
                for g in [GaugeSpec::log_power(0.25), GaugeSpec::log_power(1.0), GaugeSpec::power(0.05)] {
                    let plan = generate_schedule(p, 12, g, mode).unwrap();
                    for c in check_feasibility(&plan) {
                        assert!(c.passed, "{mode:?} p={p}: {} failed with slack {}", c.name, c.slack);
                    }
                }
            }
        }
    }

    #[test]
    fn stretch_scale_constraint_recomputed() {
        let plan = generate_schedule(2.0_f64, 10, GaugeSpec::log_power(1.0), Mode::StretchRotation).unwrap();
        let mut excess = 0.0;
        for n in 1..=10 {
            let q = plan.q_value(n);
            assert!(plan.ln_inv_r(n) > excess);
            excess += q - 1.0;
        }
    }

    #[test]
    fn rotation_mode_has_unit_q() {
        let plan = generate_schedule(3.0_f64, 6, GaugeSpec::log_power(1.0), Mode::RotationOnly).unwrap();
        assert!(plan.q.iter().all(|q| q.value() == 1.0));
    }

    #[test]
    fn detects_crowded_radii() {
        let mut plan = generate_schedule(2.0_f64, 3, GaugeSpec::log_power(1.0), Mode::RotationOnly).unwrap();
        // r_2 = r_1 / 2
        let l1 = plan.ln_inv_r(1);
        plan.r[1] = LogValue::from_ln(-(l1 + 2f64.ln()));
        plan.big_r[1] = LogValue::from_ln(1.0 - (l1 + 2f64.ln()));
        let checks = check_feasibility(&plan);
        let sep = checks.iter().find(|c| c.name == "radii_separation").unwrap();
        assert!(!sep.passed);
        assert_eq!(sep.worst_block, Some(2));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate_schedule(1.0_f64, 3, GaugeSpec::log_power(1.0), Mode::RotationOnly).is_err());
        assert!(generate_schedule(f64::NAN, 3, GaugeSpec::log_power(1.0), Mode::RotationOnly).is_err());
        // h = r^{0.9} with p = 2 forces alpha_n < 1 for every radius
        assert!(generate_schedule(2.0_f64, 2, GaugeSpec::power(0.9), Mode::RotationOnly).is_err());
    }

    #[test]
    fn empty_plan_is_trivially_feasible() {
        let plan = generate_schedule(2.0_f64, 0, GaugeSpec::log_power(1.0), Mode::StretchRotation).unwrap();
        assert_eq!(plan.n_blocks(), 0);
        assert!(all_pass(&plan));
    }

    #[test]
    fn f32_schedule() {
        let plan = generate_schedule(2.0_f32, 4, GaugeSpec::log_power(1.0), Mode::RotationOnly).unwrap();
        assert!(all_pass(&plan));
    }
}
