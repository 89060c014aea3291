//! `L^p` norm of the distortion over a disc: closed form and a stratified
//! Monte-Carlo cross-check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::schedule::SchedulePlan;
use super::series::{ln_annulus_area, ln_block_distortion_of};
use crate::error::{domain, Result};
use crate::logspace::{log_add_exp, log_sub_exp, log_sum_exp};
use crate::map::PiecewiseRadialMap;
use crate::Real;

/// `(∫_{B(0,ρ)} K^p dA)^{1/p}` with the integral kept alongside.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LpNorm<T> {
    pub p: T,
    pub ln_integral: T,
    pub ln_norm: T,
}

impl<T: Real> LpNorm<T> {
    pub fn norm(&self) -> T {
        self.ln_norm.exp()
    }

    pub fn integral(&self) -> T {
        self.ln_integral.exp()
    }
}

/// Closed-form norm on the unit disc. Each block is conformal off its own
/// annulus, so `K = K_n` on `A_n` and `K = 1` elsewhere.
pub fn distortion_lp_norm<T: Real>(plan: &SchedulePlan<T>) -> LpNorm<T> {
    distortion_lp_norm_on_disc(plan, T::one())
}

/// Closed-form norm on `B(0, radius)`, `radius ≥ R_1`.
pub fn distortion_lp_norm_on_disc<T: Real>(plan: &SchedulePlan<T>, radius: T) -> LpNorm<T> {
    let p = plan.p;
    let n = plan.n_blocks();
    let weighted: Vec<T> = (1..=n)
        .map(|k| ln_annulus_area(plan, k) + p * ln_block_distortion_of(plan, k))
        .collect();
    let areas: Vec<T> = (1..=n).map(|k| ln_annulus_area(plan, k)).collect();
    let ln_disc = T::PI().ln() + T::two() * radius.ln();
    let ln_rest = log_sub_exp(ln_disc, log_sum_exp(&areas));
    let ln_integral = log_add_exp(log_sum_exp(&weighted), ln_rest);
    LpNorm { p, ln_integral, ln_norm: ln_integral / p }
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct McEstimate<T> {
    pub p: T,
    pub samples: usize,
    pub strata: usize,
    pub ln_integral: T,
    pub ln_integral_se: T,
    pub ln_norm: T,
    pub ln_norm_se: T,
}

impl<T: Real> McEstimate<T> {
    pub fn norm(&self) -> T {
        self.ln_norm.exp()
    }

    pub fn norm_se(&self) -> T {
        self.ln_norm_se.exp()
    }

    /// Distance to `ln_integral_ref` in standard errors, on the integral.
    pub fn z_score(&self, ln_integral_ref: T) -> T {
        let (a, b) = (self.ln_integral, ln_integral_ref);
        let diff = if a >= b { log_sub_exp(a, b) } else { log_sub_exp(b, a) };
        if diff == T::neg_infinity() {
            return T::zero();
        }
        (diff - self.ln_integral_se).exp()
    }
}

/// Width (in `ln t`) of the Monte-Carlo radial shells.
pub const SHELL_LOG_WIDTH: f64 = 0.5;
/// Minimum samples per stratum.
pub const MIN_STRATUM_SAMPLES: usize = 200;

struct Stratum<T> {
    ln_lo: T,
    ln_hi: T,
}

/// Result of [`radial_stratified_mc`], all in logs.
pub(crate) struct RadialMc<T> {
    pub ln_integral: T,
    pub ln_integral_se: T,
    pub strata: usize,
    pub samples: usize,
}

/// Stratified Monte-Carlo estimate of `∫_{B(0, e^{ln_top})} F dA` for an
/// integrand given as `ln F(ln t, φ)`.
///
/// The disc is cut into radial shells of log-width [`SHELL_LOG_WIDTH`] down
/// to `ln_floor`, plus a core disc. Samples are uniform in area inside each
/// stratum, and each stratum draws from its own ChaCha stream, so results are
/// bit-identical for a fixed seed whatever the thread count.
pub(crate) fn radial_stratified_mc<T: Real, F>(ln_top: T, ln_floor: T, sample_count: usize, seed: u64, ln_f: F) -> RadialMc<T>
where
    F: Fn(T, T) -> T + Sync,
{
    let width = T::c(SHELL_LOG_WIDTH);
    let n_shells = ((ln_top - ln_floor) / width).ceil().to_usize().unwrap_or(1).max(1);
    let mut strata: Vec<Stratum<T>> = (0..n_shells)
        .map(|k| Stratum {
            ln_hi: ln_top - width * T::c(k as f64),
            ln_lo: ln_top - width * T::c((k + 1) as f64),
        })
        .collect();
    strata.push(Stratum { ln_hi: ln_top - width * T::c(n_shells as f64), ln_lo: T::neg_infinity() });
    let per = (sample_count / strata.len()).max(MIN_STRATUM_SAMPLES);

    // per-stratum (ln contribution, ln variance of contribution)
    let parts: Vec<(T, T)> = strata
        .par_iter()
        .enumerate()
        .map(|(k, s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let rho = (T::two() * (s.ln_lo - s.ln_hi)).exp();
            let ln_vals: Vec<T> = (0..per)
                .map(|_| {
                    let u: T = T::c(rng.random::<f64>());
                    let phi: T = T::c(rng.random::<f64>()) * T::TAU();
                    let ln_t = s.ln_hi + T::half() * (rho + (T::one() - rho) * u).ln();
                    ln_f(ln_t, phi)
                })
                .collect();
            let m = ln_vals.iter().copied().fold(T::neg_infinity(), T::max);
            if m == T::neg_infinity() {
                return (m, m);
            }
            let nf = T::c(per as f64);
            let scaled: Vec<T> = ln_vals.iter().map(|&v| (v - m).exp()).collect();
            let mean = scaled.iter().fold(T::zero(), |a, &b| a + b) / nf;
            let var = scaled.iter().fold(T::zero(), |a, &b| a + (b - mean) * (b - mean)) / (nf - T::one());
            let ln_area = if s.ln_lo == T::neg_infinity() {
                T::PI().ln() + T::two() * s.ln_hi
            } else {
                T::PI().ln() + log_sub_exp(T::two() * s.ln_hi, T::two() * s.ln_lo)
            };
            let ln_c = ln_area + m + mean.ln();
            let ln_v = T::two() * (ln_area + m) + (var / nf).ln();
            (ln_c, ln_v)
        })
        .collect();
    let contributions: Vec<T> = parts.iter().map(|x| x.0).collect();
    let variances: Vec<T> = parts.iter().map(|x| x.1).collect();
    RadialMc {
        ln_integral: log_sum_exp(&contributions),
        ln_integral_se: T::half() * log_sum_exp(&variances),
        strata: strata.len(),
        samples: per * strata.len(),
    }
}

/// Stratified estimate of `(∫_{B(0,1)} K^p dA)^{1/p}`. Strata are radial
/// shells independent of the region table, so they straddle annulus edges.
pub fn distortion_lp_norm_mc<T: Real>(
    map: &PiecewiseRadialMap<T>,
    p: T,
    sample_count: usize,
    seed: u64,
) -> Result<McEstimate<T>> {
    if sample_count < 10_000 {
        return domain(format!("sample_count must be at least 10^4, got {sample_count}"));
    }
    if !(p.is_finite() && p >= T::one()) {
        return domain(format!("p must be finite and >= 1, got {p}"));
    }
    let floor = map.ln_boundaries().fold(T::zero(), T::min).min(T::c(-2.0)) - T::one();
    let mc = radial_stratified_mc(T::zero(), floor, sample_count, seed, |ln_t, _| {
        p * map.ln_distortion_at_radius(ln_t)
    });
    Ok(McEstimate::from_integral(p, mc))
}

impl<T: Real> McEstimate<T> {
    pub(crate) fn from_integral(p: T, mc: RadialMc<T>) -> Self {
        let ln_norm = mc.ln_integral / p;
        let ln_norm_se = ln_norm - p.ln() + mc.ln_integral_se - mc.ln_integral;
        Self {
            p,
            samples: mc.samples,
            strata: mc.strata,
            ln_integral: mc.ln_integral,
            ln_integral_se: mc.ln_integral_se,
            ln_norm,
            ln_norm_se,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{generate_schedule, GaugeSpec, Mode};
    use crate::map::compose_schedule;

    #[test]
    fn empty_plan_is_pi() {
        for p in [1.5_f64, 2.0, 4.0] {
            let plan = generate_schedule(p, 0, GaugeSpec::log_power(1.0), Mode::RotationOnly).unwrap();
            let n = distortion_lp_norm(&plan);
            assert!((n.norm() - std::f64::consts::PI.powf(1.0 / p)).abs() < 1e-14);
        }
    }

    #[test]
    fn unit_field_mc() {
        let m = PiecewiseRadialMap::<f64>::identity();
        let e = distortion_lp_norm_mc(&m, 2.0, 10_000, 7).unwrap();
        let want = std::f64::consts::PI.sqrt();
        assert!((e.norm() - want).abs() <= e.norm_se().max(1e-12 * want));
    }

    #[test]
    fn mc_is_deterministic() {
        let plan = generate_schedule(2.0_f64, 3, GaugeSpec::log_power(1.0), Mode::StretchRotation).unwrap();
        let m = compose_schedule(&plan).unwrap();
        let a = distortion_lp_norm_mc(&m, 2.0, 20_000, 99).unwrap();
        let b = distortion_lp_norm_mc(&m, 2.0, 20_000, 99).unwrap();
        assert_eq!(a, b);
        assert!(distortion_lp_norm_mc(&m, 2.0, 100, 1).is_err());
    }

    #[test]
    fn single_block_agrees_with_closed_form() {
        let plan = generate_schedule(2.0_f64, 1, GaugeSpec::log_power(1.0), Mode::StretchRotation).unwrap();
        let m = compose_schedule(&plan).unwrap();
        let exact = distortion_lp_norm(&plan);
        let mc = distortion_lp_norm_mc(&m, 2.0, 40_000, 3).unwrap();
        assert!(mc.z_score(exact.ln_integral) <= 3.0, "z = {}", mc.z_score(exact.ln_integral));
    }

    #[test]
    fn monotone_in_block_count() {
        let plan = generate_schedule(2.0_f64, 8, GaugeSpec::log_power(1.0), Mode::StretchRotation).unwrap();
        let mut last = f64::NEG_INFINITY;
        for n in 0..=8 {
            let v = distortion_lp_norm(&plan.truncated(n)).ln_norm;
            assert!(v >= last);
            last = v;
        }
    }
}
