//! Gauge functions `h` with `h(r) → 0` as `r → 0⁺`.
//!
//! All gauges are evaluated through `L = ln(1/r)`, so that radii far below
//! the floating point range remain usable. `h` is non-decreasing in `r`,
//! i.e. it shrinks as the radius does.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::Real;

/// One tabulated sample `(ln(1/r), h(r))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GaugeSample<T> {
    pub ln_inv_r: T,
    pub h: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", tag = "family", rename_all = "kebab-case")]
pub enum GaugeSpec<T> {
    /// `h(r) = min(1, (log 1/r)^{-s})`, `s = parameter > 0`.
    LogPower { parameter: T },
    /// `h(r) = r^ε`, `ε = parameter > 0`.
    Power { parameter: T },
    /// Monotone samples, interpolated linearly in `(ln(1/r), ln h)` and
    /// extrapolated along the last segment.
    Tabulated { samples: Vec<GaugeSample<T>> },
}

impl<T: Real> GaugeSpec<T> {
    pub fn log_power(s: T) -> Self {
        Self::LogPower { parameter: s }
    }

    pub fn power(eps: T) -> Self {
        Self::Power { parameter: eps }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::LogPower { parameter } | Self::Power { parameter } => {
                if !(parameter.is_finite() && *parameter > T::zero()) {
                    return domain(format!("gauge parameter must be positive and finite, got {parameter}"));
                }
            }
            Self::Tabulated { samples } => {
                if samples.len() < 2 {
                    return domain("tabulated gauge needs at least two samples");
                }
                for w in samples.windows(2) {
                    if !(w[0].ln_inv_r < w[1].ln_inv_r) {
                        return domain("tabulated gauge samples must have increasing ln(1/r)");
                    }
                    if w[1].h > w[0].h {
                        return domain("tabulated gauge must shrink as r decreases");
                    }
                }
                if samples.iter().any(|s| !(s.h > T::zero() && s.h <= T::one() && s.ln_inv_r.is_finite())) {
                    return domain("tabulated gauge values must lie in (0, 1]");
                }
                let n = samples.len();
                if !(samples[n - 1].h < samples[n - 2].h) {
                    return domain("tabulated gauge must strictly decrease on its last segment to reach 0");
                }
            }
        }
        Ok(())
    }

    /// `ln h(r)` at `ln_inv_r = ln(1/r)`.
    pub fn ln_h(&self, ln_inv_r: T) -> T {
        match self {
            Self::LogPower { parameter } => {
                if ln_inv_r <= T::one() {
                    T::zero()
                } else {
                    -*parameter * ln_inv_r.ln()
                }
            }
            Self::Power { parameter } => -*parameter * ln_inv_r,
            Self::Tabulated { samples } => {
                let i = samples.partition_point(|s| s.ln_inv_r < ln_inv_r);
                if i == 0 {
                    return samples[0].h.ln();
                }
                let (a, b) = if i >= samples.len() {
                    (samples[samples.len() - 2], samples[samples.len() - 1])
                } else {
                    (samples[i - 1], samples[i])
                };
                let w = (ln_inv_r - a.ln_inv_r) / (b.ln_inv_r - a.ln_inv_r);
                a.h.ln() + w * (b.h.ln() - a.h.ln())
            }
        }
    }

    pub fn h(&self, ln_inv_r: T) -> T {
        self.ln_h(ln_inv_r).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_power_values() {
        let g = GaugeSpec::log_power(1.0_f64);
        assert_eq!(g.h(0.5), 1.0);
        assert!((g.h(4.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn power_values() {
        let g = GaugeSpec::power(0.5_f64);
        // r = e^{-2}: h = e^{-1}
        assert!((g.ln_h(2.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn shrinks_with_radius() {
        for g in [GaugeSpec::log_power(0.25_f64), GaugeSpec::power(0.1)] {
            let mut last = f64::INFINITY;
            for k in 1..200 {
                let v = g.ln_h(k as f64 * 0.7);
                assert!(v <= last);
                last = v;
            }
            assert!(g.ln_h(1e6) < -1.0);
        }
    }

    #[test]
    fn tabulated_interpolates_and_extrapolates() {
        let g = GaugeSpec::Tabulated {
            samples: vec![
                GaugeSample { ln_inv_r: 1.0, h: 1.0 },
                GaugeSample { ln_inv_r: 3.0, h: 0.25 },
            ],
        };
        g.validate().unwrap();
        assert!((g.h(2.0_f64) - 0.5).abs() < 1e-15);
        assert!((g.h(5.0_f64) - 0.0625).abs() < 1e-15);
        assert_eq!(g.h(0.1), 1.0);
    }

    #[test]
    fn invalid_gauges() {
        assert!(GaugeSpec::log_power(0.0_f64).validate().is_err());
        assert!(GaugeSpec::power(f64::NAN).validate().is_err());
        let g = GaugeSpec::Tabulated {
            samples: vec![GaugeSample { ln_inv_r: 1.0, h: 0.5 }, GaugeSample { ln_inv_r: 2.0, h: 0.5 }],
        };
        assert!(g.validate().is_err());
    }

    #[test]
    fn serde_shape() {
        let g = GaugeSpec::log_power(0.25_f64);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"family":"log-power","parameter":0.25}"#);
        let back: GaugeSpec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}
