//! Partial sums of the integrability series attached to a plan.

use serde::{Deserialize, Serialize};

use super::schedule::{Mode, SchedulePlan};
use crate::logspace::{log_sub_exp, log_sum_exp, Reported};
use crate::map::ln_block_distortion;
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Last-term ratio below 1.
    Convergent,
    /// Ratio at least 1, or fewer than two terms.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SeriesSummary<T> {
    pub name: String,
    pub description: String,
    pub terms: Vec<Reported<T>>,
    pub partial_sums: Vec<Reported<T>>,
    /// `term_N / term_{N-1}`.
    pub tail_ratio: Option<T>,
    /// Geometric tail estimate `term_N ρ / (1 - ρ)` when `ρ < 1`.
    pub tail_bound: Option<Reported<T>>,
    pub verdict: Verdict,
    /// Partial sums of a dominating comparison series, when one exists.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub comparison_partial_sums: Option<Vec<Reported<T>>>,
}

impl<T: Real> SeriesSummary<T> {
    fn from_ln_terms(name: &str, description: &str, ln_terms: Vec<T>) -> Self {
        let mut partial = Vec::with_capacity(ln_terms.len());
        for k in 1..=ln_terms.len() {
            partial.push(Reported::from_ln(log_sum_exp(&ln_terms[..k])));
        }
        let n = ln_terms.len();
        let tail_ratio = (n >= 2).then(|| (ln_terms[n - 1] - ln_terms[n - 2]).exp());
        let (verdict, tail_bound) = match tail_ratio {
            Some(rho) if rho < T::one() => {
                let ln_tail = ln_terms[n - 1] + rho.ln() - (-rho).ln_1p();
                (Verdict::Convergent, Some(Reported::from_ln(ln_tail)))
            }
            _ => (Verdict::Inconclusive, None),
        };
        Self {
            name: name.into(),
            description: description.into(),
            terms: ln_terms.into_iter().map(Reported::from_ln).collect(),
            partial_sums: partial,
            tail_ratio,
            tail_bound,
            verdict,
            comparison_partial_sums: None,
        }
    }

    pub fn ln_partial_sum(&self) -> Option<T> {
        self.partial_sums.last().map(|r| r.log_value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ConvergenceReport<T> {
    pub n_blocks: usize,
    pub series: Vec<SeriesSummary<T>>,
}

impl<T: Real> ConvergenceReport<T> {
    pub fn get(&self, name: &str) -> Option<&SeriesSummary<T>> {
        self.series.iter().find(|s| s.name == name)
    }
}

/// `ln |A_n| = ln π(R_n² - r_n²)`.
pub fn ln_annulus_area<T: Real>(plan: &SchedulePlan<T>, n: usize) -> T {
    let two = T::two();
    T::PI().ln() + log_sub_exp(two * plan.big_r[n - 1].ln(), two * plan.r[n - 1].ln())
}

/// `ln K_n` for block `n` of the plan.
pub fn ln_block_distortion_of<T: Real>(plan: &SchedulePlan<T>, n: usize) -> T {
    ln_block_distortion(plan.q_value(n), plan.ln_alpha(n))
}

/// Series names produced by [`series_report`].
pub mod names {
    pub const DF_L1: &str = "df_l1";
    pub const K_LP: &str = "k_lp";
    pub const DF_L1_GENERAL: &str = "df_l1_general";
    pub const K_LP_GENERAL: &str = "k_lp_general";
    pub const GAUGE: &str = "gauge";
    pub const DISTORTION_LP: &str = "distortion_lp";
}

pub fn series_report<T: Real>(plan: &SchedulePlan<T>) -> ConvergenceReport<T> {
    let p = plan.p;
    let two = T::two();
    let n_blocks = plan.n_blocks();
    let ns = 1..=n_blocks;
    let area: Vec<T> = ns.clone().map(|n| ln_annulus_area(plan, n)).collect();
    let ln_alpha: Vec<T> = ns.clone().map(|n| plan.ln_alpha(n)).collect();
    let mut series = Vec::new();
    match plan.mode {
        Mode::RotationOnly => {
            series.push(SeriesSummary::from_ln_terms(
                names::DF_L1,
                "sum alpha_n r_n^2",
                ns.clone().map(|n| ln_alpha[n - 1] + two * plan.r[n - 1].ln()).collect(),
            ));
            series.push(SeriesSummary::from_ln_terms(
                names::K_LP,
                "sum |A_n| (4 alpha_n^2)^p",
                ns.clone()
                    .map(|n| area[n - 1] + p * (T::c(4.0).ln() + two * ln_alpha[n - 1]))
                    .collect(),
            ));
        }
        Mode::StretchRotation => {
            series.push(SeriesSummary::from_ln_terms(
                names::DF_L1_GENERAL,
                "sum |A_n| alpha_n",
                ns.clone().map(|n| area[n - 1] + ln_alpha[n - 1]).collect(),
            ));
            series.push(SeriesSummary::from_ln_terms(
                names::K_LP_GENERAL,
                "sum |A_n| alpha_n^{2p} / q_n^p",
                ns.clone()
                    .map(|n| area[n - 1] + two * p * ln_alpha[n - 1] - p * plan.q[n - 1].ln())
                    .collect(),
            ));
        }
    }
    let mut gauge = SeriesSummary::from_ln_terms(
        names::GAUGE,
        "sum h(r_n)^{2p}",
        ns.clone().map(|n| two * p * plan.gauge.ln_h(plan.ln_inv_r(n))).collect(),
    );
    let cmp: Vec<T> = ns.clone().map(|n| -p * T::c(n as f64).ln()).collect();
    gauge.comparison_partial_sums = Some(
        (1..=n_blocks)
            .map(|k| Reported::from_ln(log_sum_exp(&cmp[..k])))
            .collect(),
    );
    series.push(gauge);
    series.push(SeriesSummary::from_ln_terms(
        names::DISTORTION_LP,
        "sum |A_n| K_n^p",
        ns.map(|n| area[n - 1] + p * ln_block_distortion_of(plan, n)).collect(),
    ));
    ConvergenceReport { n_blocks, series }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{generate_schedule, GaugeSpec};

    #[test]
    fn single_term() {
        let plan = generate_schedule(2.0_f64, 1, GaugeSpec::log_power(1.0), Mode::StretchRotation).unwrap();
        let rep = series_report(&plan);
        for s in &rep.series {
            assert_eq!(s.partial_sums.len(), 1);
            assert_eq!(s.partial_sums[0].log_value, s.terms[0].log_value);
            assert_eq!(s.verdict, Verdict::Inconclusive);
        }
    }

    #[test]
    fn gauge_partial_sums_dominated() {
        let plan = generate_schedule(2.0_f64, 12, GaugeSpec::log_power(1.0), Mode::RotationOnly).unwrap();
        let rep = series_report(&plan);
        let g = rep.get(names::GAUGE).unwrap();
        let cmp = g.comparison_partial_sums.as_ref().unwrap();
        for (a, b) in g.partial_sums.iter().zip(cmp) {
            assert!(a.log_value < b.log_value);
        }
    }

    #[test]
    fn stretch_k_lp_general_closed_form() {
        let p = 2.0_f64;
        let plan = generate_schedule(p, 6, GaugeSpec::log_power(1.0), Mode::StretchRotation).unwrap();
        let rep = series_report(&plan);
        let s = rep.get(names::K_LP_GENERAL).unwrap();
        let e2 = std::f64::consts::E.powi(2);
        for n in 1..=6 {
            let r = plan.r[n - 1].value();
            let area = std::f64::consts::PI * r * r * (e2 - 1.0);
            let l = plan.ln_inv_r(n);
            let ln_alpha = plan.ln_alpha(n);
            let ln_term = area.ln() + 2.0 * p * ln_alpha - p * l.ln();
            assert!((s.terms[n - 1].log_value - ln_term).abs() < 1e-10 * (1.0 + ln_term.abs()));
        }
    }

    #[test]
    fn partial_sums_monotone() {
        let plan = generate_schedule(1.5_f64, 12, GaugeSpec::log_power(0.25), Mode::StretchRotation).unwrap();
        for s in series_report(&plan).series {
            for w in s.partial_sums.windows(2) {
                assert!(w[1].log_value >= w[0].log_value);
            }
        }
    }
}
