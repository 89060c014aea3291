//! Structural invariants checked over randomly drawn plans and points.

use num_complex::Complex64;
use proptest::prelude::*;
use spiral_core::construction::{check_feasibility, generate_schedule, GaugeSpec, Mode, SchedulePlan};
use spiral_core::map::{compose_schedule, PiecewiseRadialMap};
use spiral_core::modulus::modulus_lower_from_winding;
use spiral_core::rotation::{continuous_arg, sharpness_check, winding_count, TrackerConfig};
use std::f64::consts::PI;

/// Rotation plans of any length, and stretch plans short enough that the
/// accumulated phase stays well inside the 1e-12 tolerances below.
fn plan_strategy() -> impl Strategy<Value = SchedulePlan<f64>> {
    (1.2..6.0_f64, 0.5..2.0_f64, any::<bool>(), 0usize..=12).prop_map(|(p, s, stretch, n)| {
        let (mode, n) = if stretch { (Mode::StretchRotation, n.min(4)) } else { (Mode::RotationOnly, n) };
        generate_schedule(p, n, GaugeSpec::log_power(s), mode).unwrap()
    })
}

fn deepest(plan: &SchedulePlan<f64>) -> f64 {
    plan.r.last().map_or(-1.0, |r| r.ln()) - 1.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_plans_are_feasible(plan in plan_strategy()) {
        for c in check_feasibility(&plan) {
            prop_assert!(c.passed, "{} failed (slack {})", c.name, c.slack);
        }
        for n in 1..plan.n_blocks() {
            prop_assert!(plan.r[n].ln() < plan.r[n - 1].ln() - (2.0 * std::f64::consts::E).ln());
        }
    }

    #[test]
    fn modulus_profile_is_increasing_and_contracting(plan in plan_strategy(), k in 2usize..400) {
        let map = compose_schedule(&plan).unwrap();
        let lo = deepest(&plan);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=k {
            let u = lo * (1.0 - i as f64 / k as f64);
            let s = map.ln_radial_profile(u);
            prop_assert!(s > prev);
            prop_assert!(s <= u + 1e-12 * (1.0 + u.abs()));
            prev = s;
        }
        prop_assert_eq!(map.ln_radial_profile(0.0), 0.0);
    }

    #[test]
    fn inverse_undoes_the_map(plan in plan_strategy(), x in 0.0..1.0_f64, theta in -PI..PI) {
        let map = compose_schedule(&plan).unwrap();
        let z = Complex64::from_polar((deepest(&plan) * x).exp(), theta);
        let back = map.inverse_eval(map.eval(z).unwrap()).unwrap();
        prop_assert!((back - z).norm() <= 1e-12 * z.norm(), "{} vs {}", back, z);
    }

    #[test]
    fn winding_is_the_same_on_every_ray(plan in plan_strategy(), x in 0.05..1.0_f64) {
        let map = compose_schedule(&plan).unwrap();
        let t = (deepest(&plan) * x).exp();
        let cfg = TrackerConfig::default();
        let first = winding_count(&map, Complex64::new(t, 0.0), &cfg).unwrap();
        for k in 1..16 {
            let z = Complex64::from_polar(t, 2.0 * PI * k as f64 / 16.0);
            prop_assert_eq!(winding_count(&map, z, &cfg).unwrap(), first);
        }
    }

    #[test]
    fn lift_only_turns_one_way(plan in plan_strategy(), theta in -PI..PI) {
        let map = compose_schedule(&plan).unwrap();
        let lo = deepest(&plan);
        let checkpoints: Vec<f64> = (1..60).map(|i| lo * i as f64 / 60.0).collect();
        let prof = continuous_arg(&map, theta, 0.0, lo, &checkpoints, plan.p, 1.0, &TrackerConfig::default()).unwrap();
        for w in prof.samples.windows(2) {
            prop_assert!(w[1].ln_t < w[0].ln_t);
            let step = w[1].unwrapped_arg - w[0].unwrapped_arg;
            prop_assert!(step <= 1e-12 * (1.0 + w[0].unwrapped_arg.abs()));
        }
    }

    #[test]
    fn sharpness_holds_for_generated_plans(plan in plan_strategy()) {
        for row in sharpness_check(&plan) {
            prop_assert!(row.pass, "n = {}", row.n);
        }
    }

    #[test]
    fn plan_and_map_survive_json(plan in plan_strategy()) {
        let text = serde_json::to_string(&plan).unwrap();
        let back: SchedulePlan<f64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &plan);
        let map = compose_schedule(&plan).unwrap();
        let text = serde_json::to_string(&map).unwrap();
        let back: PiecewiseRadialMap<f64> = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, map);
    }

    #[test]
    fn distortion_at_least_one_and_jacobian_positive(plan in plan_strategy(), x in 0.0..1.0_f64, theta in -PI..PI) {
        let map = compose_schedule(&plan).unwrap();
        let z = Complex64::from_polar((deepest(&plan) * x).exp(), theta);
        if let (Ok(k), Ok(j)) = (map.distortion(z), map.jacobian(z)) {
            prop_assert!(k >= 1.0);
            prop_assert!(j > 0.0);
        }
        prop_assert!(map.ln_distortion_at_radius(z.norm().ln()) >= 0.0);
    }

    #[test]
    fn lower_bound_scales_with_n_squared(n in 1u64..10_000, ratio in 1.001..1e6_f64) {
        let a = modulus_lower_from_winding(n, ratio, 1.0).unwrap();
        let b = modulus_lower_from_winding(2 * n, ratio, 1.0).unwrap();
        prop_assert!((b - 4.0 * a).abs() <= 1e-12 * b);
    }
}
