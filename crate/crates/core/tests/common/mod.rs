//! Independent oracles shared by the integration tests. Nothing here calls
//! the closed-form region table: maps are rebuilt by applying each block in
//! turn with plain complex arithmetic.
#![allow(dead_code)]

use num_complex::Complex64;
use spiral_core::construction::{generate_schedule, GaugeSpec, Mode, SchedulePlan};

/// One block acting on the image annulus `[r', R']`.
#[derive(Debug, Clone, Copy)]
pub struct NaiveBlock {
    pub r: f64,
    pub big_r: f64,
    pub alpha: f64,
    pub q: f64,
}

impl NaiveBlock {
    /// `(ln|Δ modulus|, Δ argument)` that this block applies at image radius `t`.
    pub fn increments(&self, t: f64) -> (f64, f64) {
        if t >= self.big_r || t == 0.0 {
            return (0.0, 0.0);
        }
        let lr = (t.max(self.r) / self.big_r).ln();
        ((self.q - 1.0) * lr, self.alpha * lr)
    }

    pub fn apply(&self, w: Complex64) -> Complex64 {
        let (dm, da) = self.increments(w.norm());
        w * Complex64::from_polar(dm.exp(), da)
    }
}

/// Error-free sum `a + b = s + e`.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Compensated running sum.
#[derive(Default, Clone, Copy)]
struct Compensated {
    hi: f64,
    lo: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.hi, x);
        self.hi = s;
        self.lo += e;
    }

    fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

/// Plain iterated composition `φ_N ∘ … ∘ φ_1`, each block placed on the
/// image of its annulus under the blocks before it.
pub struct NaiveComposition {
    pub blocks: Vec<NaiveBlock>,
}

impl NaiveComposition {
    /// `rotation` keeps α and sets q = 1; `stretch` keeps q and sets α = 0.
    pub fn from_plan(plan: &SchedulePlan<f64>, keep_alpha: bool, keep_q: bool) -> Self {
        let mut blocks: Vec<NaiveBlock> = Vec::new();
        for n in 1..=plan.n_blocks() {
            let r = plan.r[n - 1].value();
            let big_r = plan.big_r[n - 1].value();
            let prev = NaiveComposition { blocks: blocks.clone() };
            blocks.push(NaiveBlock {
                r: prev.apply(Complex64::new(r, 0.0)).norm(),
                big_r: prev.apply(Complex64::new(big_r, 0.0)).norm(),
                alpha: if keep_alpha { plan.alpha[n - 1].value() } else { 0.0 },
                q: if keep_q { plan.q[n - 1].value() } else { 1.0 },
            });
        }
        Self { blocks }
    }

    pub fn full(plan: &SchedulePlan<f64>) -> Self {
        Self::from_plan(plan, true, true)
    }

    /// Blocks applied in turn; the argument is kept as a compensated real
    /// sum so that large total rotations cost one final rounding.
    pub fn apply(&self, z: Complex64) -> Complex64 {
        let mut m = z.norm();
        if m == 0.0 {
            return z;
        }
        let mut arg = Compensated::default();
        arg.add(z.arg());
        for b in &self.blocks {
            let (dm, da) = b.increments(m);
            m *= dm.exp();
            arg.add(da);
        }
        Complex64::from_polar(m, arg.value())
    }
}

/// Plans whose total rotation stays small enough (|a| ≲ 10³) for phases to
/// be compared at 1e-12 in double precision.
pub fn moderate_plans() -> Vec<(String, SchedulePlan<f64>)> {
    let mut out = Vec::new();
    for p in [2.0, 4.0] {
        let plan = generate_schedule(p, 12, GaugeSpec::log_power(1.0), Mode::RotationOnly).unwrap();
        out.push((format!("rotation p={p} N=12"), plan));
    }
    for (p, n) in [(2.0, 4), (4.0, 5)] {
        let plan = generate_schedule(p, n, GaugeSpec::log_power(1.0), Mode::StretchRotation).unwrap();
        out.push((format!("stretch p={p} N={n}"), plan));
    }
    out
}

/// Stretch plans for the integrability and sharpness checks.
pub fn stretch_plans(n: usize) -> Vec<(f64, SchedulePlan<f64>)> {
    [1.5, 2.0, 4.0]
        .into_iter()
        .map(|p| (p, generate_schedule(p, n, GaugeSpec::log_power(0.25), Mode::StretchRotation).unwrap()))
        .collect()
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Composite Gauss–Legendre quadrature of `f` on `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + h * k as f64;
            rule.iter().map(|&(x, w)| w * f(lo + 0.5 * h * (x + 1.0))).sum::<f64>() * 0.5 * h
        })
        .sum()
}

/// Ball radii `2^j z0` of the chain, built by doubling independently.
pub fn chain_radii(z0: f64) -> Vec<f64> {
    let mut v = vec![z0];
    while *v.last().unwrap() < 1.0 {
        let c = v.last().unwrap() * 2.0;
        v.push(c);
    }
    v
}

/// `∫ ρ₀^k dA` in polar coordinates about the origin: the ray at angle φ
/// leaves `B(c, c)` at `2c cos φ`, so the radial part is exact and φ is
/// integrated numerically.
pub fn rho_power_quadrature(z0: f64, k: f64) -> f64 {
    let radii = chain_radii(z0);
    let rule = gauss_legendre(32);
    let half_pi = std::f64::consts::FRAC_PI_2;
    integrate(
        |phi| {
            let mut prev = 0.0;
            let mut acc = 0.0;
            for &c in &radii {
                let t = 2.0 * c * phi.cos();
                acc += (2.0 / c).powf(k) * 0.5 * (t * t - prev * prev);
                prev = t;
            }
            acc
        },
        -half_pi,
        half_pi,
        8,
        &rule,
    )
}

/// `∫ K ρ₀² dA` by the same polar scheme, with `K` supplied per radius band
/// as `(t_lo, t_hi, K)`.
pub fn weighted_rho_quadrature(z0: f64, bands: &[(f64, f64, f64)], panels: usize) -> f64 {
    let radii = chain_radii(z0);
    let rule = gauss_legendre(20);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let radial = |a: f64, b: f64| -> f64 {
        // ∫_a^b K(t) t dt
        bands
            .iter()
            .map(|&(lo, hi, k)| {
                let (x, y) = (lo.max(a), hi.min(b));
                if y > x { k * 0.5 * (y * y - x * x) } else { 0.0 }
            })
            .sum()
    };
    integrate(
        |phi| {
            let mut prev = 0.0;
            let mut acc = 0.0;
            for &c in &radii {
                let t = 2.0 * c * phi.cos();
                acc += (2.0 / c).powi(2) * radial(prev, t);
                prev = t;
            }
            acc
        },
        -half_pi,
        half_pi,
        panels,
        &rule,
    )
}
