//! Empirical Hölder exponents from extremal difference quotients, and the
//! exact checks on the stretch factor `g`.

use std::io::Write;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::{Mode, SchedulePlan};
use crate::error::{domain, Error, Result};
use crate::map::{compose_schedule_part, Inverse, MapPart, PiecewiseRadialMap, PlanarMap, RegionKind};
use crate::rotation::theoretical_holder_below;
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// `|f(x) - f(y)| ≤ C |x - y|^β`: largest quotient per scale.
    Above,
    /// `|f(x) - f(y)| ≥ C |x - y|^β`: smallest quotient per scale.
    Below,
}

/// How pairs are drawn at each scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SamplerSpec<T> {
    pub random_pairs: usize,
    pub seed: u64,
    /// Directions scanned around each structured anchor.
    pub directions: usize,
    /// Golden-section iterations refining the best direction.
    pub refine_iters: usize,
    /// Radii (as `ln t`) where the map changes behaviour; structured pairs
    /// are anchored on them and between them.
    pub features: Vec<T>,
    /// Scales with fewer usable pairs are skipped.
    pub min_pairs: usize,
}

impl<T: Real> SamplerSpec<T> {
    pub fn new(seed: u64, features: Vec<T>) -> Self {
        Self { random_pairs: 2000, seed, directions: 64, refine_iters: 40, features, min_pairs: 16 }
    }

    /// Anchors on the region boundaries of a radial map.
    pub fn for_map(map: &PiecewiseRadialMap<T>, seed: u64) -> Self {
        Self::new(seed, map.ln_boundaries().collect())
    }

    /// Anchors on the images of the boundaries, for sampling the inverse.
    pub fn for_inverse(map: &PiecewiseRadialMap<T>, seed: u64) -> Self {
        Self::new(seed, map.ln_boundaries().map(|b| map.ln_radial_profile(b)).collect())
    }
}

/// `s_k = 0.1 · 2^{-k}`, `k = 0..count`.
pub fn dyadic_scales<T: Real>(count: usize) -> Vec<T> {
    (0..count).map(|k| T::c(0.1) * T::two().powi(-(k as i32))).collect()
}

/// A sampled pair: `|x - y|` and `|f(x) - f(y)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSample<T> {
    pub dx: T,
    pub df: T,
}

fn quotient<T: Real, M: PlanarMap<T> + ?Sized>(map: &M, x: Complex<T>, y: Complex<T>) -> Option<PairSample<T>> {
    let one = T::one();
    if x.norm() > one || y.norm() > one {
        return None;
    }
    let df = (map.apply(x) - map.apply(y)).norm();
    let dx = (x - y).norm();
    (df.is_finite() && dx > T::zero()).then_some(PairSample { dx, df })
}

/// Best direction around `x` at distance `d`: a scan over `n` directions
/// followed by golden-section refinement of the extremal bracket.
fn scan_anchor<T: Real, M: PlanarMap<T> + ?Sized>(
    map: &M,
    x: Complex<T>,
    d: T,
    side: Side,
    spec: &SamplerSpec<T>,
    out: &mut Vec<PairSample<T>>,
) {
    let n = spec.directions.max(4);
    let step = T::TAU() / T::c(n as f64);
    let score = |ps: &Option<PairSample<T>>| match (ps, side) {
        (Some(p), Side::Above) => p.df / p.dx,
        (Some(p), Side::Below) => -p.df / p.dx,
        (None, _) => T::neg_infinity(),
    };
    let at = |psi: T| quotient(map, x, x + Complex::from_polar(d, psi));
    let mut best = (T::neg_infinity(), T::zero());
    for k in 0..n {
        let psi = step * T::c(k as f64);
        let s = at(psi);
        let v = score(&s);
        if let Some(p) = s {
            out.push(p);
        }
        if v > best.0 {
            best = (v, psi);
        }
    }
    if best.0 == T::neg_infinity() {
        return;
    }
    let g = T::c(0.618_033_988_749_894_9);
    let (mut a, mut b) = (best.1 - step, best.1 + step);
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let (mut fc, mut fe) = (score(&at(c)), score(&at(e)));
    for _ in 0..spec.refine_iters {
        if fc > fe {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = score(&at(c));
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = score(&at(e));
        }
    }
    for psi in [c, e] {
        if let Some(p) = at(psi) {
            out.push(p);
        }
    }
}

/// All pairs drawn at scale `s` (distances in `[s, 2s)`), deterministic for
/// a given `(spec, stream)`.
pub fn sample_pairs<T: Real, M: PlanarMap<T> + ?Sized>(
    map: &M,
    spec: &SamplerSpec<T>,
    side: Side,
    scale: T,
    stream: u64,
) -> Vec<PairSample<T>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(stream);
    let ln_lo = scale.ln() - T::c(3.0);
    let mut draws = 0;
    while out.len() < spec.random_pairs && draws < 4 * spec.random_pairs {
        draws += 1;
        let rho = (ln_lo * T::c(rng.random::<f64>())).exp();
        let x = Complex::from_polar(rho, T::TAU() * T::c(rng.random::<f64>()));
        let d = scale * (T::one() + T::c(rng.random::<f64>()));
        let y = x + Complex::from_polar(d, T::TAU() * T::c(rng.random::<f64>()));
        if let Some(p) = quotient(map, x, y) {
            out.push(p);
        }
    }

    // structured anchors: on each feature radius, straddling it, just inside
    // it, and in the middle of each region, plus the origin
    let mut feats: Vec<T> = spec.features.iter().copied().filter(|b| b.exp() >= scale * T::c(0.125) && *b < T::zero()).collect();
    feats.sort_by(|a, b| a.partial_cmp(b).expect("finite features"));
    let mut radii = vec![T::zero()];
    for (i, &b) in feats.iter().enumerate() {
        let rho = b.exp();
        radii.push(rho);
        radii.push(rho / T::c(1.5));
        let next = feats.get(i + 1).copied().unwrap_or(T::zero());
        radii.push(((b + next) * T::half()).exp());
    }
    for d in [scale, scale * T::c(1.5), scale * T::c(1.999)] {
        for &rho in &radii {
            for x0 in [rho, rho - d * T::half(), rho - d] {
                if x0 >= T::zero() && x0 < T::one() {
                    scan_anchor(map, Complex::new(x0, T::zero()), d, side, spec, &mut out);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ScaleRow<T> {
    pub scale: T,
    /// Extremal `|f(x) - f(y)| / |x - y|` at this scale.
    pub quotient: T,
    /// Fitted `C s^{β-1}`.
    pub fitted: T,
    pub pairs: usize,
}

/// Power-law fit `|f(x) - f(y)| ≈ C |x - y|^β` of the extremal quotients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ExponentFit<T> {
    pub side: Side,
    pub exponent: T,
    pub constant: T,
    pub scale_range: (T, T),
    /// RMS residual of the log-log fit.
    pub residual: T,
    pub rows: Vec<ScaleRow<T>>,
    pub skipped_scales: Vec<T>,
}

impl<T: Real> ExponentFit<T> {
    /// CSV with header `scale,extremal_quotient,fitted`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let io = |e: csv::Error| Error::Domain(format!("csv output failed: {e}"));
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["scale", "extremal_quotient", "fitted"]).map_err(io)?;
        for r in &self.rows {
            wr.write_record([format!("{:e}", r.scale), format!("{:e}", r.quotient), format!("{:e}", r.fitted)])
                .map_err(io)?;
        }
        wr.flush().map_err(|e| Error::Domain(format!("csv output failed: {e}")))
    }
}

/// Several fits in one CSV, header `fit,side,scale,extremal_quotient,fitted`.
pub fn write_fit_table<T: Real, W: Write>(fits: &[(&str, &ExponentFit<T>)], w: W) -> Result<()> {
    let io = |e: csv::Error| Error::Domain(format!("csv output failed: {e}"));
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["fit", "side", "scale", "extremal_quotient", "fitted"]).map_err(io)?;
    for (name, fit) in fits {
        let side = match fit.side {
            Side::Above => "above",
            Side::Below => "below",
        };
        for r in &fit.rows {
            wr.write_record([
                name.to_string(),
                side.to_string(),
                format!("{:e}", r.scale),
                format!("{:e}", r.quotient),
                format!("{:e}", r.fitted),
            ])
            .map_err(io)?;
        }
    }
    wr.flush().map_err(|e| Error::Domain(format!("csv output failed: {e}")))
}

fn check_scales<T: Real>(scales: &[T]) -> Result<()> {
    if scales.iter().any(|&s| !(s > T::zero() && s <= T::c(0.1))) {
        return domain("scales must lie in (0, 0.1]");
    }
    let lo = scales.iter().copied().fold(T::infinity(), T::min);
    let hi = scales.iter().copied().fold(T::neg_infinity(), T::max);
    if !(hi >= T::c(4.0) * lo) {
        return domain("scales must span at least two dyadic steps");
    }
    Ok(())
}

fn extremal<T: Real>(pairs: &[PairSample<T>], side: Side) -> T {
    let q = pairs.iter().map(|p| p.df / p.dx);
    match side {
        Side::Above => q.fold(T::neg_infinity(), T::max),
        Side::Below => q.fold(T::infinity(), T::min),
    }
}

/// Least-squares fit of `ln Q(s)` against `ln s`; the exponent is one plus
/// the slope.
pub fn fit_exponent<T: Real, M: PlanarMap<T> + ?Sized>(
    map: &M,
    spec: &SamplerSpec<T>,
    side: Side,
    scales: &[T],
) -> Result<ExponentFit<T>> {
    check_scales(scales)?;
    let per_scale: Vec<(T, Vec<PairSample<T>>)> = scales
        .par_iter()
        .enumerate()
        .map(|(k, &s)| (s, sample_pairs(map, spec, side, s, k as u64)))
        .collect();
    fit_from_pairs(&per_scale, side, spec.min_pairs)
}

/// Fit from pre-sampled pairs, one list per scale.
pub fn fit_from_pairs<T: Real>(per_scale: &[(T, Vec<PairSample<T>>)], side: Side, min_pairs: usize) -> Result<ExponentFit<T>> {
    let mut pts = Vec::new();
    let mut skipped = Vec::new();
    for (s, pairs) in per_scale {
        let q = extremal(pairs, side);
        if pairs.len() < min_pairs || !(q > T::zero() && q.is_finite()) {
            log::warn!("scale {s}: {} usable pairs, skipped", pairs.len());
            skipped.push(*s);
        } else {
            pts.push((*s, q, pairs.len()));
        }
    }
    if pts.len() < 2 {
        return Err(Error::Degenerate(format!("only {} usable scales", pts.len())));
    }
    let nf = T::c(pts.len() as f64);
    let mx = pts.iter().fold(T::zero(), |a, p| a + p.0.ln()) / nf;
    let my = pts.iter().fold(T::zero(), |a, p| a + p.1.ln()) / nf;
    let sxx = pts.iter().fold(T::zero(), |a, p| a + (p.0.ln() - mx) * (p.0.ln() - mx));
    let sxy = pts.iter().fold(T::zero(), |a, p| a + (p.0.ln() - mx) * (p.1.ln() - my));
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss = pts.iter().fold(T::zero(), |a, p| {
        let e = p.1.ln() - (icpt + slope * p.0.ln());
        a + e * e
    });
    let rows = pts
        .iter()
        .map(|&(scale, quotient, pairs)| ScaleRow { scale, quotient, fitted: (icpt + slope * scale.ln()).exp(), pairs })
        .collect();
    let lo = pts.iter().map(|p| p.0).fold(T::infinity(), T::min);
    let hi = pts.iter().map(|p| p.0).fold(T::neg_infinity(), T::max);
    Ok(ExponentFit {
        side,
        exponent: T::one() + slope,
        constant: icpt.exp(),
        scale_range: (lo, hi),
        residual: (rss / nf).sqrt(),
        rows,
        skipped_scales: skipped,
    })
}

/// Extremal `|f(x) - f(y)| / |x - y|^β` over all pairs: the smallest
/// constant that makes the above bound hold, or the largest for below.
pub fn envelope_constant<T: Real>(per_scale: &[(T, Vec<PairSample<T>>)], exponent: T, side: Side) -> T {
    let it = per_scale.iter().flat_map(|(_, v)| v.iter()).map(|p| p.df / p.dx.powf(exponent));
    match side {
        Side::Above => it.fold(T::zero(), T::max),
        Side::Below => it.fold(T::infinity(), T::min),
    }
}

fn sample_all<T: Real, M: PlanarMap<T> + ?Sized>(
    map: &M,
    spec: &SamplerSpec<T>,
    side: Side,
    scales: &[T],
) -> Vec<(T, Vec<PairSample<T>>)> {
    scales
        .par_iter()
        .enumerate()
        .map(|(k, &s)| (s, sample_pairs(map, spec, side, s, k as u64)))
        .collect()
}

/// Block-level identities for `g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BlockDerivativeCheck<T> {
    pub n: usize,
    /// `ln λ_n` against `ln(e r_n²)` on the gap below `A_n`.
    pub ln_gap_slope: T,
    pub ln_gap_floor: T,
    /// `ln s'(r_n)` from the profile and from `λ_{n-1} q_n e^{-(q_n - 1)}`.
    pub ln_inner_edge_slope: T,
    pub ln_inner_edge_expected: T,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GBoundsReport<T> {
    pub above: ExponentFit<T>,
    /// `max |Δg| / |Δx|^{1/2}` over the sampled pairs.
    pub above_sqrt_constant: T,
    pub above_pass: bool,
    pub below: ExponentFit<T>,
    /// `min |Δg| / |Δx|³` over the sampled pairs.
    pub below_cubic_constant: T,
    pub below_pass: bool,
    /// `min s'(t)/t²` over the derivative grid.
    pub derivative_constant: T,
    pub derivative_grid: (T, T, usize),
    pub derivative_pass: bool,
    pub blocks: Vec<BlockDerivativeCheck<T>>,
    pub blocks_pass: bool,
    /// `|g(x) - g(w)| ≤ |x - w|` on sampled pairs of equal modulus.
    pub tangential_contraction: bool,
    pub pass: bool,
}

/// Settings shared by the Hölder checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct HolderCheckConfig<T> {
    pub seed: u64,
    pub scales: Vec<T>,
    pub random_pairs: usize,
    /// Smallest radius of the `s'(t)/t²` grid.
    pub grid_min: T,
    pub grid_points: usize,
}

impl<T: Real> Default for HolderCheckConfig<T> {
    fn default() -> Self {
        Self { seed: 0, scales: dyadic_scales(17), random_pairs: 2000, grid_min: T::c(1e-3), grid_points: 400 }
    }
}

/// Checks on the stretch factor `g` (all `α_n = 0`) of a stretch plan.
pub fn check_g_bounds<T: Real>(plan: &SchedulePlan<T>, cfg: &HolderCheckConfig<T>) -> Result<GBoundsReport<T>> {
    if plan.mode != Mode::StretchRotation {
        return domain("g bounds need a stretch-mode plan");
    }
    let g = compose_schedule_part(plan, MapPart::Stretch)?;
    let mut spec = SamplerSpec::for_map(&g, cfg.seed);
    spec.random_pairs = cfg.random_pairs;

    let above_pairs = sample_all(&g, &spec, Side::Above, &cfg.scales);
    let above = fit_from_pairs(&above_pairs, Side::Above, spec.min_pairs)?;
    let above_sqrt_constant = envelope_constant(&above_pairs, T::half(), Side::Above);
    let below_pairs = sample_all(&g, &spec, Side::Below, &cfg.scales);
    let below = fit_from_pairs(&below_pairs, Side::Below, spec.min_pairs)?;
    let below_cubic_constant = envelope_constant(&below_pairs, T::c(3.0), Side::Below);

    // s'(t)/t² on a log grid, region boundaries included
    let (lo, hi) = (cfg.grid_min.ln(), T::zero());
    let mut grid: Vec<T> = (0..cfg.grid_points)
        .map(|i| lo + (hi - lo) * T::c(i as f64) / T::c((cfg.grid_points.max(2) - 1) as f64))
        .collect();
    grid.extend(g.ln_boundaries().filter(|&b| b >= lo && b <= hi));
    let derivative_constant = grid
        .iter()
        .map(|&u| (g.ln_radial_derivative(u) - T::two() * u).exp())
        .fold(T::infinity(), T::min);

    let tol = T::c(1e-12);
    let mut blocks = Vec::new();
    let mut ln_lambda_prev = T::zero();
    for n in 1..=plan.n_blocks() {
        let Some(gap) = g.regions().iter().find(|r| r.kind == RegionKind::Gap(n)) else {
            continue;
        };
        let ln_r = plan.r[n - 1].ln();
        let q = plan.q_value(n);
        let ln_gap_floor = T::one() + T::two() * ln_r;
        let ln_inner_edge_slope = g.ln_radial_derivative(ln_r);
        let ln_inner_edge_expected = ln_lambda_prev + q.ln() - (q - T::one());
        let pass = gap.ln_lambda >= ln_gap_floor
            && (ln_inner_edge_slope - ln_inner_edge_expected).abs() <= tol * (T::one() + ln_inner_edge_expected.abs());
        blocks.push(BlockDerivativeCheck {
            n,
            ln_gap_slope: gap.ln_lambda,
            ln_gap_floor,
            ln_inner_edge_slope,
            ln_inner_edge_expected,
            pass,
        });
        ln_lambda_prev = gap.ln_lambda;
    }

    let mut tangential_contraction = true;
    for &b in g.ln_boundaries().chain(grid.iter().copied()).collect::<Vec<_>>().iter() {
        let t = b.exp();
        if !(t > T::zero() && t <= T::one()) {
            continue;
        }
        for k in 1..8 {
            let x = Complex::new(t, T::zero());
            let w = Complex::from_polar(t, T::c(k as f64 * 0.4));
            let (dg, dx) = ((g.apply(x) - g.apply(w)).norm(), (x - w).norm());
            if dg > dx * (T::one() + T::c(1e-12)) {
                tangential_contraction = false;
            }
        }
    }

    let above_pass = above.exponent >= T::c(0.45) && above.exponent <= T::c(0.55) && above_sqrt_constant.is_finite();
    let below_pass = below.exponent <= T::c(3.1) && below_cubic_constant > T::zero();
    let derivative_pass = derivative_constant > T::zero();
    let blocks_pass = blocks.iter().all(|b| b.pass);
    Ok(GBoundsReport {
        pass: above_pass && below_pass && derivative_pass && blocks_pass && tangential_contraction,
        above,
        above_sqrt_constant,
        above_pass,
        below,
        below_cubic_constant,
        below_pass,
        derivative_constant,
        derivative_grid: (cfg.grid_min, T::one(), grid.len()),
        derivative_pass,
        blocks,
        blocks_pass,
        tangential_contraction,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct InverseHolderReport<T> {
    pub forward_above: ExponentFit<T>,
    pub forward_below: ExponentFit<T>,
    pub inverse_above: ExponentFit<T>,
    /// Above fit of the inverse on the forward below-pairs, read backwards.
    pub inverse_above_transported: ExponentFit<T>,
    /// `forward_below.exponent · inverse_above_transported.exponent`,
    /// ideally 1.
    pub reciprocity: T,
    /// Exponent supplied by theory for the below bound.
    pub theory_below: T,
    /// `min |Δf| / |Δx|^{theory_below}` over the sampled pairs.
    pub below_constant: T,
    pub below_within_theory: bool,
}

/// Swap the roles of `|x - y|` and `|f(x) - f(y)|` (pairs of the inverse
/// at `(f(x), f(y))`), rebin into the same dyadic scales and fit from above.
pub fn transported_inverse_fit<T: Real>(per_scale: &[(T, Vec<PairSample<T>>)], min_pairs: usize) -> Result<ExponentFit<T>> {
    let swapped: Vec<PairSample<T>> = per_scale
        .iter()
        .flat_map(|(_, v)| v.iter())
        .map(|p| PairSample { dx: p.df, df: p.dx })
        .collect();
    let binned: Vec<(T, Vec<PairSample<T>>)> = per_scale
        .iter()
        .map(|&(s, _)| (s, swapped.iter().copied().filter(|p| p.dx >= s && p.dx < T::two() * s).collect()))
        .collect();
    fit_from_pairs(&binned, Side::Above, min_pairs)
}

/// Slack allowed above the theoretical below exponent.
pub const BELOW_EXPONENT_SLACK: f64 = 0.1;

pub fn check_inverse_holder<T: Real>(
    map: &PiecewiseRadialMap<T>,
    plan: &SchedulePlan<T>,
    cfg: &HolderCheckConfig<T>,
) -> Result<InverseHolderReport<T>> {
    let mut fwd = SamplerSpec::for_map(map, cfg.seed);
    fwd.random_pairs = cfg.random_pairs;
    let mut inv = SamplerSpec::for_inverse(map, cfg.seed);
    inv.random_pairs = cfg.random_pairs;
    let forward_above = fit_exponent(map, &fwd, Side::Above, &cfg.scales)?;
    let below_pairs = sample_all(map, &fwd, Side::Below, &cfg.scales);
    let forward_below = fit_from_pairs(&below_pairs, Side::Below, fwd.min_pairs)?;
    let inverse_above = fit_exponent(&Inverse(map), &inv, Side::Above, &cfg.scales)?;
    let inverse_above_transported = transported_inverse_fit(&below_pairs, fwd.min_pairs)?;
    let theory_below = theoretical_holder_below(plan.mode, plan.p);
    let below_constant = envelope_constant(&below_pairs, theory_below, Side::Below);
    Ok(InverseHolderReport {
        reciprocity: forward_below.exponent * inverse_above_transported.exponent,
        below_within_theory: forward_below.exponent <= theory_below + T::c(BELOW_EXPONENT_SLACK) && below_constant > T::zero(),
        forward_above,
        forward_below,
        inverse_above,
        inverse_above_transported,
        theory_below,
        below_constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::Identity;

    #[test]
    fn identity_fits_one() {
        let spec = SamplerSpec::new(1, vec![]);
        for side in [Side::Above, Side::Below] {
            let f = fit_exponent(&Identity, &spec, side, &dyadic_scales::<f64>(8)).unwrap();
            assert!((f.exponent - 1.0).abs() < 1e-9, "{side:?} {}", f.exponent);
            assert!(f.residual < 1e-9);
        }
    }

    #[test]
    fn power_map_exponent() {
        // radial |z|^{1/2} z/|z| is 1/2-Hölder at the origin
        let f = |z: Complex<f64>| if z.norm() == 0.0 { z } else { z / z.norm().sqrt() };
        let spec = SamplerSpec::new(2, vec![]);
        let fit = fit_exponent(&f, &spec, Side::Above, &dyadic_scales(12)).unwrap();
        assert!((fit.exponent - 0.5).abs() < 0.02, "{}", fit.exponent);
    }

    #[test]
    fn scale_validation() {
        let spec = SamplerSpec::new(1, vec![]);
        assert!(fit_exponent(&Identity, &spec, Side::Above, &[0.1_f64, 0.08]).is_err());
        assert!(fit_exponent(&Identity, &spec, Side::Above, &[0.5_f64, 0.01]).is_err());
    }

    #[test]
    fn csv_header() {
        let spec = SamplerSpec::new(1, vec![]);
        let f = fit_exponent(&Identity, &spec, Side::Above, &dyadic_scales::<f64>(4)).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("scale,extremal_quotient,fitted\n"));
        assert_eq!(s.lines().count(), 5);
        let mut buf = Vec::new();
        write_fit_table(&[("a", &f), ("b", &f)], &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("fit,side,scale,extremal_quotient,fitted\na,above,"));
        assert_eq!(s.lines().count(), 9);
    }
}
