use crate::config::{LiftMode, RunConfig, AUTO_TRACK_LIMIT};
use anyhow::{bail, Context};
use log::{info, warn};
use serde::Serialize;
use spiral_core::construction::{
    check_feasibility, distortion_lp_norm, distortion_lp_norm_mc, series_report, ConstraintCheck, ConvergenceReport,
    LpNorm, McEstimate, Mode, SchedulePlan, Verdict,
};
use spiral_core::holder::{
    check_g_bounds, check_inverse_holder, dyadic_scales, fit_exponent, write_fit_table, ExponentFit, GBoundsReport,
    HolderCheckConfig, InverseHolderReport, SamplerSpec, Side,
};
use spiral_core::map::{compose_schedule, compose_schedule_part, MapPart, PiecewiseRadialMap};
use spiral_core::modulus::{verify_bound_chain, ModulusBounds};
use spiral_core::rotation::{
    analytic_arg, continuous_arg, sharpness_check, theorem1_ratio_sequence, theoretical_holder_below, RotationProfile,
    SharpnessRow, TrackerConfig, tracking_cost,
};
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Where reports go and in which format.
pub struct Output {
    pub dir: PathBuf,
    pub format: Option<Format>,
}

impl Output {
    fn create(&self, name: &str) -> anyhow::Result<BufWriter<File>> {
        fs::create_dir_all(&self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        let path = self.dir.join(name);
        info!("writing {}", path.display());
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(BufWriter::new(f))
    }

    fn json<S: Serialize>(&self, name: &str, value: &S) -> anyhow::Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    fn json_only(&self, command: &str) -> anyhow::Result<()> {
        if self.format == Some(Format::Csv) {
            bail!("{command} writes JSON only");
        }
        Ok(())
    }
}

fn composed(plan: &SchedulePlan<f64>) -> anyhow::Result<PiecewiseRadialMap<f64>> {
    compose_schedule(plan).context("composing the plan")
}

fn alpha_below(cfg: &RunConfig, plan: &SchedulePlan<f64>) -> f64 {
    cfg.alpha_below.unwrap_or_else(|| theoretical_holder_below(plan.mode, plan.p))
}

#[derive(Serialize)]
struct BuildReport<'a> {
    n_blocks: usize,
    feasibility: &'a [ConstraintCheck<f64>],
    pass: bool,
}

pub fn build(cfg: &RunConfig, out: &Output) -> anyhow::Result<bool> {
    out.json_only("build")?;
    let plan = cfg.plan()?;
    let checks = check_feasibility(&plan);
    for c in checks.iter().filter(|c| !c.passed) {
        eprintln!("constraint `{}` failed ({}), worst block {:?}", c.name, c.description, c.worst_block);
    }
    let pass = checks.iter().all(|c| c.passed);
    out.json("plan.json", &plan)?;
    if pass {
        out.json("map.json", &composed(&plan)?)?;
    }
    out.json("feasibility.json", &BuildReport { n_blocks: plan.n_blocks(), feasibility: &checks, pass })?;
    println!("build: {} blocks, feasibility {}", plan.n_blocks(), verdict(pass));
    Ok(pass)
}

/// Block radii plus a log-spaced grid down to just below the deepest block.
fn profile_radii(plan: &SchedulePlan<f64>, points: usize) -> (f64, Vec<f64>) {
    let end = plan.r.last().map_or(1e-3_f64.ln(), |r| r.ln() - 1.0);
    let mut radii: Vec<f64> = (1..points).map(|i| end * i as f64 / (points - 1) as f64).collect();
    radii.extend(plan.r.iter().map(|r| r.ln()));
    (end, radii)
}

pub fn rotation_profile(cfg: &RunConfig, out: &Output) -> anyhow::Result<bool> {
    let plan = cfg.plan()?;
    let map = match cfg.map_override()? {
        Some(m) => m,
        None => composed(&plan)?,
    };
    let (end, radii) = profile_radii(&plan, cfg.grid_points);
    let end = end.min(map.ln_boundaries().fold(0.0, f64::min) - 1.0);
    let (p, alpha) = (plan.p, alpha_below(cfg, &plan));
    let tcfg = TrackerConfig::default();
    let cost = tracking_cost(&map, end, 0.0, &tcfg);
    let tracked = match cfg.lift {
        LiftMode::Tracked => true,
        LiftMode::Analytic => false,
        LiftMode::Auto => cost <= AUTO_TRACK_LIMIT,
    };
    let prof: RotationProfile<f64> = if tracked {
        continuous_arg(&map, cfg.theta, 0.0, end, &radii, p, alpha, &tcfg)?
    } else {
        if cfg.lift == LiftMode::Auto {
            warn!("tracking would take about {cost:.1e} steps; using the closed-form lift");
        }
        analytic_arg(&map, cfg.theta, 0.0, end, &radii, p, alpha)?
    };
    match out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = out.create("rotation_profile.csv")?;
            prof.write_csv(&mut w)?;
            w.flush()?;
        }
        Format::Json => out.json("rotation_profile.json", &prof)?,
    }
    let max_ratio = prof.samples.iter().filter_map(|s| s.ratio).fold(0.0, f64::max);
    println!(
        "rotation-profile: {} samples ({} lift), largest ratio {max_ratio:.4}",
        prof.samples.len(),
        if tracked { "tracked" } else { "closed-form" }
    );
    Ok(true)
}

#[derive(Serialize)]
struct DistortionReport {
    p: f64,
    n_blocks: usize,
    seed: u64,
    analytic: LpNorm<f64>,
    monte_carlo: McEstimate<f64>,
    /// Distance of the estimate from the closed form in standard errors.
    z_score: f64,
    series: ConvergenceReport<f64>,
    pass: bool,
}

pub fn distortion_report(cfg: &RunConfig, out: &Output) -> anyhow::Result<bool> {
    out.json_only("distortion-report")?;
    let seed = cfg.require_seed()?;
    let plan = cfg.plan()?;
    let map = composed(&plan)?;
    let analytic = distortion_lp_norm(&plan);
    let mc = distortion_lp_norm_mc(&map, plan.p, cfg.samples, seed)?;
    let z_score = mc.z_score(analytic.ln_integral);
    let series = series_report(&plan);
    let convergent = plan.n_blocks() < 2 || series.series.iter().all(|s| s.verdict == Verdict::Convergent);
    let pass = convergent && z_score <= 3.0;
    println!(
        "distortion-report: analytic {:.6}, Monte-Carlo {:.6} ({z_score:.2} SE), series {}",
        analytic.norm(),
        mc.norm(),
        if convergent { "convergent" } else { "inconclusive" }
    );
    out.json(
        "distortion_report.json",
        &DistortionReport { p: plan.p, n_blocks: plan.n_blocks(), seed, analytic, monte_carlo: mc, z_score, series, pass },
    )?;
    Ok(pass)
}

/// `count` log-spaced points strictly inside `(r_N, r_1)`, or inside
/// `(1e-3, 1/2)` for an empty plan.
fn default_z0(plan: &SchedulePlan<f64>, count: usize) -> Vec<f64> {
    let (lo, hi) = match (plan.r.first(), plan.r.last()) {
        (Some(a), Some(b)) if plan.n_blocks() >= 2 => (b.ln(), a.ln()),
        (Some(a), _) => (a.ln() - 2.0, a.ln()),
        _ => (1e-3_f64.ln(), 0.5_f64.ln()),
    };
    (1..=count).map(|i| (lo + (hi - lo) * i as f64 / (count + 1) as f64).exp()).collect()
}

#[derive(Serialize)]
struct ModulusReport {
    p: f64,
    alpha_below: f64,
    results: Vec<ModulusBounds<f64>>,
    pass: bool,
}

pub fn modulus_check(cfg: &RunConfig, out: &Output) -> anyhow::Result<bool> {
    out.json_only("modulus-check")?;
    let plan = cfg.plan()?;
    let map = composed(&plan)?;
    let alpha = alpha_below(cfg, &plan);
    let z0 = if cfg.z0.is_empty() { default_z0(&plan, cfg.z0_count) } else { cfg.z0.clone() };
    let results = z0
        .iter()
        .map(|&z| verify_bound_chain(&map, &plan, z, alpha))
        .collect::<Result<Vec<_>, _>>()?;
    let failed = results.iter().filter(|b| !b.holds).count();
    let pass = failed == 0;
    println!("modulus-check: {} base points, {failed} failed", results.len());
    out.json("modulus_check.json", &ModulusReport { p: plan.p, alpha_below: alpha, results, pass })?;
    Ok(pass)
}

#[derive(Serialize)]
struct HolderSummary {
    p: f64,
    mode: Mode,
    seed: u64,
    /// Above fit of the spiral factor `f`, against `1 - 1/p - 0.05`.
    rotation_above: ExponentFit<f64>,
    rotation_above_floor: f64,
    inverse: InverseHolderReport<f64>,
    /// Present for stretch plans.
    g_bounds: Option<GBoundsReport<f64>>,
    pass: bool,
}

pub fn holder_fit(cfg: &RunConfig, out: &Output) -> anyhow::Result<bool> {
    let seed = cfg.require_seed()?;
    let plan = cfg.plan()?;
    let map = composed(&plan)?;
    let hcfg = HolderCheckConfig {
        seed,
        scales: dyadic_scales(cfg.scale_count),
        random_pairs: cfg.random_pairs,
        ..HolderCheckConfig::default()
    };
    let f = compose_schedule_part(&plan, MapPart::Rotation)?;
    let mut spec = SamplerSpec::for_map(&f, seed);
    spec.random_pairs = cfg.random_pairs;
    let rotation_above = fit_exponent(&f, &spec, Side::Above, &hcfg.scales)?;
    let floor = if plan.n_blocks() == 0 { 0.99 } else { 1.0 - 1.0 / plan.p - 0.05 };
    let inverse = check_inverse_holder(&map, &plan, &hcfg)?;
    let g_bounds = match plan.mode {
        Mode::StretchRotation if plan.n_blocks() > 0 => Some(check_g_bounds(&plan, &hcfg)?),
        _ => None,
    };
    let pass = rotation_above.exponent >= floor
        && inverse.below_within_theory
        && g_bounds.as_ref().is_none_or(|g| g.pass);

    let mut fits: Vec<(&str, &ExponentFit<f64>)> = vec![
        ("rotation_above", &rotation_above),
        ("map_above", &inverse.forward_above),
        ("map_below", &inverse.forward_below),
        ("inverse_above", &inverse.inverse_above),
    ];
    if let Some(g) = &g_bounds {
        fits.push(("g_above", &g.above));
        fits.push(("g_below", &g.below));
    }
    if out.format != Some(Format::Json) {
        let mut w = out.create("holder_fit.csv")?;
        write_fit_table(&fits, &mut w)?;
        w.flush()?;
    }
    println!(
        "holder-fit: f above {:.4} (floor {floor:.4}), map below {:.4} (theory {:.4}){}",
        rotation_above.exponent,
        inverse.forward_below.exponent,
        inverse.theory_below,
        g_bounds
            .as_ref()
            .map(|g| format!(", g above {:.4}, g below {:.4}", g.above.exponent, g.below.exponent))
            .unwrap_or_default()
    );
    out.json(
        "holder_fit.json",
        &HolderSummary {
            p: plan.p,
            mode: plan.mode,
            seed,
            rotation_above,
            rotation_above_floor: floor,
            inverse,
            g_bounds,
            pass,
        },
    )?;
    Ok(pass)
}

#[derive(Serialize)]
struct SharpnessReport {
    p: f64,
    mode: Mode,
    rows: Vec<SharpnessRow<f64>>,
    alpha_below: f64,
    /// `Σ_{j≤n} α_j / (√α r_n^{-1/p} log^{1/2}(1/r_n))` for each `n`.
    theorem1_ratios: Vec<f64>,
    pass: bool,
}

pub fn sharpness(cfg: &RunConfig, out: &Output) -> anyhow::Result<bool> {
    out.json_only("sharpness")?;
    let plan = cfg.plan()?;
    let alpha = alpha_below(cfg, &plan);
    let rows = sharpness_check(&plan);
    let pass = rows.iter().all(|r| r.pass);
    println!("sharpness: {}/{} blocks pass", rows.iter().filter(|r| r.pass).count(), rows.len());
    out.json(
        "sharpness.json",
        &SharpnessReport {
            p: plan.p,
            mode: plan.mode,
            theorem1_ratios: theorem1_ratio_sequence(&plan, alpha),
            alpha_below: alpha,
            rows,
            pass,
        },
    )?;
    Ok(pass)
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

pub fn out_dir(path: Option<&Path>) -> PathBuf {
    path.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
}
