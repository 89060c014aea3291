use anyhow::{bail, Context};
use serde::Deserialize;
use spiral_core::construction::{generate_schedule, GaugeSpec, Mode, SchedulePlan};
use spiral_core::map::PiecewiseRadialMap;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiftMode {
    /// Track the argument numerically unless that would take more than
    /// `AUTO_TRACK_LIMIT` steps, then read it off the closed form.
    Auto,
    Tracked,
    Analytic,
}

/// Largest tracker step count `LiftMode::Auto` will attempt.
pub const AUTO_TRACK_LIMIT: f64 = 2e6;

/// Everything a command needs; every field has a default so a config file
/// only lists what it changes.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub p: f64,
    pub n_blocks: usize,
    pub mode: Mode,
    pub gauge: GaugeSpec<f64>,
    /// Read the plan from a file instead of generating it.
    pub plan_file: Option<PathBuf>,
    /// Profile this map instead of the one composed from the plan.
    pub map_file: Option<PathBuf>,
    /// Required by the commands that sample.
    pub seed: Option<u64>,
    /// Ray direction for rotation profiles.
    pub theta: f64,
    /// Log-spaced radii per profile, on top of the block radii.
    pub grid_points: usize,
    /// How rotation profiles obtain the unwrapped argument.
    pub lift: LiftMode,
    /// Monte-Carlo sample count for the distortion report.
    pub samples: usize,
    /// Base points for the modulus check; log-spaced defaults when empty.
    pub z0: Vec<f64>,
    pub z0_count: usize,
    /// Hölder-below exponent in the rotation bound; theory value if absent.
    pub alpha_below: Option<f64>,
    pub random_pairs: usize,
    /// Number of dyadic scales `0.1 · 2^{-k}` in the Hölder fits.
    pub scale_count: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            p: 2.0,
            n_blocks: 8,
            mode: Mode::StretchRotation,
            gauge: GaugeSpec::log_power(1.0),
            plan_file: None,
            map_file: None,
            seed: None,
            theta: 0.0,
            grid_points: 50,
            lift: LiftMode::Auto,
            samples: 1_000_000,
            z0: Vec::new(),
            z0_count: 20,
            alpha_below: None,
            random_pairs: 2000,
            scale_count: 17,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            bail!("p must be finite and > 1, got {}", self.p);
        }
        if self.grid_points < 2 {
            bail!("grid_points must be at least 2");
        }
        if self.z0.iter().any(|&z| !(z > 0.0 && z < 1.0)) {
            bail!("every z0 must lie in (0, 1)");
        }
        if self.z0.is_empty() && self.z0_count == 0 {
            bail!("z0_count must be positive when no z0 list is given");
        }
        if self.scale_count < 3 {
            bail!("scale_count must be at least 3");
        }
        if let Some(a) = self.alpha_below {
            if !(a > 0.0 && a.is_finite()) {
                bail!("alpha_below must be positive, got {a}");
            }
        }
        Ok(())
    }

    pub fn require_seed(&self) -> anyhow::Result<u64> {
        self.seed.context("this command samples randomly; set `seed` in the config or pass --seed")
    }

    pub fn plan(&self) -> anyhow::Result<SchedulePlan<f64>> {
        match &self.plan_file {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading plan {}", path.display()))?;
                let plan: SchedulePlan<f64> =
                    serde_json::from_str(&text).with_context(|| format!("parsing plan {}", path.display()))?;
                plan.validate_shape().with_context(|| format!("plan {}", path.display()))?;
                Ok(plan)
            }
            None => Ok(generate_schedule(self.p, self.n_blocks, self.gauge.clone(), self.mode)?),
        }
    }

    pub fn map_override(&self) -> anyhow::Result<Option<PiecewiseRadialMap<f64>>> {
        let Some(path) = &self.map_file else {
            return Ok(None);
        };
        let text = fs::read_to_string(path).with_context(|| format!("reading map {}", path.display()))?;
        let map = serde_json::from_str(&text).with_context(|| format!("parsing map {}", path.display()))?;
        Ok(Some(map))
    }
}
