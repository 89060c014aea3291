//! Parameter schedules, their feasibility checks and the integrability
//! series of the composed maps.

mod gauge;
pub(crate) mod lp;
mod schedule;
mod series;

pub use gauge::{GaugeSample, GaugeSpec};
pub use lp::{
    distortion_lp_norm, distortion_lp_norm_mc, distortion_lp_norm_on_disc, LpNorm, McEstimate,
    MIN_STRATUM_SAMPLES, SHELL_LOG_WIDTH,
};
pub use schedule::{
    check_feasibility, generate_schedule, ConstraintCheck, Mode, SchedulePlan, FORMULA_TOL,
    RADIUS_LOG_MARGIN,
};
pub use series::{
    ln_annulus_area, ln_block_distortion_of, names as series_names, series_report, ConvergenceReport,
    SeriesSummary, Verdict,
};
