//! Telescoped composition of nested blocks into a region table.

use serde::{Deserialize, Serialize};

use super::piecewise::{PiecewiseRadialMap, RegionAction, RegionKind};
use crate::construction::{check_feasibility, SchedulePlan};
use crate::error::{domain, Error, Result};
use crate::Real;

/// One block of a nested composition, radii as logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BlockSpec<T> {
    pub ln_r: T,
    pub ln_big_r: T,
    pub alpha: T,
    pub q: T,
}

/// Which factor of the decomposition `f̄ = g ∘ f` to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MapPart {
    /// Spiral and stretch together (`f̄`).
    #[default]
    Full,
    /// Spiral only, every `q_n` replaced by 1 (`f`).
    Rotation,
    /// Stretch only, every `α_n` replaced by 0 (`g`).
    Stretch,
}

impl<T: Real> PiecewiseRadialMap<T> {
    /// Compose blocks listed outermost first. Block `n` acts on the image of
    /// its annulus under the composition of blocks `1..n`, which is how the
    /// accumulated similarity `(λ, μ)` enters each region.
    pub fn from_blocks(blocks: &[BlockSpec<T>]) -> Result<Self> {
        for (i, b) in blocks.iter().enumerate() {
            if !(b.ln_r < b.ln_big_r) {
                return domain(format!("block {} has r >= R", i + 1));
            }
            if let Some(next) = blocks.get(i + 1) {
                if !(next.ln_big_r < b.ln_r) {
                    return domain(format!("block {} is not nested inside block {}", i + 2, i + 1));
                }
            }
        }
        let mut desc = Vec::with_capacity(2 * blocks.len() + 1);
        desc.push(RegionAction {
            kind: RegionKind::Outer,
            ln_t_lo: blocks.first().map_or(T::neg_infinity(), |b| b.ln_big_r),
            ln_t_hi: T::infinity(),
            ln_lambda: T::zero(),
            mu: T::zero(),
            q: T::one(),
            alpha: T::zero(),
            ln_r_ref: T::zero(),
        });
        let (mut ln_lambda, mut mu) = (T::zero(), T::zero());
        for (i, b) in blocks.iter().enumerate() {
            let n = i + 1;
            desc.push(RegionAction {
                kind: RegionKind::Annulus(n),
                ln_t_lo: b.ln_r,
                ln_t_hi: b.ln_big_r,
                ln_lambda,
                mu,
                q: b.q,
                alpha: b.alpha,
                ln_r_ref: b.ln_big_r,
            });
            let ln_ratio = b.ln_r - b.ln_big_r;
            ln_lambda = ln_lambda + (b.q - T::one()) * ln_ratio;
            mu = mu + b.alpha * ln_ratio;
            if !mu.is_finite() || !ln_lambda.is_finite() {
                return Err(Error::Representation(format!("accumulated rotation after block {n} overflows")));
            }
            desc.push(RegionAction {
                kind: RegionKind::Gap(n),
                ln_t_lo: blocks.get(i + 1).map_or(T::neg_infinity(), |nb| nb.ln_big_r),
                ln_t_hi: b.ln_r,
                ln_lambda,
                mu,
                q: T::one(),
                alpha: T::zero(),
                ln_r_ref: b.ln_r,
            });
        }
        desc.reverse();
        Self::from_regions(desc, blocks.len())
    }
}

/// Block list of a plan, restricted to one factor of the decomposition.
pub fn plan_blocks<T: Real>(plan: &SchedulePlan<T>, part: MapPart) -> Result<Vec<BlockSpec<T>>> {
    (0..plan.n_blocks())
        .map(|i| {
            let alpha = match part {
                MapPart::Stretch => T::zero(),
                _ => plan.alpha[i].value(),
            };
            if !alpha.is_finite() {
                return Err(Error::Representation(format!(
                    "alpha_{} = exp({}) exceeds the scalar range",
                    i + 1,
                    plan.alpha[i].ln()
                )));
            }
            let q = match part {
                MapPart::Rotation => T::one(),
                _ => plan.q[i].value(),
            };
            Ok(BlockSpec { ln_r: plan.r[i].ln(), ln_big_r: plan.big_r[i].ln(), alpha, q })
        })
        .collect()
}

/// Region table of the composed map for a feasible plan.
pub fn compose_schedule<T: Real>(plan: &SchedulePlan<T>) -> Result<PiecewiseRadialMap<T>> {
    compose_schedule_part(plan, MapPart::Full)
}

pub fn compose_schedule_part<T: Real>(plan: &SchedulePlan<T>, part: MapPart) -> Result<PiecewiseRadialMap<T>> {
    if let Some(bad) = check_feasibility(plan).into_iter().find(|c| !c.passed) {
        return Err(Error::Constraint {
            name: bad.name.to_string(),
            index: bad.worst_block.unwrap_or(0),
            detail: format!("{} (slack {})", bad.description, bad.slack),
        });
    }
    PiecewiseRadialMap::from_blocks(&plan_blocks(plan, part)?)
}
