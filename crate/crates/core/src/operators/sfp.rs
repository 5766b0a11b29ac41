//! Constraint sets of the split feasibility problem in `L²([0, 2π])`:
//! `C = {x : ∫x ≤ 1}` and `Q = {x : ‖x − sin‖ ≤ 4}`, with the identity as the
//! linear map, and the projected-gradient operator built from them.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::space::{Point, Space, SpaceKind};

pub const DEFAULT_LAMBDA: f64 = 0.25;
const INTEGRAL_BOUND: f64 = 1.0;
const BALL_RADIUS: f64 = 4.0;

/// How the integral half-space is projected when `∫x > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntegralProjection {
    /// `x + (1 − a)/(4π²)`, the default. A relaxed projection: nonexpansive
    /// but not idempotent.
    #[default]
    PaperVerbatim,
    /// `x + (1 − a)/(2π)`, the metric projection.
    Standard,
}

fn grid_interval(space: &Space) -> Result<f64> {
    match space.kind() {
        SpaceKind::PeriodicGrid { interval_end, .. } => Ok(interval_end),
        SpaceKind::Euclidean { .. } => Err(Error::InvalidSpace(
            "operation requires a grid function space".into(),
        )),
    }
}

/// Projection onto `{x : ∫x ≤ 1}`.
pub fn project_integral_halfspace(x: &Point, mode: IntegralProjection) -> Result<Point> {
    let end = grid_interval(x.space())?;
    let a = x.integral();
    if a <= INTEGRAL_BOUND {
        return Ok(x.clone());
    }
    let divisor = match mode {
        IntegralProjection::PaperVerbatim => end * end,
        IntegralProjection::Standard => x.space().unit_mass(),
    };
    Ok(x.shift((INTEGRAL_BOUND - a) / divisor))
}

/// Projection onto the ball of radius 4 around `sin` in `L²`.
pub fn project_l2_ball(x: &Point) -> Result<Point> {
    grid_interval(x.space())?;
    let center = Point::sample(x.space(), f64::sin)?;
    project_l2_ball_around(x, &center, BALL_RADIUS)
}

fn project_l2_ball_around(x: &Point, center: &Point, radius: f64) -> Result<Point> {
    let offset = x.sub(center)?;
    let b = offset.norm_squared();
    if b <= radius * radius {
        return Ok(x.clone());
    }
    center.axpy(radius / b.sqrt(), &offset)
}

/// The sets `C`, `Q` on a fixed grid, with `sin` sampled once.
#[derive(Debug, Clone, PartialEq)]
pub struct SfpSets {
    center: Point,
    pub mode: IntegralProjection,
}

impl SfpSets {
    pub fn new(space: &Arc<Space>, mode: IntegralProjection) -> Result<Self> {
        grid_interval(space)?;
        Ok(SfpSets {
            center: Point::sample(space, f64::sin)?,
            mode,
        })
    }

    pub fn space(&self) -> &Arc<Space> {
        self.center.space()
    }

    pub fn project_c(&self, x: &Point) -> Result<Point> {
        project_integral_halfspace(x, self.mode)
    }

    pub fn project_q(&self, x: &Point) -> Result<Point> {
        project_l2_ball_around(x, &self.center, BALL_RADIUS)
    }

    /// `½‖P_C x − x‖² + ½‖P_Q x − x‖²`.
    pub fn residual(&self, x: &Point) -> Result<f64> {
        let dc = self.project_c(x)?.sub(x)?.norm_squared();
        let dq = self.project_q(x)?.sub(x)?.norm_squared();
        Ok(0.5 * (dc + dq))
    }
}

/// `x ↦ P_C(x − λ(x − P_Q x))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SfpOperator {
    lambda: f64,
    pub sets: SfpSets,
}

impl SfpOperator {
    pub fn new(lambda: f64, sets: SfpSets) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(SfpOperator { lambda, sets })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        let pq = self.sets.project_q(x)?;
        let step = x.lin(1.0 - self.lambda, self.lambda, &pq)?;
        self.sets.project_c(&step)
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    // 0 < λ < 2/‖T‖² with ‖T‖ = 1
    if lambda > 0.0 && lambda < 2.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "lambda must lie in (0, 2), got {lambda}"
        )))
    }
}

/// One application of the SFP operator with the default set projections.
pub fn sfp_operator(lambda: f64, x: &Point) -> Result<Point> {
    check_lambda(lambda)?;
    let sets = SfpSets::new(x.space(), IntegralProjection::PaperVerbatim)?;
    SfpOperator::new(lambda, sets)?.apply(x)
}
