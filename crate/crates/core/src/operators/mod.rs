//! Nonexpansive operators: metric projections, compositions, the split and
//! convex feasibility operators and the Weiszfeld map.

mod sets;
mod sfp;
mod weiszfeld;

use std::fmt;
use std::sync::Arc;

pub use sets::{
    halfspace_from_cq_sets, project_ball, project_halfspace, project_halfspace_pair, Ball,
    HalfSpace,
};
pub use sfp::{
    project_integral_halfspace, project_l2_ball, sfp_operator, IntegralProjection, SfpOperator,
    SfpSets, DEFAULT_LAMBDA,
};
pub use weiszfeld::{weiszfeld_map, AnchorSet, SINGULARITY_TOLERANCE};

use crate::error::{Error, Result};
use crate::space::Point;

/// Closed convex sets with a closed-form projection.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    HalfSpace(HalfSpace),
    Ball(Ball),
    /// `{x : ∫x ≤ 1}` on a grid.
    IntegralHalfSpace(IntegralProjection),
    /// `{x : ‖x − sin‖ ≤ 4}` on a grid.
    SineBall,
}

impl ConvexSet {
    pub fn project(&self, x: &Point) -> Result<Point> {
        match self {
            ConvexSet::HalfSpace(h) => project_halfspace(h, x),
            ConvexSet::Ball(b) => project_ball(b, x),
            ConvexSet::IntegralHalfSpace(mode) => project_integral_halfspace(x, *mode),
            ConvexSet::SineBall => project_l2_ball(x),
        }
    }
}

/// `T = P_0((1/m) Σ_{i=1}^m P_i)` for balls `C_0, …, C_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CfpOperator {
    outer: Ball,
    balls: Vec<Ball>,
}

impl CfpOperator {
    /// `balls[0]` is the outer set `C_0`; the rest are averaged.
    pub fn new(mut balls: Vec<Ball>) -> Result<Self> {
        if balls.len() < 2 {
            return Err(Error::Config(
                "convex feasibility operator needs C_0 and at least one more ball".into(),
            ));
        }
        let outer = balls.remove(0);
        Ok(CfpOperator { outer, balls })
    }

    pub fn outer(&self) -> &Ball {
        &self.outer
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        let m = self.balls.len() as f64;
        let mut sum = vec![0.0; x.dim()];
        for ball in &self.balls {
            let p = project_ball(ball, x)?;
            for (s, v) in sum.iter_mut().zip(p.values()) {
                *s += v;
            }
        }
        sum.iter_mut().for_each(|s| *s /= m);
        project_ball(&self.outer, &Point::new(x.space(), sum)?)
    }
}

pub fn cfp_operator(balls: &[Ball], x: &Point) -> Result<Point> {
    CfpOperator::new(balls.to_vec())?.apply(x)
}

pub type CustomMap = Arc<dyn Fn(&Point) -> Result<Point> + Send + Sync>;

/// A nonexpansive self-map.
#[derive(Clone)]
pub enum Operator {
    Identity,
    Projection(ConvexSet),
    /// Applied left to right.
    Composite(Vec<Operator>),
    Cfp(CfpOperator),
    Sfp(SfpOperator),
    Weiszfeld(AnchorSet),
    Custom(CustomMap),
}

impl Operator {
    pub fn apply(&self, x: &Point) -> Result<Point> {
        match self {
            Operator::Identity => Ok(x.clone()),
            Operator::Projection(set) => set.project(x),
            Operator::Composite(ops) => {
                let mut y = x.clone();
                for op in ops {
                    y = op.apply(&y)?;
                }
                Ok(y)
            }
            Operator::Cfp(t) => t.apply(x),
            Operator::Sfp(t) => t.apply(x),
            Operator::Weiszfeld(a) => weiszfeld_map(a, x),
            Operator::Custom(f) => f(x),
        }
    }

    pub fn custom(f: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static) -> Self {
        Operator::Custom(Arc::new(f))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Operator::Identity => "identity",
            Operator::Projection(_) => "projection",
            Operator::Composite(_) => "composite",
            Operator::Cfp(_) => "cfp",
            Operator::Sfp(_) => "sfp",
            Operator::Weiszfeld(_) => "weiszfeld",
            Operator::Custom(_) => "custom",
        }
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operator::Projection(s) => f.debug_tuple("Projection").field(s).finish(),
            Operator::Composite(ops) => f.debug_tuple("Composite").field(ops).finish(),
            _ => f.write_str(self.name()),
        }
    }
}
