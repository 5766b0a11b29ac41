//! Half-spaces, balls and their metric projections.

use crate::error::{Error, Result};
use crate::space::Point;

/// `{u : ⟨normal, u⟩ ≤ offset}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub normal: Point,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Point, offset: f64) -> Self {
        HalfSpace { normal, offset }
    }

    /// A zero normal describes either the whole space or the empty set.
    pub fn is_degenerate(&self) -> bool {
        self.normal.norm_squared() == 0.0
    }

    pub fn is_empty(&self) -> bool {
        self.is_degenerate() && self.offset < 0.0
    }

    /// `⟨a, x⟩ − b`; positive means violated.
    pub fn violation(&self, x: &Point) -> Result<f64> {
        Ok(self.normal.inner(x)? - self.offset)
    }

    fn slack_tolerance(&self, x: &Point) -> f64 {
        1e-12 * (1.0 + self.offset.abs() + self.normal.norm() * x.norm())
    }

    pub fn contains(&self, x: &Point) -> Result<bool> {
        Ok(self.violation(x)? <= self.slack_tolerance(x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Config(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Ball { center, radius })
    }
}

pub fn project_halfspace(h: &HalfSpace, x: &Point) -> Result<Point> {
    if h.is_empty() {
        return Err(Error::Infeasible(format!(
            "half-space with zero normal and offset {}",
            h.offset
        )));
    }
    let excess = h.violation(x)?;
    if excess <= 0.0 || h.is_degenerate() {
        return Ok(x.clone());
    }
    x.axpy(-excess / h.normal.norm_squared(), &h.normal)
}

/// `c + r(x − c)/‖x − c‖` outside the ball, identity on it (boundary included).
pub fn project_ball(ball: &Ball, x: &Point) -> Result<Point> {
    let offset = x.sub(&ball.center)?;
    let dist = offset.norm();
    if dist <= ball.radius {
        return Ok(x.clone());
    }
    ball.center.axpy(ball.radius / dist, &offset)
}

/// Exact projection onto the intersection of two half-spaces by active-set
/// case analysis: feasible point, one active constraint, or both active via
/// the 2×2 Gram system of the KKT conditions.
pub fn project_halfspace_pair(h1: &HalfSpace, h2: &HalfSpace, x: &Point) -> Result<Point> {
    for h in [h1, h2] {
        if h.is_empty() {
            return Err(Error::Infeasible("empty half-space in pair".into()));
        }
    }
    if h1.is_degenerate() {
        return project_halfspace(h2, x);
    }
    if h2.is_degenerate() {
        return project_halfspace(h1, x);
    }
    let in1 = h1.contains(x)?;
    let in2 = h2.contains(x)?;
    if in1 && in2 {
        return Ok(x.clone());
    }

    // a single active constraint suffices when its projection satisfies the other
    if !in1 {
        let p = project_halfspace(h1, x)?;
        if h2.contains(&p)? {
            return Ok(p);
        }
    }
    if !in2 {
        let p = project_halfspace(h2, x)?;
        if h1.contains(&p)? {
            return Ok(p);
        }
    }

    let (a1, a2) = (&h1.normal, &h2.normal);
    let g11 = a1.norm_squared();
    let g22 = a2.norm_squared();
    let g12 = a1.inner(a2)?;
    let det = g11 * g22 - g12 * g12;
    if det <= 1e-14 * g11 * g22 {
        return Err(Error::Infeasible(
            "parallel half-spaces with empty intersection".into(),
        ));
    }
    let r1 = h1.violation(x)?;
    let r2 = h2.violation(x)?;
    let mu1 = (g22 * r1 - g12 * r2) / det;
    let mu2 = (g11 * r2 - g12 * r1) / det;
    if mu1 < 0.0 || mu2 < 0.0 {
        return Err(Error::Infeasible(format!(
            "no nonnegative KKT multipliers ({mu1:e}, {mu2:e})"
        )));
    }
    x.lin(1.0, -mu1, a1)?.axpy(-mu2, a2)
}

/// Rewrites `C_n = {u : ‖y_n − u‖ ≤ ‖x_n − u‖}` and
/// `Q_n = {u : ⟨x_n − u, x_n − x_0⟩ ≤ 0}` as half-spaces.
pub fn halfspace_from_cq_sets(
    x_n: &Point,
    y_n: &Point,
    x_0: &Point,
) -> Result<(HalfSpace, HalfSpace)> {
    let c_normal = x_n.sub(y_n)?;
    let c_offset = 0.5 * (x_n.norm_squared() - y_n.norm_squared());
    let q_normal = x_0.sub(x_n)?;
    let q_offset = q_normal.inner(x_n)?;
    // identical points give exactly zero normals; keep the offsets consistent
    let c_offset = if c_normal.norm_squared() == 0.0 {
        0.0
    } else {
        c_offset
    };
    let q_offset = if q_normal.norm_squared() == 0.0 {
        0.0
    } else {
        q_offset
    };
    Ok((
        HalfSpace::new(c_normal, c_offset),
        HalfSpace::new(q_normal, q_offset),
    ))
}
