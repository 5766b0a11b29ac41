//! Real inner-product spaces: Euclidean `R^N` and grid discretizations of
//! `L²([0, T])` with a composite trapezoid inner product.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default node count for grid function spaces.
pub const DEFAULT_GRID_POINTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceKind {
    Euclidean {
        dim: usize,
    },
    /// Uniform closed grid `t_i = i·T/(points-1)`, `i = 0..points`.
    PeriodicGrid {
        points: usize,
        interval_end: f64,
    },
}

/// Describes the coordinates of a space and the inner product used for all
/// norms and projections in it.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    kind: SpaceKind,
    weights: Vec<f64>,
}

impl Space {
    pub fn euclidean(dim: usize) -> Result<Arc<Space>> {
        if dim == 0 {
            return Err(Error::InvalidSpace(
                "Euclidean dimension must be at least 1".into(),
            ));
        }
        Ok(Arc::new(Space {
            kind: SpaceKind::Euclidean { dim },
            weights: Vec::new(),
        }))
    }

    /// Grid discretization of `L²([0, 2π])`.
    pub fn periodic_grid(points: usize) -> Result<Arc<Space>> {
        Self::grid_on(points, TAU)
    }

    pub fn grid_on(points: usize, interval_end: f64) -> Result<Arc<Space>> {
        if points < 2 {
            return Err(Error::InvalidSpace("grid needs at least 2 points".into()));
        }
        if !(interval_end.is_finite() && interval_end > 0.0) {
            return Err(Error::InvalidSpace(format!(
                "interval end must be positive and finite, got {interval_end}"
            )));
        }
        // composite trapezoid: h/2 at the endpoints, h inside
        let h = interval_end / (points - 1) as f64;
        let mut weights = vec![h; points];
        weights[0] = 0.5 * h;
        weights[points - 1] = 0.5 * h;
        Ok(Arc::new(Space {
            kind: SpaceKind::PeriodicGrid {
                points,
                interval_end,
            },
            weights,
        }))
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            SpaceKind::Euclidean { dim } => dim,
            SpaceKind::PeriodicGrid { points, .. } => points,
        }
    }

    pub fn is_grid(&self) -> bool {
        matches!(self.kind, SpaceKind::PeriodicGrid { .. })
    }

    /// Quadrature weights; empty for Euclidean spaces.
    pub fn quadrature_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Grid nodes `t_i`; for Euclidean spaces the coordinate indices.
    pub fn nodes(&self) -> Vec<f64> {
        match self.kind {
            SpaceKind::Euclidean { dim } => (0..dim).map(|i| i as f64).collect(),
            SpaceKind::PeriodicGrid {
                points,
                interval_end,
            } => {
                let h = interval_end / (points - 1) as f64;
                (0..points).map(|i| i as f64 * h).collect()
            }
        }
    }

    /// `‖1‖²`, i.e. the measure of the domain (or `N` for `R^N`).
    pub fn unit_mass(&self) -> f64 {
        match self.kind {
            SpaceKind::Euclidean { dim } => dim as f64,
            SpaceKind::PeriodicGrid { .. } => self.weights.iter().sum(),
        }
    }

    fn same(a: &Arc<Space>, b: &Arc<Space>) -> bool {
        Arc::ptr_eq(a, b) || a.kind == b.kind
    }
}

/// An element of a [`Space`], stored densely.
#[derive(Clone, PartialEq)]
pub struct Point {
    space: Arc<Space>,
    values: Vec<f64>,
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Point")
            .field("kind", &self.space.kind)
            .field("values", &self.values)
            .finish()
    }
}

impl Point {
    pub fn new(space: &Arc<Space>, values: Vec<f64>) -> Result<Point> {
        if values.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Point {
            space: Arc::clone(space),
            values,
        })
    }

    pub fn zeros(space: &Arc<Space>) -> Point {
        Point {
            space: Arc::clone(space),
            values: vec![0.0; space.dim()],
        }
    }

    /// Samples `f` at the space's nodes.
    pub fn sample(space: &Arc<Space>, f: impl Fn(f64) -> f64) -> Result<Point> {
        let values = space.nodes().into_iter().map(f).collect();
        Point::new(space, values)
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    fn check(&self, other: &Point) -> Result<()> {
        if self.values.len() != other.values.len() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                found: other.values.len(),
            });
        }
        if !Space::same(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    pub fn inner(&self, other: &Point) -> Result<f64> {
        self.check(other)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &Point) -> f64 {
        if self.space.is_grid() {
            self.space
                .weights
                .iter()
                .zip(&self.values)
                .zip(&other.values)
                .map(|((w, x), y)| w * x * y)
                .sum()
        } else {
            self.values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| x * y)
                .sum()
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.inner_unchecked(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `∫ x` on a grid (or the coordinate sum in `R^N`).
    pub fn integral(&self) -> f64 {
        if self.space.is_grid() {
            self.space
                .weights
                .iter()
                .zip(&self.values)
                .map(|(w, x)| w * x)
                .sum()
        } else {
            self.values.iter().sum()
        }
    }

    pub fn distance(&self, other: &Point) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// `t·x + (1-t)·y`.
    pub fn combine(t: f64, x: &Point, y: &Point) -> Result<Point> {
        x.check(y)?;
        Ok(x.lin_unchecked(t, 1.0 - t, y))
    }

    /// `a·self + b·other`.
    pub fn lin(&self, a: f64, b: f64, other: &Point) -> Result<Point> {
        self.check(other)?;
        Ok(self.lin_unchecked(a, b, other))
    }

    fn lin_unchecked(&self, a: f64, b: f64, other: &Point) -> Point {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Point {
            space: Arc::clone(&self.space),
            values,
        }
    }

    pub fn sub(&self, other: &Point) -> Result<Point> {
        self.check(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x - y)
            .collect();
        Ok(Point {
            space: Arc::clone(&self.space),
            values,
        })
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: f64, other: &Point) -> Result<Point> {
        self.check(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| x + a * y)
            .collect();
        Ok(Point {
            space: Arc::clone(&self.space),
            values,
        })
    }

    pub fn scale(&self, s: f64) -> Point {
        Point {
            space: Arc::clone(&self.space),
            values: self.values.iter().map(|v| s * v).collect(),
        }
    }

    /// Adds the constant `c` to every coordinate.
    pub fn shift(&self, c: f64) -> Point {
        Point {
            space: Arc::clone(&self.space),
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }
}
