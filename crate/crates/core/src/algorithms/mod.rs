//! Iteration engines: Mann, inertial Mann, the hybrid CQ method, and the
//! inertial Mann–Halpern and Mann–viscosity schemes.
//!
//! Each `*_step` maps `x_n` (and `x_{n−1}` for the inertial schemes) to
//! `x_{n+1}`. [`run`] drives a step to convergence and records a trace.

mod runner;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub use runner::{
    run, ErrorMetric, HalpernAnchor, IterationRecord, IterationTrace, RunConfig, TerminalReason,
};

use crate::error::{Error, Result};
use crate::operators::{halfspace_from_cq_sets, project_halfspace_pair, CustomMap, Operator};
use crate::space::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Mann,
    InertialMann,
    Cq,
    /// Mann–Halpern without inertia.
    Mmha,
    Mimha,
    /// Mann–viscosity without inertia.
    Mmva,
    Mimva,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Mann,
        Algorithm::InertialMann,
        Algorithm::Cq,
        Algorithm::Mmha,
        Algorithm::Mimha,
        Algorithm::Mmva,
        Algorithm::Mimva,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Mann => "mann",
            Algorithm::InertialMann => "inertial-mann",
            Algorithm::Cq => "cq",
            Algorithm::Mmha => "mmha",
            Algorithm::Mimha => "mimha",
            Algorithm::Mmva => "mmva",
            Algorithm::Mimva => "mimva",
        }
    }

    pub fn is_inertial(self) -> bool {
        matches!(
            self,
            Algorithm::InertialMann | Algorithm::Mimha | Algorithm::Mimva
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s.trim())
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown algorithm `{s}` (expected one of mann, inertial-mann, cq, mmha, mimha, mmva, mimva)"
                ))
            })
    }
}

/// A `ρ`-contraction used by the viscosity schemes.
#[derive(Clone)]
pub enum Contraction {
    /// `f(x) = ρx`.
    Scale(f64),
    Custom {
        map: CustomMap,
        rho: f64,
    },
}

impl Contraction {
    pub fn scale(rho: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::Config(format!(
                "contraction factor must lie in [0, 1), got {rho}"
            )));
        }
        Ok(Contraction::Scale(rho))
    }

    pub fn custom(rho: f64, map: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static) -> Self {
        Contraction::Custom {
            map: Arc::new(map),
            rho,
        }
    }

    pub fn rho(&self) -> f64 {
        match self {
            Contraction::Scale(r) => r.abs(),
            Contraction::Custom { rho, .. } => *rho,
        }
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        match self {
            Contraction::Scale(r) => Ok(x.scale(*r)),
            Contraction::Custom { map, .. } => map(x),
        }
    }
}

impl fmt::Debug for Contraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Contraction::Scale(r) => write!(f, "Scale({r})"),
            Contraction::Custom { rho, .. } => write!(f, "Custom(rho = {rho})"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Anchor {
    None,
    /// Fixed Halpern anchor `u`.
    Halpern(Point),
    /// Viscosity contraction `f`, evaluated at `x_n`.
    Viscosity(Contraction),
}

#[derive(Debug, Clone)]
pub struct IterationState {
    pub n: usize,
    pub x_prev: Point,
    pub x_curr: Point,
    pub anchor: Anchor,
    /// Starting point, projected onto by the CQ method.
    pub x0: Option<Point>,
}

impl IterationState {
    pub fn new(x_curr: Point, x_prev: Point) -> Self {
        IterationState {
            n: 0,
            x0: Some(x_curr.clone()),
            x_prev,
            x_curr,
            anchor: Anchor::None,
        }
    }

    pub fn with_anchor(mut self, anchor: Anchor) -> Self {
        self.anchor = anchor;
        self
    }

    /// `‖x_n − x_{n−1}‖`.
    pub fn step_norm(&self) -> Result<f64> {
        self.x_curr.distance(&self.x_prev)
    }

    /// Shifts the window: `x_{n−1} ← x_n`, `x_n ← next`, `n ← n + 1`.
    pub fn advance(&mut self, next: Point) {
        self.x_prev = std::mem::replace(&mut self.x_curr, next);
        self.n += 1;
    }
}

/// `w_n = x_n + δ_n(x_n − x_{n−1})`.
fn extrapolate(state: &IterationState, delta: f64) -> Result<Point> {
    if delta == 0.0 {
        return Ok(state.x_curr.clone());
    }
    state.x_curr.axpy(delta, &state.x_curr.sub(&state.x_prev)?)
}

fn check_weight(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta >= 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "delta must be nonnegative, got {delta}"
        )))
    }
}

/// `x_{n+1} = ψ x_n + (1 − ψ) T x_n`.
pub fn mann_step(op: &Operator, x_n: &Point, psi: f64) -> Result<Point> {
    check_weight("psi", psi)?;
    Point::combine(psi, x_n, &op.apply(x_n)?)
}

/// Mann step taken from the extrapolated point `w_n`.
pub fn inertial_mann_step(
    op: &Operator,
    state: &IterationState,
    delta: f64,
    psi: f64,
) -> Result<Point> {
    check_delta(delta)?;
    let w = extrapolate(state, delta)?;
    mann_step(op, &w, psi)
}

/// Hybrid step: build `C_n`, `Q_n` from `y_n = ψx_n + (1 − ψ)Tx_n` and
/// project `x_0` onto their intersection.
pub fn cq_step(op: &Operator, state: &IterationState, psi: f64) -> Result<Point> {
    // ψ_0 = 1 occurs with ψ_n = 1/(n+1); it only makes C_0 the whole space
    check_weight("psi", psi)?;
    let x0 = state
        .x0
        .as_ref()
        .ok_or_else(|| Error::Config("CQ step needs the starting point x0".into()))?;
    let x = &state.x_curr;
    let y = Point::combine(psi, x, &op.apply(x)?)?;
    let (c, q) = halfspace_from_cq_sets(x, &y, x0)?;
    project_halfspace_pair(&c, &q, x0)
}

/// Non-inertial Mann–Halpern step: `x_{n+1} = νu + (1 − ν)(ψx_n + (1 − ψ)Tx_n)`.
pub fn halpern_mann_step(
    op: &Operator,
    x_n: &Point,
    u: &Point,
    psi: f64,
    nu: f64,
) -> Result<Point> {
    check_weight("nu", nu)?;
    let y = mann_step(op, x_n, psi)?;
    Point::combine(nu, u, &y)
}

/// Non-inertial Mann–viscosity step: `x_{n+1} = νf(x_n) + (1 − ν)(ψx_n + (1 − ψ)Tx_n)`.
pub fn viscosity_mann_step(
    op: &Operator,
    x_n: &Point,
    f: &Contraction,
    psi: f64,
    nu: f64,
) -> Result<Point> {
    check_weight("nu", nu)?;
    let y = mann_step(op, x_n, psi)?;
    Point::combine(nu, &f.apply(x_n)?, &y)
}

/// Inertial Mann–Halpern step anchored at `state.anchor`.
pub fn mimha_step(
    op: &Operator,
    state: &IterationState,
    delta: f64,
    psi: f64,
    nu: f64,
) -> Result<Point> {
    let Anchor::Halpern(u) = &state.anchor else {
        return Err(Error::Config("Halpern step needs an anchor point u".into()));
    };
    check_weight("nu", nu)?;
    let y = inertial_mann_step(op, state, delta, psi)?;
    Point::combine(nu, u, &y)
}

/// Inertial Mann–viscosity step; the contraction is evaluated at `x_n`, not `w_n`.
pub fn mimva_step(
    op: &Operator,
    state: &IterationState,
    delta: f64,
    psi: f64,
    nu: f64,
    f: &Contraction,
) -> Result<Point> {
    check_weight("nu", nu)?;
    let y = inertial_mann_step(op, state, delta, psi)?;
    Point::combine(nu, &f.apply(&state.x_curr)?, &y)
}
