//! Fixed-point iterations for nonexpansive operators in real inner-product
//! spaces.
//!
//! The centerpiece is a pair of inertial schemes: an inertial Mann–Halpern
//! iteration anchored at a fixed point `u`, and an inertial Mann–viscosity
//! iteration driven by a contraction `f`. Both extrapolate
//! `w_n = x_n + δ_n(x_n − x_{n−1})` with an adaptive coefficient bound before
//! taking a Mann step. Classic Mann, inertial Mann and the hybrid CQ method
//! are provided as baselines, along with ready-made split feasibility, convex
//! feasibility and Fermat–Weber instances.

pub mod algorithms;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod operators;
pub mod schedules;
pub mod space;

pub use algorithms::{run, Algorithm, IterationTrace, RunConfig, TerminalReason};
pub use error::{Error, Result};
pub use operators::Operator;
pub use space::{Point, Space};
