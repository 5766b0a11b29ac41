use std::fmt;
use std::time::Instant;

use super::{
    cq_step, inertial_mann_step, mann_step, mimha_step, mimva_step, Algorithm, Anchor, Contraction,
    IterationState,
};
use crate::error::{Error, Result};
use crate::operators::{Operator, SfpSets};
use crate::schedules::{check_d2, D2Report, Schedules};
use crate::space::Point;

/// Error measure `E_n` evaluated at `x_n` before each step.
#[derive(Debug, Clone)]
pub enum ErrorMetric {
    /// `½‖P_C x − x‖² + ½‖P_Q x − x‖²`.
    SfpResidual(SfpSets),
    SupNorm,
    DistanceToTarget(Point),
}

impl ErrorMetric {
    pub fn evaluate(&self, x: &Point) -> Result<f64> {
        match self {
            ErrorMetric::SfpResidual(sets) => sets.residual(x),
            ErrorMetric::SupNorm => Ok(x.sup_norm()),
            ErrorMetric::DistanceToTarget(target) => x.distance(target),
        }
    }
}

#[derive(Debug, Clone)]
pub enum HalpernAnchor {
    /// `u = s·x_0`.
    ScaledInitial(f64),
    Fixed(Point),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub metric: ErrorMetric,
    pub schedules: Schedules,
    pub rng_seed: u64,
    pub halpern_anchor: HalpernAnchor,
    pub viscosity: Contraction,
}

impl RunConfig {
    pub fn new(metric: ErrorMetric) -> Self {
        RunConfig {
            max_iterations: 1000,
            tolerance: 1e-3,
            metric,
            schedules: Schedules::default(),
            rng_seed: 0,
            halpern_anchor: HalpernAnchor::ScaledInitial(0.9),
            viscosity: Contraction::Scale(0.9),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::Config(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminalReason {
    ToleranceMet,
    MaxIterations,
    SingularityError,
}

impl TerminalReason {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminalReason::ToleranceMet => "tolerance_met",
            TerminalReason::MaxIterations => "max_iterations",
            TerminalReason::SingularityError => "singularity_error",
        }
    }
}

impl fmt::Display for TerminalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub n: usize,
    pub error: f64,
    /// Inertial coefficient used in the step from `x_n`; 0 on the final record.
    pub delta: f64,
    /// Wall time since the run started, in seconds.
    pub elapsed_seconds: f64,
    /// `‖x_n − x_{n−1}‖`.
    pub step_norm: f64,
    pub nu: f64,
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub algorithm: Algorithm,
    pub records: Vec<IterationRecord>,
    pub terminal_reason: TerminalReason,
    pub final_point: Point,
}

impl IterationTrace {
    /// Number of steps taken; one less than the record count.
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.n)
    }

    pub fn final_error(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.error)
    }

    pub fn elapsed_seconds(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.elapsed_seconds)
    }

    pub fn d2_report(&self, tolerance: f64) -> Result<D2Report> {
        let steps: Vec<_> = self
            .records
            .iter()
            .map(|r| (r.delta, r.nu, r.step_norm))
            .collect();
        check_d2(&steps, tolerance)
    }
}

/// Iterates `algorithm` from `(x_init, x_init_prev)` until `E_n < tolerance`
/// or `max_iterations` steps have been taken.
///
/// Singular operator evaluations end the run with
/// [`TerminalReason::SingularityError`]; any other failure is returned.
pub fn run(
    algorithm: Algorithm,
    op: &Operator,
    config: &RunConfig,
    x_init: &Point,
    x_init_prev: &Point,
) -> Result<IterationTrace> {
    config.validate()?;
    let schedules = &config.schedules;
    let anchor = match algorithm {
        Algorithm::Mmha | Algorithm::Mimha => Anchor::Halpern(match &config.halpern_anchor {
            HalpernAnchor::ScaledInitial(s) => x_init.scale(*s),
            HalpernAnchor::Fixed(u) => u.clone(),
        }),
        Algorithm::Mmva | Algorithm::Mimva => Anchor::Viscosity(config.viscosity.clone()),
        _ => Anchor::None,
    };
    let mut state = IterationState::new(x_init.clone(), x_init_prev.clone()).with_anchor(anchor);
    let mut records = Vec::new();
    let start = Instant::now();

    let terminal_reason = loop {
        let n = state.n;
        let error = config.metric.evaluate(&state.x_curr)?;
        let step_norm = state.step_norm()?;
        let nu = schedules.nu(n);
        let finished = if error < config.tolerance {
            Some(TerminalReason::ToleranceMet)
        } else if n >= config.max_iterations {
            Some(TerminalReason::MaxIterations)
        } else {
            None
        };
        if let Some(reason) = finished {
            records.push(IterationRecord {
                n,
                error,
                delta: 0.0,
                elapsed_seconds: start.elapsed().as_secs_f64(),
                step_norm,
                nu,
            });
            break reason;
        }

        let psi = schedules.psi(n);
        let delta = if algorithm.is_inertial() {
            schedules.delta(n, step_norm)
        } else {
            0.0
        };
        let next = match algorithm {
            Algorithm::Mann => mann_step(op, &state.x_curr, psi),
            Algorithm::InertialMann => inertial_mann_step(op, &state, delta, psi),
            Algorithm::Cq => cq_step(op, &state, psi),
            Algorithm::Mmha | Algorithm::Mimha => mimha_step(op, &state, delta, psi, nu),
            Algorithm::Mmva | Algorithm::Mimva => {
                let Anchor::Viscosity(f) = &state.anchor else {
                    unreachable!("viscosity runs always carry a contraction")
                };
                mimva_step(op, &state, delta, psi, nu, f)
            }
        };
        let next = match next {
            Ok(p) => p,
            Err(Error::Singularity { index, distance }) => {
                log::debug!(
                    "{algorithm}: iterate hit anchor {index} at n = {n} (distance {distance:e})"
                );
                records.push(IterationRecord {
                    n,
                    error,
                    delta,
                    elapsed_seconds: start.elapsed().as_secs_f64(),
                    step_norm,
                    nu,
                });
                break TerminalReason::SingularityError;
            }
            Err(e) => return Err(e),
        };
        records.push(IterationRecord {
            n,
            error,
            delta,
            elapsed_seconds: start.elapsed().as_secs_f64(),
            step_norm,
            nu,
        });
        state.advance(next);
    };

    Ok(IterationTrace {
        algorithm,
        records,
        terminal_reason,
        final_point: state.x_curr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedules::DeltaMode;
    use crate::space::Space;

    fn halving() -> Operator {
        Operator::custom(|x| Ok(x.scale(0.5)))
    }

    #[test]
    fn fixed_point_start_stops_immediately() {
        let s = Space::euclidean(3).unwrap();
        let p = Point::zeros(&s);
        let cfg = RunConfig::new(ErrorMetric::SupNorm);
        for a in Algorithm::ALL {
            let t = run(a, &halving(), &cfg, &p, &p).unwrap();
            assert_eq!(t.terminal_reason, TerminalReason::ToleranceMet);
            assert_eq!(t.iterations(), 0);
            assert_eq!(t.records.len(), 1);
        }
    }

    #[test]
    fn max_iterations_bounds_trace() {
        let s = Space::euclidean(2).unwrap();
        let x = Point::new(&s, vec![5.0, -5.0]).unwrap();
        let mut cfg = RunConfig::new(ErrorMetric::SupNorm);
        cfg.max_iterations = 7;
        cfg.tolerance = 1e-300;
        let t = run(Algorithm::Mann, &Operator::Identity, &cfg, &x, &x).unwrap();
        assert_eq!(t.terminal_reason, TerminalReason::MaxIterations);
        assert_eq!(t.records.len(), 8);
        assert_eq!(t.iterations(), 7);
        assert!(t.records.iter().enumerate().all(|(i, r)| r.n == i));
    }

    #[test]
    fn mann_converges_on_contraction() {
        let s = Space::euclidean(2).unwrap();
        let x = Point::new(&s, vec![1.0, 1.0]).unwrap();
        let mut cfg = RunConfig::new(ErrorMetric::SupNorm);
        cfg.tolerance = 1e-8;
        let t = run(Algorithm::Mann, &halving(), &cfg, &x, &x).unwrap();
        assert_eq!(t.terminal_reason, TerminalReason::ToleranceMet);
        assert!(t.final_error() < 1e-8);
        assert!(t.records.windows(2).all(|w| w[1].error <= w[0].error));
    }

    #[test]
    fn adaptive_delta_respects_xi_bound() {
        let s = Space::euclidean(2).unwrap();
        let rot = Operator::custom(|x| {
            let v = x.values();
            Point::new(x.space(), vec![-v[1], v[0]])
        });
        let x = Point::new(&s, vec![3.0, 1.0]).unwrap();
        let prev = Point::new(&s, vec![0.0, 2.0]).unwrap();
        let mut cfg = RunConfig::new(ErrorMetric::SupNorm);
        cfg.tolerance = 1e-12;
        cfg.max_iterations = 300;
        let t = run(Algorithm::Mimva, &rot, &cfg, &x, &prev).unwrap();
        for r in &t.records {
            assert!(r.delta * r.step_norm <= cfg.schedules.xi(r.n));
        }
        assert!(t.records.iter().any(|r| r.delta > 0.0));
    }

    #[test]
    fn non_inertial_variants_ignore_delta_mode() {
        let s = Space::euclidean(1).unwrap();
        let x = Point::new(&s, vec![4.0]).unwrap();
        let prev = Point::new(&s, vec![1.0]).unwrap();
        let mut cfg = RunConfig::new(ErrorMetric::SupNorm);
        cfg.schedules = Schedules::default()
            .with_delta(DeltaMode::Constant(0.5))
            .unwrap();
        for a in [
            Algorithm::Mmha,
            Algorithm::Mmva,
            Algorithm::Mann,
            Algorithm::Cq,
        ] {
            let t = run(a, &halving(), &cfg, &x, &prev).unwrap();
            assert!(t.records.iter().all(|r| r.delta == 0.0), "{a}");
        }
    }

    #[test]
    fn singularity_terminates_run() {
        let a =
            crate::operators::AnchorSet::unit_weights(&[vec![0.0, 0.0], vec![2.0, 0.0]]).unwrap();
        let op = Operator::Weiszfeld(a);
        let s = Space::euclidean(2).unwrap();
        let x = Point::new(&s, vec![2.0, 0.0]).unwrap();
        let cfg = RunConfig::new(ErrorMetric::DistanceToTarget(
            Point::new(&s, vec![1.0, 0.0]).unwrap(),
        ));
        let t = run(Algorithm::Mimva, &op, &cfg, &x, &x).unwrap();
        assert_eq!(t.terminal_reason, TerminalReason::SingularityError);
        assert_eq!(t.records.len(), 1);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let s = Space::euclidean(1).unwrap();
        let x = Point::zeros(&s);
        let mut cfg = RunConfig::new(ErrorMetric::SupNorm);
        cfg.max_iterations = 0;
        assert!(run(Algorithm::Mann, &Operator::Identity, &cfg, &x, &x).is_err());
        cfg.max_iterations = 1;
        cfg.tolerance = 0.0;
        assert!(run(Algorithm::Mann, &Operator::Identity, &cfg, &x, &x).is_err());
    }
}
