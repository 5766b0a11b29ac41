//! Ready-made problem instances: split feasibility in `L²([0, 2π])`, convex
//! feasibility over balls in `R^N`, and the Fermat–Weber problem on the
//! corners of a cube.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algorithms::{
    run, Algorithm, Contraction, ErrorMetric, HalpernAnchor, IterationTrace, RunConfig,
    TerminalReason,
};
use crate::error::{Error, Result};
use crate::operators::{
    weiszfeld_map, AnchorSet, Ball, CfpOperator, IntegralProjection, Operator, SfpOperator,
    SfpSets, DEFAULT_LAMBDA,
};
use crate::schedules::{DeltaMode, Rate, Schedules};
use crate::space::{Point, Space, DEFAULT_GRID_POINTS};

pub const SFP_TOLERANCE: f64 = 1e-3;
pub const MAX_ITERATIONS: usize = 1000;
pub const CFP_DIMENSION: usize = 30;
pub const CFP_BALLS: usize = 30;
/// Retries after a Weiszfeld singularity, each perturbing the start by this much.
pub const SINGULARITY_PERTURBATION: f64 = 1e-8;
const SINGULARITY_RETRIES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    Sfp31,
    Cfp32,
    Weber33,
}

impl ExperimentId {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::Sfp31 => "sfp",
            ExperimentId::Cfp32 => "cfp",
            ExperimentId::Weber33 => "weber",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sfp" => Ok(ExperimentId::Sfp31),
            "cfp" => Ok(ExperimentId::Cfp32),
            "weber" => Ok(ExperimentId::Weber33),
            other => Err(Error::Config(format!(
                "unknown experiment `{other}` (expected sfp, cfp or weber)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct InitialCase {
    pub name: String,
    pub x0: Point,
    /// `x_{−1}`.
    pub x_prev: Point,
}

impl InitialCase {
    fn still(name: impl Into<String>, x0: Point) -> Self {
        InitialCase {
            name: name.into(),
            x_prev: x0.clone(),
            x0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    pub space: Arc<Space>,
    pub operator: Operator,
    pub defaults: RunConfig,
    pub initial_cases: Vec<InitialCase>,
}

impl ExperimentSpec {
    pub fn metric(&self) -> &ErrorMetric {
        &self.defaults.metric
    }

    /// Run configuration for one algorithm. In the convex feasibility
    /// comparison the CQ and Mann baselines use `ψ_n = 1/(n+1)` and the
    /// inertial Mann baseline a constant `δ_n = 0.5`.
    pub fn config_for(&self, algorithm: Algorithm) -> RunConfig {
        let mut cfg = self.defaults.clone();
        if self.id == ExperimentId::Cfp32 {
            match algorithm {
                Algorithm::Cq | Algorithm::Mann => {
                    cfg.schedules = cfg.schedules.with_psi(Rate::Harmonic(1.0));
                }
                Algorithm::InertialMann => {
                    cfg.schedules.psi = Rate::Harmonic(1.0);
                    cfg.schedules.delta = DeltaMode::Constant(0.5);
                }
                _ => {}
            }
        }
        cfg
    }

    pub fn case(&self, name: &str) -> Option<&InitialCase> {
        self.initial_cases.iter().find(|c| c.name == name)
    }

    /// Runs one case, retrying from a slightly perturbed start when the
    /// operator hits a singularity.
    pub fn run_case(&self, algorithm: Algorithm, case: &InitialCase) -> Result<IterationTrace> {
        self.run_case_with(algorithm, case, &self.config_for(algorithm))
    }

    pub fn run_case_with(
        &self,
        algorithm: Algorithm,
        case: &InitialCase,
        config: &RunConfig,
    ) -> Result<IterationTrace> {
        let mut trace = run(algorithm, &self.operator, config, &case.x0, &case.x_prev)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed ^ 0x5157_4549_5a46_454c);
        let mut x0 = case.x0.clone();
        let mut x_prev = case.x_prev.clone();
        for attempt in 1..=SINGULARITY_RETRIES {
            if trace.terminal_reason != TerminalReason::SingularityError {
                break;
            }
            log::warn!(
                "{algorithm} on case {}: singular operator evaluation, retry {attempt} with a {SINGULARITY_PERTURBATION:e} perturbation",
                case.name
            );
            x0 = perturb(&x0, &mut rng)?;
            x_prev = perturb(&x_prev, &mut rng)?;
            trace = run(algorithm, &self.operator, config, &x0, &x_prev)?;
        }
        Ok(trace)
    }
}

fn perturb(x: &Point, rng: &mut ChaCha8Rng) -> Result<Point> {
    let values = x
        .values()
        .iter()
        .map(|v| v + SINGULARITY_PERTURBATION * rng.gen_range(-1.0..1.0))
        .collect();
    Point::new(x.space(), values)
}

fn uniform_point(space: &Arc<Space>, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> Result<Point> {
    let values = (0..space.dim()).map(|_| rng.gen_range(lo..hi)).collect();
    Point::new(space, values)
}

fn base_config(metric: ErrorMetric, tolerance: f64, viscosity: f64, seed: u64) -> RunConfig {
    RunConfig {
        max_iterations: MAX_ITERATIONS,
        tolerance,
        metric,
        schedules: Schedules::default(),
        rng_seed: seed,
        halpern_anchor: HalpernAnchor::ScaledInitial(0.9),
        viscosity: Contraction::Scale(viscosity),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfpOptions {
    pub grid_points: usize,
    pub lambda: f64,
    pub projection: IntegralProjection,
}

impl Default for SfpOptions {
    fn default() -> Self {
        SfpOptions {
            grid_points: DEFAULT_GRID_POINTS,
            lambda: DEFAULT_LAMBDA,
            projection: IntegralProjection::PaperVerbatim,
        }
    }
}

/// Split feasibility with the four initial functions
/// `t²/10`, `e^{t/2}/3`, `2^t/16`, `3 sin(2t)`.
pub fn build_sfp() -> Result<ExperimentSpec> {
    build_sfp_with(SfpOptions::default())
}

pub fn build_sfp_with(options: SfpOptions) -> Result<ExperimentSpec> {
    let space = Space::periodic_grid(options.grid_points)?;
    let sets = SfpSets::new(&space, options.projection)?;
    let operator = Operator::Sfp(SfpOperator::new(options.lambda, sets.clone())?);
    let initial_cases = vec![
        InitialCase::still("I", Point::sample(&space, |t| t * t / 10.0)?),
        InitialCase::still("II", Point::sample(&space, |t| (t / 2.0).exp() / 3.0)?),
        InitialCase::still("III", Point::sample(&space, |t| 2f64.powf(t) / 16.0)?),
        InitialCase::still("IV", Point::sample(&space, |t| 3.0 * (2.0 * t).sin())?),
    ];
    Ok(ExperimentSpec {
        id: ExperimentId::Sfp31,
        space,
        operator,
        defaults: base_config(ErrorMetric::SfpResidual(sets), SFP_TOLERANCE, 0.9, 0),
        initial_cases,
    })
}

/// Convex feasibility over `m + 1` unit balls in `R^N`: `c_0 = 0`,
/// `c_1 = e_1`, `c_2 = −e_1`, and `c_3..c_m` uniform in `(−1/√N, 1/√N)^N`.
/// `cases` initial points are drawn uniformly from `(0, 10)^N`.
pub fn build_cfp(dim: usize, balls: usize, seed: u64, cases: usize) -> Result<ExperimentSpec> {
    if dim == 0 || balls < 2 {
        return Err(Error::Config(format!(
            "convex feasibility needs N >= 1 and m >= 2, got N = {dim}, m = {balls}"
        )));
    }
    let space = Space::euclidean(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e1 = vec![0.0; dim];
    e1[0] = 1.0;
    let mut sets = vec![
        Ball::new(Point::zeros(&space), 1.0)?,
        Ball::new(Point::new(&space, e1.clone())?, 1.0)?,
        Ball::new(Point::new(&space, e1.iter().map(|v| -v).collect())?, 1.0)?,
    ];
    let half_width = 1.0 / (dim as f64).sqrt();
    for _ in 3..=balls {
        sets.push(Ball::new(
            uniform_point(&space, -half_width, half_width, &mut rng)?,
            1.0,
        )?);
    }
    let initial_cases = (0..cases)
        .map(|k| {
            Ok(InitialCase::still(
                format!("rand{k}"),
                uniform_point(&space, 0.0, 10.0, &mut rng)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentSpec {
        id: ExperimentId::Cfp32,
        space,
        operator: Operator::Cfp(CfpOperator::new(sets)?),
        // only the iteration cap stops these runs
        defaults: base_config(ErrorMetric::SupNorm, f64::MIN_POSITIVE, 0.1, seed),
        initial_cases,
    })
}

/// The eight corners of `[0, 10]³` with unit weights.
pub fn cube_anchors() -> AnchorSet {
    let mut rows = Vec::with_capacity(8);
    for z in [0.0, 10.0] {
        for y in [0.0, 10.0] {
            for x in [0.0, 10.0] {
                rows.push(vec![x, y, z]);
            }
        }
    }
    AnchorSet::unit_weights(&rows).expect("cube anchors are valid")
}

/// Fermat–Weber on the cube corners; the minimizer is `(5, 5, 5)`.
pub fn build_weber(seed: u64, cases: usize) -> Result<ExperimentSpec> {
    let anchors = cube_anchors();
    let target = Point::new(anchors.space(), vec![5.0; 3])?;
    build_weber_with(anchors, target, seed, cases)
}

/// Fermat–Weber for arbitrary anchors. The error metric measures distance to
/// `target`; see [`weber_reference_solution`] when no closed form is known.
pub fn build_weber_with(
    anchors: AnchorSet,
    target: Point,
    seed: u64,
    cases: usize,
) -> Result<ExperimentSpec> {
    let space = anchors.space().clone();
    if target.dim() != space.dim() {
        return Err(Error::DimensionMismatch {
            expected: space.dim(),
            found: target.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial_cases = (0..cases)
        .map(|k| {
            Ok(InitialCase::still(
                format!("rand{k}"),
                uniform_point(&space, 0.0, 10.0, &mut rng)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentSpec {
        id: ExperimentId::Weber33,
        space,
        operator: Operator::Weiszfeld(anchors),
        defaults: base_config(
            ErrorMetric::DistanceToTarget(target),
            f64::MIN_POSITIVE,
            0.9,
            seed,
        ),
        initial_cases,
    })
}

/// Approximate minimizer from plain Weiszfeld iterations started at the
/// weighted centroid.
pub fn weber_reference_solution(anchors: &AnchorSet) -> Result<Point> {
    let total: f64 = anchors.weights().iter().sum();
    let mut centroid = vec![0.0; anchors.space().dim()];
    for (a, w) in anchors.anchors().iter().zip(anchors.weights()) {
        for (c, v) in centroid.iter_mut().zip(a.values()) {
            *c += w * v / total;
        }
    }
    let mut x = Point::new(anchors.space(), centroid)?;
    for _ in 0..100_000 {
        let next = match weiszfeld_map(anchors, &x) {
            Ok(p) => p,
            // landed on an anchor, which is then optimal
            Err(Error::Singularity { .. }) => return Ok(x),
            Err(e) => return Err(e),
        };
        let step = next.distance(&x)?;
        x = next;
        if step <= 1e-14 * (1.0 + x.norm()) {
            break;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn sfp_default_constants() {
        let spec = build_sfp().unwrap();
        let cfg = &spec.defaults;
        assert_eq!(cfg.tolerance, 1e-3);
        assert_eq!(cfg.schedules.psi(0), 0.01);
        assert_eq!(cfg.schedules.nu(0), 1.0);
        assert_eq!(cfg.schedules.xi(0), 10.0);
        assert_eq!(cfg.schedules.eta(), 4.0);
        let Operator::Sfp(op) = &spec.operator else {
            panic!()
        };
        assert_eq!(op.lambda(), 0.25);
        assert_eq!(spec.initial_cases.len(), 4);
        assert_eq!(spec.space.dim(), 1024);
        assert!(spec.initial_cases.iter().all(|c| c.x0 == c.x_prev));
    }

    #[test]
    fn sfp_metric_values() {
        let spec = build_sfp().unwrap();
        assert_eq!(
            spec.metric().evaluate(&Point::zeros(&spec.space)).unwrap(),
            0.0
        );

        let case1 = &spec.case("I").unwrap().x0;
        let a = case1.integral();
        assert!((a - TAU.powi(3) / 30.0).abs() < 1e-4);
        assert!(a > 1.0);
        assert!(spec.metric().evaluate(case1).unwrap() > 0.0);

        let case4 = &spec.case("IV").unwrap().x0;
        assert!(case4.integral().abs() < 1e-10);
        let sin = Point::sample(&spec.space, f64::sin).unwrap();
        let b = case4.sub(&sin).unwrap().norm_squared();
        assert!((b - 10.0 * PI).abs() < 1e-9);
        assert!(spec.metric().evaluate(case4).unwrap() > 0.0);
    }

    #[test]
    fn cfp_construction() {
        let spec = build_cfp(30, 30, 7, 2).unwrap();
        let Operator::Cfp(op) = &spec.operator else {
            panic!()
        };
        assert_eq!(op.balls().len(), 30);
        assert_eq!(op.outer().center.norm(), 0.0);
        assert_eq!(op.balls()[0].center.values()[0], 1.0);
        assert_eq!(op.balls()[1].center.values()[0], -1.0);
        let bound = 1.0 / 30f64.sqrt();
        for b in &op.balls()[2..] {
            assert!(b.center.sup_norm() < bound);
            assert_eq!(b.radius, 1.0);
        }
        let origin = Point::zeros(&spec.space);
        assert_eq!(spec.operator.apply(&origin).unwrap(), origin);
        for c in &spec.initial_cases {
            assert!(c.x0.values().iter().all(|v| (0.0..10.0).contains(v)));
        }
        assert_eq!(spec.defaults.viscosity.rho(), 0.1);

        let again = build_cfp(30, 30, 7, 2).unwrap();
        let Operator::Cfp(op2) = &again.operator else {
            panic!()
        };
        assert_eq!(op, op2);
        assert!(build_cfp(30, 1, 7, 1).is_err());
    }

    #[test]
    fn cfp_baseline_schedules() {
        let spec = build_cfp(5, 4, 1, 1).unwrap();
        let cq = spec.config_for(Algorithm::Cq);
        assert_eq!(cq.schedules.psi(3), 0.25);
        let im = spec.config_for(Algorithm::InertialMann);
        assert_eq!(im.schedules.delta(10, 1.0), 0.5);
        assert_eq!(im.schedules.psi(1), 0.5);
        let mv = spec.config_for(Algorithm::Mimva);
        assert_eq!(mv.schedules.psi(0), 0.01);
    }

    #[test]
    fn weber_construction() {
        let spec = build_weber(3, 5).unwrap();
        let Operator::Weiszfeld(a) = &spec.operator else {
            panic!()
        };
        assert_eq!(a.len(), 8);
        assert!(a
            .anchors()
            .iter()
            .all(|p| p.values().iter().all(|v| *v == 0.0 || *v == 10.0)));
        let m = spec.metric();
        assert_eq!(
            m.evaluate(&Point::new(&spec.space, vec![5.0; 3]).unwrap())
                .unwrap(),
            0.0
        );
        let d = m.evaluate(&Point::zeros(&spec.space)).unwrap();
        assert!((d - 75f64.sqrt()).abs() < 1e-12);
        assert_eq!(spec.initial_cases.len(), 5);
    }

    #[test]
    fn weber_reference_for_cube() {
        let x = weber_reference_solution(&cube_anchors()).unwrap();
        assert!(x.values().iter().all(|v| (v - 5.0).abs() < 1e-12));

        // collinear anchors: the weighted median minimizes
        let a = AnchorSet::new(
            vec![
                Point::new(&Space::euclidean(1).unwrap(), vec![0.0]).unwrap(),
                Point::new(&Space::euclidean(1).unwrap(), vec![1.0]).unwrap(),
                Point::new(&Space::euclidean(1).unwrap(), vec![4.0]).unwrap(),
            ],
            vec![1.0, 3.0, 1.0],
        )
        .unwrap();
        let x = weber_reference_solution(&a).unwrap();
        assert!((x.values()[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn experiment_ids_parse() {
        for id in [
            ExperimentId::Sfp31,
            ExperimentId::Cfp32,
            ExperimentId::Weber33,
        ] {
            assert_eq!(id.as_str().parse::<ExperimentId>().unwrap(), id);
        }
        assert!("tsp".parse::<ExperimentId>().is_err());
    }
}
