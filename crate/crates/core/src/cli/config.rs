//! Flat TOML run configuration.
//!
//! ```toml
//! experiment = "sfp"
//! algorithms = ["mmva", "mimva"]
//! seed = 7
//! eta = 4.0
//! ```

use std::path::PathBuf;

use serde::Deserialize;
use thiserror::Error;

use crate::algorithms::{Algorithm, Contraction, HalpernAnchor};
use crate::experiments::{
    build_cfp, build_sfp_with, build_weber, build_weber_with, weber_reference_solution,
    ExperimentId, ExperimentSpec, SfpOptions, CFP_BALLS, CFP_DIMENSION,
};
use crate::operators::{AnchorSet, IntegralProjection};
use crate::schedules::{DeltaMode, Rate};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config: {0}")]
    Syntax(String),
    #[error("config key `{key}`: {message}")]
    Invalid { key: &'static str, message: String },
    #[error("config key `{key}` is required")]
    Missing { key: &'static str },
    #[error(transparent)]
    Build(#[from] crate::error::Error),
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn invalid(key: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key,
        message: message.into(),
    }
}

/// Either `["a", "b"]` or `"a,b"`.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum NameList {
    List(Vec<String>),
    Joined(String),
}

impl NameList {
    fn names(&self) -> Vec<String> {
        match self {
            NameList::List(v) => v.clone(),
            NameList::Joined(s) => s
                .split(',')
                .map(|p| p.trim().to_string())
                .filter(|p| !p.is_empty())
                .collect(),
        }
    }
}

/// `"adaptive"`, `"zero"` or a constant coefficient.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum DeltaSetting {
    Value(f64),
    Mode(String),
}

/// The document as written; every key optional.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub experiment: Option<String>,
    pub algorithms: Option<NameList>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub repeat: Option<usize>,
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub eta: Option<f64>,
    pub xi_scale: Option<f64>,
    pub psi_scale: Option<f64>,
    pub nu_offset: Option<usize>,
    pub delta: Option<DeltaSetting>,
    pub lambda: Option<f64>,
    pub projection: Option<String>,
    pub halpern_scale: Option<f64>,
    pub viscosity: Option<f64>,
    pub cfp_dim: Option<usize>,
    pub cfp_balls: Option<usize>,
    pub anchors_csv: Option<PathBuf>,
    pub timing: Option<bool>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Syntax(e.message().to_string()))
    }

    /// Keys set in `other` win.
    pub fn merge(self, other: RawConfig) -> RawConfig {
        RawConfig {
            experiment: other.experiment.or(self.experiment),
            algorithms: other.algorithms.or(self.algorithms),
            seed: other.seed.or(self.seed),
            output_dir: other.output_dir.or(self.output_dir),
            repeat: other.repeat.or(self.repeat),
            max_iter: other.max_iter.or(self.max_iter),
            tol: other.tol.or(self.tol),
            grid: other.grid.or(self.grid),
            eta: other.eta.or(self.eta),
            xi_scale: other.xi_scale.or(self.xi_scale),
            psi_scale: other.psi_scale.or(self.psi_scale),
            nu_offset: other.nu_offset.or(self.nu_offset),
            delta: other.delta.or(self.delta),
            lambda: other.lambda.or(self.lambda),
            projection: other.projection.or(self.projection),
            halpern_scale: other.halpern_scale.or(self.halpern_scale),
            viscosity: other.viscosity.or(self.viscosity),
            cfp_dim: other.cfp_dim.or(self.cfp_dim),
            cfp_balls: other.cfp_balls.or(self.cfp_balls),
            anchors_csv: other.anchors_csv.or(self.anchors_csv),
            timing: other.timing.or(self.timing),
        }
    }
}

/// Parameter overrides on top of an experiment's defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub max_iter: Option<usize>,
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub eta: Option<f64>,
    pub xi_scale: Option<f64>,
    pub psi_scale: Option<f64>,
    pub nu_offset: Option<usize>,
    pub delta: Option<DeltaMode>,
    pub lambda: Option<f64>,
    pub projection: Option<IntegralProjection>,
    pub halpern_scale: Option<f64>,
    pub viscosity: Option<f64>,
    pub cfp_dim: Option<usize>,
    pub cfp_balls: Option<usize>,
    pub anchors_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub experiment: ExperimentId,
    pub algorithms: Vec<Algorithm>,
    pub overrides: Overrides,
    pub output_dir: PathBuf,
    /// Number of random initial points (convex feasibility and Fermat–Weber).
    pub repeat: usize,
    pub seed: u64,
    /// Write measured wall times; when off, time columns are zero and output
    /// files are byte-for-byte reproducible.
    pub timing: bool,
}

pub fn default_algorithms(experiment: ExperimentId) -> Vec<Algorithm> {
    match experiment {
        ExperimentId::Sfp31 => vec![
            Algorithm::Mmha,
            Algorithm::Mimha,
            Algorithm::Mmva,
            Algorithm::Mimva,
        ],
        ExperimentId::Cfp32 => vec![
            Algorithm::Cq,
            Algorithm::InertialMann,
            Algorithm::Mmva,
            Algorithm::Mimva,
        ],
        ExperimentId::Weber33 => vec![Algorithm::Mimha, Algorithm::Mimva],
    }
}

fn positive(key: &'static str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(key, format!("must be positive, got {v}")))
    }
}

fn unit_interval(key: &'static str, v: f64, closed_top: bool) -> Result<f64, ConfigError> {
    let ok = v >= 0.0 && if closed_top { v <= 1.0 } else { v < 1.0 };
    if ok {
        Ok(v)
    } else {
        let range = if closed_top { "[0, 1]" } else { "[0, 1)" };
        Err(invalid(key, format!("must lie in {range}, got {v}")))
    }
}

impl CliConfig {
    pub fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        let experiment = raw
            .experiment
            .as_deref()
            .ok_or(ConfigError::Missing { key: "experiment" })?
            .parse::<ExperimentId>()
            .map_err(|e| invalid("experiment", e.to_string()))?;

        let algorithms = match &raw.algorithms {
            Some(list) => {
                let names = list.names();
                if names.is_empty() {
                    return Err(invalid("algorithms", "list is empty"));
                }
                names
                    .iter()
                    .map(|n| {
                        n.parse::<Algorithm>()
                            .map_err(|e| invalid("algorithms", e.to_string()))
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
            None => default_algorithms(experiment),
        };

        let repeat = raw.repeat.unwrap_or(1);
        if repeat == 0 {
            return Err(invalid("repeat", "must be at least 1"));
        }
        if raw.max_iter == Some(0) {
            return Err(invalid("max_iter", "must be at least 1"));
        }
        let tol = raw.tol.map(|v| positive("tol", v)).transpose()?;
        if let Some(g) = raw.grid {
            if g < 2 {
                return Err(invalid("grid", format!("needs at least 2 points, got {g}")));
            }
        }
        if let Some(eta) = raw.eta {
            if !(eta.is_finite() && eta >= 3.0) {
                return Err(invalid("eta", format!("must be at least 3, got {eta}")));
            }
        }
        let xi_scale = raw.xi_scale.map(|v| positive("xi_scale", v)).transpose()?;
        let psi_scale = raw
            .psi_scale
            .map(|v| {
                // ψ_0 = psi_scale must stay inside (0, 1)
                if v > 0.0 && v < 1.0 {
                    Ok(v)
                } else {
                    Err(invalid("psi_scale", format!("must lie in (0, 1), got {v}")))
                }
            })
            .transpose()?;
        let delta = match &raw.delta {
            None => None,
            Some(DeltaSetting::Mode(m)) => match m.as_str() {
                "adaptive" => Some(DeltaMode::Adaptive),
                "zero" => Some(DeltaMode::Zero),
                other => {
                    return Err(invalid(
                        "delta",
                        format!("expected \"adaptive\", \"zero\" or a number, got `{other}`"),
                    ))
                }
            },
            Some(DeltaSetting::Value(v)) => {
                if !(v.is_finite() && *v >= 0.0) {
                    return Err(invalid("delta", format!("must be nonnegative, got {v}")));
                }
                Some(DeltaMode::Constant(*v))
            }
        };
        if let Some(l) = raw.lambda {
            if !(l > 0.0 && l < 2.0) {
                return Err(invalid("lambda", format!("must lie in (0, 2), got {l}")));
            }
        }
        let projection = match raw.projection.as_deref() {
            None => None,
            Some("paper") => Some(IntegralProjection::PaperVerbatim),
            Some("standard") => Some(IntegralProjection::Standard),
            Some(other) => {
                return Err(invalid(
                    "projection",
                    format!("expected \"paper\" or \"standard\", got `{other}`"),
                ))
            }
        };
        let halpern_scale = raw
            .halpern_scale
            .map(|v| {
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(invalid("halpern_scale", "must be finite"))
                }
            })
            .transpose()?;
        let viscosity = raw
            .viscosity
            .map(|v| unit_interval("viscosity", v, false))
            .transpose()?;
        if raw.cfp_dim == Some(0) {
            return Err(invalid("cfp_dim", "must be at least 1"));
        }
        if let Some(m) = raw.cfp_balls {
            if m < 2 {
                return Err(invalid("cfp_balls", format!("must be at least 2, got {m}")));
            }
        }

        Ok(CliConfig {
            experiment,
            algorithms,
            overrides: Overrides {
                max_iter: raw.max_iter,
                tol,
                grid: raw.grid,
                eta: raw.eta,
                xi_scale,
                psi_scale,
                nu_offset: raw.nu_offset,
                delta,
                lambda: raw.lambda,
                projection,
                halpern_scale,
                viscosity,
                cfp_dim: raw.cfp_dim,
                cfp_balls: raw.cfp_balls,
                anchors_csv: raw.anchors_csv,
            },
            output_dir: raw.output_dir.unwrap_or_else(|| PathBuf::from("out")),
            repeat,
            seed: raw.seed.unwrap_or(0),
            timing: raw.timing.unwrap_or(true),
        })
    }

    /// The selected experiment with every override applied.
    pub fn build_experiment(&self) -> Result<ExperimentSpec, ConfigError> {
        let o = &self.overrides;
        let mut spec = match self.experiment {
            ExperimentId::Sfp31 => {
                let mut options = SfpOptions::default();
                if let Some(g) = o.grid {
                    options.grid_points = g;
                }
                if let Some(l) = o.lambda {
                    options.lambda = l;
                }
                if let Some(p) = o.projection {
                    options.projection = p;
                }
                build_sfp_with(options)?
            }
            ExperimentId::Cfp32 => build_cfp(
                o.cfp_dim.unwrap_or(CFP_DIMENSION),
                o.cfp_balls.unwrap_or(CFP_BALLS),
                self.seed,
                self.repeat,
            )?,
            ExperimentId::Weber33 => match &o.anchors_csv {
                Some(path) => {
                    let file = std::fs::File::open(path).map_err(|source| ConfigError::Io {
                        path: path.clone(),
                        source,
                    })?;
                    let anchors = AnchorSet::from_csv(file)?;
                    let target = weber_reference_solution(&anchors)?;
                    build_weber_with(anchors, target, self.seed, self.repeat)?
                }
                None => build_weber(self.seed, self.repeat)?,
            },
        };

        let cfg = &mut spec.defaults;
        cfg.rng_seed = self.seed;
        if let Some(n) = o.max_iter {
            cfg.max_iterations = n;
        }
        if let Some(t) = o.tol {
            cfg.tolerance = t;
        }
        if let Some(eta) = o.eta {
            cfg.schedules = cfg.schedules.clone().with_eta(eta)?;
        }
        if let Some(c) = o.xi_scale {
            cfg.schedules.xi = Rate::InverseSquare(c);
        }
        if let Some(c) = o.psi_scale {
            cfg.schedules.psi = Rate::InverseSquare(c);
        }
        if let Some(k) = o.nu_offset {
            cfg.schedules.index_offset = k;
        }
        if let Some(d) = o.delta {
            cfg.schedules = cfg.schedules.clone().with_delta(d)?;
        }
        if let Some(s) = o.halpern_scale {
            cfg.halpern_anchor = HalpernAnchor::ScaledInitial(s);
        }
        if let Some(v) = o.viscosity {
            cfg.viscosity = Contraction::scale(v)?;
        }
        Ok(spec)
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<CliConfig, ConfigError> {
    CliConfig::from_raw(RawConfig::parse(text)?)
}
