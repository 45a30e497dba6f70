//! JSON experiment configuration with a strict, documented schema.
//!
//! Unknown keys are rejected everywhere, so a typo fails loudly instead of
//! silently running defaults. Every documented default is listed here; a run
//! is fully determined by the config file content (plus explicit CLI
//! overrides for the master seed, worker count, and output directory).
//!
//! # Schema
//!
//! ```text
//! {
//!   "potential":   { one of:
//!       "quadratic":   { "dim", "shift"? (default origin) },
//!       "rastrigin":   { "dim", "center"? (0), "offset"? (0),
//!                        "tail_radius"? (none), "tail_width"? (tail_radius/5) },
//!       "double_well": { "left_curvature", "right_curvature",
//!                        "tail_radius"? (3), "tail_width"? (1) } },
//!   "sampler":     { "sfs": { "sigma", "steps", "mc_samples",
//!                             "form"? ("gradient"|"stein", default "gradient"),
//!                             "record_path"? (false) }
//!                    | "langevin": { "sigma", "step_size", "steps",
//!                                    "burn_in"? (0), "init"? (origin),
//!                                    "init_noise"? (0) } },
//!   "baseline":    same shape as "sampler"; used by `compare`,
//!   "n_runs":      integer >= 1,
//!   "master_seed": u64 (default 0),
//!   "output_dir":  string (default "out"),
//!   "diagnostics": [ { "success_rate":   { "tau" } }
//!                  | { "w2_oracle":      { "grid_points"? (200001) } }
//!                  | { "cluster_masses": { "radius" } }
//!                  | { "constants":      { "radius", "grid_points", "tau", "epsilon" } }
//!                  | { "bounds":         { ... constants fields ...,
//!                                          "steps_grid", "mc_grid" } } ],
//!   "checks":      [ { "cluster_masses_oracle": { "sigma", "n_samples", "radius",
//!                                                 "rel_tolerance", "grid_points"?,
//!                                                 "seed"? (0) } }
//!                  | { "cluster_masses_sfs":    { "sigma", "steps", "mc_samples",
//!                                                 "n_runs", "radius", "rel_tolerance",
//!                                                 "form"? } }
//!                  | { "tail_slope":            { "tau", "sigmas", "grid_points"?,
//!                                                 "rel_tolerance" } }
//!                  | { "w2_trend":              { "sigma", "mc_samples", "steps_grid",
//!                                                 "n_runs", "form"? ("stein"),
//!                                                 "grid_points"?,
//!                                                 "min_nonincreasing"? (3) } }
//!                  | { "bound_monotonicity":    { "sigma", "radius", "grid_points",
//!                                                 "tau", "epsilon",
//!                                                 "steps_grid", "mc_grid" } } ],
//!   "constants":   { "sigma", "radius", "grid_points", "tau", "epsilon",
//!                    "steps"? (100), "mc_samples"? (100) }
//! }
//! ```
//!
//! The `run` command needs potential, sampler, and n_runs; `compare`
//! additionally needs a baseline with a matched Gaussian budget; `verify`
//! needs potential and checks; `constants` needs potential and the constants
//! section. Sections a command does not use may be present and are ignored.

use std::path::Path;

use serde::Deserialize;

use crate::drift::DriftForm;
use crate::potentials::Potential;
use crate::samplers::{LangevinConfig, SfsConfig};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("config error: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub potential: Option<PotentialSpec>,
    pub sampler: Option<SamplerSpec>,
    pub baseline: Option<SamplerSpec>,
    pub n_runs: Option<usize>,
    #[serde(default)]
    pub master_seed: u64,
    pub output_dir: Option<String>,
    #[serde(default)]
    pub diagnostics: Vec<DiagnosticSpec>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    pub constants: Option<ConstantsSpec>,
}

impl ExperimentConfig {
    /// Parses a config file, reporting JSON problems with their line anchor.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn require_potential(&self) -> Result<&PotentialSpec, ConfigError> {
        self.potential
            .as_ref()
            .ok_or_else(|| invalid("missing required section `potential`"))
    }

    pub fn require_sampler(&self) -> Result<&SamplerSpec, ConfigError> {
        self.sampler
            .as_ref()
            .ok_or_else(|| invalid("missing required section `sampler`"))
    }

    pub fn require_n_runs(&self) -> Result<usize, ConfigError> {
        match self.n_runs {
            Some(n) if n >= 1 => Ok(n),
            Some(n) => Err(invalid(format!("n_runs must be at least 1, got {n}"))),
            None => Err(invalid("missing required field `n_runs`")),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Quadratic {
        dim: usize,
        #[serde(default)]
        shift: Vec<f64>,
    },
    Rastrigin {
        dim: usize,
        #[serde(default)]
        center: f64,
        #[serde(default)]
        offset: f64,
        #[serde(default)]
        tail_radius: Option<f64>,
        #[serde(default)]
        tail_width: Option<f64>,
    },
    DoubleWell {
        left_curvature: f64,
        right_curvature: f64,
        #[serde(default = "default_dw_tail_radius")]
        tail_radius: f64,
        #[serde(default = "default_dw_tail_width")]
        tail_width: f64,
    },
}

fn default_dw_tail_radius() -> f64 {
    3.0
}

fn default_dw_tail_width() -> f64 {
    1.0
}

impl PotentialSpec {
    pub fn dim(&self) -> usize {
        match self {
            PotentialSpec::Quadratic { dim, .. } | PotentialSpec::Rastrigin { dim, .. } => *dim,
            PotentialSpec::DoubleWell { .. } => 1,
        }
    }

    /// Builds the potential, mapping every constructor failure to a config
    /// error that names the offending field.
    pub fn build(&self) -> Result<Potential, ConfigError> {
        match self {
            PotentialSpec::Quadratic { dim, shift } => {
                if *dim == 0 {
                    return Err(invalid("potential.quadratic.dim must be at least 1"));
                }
                let shift_vec = if shift.is_empty() {
                    vec![0.0; *dim]
                } else if shift.len() == *dim {
                    shift.clone()
                } else {
                    return Err(invalid(format!(
                        "potential.quadratic.shift has {} entries but dim is {dim}",
                        shift.len()
                    )));
                };
                Potential::quadratic(*dim, &shift_vec)
                    .map_err(|e| invalid(format!("potential.quadratic: {e}")))
            }
            PotentialSpec::Rastrigin {
                dim,
                center,
                offset,
                tail_radius,
                tail_width,
            } => {
                if *dim == 0 {
                    return Err(invalid("potential.rastrigin.dim must be at least 1"));
                }
                if tail_width.is_some() && tail_radius.is_none() {
                    return Err(invalid(
                        "potential.rastrigin.tail_width requires tail_radius",
                    ));
                }
                let raw = Potential::rastrigin(*dim, *center, *offset)
                    .map_err(|e| invalid(format!("potential.rastrigin: {e}")))?;
                match tail_radius {
                    None => Ok(raw),
                    Some(radius) => {
                        let width = tail_width.unwrap_or(radius / 5.0);
                        raw.with_quadratic_tail(*radius, width)
                            .map_err(|e| invalid(format!("potential.rastrigin tail: {e}")))
                    }
                }
            }
            PotentialSpec::DoubleWell {
                left_curvature,
                right_curvature,
                tail_radius,
                tail_width,
            } => Potential::double_well_1d(*left_curvature, *right_curvature)
                .map_err(|e| invalid(format!("potential.double_well: {e}")))?
                .with_quadratic_tail(*tail_radius, *tail_width)
                .map_err(|e| invalid(format!("potential.double_well tail: {e}"))),
        }
    }

    /// Whether the 1-D quadrature oracle can certify this target: dimension 1
    /// and an exact quadratic tail.
    pub fn supports_oracle(&self) -> bool {
        match self {
            PotentialSpec::Quadratic { dim, shift } => {
                *dim == 1 && shift.iter().all(|&s| s == 0.0)
            }
            PotentialSpec::Rastrigin {
                dim, tail_radius, ..
            } => *dim == 1 && tail_radius.is_some(),
            PotentialSpec::DoubleWell { .. } => true,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplerSpec {
    Sfs(SfsParams),
    Langevin(LangevinParams),
}

impl SamplerSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            SamplerSpec::Sfs(_) => "sfs",
            SamplerSpec::Langevin(_) => "langevin",
        }
    }

    /// Validates numeric constraints, naming fields as `{ctx}.{field}` in
    /// error messages (ctx is "sampler" or "baseline").
    pub fn validate(&self, ctx: &str, dim: usize) -> Result<(), ConfigError> {
        match self {
            SamplerSpec::Sfs(p) => p.validate(ctx),
            SamplerSpec::Langevin(p) => p.validate(ctx, dim),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SfsParams {
    pub sigma: f64,
    pub steps: usize,
    pub mc_samples: usize,
    #[serde(default)]
    pub form: DriftForm,
    #[serde(default)]
    pub record_path: bool,
}

impl SfsParams {
    pub fn validate(&self, ctx: &str) -> Result<(), ConfigError> {
        if !(self.sigma > 0.0 && self.sigma <= 1.0) {
            return Err(invalid(format!(
                "{ctx}.sigma must lie in (0, 1], got {}",
                self.sigma
            )));
        }
        if self.steps == 0 {
            return Err(invalid(format!("{ctx}.steps must be at least 1")));
        }
        if self.mc_samples == 0 {
            return Err(invalid(format!("{ctx}.mc_samples must be at least 1")));
        }
        Ok(())
    }

    pub fn to_config(&self, seed: u64) -> SfsConfig {
        SfsConfig {
            sigma: self.sigma,
            steps: self.steps,
            mc_samples: self.mc_samples,
            form: self.form,
            seed,
            record_path: self.record_path,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LangevinParams {
    pub sigma: f64,
    pub step_size: f64,
    pub steps: usize,
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default)]
    pub init: Option<Vec<f64>>,
    /// Gaussian spread applied to the start point, per run (0 = off).
    #[serde(default)]
    pub init_noise: f64,
}

impl LangevinParams {
    pub fn validate(&self, ctx: &str, dim: usize) -> Result<(), ConfigError> {
        if !(self.sigma > 0.0 && self.sigma <= 1.0) {
            return Err(invalid(format!(
                "{ctx}.sigma must lie in (0, 1], got {}",
                self.sigma
            )));
        }
        if !(self.step_size > 0.0) {
            return Err(invalid(format!(
                "{ctx}.step_size must be positive, got {}",
                self.step_size
            )));
        }
        if self.steps == 0 {
            return Err(invalid(format!("{ctx}.steps must be at least 1")));
        }
        if self.burn_in >= self.steps {
            return Err(invalid(format!(
                "{ctx}.burn_in ({}) must be smaller than steps ({})",
                self.burn_in, self.steps
            )));
        }
        if let Some(init) = &self.init {
            if init.len() != dim {
                return Err(invalid(format!(
                    "{ctx}.init has {} entries but the potential has dim {dim}",
                    init.len()
                )));
            }
        }
        if !(self.init_noise >= 0.0 && self.init_noise.is_finite()) {
            return Err(invalid(format!(
                "{ctx}.init_noise must be finite and nonnegative, got {}",
                self.init_noise
            )));
        }
        Ok(())
    }

    pub fn to_config(&self, dim: usize, seed: u64) -> LangevinConfig {
        LangevinConfig {
            sigma: self.sigma,
            step_size: self.step_size,
            steps: self.steps,
            burn_in: self.burn_in,
            init: self.init.clone().unwrap_or_else(|| vec![0.0; dim]),
            init_noise: self.init_noise,
            seed,
        }
    }
}

fn default_grid_points() -> usize {
    200_001
}

fn default_min_nonincreasing() -> usize {
    3
}

fn default_stein() -> DriftForm {
    DriftForm::Stein
}

fn default_budget() -> usize {
    100
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DiagnosticSpec {
    SuccessRate {
        tau: f64,
    },
    W2Oracle {
        #[serde(default = "default_grid_points")]
        grid_points: usize,
    },
    ClusterMasses {
        radius: f64,
    },
    Constants {
        radius: f64,
        grid_points: usize,
        tau: f64,
        epsilon: f64,
    },
    Bounds {
        radius: f64,
        grid_points: usize,
        tau: f64,
        epsilon: f64,
        steps_grid: Vec<usize>,
        mc_grid: Vec<usize>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    ClusterMassesOracle {
        sigma: f64,
        n_samples: usize,
        radius: f64,
        rel_tolerance: f64,
        #[serde(default = "default_grid_points")]
        grid_points: usize,
        #[serde(default)]
        seed: u64,
    },
    ClusterMassesSfs {
        sigma: f64,
        steps: usize,
        mc_samples: usize,
        n_runs: usize,
        radius: f64,
        rel_tolerance: f64,
        #[serde(default)]
        form: DriftForm,
    },
    TailSlope {
        tau: f64,
        sigmas: Vec<f64>,
        rel_tolerance: f64,
        #[serde(default = "default_grid_points")]
        grid_points: usize,
    },
    W2Trend {
        sigma: f64,
        mc_samples: usize,
        steps_grid: Vec<usize>,
        n_runs: usize,
        #[serde(default = "default_stein")]
        form: DriftForm,
        #[serde(default = "default_grid_points")]
        grid_points: usize,
        #[serde(default = "default_min_nonincreasing")]
        min_nonincreasing: usize,
    },
    BoundMonotonicity {
        sigma: f64,
        radius: f64,
        grid_points: usize,
        tau: f64,
        epsilon: f64,
        steps_grid: Vec<usize>,
        mc_grid: Vec<usize>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    pub sigma: f64,
    pub radius: f64,
    pub grid_points: usize,
    pub tau: f64,
    pub epsilon: f64,
    #[serde(default = "default_budget")]
    pub steps: usize,
    #[serde(default = "default_budget")]
    pub mc_samples: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_run_config_parses_with_documented_defaults() {
        let cfg = ExperimentConfig::parse(
            r#"{
                "potential": {"rastrigin": {"dim": 2}},
                "sampler": {"sfs": {"sigma": 0.01, "steps": 200, "mc_samples": 1000}},
                "n_runs": 50
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.master_seed, 0);
        assert_eq!(cfg.require_n_runs().unwrap(), 50);
        let SamplerSpec::Sfs(p) = cfg.require_sampler().unwrap() else {
            panic!("expected sfs");
        };
        assert_eq!(p.form, DriftForm::Gradient);
        assert!(!p.record_path);
        let pot = cfg.require_potential().unwrap().build().unwrap();
        assert_eq!(pot.dim(), 2);
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line_anchor() {
        let err = ExperimentConfig::parse(
            "{\n  \"potential\": {\"quadratic\": {\"dim\": 1}},\n  \"samplerr\": 3\n}",
        )
        .unwrap_err();
        match err {
            ConfigError::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("unknown field"), "{message}");
                assert!(message.contains("samplerr"), "{message}");
            }
            other => panic!("expected parse error, got {other}"),
        }

        // nested unknown keys are rejected too
        let err = ExperimentConfig::parse(
            r#"{"sampler": {"sfs": {"sigma": 0.1, "steps": 1, "mc_samples": 1, "sigmaa": 2}}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }), "{err}");
    }

    #[test]
    fn constraint_violations_name_the_field() {
        let cfg = ExperimentConfig::parse(
            r#"{
                "potential": {"quadratic": {"dim": 2}},
                "sampler": {"sfs": {"sigma": 1.5, "steps": 10, "mc_samples": 10}},
                "n_runs": 1
            }"#,
        )
        .unwrap();
        let err = cfg.require_sampler().unwrap().validate("sampler", 2).unwrap_err();
        assert_eq!(
            err.to_string(),
            "config error: sampler.sigma must lie in (0, 1], got 1.5"
        );

        let cfg = ExperimentConfig::parse(
            r#"{
                "sampler": {"langevin": {"sigma": 0.1, "step_size": 0.0, "steps": 5}}
            }"#,
        )
        .unwrap();
        let err = cfg.require_sampler().unwrap().validate("baseline", 1).unwrap_err();
        assert!(err.to_string().contains("baseline.step_size"), "{err}");
    }

    #[test]
    fn potential_specs_build_and_report_oracle_support() {
        let quad = PotentialSpec::Quadratic {
            dim: 1,
            shift: vec![],
        };
        assert!(quad.supports_oracle());
        assert_eq!(quad.build().unwrap().dim(), 1);

        let shifted = PotentialSpec::Quadratic {
            dim: 2,
            shift: vec![1.0, 0.0],
        };
        assert!(!shifted.supports_oracle());

        let raw_rast = PotentialSpec::Rastrigin {
            dim: 1,
            center: 0.0,
            offset: 0.0,
            tail_radius: None,
            tail_width: None,
        };
        assert!(!raw_rast.supports_oracle());

        let tailed = PotentialSpec::Rastrigin {
            dim: 1,
            center: 0.0,
            offset: 0.0,
            tail_radius: Some(5.0),
            tail_width: None,
        };
        assert!(tailed.supports_oracle());
        let p = tailed.build().unwrap();
        assert_eq!(p.quadratic_tail_radius(), Some(6.0));

        let dw = PotentialSpec::DoubleWell {
            left_curvature: 1.0,
            right_curvature: 4.0,
            tail_radius: 3.0,
            tail_width: 1.0,
        };
        assert!(dw.supports_oracle());
        assert_eq!(dw.build().unwrap().quadratic_tail_radius(), Some(4.0));
    }

    #[test]
    fn dimension_mismatches_are_config_errors() {
        let bad = PotentialSpec::Quadratic {
            dim: 2,
            shift: vec![1.0],
        };
        let err = bad.build().unwrap_err();
        assert!(err.to_string().contains("shift has 1 entries"), "{err}");

        let lan = LangevinParams {
            sigma: 0.1,
            step_size: 0.01,
            steps: 10,
            burn_in: 0,
            init: Some(vec![0.0]),
            init_noise: 0.0,
        };
        let err = lan.validate("baseline", 2).unwrap_err();
        assert!(err.to_string().contains("baseline.init"), "{err}");
        let noisy = LangevinParams {
            init: None,
            init_noise: f64::NAN,
            ..lan.clone()
        };
        let err = noisy.validate("baseline", 1).unwrap_err();
        assert!(err.to_string().contains("baseline.init_noise"), "{err}");
        // default init is the origin at the right dimension
        let lan2 = LangevinParams { init: None, ..lan };
        assert_eq!(lan2.to_config(3, 9).init, vec![0.0; 3]);
    }

    #[test]
    fn checks_and_constants_sections_parse() {
        let cfg = ExperimentConfig::parse(
            r#"{
                "potential": {"double_well": {"left_curvature": 1.0, "right_curvature": 4.0}},
                "checks": [
                    {"cluster_masses_oracle": {"sigma": 0.02, "n_samples": 1000,
                                               "radius": 0.4, "rel_tolerance": 0.05}},
                    {"tail_slope": {"tau": 0.5, "sigmas": [0.2, 0.1],
                                    "rel_tolerance": 0.15}}
                ],
                "constants": {"sigma": 0.5, "radius": 5.0, "grid_points": 201,
                               "tau": 0.5, "epsilon": 0.05}
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.checks.len(), 2);
        match &cfg.checks[0] {
            CheckSpec::ClusterMassesOracle {
                grid_points, seed, ..
            } => {
                assert_eq!(*grid_points, 200_001);
                assert_eq!(*seed, 0);
            }
            other => panic!("unexpected check {other:?}"),
        }
        let c = cfg.constants.as_ref().unwrap();
        assert_eq!(c.steps, 100);
        assert_eq!(c.mc_samples, 100);
    }
}
