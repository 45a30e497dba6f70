//! Experiment orchestration behind the command-line interface: loads and
//! validates a config, executes sampler batches, diagnostics, verification
//! checks, or the constants calculator, and writes result files.
//!
//! Determinism contract: every output file except the manifest's wall-clock
//! field is a pure function of the config content (plus explicit seed
//! override). CSV floats use `{:.16e}` (17 significant digits, round-trip
//! exact); JSON floats use serde_json's shortest round-trip form; JSON object
//! keys serialize in a fixed order. Worker count never changes any output
//! byte.
//!
//! Exit-code convention (surfaced through [`RunnerError::exit_code`]):
//! 0 success, 1 runtime failure (sampler blow-up, I/O, failed verification
//! check), 2 config error (unreadable, unparsable, or constraint violation).
//!
//! The compare command derives one sub-master seed per side from the master
//! seed, so the two sides consume independent streams. The w2_trend check
//! reuses one master seed across every step count on purpose: common random
//! numbers correlate the per-step-count batches and sharpen the trend
//! comparison.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::{
    CheckSpec, ConfigError, DiagnosticSpec, ExperimentConfig, PotentialSpec, SamplerSpec,
};
use crate::constants::{compute_constants, BoundInputs, ConstantsReport};
use crate::diagnostics::{
    bound_table, cluster_masses, large_deviation_slope, success_rate, SuccessReport, W2Report,
};

use crate::gibbs::{laplace_weights, GibbsOracle1d};
use crate::potentials::Potential;
use crate::rng::run_seed;
use crate::samplers::{run_langevin_batch, run_sfs_batch, RunResult};

#[derive(Debug, thiserror::Error)]
pub enum RunnerError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Runtime(String),
}

impl RunnerError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunnerError::Config(_) => 2,
            RunnerError::Runtime(_) => 1,
        }
    }
}

fn runtime(msg: impl std::fmt::Display) -> RunnerError {
    RunnerError::Runtime(msg.to_string())
}

fn invalid(msg: impl Into<String>) -> RunnerError {
    RunnerError::Config(ConfigError::Invalid(msg.into()))
}

/// Command-line overrides applied on top of the config file.
#[derive(Clone, Debug, Default)]
pub struct CliOverrides {
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub master_seed: Option<u64>,
}

struct Prepared {
    cfg: ExperimentConfig,
    config_sha256: String,
    out_dir: PathBuf,
    master_seed: u64,
    started: Instant,
}

fn prepare(config_path: &Path, overrides: &CliOverrides) -> Result<Prepared, RunnerError> {
    let text = fs::read_to_string(config_path).map_err(|source| ConfigError::Io {
        path: config_path.display().to_string(),
        source,
    })?;
    let config_sha256 = hex_digest(text.as_bytes());
    let cfg = ExperimentConfig::parse(&text)?;
    let out_dir = overrides
        .out_dir
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let master_seed = overrides.master_seed.unwrap_or(cfg.master_seed);
    Ok(Prepared {
        cfg,
        config_sha256,
        out_dir,
        master_seed,
        started: Instant::now(),
    })
}

fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

fn with_workers<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, RunnerError> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(invalid("--workers must be at least 1")),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| runtime(format!("cannot build worker pool: {e}")))?
            .install(f)),
    }
}

#[derive(Serialize)]
struct Manifest {
    config_sha256: String,
    tool_version: &'static str,
    command: &'static str,
    master_seed: u64,
    n_runs: usize,
    per_run_seeds: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline_run_seeds: Option<Vec<u64>>,
    outputs: Vec<String>,
    /// Excluded from the byte-determinism contract.
    wall_clock_seconds: f64,
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), RunnerError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| runtime(format!("cannot serialize {name}: {e}")))?;
    text.push('\n');
    fs::write(dir.join(name), text)
        .map_err(|e| runtime(format!("cannot write {name}: {e}")))?;
    println!("wrote {}", dir.join(name).display());
    Ok(())
}

fn write_runs_csv(dir: &Path, name: &str, dim: usize, runs: &[RunResult]) -> Result<(), RunnerError> {
    let mut out = String::new();
    out.push_str("run_index");
    for i in 0..dim {
        out.push_str(&format!(",x_{i}"));
    }
    out.push_str(",final_value,best_value,gaussians_consumed,seed\n");
    for (i, r) in runs.iter().enumerate() {
        out.push_str(&i.to_string());
        for c in &r.final_point {
            out.push_str(&format!(",{c:.16e}"));
        }
        out.push_str(&format!(
            ",{:.16e},{:.16e},{},{}\n",
            r.final_value, r.best_value, r.gaussians_consumed, r.seed_used
        ));
    }
    fs::write(dir.join(name), out)
        .map_err(|e| runtime(format!("cannot write {name}: {e}")))?;
    println!("wrote {}", dir.join(name).display());
    Ok(())
}

#[derive(Serialize)]
struct SideStats {
    kind: &'static str,
    n_runs: usize,
    mean_final_value: f64,
    median_final_value: f64,
    min_final_value: f64,
    max_final_value: f64,
    mean_best_value: f64,
    median_best_value: f64,
    mean_final_point: Vec<f64>,
    var_final_point: Vec<f64>,
    total_gaussians: u64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn side_stats(kind: &'static str, dim: usize, runs: &[RunResult]) -> SideStats {
    let finals: Vec<f64> = runs.iter().map(|r| r.final_value).collect();
    let bests: Vec<f64> = runs.iter().map(|r| r.best_value).collect();
    let mut mean_point = vec![0.0; dim];
    let mut var_point = vec![0.0; dim];
    for r in runs {
        for i in 0..dim {
            mean_point[i] += r.final_point[i];
        }
    }
    for m in mean_point.iter_mut() {
        *m /= runs.len() as f64;
    }
    for r in runs {
        for i in 0..dim {
            let d = r.final_point[i] - mean_point[i];
            var_point[i] += d * d;
        }
    }
    for v in var_point.iter_mut() {
        *v /= runs.len() as f64;
    }
    SideStats {
        kind,
        n_runs: runs.len(),
        mean_final_value: mean(&finals),
        median_final_value: median(&finals),
        min_final_value: finals.iter().cloned().fold(f64::INFINITY, f64::min),
        max_final_value: finals.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        mean_best_value: mean(&bests),
        median_best_value: median(&bests),
        mean_final_point: mean_point,
        var_final_point: var_point,
        total_gaussians: runs.iter().map(|r| r.gaussians_consumed).sum(),
    }
}

fn execute_batch(
    potential: &Potential,
    sampler: &SamplerSpec,
    n_runs: usize,
    master_seed: u64,
) -> Result<Vec<RunResult>, RunnerError> {
    match sampler {
        SamplerSpec::Sfs(p) => run_sfs_batch(potential, &p.to_config(0), n_runs, master_seed)
            .map_err(|e| runtime(e)),
        SamplerSpec::Langevin(p) => {
            run_langevin_batch(potential, &p.to_config(potential.dim(), 0), n_runs, master_seed)
                .map_err(|e| runtime(e))
        }
    }
}

fn sampler_sigma(sampler: &SamplerSpec) -> f64 {
    match sampler {
        SamplerSpec::Sfs(p) => p.sigma,
        SamplerSpec::Langevin(p) => p.sigma,
    }
}

/// (steps, mc_samples) budget a constants report should be evaluated at.
fn sampler_budget(sampler: &SamplerSpec) -> (usize, usize) {
    match sampler {
        SamplerSpec::Sfs(p) => (p.steps, p.mc_samples),
        SamplerSpec::Langevin(p) => (p.steps, 1),
    }
}

fn validate_diagnostics(
    diags: &[DiagnosticSpec],
    spec: &PotentialSpec,
) -> Result<(), RunnerError> {
    for (i, d) in diags.iter().enumerate() {
        let at = |field: &str, msg: String| invalid(format!("diagnostics[{i}].{field} {msg}"));
        match d {
            DiagnosticSpec::SuccessRate { tau } => {
                if !(*tau > 0.0) {
                    return Err(at("success_rate.tau", format!("must be positive, got {tau}")));
                }
            }
            DiagnosticSpec::W2Oracle { grid_points } => {
                if !spec.supports_oracle() {
                    return Err(invalid(format!(
                        "diagnostics[{i}].w2_oracle requires a 1-D potential with a quadratic tail"
                    )));
                }
                if *grid_points < 1000 {
                    return Err(at(
                        "w2_oracle.grid_points",
                        format!("must be at least 1000, got {grid_points}"),
                    ));
                }
            }
            DiagnosticSpec::ClusterMasses { radius } => {
                if !(*radius > 0.0) {
                    return Err(at(
                        "cluster_masses.radius",
                        format!("must be positive, got {radius}"),
                    ));
                }
            }
            DiagnosticSpec::Constants {
                radius,
                grid_points,
                tau,
                epsilon,
            }
            | DiagnosticSpec::Bounds {
                radius,
                grid_points,
                tau,
                epsilon,
                ..
            } => {
                let name = if matches!(d, DiagnosticSpec::Constants { .. }) {
                    "constants"
                } else {
                    "bounds"
                };
                if !(*radius > 0.0) {
                    return Err(at(name, format!("radius must be positive, got {radius}")));
                }
                if *grid_points < 9 {
                    return Err(at(
                        name,
                        format!("grid_points must be at least 9, got {grid_points}"),
                    ));
                }
                if !(*epsilon > 0.0 && epsilon < tau) {
                    return Err(at(
                        name,
                        format!("epsilon must lie in (0, tau), got epsilon={epsilon}, tau={tau}"),
                    ));
                }
                if spec.dim() > 3 {
                    return Err(at(name, "supports dimension at most 3".to_string()));
                }
                if let DiagnosticSpec::Bounds {
                    steps_grid, mc_grid, ..
                } = d
                {
                    if steps_grid.is_empty() || steps_grid.iter().any(|&s| s == 0) {
                        return Err(at(name, "steps_grid entries must be at least 1".into()));
                    }
                    if mc_grid.is_empty() || mc_grid.iter().any(|&m| m == 0) {
                        return Err(at(name, "mc_grid entries must be at least 1".into()));
                    }
                }
            }
        }
    }
    Ok(())
}

fn run_diagnostics(
    diags: &[DiagnosticSpec],
    potential: &Potential,
    sampler: &SamplerSpec,
    runs: &[RunResult],
) -> Result<Map<String, Value>, RunnerError> {
    let mut out = Map::new();
    let sigma = sampler_sigma(sampler);
    let (steps, mc_samples) = sampler_budget(sampler);
    for d in diags {
        match d {
            DiagnosticSpec::SuccessRate { tau } => {
                let finals: Vec<f64> = runs.iter().map(|r| r.final_value).collect();
                let rep =
                    success_rate(&finals, *tau).map_err(|e| runtime(format!("success_rate: {e}")))?;
                out.insert("success_rate".into(), to_value(&rep)?);
            }
            DiagnosticSpec::W2Oracle { grid_points } => {
                let oracle = GibbsOracle1d::build(potential, sigma, *grid_points, None)
                    .map_err(|e| runtime(format!("w2_oracle: {e}")))?;
                let finals: Vec<f64> = runs.iter().map(|r| r.final_point[0]).collect();
                let reference = oracle.sample_stratified(finals.len());
                let rep = W2Report::exact_1d(&finals, &reference)
                    .map_err(|e| runtime(format!("w2_oracle: {e}")))?;
                out.insert("w2_oracle".into(), to_value(&rep)?);
            }
            DiagnosticSpec::ClusterMasses { radius } => {
                let centers: Vec<Vec<f64>> =
                    potential.minima().iter().map(|m| m.point.clone()).collect();
                if centers.is_empty() {
                    return Err(runtime("cluster_masses: potential lists no minima"));
                }
                let points: Vec<Vec<f64>> =
                    runs.iter().map(|r| r.final_point.clone()).collect();
                let rep = cluster_masses(&points, &centers, *radius)
                    .map_err(|e| runtime(format!("cluster_masses: {e}")))?;
                let expected = laplace_weights(potential).ok();
                out.insert(
                    "cluster_masses".into(),
                    json!({"observed": to_value(&rep)?, "laplace_weights": expected}),
                );
            }
            DiagnosticSpec::Constants {
                radius,
                grid_points,
                tau,
                epsilon,
            } => {
                let report = constants_report(
                    potential, sigma, *radius, *grid_points, *tau, *epsilon, steps, mc_samples,
                )?;
                out.insert("constants".into(), to_value(&report)?);
            }
            DiagnosticSpec::Bounds {
                radius,
                grid_points,
                tau,
                epsilon,
                steps_grid,
                mc_grid,
            } => {
                let report = constants_report(
                    potential, sigma, *radius, *grid_points, *tau, *epsilon, steps, mc_samples,
                )?;
                let rows = bound_table(&report, steps_grid, mc_grid);
                out.insert("bounds".into(), to_value(&rows)?);
            }
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn constants_report(
    potential: &Potential,
    sigma: f64,
    radius: f64,
    grid_points: usize,
    tau: f64,
    epsilon: f64,
    steps: usize,
    mc_samples: usize,
) -> Result<ConstantsReport, RunnerError> {
    compute_constants(
        potential,
        sigma,
        radius,
        grid_points,
        &BoundInputs {
            tau,
            epsilon,
            steps,
            mc_samples,
        },
    )
    .map_err(|e| runtime(format!("constants: {e}")))
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, RunnerError> {
    serde_json::to_value(v).map_err(|e| runtime(format!("serialization: {e}")))
}

#[derive(Serialize)]
struct Summary {
    config_sha256: String,
    master_seed: u64,
    dim: usize,
    stats: SideStats,
    diagnostics: Map<String, Value>,
}

/// Executes the configured batch and writes `runs.csv`, `summary.json`, and
/// `manifest.json` into the output directory.
pub fn cmd_run(config_path: &Path, overrides: &CliOverrides) -> Result<(), RunnerError> {
    let prep = prepare(config_path, overrides)?;
    let cfg = &prep.cfg;
    let spec = cfg.require_potential()?;
    let potential = spec.build()?;
    let sampler = cfg.require_sampler()?;
    sampler.validate("sampler", potential.dim())?;
    let n_runs = cfg.require_n_runs()?;
    validate_diagnostics(&cfg.diagnostics, spec)?;

    let runs = with_workers(overrides.workers, || {
        execute_batch(&potential, sampler, n_runs, prep.master_seed)
    })??;
    let diagnostics = run_diagnostics(&cfg.diagnostics, &potential, sampler, &runs)?;

    fs::create_dir_all(&prep.out_dir)
        .map_err(|e| runtime(format!("cannot create output dir: {e}")))?;
    write_runs_csv(&prep.out_dir, "runs.csv", potential.dim(), &runs)?;
    let summary = Summary {
        config_sha256: prep.config_sha256.clone(),
        master_seed: prep.master_seed,
        dim: potential.dim(),
        stats: side_stats(sampler.kind(), potential.dim(), &runs),
        diagnostics,
    };
    write_json(&prep.out_dir, "summary.json", &summary)?;
    let manifest = Manifest {
        config_sha256: prep.config_sha256,
        tool_version: env!("CARGO_PKG_VERSION"),
        command: "run",
        master_seed: prep.master_seed,
        n_runs,
        per_run_seeds: runs.iter().map(|r| r.seed_used).collect(),
        baseline_run_seeds: None,
        outputs: vec![
            "runs.csv".into(),
            "summary.json".into(),
            "manifest.json".into(),
        ],
        wall_clock_seconds: prep.started.elapsed().as_secs_f64(),
    };
    write_json(&prep.out_dir, "manifest.json", &manifest)
}

/// Drift-draw budget used for the matched-budget precondition: an SFS run
/// spends `steps * mc_samples` drift draws per output sample; a Langevin run
/// spends one gradient step per draw, so its budget is `steps`.
fn drift_budget(sampler: &SamplerSpec) -> u64 {
    match sampler {
        SamplerSpec::Sfs(p) => p.steps as u64 * p.mc_samples as u64,
        SamplerSpec::Langevin(p) => p.steps as u64,
    }
}

#[derive(Serialize)]
struct ComparisonSuccess {
    tau: f64,
    sampler_final: SuccessReport,
    baseline_final: SuccessReport,
    baseline_best: SuccessReport,
}

#[derive(Serialize)]
struct Comparison {
    config_sha256: String,
    master_seed: u64,
    sampler: SideStats,
    baseline: SideStats,
    sampler_mean_final_minus_baseline_mean_best: f64,
    sampler_beats_baseline_best: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    success: Option<ComparisonSuccess>,
}

/// Runs the sampler and the baseline at matched budgets and writes
/// `sampler_runs.csv`, `baseline_runs.csv`, `comparison.json`, and
/// `manifest.json`.
pub fn cmd_compare(config_path: &Path, overrides: &CliOverrides) -> Result<(), RunnerError> {
    let prep = prepare(config_path, overrides)?;
    let cfg = &prep.cfg;
    let spec = cfg.require_potential()?;
    let potential = spec.build()?;
    let sampler = cfg.require_sampler()?;
    sampler.validate("sampler", potential.dim())?;
    let baseline = cfg
        .baseline
        .as_ref()
        .ok_or_else(|| invalid("compare requires a `baseline` sampler section"))?;
    baseline.validate("baseline", potential.dim())?;
    let n_runs = cfg.require_n_runs()?;
    let (bs, bb) = (drift_budget(sampler), drift_budget(baseline));
    if bs != bb {
        return Err(invalid(format!(
            "compare requires matched Gaussian budgets: sampler spends {bs} drift draws per run, baseline spends {bb}"
        )));
    }

    let sampler_master = run_seed(prep.master_seed, 0);
    let baseline_master = run_seed(prep.master_seed, 1);
    let (sampler_runs, baseline_runs) = with_workers(overrides.workers, || {
        let a = execute_batch(&potential, sampler, n_runs, sampler_master)?;
        let b = execute_batch(&potential, baseline, n_runs, baseline_master)?;
        Ok::<_, RunnerError>((a, b))
    })??;

    let success = cfg.diagnostics.iter().find_map(|d| match d {
        DiagnosticSpec::SuccessRate { tau } => Some(*tau),
        _ => None,
    });
    let success = match success {
        None => None,
        Some(tau) => {
            let sf: Vec<f64> = sampler_runs.iter().map(|r| r.final_value).collect();
            let bf: Vec<f64> = baseline_runs.iter().map(|r| r.final_value).collect();
            let bb: Vec<f64> = baseline_runs.iter().map(|r| r.best_value).collect();
            Some(ComparisonSuccess {
                tau,
                sampler_final: success_rate(&sf, tau).map_err(|e| runtime(e))?,
                baseline_final: success_rate(&bf, tau).map_err(|e| runtime(e))?,
                baseline_best: success_rate(&bb, tau).map_err(|e| runtime(e))?,
            })
        }
    };

    fs::create_dir_all(&prep.out_dir)
        .map_err(|e| runtime(format!("cannot create output dir: {e}")))?;
    let dim = potential.dim();
    write_runs_csv(&prep.out_dir, "sampler_runs.csv", dim, &sampler_runs)?;
    write_runs_csv(&prep.out_dir, "baseline_runs.csv", dim, &baseline_runs)?;
    let sampler_stats = side_stats(sampler.kind(), dim, &sampler_runs);
    let baseline_stats = side_stats(baseline.kind(), dim, &baseline_runs);
    let gap = sampler_stats.mean_final_value - baseline_stats.mean_best_value;
    let comparison = Comparison {
        config_sha256: prep.config_sha256.clone(),
        master_seed: prep.master_seed,
        sampler: sampler_stats,
        baseline: baseline_stats,
        sampler_mean_final_minus_baseline_mean_best: gap,
        sampler_beats_baseline_best: gap < 0.0,
        success,
    };
    write_json(&prep.out_dir, "comparison.json", &comparison)?;
    let manifest = Manifest {
        config_sha256: prep.config_sha256,
        tool_version: env!("CARGO_PKG_VERSION"),
        command: "compare",
        master_seed: prep.master_seed,
        n_runs,
        per_run_seeds: sampler_runs.iter().map(|r| r.seed_used).collect(),
        baseline_run_seeds: Some(baseline_runs.iter().map(|r| r.seed_used).collect()),
        outputs: vec![
            "sampler_runs.csv".into(),
            "baseline_runs.csv".into(),
            "comparison.json".into(),
            "manifest.json".into(),
        ],
        wall_clock_seconds: prep.started.elapsed().as_secs_f64(),
    };
    write_json(&prep.out_dir, "manifest.json", &manifest)
}

#[derive(Serialize)]
struct CheckResult {
    name: &'static str,
    pass: bool,
    details: Value,
}

#[derive(Serialize)]
struct VerificationReport {
    config_sha256: String,
    tool_version: &'static str,
    master_seed: u64,
    checks: Vec<CheckResult>,
    n_passed: usize,
    n_failed: usize,
    all_passed: bool,
}

fn validate_checks(checks: &[CheckSpec], spec: &PotentialSpec) -> Result<(), RunnerError> {
    if checks.is_empty() {
        return Err(invalid("verify requires a non-empty `checks` list"));
    }
    for (i, c) in checks.iter().enumerate() {
        let fail = |msg: String| invalid(format!("checks[{i}]: {msg}"));
        match c {
            CheckSpec::ClusterMassesOracle {
                sigma,
                n_samples,
                radius,
                rel_tolerance,
                grid_points,
                ..
            } => {
                if !spec.supports_oracle() {
                    return Err(fail(
                        "cluster_masses_oracle requires a 1-D potential with a quadratic tail"
                            .into(),
                    ));
                }
                check_sigma(*sigma).map_err(&fail)?;
                if *n_samples == 0 {
                    return Err(fail("n_samples must be at least 1".into()));
                }
                check_positive("radius", *radius).map_err(&fail)?;
                check_positive("rel_tolerance", *rel_tolerance).map_err(&fail)?;
                if *grid_points < 1000 {
                    return Err(fail(format!(
                        "grid_points must be at least 1000, got {grid_points}"
                    )));
                }
            }
            CheckSpec::ClusterMassesSfs {
                sigma,
                steps,
                mc_samples,
                n_runs,
                radius,
                rel_tolerance,
                ..
            } => {
                check_sigma(*sigma).map_err(&fail)?;
                if *steps == 0 || *mc_samples == 0 || *n_runs == 0 {
                    return Err(fail(
                        "steps, mc_samples, and n_runs must be at least 1".into(),
                    ));
                }
                check_positive("radius", *radius).map_err(&fail)?;
                check_positive("rel_tolerance", *rel_tolerance).map_err(&fail)?;
            }
            CheckSpec::TailSlope {
                tau,
                sigmas,
                rel_tolerance,
                grid_points,
            } => {
                if !spec.supports_oracle() {
                    return Err(fail(
                        "tail_slope requires a 1-D potential with a quadratic tail".into(),
                    ));
                }
                check_positive("tau", *tau).map_err(&fail)?;
                check_positive("rel_tolerance", *rel_tolerance).map_err(&fail)?;
                if sigmas.is_empty() {
                    return Err(fail("sigmas must be non-empty".into()));
                }
                if *grid_points < 1000 {
                    return Err(fail(format!(
                        "grid_points must be at least 1000, got {grid_points}"
                    )));
                }
            }
            CheckSpec::W2Trend {
                sigma,
                mc_samples,
                steps_grid,
                n_runs,
                grid_points,
                min_nonincreasing,
                ..
            } => {
                if !spec.supports_oracle() {
                    return Err(fail(
                        "w2_trend requires a 1-D potential with a quadratic tail".into(),
                    ));
                }
                check_sigma(*sigma).map_err(&fail)?;
                if *mc_samples == 0 || *n_runs == 0 {
                    return Err(fail("mc_samples and n_runs must be at least 1".into()));
                }
                if steps_grid.len() < 2 || steps_grid.iter().any(|&s| s == 0) {
                    return Err(fail(
                        "steps_grid needs at least 2 positive step counts".into(),
                    ));
                }
                if *min_nonincreasing > steps_grid.len() - 1 {
                    return Err(fail(format!(
                        "min_nonincreasing ({min_nonincreasing}) exceeds the {} consecutive pairs",
                        steps_grid.len() - 1
                    )));
                }
                if *grid_points < 1000 {
                    return Err(fail(format!(
                        "grid_points must be at least 1000, got {grid_points}"
                    )));
                }
            }
            CheckSpec::BoundMonotonicity {
                sigma,
                radius,
                grid_points,
                tau,
                epsilon,
                steps_grid,
                mc_grid,
            } => {
                check_sigma(*sigma).map_err(&fail)?;
                check_positive("radius", *radius).map_err(&fail)?;
                if *grid_points < 9 {
                    return Err(fail(format!(
                        "grid_points must be at least 9, got {grid_points}"
                    )));
                }
                if !(*epsilon > 0.0 && epsilon < tau) {
                    return Err(fail(format!(
                        "epsilon must lie in (0, tau), got epsilon={epsilon}, tau={tau}"
                    )));
                }
                if steps_grid.is_empty() || mc_grid.is_empty() {
                    return Err(fail("steps_grid and mc_grid must be non-empty".into()));
                }
                if spec.dim() > 3 {
                    return Err(fail("constants support dimension at most 3".into()));
                }
            }
        }
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<(), String> {
    if sigma > 0.0 && sigma <= 1.0 {
        Ok(())
    } else {
        Err(format!("sigma must lie in (0, 1], got {sigma}"))
    }
}

fn check_positive(name: &str, v: f64) -> Result<(), String> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(format!("{name} must be positive, got {v}"))
    }
}

fn mass_check_details(
    expected: &[f64],
    observed: &[f64],
    remainder: f64,
    rel_tolerance: f64,
) -> (bool, Value) {
    let rel_errors: Vec<f64> = expected
        .iter()
        .zip(observed)
        .map(|(e, o)| (o - e).abs() / e)
        .collect();
    let pass = rel_errors.iter().all(|&e| e <= rel_tolerance);
    let details = json!({
        "expected": expected,
        "observed": observed,
        "remainder": remainder,
        "rel_errors": rel_errors,
        "rel_tolerance": rel_tolerance,
    });
    (pass, details)
}

fn run_check(
    check: &CheckSpec,
    potential: &Potential,
    master_seed: u64,
) -> Result<CheckResult, RunnerError> {
    match check {
        CheckSpec::ClusterMassesOracle {
            sigma,
            n_samples,
            radius,
            rel_tolerance,
            grid_points,
            seed,
        } => {
            let oracle = GibbsOracle1d::build(potential, *sigma, *grid_points, None)
                .map_err(|e| runtime(format!("cluster_masses_oracle: {e}")))?;
            let samples: Vec<Vec<f64>> = oracle
                .sample_seeded(*n_samples, *seed)
                .into_iter()
                .map(|x| vec![x])
                .collect();
            let centers: Vec<Vec<f64>> =
                potential.minima().iter().map(|m| m.point.clone()).collect();
            let expected = laplace_weights(potential)
                .map_err(|e| runtime(format!("cluster_masses_oracle: {e}")))?;
            let rep = cluster_masses(&samples, &centers, *radius)
                .map_err(|e| runtime(format!("cluster_masses_oracle: {e}")))?;
            let (pass, details) =
                mass_check_details(&expected, &rep.masses, rep.remainder, *rel_tolerance);
            Ok(CheckResult {
                name: "cluster_masses_oracle",
                pass,
                details,
            })
        }
        CheckSpec::ClusterMassesSfs {
            sigma,
            steps,
            mc_samples,
            n_runs,
            radius,
            rel_tolerance,
            form,
        } => {
            let cfg = crate::samplers::SfsConfig {
                sigma: *sigma,
                steps: *steps,
                mc_samples: *mc_samples,
                form: *form,
                seed: 0,
                record_path: false,
            };
            let runs = run_sfs_batch(potential, &cfg, *n_runs, master_seed)
                .map_err(|e| runtime(format!("cluster_masses_sfs: {e}")))?;
            let points: Vec<Vec<f64>> = runs.iter().map(|r| r.final_point.clone()).collect();
            let centers: Vec<Vec<f64>> =
                potential.minima().iter().map(|m| m.point.clone()).collect();
            let expected = laplace_weights(potential)
                .map_err(|e| runtime(format!("cluster_masses_sfs: {e}")))?;
            let rep = cluster_masses(&points, &centers, *radius)
                .map_err(|e| runtime(format!("cluster_masses_sfs: {e}")))?;
            let (pass, details) =
                mass_check_details(&expected, &rep.masses, rep.remainder, *rel_tolerance);
            Ok(CheckResult {
                name: "cluster_masses_sfs",
                pass,
                details,
            })
        }
        CheckSpec::TailSlope {
            tau,
            sigmas,
            rel_tolerance,
            grid_points,
        } => {
            let points = large_deviation_slope(potential, sigmas, *tau, *grid_points)
                .map_err(|e| runtime(format!("tail_slope: {e}")))?;
            let slopes: Vec<f64> = points.iter().map(|p| p.slope).collect();
            let increasing = slopes.windows(2).all(|w| w[1] > w[0]);
            let last = *slopes.last().unwrap();
            let within = (last - (-tau)).abs() <= rel_tolerance * tau;
            let pass = increasing && within;
            Ok(CheckResult {
                name: "tail_slope",
                pass,
                details: json!({
                    "tau": tau,
                    "points": to_value(&points)?,
                    "increasing": increasing,
                    "last_slope": last,
                    "target": -tau,
                    "rel_tolerance": rel_tolerance,
                }),
            })
        }
        CheckSpec::W2Trend {
            sigma,
            mc_samples,
            steps_grid,
            n_runs,
            form,
            grid_points,
            min_nonincreasing,
        } => {
            let oracle = GibbsOracle1d::build(potential, *sigma, *grid_points, None)
                .map_err(|e| runtime(format!("w2_trend: {e}")))?;
            let reference = oracle.sample_stratified(*n_runs);
            let mut distances = Vec::with_capacity(steps_grid.len());
            for &steps in steps_grid {
                let cfg = crate::samplers::SfsConfig {
                    sigma: *sigma,
                    steps,
                    mc_samples: *mc_samples,
                    form: *form,
                    seed: 0,
                    record_path: false,
                };
                // common random numbers: same master seed for every step count
                let runs = run_sfs_batch(potential, &cfg, *n_runs, master_seed)
                    .map_err(|e| runtime(format!("w2_trend at {steps} steps: {e}")))?;
                let finals: Vec<f64> = runs.iter().map(|r| r.final_point[0]).collect();
                let d = crate::diagnostics::w2_exact_1d(&finals, &reference)
                    .map_err(|e| runtime(format!("w2_trend: {e}")))?;
                distances.push(d);
            }
            let pairs = distances.windows(2).filter(|w| w[1] <= w[0]).count();
            let pass = pairs >= *min_nonincreasing;
            Ok(CheckResult {
                name: "w2_trend",
                pass,
                details: json!({
                    "steps_grid": steps_grid,
                    "distances": distances,
                    "nonincreasing_pairs": pairs,
                    "min_nonincreasing": min_nonincreasing,
                }),
            })
        }
        CheckSpec::BoundMonotonicity {
            sigma,
            radius,
            grid_points,
            tau,
            epsilon,
            steps_grid,
            mc_grid,
        } => {
            let report = constants_report(
                potential,
                *sigma,
                *radius,
                *grid_points,
                *tau,
                *epsilon,
                steps_grid[0],
                mc_grid[0],
            )?;
            let rows = bound_table(&report, steps_grid, mc_grid);
            let mut pass = true;
            let nm = mc_grid.len();
            for s_i in 1..steps_grid.len() {
                for m_i in 0..nm {
                    let prev = &rows[(s_i - 1) * nm + m_i];
                    let cur = &rows[s_i * nm + m_i];
                    if cur.failure_bound_log > prev.failure_bound_log
                        || cur.w2_bound_log > prev.w2_bound_log
                    {
                        pass = false;
                    }
                }
            }
            for s_i in 0..steps_grid.len() {
                for m_i in 1..nm {
                    let prev = &rows[s_i * nm + m_i - 1];
                    let cur = &rows[s_i * nm + m_i];
                    if cur.failure_bound_log > prev.failure_bound_log
                        || cur.w2_bound_log > prev.w2_bound_log
                    {
                        pass = false;
                    }
                }
            }
            Ok(CheckResult {
                name: "bound_monotonicity",
                pass,
                details: json!({"rows": to_value(&rows)?}),
            })
        }
    }
}

/// Runs every configured check and writes `verification.json` plus a
/// manifest. Returns a runtime error (exit 1) if any check fails.
pub fn cmd_verify(config_path: &Path, overrides: &CliOverrides) -> Result<(), RunnerError> {
    let prep = prepare(config_path, overrides)?;
    let cfg = &prep.cfg;
    let spec = cfg.require_potential()?;
    let potential = spec.build()?;
    validate_checks(&cfg.checks, spec)?;

    let results = with_workers(overrides.workers, || {
        let mut results = Vec::with_capacity(cfg.checks.len());
        for check in &cfg.checks {
            results.push(run_check(check, &potential, prep.master_seed));
        }
        results
    })?;
    let mut checks = Vec::with_capacity(results.len());
    for r in results {
        checks.push(r?);
    }
    for c in &checks {
        println!("check {}: {}", c.name, if c.pass { "pass" } else { "FAIL" });
    }
    let n_passed = checks.iter().filter(|c| c.pass).count();
    let n_failed = checks.len() - n_passed;
    let report = VerificationReport {
        config_sha256: prep.config_sha256.clone(),
        tool_version: env!("CARGO_PKG_VERSION"),
        master_seed: prep.master_seed,
        n_passed,
        n_failed,
        all_passed: n_failed == 0,
        checks,
    };

    fs::create_dir_all(&prep.out_dir)
        .map_err(|e| runtime(format!("cannot create output dir: {e}")))?;
    write_json(&prep.out_dir, "verification.json", &report)?;
    let manifest = Manifest {
        config_sha256: prep.config_sha256,
        tool_version: env!("CARGO_PKG_VERSION"),
        command: "verify",
        master_seed: prep.master_seed,
        n_runs: 0,
        per_run_seeds: Vec::new(),
        baseline_run_seeds: None,
        outputs: vec!["verification.json".into(), "manifest.json".into()],
        wall_clock_seconds: prep.started.elapsed().as_secs_f64(),
    };
    write_json(&prep.out_dir, "manifest.json", &manifest)?;
    if n_failed > 0 {
        return Err(runtime(format!(
            "{n_failed} of {} verification checks failed (see verification.json)",
            report.n_passed + n_failed
        )));
    }
    Ok(())
}

/// Computes the constants report for the configured potential and writes
/// `constants.json` plus a manifest.
pub fn cmd_constants(config_path: &Path, overrides: &CliOverrides) -> Result<(), RunnerError> {
    let prep = prepare(config_path, overrides)?;
    let cfg = &prep.cfg;
    let spec = cfg.require_potential()?;
    let potential = spec.build()?;
    let c = cfg
        .constants
        .as_ref()
        .ok_or_else(|| invalid("missing required section `constants`"))?;
    // all constants-calculator failures trace to config values
    let report = compute_constants(
        &potential,
        c.sigma,
        c.radius,
        c.grid_points,
        &BoundInputs {
            tau: c.tau,
            epsilon: c.epsilon,
            steps: c.steps,
            mc_samples: c.mc_samples,
        },
    )
    .map_err(|e| invalid(format!("constants: {e}")))?;

    fs::create_dir_all(&prep.out_dir)
        .map_err(|e| runtime(format!("cannot create output dir: {e}")))?;
    write_json(&prep.out_dir, "constants.json", &report)?;
    let manifest = Manifest {
        config_sha256: prep.config_sha256,
        tool_version: env!("CARGO_PKG_VERSION"),
        command: "constants",
        master_seed: prep.master_seed,
        n_runs: 0,
        per_run_seeds: Vec::new(),
        baseline_run_seeds: None,
        outputs: vec!["constants.json".into(), "manifest.json".into()],
        wall_clock_seconds: prep.started.elapsed().as_secs_f64(),
    };
    write_json(&prep.out_dir, "manifest.json", &manifest)
}

