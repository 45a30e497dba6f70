//! Global optimization of the 2-D Rastrigin function.
//!
//! Rastrigin (dimension-normalized here so the curvature scale stays put as
//! `d` grows) has a grid of local minima with the unique global minimum at
//! the origin; descent methods started nearby get trapped one basin over. At
//! a low temperature the Gibbs measure concentrates on the global minimizer,
//! so one diffusion run over `[0, 1]` is a global-optimization attempt with
//! a fixed, known budget: `K (m + 1) d` Gaussian draws and `K m` potential
//! evaluations, no tuning schedule.
//!
//! The batch below reports the distribution of final objective values, the
//! success rate at the basin threshold `tau = 0.5` with a Wilson interval,
//! and the single best point seen across all runs.

use follmer::diagnostics::success_rate;
use follmer::drift::DriftForm;
use follmer::samplers::{run_sfs_batch, SfsConfig};
use follmer::Potential;

fn main() {
    let potential = Potential::rastrigin(2, 0.0, 0.0).unwrap();
    let cfg = SfsConfig {
        sigma: 0.01,
        steps: 200,
        mc_samples: 1000,
        form: DriftForm::Gradient,
        seed: 0,
        record_path: false,
    };
    let n_runs = 50;
    println!(
        "{}: {} runs, sigma {}, K {}, m {}",
        potential.label(),
        n_runs,
        cfg.sigma,
        cfg.steps,
        cfg.mc_samples
    );

    let runs = run_sfs_batch(&potential, &cfg, n_runs, 7).unwrap();
    let mut finals: Vec<f64> = runs.iter().map(|r| r.final_value).collect();
    finals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = finals[finals.len() / 2];
    let mean = finals.iter().sum::<f64>() / finals.len() as f64;

    println!("final objective: median {median:.4}, mean {mean:.4}, worst {:.4}", finals[finals.len() - 1]);

    let report = success_rate(&finals, 0.5).unwrap();
    println!(
        "success rate at tau = {}: {}/{} = {:.2} (95% Wilson [{:.2}, {:.2}])",
        report.tau, report.n_success, report.n_runs, report.rate, report.wilson_low, report.wilson_high
    );

    let best = runs
        .iter()
        .min_by(|a, b| a.best_value.partial_cmp(&b.best_value).unwrap())
        .unwrap();
    println!(
        "best point across runs: [{:+.4}, {:+.4}] with V = {:.6}",
        best.best_point[0], best.best_point[1], best.best_value
    );
    println!(
        "budget per run: {} Gaussian draws",
        runs[0].gaussians_consumed
    );
}
