//! Wasserstein-2 error against the step count.
//!
//! On a 1-D quadratic target the time-1 law of the sampler can be compared
//! to the exact Gibbs measure (via stratified oracle quantiles) in exact
//! empirical W2. This target is a deliberately extreme case: its tilt
//! vanishes identically, so the true drift is zero and the discretized
//! chain has the exact Gibbs law at *every* step count. The only part of
//! the error that depends on K is the variance injected by the Stein-form
//! estimator's m-sample noise, which decays like ln(K)/K, worth on the
//! order of 1e-4 in W2 here.
//!
//! That is far below the empirical-W2 resolution of 2000 samples (about
//! 1e-2), so individual rows wobble and the count of non-increasing
//! doublings is the meaningful summary, not the row-to-row deltas. Two
//! choices keep that count as informative as the budget allows:
//! - the reference is stratified oracle quantiles, which contribute no
//!   sampling noise of their own;
//! - all step counts share one master seed, so run i sees correlated
//!   noise at every K (common random numbers) and the K-to-K comparison
//!   cancels much of the run-level randomness.

use follmer::diagnostics::w2_exact_1d;
use follmer::drift::DriftForm;
use follmer::gibbs::GibbsOracle1d;
use follmer::samplers::{run_sfs_batch, SfsConfig};
use follmer::Potential;

fn main() {
    let potential = Potential::quadratic(1, &[0.0]).unwrap();
    let sigma = 0.1;
    let n_runs = 2000;
    let master_seed = 0;

    let oracle = GibbsOracle1d::build(&potential, sigma, 200_001, None).unwrap();
    let reference = oracle.sample_stratified(n_runs);

    println!("quadratic d=1, sigma {sigma}, m 100, {n_runs} runs per step count\n");
    println!("{:>6} {:>12} {:>16}", "K", "W2", "W2 * sqrt(K)");
    let mut prev = f64::INFINITY;
    let mut nonincreasing = 0;
    let mut first = true;
    for steps in [25usize, 50, 100, 200, 400] {
        let cfg = SfsConfig {
            sigma,
            steps,
            mc_samples: 100,
            form: DriftForm::Stein,
            seed: 0,
            record_path: false,
        };
        let runs = run_sfs_batch(&potential, &cfg, n_runs, master_seed).unwrap();
        let finals: Vec<f64> = runs.iter().map(|r| r.final_point[0]).collect();
        let w2 = w2_exact_1d(&finals, &reference).unwrap();
        println!("{steps:>6} {w2:>12.6} {:>16.4}", w2 * (steps as f64).sqrt());
        if !first && w2 <= prev {
            nonincreasing += 1;
        }
        first = false;
        prev = w2;
    }
    println!("\n{nonincreasing} of 4 consecutive doublings non-increasing;");
    println!("see the module comment for why the rows sit on a common noise");
    println!("floor instead of tracing a clean decay.");
}
