//! Global optimization and Gibbs sampling via the Schrödinger–Föllmer diffusion.
//!
//! The target is the Gibbs measure with density proportional to `exp(-V(x)/sigma)`
//! for a potential `V >= 0` with `min V = 0` and a temperature `sigma` in `(0, 1]`.
//! As `sigma` shrinks, the measure concentrates on the global minimizers of `V`,
//! with relative cluster masses governed by inverse square-root Hessian
//! determinants. Instead of running an ergodic chain to stationarity, the sampler
//! integrates a drift-controlled diffusion on the fixed time window `[0, 1]`:
//!
//! ```text
//! dX_t = sigma * b(X_t, t) dt + sqrt(sigma) dB_t,      X_0 = 0,
//! b(x, t) = grad log E[ fhat(x + sqrt((1-t) sigma) Z) ],   Z ~ N(0, I),
//! fhat(x) = exp( (||x||^2 / 2 - V(x)) / sigma ),
//! ```
//!
//! whose time-1 marginal is exactly the Gibbs measure. The drift expectation is
//! estimated by Monte Carlo with softmax weights, so a run costs a fixed number
//! of Gaussian draws and potential evaluations with no burn-in or mixing-time
//! tuning.
//!
//! # Modules
//!
//! - [`potentials`]: built-in objectives (quadratic, Rastrigin, asymmetric 1-D
//!   double well) with analytic gradients and Hessians, plus C^2 blending into an
//!   exact quadratic tail.
//! - [`gibbs`]: quadrature-exact 1-D Gibbs oracles (normalizer, CDF, inverse-CDF
//!   sampling, tail masses) and asymptotic cluster weights.
//! - [`drift`]: log density ratios and the two Monte-Carlo drift estimators
//!   (gradient form and Stein form).
//! - [`samplers`]: the Euler discretization of the diffusion, a Langevin baseline,
//!   and deterministic parallel batch runs.
//! - [`constants`]: grid-searched regularity constants of `V` on a ball and the
//!   log-scale error bounds they imply for discretized runs.
//! - [`diagnostics`]: success rates with Wilson intervals, exact 1-D and sliced
//!   Wasserstein-2 distances, cluster masses, and large-deviation slopes.
//! - [`config`] / [`runner`]: JSON experiment configs and the file-writing
//!   commands behind the `follmer` binary (`run`, `compare`, `verify`,
//!   `constants`).
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```text
//! cargo run --release --example gaussian_identity    # zero-drift sanity check
//! cargo run --release --example exact_drift          # estimators vs closed-form drift
//! cargo run --release --example rastrigin_global_opt # global optimization run
//! cargo run --release --example langevin_baseline    # matched-budget comparison
//! cargo run --release --example double_well_clusters # cluster masses vs asymptotics
//! cargo run --release --example deviation_slope      # sigma * log tail-mass table
//! cargo run --release --example theory_constants     # constants report + bounds
//! cargo run --release --example w2_steps             # W2 error vs step count
//! ```
//!
//! # Quick start
//!
//! ```
//! use follmer::potentials::Potential;
//! use follmer::samplers::{run_sfs, SfsConfig};
//! use follmer::drift::DriftForm;
//!
//! let rastrigin = Potential::rastrigin(2, 0.0, 0.0)
//!     .unwrap()
//!     .with_quadratic_tail(5.0, 1.0)
//!     .unwrap();
//! let cfg = SfsConfig {
//!     sigma: 0.05,
//!     steps: 100,
//!     mc_samples: 200,
//!     form: DriftForm::Gradient,
//!     seed: 7,
//!     record_path: false,
//! };
//! let run = run_sfs(&rastrigin, &cfg).unwrap();
//! assert!(run.final_value < 5.0);
//! ```
//!
//! # Determinism
//!
//! Every random quantity derives from explicit `u64` seeds through a documented
//! SplitMix64/ChaCha stream construction ([`rng`]), batch runs are reproducible
//! bit-for-bit at any worker count, and the CLI writes floats with fixed
//! formatting so identical configs produce identical result files.

pub mod config;
pub mod constants;
pub mod diagnostics;
pub mod drift;
pub mod gibbs;
pub mod math;
pub mod potentials;
pub mod rng;
pub mod runner;
pub mod samplers;

pub use potentials::Potential;
