//! Regularity constants and the error bounds they imply.
//!
//! The convergence theory runs on a short ladder of constants computed from
//! the tilt `||x||^2/2 - V(x)` over a ball: its extrema, its gradient sup,
//! and the worst spectral gap `||I - hess V||`. Everything downstream (drift
//! sup, Lipschitz/Holder constants, step- and Monte-Carlo-error constants,
//! and the final failure-probability and W2 bounds) is kept as a natural
//! logarithm, because at small sigma the raw values overflow any float.
//!
//! Three displays below:
//! - the centered quadratic, where every constant is exactly zero (the tilt
//!   vanishes identically) and the log-scale ladder reports -inf;
//! - 1-D Rastrigin, where the grid search is checked for stability under
//!   refinement and the drift-sup constant grows as sigma shrinks;
//! - the two bounds tabulated over a budget grid: non-increasing in both
//!   the step count and the Monte-Carlo sample count.

use follmer::constants::{compute_constants, BoundInputs};
use follmer::diagnostics::bound_table;
use follmer::Potential;

fn main() {
    let bounds = BoundInputs {
        tau: 0.5,
        epsilon: 0.1,
        steps: 100,
        mc_samples: 100,
    };

    // Quadratic: the tilt is identically zero, so the constants are too.
    // Adding 0.0 normalizes the signed zero a max over negated values leaves.
    let quad = Potential::quadratic(1, &[0.0]).unwrap();
    let qr = compute_constants(&quad, 0.5, 3.0, 1001, &bounds).unwrap();
    println!("quadratic: tilt extrema ({}, {}), grad sup {}, curvature gap {}",
        qr.tilt_min + 0.0, qr.tilt_max + 0.0, qr.tilt_grad_max, qr.curvature_gap_max);
    println!("           log drift-sup constant = {} (the drift bound is exactly 0)\n",
        qr.drift_sup_log);

    // Rastrigin d=1, suprema over the ball that contains the whole blended
    // region, so they are global.
    let rast = Potential::rastrigin(1, 0.0, 0.0)
        .unwrap()
        .with_quadratic_tail(5.0, 1.0)
        .unwrap();
    let coarse = compute_constants(&rast, 0.5, 6.0, 1001, &bounds).unwrap();
    let fine = compute_constants(&rast, 0.5, 6.0, 4001, &bounds).unwrap();
    println!("rastrigin d=1, sigma 0.5, ball radius 6:");
    for (name, a, b) in [
        ("tilt_max", coarse.tilt_max, fine.tilt_max),
        ("tilt_min", coarse.tilt_min, fine.tilt_min),
        ("tilt_grad_max", coarse.tilt_grad_max, fine.tilt_grad_max),
        ("curvature_gap_max", coarse.curvature_gap_max, fine.curvature_gap_max),
    ] {
        println!(
            "  {name:<18} {a:>14.8} -> {b:>14.8}  (refinement shift {:.2e})",
            ((a - b) / b).abs()
        );
    }

    println!("\nlog drift-sup constant vs temperature:");
    for sigma in [1.0, 0.5, 0.1] {
        let r = compute_constants(&rast, sigma, 6.0, 2001, &bounds).unwrap();
        println!("  sigma {sigma:<4} -> {:.3}", r.drift_sup_log);
    }

    println!("\nbound table (natural logs, sigma 0.5):");
    println!(
        "{:>8} {:>8} {:>18} {:>14}",
        "steps", "m", "log P(V > tau)", "log W2"
    );
    let report = compute_constants(&rast, 0.5, 6.0, 2001, &bounds).unwrap();
    for row in bound_table(&report, &[100, 1000], &[100, 1000]) {
        println!(
            "{:>8} {:>8} {:>18.4} {:>14.3e}",
            row.steps, row.mc_samples, row.failure_bound_log, row.w2_bound_log
        );
    }
    println!("\nboth columns are non-increasing along each budget axis. The");
    println!("failure bound visibly improves with more steps; the W2 bound is");
    println!("frozen by its prefactor, whose log is exp-squared in the drift");
    println!("constant, so at this temperature the budget terms vanish into");
    println!("it. The bounds certify trends, not usable magnitudes, which is");
    println!("why everything is kept and compared in log scale.");
}
