//! Statistical diagnostics used to judge sampler output against exact
//! references: success rates with confidence intervals, Wasserstein-2
//! distances, cluster mass splits, large-deviation tail slopes, and tables of
//! the theoretical accuracy bounds.
//!
//! Two exact facts anchor the distance code:
//!
//! ```text
//! d = 1:  W2(P, Q)^2 = integral_0^1 (P^{-1}(u) - Q^{-1}(u))^2 du,
//! ```
//!
//! estimated from equal-size samples by pairing sorted order statistics, and
//! for d >= 2 the sliced variant averages the squared 1-D distance over
//! random unit projections. The tail-slope diagnostic tracks
//!
//! ```text
//! sigma * log mu_sigma(V - min V > tau)   as sigma decreases,
//! ```
//!
//! which the large-deviation principle sends to `-tau` from below.

use serde::Serialize;

use crate::constants::ConstantsReport;
use crate::gibbs::{GibbsError, GibbsOracle1d};
use crate::potentials::Potential;
use crate::rng::rng_from_seed;

#[derive(Debug, thiserror::Error)]
pub enum DiagnosticsError {
    #[error("input sample set is empty")]
    EmptyInput,
    #[error("sample sets have different sizes ({a} vs {b})")]
    LengthMismatch { a: usize, b: usize },
    #[error("samples have inconsistent dimensions")]
    DimMismatch,
    #[error("sliced distance needs dimension >= 2, got {0}")]
    DimTooSmall(usize),
    #[error("sliced distance needs at least 16 projections, got {0}")]
    TooFewProjections(usize),
    #[error("samples must be finite")]
    NonFiniteSample,
    #[error("cluster radius must be positive, got {0}")]
    RadiusNotPositive(f64),
    #[error("cluster balls {i} and {j} overlap (separation {separation}, need > {needed})")]
    BallsOverlap {
        i: usize,
        j: usize,
        separation: f64,
        needed: f64,
    },
    #[error("tau must be positive, got {0}")]
    TauNotPositive(f64),
    #[error("sigmas must be strictly decreasing and inside (0, 1]")]
    BadSigmaGrid,
    #[error("oracle construction failed: {0}")]
    Oracle(#[from] GibbsError),
}

/// Success count with a Wilson 95% interval for the underlying rate.
#[derive(Clone, Debug, Serialize)]
pub struct SuccessReport {
    pub tau: f64,
    pub n_runs: usize,
    pub n_success: usize,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// Counts how many of the given objective values are at or below `tau` and
/// wraps the rate in a Wilson score interval (z = 1.96). Order-insensitive.
pub fn success_rate(values: &[f64], tau: f64) -> Result<SuccessReport, DiagnosticsError> {
    if values.is_empty() {
        return Err(DiagnosticsError::EmptyInput);
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(DiagnosticsError::NonFiniteSample);
    }
    let n = values.len();
    let n_success = values.iter().filter(|&&v| v <= tau).count();
    let p_hat = n_success as f64 / n as f64;
    let z = 1.96_f64;
    let z2n = z * z / n as f64;
    let center = (p_hat + 0.5 * z2n) / (1.0 + z2n);
    let half = z * (p_hat * (1.0 - p_hat) / n as f64 + 0.25 * z2n / n as f64).sqrt()
        / (1.0 + z2n);
    Ok(SuccessReport {
        tau,
        n_runs: n,
        n_success,
        rate: p_hat,
        wilson_low: (center - half).max(0.0),
        wilson_high: (center + half).min(1.0),
    })
}

/// Which estimator produced a Wasserstein distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum W2Method {
    Exact1d,
    Sliced,
}

#[derive(Clone, Debug, Serialize)]
pub struct W2Report {
    pub distance: f64,
    pub method: W2Method,
    pub n_samples: usize,
    pub n_projections: usize,
}

impl W2Report {
    pub fn exact_1d(a: &[f64], b: &[f64]) -> Result<Self, DiagnosticsError> {
        Ok(W2Report {
            distance: w2_exact_1d(a, b)?,
            method: W2Method::Exact1d,
            n_samples: a.len(),
            n_projections: 0,
        })
    }

    pub fn sliced(
        a: &[Vec<f64>],
        b: &[Vec<f64>],
        n_projections: usize,
        seed: u64,
    ) -> Result<Self, DiagnosticsError> {
        Ok(W2Report {
            distance: w2_sliced(a, b, n_projections, seed)?,
            method: W2Method::Sliced,
            n_samples: a.len(),
            n_projections,
        })
    }
}

/// Exact empirical Wasserstein-2 distance between two equal-size 1-D samples:
/// sort both, pair order statistics, take the root mean square gap.
pub fn w2_exact_1d(a: &[f64], b: &[f64]) -> Result<f64, DiagnosticsError> {
    if a.is_empty() || b.is_empty() {
        return Err(DiagnosticsError::EmptyInput);
    }
    if a.len() != b.len() {
        return Err(DiagnosticsError::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(DiagnosticsError::NonFiniteSample);
    }
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).unwrap());
    sb.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mean_sq = sa
        .iter()
        .zip(&sb)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / sa.len() as f64;
    Ok(mean_sq.sqrt())
}

/// Sliced Wasserstein-2 distance for dimension >= 2: the root mean of the
/// squared exact 1-D distances over seeded random unit projections.
pub fn w2_sliced(
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    n_projections: usize,
    seed: u64,
) -> Result<f64, DiagnosticsError> {
    if a.is_empty() || b.is_empty() {
        return Err(DiagnosticsError::EmptyInput);
    }
    if a.len() != b.len() {
        return Err(DiagnosticsError::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    let dim = a[0].len();
    if dim < 2 {
        return Err(DiagnosticsError::DimTooSmall(dim));
    }
    if a.iter().chain(b).any(|p| p.len() != dim) {
        return Err(DiagnosticsError::DimMismatch);
    }
    if n_projections < 16 {
        return Err(DiagnosticsError::TooFewProjections(n_projections));
    }
    if a.iter().chain(b).flatten().any(|v| !v.is_finite()) {
        return Err(DiagnosticsError::NonFiniteSample);
    }

    let mut rng = rng_from_seed(seed);
    let mut dir = vec![0.0; dim];
    let mut pa = vec![0.0; a.len()];
    let mut pb = vec![0.0; b.len()];
    let mut sum_sq = 0.0;
    for _ in 0..n_projections {
        loop {
            crate::rng::fill_standard_normal(&mut rng, &mut dir);
            let norm = crate::math::norm2(&dir);
            if norm > 1e-12 {
                for v in dir.iter_mut() {
                    *v /= norm;
                }
                break;
            }
        }
        for (slot, p) in pa.iter_mut().zip(a) {
            *slot = crate::math::dot(&dir, p);
        }
        for (slot, p) in pb.iter_mut().zip(b) {
            *slot = crate::math::dot(&dir, p);
        }
        let d = w2_exact_1d(&pa, &pb)?;
        sum_sq += d * d;
    }
    Ok((sum_sq / n_projections as f64).sqrt())
}

/// Fractions of a sample falling in disjoint balls around given centers.
#[derive(Clone, Debug, Serialize)]
pub struct ClusterMassReport {
    pub radius: f64,
    /// One fraction per center, in center order.
    pub masses: Vec<f64>,
    /// Fraction of samples outside every ball; masses and remainder sum to 1.
    pub remainder: f64,
}

/// Assigns each sample to the (at most one) ball of the given radius around a
/// center. The balls must be strictly disjoint: every pair of centers must be
/// separated by more than twice the radius.
pub fn cluster_masses(
    samples: &[Vec<f64>],
    centers: &[Vec<f64>],
    radius: f64,
) -> Result<ClusterMassReport, DiagnosticsError> {
    if samples.is_empty() || centers.is_empty() {
        return Err(DiagnosticsError::EmptyInput);
    }
    if !(radius > 0.0) {
        return Err(DiagnosticsError::RadiusNotPositive(radius));
    }
    let dim = centers[0].len();
    if centers.iter().any(|c| c.len() != dim) || samples.iter().any(|s| s.len() != dim) {
        return Err(DiagnosticsError::DimMismatch);
    }
    for i in 0..centers.len() {
        for j in (i + 1)..centers.len() {
            let sep = crate::math::dist2(&centers[i], &centers[j]);
            if sep <= 2.0 * radius {
                return Err(DiagnosticsError::BallsOverlap {
                    i,
                    j,
                    separation: sep,
                    needed: 2.0 * radius,
                });
            }
        }
    }
    let mut counts = vec![0usize; centers.len()];
    let mut outside = 0usize;
    for s in samples {
        match centers
            .iter()
            .position(|c| crate::math::dist2(c, s) <= radius)
        {
            Some(i) => counts[i] += 1,
            None => outside += 1,
        }
    }
    let n = samples.len() as f64;
    Ok(ClusterMassReport {
        radius,
        masses: counts.iter().map(|&c| c as f64 / n).collect(),
        remainder: outside as f64 / n,
    })
}

/// One temperature on the large-deviation curve.
#[derive(Clone, Debug, Serialize)]
pub struct SlopePoint {
    pub sigma: f64,
    /// `mu_sigma(V - min V > tau)`, from the quadrature oracle.
    pub tail_mass: f64,
    /// `sigma * ln(tail_mass)`; increases toward `-tau` as sigma shrinks.
    pub slope: f64,
}

/// Evaluates the large-deviation tail slope on a strictly decreasing grid of
/// temperatures inside (0, 1], using the 1-D quadrature oracle at each one.
pub fn large_deviation_slope(
    potential: &Potential,
    sigmas: &[f64],
    tau: f64,
    grid_points: usize,
) -> Result<Vec<SlopePoint>, DiagnosticsError> {
    if !(tau > 0.0) {
        return Err(DiagnosticsError::TauNotPositive(tau));
    }
    if sigmas.is_empty()
        || sigmas.iter().any(|&s| !(s > 0.0 && s <= 1.0))
        || sigmas.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(DiagnosticsError::BadSigmaGrid);
    }
    let mut out = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let oracle = GibbsOracle1d::build(potential, sigma, grid_points, None)?;
        let tail_mass = oracle.tail_mass(tau);
        out.push(SlopePoint {
            sigma,
            tail_mass,
            slope: sigma * tail_mass.ln(),
        });
    }
    Ok(out)
}

/// One evaluation of the non-asymptotic accuracy bounds at a compute budget.
#[derive(Clone, Debug, Serialize)]
pub struct BoundTableRow {
    pub steps: usize,
    pub mc_samples: usize,
    /// Natural log of the bound on the failure probability
    /// `P(V(output) - min V > tau)`.
    pub failure_bound_log: f64,
    /// Natural log of the bound on `W2(law(output), mu_sigma)`.
    pub w2_bound_log: f64,
}

/// Tabulates both theoretical bounds over a grid of step counts and
/// Monte-Carlo sample counts, holding the constants report fixed. Both
/// columns are non-increasing in each budget axis.
pub fn bound_table(
    report: &ConstantsReport,
    steps_grid: &[usize],
    mc_grid: &[usize],
) -> Vec<BoundTableRow> {
    let mut rows = Vec::with_capacity(steps_grid.len() * mc_grid.len());
    for &steps in steps_grid {
        for &mc_samples in mc_grid {
            rows.push(BoundTableRow {
                steps,
                mc_samples,
                failure_bound_log: report.failure_bound_log_at(steps, mc_samples),
                w2_bound_log: report.w2_bound_log_at(steps, mc_samples),
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{compute_constants, BoundInputs};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn w2_of_identical_samples_is_zero() {
        let a = vec![0.3, -1.2, 5.0, 0.3];
        assert_eq!(w2_exact_1d(&a, &a).unwrap(), 0.0);
        let pts: Vec<Vec<f64>> = vec![vec![1.0, 2.0], vec![-0.5, 0.1], vec![3.0, -3.0]];
        assert_eq!(w2_sliced(&pts, &pts, 16, 0).unwrap(), 0.0);
    }

    #[test]
    fn w2_shift_is_the_shift_magnitude() {
        let a: Vec<f64> = (0..100).map(|i| (i as f64 * 0.77).sin() * 3.0).collect();
        let b: Vec<f64> = a.iter().map(|v| v + 2.5).collect();
        assert_relative_eq!(w2_exact_1d(&a, &b).unwrap(), 2.5, max_relative = 1e-12);
        let c: Vec<f64> = a.iter().map(|v| v - 0.125).collect();
        assert_relative_eq!(w2_exact_1d(&a, &c).unwrap(), 0.125, max_relative = 1e-12);
    }

    #[test]
    fn w2_between_normal_quantile_grids_matches_the_closed_form() {
        // N(0,1) vs N(0,4) have W2 distance sqrt(E[(2q - q)^2]) = 1
        let n = 4000;
        let std = Normal::new(0.0, 1.0).unwrap();
        let a: Vec<f64> = (0..n)
            .map(|i| std.inverse_cdf((i as f64 + 0.5) / n as f64))
            .collect();
        let b: Vec<f64> = a.iter().map(|v| 2.0 * v).collect();
        let d = w2_exact_1d(&a, &b).unwrap();
        assert!((d - 1.0).abs() < 0.02, "distance {d}");
    }

    #[test]
    fn w2_rejects_bad_inputs() {
        assert!(matches!(
            w2_exact_1d(&[1.0], &[1.0, 2.0]),
            Err(DiagnosticsError::LengthMismatch { .. })
        ));
        assert!(matches!(
            w2_exact_1d(&[], &[]),
            Err(DiagnosticsError::EmptyInput)
        ));
        assert!(matches!(
            w2_exact_1d(&[f64::NAN], &[1.0]),
            Err(DiagnosticsError::NonFiniteSample)
        ));
        let pts = vec![vec![1.0, 2.0]];
        assert!(matches!(
            w2_sliced(&pts, &pts, 8, 0),
            Err(DiagnosticsError::TooFewProjections(8))
        ));
        let one_d = vec![vec![1.0]];
        assert!(matches!(
            w2_sliced(&one_d, &one_d, 16, 0),
            Err(DiagnosticsError::DimTooSmall(1))
        ));
    }

    proptest! {
        #[test]
        fn w2_satisfies_the_triangle_inequality(
            n in 1usize..40,
            seed in 0u64..1000,
        ) {
            let mut rng = crate::rng::rng_from_seed(seed);
            let draw = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
                let mut v = vec![0.0; n];
                crate::rng::fill_standard_normal(rng, &mut v);
                for x in v.iter_mut() { *x *= 4.0; }
                v
            };
            let a = draw(&mut rng);
            let b = draw(&mut rng);
            let c = draw(&mut rng);
            let ab = w2_exact_1d(&a, &b).unwrap();
            let bc = w2_exact_1d(&b, &c).unwrap();
            let ac = w2_exact_1d(&a, &c).unwrap();
            prop_assert!(ac <= ab + bc + 1e-9);
        }
    }

    #[test]
    fn sliced_w2_sees_a_mean_shift_at_the_projected_scale() {
        // point sets differing by a constant vector c: every projection gives
        // exactly |<theta, c>|, so the sliced distance estimates
        // sqrt(E <theta,c>^2) = |c| / sqrt(d)
        let mut rng = crate::rng::rng_from_seed(11);
        let mut a = Vec::new();
        for _ in 0..200 {
            let mut p = vec![0.0; 2];
            crate::rng::fill_standard_normal(&mut rng, &mut p);
            a.push(p);
        }
        let c = [0.9, -1.2];
        let b: Vec<Vec<f64>> = a
            .iter()
            .map(|p| vec![p[0] + c[0], p[1] + c[1]])
            .collect();
        let norm_c = (c[0] * c[0] + c[1] * c[1]).sqrt();
        let expect = norm_c / 2.0f64.sqrt();
        let d = w2_sliced(&a, &b, 64, 5).unwrap();
        assert!(
            (d - expect).abs() < 0.15 * expect,
            "sliced {d} vs expected {expect}"
        );
    }

    #[test]
    fn success_rate_counts_and_bounds_are_sane() {
        let values = [0.01, 0.06, 0.02, 0.05, 9.0];
        let report = success_rate(&values, 0.05).unwrap();
        assert_eq!(report.n_runs, 5);
        assert_eq!(report.n_success, 3); // 0.05 itself counts
        assert_relative_eq!(report.rate, 0.6);
        assert!(report.wilson_low >= 0.0 && report.wilson_high <= 1.0);
        assert!(report.wilson_low < report.rate && report.rate < report.wilson_high);

        // permutation invariance
        let shuffled = [9.0, 0.05, 0.01, 0.02, 0.06];
        let report2 = success_rate(&shuffled, 0.05).unwrap();
        assert_eq!(report2.n_success, report.n_success);
        assert_eq!(report2.wilson_low, report.wilson_low);

        // degenerate rates stay inside [0, 1]
        let all = success_rate(&[0.0, 0.0], 0.1).unwrap();
        assert!(all.wilson_high <= 1.0 && all.wilson_low > 0.0);
        assert!(matches!(
            success_rate(&[], 0.1),
            Err(DiagnosticsError::EmptyInput)
        ));
    }

    #[test]
    fn success_rate_of_exact_gaussian_output_matches_the_chi_square_law() {
        // zero-drift runs on the centered quadratic land exactly at
        // N(0, sigma I_2), where P(V <= tau) = 1 - exp(-tau/sigma)
        use crate::drift::DriftForm;
        use crate::samplers::{run_sfs_batch, SfsConfig};
        let p = Potential::quadratic(2, &[0.0, 0.0]).unwrap();
        let cfg = SfsConfig {
            sigma: 0.01,
            steps: 50,
            mc_samples: 1,
            form: DriftForm::Gradient,
            seed: 0,
            record_path: false,
        };
        let runs = run_sfs_batch(&p, &cfg, 500, 314).unwrap();
        let finals: Vec<f64> = runs.iter().map(|r| r.final_value).collect();
        let report = success_rate(&finals, 0.05).unwrap();
        let exact = 1.0 - (-5.0f64).exp();
        assert!(
            (report.rate - exact).abs() < 0.02,
            "rate {} vs exact {exact}",
            report.rate
        );
        assert!(report.wilson_low <= exact && exact <= report.wilson_high);
    }

    #[test]
    fn cluster_masses_split_a_synthetic_sample_as_constructed() {
        let mut samples = Vec::new();
        for i in 0..60 {
            samples.push(vec![-1.0 + 0.001 * i as f64]); // near -1
        }
        for i in 0..30 {
            samples.push(vec![1.0 - 0.001 * i as f64]); // near +1
        }
        for _ in 0..10 {
            samples.push(vec![10.0]); // stray
        }
        let centers = vec![vec![-1.0], vec![1.0]];
        let report = cluster_masses(&samples, &centers, 0.3).unwrap();
        assert_relative_eq!(report.masses[0], 0.6, max_relative = 1e-12);
        assert_relative_eq!(report.masses[1], 0.3, max_relative = 1e-12);
        assert_relative_eq!(report.remainder, 0.1, max_relative = 1e-12);
        let total: f64 = report.masses.iter().sum::<f64>() + report.remainder;
        assert_relative_eq!(total, 1.0, max_relative = 1e-15);

        assert!(matches!(
            cluster_masses(&samples, &centers, 1.1),
            Err(DiagnosticsError::BallsOverlap { .. })
        ));
    }

    #[test]
    fn tail_slope_matches_the_gaussian_tail_and_increases() {
        // for V = x^2/2 the tail mass is 2(1 - Phi(sqrt(2 tau / sigma)))
        let p = Potential::quadratic(1, &[0.0]).unwrap();
        let tau = 0.5;
        let sigmas = [0.2, 0.1];
        let points = large_deviation_slope(&p, &sigmas, tau, 40_001).unwrap();
        let std = Normal::new(0.0, 1.0).unwrap();
        for pt in &points {
            let exact = 2.0 * (1.0 - std.cdf((2.0 * tau / pt.sigma).sqrt()));
            assert_relative_eq!(pt.tail_mass, exact, max_relative = 1e-3);
        }
        assert!(points[1].slope > points[0].slope);
        assert!(points[1].slope < -tau);

        assert!(matches!(
            large_deviation_slope(&p, &sigmas, -1.0, 1001),
            Err(DiagnosticsError::TauNotPositive(_))
        ));
        assert!(matches!(
            large_deviation_slope(&p, &[0.1, 0.2], tau, 1001),
            Err(DiagnosticsError::BadSigmaGrid)
        ));
        assert!(matches!(
            large_deviation_slope(&p, &[0.2, 0.1, 1.5], tau, 1001),
            Err(DiagnosticsError::BadSigmaGrid)
        ));
    }

    #[test]
    fn bound_table_is_monotone_in_both_budgets() {
        let p = Potential::rastrigin(1, 0.0, 0.0)
            .unwrap()
            .with_quadratic_tail(5.0, 1.0)
            .unwrap();
        let inputs = BoundInputs {
            tau: 0.5,
            epsilon: 0.05,
            steps: 100,
            mc_samples: 100,
        };
        let report = compute_constants(&p, 0.25, 6.0, 301, &inputs).unwrap();
        let steps_grid = [50usize, 100, 200, 400];
        let mc_grid = [100usize, 1000, 10_000];
        let rows = bound_table(&report, &steps_grid, &mc_grid);
        assert_eq!(rows.len(), 12);
        // non-increasing in steps for each fixed mc count
        for mc_i in 0..mc_grid.len() {
            for s_i in 1..steps_grid.len() {
                let prev = &rows[(s_i - 1) * mc_grid.len() + mc_i];
                let cur = &rows[s_i * mc_grid.len() + mc_i];
                assert!(cur.failure_bound_log <= prev.failure_bound_log);
                assert!(cur.w2_bound_log <= prev.w2_bound_log);
            }
        }
        // non-increasing in mc for each fixed step count
        for s_i in 0..steps_grid.len() {
            for mc_i in 1..mc_grid.len() {
                let prev = &rows[s_i * mc_grid.len() + mc_i - 1];
                let cur = &rows[s_i * mc_grid.len() + mc_i];
                assert!(cur.failure_bound_log <= prev.failure_bound_log);
                assert!(cur.w2_bound_log <= prev.w2_bound_log);
            }
        }
    }
}
