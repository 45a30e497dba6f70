//! Small numeric building blocks: stable log-sum-exp and softmax averaging,
//! the quintic smoothstep used for tail blending, and vector helpers.

/// Stable `log(sum_i exp(v_i))`. Empty input and all `-inf` yield `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        // -inf: empty or all-zero weights; +inf/NaN propagate as-is.
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Softmax weights `exp(v_i - max) / sum`, summing to 1 up to roundoff.
pub fn softmax(values: &[f64]) -> Vec<f64> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = values.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = out.iter().sum();
    for w in &mut out {
        *w /= sum;
    }
    out
}

/// Streaming softmax-weighted mean of vectors.
///
/// Maintains a running maximum of the log-weights so arbitrarily large or small
/// weights never overflow, and updates the mean incrementally
/// (`mean += w/W * (c - mean)`). The incremental form keeps one exact identity
/// that matters downstream: when every contribution is the same vector, the
/// output is that vector bit-for-bit, regardless of the weights.
#[derive(Clone, Debug)]
pub struct SoftmaxMean {
    max_log: f64,
    weight_sum: f64,
    mean: Vec<f64>,
    saw_nan: bool,
}

impl SoftmaxMean {
    pub fn new(dim: usize) -> Self {
        Self {
            max_log: f64::NEG_INFINITY,
            weight_sum: 0.0,
            mean: vec![0.0; dim],
            saw_nan: false,
        }
    }

    pub fn push(&mut self, log_weight: f64, contribution: &[f64]) {
        debug_assert_eq!(contribution.len(), self.mean.len());
        if log_weight.is_nan() || contribution.iter().any(|c| c.is_nan()) {
            self.saw_nan = true;
            return;
        }
        if log_weight == f64::NEG_INFINITY {
            return; // exactly zero weight
        }
        let w = if log_weight > self.max_log {
            // Rebase so the newest item has weight exactly 1.
            self.weight_sum *= (self.max_log - log_weight).exp();
            self.max_log = log_weight;
            1.0
        } else {
            (log_weight - self.max_log).exp()
        };
        if w == 0.0 {
            return;
        }
        self.weight_sum += w;
        let frac = w / self.weight_sum;
        for (m, c) in self.mean.iter_mut().zip(contribution) {
            *m += frac * (c - *m);
        }
    }

    /// Total softmax mass seen so far, i.e. `sum exp(logw_i - max)`.
    pub fn weight_sum(&self) -> f64 {
        self.weight_sum
    }

    pub fn saw_nan(&self) -> bool {
        self.saw_nan
    }

    /// The weighted mean, or `None` when no item carried positive weight or a
    /// NaN was pushed.
    pub fn finish(self) -> Option<Vec<f64>> {
        if self.saw_nan || self.weight_sum <= 0.0 {
            return None;
        }
        Some(self.mean)
    }
}

/// `ln(1 + e^z)` without overflow or underflow across the whole f64 range.
pub fn log1p_exp(z: f64) -> f64 {
    if z > 34.0 {
        // e^-z is below f64 resolution of ln(1+x) at x = e^z
        z
    } else if z < -37.0 {
        z.exp()
    } else {
        z.exp().ln_1p()
    }
}

/// Clamped quintic smoothstep `6u^5 - 15u^4 + 10u^3`: C^2, flat to second
/// order at both ends.
pub fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    }
}

/// First derivative of [`smoothstep`]: `30 u^2 (1-u)^2` inside `(0, 1)`.
pub fn smoothstep_deriv(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        let v = u * (1.0 - u);
        30.0 * v * v
    }
}

/// Second derivative of [`smoothstep`]: `60 u (1-u) (1-2u)` inside `(0, 1)`.
pub fn smoothstep_deriv2(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Least-squares slope of `y` against `x`.
pub fn regression_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log1p_exp_matches_naive_form_and_survives_extremes() {
        for z in [-30.0, -5.0, 0.0, 5.0, 30.0] {
            assert_relative_eq!(log1p_exp(z), (1.0f64 + z.exp()).ln(), max_relative = 1e-12);
        }
        assert_eq!(log1p_exp(1e308), 1e308);
        assert_eq!(log1p_exp(f64::INFINITY), f64::INFINITY);
        assert_eq!(log1p_exp(f64::NEG_INFINITY), 0.0);
        assert!(log1p_exp(-745.0) > 0.0);
    }

    #[test]
    fn log_sum_exp_matches_direct_sum_in_safe_range() {
        let vals = [0.3f64, -1.2, 2.5, 0.0];
        let direct: f64 = vals.iter().map(|v: &f64| v.exp()).sum::<f64>().ln();
        assert_relative_eq!(log_sum_exp(&vals), direct, max_relative = 1e-14);
    }

    #[test]
    fn log_sum_exp_survives_huge_inputs() {
        let lse = log_sum_exp(&[1e4, 1e4 + (2.0f64).ln()]);
        assert_relative_eq!(lse, 1e4 + (3.0f64).ln(), max_relative = 1e-14);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(
            log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]),
            f64::NEG_INFINITY
        );
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, 2.0]), 2.0);
    }

    #[test]
    fn softmax_weights_sum_to_one() {
        let w = softmax(&[-900.0, -899.0, -905.5]);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn softmax_mean_is_bit_exact_for_constant_contributions() {
        let c = [0.1 + 0.2, -std::f64::consts::PI, 1e-17];
        let mut acc = SoftmaxMean::new(3);
        for i in 0..1000 {
            acc.push(-3.0 + (i as f64) * 0.01, &c);
        }
        let mean = acc.finish().unwrap();
        for (m, v) in mean.iter().zip(&c) {
            assert_eq!(m.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn softmax_mean_matches_two_pass_weights() {
        let logs = [0.2, -1.0, 0.9, 0.9, -3.0];
        let contribs = [[1.0, 0.0], [0.0, 1.0], [2.0, -1.0], [-1.0, 2.0], [5.0, 5.0]];
        let mut acc = SoftmaxMean::new(2);
        for (l, c) in logs.iter().zip(&contribs) {
            acc.push(*l, c);
        }
        let mean = acc.finish().unwrap();
        let w = softmax(&logs);
        for k in 0..2 {
            let direct: f64 = w.iter().zip(&contribs).map(|(wi, c)| wi * c[k]).sum();
            assert_relative_eq!(mean[k], direct, max_relative = 1e-12);
        }
    }

    #[test]
    fn softmax_mean_detects_degenerate_and_nan_input() {
        let mut acc = SoftmaxMean::new(1);
        acc.push(f64::NEG_INFINITY, &[1.0]);
        assert!(acc.finish().is_none());

        let mut acc = SoftmaxMean::new(1);
        acc.push(f64::NAN, &[1.0]);
        acc.push(0.0, &[1.0]);
        assert!(acc.finish().is_none());
    }

    #[test]
    fn smoothstep_is_monotone_and_flat_at_ends() {
        assert_eq!(smoothstep(-1.0), 0.0);
        assert_eq!(smoothstep(2.0), 1.0);
        assert_eq!(smoothstep_deriv(0.0), 0.0);
        assert_eq!(smoothstep_deriv(1.0), 0.0);
        assert_eq!(smoothstep_deriv2(0.0), 0.0);
        assert_eq!(smoothstep_deriv2(1.0), 0.0);
        assert_relative_eq!(smoothstep(0.5), 0.5, max_relative = 1e-15);
        let mut prev = 0.0;
        for i in 0..=100 {
            let v = smoothstep(i as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn smoothstep_derivatives_match_finite_differences() {
        let h = 1e-6;
        for &u in &[0.1, 0.25, 0.5, 0.77, 0.93] {
            let fd1 = (smoothstep(u + h) - smoothstep(u - h)) / (2.0 * h);
            assert_relative_eq!(smoothstep_deriv(u), fd1, max_relative = 1e-7);
            let fd2 = (smoothstep_deriv(u + h) - smoothstep_deriv(u - h)) / (2.0 * h);
            assert_relative_eq!(smoothstep_deriv2(u), fd2, epsilon = 1e-5);
        }
    }

    #[test]
    fn regression_slope_recovers_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| -0.5 * x + 3.0).collect();
        assert_relative_eq!(regression_slope(&xs, &ys), -0.5, max_relative = 1e-12);
    }
}
