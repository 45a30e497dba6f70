//! Objective functions ("potentials") with analytic derivatives.
//!
//! A potential here is a nonnegative function `V` with known global minimum
//! value 0 (constructors normalize any offset away), known minimizer locations
//! with Hessian determinants, and optionally an *exact quadratic tail*:
//! `V(x) = ||x||^2 / 2` for all `||x|| >= R + width`, produced by
//! [`Potential::with_quadratic_tail`]. The quadratic tail is what makes the
//! density ratio `fhat = exp((||x||^2/2 - V)/sigma)` bounded, so samplers and
//! theory constants are usually applied to blended potentials.
//!
//! Besides `V` and its derivatives, every objective exposes the *tilt*
//! `||x||^2/2 - V(x)` and its gradient `x - grad V(x)` directly. The tilt is
//! the quantity drift estimation actually consumes (`sigma * log fhat` and the
//! score `(x - grad V)/sigma`), and computing it natively avoids catastrophic
//! cancellation where closed forms exist: a quadratic has constant tilt
//! gradient, and a blended tail has tilt exactly 0 outside the blend.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::math::{dot, smoothstep, smoothstep_deriv, smoothstep_deriv2};

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error("expected {expected} coordinates, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error(
        "minimizer at distance {norm} from the origin is not strictly inside the blend radius {radius}"
    )]
    MinimizerOutsideBlend { norm: f64, radius: f64 },
}

/// A differentiable objective. Implementations must be pure and thread-safe;
/// all evaluation methods take the full coordinate slice.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient_into(&self, x: &[f64], grad: &mut [f64]);
    /// Row-major `dim * dim` Hessian, if available.
    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>>;

    /// `||x||^2/2 - V(x)`. Override when a closed form avoids cancellation.
    fn tilt_value(&self, x: &[f64]) -> f64 {
        0.5 * dot(x, x) - self.value(x)
    }

    /// Gradient of the tilt, `x - grad V(x)`.
    fn tilt_gradient_into(&self, x: &[f64], out: &mut [f64]) {
        self.gradient_into(x, out);
        for (o, xi) in out.iter_mut().zip(x) {
            *o = xi - *o;
        }
    }

    /// Tilt value and gradient in one pass (the drift-estimation hot path).
    fn tilt_value_gradient(&self, x: &[f64], out: &mut [f64]) -> f64 {
        self.tilt_gradient_into(x, out);
        self.tilt_value(x)
    }
}

/// A known global minimizer together with `det(hess V)` there.
#[derive(Clone, Debug)]
pub struct Minimizer {
    pub point: Vec<f64>,
    pub hessian_det: f64,
}

/// An objective plus the metadata the rest of the crate relies on: global
/// minimizers (all with value 0), and the radius beyond which the function is
/// exactly `||x||^2/2`, when there is one. Cheap to clone and safe to share
/// across threads.
#[derive(Clone)]
pub struct Potential {
    objective: Arc<dyn Objective>,
    minima: Vec<Minimizer>,
    quadratic_beyond: Option<f64>,
    label: String,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("label", &self.label)
            .field("dim", &self.dim())
            .field("minima", &self.minima.len())
            .field("quadratic_beyond", &self.quadratic_beyond)
            .finish()
    }
}

impl Potential {
    /// Assembles a potential around a caller-provided [`Objective`].
    ///
    /// This is the extension point for objectives the built-in constructors
    /// do not cover. `minima` lists the known global minimizers with their
    /// Hessian determinants (the Laplace weights need them; pass an empty
    /// list when unknown, which disables only the features that require
    /// them). `quadratic_beyond` declares a radius past which the objective
    /// equals `||x||^2/2` exactly, when one exists; the constants calculator
    /// refuses to run without it.
    ///
    /// The caller owns the [`Objective`] invariants: finite value and
    /// gradient at every finite point, value 0 at each listed minimizer,
    /// and tilt methods consistent with `value`/`gradient`.
    pub fn custom(
        objective: Arc<dyn Objective>,
        minima: Vec<Minimizer>,
        quadratic_beyond: Option<f64>,
        label: impl Into<String>,
    ) -> Self {
        Self {
            objective,
            minima,
            quadratic_beyond,
            label: label.into(),
        }
    }

    /// `V(x) = ||x - shift||^2 / 2`.
    pub fn quadratic(dim: usize, shift: &[f64]) -> Result<Self, PotentialError> {
        if dim == 0 {
            return Err(PotentialError::ZeroDim);
        }
        if shift.len() != dim {
            return Err(PotentialError::DimMismatch {
                expected: dim,
                got: shift.len(),
            });
        }
        let centered = shift.iter().all(|&s| s == 0.0);
        let label = format!("quadratic(dim={dim})");
        Ok(Self {
            objective: Arc::new(Quadratic {
                shift: shift.to_vec(),
                half_shift_sq: 0.5 * dot(shift, shift),
            }),
            minima: vec![Minimizer {
                point: shift.to_vec(),
                hessian_det: 1.0,
            }],
            // A centered quadratic is its own quadratic tail everywhere.
            quadratic_beyond: centered.then_some(0.0),
            label,
        })
    }

    /// The Rastrigin surface, averaged over coordinates so the barrier heights
    /// are dimension-independent:
    ///
    /// ```text
    /// V(x) = (1/d) * sum_i [ (x_i - center)^2 - 10 cos(2 pi (x_i - center)) + 10 ]
    /// ```
    ///
    /// `offset` shifts the raw surface; construction subtracts the raw minimum
    /// (which equals `offset`) so the returned potential has minimum value 0.
    /// The unique global minimizer is `(center, ..., center)` with Hessian
    /// determinant `((2 + 40 pi^2)/d)^d`.
    pub fn rastrigin(dim: usize, center: f64, offset: f64) -> Result<Self, PotentialError> {
        if dim == 0 {
            return Err(PotentialError::ZeroDim);
        }
        let _ = offset; // absorbed by min-normalization
        let curvature = (2.0 + 40.0 * std::f64::consts::PI * std::f64::consts::PI) / dim as f64;
        let label = format!("rastrigin(dim={dim}, center={center})");
        Ok(Self {
            objective: Arc::new(Rastrigin { dim, center }),
            minima: vec![Minimizer {
                point: vec![center; dim],
                hessian_det: curvature.powi(dim as i32),
            }],
            quadratic_beyond: None,
            label,
        })
    }

    /// A 1-D C^2 double well with exactly two global minima of value 0 at
    /// `x = -1` and `x = +1` and prescribed curvatures there:
    /// `V(x) = a(x) * (x^2 - 1)^2 / 8` where `a` ramps smoothly from
    /// `left_curvature` (for `x <= -1`) to `right_curvature` (for `x >= 1`).
    /// The base quartic has unit curvature at both minima and the ramp is flat
    /// to second order at `x = -1` and `x = +1`, so `V''(-1) = left_curvature`
    /// and `V''(+1) = right_curvature`.
    pub fn double_well_1d(
        left_curvature: f64,
        right_curvature: f64,
    ) -> Result<Self, PotentialError> {
        for (name, value) in [
            ("left_curvature", left_curvature),
            ("right_curvature", right_curvature),
        ] {
            if !(value > 0.0) {
                return Err(PotentialError::NonPositive { name, value });
            }
        }
        let label = format!("double_well(c-={left_curvature}, c+={right_curvature})");
        Ok(Self {
            objective: Arc::new(DoubleWell {
                left: left_curvature,
                right: right_curvature,
            }),
            minima: vec![
                Minimizer {
                    point: vec![-1.0],
                    hessian_det: left_curvature,
                },
                Minimizer {
                    point: vec![1.0],
                    hessian_det: right_curvature,
                },
            ],
            quadratic_beyond: None,
            label,
        })
    }

    /// Blends this potential into an exact quadratic tail:
    ///
    /// ```text
    /// W(x) = (1 - w(r)) V(x) + w(r) ||x||^2/2,    r = ||x||,
    /// ```
    ///
    /// with `w` the clamped quintic smoothstep on `[radius, radius + width]`.
    /// `W` equals `V` for `r <= radius` and equals `||x||^2/2` *exactly* (same
    /// code path, not approximately) for `r >= radius + width`. Gradients and
    /// Hessians are blended consistently by the product rule. All known minima
    /// must lie strictly inside the blend radius, so minimizers, values, and
    /// curvatures are unchanged.
    pub fn with_quadratic_tail(&self, radius: f64, width: f64) -> Result<Self, PotentialError> {
        for (name, value) in [("radius", radius), ("width", width)] {
            if !(value > 0.0) {
                return Err(PotentialError::NonPositive { name, value });
            }
        }
        for m in &self.minima {
            let norm = dot(&m.point, &m.point).sqrt();
            if norm >= radius {
                return Err(PotentialError::MinimizerOutsideBlend { norm, radius });
            }
        }
        let label = format!("{} + tail(radius={radius}, width={width})", self.label);
        Ok(Self {
            objective: Arc::new(BlendedTail {
                inner: Arc::clone(&self.objective),
                radius,
                width,
            }),
            minima: self.minima.clone(),
            quadratic_beyond: Some(radius + width),
            label,
        })
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    /// The global minimum value; constructors normalize every surface to 0.
    pub fn min_value(&self) -> f64 {
        0.0
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.check_dim(x);
        self.objective.value(x)
    }

    pub fn gradient_into(&self, x: &[f64], grad: &mut [f64]) {
        self.check_dim(x);
        assert_eq!(grad.len(), self.dim());
        self.objective.gradient_into(x, grad);
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.gradient_into(x, &mut g);
        g
    }

    pub fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.check_dim(x);
        self.objective.hessian(x)
    }

    /// `||x||^2/2 - V(x)`, i.e. `sigma * log fhat_sigma(x)`.
    pub fn tilt_value(&self, x: &[f64]) -> f64 {
        self.check_dim(x);
        self.objective.tilt_value(x)
    }

    pub fn tilt_gradient_into(&self, x: &[f64], out: &mut [f64]) {
        self.check_dim(x);
        assert_eq!(out.len(), self.dim());
        self.objective.tilt_gradient_into(x, out);
    }

    /// Tilt value and gradient in one evaluation.
    pub fn tilt_value_gradient(&self, x: &[f64], out: &mut [f64]) -> f64 {
        self.check_dim(x);
        assert_eq!(out.len(), self.dim());
        self.objective.tilt_value_gradient(x, out)
    }

    /// Known global minimizers, each with `det(hess V)` at the point.
    pub fn minima(&self) -> &[Minimizer] {
        &self.minima
    }

    /// Radius beyond which `V(x) = ||x||^2/2` holds exactly, if known.
    pub fn quadratic_tail_radius(&self) -> Option<f64> {
        self.quadratic_beyond
    }

    /// Human-readable construction summary, used in manifests.
    pub fn label(&self) -> &str {
        &self.label
    }

    fn check_dim(&self, x: &[f64]) {
        assert_eq!(
            x.len(),
            self.dim(),
            "potential expects {} coordinates",
            self.dim()
        );
    }
}

struct Quadratic {
    shift: Vec<f64>,
    half_shift_sq: f64,
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.shift.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * x
            .iter()
            .zip(&self.shift)
            .map(|(xi, si)| (xi - si) * (xi - si))
            .sum::<f64>()
    }

    fn gradient_into(&self, x: &[f64], grad: &mut [f64]) {
        for ((g, xi), si) in grad.iter_mut().zip(x).zip(&self.shift) {
            *g = xi - si;
        }
    }

    fn hessian(&self, _x: &[f64]) -> Option<Vec<f64>> {
        Some(identity(self.dim()))
    }

    fn tilt_value(&self, x: &[f64]) -> f64 {
        // ||x||^2/2 - ||x - a||^2/2 = <x, a> - ||a||^2/2, no cancellation.
        dot(x, &self.shift) - self.half_shift_sq
    }

    fn tilt_gradient_into(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.shift);
    }

    fn tilt_value_gradient(&self, x: &[f64], out: &mut [f64]) -> f64 {
        out.copy_from_slice(&self.shift);
        dot(x, &self.shift) - self.half_shift_sq
    }
}

struct Rastrigin {
    dim: usize,
    center: f64,
}

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

impl Objective for Rastrigin {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let inv_d = 1.0 / self.dim as f64;
        x.iter()
            .map(|xi| {
                let t = xi - self.center;
                inv_d * (t * t - 10.0 * (TWO_PI * t).cos() + 10.0)
            })
            .sum()
    }

    fn gradient_into(&self, x: &[f64], grad: &mut [f64]) {
        let inv_d = 1.0 / self.dim as f64;
        for (g, xi) in grad.iter_mut().zip(x) {
            let t = xi - self.center;
            *g = inv_d * (2.0 * t + 10.0 * TWO_PI * (TWO_PI * t).sin());
        }
    }

    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        let d = self.dim;
        let inv_d = 1.0 / d as f64;
        let mut h = vec![0.0; d * d];
        for (i, xi) in x.iter().enumerate() {
            let t = xi - self.center;
            h[i * d + i] = inv_d * (2.0 + 10.0 * TWO_PI * TWO_PI * (TWO_PI * t).cos());
        }
        Some(h)
    }

    fn tilt_value_gradient(&self, x: &[f64], out: &mut [f64]) -> f64 {
        let inv_d = 1.0 / self.dim as f64;
        let mut tilt = 0.0;
        for (o, xi) in out.iter_mut().zip(x) {
            let t = xi - self.center;
            let (s, c) = (TWO_PI * t).sin_cos();
            tilt += 0.5 * xi * xi - inv_d * (t * t - 10.0 * c + 10.0);
            *o = xi - inv_d * (2.0 * t + 10.0 * TWO_PI * s);
        }
        tilt
    }
}

struct DoubleWell {
    left: f64,
    right: f64,
}

impl DoubleWell {
    /// Ramp `a(x)` with `a(-1) = left`, `a(1) = right`, flat to second order
    /// at both ends; returns `(a, a', a'')`.
    fn ramp(&self, x: f64) -> (f64, f64, f64) {
        let u = 0.5 * (x + 1.0);
        let gap = self.right - self.left;
        (
            self.left + gap * smoothstep(u),
            gap * smoothstep_deriv(u) * 0.5,
            gap * smoothstep_deriv2(u) * 0.25,
        )
    }
}

impl Objective for DoubleWell {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &[f64]) -> f64 {
        let t = x[0] * x[0] - 1.0;
        let (a, _, _) = self.ramp(x[0]);
        a * t * t / 8.0
    }

    fn gradient_into(&self, x: &[f64], grad: &mut [f64]) {
        let z = x[0];
        let t = z * z - 1.0;
        let phi = t * t / 8.0;
        let dphi = z * t / 2.0;
        let (a, da, _) = self.ramp(z);
        grad[0] = da * phi + a * dphi;
    }

    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        let z = x[0];
        let t = z * z - 1.0;
        let phi = t * t / 8.0;
        let dphi = z * t / 2.0;
        let ddphi = (3.0 * z * z - 1.0) / 2.0;
        let (a, da, dda) = self.ramp(z);
        Some(vec![dda * phi + 2.0 * da * dphi + a * ddphi])
    }
}

struct BlendedTail {
    inner: Arc<dyn Objective>,
    radius: f64,
    width: f64,
}

enum BlendRegion {
    Inner,
    Blend { w: f64, dw: f64, ddw: f64, r: f64 },
    Tail,
}

impl BlendedTail {
    fn region(&self, x: &[f64]) -> BlendRegion {
        let r = dot(x, x).sqrt();
        if r <= self.radius {
            BlendRegion::Inner
        } else if r >= self.radius + self.width {
            BlendRegion::Tail
        } else {
            let u = (r - self.radius) / self.width;
            BlendRegion::Blend {
                w: smoothstep(u),
                dw: smoothstep_deriv(u) / self.width,
                ddw: smoothstep_deriv2(u) / (self.width * self.width),
                r,
            }
        }
    }
}

impl Objective for BlendedTail {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self.region(x) {
            BlendRegion::Inner => self.inner.value(x),
            BlendRegion::Tail => 0.5 * dot(x, x),
            // W = V + w * tilt keeps V and ||x||^2/2 from being re-derived.
            BlendRegion::Blend { w, .. } => self.inner.value(x) + w * self.inner.tilt_value(x),
        }
    }

    fn gradient_into(&self, x: &[f64], grad: &mut [f64]) {
        match self.region(x) {
            BlendRegion::Inner => self.inner.gradient_into(x, grad),
            BlendRegion::Tail => grad.copy_from_slice(x),
            BlendRegion::Blend { w, dw, r, .. } => {
                // grad W = grad V + w * grad tilt + w'(r) * tilt * x / r
                let tilt = self.inner.tilt_value(x);
                let mut tilt_grad = vec![0.0; x.len()];
                self.inner.tilt_gradient_into(x, &mut tilt_grad);
                self.inner.gradient_into(x, grad);
                let radial = dw * tilt / r;
                for ((g, tg), xi) in grad.iter_mut().zip(&tilt_grad).zip(x) {
                    *g += w * tg + radial * xi;
                }
            }
        }
    }

    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        let d = self.dim();
        match self.region(x) {
            BlendRegion::Inner => self.inner.hessian(x),
            BlendRegion::Tail => Some(identity(d)),
            BlendRegion::Blend { w, dw, ddw, r } => {
                let inner_h = self.inner.hessian(x)?;
                let tilt = self.inner.tilt_value(x);
                let mut tilt_grad = vec![0.0; d];
                self.inner.tilt_gradient_into(x, &mut tilt_grad);
                // hess W = hess V + w (I - hess V)
                //        + w'/r (x tg^T + tg x^T)
                //        + tilt [ w'' x x^T / r^2 + w' (I/r - x x^T / r^3) ]
                let rr = r * r;
                let mut h = vec![0.0; d * d];
                for i in 0..d {
                    for j in 0..d {
                        let eye = if i == j { 1.0 } else { 0.0 };
                        let hv = inner_h[i * d + j];
                        h[i * d + j] = hv
                            + w * (eye - hv)
                            + dw / r * (x[i] * tilt_grad[j] + tilt_grad[i] * x[j])
                            + tilt
                                * (ddw * x[i] * x[j] / rr
                                    + dw * (eye / r - x[i] * x[j] / (rr * r)));
                    }
                }
                Some(h)
            }
        }
    }

    fn tilt_value(&self, x: &[f64]) -> f64 {
        match self.region(x) {
            BlendRegion::Inner => self.inner.tilt_value(x),
            BlendRegion::Tail => 0.0,
            BlendRegion::Blend { w, .. } => (1.0 - w) * self.inner.tilt_value(x),
        }
    }

    fn tilt_gradient_into(&self, x: &[f64], out: &mut [f64]) {
        match self.region(x) {
            BlendRegion::Inner => self.inner.tilt_gradient_into(x, out),
            BlendRegion::Tail => out.fill(0.0),
            BlendRegion::Blend { w, dw, r, .. } => {
                // grad tilt_W = (1-w) grad tilt_V - w'(r) tilt_V x / r
                let tilt = self.inner.tilt_value(x);
                self.inner.tilt_gradient_into(x, out);
                let radial = dw * tilt / r;
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = (1.0 - w) * *o - radial * xi;
                }
            }
        }
    }

    fn tilt_value_gradient(&self, x: &[f64], out: &mut [f64]) -> f64 {
        match self.region(x) {
            BlendRegion::Inner => self.inner.tilt_value_gradient(x, out),
            BlendRegion::Tail => {
                out.fill(0.0);
                0.0
            }
            BlendRegion::Blend { w, dw, r, .. } => {
                let tilt = self.inner.tilt_value_gradient(x, out);
                let radial = dw * tilt / r;
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = (1.0 - w) * *o - radial * xi;
                }
                (1.0 - w) * tilt
            }
        }
    }
}

fn identity(d: usize) -> Vec<f64> {
    let mut h = vec![0.0; d * d];
    for i in 0..d {
        h[i * d + i] = 1.0;
    }
    h
}
