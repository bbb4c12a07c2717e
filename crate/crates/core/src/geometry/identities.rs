//! Pointwise verification of the extrinsic identities for coordinate functions.
//!
//! For the coordinate functions `x_α` of an immersion and smooth `u, w`:
//! `Σ|∇x_α|² = n`, `Σ⟨∇x_α,∇u⟩⟨∇x_α,∇w⟩ = ⟨∇u,∇w⟩`, `Σ(Δx_α)² = n²H²`,
//! `Σ Δx_α ∇x_α = 0`, `Σ⟨∇x_α,ν⟩² = |ν^⊤|²`, plus the inequalities
//! `⟨ν,∇w⟩ ≤ |ν^⊤||∇w|` and `Σ⟨∇x_α,∇u⟩⟨∇x_α,ν⟩ ≤ |∇u||ν^⊤|`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{mean_curvature_at, DriftField, Immersion, SampleGrid, TangentFrame};
use crate::error::{invalid, Result};

/// Largest residual of each identity and smallest margin of each inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub points: usize,
    pub gradient_trace: f64,
    pub gradient_polarization: f64,
    pub laplacian_square: f64,
    pub laplacian_gradient: f64,
    pub drift_projection: f64,
    pub min_drift_gradient_margin: f64,
    pub min_mixed_gradient_margin: f64,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.gradient_trace,
            self.gradient_polarization,
            self.laplacian_square,
            self.laplacian_gradient,
            self.drift_projection,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Both inequalities satisfied at every point (up to rounding).
    pub fn inequalities_hold(&self) -> bool {
        self.min_drift_gradient_margin >= -1e-12 && self.min_mixed_gradient_margin >= -1e-12
    }
}

/// Ambient test function `ℝ^{n+p} → ℝ`.
pub type TestFunction<'a> = &'a dyn Fn(&DVector<f64>) -> f64;

fn param_gradient<I: Immersion + ?Sized>(im: &I, f: TestFunction, y: &[f64], h: f64) -> DVector<f64> {
    let n = im.intrinsic_dim();
    DVector::from_iterator(
        n,
        (0..n).map(|i| {
            let mut a = y.to_vec();
            let mut b = y.to_vec();
            a[i] += h;
            b[i] -= h;
            (f(&im.position(&a)) - f(&im.position(&b))) / (2.0 * h)
        }),
    )
}

/// `√g g^{-1} J`; row `i` is the flux of every coordinate function along `∂ᵢ`.
fn coordinate_flux<I: Immersion + ?Sized>(im: &I, y: &[f64]) -> Result<DMatrix<f64>> {
    let frame = TangentFrame::at(im, y)?;
    Ok(&frame.metric_inv * &frame.jacobian * frame.volume_density)
}

/// `Δx_α` for all α via central differences of the divergence form
/// `(1/√g) ∂ᵢ(√g g^{ij} ∂ⱼ x_α)` with spacing `h`.
pub fn coordinate_laplacians<I: Immersion + ?Sized>(im: &I, y: &[f64], h: f64) -> Result<DVector<f64>> {
    let n = im.intrinsic_dim();
    let frame = TangentFrame::at(im, y)?;
    let mut lap = DVector::zeros(im.ambient_dim());
    for i in 0..n {
        let mut a = y.to_vec();
        let mut b = y.to_vec();
        a[i] += h;
        b[i] -= h;
        let diff = coordinate_flux(im, &a)?.row(i) - coordinate_flux(im, &b)?.row(i);
        lap += diff.transpose() / (2.0 * h);
    }
    Ok(lap / frame.volume_density)
}

/// Orthonormal tangent basis by Gram–Schmidt on the jacobian rows.
fn orthonormal_tangents(jac: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for i in 0..jac.nrows() {
        let mut v = jac.row(i).transpose();
        for e in &basis {
            let c = e.dot(&v);
            v -= e * c;
        }
        let len = v.norm();
        basis.push(v / len);
    }
    basis
}

/// Evaluate every identity at every grid point; `h` is the difference spacing
/// for the coordinate Laplacians and for gradients of `u`, `w`.
pub fn verify_extrinsic_identities<I: Immersion + ?Sized>(
    im: &I,
    nu: &DriftField,
    u: TestFunction,
    w: TestFunction,
    grid: &SampleGrid,
    h: f64,
) -> Result<IdentityReport> {
    if nu.nu.len() != im.ambient_dim() {
        return Err(invalid("drift dimension does not match the ambient space"));
    }
    if !(h > 0.0) {
        return Err(invalid("difference spacing must be positive"));
    }
    let n = im.intrinsic_dim();
    let ambient = im.ambient_dim();
    let nu_vec = nu.vector();
    let mut report = IdentityReport {
        points: grid.points.len(),
        gradient_trace: 0.0,
        gradient_polarization: 0.0,
        laplacian_square: 0.0,
        laplacian_gradient: 0.0,
        drift_projection: 0.0,
        min_drift_gradient_margin: f64::INFINITY,
        min_mixed_gradient_margin: f64::INFINITY,
    };
    let grad_step = im.fd_step();
    for y in &grid.points {
        let frame = TangentFrame::at(im, y)?;
        let ginv = &frame.metric_inv;
        let jac = &frame.jacobian;
        // Parameter-space gradients: the coordinate function x_α has ∂x_α = column α of J.
        let du = param_gradient(im, u, y, grad_step);
        let dw = param_gradient(im, w, y, grad_step);
        let inner = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * ginv * b)[(0, 0)];

        let mut trace = 0.0;
        let mut polar = 0.0;
        let mut proj = 0.0;
        let mut mixed = 0.0;
        let lap = coordinate_laplacians(im, y, h)?;
        let mut lap_grad = DVector::zeros(ambient);
        for alpha in 0..ambient {
            let dx = jac.column(alpha).into_owned();
            trace += inner(&dx, &dx);
            let xu = inner(&dx, &du);
            polar += xu * inner(&dx, &dw);
            // ∇x_α as an ambient vector is Jᵀ g⁻¹ ∂x_α.
            let grad_x = jac.transpose() * (ginv * &dx);
            let xnu = grad_x.dot(&nu_vec);
            proj += xnu * xnu;
            mixed += xu * xnu;
            lap_grad += grad_x * lap[alpha];
        }
        let tangents = orthonormal_tangents(jac);
        let nu_top_sq: f64 = tangents.iter().map(|e| e.dot(&nu_vec).powi(2)).sum();
        let nu_top = nu_top_sq.sqrt();
        let hmean = mean_curvature_at(im, y)?;
        let nf = n as f64;

        report.gradient_trace = report.gradient_trace.max((trace - nf).abs());
        report.gradient_polarization = report.gradient_polarization.max((polar - inner(&du, &dw)).abs());
        report.laplacian_square = report
            .laplacian_square
            .max((lap.norm_squared() - nf * nf * hmean * hmean).abs());
        report.laplacian_gradient = report.laplacian_gradient.max(lap_grad.norm());
        report.drift_projection = report.drift_projection.max((proj - nu_top_sq).abs());

        let grad_w = jac.transpose() * (ginv * &dw);
        let grad_u_len = inner(&du, &du).max(0.0).sqrt();
        report.min_drift_gradient_margin = report
            .min_drift_gradient_margin
            .min(nu_top * grad_w.norm() - nu_vec.dot(&grad_w));
        report.min_mixed_gradient_margin = report.min_mixed_gradient_margin.min(grad_u_len * nu_top - mixed);
    }
    Ok(report)
}
