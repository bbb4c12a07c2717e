//! Parametrized immersions `x: U ⊂ ℝⁿ → ℝ^{n+p}` with evaluators for the
//! induced metric, mean curvature and the tangential part of a drift vector.

pub mod families;
pub mod identities;
pub mod soliton;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::GeometricConstants;
use crate::error::{invalid, Error, Result};

pub use families::{Bowl, Cylinder, FlatDomain, GrimReaper, ImmersionSpec, Plane, SphereGraph};
pub use identities::{verify_extrinsic_identities, IdentityReport};
pub use soliton::{bowl_soliton_profile, grim_reaper_profile, SolitonKind, SolitonProfile};

/// Axis-aligned parameter box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl ParamBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(invalid("parameter box bounds must have equal, nonzero length"));
        }
        if lower.iter().zip(&upper).any(|(a, b)| !(a < b)) {
            return Err(invalid("parameter box must have positive extent on every axis"));
        }
        Ok(ParamBox { lower, upper })
    }

    /// Symmetric cube `[−a, a]ⁿ`.
    pub fn cube(n: usize, half_width: f64) -> Result<Self> {
        ParamBox::new(vec![-half_width; n], vec![half_width; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Largest side length.
    pub fn scale(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| b - a)
            .fold(0.0, f64::max)
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        y.len() == self.dim()
            && y.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (a, b))| *v >= *a && *v <= *b)
    }
}

/// A parametric patch of an immersed submanifold.
///
/// Implementors provide positions; jacobians and second derivatives default to
/// central differences and are overridden where closed forms are cheap.
pub trait Immersion {
    fn intrinsic_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn domain(&self) -> &ParamBox;
    fn position(&self, y: &[f64]) -> DVector<f64>;

    /// `n × (n+p)` differential; row `i` is `∂x/∂yⁱ`.
    fn jacobian(&self, y: &[f64]) -> DMatrix<f64> {
        fd_jacobian(self, y, self.fd_step())
    }

    /// `∂²x/∂yⁱ∂yʲ` stored at `i·n + j`.
    fn second_derivatives(&self, y: &[f64]) -> Vec<DVector<f64>> {
        fd_second_derivatives(self, y, 1e-4 * self.domain().scale())
    }

    fn fd_step(&self) -> f64 {
        1e-5 * self.domain().scale()
    }

    fn name(&self) -> String;
}

fn shifted(y: &[f64], axis: usize, delta: f64) -> Vec<f64> {
    let mut z = y.to_vec();
    z[axis] += delta;
    z
}

/// Central-difference jacobian from positions.
pub fn fd_jacobian<I: Immersion + ?Sized>(im: &I, y: &[f64], h: f64) -> DMatrix<f64> {
    let n = im.intrinsic_dim();
    let mut jac = DMatrix::zeros(n, im.ambient_dim());
    for i in 0..n {
        let d = (im.position(&shifted(y, i, h)) - im.position(&shifted(y, i, -h))) / (2.0 * h);
        jac.row_mut(i).copy_from(&d.transpose());
    }
    jac
}

/// Central differences of the jacobian.
pub fn fd_second_derivatives<I: Immersion + ?Sized>(im: &I, y: &[f64], h: f64) -> Vec<DVector<f64>> {
    let n = im.intrinsic_dim();
    let mut out = vec![DVector::zeros(im.ambient_dim()); n * n];
    for j in 0..n {
        let d = (im.jacobian(&shifted(y, j, h)) - im.jacobian(&shifted(y, j, -h))) / (2.0 * h);
        for i in 0..n {
            out[i * n + j] = d.row(i).transpose();
        }
    }
    // Symmetrize so that the Hessian is exactly symmetric in (i, j).
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (&out[i * n + j] + &out[j * n + i]) * 0.5;
            out[i * n + j] = avg.clone();
            out[j * n + i] = avg;
        }
    }
    out
}

/// Constant drift vector `ν` in the ambient space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftField {
    pub nu: Vec<f64>,
    /// Translating solitons require `|ν| = 1`.
    #[serde(default)]
    pub unit_length: bool,
}

impl DriftField {
    pub fn new(nu: Vec<f64>) -> Self {
        DriftField { nu, unit_length: false }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        DriftField::new(vec![0.0; ambient_dim])
    }

    /// Unit translation direction of a soliton.
    pub fn soliton(nu: Vec<f64>) -> Result<Self> {
        let len = nu.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (len - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("soliton drift must have unit length, got {len}")));
        }
        Ok(DriftField { nu, unit_length: true })
    }

    pub fn vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.nu)
    }

    pub fn norm(&self) -> f64 {
        self.nu.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.nu.iter().all(|v| *v == 0.0)
    }

    pub(crate) fn check_dim(&self, ambient: usize) -> Result<()> {
        if self.nu.len() != ambient {
            return Err(invalid(format!(
                "drift has {} components, ambient space has {ambient}",
                self.nu.len()
            )));
        }
        Ok(())
    }
}

/// Induced metric data at one parameter point.
pub struct TangentFrame {
    pub jacobian: DMatrix<f64>,
    pub metric: DMatrix<f64>,
    pub metric_inv: DMatrix<f64>,
    pub volume_density: f64,
}

impl TangentFrame {
    pub fn at<I: Immersion + ?Sized>(im: &I, y: &[f64]) -> Result<Self> {
        let jacobian = im.jacobian(y);
        Self::from_jacobian(jacobian, y)
    }

    pub fn from_jacobian(jacobian: DMatrix<f64>, y: &[f64]) -> Result<Self> {
        let metric = &jacobian * jacobian.transpose();
        let degenerate = |reason: &str| Error::DegenerateImmersion {
            point: y.to_vec(),
            reason: reason.to_string(),
        };
        if metric.iter().any(|v| !v.is_finite()) {
            return Err(degenerate("non-finite jacobian"));
        }
        let chol = metric
            .clone()
            .cholesky()
            .ok_or_else(|| degenerate("metric is not positive definite"))?;
        let diag = chol.l_dirty().diagonal();
        let (dmin, dmax) = diag
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), d| (lo.min(*d), hi.max(*d)));
        if !(dmin > 1e-10 * dmax) {
            return Err(degenerate("jacobian is rank-deficient"));
        }
        let volume_density = diag.iter().product::<f64>();
        let metric_inv = chol.inverse();
        Ok(TangentFrame {
            jacobian,
            metric,
            metric_inv,
            volume_density,
        })
    }

    /// Orthogonal projection of an ambient vector onto the tangent space.
    pub fn tangential(&self, v: &DVector<f64>) -> DVector<f64> {
        let coeffs = &self.metric_inv * (&self.jacobian * v);
        self.jacobian.transpose() * coeffs
    }

    pub fn normal(&self, v: &DVector<f64>) -> DVector<f64> {
        v - self.tangential(v)
    }
}

/// Induced metric `g_ij = ⟨∂ᵢx, ∂ⱼx⟩`.
pub fn metric_at<I: Immersion + ?Sized>(im: &I, y: &[f64]) -> Result<DMatrix<f64>> {
    Ok(TangentFrame::at(im, y)?.metric)
}

/// Trace of the second fundamental form, `Σ g^{ij} (∂ᵢⱼx)^⊥` (equals `n·H⃗`).
pub fn mean_curvature_trace<I: Immersion + ?Sized>(im: &I, y: &[f64]) -> Result<DVector<f64>> {
    let frame = TangentFrame::at(im, y)?;
    let n = im.intrinsic_dim();
    let hess = im.second_derivatives(y);
    let mut trace = DVector::zeros(im.ambient_dim());
    for i in 0..n {
        for j in 0..n {
            trace += &hess[i * n + j] * frame.metric_inv[(i, j)];
        }
    }
    Ok(frame.normal(&trace))
}

/// Mean curvature `H = |Σ g^{ij} (∂ᵢⱼx)^⊥| / n`.
pub fn mean_curvature_at<I: Immersion + ?Sized>(im: &I, y: &[f64]) -> Result<f64> {
    Ok(mean_curvature_trace(im, y)?.norm() / im.intrinsic_dim() as f64)
}

/// `|ν^⊤|`, the length of the tangential part of the drift.
pub fn drift_projection_norm<I: Immersion + ?Sized>(im: &I, nu: &DriftField, y: &[f64]) -> Result<f64> {
    nu.check_dim(im.ambient_dim())?;
    let frame = TangentFrame::at(im, y)?;
    Ok(frame.tangential(&nu.vector()).norm())
}

/// `|ν^⊥|`, the length of the normal part of the drift.
pub fn drift_normal_norm<I: Immersion + ?Sized>(im: &I, nu: &DriftField, y: &[f64]) -> Result<f64> {
    nu.check_dim(im.ambient_dim())?;
    let frame = TangentFrame::at(im, y)?;
    Ok(frame.normal(&nu.vector()).norm())
}

/// `|n·H⃗ − ν^⊥|`; zero exactly on a translating soliton with velocity `ν`.
pub fn translator_residual<I: Immersion + ?Sized>(im: &I, nu: &DriftField, y: &[f64]) -> Result<f64> {
    nu.check_dim(im.ambient_dim())?;
    let frame = TangentFrame::at(im, y)?;
    let trace = mean_curvature_trace(im, y)?;
    Ok((trace - frame.normal(&nu.vector())).norm())
}

/// Finite set of parameter points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub points: Vec<Vec<f64>>,
}

impl SampleGrid {
    /// Tensor grid with `per_axis` points per axis, endpoints included.
    pub fn uniform(domain: &ParamBox, per_axis: usize) -> Result<Self> {
        if per_axis == 0 {
            return Err(invalid("sample grid needs at least one point per axis"));
        }
        let coords: Vec<Vec<f64>> = domain
            .lower
            .iter()
            .zip(&domain.upper)
            .map(|(a, b)| {
                if per_axis == 1 {
                    vec![0.5 * (a + b)]
                } else {
                    (0..per_axis)
                        .map(|i| a + (b - a) * i as f64 / (per_axis - 1) as f64)
                        .collect()
                }
            })
            .collect();
        let mut points = vec![Vec::new()];
        for axis in coords {
            points = points
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |c| {
                        let mut q = p.clone();
                        q.push(*c);
                        q
                    })
                })
                .collect();
        }
        Ok(SampleGrid { points })
    }

    /// `count` seeded uniform samples.
    pub fn random(domain: &ParamBox, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..count)
            .map(|_| {
                domain
                    .lower
                    .iter()
                    .zip(&domain.upper)
                    .map(|(a, b)| rng.gen_range(*a..=*b))
                    .collect()
            })
            .collect();
        SampleGrid { points }
    }
}

/// `C₁ = max n²H²` and `D₁ = max |ν^⊤|` over the grid, for this immersion only.
pub fn extrinsic_constants<I: Immersion + ?Sized>(
    im: &I,
    nu: &DriftField,
    grid: &SampleGrid,
) -> Result<GeometricConstants> {
    if grid.points.is_empty() {
        return Err(invalid("sample grid is empty"));
    }
    nu.check_dim(im.ambient_dim())?;
    let n = im.intrinsic_dim();
    let nf = n as f64;
    let mut c1: f64 = 0.0;
    let mut d1: f64 = 0.0;
    for y in &grid.points {
        let h = mean_curvature_at(im, y)?;
        c1 = c1.max(nf * nf * h * h);
        d1 = d1.max(drift_projection_norm(im, nu, y)?);
    }
    Ok(GeometricConstants::new(n, c1, d1))
}
