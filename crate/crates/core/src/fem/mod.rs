//! P1 finite elements for the weighted Laplacian on curves and surfaces.

pub mod assembly;
pub mod mesh;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bounds::EigenMoments;
use crate::eigensolve::{solve_system, SolverSettings};
use crate::error::{invalid, Result};
use crate::geometry::{mean_curvature_trace, DriftField, Immersion};
use crate::spectra::{disk_spectrum, interval_drift_spectrum, sphere_spectrum};

pub use assembly::{
    assemble, assemble_unweighted, assemble_with_weight, is_exactly_symmetric, quadratic_form, spmv, trace,
    AssembledSystem, Boundary,
};
pub use mesh::{
    mesh_circle, mesh_clifford_torus, mesh_curve, mesh_disk, mesh_disk_on, mesh_icosphere, mesh_interval, mesh_patch,
    mesh_unit_square, Mesh,
};

/// Squared length `|nH⃗|²` of the mean curvature vector at each cell's
/// parameter centroid.
pub fn cell_curvature_terms(mesh: &Mesh, im: &dyn Immersion) -> Result<Vec<f64>> {
    let params = mesh
        .params()
        .ok_or_else(|| invalid("mesh carries no parameter coordinates"))?;
    mesh.cells()
        .iter()
        .map(|c| {
            let dim = params[c[0]].len();
            let centroid: Vec<f64> = (0..dim)
                .map(|d| c.iter().map(|&v| params[v][d]).sum::<f64>() / c.len() as f64)
                .collect();
            Ok(mean_curvature_trace(im, &centroid)?.norm_squared())
        })
        .collect()
}

/// `|ν^⊤|` against the flat tangent space of every cell.
pub fn cell_tangential_drift(mesh: &Mesh, nu: &DriftField) -> Result<Vec<f64>> {
    nu.check_dim(mesh.ambient_dim())?;
    let v = nu.vector();
    (0..mesh.cells().len())
        .map(|cell| {
            let e = mesh.cell_edges(cell);
            let g = e.transpose() * &e;
            let coeffs = g
                .lu()
                .solve(&(e.transpose() * &v))
                .ok_or_else(|| crate::error::Error::DegenerateCell {
                    cell,
                    reason: "singular induced metric".into(),
                })?;
            Ok((&e * coeffs).norm())
        })
        .collect()
}

/// Weighted moments `∫u²|nH⃗|²e^w`, `∫u²|ν^⊤|²e^w`, `∫u²|ν^⊤|e^w` of each
/// eigenvector column, with `|nH⃗|²` supplied per cell.
pub fn eigen_moments(
    mesh: &Mesh,
    nu: &DriftField,
    system: &AssembledSystem,
    vectors: &DMatrix<f64>,
    curvature_terms: &[f64],
) -> Result<Vec<EigenMoments>> {
    if curvature_terms.len() != mesh.cells().len() {
        return Err(invalid("one curvature term per cell is required"));
    }
    if vectors.nrows() != system.dofs() {
        return Err(invalid("eigenvectors do not match the system size"));
    }
    let tangential = cell_tangential_drift(mesh, nu)?;
    let w = nu.nu.clone();
    let density = move |x: &[f64]| x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>().exp();
    let weighted = |factor: &dyn Fn(usize) -> f64| {
        assemble_with_weight(mesh, system.boundary, &|x, cell| density(x) * factor(cell)).map(|s| s.mass)
    };
    let curvature = weighted(&|c| curvature_terms[c])?;
    let drift_sq = weighted(&|c| tangential[c] * tangential[c])?;
    let drift = weighted(&|c| tangential[c])?;
    Ok(vectors
        .column_iter()
        .map(|u| {
            let u = u.into_owned();
            EigenMoments {
                curvature: quadratic_form(&curvature, &u),
                drift_sq: quadratic_form(&drift_sq, &u),
                drift: quadratic_form(&drift, &u),
            }
        })
        .collect())
}

/// `∫f e^w / ∫e^w` over a closed mesh for a cell-wise constant `f`.
pub fn weighted_mean(mesh: &Mesh, nu: &DriftField, factors: &[f64]) -> Result<f64> {
    if factors.len() != mesh.cells().len() {
        return Err(invalid("one factor per cell is required"));
    }
    nu.check_dim(mesh.ambient_dim())?;
    let w = nu.nu.clone();
    let density = move |x: &[f64]| x.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>().exp();
    let weighted = assemble_with_weight(mesh, Boundary::Closed, &|x, c| density(x) * factors[c])?;
    let plain = assemble_with_weight(mesh, Boundary::Closed, &|x, _| density(x))?;
    Ok(weighted.mass.values().iter().sum::<f64>() / plain.mass.values().iter().sum::<f64>())
}

/// Problems with a closed-form spectrum, used to measure discretization error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StudyProblem {
    /// `(0, length)` with constant drift `b`; levels are cell counts.
    Interval { length: f64, drift: f64 },
    /// Disk of the given radius; levels are ring counts.
    Disk { radius: f64 },
    /// Unit sphere; levels are icosphere subdivision levels.
    Sphere,
}

/// One refinement level of a study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub level: usize,
    pub h: f64,
    pub dofs: usize,
    pub values: Vec<f64>,
    /// `|Λ_h − Λ| / Λ` for each compared eigenvalue.
    pub errors: Vec<f64>,
}

/// Errors against the oracle along a refinement ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub problem: StudyProblem,
    /// Eigenvalues compared, as indices into the spectrum.
    pub indices: Vec<usize>,
    pub exact: Vec<f64>,
    pub rows: Vec<StudyRow>,
    /// Least-squares slope of `log error` against `log h`, per eigenvalue.
    pub orders: Vec<f64>,
}

impl StudyProblem {
    fn mesh(&self, level: usize) -> Result<(Mesh, DriftField, Boundary)> {
        Ok(match *self {
            StudyProblem::Interval { length, drift } => (
                mesh_interval(length, level)?,
                DriftField::new(vec![drift]),
                Boundary::Dirichlet,
            ),
            StudyProblem::Disk { radius } => (mesh_disk(radius, level)?, DriftField::zero(2), Boundary::Dirichlet),
            StudyProblem::Sphere => (mesh_icosphere(level)?, DriftField::zero(3), Boundary::Closed),
        })
    }

    /// Expanded exact values, skipping the closed zero mode.
    fn oracle(&self, count: usize) -> Result<(Vec<usize>, Vec<f64>)> {
        Ok(match *self {
            StudyProblem::Interval { length, drift } => {
                let s = interval_drift_spectrum(length, drift, count)?;
                ((1..=count).collect(), s.expanded()[..count].to_vec())
            }
            StudyProblem::Disk { radius } => {
                let s = disk_spectrum(radius, count)?;
                ((1..=count).collect(), s.expanded()[..count].to_vec())
            }
            StudyProblem::Sphere => {
                let s = sphere_spectrum(2, count + 1)?;
                ((1..=count).collect(), s.expanded()[1..=count].to_vec())
            }
        })
    }
}

/// Solve `problem` at each level and compare the first `count` nonzero
/// eigenvalues against the oracle.
pub fn convergence_study(
    problem: StudyProblem,
    levels: &[usize],
    count: usize,
    settings: &SolverSettings,
) -> Result<ConvergenceTable> {
    if levels.len() < 2 || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("refinement levels must be strictly ascending, at least two"));
    }
    if count == 0 {
        return Err(invalid("at least one eigenvalue must be compared"));
    }
    let (indices, exact) = problem.oracle(count)?;
    let mut rows = Vec::with_capacity(levels.len());
    for &level in levels {
        let (mesh, nu, boundary) = problem.mesh(level)?;
        let system = assemble(&mesh, &nu, boundary)?;
        let wanted = if boundary == Boundary::Closed { count + 1 } else { count };
        let sol = solve_system(&system, wanted, settings, "fem")?;
        let expanded = sol.spectrum.expanded();
        let values: Vec<f64> = match boundary {
            Boundary::Closed => expanded[1..=count].to_vec(),
            Boundary::Dirichlet => expanded[..count].to_vec(),
        };
        let errors = values
            .iter()
            .zip(&exact)
            .map(|(v, e)| (v - e).abs() / e.abs())
            .collect();
        rows.push(StudyRow {
            level,
            h: mesh.max_edge_length(),
            dofs: system.dofs(),
            values,
            errors,
        });
    }
    let orders = (0..count).map(|i| log_log_slope(&rows, i)).collect();
    Ok(ConvergenceTable {
        problem,
        indices,
        exact,
        rows,
        orders,
    })
}

fn log_log_slope(rows: &[StudyRow], i: usize) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.h.ln(), r.errors[i].max(f64::MIN_POSITIVE).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

impl ConvergenceTable {
    /// Relative error estimate for each compared value at the finest level,
    /// extrapolated from the last two levels at the observed order.
    pub fn finest_error_estimate(&self) -> Vec<f64> {
        let last = &self.rows[self.rows.len() - 1];
        let prev = &self.rows[self.rows.len() - 2];
        (0..self.exact.len())
            .map(|i| {
                let p = self.orders[i].max(1.0);
                let ratio = (prev.h / last.h).powf(p);
                ((last.values[i] - prev.values[i]).abs() / (ratio - 1.0)).max(0.0) / last.values[i].abs()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests;
