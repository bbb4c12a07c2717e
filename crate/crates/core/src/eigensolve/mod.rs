//! Smallest eigenpairs of the symmetric-definite pencil `Kx = ΛMx`.

mod iterative;
mod ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use nalgebra_sparse::CsrMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fem::{AssembledSystem, Boundary};
use crate::spectra::{IndexBase, Spectrum};

pub use iterative::solve_iterative;
pub use ordering::reverse_cuthill_mckee;

/// Solver knobs, read from the global config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    /// Relative residual at which a pair counts as converged.
    pub tol: f64,
    pub max_iterations: usize,
    pub seed: u64,
    /// Systems up to this size are solved densely.
    pub dense_threshold: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol: 1e-10,
            max_iterations: 400,
            seed: 20_240_917,
            dense_threshold: 800,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Dense,
    ShiftInvertSubspace,
}

/// Converged eigenpairs in ascending order.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub spectrum: Spectrum,
    /// Eigenvalues as computed; for closed problems the zero mode may differ
    /// from the exact zero stored in `spectrum` by roundoff.
    pub raw_values: Vec<f64>,
    /// M-orthonormal eigenvectors as columns.
    pub vectors: DMatrix<f64>,
    /// `‖Kx − Λx Mx‖ / max(‖Kx‖, (tr K / tr M)‖Mx‖)` per pair.
    pub residual_norms: Vec<f64>,
    pub method: SolveMethod,
    pub iterations: usize,
}

pub(crate) fn sparse_to_dense(a: &CsrMatrix<f64>) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(a.nrows(), a.ncols());
    for (i, j, v) in a.triplet_iter() {
        d[(i, j)] = *v;
    }
    d
}

fn dense_trace(a: &DMatrix<f64>) -> f64 {
    a.diagonal().sum()
}

/// Relative residuals of eigenpairs against dense or sparse operators.
pub(crate) fn residuals(
    apply_k: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    apply_m: &dyn Fn(&DVector<f64>) -> DVector<f64>,
    scale: f64,
    values: &[f64],
    vectors: &DMatrix<f64>,
) -> Vec<f64> {
    values
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let x = vectors.column(i).into_owned();
            let kx = apply_k(&x);
            let mx = apply_m(&x);
            let denom = kx.norm().max(scale * mx.norm());
            if denom == 0.0 {
                0.0
            } else {
                (&kx - lambda * &mx).norm() / denom
            }
        })
        .collect()
}

/// Full symmetric-definite reduction through the Cholesky factor of `M`.
pub fn solve_dense(k: &DMatrix<f64>, m: &DMatrix<f64>, count: usize, boundary: Boundary) -> Result<EigenSolution> {
    let n = k.nrows();
    if k.ncols() != n || m.nrows() != n || m.ncols() != n {
        return Err(invalid("K and M must be square and of equal size"));
    }
    if count == 0 || count > n {
        return Err(invalid(format!(
            "requested {count} eigenpairs of a {n}-dimensional system"
        )));
    }
    if n > 2000 {
        return Err(invalid(format!("dense solve refused for dimension {n}")));
    }
    let (values, vectors) = dense_pencil(k, m)?;
    let values: Vec<f64> = values[..count].to_vec();
    let vectors = vectors.columns(0, count).into_owned();
    let scale = dense_trace(k) / dense_trace(m);
    let residual_norms = residuals(&|x| k * x, &|x| m * x, scale, &values, &vectors);
    finish(
        values,
        vectors,
        residual_norms,
        boundary,
        SolveMethod::Dense,
        1,
        scale,
        "dense",
    )
}

/// All eigenpairs of a small dense pencil, ascending, M-orthonormal.
pub(crate) fn dense_pencil(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let chol = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Definiteness("mass matrix has no Cholesky factor".into()))?;
    let l = chol.l();
    let linv_k = l
        .solve_lower_triangular(k)
        .ok_or_else(|| Error::Definiteness("singular Cholesky factor".into()))?;
    let c = l
        .solve_lower_triangular(&linv_k.transpose())
        .ok_or_else(|| Error::Definiteness("singular Cholesky factor".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let y = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    let x = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or_else(|| Error::Definiteness("singular Cholesky factor".into()))?;
    Ok((values, x))
}

/// Package raw eigenpairs into a spectrum with the right index base.
#[allow(clippy::too_many_arguments)]
pub(crate) fn finish(
    raw_values: Vec<f64>,
    vectors: DMatrix<f64>,
    residual_norms: Vec<f64>,
    boundary: Boundary,
    method: SolveMethod,
    iterations: usize,
    scale: f64,
    source: &str,
) -> Result<EigenSolution> {
    let mut values = raw_values.clone();
    let base = match boundary {
        Boundary::Dirichlet => {
            if let Some(v) = values.iter().find(|v| **v <= 0.0) {
                return Err(Error::Definiteness(format!(
                    "Dirichlet eigenvalue {v:e} is not positive"
                )));
            }
            IndexBase::DirichletFromOne
        }
        Boundary::Closed => {
            let zero_band = 1e-8 * scale.max(1.0);
            if values[0].abs() > zero_band {
                return Err(Error::Definiteness(format!(
                    "closed problem has no zero mode (lowest value {:e})",
                    values[0]
                )));
            }
            values[0] = 0.0;
            if let Some(v) = values[1..].iter().find(|v| **v <= zero_band) {
                return Err(Error::Definiteness(format!(
                    "closed problem has a second zero mode ({v:e})"
                )));
            }
            IndexBase::ClosedFromZero
        }
    };
    let spectrum = Spectrum::from_expanded(values, base, source)?;
    Ok(EigenSolution {
        spectrum,
        raw_values,
        vectors,
        residual_norms,
        method,
        iterations,
    })
}

/// Solve an assembled system, dense below the configured threshold.
pub fn solve_system(
    system: &AssembledSystem,
    count: usize,
    settings: &SolverSettings,
    source: &str,
) -> Result<EigenSolution> {
    let n = system.dofs();
    let mut sol = if n <= settings.dense_threshold {
        let k = sparse_to_dense(&system.stiffness);
        let m = sparse_to_dense(&system.mass);
        solve_dense(&k, &m, count, system.boundary)?
    } else {
        solve_iterative(&system.stiffness, &system.mass, count, settings, system.boundary)?
    };
    sol.spectrum = sol.spectrum.with_source(source);
    Ok(sol)
}

#[cfg(test)]
mod tests;
