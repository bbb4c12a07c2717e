use nalgebra::{DMatrix, DVector, SymmetricEigen};
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix, CsrMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{finish, ordering::reverse_cuthill_mckee, residuals, EigenSolution, SolveMethod, SolverSettings};
use crate::error::{invalid, Error, Result};
use crate::fem::assembly::{spmv, trace};
use crate::fem::Boundary;

/// Cholesky factor of `P(K + σM)Pᵀ` for a bandwidth-reducing permutation `P`.
struct ShiftedFactor {
    perm: Vec<usize>,
    factor: CscCholesky<f64>,
}

impl ShiftedFactor {
    fn new(k: &CsrMatrix<f64>, m: &CsrMatrix<f64>, sigma: f64) -> Result<Self> {
        let n = k.nrows();
        let perm = reverse_cuthill_mckee(k);
        let mut inverse = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        let mut coo = CooMatrix::new(n, n);
        for (i, j, v) in k.triplet_iter() {
            coo.push(inverse[i], inverse[j], *v);
        }
        if sigma != 0.0 {
            for (i, j, v) in m.triplet_iter() {
                coo.push(inverse[i], inverse[j], sigma * v);
            }
        }
        let csc = CscMatrix::from(&coo);
        let factor =
            CscCholesky::factor(&csc).map_err(|e| Error::Definiteness(format!("shifted stiffness matrix: {e:?}")))?;
        Ok(ShiftedFactor { perm, factor })
    }

    /// Solve `(K + σM) Y = B` column-wise.
    fn solve(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let (n, p) = b.shape();
        let mut permuted = DMatrix::zeros(n, p);
        for (new, &old) in self.perm.iter().enumerate() {
            permuted.row_mut(new).copy_from(&b.row(old));
        }
        let y = self.factor.solve(&permuted);
        let mut out = DMatrix::zeros(n, p);
        for (new, &old) in self.perm.iter().enumerate() {
            out.row_mut(old).copy_from(&y.row(new));
        }
        out
    }
}

fn block_product(a: &CsrMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = x.column_iter().map(|c| spmv(a, &c.into_owned())).collect();
    DMatrix::from_columns(&cols)
}

/// M-orthonormalize the columns in place, replacing collapsed columns with
/// fresh random directions.
fn m_orthonormalize(x: &mut DMatrix<f64>, m: &CsrMatrix<f64>, rng: &mut ChaCha8Rng) {
    let p = x.ncols();
    for j in 0..p {
        for attempt in 0..3 {
            let mut v = x.column(j).into_owned();
            let original = v.dot(&spmv(m, &v)).sqrt();
            for _ in 0..2 {
                let mv = spmv(m, &v);
                for i in 0..j {
                    let c = x.column(i).dot(&mv);
                    v -= c * x.column(i);
                }
            }
            let norm = v.dot(&spmv(m, &v)).sqrt();
            if norm > 1e-10 * original.max(f64::MIN_POSITIVE) && norm.is_finite() {
                x.set_column(j, &(v / norm));
                break;
            }
            let fresh = DVector::from_fn(x.nrows(), |_, _| rng.gen_range(-1.0..1.0));
            x.set_column(j, &fresh);
            if attempt == 2 {
                x.set_column(j, &DVector::zeros(x.nrows()));
            }
        }
    }
}

/// Shift-invert subspace iteration with Rayleigh–Ritz on the block.
///
/// Closed problems factor `K + εM` with `ε = 1e-8·tr K/tr M`, which keeps the
/// factor definite; Ritz values are computed against `K` itself.
pub fn solve_iterative(
    k: &CsrMatrix<f64>,
    m: &CsrMatrix<f64>,
    count: usize,
    settings: &SolverSettings,
    boundary: Boundary,
) -> Result<EigenSolution> {
    let n = k.nrows();
    if k.ncols() != n || m.nrows() != n || m.ncols() != n {
        return Err(invalid("K and M must be square and of equal size"));
    }
    let block = (2 * count).max(count + 8);
    if count == 0 || block >= n {
        return Err(invalid(format!(
            "iterative solve of {count} pairs needs dimension above {block}, got {n}"
        )));
    }
    let scale = trace(k) / trace(m);
    let sigma = match boundary {
        Boundary::Closed => 1e-8 * scale,
        Boundary::Dirichlet => 0.0,
    };
    let factor = ShiftedFactor::new(k, m, sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut x = DMatrix::from_fn(n, block, |_, _| rng.gen_range(-1.0..1.0));
    m_orthonormalize(&mut x, m, &mut rng);

    let apply_k = |v: &DVector<f64>| spmv(k, v);
    let apply_m = |v: &DVector<f64>| spmv(m, v);
    let mut worst = f64::INFINITY;
    let mut converged = 0;
    for iteration in 1..=settings.max_iterations {
        let mut y = factor.solve(&block_product(m, &x));
        m_orthonormalize(&mut y, m, &mut rng);
        let ky = block_product(k, &y);
        let small = y.transpose() * &ky;
        let small = (&small + small.transpose()) * 0.5;
        let eig = SymmetricEigen::new(small);
        let mut order: Vec<usize> = (0..block).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let z = DMatrix::from_columns(
            &order
                .iter()
                .map(|&i| eig.eigenvectors.column(i).into_owned())
                .collect::<Vec<_>>(),
        );
        x = &y * z;
        let values: Vec<f64> = order.iter().take(count).map(|&i| eig.eigenvalues[i]).collect();
        let wanted = x.columns(0, count).into_owned();
        let res = residuals(&apply_k, &apply_m, scale, &values, &wanted);
        worst = res.iter().copied().fold(0.0, f64::max);
        converged = res.iter().filter(|r| **r <= settings.tol).count();
        if converged == count {
            return finish(
                values,
                wanted,
                res,
                boundary,
                SolveMethod::ShiftInvertSubspace,
                iteration,
                scale,
                "iterative",
            );
        }
    }
    Err(Error::Convergence {
        iterations: settings.max_iterations,
        worst_residual: worst,
        converged,
        requested: count,
    })
}
