use std::collections::BTreeSet;
use std::io::Write;

use nalgebra::{DMatrix, DVector, Matrix2};
use nalgebra_sparse::CsrMatrix;
use serde::{Deserialize, Serialize};

use super::mesh::Mesh;
use crate::error::{invalid, Error, Result};
use crate::geometry::DriftField;

/// Boundary treatment of the discrete problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Boundary vertices are eliminated.
    Dirichlet,
    /// No boundary; the constant mode is in the kernel.
    Closed,
}

/// Weighted stiffness and mass matrices over the free degrees of freedom.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub stiffness: CsrMatrix<f64>,
    pub mass: CsrMatrix<f64>,
    /// Degree of freedom of each vertex, `None` for eliminated vertices.
    pub dof_map: Vec<Option<usize>>,
    /// Vertex of each degree of freedom.
    pub dof_vertices: Vec<usize>,
    pub boundary: Boundary,
}

impl AssembledSystem {
    pub fn dofs(&self) -> usize {
        self.dof_vertices.len()
    }

    /// Write both matrices as `row col value` triplets, 0-based, one section each.
    pub fn write_coo<W: Write>(&self, mut out: W) -> Result<()> {
        for (name, m) in [("stiffness", &self.stiffness), ("mass", &self.mass)] {
            writeln!(out, "% {name} {} {} {}", m.nrows(), m.ncols(), m.nnz())?;
            for (i, j, v) in m.triplet_iter() {
                writeln!(out, "{i} {j} {v:?}")?;
            }
        }
        Ok(())
    }

    /// Interpolate a scalar function of the vertex positions onto the dofs.
    pub fn interpolate(&self, mesh: &Mesh, f: impl Fn(&[f64]) -> f64) -> DVector<f64> {
        DVector::from_iterator(self.dofs(), self.dof_vertices.iter().map(|&v| f(&mesh.vertices()[v])))
    }
}

/// Local element matrices of one cell.
struct Element {
    dofs: Vec<usize>,
    stiffness: DMatrix<f64>,
    mass: DMatrix<f64>,
}

/// Quadrature points (barycentric weights) and relative weights.
fn quadrature(intrinsic: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    match intrinsic {
        1 => {
            let g = 0.5 / 3f64.sqrt();
            (vec![vec![0.5 + g, 0.5 - g], vec![0.5 - g, 0.5 + g]], vec![0.5, 0.5])
        }
        _ => (
            vec![vec![0.5, 0.5, 0.0], vec![0.0, 0.5, 0.5], vec![0.5, 0.0, 0.5]],
            vec![1.0 / 3.0; 3],
        ),
    }
}

fn element(mesh: &Mesh, cell: usize, weight: &dyn Fn(&[f64], usize) -> f64) -> Result<Element> {
    let c = &mesh.cells()[cell];
    let n = mesh.intrinsic_dim();
    let metric = mesh.cell_metric(cell);
    let volume = mesh.cell_volume(cell);
    let degenerate = |reason: String| Error::DegenerateCell { cell, reason };
    if !(volume > 0.0) {
        return Err(degenerate(format!("induced volume {volume:e}")));
    }
    // Gradient inner products of the barycentric basis.
    let grads: DMatrix<f64> = match n {
        1 => {
            let inv = 1.0 / metric[(0, 0)];
            DMatrix::from_row_slice(2, 2, &[inv, -inv, -inv, inv])
        }
        _ => {
            let g = Matrix2::new(metric[(0, 0)], metric[(0, 1)], metric[(1, 0)], metric[(1, 1)]);
            let ginv = g
                .try_inverse()
                .ok_or_else(|| degenerate("singular induced metric".into()))?;
            let d = DMatrix::from_row_slice(3, 2, &[-1.0, -1.0, 1.0, 0.0, 0.0, 1.0]);
            let gi = DMatrix::from_row_slice(2, 2, &[ginv[(0, 0)], ginv[(0, 1)], ginv[(1, 0)], ginv[(1, 1)]]);
            &d * gi * d.transpose()
        }
    };
    let (points, weights) = quadrature(n);
    let arity = c.len();
    let ambient = mesh.ambient_dim();
    let mut integral = 0.0;
    let mut mass = DMatrix::zeros(arity, arity);
    let mut x = vec![0.0; ambient];
    for (bary, w) in points.iter().zip(&weights) {
        for (d, xd) in x.iter_mut().enumerate() {
            *xd = bary.iter().zip(c).map(|(b, &v)| b * mesh.vertices()[v][d]).sum();
        }
        let wq = w * volume * weight(&x, cell);
        integral += wq;
        for a in 0..arity {
            for b in a..arity {
                mass[(a, b)] += wq * bary[a] * bary[b];
            }
        }
    }
    let mut stiffness = DMatrix::zeros(arity, arity);
    for a in 0..arity {
        for b in a..arity {
            stiffness[(a, b)] = grads[(a, b)] * integral;
        }
    }
    Ok(Element {
        dofs: c.clone(),
        stiffness,
        mass,
    })
}

/// Free degrees of freedom for a boundary treatment.
fn dof_numbering(mesh: &Mesh, boundary: Boundary) -> Result<(Vec<Option<usize>>, Vec<usize>)> {
    match boundary {
        Boundary::Dirichlet if mesh.is_closed() => {
            return Err(invalid("Dirichlet assembly needs a mesh with boundary"));
        }
        Boundary::Closed if !mesh.is_closed() => {
            return Err(invalid("closed assembly needs a mesh without boundary"));
        }
        _ => {}
    }
    let mut eliminated = vec![false; mesh.vertices().len()];
    if boundary == Boundary::Dirichlet {
        for &v in mesh.boundary_vertices() {
            eliminated[v] = true;
        }
    }
    let mut map = vec![None; eliminated.len()];
    let mut vertices = Vec::new();
    for (v, &gone) in eliminated.iter().enumerate() {
        if !gone {
            map[v] = Some(vertices.len());
            vertices.push(v);
        }
    }
    if vertices.is_empty() {
        return Err(invalid("no free degrees of freedom remain"));
    }
    Ok((map, vertices))
}

/// Row offsets and sorted column indices of the P1 coupling pattern.
fn sparsity(mesh: &Mesh, map: &[Option<usize>], dofs: usize) -> (Vec<usize>, Vec<usize>) {
    let mut rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); dofs];
    for c in mesh.cells() {
        for &a in c {
            for &b in c {
                if let (Some(i), Some(j)) = (map[a], map[b]) {
                    rows[i].insert(j);
                }
            }
        }
    }
    let mut offsets = Vec::with_capacity(dofs + 1);
    let mut cols = Vec::new();
    offsets.push(0);
    for r in rows {
        cols.extend(r);
        offsets.push(cols.len());
    }
    (offsets, cols)
}

fn position(offsets: &[usize], cols: &[usize], i: usize, j: usize) -> usize {
    let row = &cols[offsets[i]..offsets[i + 1]];
    offsets[i] + row.binary_search(&j).expect("entry is in the precomputed pattern")
}

/// Assemble with a weight evaluated at ambient quadrature points of a cell.
pub fn assemble_with_weight(
    mesh: &Mesh,
    boundary: Boundary,
    weight: &dyn Fn(&[f64], usize) -> f64,
) -> Result<AssembledSystem> {
    let (map, dof_vertices) = dof_numbering(mesh, boundary)?;
    let dofs = dof_vertices.len();
    let (offsets, cols) = sparsity(mesh, &map, dofs);
    let mut kv = vec![0.0; cols.len()];
    let mut mv = vec![0.0; cols.len()];
    for cell in 0..mesh.cells().len() {
        let e = element(mesh, cell, weight)?;
        for a in 0..e.dofs.len() {
            for b in a..e.dofs.len() {
                let (Some(i), Some(j)) = (map[e.dofs[a]], map[e.dofs[b]]) else {
                    continue;
                };
                let (k, m) = (e.stiffness[(a, b)], e.mass[(a, b)]);
                let p = position(&offsets, &cols, i, j);
                kv[p] += k;
                mv[p] += m;
                if i != j {
                    let q = position(&offsets, &cols, j, i);
                    kv[q] += k;
                    mv[q] += m;
                }
            }
        }
    }
    let build = |values: Vec<f64>| {
        CsrMatrix::try_from_csr_data(dofs, dofs, offsets.clone(), cols.clone(), values)
            .map_err(|e| invalid(format!("sparse structure: {e}")))
    };
    Ok(AssembledSystem {
        stiffness: build(kv)?,
        mass: build(mv)?,
        dof_map: map,
        dof_vertices,
        boundary,
    })
}

/// P1 assembly of `∫⟨∇φ_i,∇φ_j⟩e^{⟨ν,X⟩}` and `∫φ_iφ_j e^{⟨ν,X⟩}`.
pub fn assemble(mesh: &Mesh, nu: &DriftField, boundary: Boundary) -> Result<AssembledSystem> {
    nu.check_dim(mesh.ambient_dim())?;
    let v = nu.nu.clone();
    let weight = move |x: &[f64], _: usize| x.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>().exp();
    assemble_with_weight(mesh, boundary, &weight)
}

/// Assembly with unit weight.
pub fn assemble_unweighted(mesh: &Mesh, boundary: Boundary) -> Result<AssembledSystem> {
    assemble_with_weight(mesh, boundary, &|_, _| 1.0)
}

/// Exact structural and numerical symmetry.
pub fn is_exactly_symmetric(m: &CsrMatrix<f64>) -> bool {
    let t = m.transpose();
    t.row_offsets() == m.row_offsets() && t.col_indices() == m.col_indices() && t.values() == m.values()
}

/// `xᵀAx`.
pub fn quadratic_form(a: &CsrMatrix<f64>, x: &DVector<f64>) -> f64 {
    x.dot(&spmv(a, x))
}

/// Sparse matrix times vector.
pub fn spmv(a: &CsrMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    let mut y = DVector::zeros(a.nrows());
    for (i, row) in a.row_iter().enumerate() {
        y[i] = row.col_indices().iter().zip(row.values()).map(|(&j, v)| v * x[j]).sum();
    }
    y
}

pub fn trace(a: &CsrMatrix<f64>) -> f64 {
    (0..a.nrows())
        .map(|i| a.get_entry(i, i).map(|e| e.into_value()).unwrap_or(0.0))
        .sum()
}
