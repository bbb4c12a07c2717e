use std::f64::consts::PI;

use approx::assert_relative_eq;
use nalgebra::DMatrix;

use super::*;
use crate::fem::{assemble, mesh_icosphere, mesh_interval, mesh_unit_square, quadratic_form, spmv};
use crate::geometry::DriftField;
use crate::spectra::interval_drift_spectrum;

#[test]
fn diagonal_pencil() {
    let k = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]));
    let m = DMatrix::identity(3, 3);
    let sol = solve_dense(&k, &m, 3, Boundary::Dirichlet).unwrap();
    assert_eq!(sol.spectrum.expanded(), vec![1.0, 2.0, 3.0]);
}

#[test]
fn equal_matrices_give_unit_values() {
    let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
    let sol = solve_dense(&a, &a, 3, Boundary::Dirichlet).unwrap();
    for v in sol.spectrum.expanded() {
        assert_relative_eq!(v, 1.0, max_relative = 1e-12);
    }
}

#[test]
fn indefinite_mass_is_rejected() {
    let k = DMatrix::identity(2, 2);
    let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
    assert!(matches!(
        solve_dense(&k, &m, 1, Boundary::Dirichlet),
        Err(Error::Definiteness(_))
    ));
}

#[test]
fn dense_matches_drifted_interval() {
    let sys = assemble(
        &mesh_interval(PI, 400).unwrap(),
        &DriftField::new(vec![2.0]),
        Boundary::Dirichlet,
    )
    .unwrap();
    let sol = solve_system(&sys, 5, &SolverSettings::default(), "fem").unwrap();
    let exact = interval_drift_spectrum(PI, 2.0, 5).unwrap().expanded();
    for (v, e) in sol.spectrum.expanded().iter().zip(&exact) {
        assert_relative_eq!(*v, *e, max_relative = 5e-3);
    }
}

#[test]
fn iterative_agrees_with_dense() {
    let mesh = mesh_unit_square(16).unwrap();
    let sys = assemble(&mesh, &DriftField::new(vec![0.5, 1.0]), Boundary::Dirichlet).unwrap();
    let dense = solve_dense(
        &sparse_to_dense(&sys.stiffness),
        &sparse_to_dense(&sys.mass),
        8,
        Boundary::Dirichlet,
    )
    .unwrap();
    let iter = solve_iterative(
        &sys.stiffness,
        &sys.mass,
        8,
        &SolverSettings::default(),
        Boundary::Dirichlet,
    )
    .unwrap();
    assert_eq!(iter.method, SolveMethod::ShiftInvertSubspace);
    for (a, b) in dense.raw_values.iter().zip(&iter.raw_values) {
        assert!((a - b).abs() / a < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn icosphere_closed_spectrum() {
    let exact = [0.0, 2.0, 2.0, 2.0, 6.0, 6.0, 6.0, 6.0, 6.0, 12.0];
    let settings = SolverSettings::default();
    let sys = assemble(&mesh_icosphere(3).unwrap(), &DriftField::zero(3), Boundary::Closed).unwrap();
    let iter = solve_iterative(&sys.stiffness, &sys.mass, 10, &settings, Boundary::Closed).unwrap();
    let s = iter.spectrum.expanded();
    assert_eq!(s[0], 0.0);
    assert!(iter.raw_values[0].abs() < 1e-8);
    // Level 3 reaches 1% on the first cluster only; P1 error grows like Λ²h².
    for (i, (v, e)) in s.iter().zip(&exact).enumerate().skip(1) {
        let limit = if i <= 3 { 0.01 } else { 0.025 };
        assert!((v - e).abs() / e < limit, "{v} vs {e}");
    }
    let dense = solve_dense(
        &sparse_to_dense(&sys.stiffness),
        &sparse_to_dense(&sys.mass),
        10,
        Boundary::Closed,
    )
    .unwrap();
    for (a, b) in dense.raw_values.iter().zip(&iter.raw_values).skip(1) {
        assert!((a - b).abs() / a < 1e-8, "{a} vs {b}");
    }

    let fine = assemble(&mesh_icosphere(4).unwrap(), &DriftField::zero(3), Boundary::Closed).unwrap();
    let s = solve_system(&fine, 10, &settings, "fem").unwrap().spectrum.expanded();
    for (v, e) in s.iter().zip(&exact).skip(1) {
        assert!((v - e).abs() / e < 0.01, "{v} vs {e}");
    }
}

#[test]
fn vectors_are_m_orthonormal_with_small_residuals() {
    let mesh = mesh_unit_square(20).unwrap();
    let sys = assemble(&mesh, &DriftField::new(vec![1.0, 0.0]), Boundary::Dirichlet).unwrap();
    let settings = SolverSettings::default();
    let sol = solve_iterative(&sys.stiffness, &sys.mass, 6, &settings, Boundary::Dirichlet).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            let xi = sol.vectors.column(i).into_owned();
            let xj = sol.vectors.column(j).into_owned();
            let ip = xi.dot(&spmv(&sys.mass, &xj));
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!((ip - expected).abs() < 1e-8, "({i},{j}) {ip}");
        }
        assert!(sol.residual_norms[i] <= settings.tol);
        let x = sol.vectors.column(i).into_owned();
        let q = quadratic_form(&sys.stiffness, &x);
        assert_relative_eq!(q, sol.raw_values[i], max_relative = 1e-8);
    }
}

#[test]
fn exhausted_iterations_report_diagnostics() {
    let sys = assemble(
        &mesh_unit_square(16).unwrap(),
        &DriftField::zero(2),
        Boundary::Dirichlet,
    )
    .unwrap();
    let settings = SolverSettings {
        max_iterations: 1,
        tol: 1e-15,
        ..SolverSettings::default()
    };
    match solve_iterative(&sys.stiffness, &sys.mass, 4, &settings, Boundary::Dirichlet) {
        Err(Error::Convergence {
            iterations, requested, ..
        }) => {
            assert_eq!((iterations, requested), (1, 4));
        }
        other => panic!("expected a convergence error, got {other:?}"),
    }
}

#[test]
fn seeded_runs_are_identical() {
    let sys = assemble(
        &mesh_unit_square(16).unwrap(),
        &DriftField::zero(2),
        Boundary::Dirichlet,
    )
    .unwrap();
    let s = SolverSettings::default();
    let a = solve_iterative(&sys.stiffness, &sys.mass, 4, &s, Boundary::Dirichlet).unwrap();
    let b = solve_iterative(&sys.stiffness, &sys.mass, 4, &s, Boundary::Dirichlet).unwrap();
    assert_eq!(a.raw_values, b.raw_values);
}

#[test]
fn rcm_is_a_permutation() {
    let sys = assemble(&mesh_icosphere(2).unwrap(), &DriftField::zero(3), Boundary::Closed).unwrap();
    let mut p = reverse_cuthill_mckee(&sys.stiffness);
    p.sort_unstable();
    assert_eq!(p, (0..sys.dofs()).collect::<Vec<_>>());
}
