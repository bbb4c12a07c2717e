use proptest::prelude::*;

use driftspec::bounds::{
    evaluate, recursion_bound, recursion_coefficient, CheckContext, CheckId, CheckResult, CheckStatus,
    GeometricConstants, Tolerance,
};
use driftspec::fem::{assemble, mesh_interval, quadratic_form, trace, Boundary};
use driftspec::geometry::DriftField;
use driftspec::spectra::{box_spectrum, distinct_eigenvalues, IndexBase, Spectrum};
use driftspec::Error;

fn dirichlet_spectrum() -> impl Strategy<Value = Spectrum> {
    prop::collection::vec(0.1f64..100.0, 4..16)
        .prop_map(|v| Spectrum::from_expanded(v, IndexBase::DirichletFromOne, "proptest").expect("positive values"))
}

fn closed_spectrum() -> impl Strategy<Value = Spectrum> {
    prop::collection::vec(0.5f64..60.0, 4..14).prop_map(|mut v| {
        v.push(0.0);
        Spectrum::from_expanded(v, IndexBase::ClosedFromZero, "proptest").expect("simple zero")
    })
}

fn try_eval(id: CheckId, s: &Spectrum, gc: &GeometricConstants, index: Option<usize>) -> Option<CheckResult> {
    match evaluate(id, s, gc, index, &CheckContext::default()) {
        Ok(r) => Some(r),
        Err(Error::SpectrumTooShort { .. } | Error::InvalidArgument(_)) => None,
        Err(e) => panic!("{id}: {e}"),
    }
}

/// A margin far enough from zero that rounding cannot flip the verdict.
fn decisive(r: &CheckResult) -> bool {
    r.status != CheckStatus::NotApplicable && r.margin.abs() > 1e-7 * r.lhs.abs().max(r.rhs.abs())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn chain_never_inverts(s in dirichlet_spectrum(), n in 1usize..5) {
        let gc = GeometricConstants::euclidean(n);
        let chain = [CheckId::YangFirst, CheckId::YangSecond, CheckId::HileProtter, CheckId::Ppw];
        for k in 1..s.expanded().len() {
            let results: Vec<_> = chain.iter().map(|&id| try_eval(id, &s, &gc, Some(k))).collect();
            for pair in results.windows(2) {
                if let [Some(strong), Some(weak)] = pair {
                    prop_assert!(
                        !(strong.holds && !weak.holds),
                        "{} holds but {} fails at k={k}", strong.check_id, weak.check_id
                    );
                }
            }
        }
    }

    #[test]
    fn verdicts_are_scale_invariant(s in dirichlet_spectrum(), c in 0.2f64..5.0, n in 1usize..4,
                                    c1 in 0.0f64..10.0, d1 in 0.0f64..3.0) {
        let gc = GeometricConstants::new(n, c1, d1);
        let scaled = s.scaled(c * c).unwrap();
        let gc_scaled = gc.scaled(c);
        let ids = [
            CheckId::YangFirst, CheckId::YangSecond, CheckId::HileProtter, CheckId::Ppw,
            CheckId::LevitinParnovski, CheckId::DriftYang, CheckId::DriftYangShifted,
            CheckId::DriftSum, CheckId::DriftSumShifted,
        ];
        for id in ids {
            for index in 1..s.expanded().len() {
                let (Some(a), Some(b)) = (try_eval(id, &s, &gc, Some(index)), try_eval(id, &scaled, &gc_scaled, Some(index))) else {
                    continue;
                };
                if decisive(&a) && decisive(&b) {
                    prop_assert_eq!(a.holds, b.holds, "{} at {}", id, index);
                }
                if decisive(&a) {
                    prop_assert_eq!(a.margin > 0.0, b.margin > 0.0, "{} margin sign at {}", id, index);
                }
            }
        }
    }

    #[test]
    fn ratio_checks_ignore_scale(s in dirichlet_spectrum(), c in 0.1f64..10.0) {
        let gc = GeometricConstants::euclidean(2);
        let scaled = s.scaled(c).unwrap();
        for id in [CheckId::AshbaughBenguria, CheckId::AshbaughBenguriaRefined] {
            if let (Some(a), Some(b)) = (try_eval(id, &s, &gc, None), try_eval(id, &scaled, &gc, None)) {
                prop_assert!((a.lhs - b.lhs).abs() <= 1e-12 * a.lhs.abs().max(1.0));
            }
        }
    }

    #[test]
    fn larger_constants_only_loosen(s in dirichlet_spectrum(), n in 1usize..4, c1 in 0.0f64..5.0,
                                    d1 in 0.0f64..2.0, extra in 0.0f64..5.0) {
        let tight = GeometricConstants::new(n, c1, d1);
        let loose = GeometricConstants::new(n, c1 + extra, d1 + extra);
        for id in [CheckId::DriftYang, CheckId::DriftYangShifted, CheckId::DriftSum, CheckId::DriftSumShifted] {
            for index in 1..s.expanded().len() {
                if let (Some(a), Some(b)) = (try_eval(id, &s, &tight, Some(index)), try_eval(id, &s, &loose, Some(index))) {
                    prop_assert!(!(a.holds && !b.holds), "{} at {}", id, index);
                }
            }
        }
    }

    #[test]
    fn closed_window_sums_hold_for_weaker_form(s in closed_spectrum(), n in 1usize..4, c1 in 0.0f64..10.0, d1 in 0.0f64..3.0) {
        let gc = GeometricConstants::new(n, c1, d1);
        for j in 0..s.expanded().len() {
            let (Some(a), Some(b)) = (try_eval(CheckId::ClosedSum, &s, &gc, Some(j)), try_eval(CheckId::ClosedSumShifted, &s, &gc, Some(j))) else {
                continue;
            };
            // 4D√Λ ≤ 2Λ + 2D², so the first form implies the second.
            prop_assert!(!(a.holds && !b.holds), "j = {}", j);
        }
    }

    #[test]
    fn truncation_preserves_early_checks(s in dirichlet_spectrum(), keep in 3usize..8) {
        let gc = GeometricConstants::euclidean(2);
        let len = s.expanded().len();
        prop_assume!(keep < len);
        let short = Spectrum::from_expanded(s.expanded()[..keep].to_vec(), IndexBase::DirichletFromOne, "cut").unwrap();
        for k in 1..keep {
            let (Some(a), Some(b)) = (try_eval(CheckId::YangFirst, &s, &gc, Some(k)), try_eval(CheckId::YangFirst, &short, &gc, Some(k))) else {
                continue;
            };
            prop_assert_eq!(a.lhs, b.lhs);
            prop_assert_eq!(a.rhs, b.rhs);
        }
    }

    #[test]
    fn expansion_round_trips(v in prop::collection::vec(prop::sample::select(vec![1.0, 2.5, 4.0, 9.0, 16.0]), 1..20)) {
        let s = Spectrum::from_expanded(v.clone(), IndexBase::DirichletFromOne, "p").unwrap();
        let mut sorted = v;
        sorted.sort_by(f64::total_cmp);
        prop_assert_eq!(s.expanded(), sorted.clone());
        prop_assert_eq!(s.multiplicities().iter().sum::<usize>(), sorted.len());
        let back = Spectrum::from_json(&s.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn distinct_values_are_separated(s in closed_spectrum(), tol in 1e-9f64..1e-2) {
        let gamma = distinct_eigenvalues(&s, tol).unwrap();
        for i in 1..gamma.len() {
            let (a, b) = (gamma.get(i - 1).unwrap(), gamma.get(i).unwrap());
            prop_assert!(b > a);
        }
    }

    #[test]
    fn allowance_is_symmetric_and_nonnegative(lhs in -1e6f64..1e6, rhs in -1e6f64..1e6, est in 0.0f64..1.0) {
        for tol in [Tolerance::analytic(), Tolerance::numerical(est)] {
            let a = tol.allowance(lhs, rhs);
            prop_assert!(a >= 0.0);
            prop_assert_eq!(a, tol.allowance(rhs, lhs));
        }
    }

    #[test]
    fn recursion_constant_stays_below_one(f in 0.5f64..12.0, k in 1usize..500) {
        let c = recursion_coefficient(f, k);
        prop_assert!(c < 1.0 && c > 0.0, "C({f}, {k}) = {c}");
        prop_assert!(recursion_bound(1.0, f, k + 1) >= recursion_bound(1.0, f, k));
    }

    #[test]
    fn box_spectra_satisfy_classical_bounds(a in 0.5f64..3.0, b in 0.5f64..3.0) {
        let s = box_spectrum(&[a, b], &[0.0, 0.0], 15).unwrap();
        let gc = GeometricConstants::euclidean(2);
        for id in [CheckId::YangFirst, CheckId::YangSecond, CheckId::HileProtter, CheckId::Ppw] {
            for k in 1..15 {
                if let Some(r) = try_eval(id, &s, &gc, Some(k)) {
                    prop_assert!(r.satisfied(), "{} at {} on {}x{}", id, k, a, b);
                }
            }
        }
        if let Some(r) = try_eval(CheckId::AshbaughBenguria, &s, &gc, None) {
            prop_assert!(r.satisfied());
        }
    }

    #[test]
    fn interval_forms_are_positive(drift in -3.0f64..3.0, coeffs in prop::collection::vec(-1.0f64..1.0, 11)) {
        let mesh = mesh_interval(2.0, 12).unwrap();
        let system = assemble(&mesh, &DriftField::new(vec![drift]), Boundary::Dirichlet).unwrap();
        let x = nalgebra::DVector::from_vec(coeffs);
        prop_assume!(x.norm() > 1e-3);
        prop_assert!(quadratic_form(&system.stiffness, &x) > 0.0);
        prop_assert!(quadratic_form(&system.mass, &x) > 0.0);
        prop_assert!(trace(&system.mass) > 0.0);
    }
}
