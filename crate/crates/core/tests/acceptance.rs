//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use driftspec::bounds::{
    evaluate, focal_constants, gamma2_probe, recursion_bound, recursion_coefficient, CheckContext, CheckId,
    CheckResult, CheckStatus, Gamma2Position, GeometricConstants,
};
use driftspec::config::Config;
use driftspec::eigensolve::solve_system;
use driftspec::fem::{assemble, mesh_icosphere, mesh_interval, Boundary};
use driftspec::geometry::{verify_extrinsic_identities, Cylinder, DriftField, Immersion, SampleGrid, SphereGraph};
use driftspec::report::Report;
use driftspec::scenario::{bundled, run_scenario, BUNDLED};
use driftspec::spectra::{box_spectrum, clifford_torus_spectrum, sphere_spectrum, IndexBase, Spectrum};

/// `j₀,₁²` and `j₁,₁²` to 16 digits.
const J01_SQ: f64 = 5.783_185_962_946_784;
const J11_SQ: f64 = 14.681_970_642_123_893;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn run_bundled(name: &str) -> Report {
    run_scenario(&bundled(name).expect("bundled scenario parses"), &Config::default()).expect("scenario runs")
}

fn drifted_interval() -> Outcome {
    let start = Instant::now();
    let mesh = mesh_interval(PI, 400).unwrap();
    let system = assemble(&mesh, &DriftField::new(vec![2.0]), Boundary::Dirichlet).unwrap();
    let sol = solve_system(&system, 5, &Config::default().solver, "fem").unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let values = sol.spectrum.expanded();
    let worst = (1..=5)
        .map(|k| rel(values[k - 1], (k * k + 1) as f64))
        .fold(0.0, f64::max);
    outcome(
        worst < 5e-3 && elapsed < 5.0,
        format!("max rel err {worst:.2e} (limit 5e-3), {elapsed:.2}s (limit 5s)"),
    )
}

fn disk_ppw() -> Outcome {
    let start = Instant::now();
    let report = run_bundled("disk_ppw");
    let elapsed = start.elapsed().as_secs_f64();
    let raw = report
        .spectra
        .iter()
        .rev()
        .find(|e| e.resolution.is_some())
        .unwrap()
        .spectrum
        .expanded();
    let extrapolated = report.spectra.last().unwrap().spectrum.expanded();
    let (e1, e2) = (rel(raw[0], J01_SQ), rel(raw[1], J11_SQ));
    let ratio = extrapolated[1] / extrapolated[0];
    let raw_ratio = raw[1] / raw[0];
    let pass = e1 < 1e-2 && e2 < 1e-2 && ratio <= 2.539 && elapsed < 30.0 && report.summary.fails == 0;
    outcome(
        pass,
        format!(
            "Λ₁ err {e1:.2e}, Λ₂ err {e2:.2e} (limit 1e-2); Λ₂/Λ₁ {ratio:.6} extrapolated, {raw_ratio:.6} finest (limit 2.539); {elapsed:.1}s"
        ),
    )
}

fn status_at(results: &[CheckResult], id: &str, index: usize) -> Option<CheckStatus> {
    results
        .iter()
        .find(|r| r.check_id == id && (r.k == Some(index) || r.j == Some(index)))
        .map(|r| r.status)
}

/// Stronger inequality first: holding it must imply holding the next one.
const CHAIN: [(&str, &str); 3] = [("yang1", "yang2"), ("yang2", "hp"), ("hp", "ppw")];

fn chain_inversions(s: &Spectrum, n: usize) -> (usize, usize, usize) {
    let gc = GeometricConstants::euclidean(n);
    let ctx = CheckContext::default();
    let len = s.expanded().len();
    let mut results = Vec::new();
    for id in [
        CheckId::YangFirst,
        CheckId::YangSecond,
        CheckId::HileProtter,
        CheckId::Ppw,
    ] {
        for k in 1..len {
            results.push(evaluate(id, s, &gc, Some(k), &ctx).unwrap());
        }
    }
    let fails = results.iter().filter(|r| r.status == CheckStatus::Fails).count();
    let mut inversions = 0;
    for k in 1..len {
        for (strong, weak) in CHAIN {
            let (a, b) = (status_at(&results, strong, k), status_at(&results, weak, k));
            if a == Some(CheckStatus::Holds) && b == Some(CheckStatus::Fails) {
                inversions += 1;
            }
        }
    }
    (results.len(), fails, inversions)
}

fn classical_chain() -> Outcome {
    let s = box_spectrum(&[1.0, 1.0], &[0.0, 0.0], 20).unwrap();
    let gc = GeometricConstants::euclidean(2);
    let ctx = CheckContext::default();
    let mut evaluated = 0;
    let mut failed = Vec::new();
    let index_checks = [
        CheckId::YangFirst,
        CheckId::YangSecond,
        CheckId::HileProtter,
        CheckId::Ppw,
        CheckId::LevitinParnovski,
    ];
    for id in index_checks {
        for i in 1..20 {
            match evaluate(id, &s, &gc, Some(i), &ctx) {
                Ok(r) => {
                    evaluated += 1;
                    if r.status == CheckStatus::Fails {
                        failed.push(format!("{id}@{i}"));
                    }
                }
                Err(driftspec::Error::SpectrumTooShort { .. }) => break,
                Err(e) => panic!("{id}@{i}: {e}"),
            }
        }
    }
    let ab = evaluate(CheckId::AshbaughBenguria, &s, &gc, None, &ctx).unwrap();
    evaluated += 1;
    if ab.status == CheckStatus::Fails {
        failed.push("ab".into());
    }
    let (_, _, square_inversions) = chain_inversions(&s, 2);
    // Random admissible spectra: the chain order must survive failures too.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut random_inversions = 0;
    let mut random_fails = 0;
    for _ in 0..300 {
        let n = rng.gen_range(1..=4);
        let mut v: Vec<f64> = (0..12).map(|_| rng.gen_range(0.5..50.0)).collect();
        v.sort_by(f64::total_cmp);
        let s = Spectrum::from_expanded(v, IndexBase::DirichletFromOne, "random").unwrap();
        let (_, fails, inv) = chain_inversions(&s, n);
        random_fails += fails;
        random_inversions += inv;
    }
    outcome(
        failed.is_empty() && square_inversions == 0 && random_inversions == 0,
        format!(
            "{evaluated} square checks, failures {failed:?}; inversions: square {square_inversions}, 300 random spectra {random_inversions} (with {random_fails} failures exercised)"
        ),
    )
}

fn sphere_equalities() -> Outcome {
    let s = sphere_spectrum(2, 6).unwrap();
    let gc = GeometricConstants {
        reilly_ratio: Some(4.0),
        ..GeometricConstants::new(2, 4.0, 0.0)
    };
    let ctx = CheckContext::default();
    let reilly = evaluate(CheckId::Reilly, &s, &gc, None, &ctx).unwrap();
    let minimal = evaluate(CheckId::MinimalSphereSum, &s, &gc, Some(0), &ctx).unwrap();
    let exact = |r: &CheckResult| (r.lhs - 4.0).abs() < 1e-12 && (r.rhs - 4.0).abs() < 1e-12 && r.holds;

    let mesh = mesh_icosphere(3).unwrap();
    let system = assemble(&mesh, &DriftField::zero(3), Boundary::Closed).unwrap();
    let fem = solve_system(&system, 4, &Config::default().solver, "fem")
        .unwrap()
        .spectrum;
    let fem_reilly = evaluate(CheckId::Reilly, &fem, &gc, None, &ctx).unwrap();
    let fem_minimal = evaluate(CheckId::MinimalSphereSum, &fem, &gc, Some(0), &ctx).unwrap();
    let (dr, dm) = (
        rel(fem_reilly.lhs, fem_reilly.rhs),
        rel(fem_minimal.lhs, fem_minimal.rhs),
    );
    outcome(
        exact(&reilly) && exact(&minimal) && dr < 1e-2 && dm < 1e-2,
        format!(
            "analytic Reilly {} = {}, j=0 window {} = {}; icosphere L3 {:.6} vs 4 ({dr:.2e}), {:.6} vs 4 ({dm:.2e}) (limit 1e-2)",
            reilly.lhs, reilly.rhs, minimal.lhs, minimal.rhs, fem_reilly.lhs, fem_minimal.lhs
        ),
    )
}

fn isoparametric() -> Outcome {
    let torus = clifford_torus_spectrum(1, 1, 8).unwrap();
    let gc = GeometricConstants {
        n0: Some(4),
        ..GeometricConstants::new(2, 4.0, 0.0)
    };
    let ctx = CheckContext::default();
    let iso = evaluate(CheckId::Isoparametric, &torus, &gc, None, &ctx).unwrap();
    let gt = gamma2_probe(&torus, 2, 1e-6).unwrap();
    let gs = gamma2_probe(&sphere_spectrum(2, 6).unwrap(), 2, 1e-6).unwrap();
    let pass = (iso.lhs - 4.0).abs() < 1e-12
        && iso.rhs == 8.0
        && iso.holds
        && (gt.gamma2 - 4.0).abs() < 1e-12
        && (gs.gamma2 - 6.0).abs() < 1e-12
        && gt.position == Gamma2Position::InWindow
        && gs.position == Gamma2Position::InWindow;
    outcome(
        pass,
        format!(
            "torus mean {} ≤ {}; Γ̄₂ torus {} sphere {} in [{}, {}]",
            iso.lhs, iso.rhs, gt.gamma2, gs.gamma2, gt.window[0], gt.window[1]
        ),
    )
}

fn soliton_inequalities() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    let mut bad = Vec::new();
    let mut tightest = f64::INFINITY;
    for name in ["grim_reaper", "bowl_soliton"] {
        let report = run_bundled(name);
        let values = report.final_spectrum().unwrap().expanded();
        if values.len() < 8 {
            bad.push(format!("{name}: only {} values", values.len()));
        }
        for r in &report.checks {
            let index = r.k.or(r.j).unwrap_or(0);
            if index > 6 || !r.check_id.starts_with("thm5.") {
                continue;
            }
            count += 1;
            let est = r.error_estimate.unwrap_or(f64::INFINITY);
            tightest = tightest.min(r.margin / (3.0 * est));
            if r.status != CheckStatus::Holds || r.margin <= 3.0 * est {
                bad.push(format!("{name} {}@{index}", r.check_id));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    outcome(
        bad.is_empty() && count == 48 && elapsed < 120.0,
        format!(
            "{count} checks (expect 48), smallest margin/(3·estimate) {tightest:.3e}, failures {bad:?}, {elapsed:.1}s"
        ),
    )
}

fn recursion_machinery() -> Outcome {
    let s = box_spectrum(&[1.0, 1.0], &[0.0, 0.0], 12).unwrap();
    let gc = GeometricConstants::euclidean(2);
    let ctx = CheckContext {
        recursion_exponent: Some(2.0),
        ..CheckContext::default()
    };
    let l1 = s.expanded()[0];
    let mut ok = true;
    let mut worst_c: f64 = 0.0;
    for k in 1..=8 {
        let step = evaluate(CheckId::RecursionStep, &s, &gc, Some(k), &ctx).unwrap();
        let bound = evaluate(CheckId::RecursionBound, &s, &gc, Some(k), &ctx).unwrap();
        let c = recursion_coefficient(2.0, k);
        worst_c = worst_c.max(c);
        let dominates = s.expanded()[k] <= recursion_bound(l1, 2.0, k);
        ok &= step.status == CheckStatus::Holds && bound.status == CheckStatus::Holds && c < 1.0 && dominates;
    }
    outcome(
        ok,
        format!("k = 1..8: recursion and bound hold, max C(2,k) = {worst_c:.9}"),
    )
}

fn identity_suite() -> Outcome {
    let report = run_bundled("identities");
    let worst = report.identities.iter().map(|i| i.max_residual).fold(0.0, f64::max);
    let patches_ok = report.identities.len() == 3 && report.identities.iter().all(|i| i.holds) && worst < 1e-6;

    let cyl = Cylinder::new(0.7, 1.0).unwrap();
    let grid = SampleGrid::uniform(cyl.domain(), 3).unwrap();
    let nu = DriftField::new(vec![1.0, 0.0, 0.5]);
    let u = |x: &nalgebra::DVector<f64>| (x[0] + 0.3 * x[1]).sin() + x[2] * x[0];
    let w = |x: &nalgebra::DVector<f64>| (0.5 * x[1]).exp() - x[0] * x[0];
    let at = |h: f64| {
        verify_extrinsic_identities(&cyl, &nu, &u, &w, &grid, h)
            .unwrap()
            .laplacian_square
    };
    let (a, b, c) = (at(0.04), at(0.02), at(0.01));
    let orders = [(a / b).log2(), (b / c).log2()];
    let order_ok = orders.iter().all(|p| (1.8..=2.2).contains(p));

    let sphere = SphereGraph::new(0.6).unwrap();
    let samples = SampleGrid::random(sphere.domain(), 10_000, 17);
    let drift = DriftField::new(vec![0.3, -1.2, 0.8]);
    let r = verify_extrinsic_identities(&sphere, &drift, &u, &w, &samples, 2e-5).unwrap();
    outcome(
        patches_ok && order_ok && r.inequalities_hold(),
        format!(
            "max residual {worst:.2e} (limit 1e-6); observed orders {:.3}, {:.3}; Cauchy–Schwarz min margin {:.3e} over {} samples",
            orders[0], orders[1], r.min_drift_gradient_margin, r.points
        ),
    )
}

fn focal_numbers() -> Outcome {
    let s5 = focal_constants(1, 1).unwrap();
    let s15 = focal_constants(4, 3).unwrap();
    let stated = |m1: usize, m2: usize| {
        let f = focal_constants(m1, m2).unwrap();
        let n = 2 * (m1 + m2);
        f.stated_mean_bound == (2 * (n + m2 + 2)) as f64 && f.hypersurface_dim == n
    };
    let pass = s5.derived_sum_bound == 30.0
        && s5.gamma2_bound == 10.0
        && s15.derived_sum_bound == 240.0
        && s15.gamma2_bound == 24.0
        && [(1, 1), (4, 3), (2, 1), (1, 2), (3, 4)]
            .iter()
            .all(|&(a, b)| stated(a, b));
    outcome(
        pass,
        format!(
            "(1,1): {} and {}; (4,3): {} and {}; stated mean bound (1,1) {} (4,3) {}",
            s5.derived_sum_bound,
            s5.gamma2_bound,
            s15.derived_sum_bound,
            s15.gamma2_bound,
            s5.stated_mean_bound,
            s15.stated_mean_bound
        ),
    )
}

fn determinism() -> Outcome {
    let mut differing = Vec::new();
    for (name, _) in BUNDLED {
        let a = run_bundled(name).to_json().unwrap();
        let b = run_bundled(name).to_json().unwrap();
        if a != b {
            differing.push(*name);
        }
    }
    outcome(
        differing.is_empty(),
        format!(
            "{} bundled scenarios run twice, differing: {differing:?}",
            BUNDLED.len()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("drifted interval oracle", drifted_interval),
        ("disk PPW data", disk_ppw),
        ("classical chain", classical_chain),
        ("sphere closed-problem equalities", sphere_equalities),
        ("isoparametric bound and second gap", isoparametric),
        ("soliton universal inequalities", soliton_inequalities),
        ("recursion machinery", recursion_machinery),
        ("geometric identity suite", identity_suite),
        ("focal constants", focal_numbers),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failures += 1;
        }
        println!(
            "{} [{}] {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
    }
    println!("{} of {} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
