use nalgebra::DVector;

use super::{CheckSpec, FemSpec, MeshSpec, Scenario, SpectrumSpec};
use crate::bounds::{
    evaluate, focal_constants, gamma2_probe, CheckContext, CheckResult, CheckStatus, GeometricConstants, IndexKind,
    Tolerance,
};
use crate::config::Config;
use crate::eigensolve::{solve_system, EigenSolution};
use crate::error::{Error, Result};
use crate::fem::{assemble, cell_curvature_terms, eigen_moments, weighted_mean, Boundary, Mesh};
use crate::geometry::{extrinsic_constants, verify_extrinsic_identities, DriftField, Immersion, SampleGrid};
use crate::report::{
    config_hash, ConvergenceRow, ConvergenceSection, FocalEntry, Gamma2Entry, IdentityEntry, Report, SpectrumEntry,
    Summary, FOOTER,
};
use crate::spectra::Spectrum;

/// Output of the spectrum stage.
struct Discrete {
    entries: Vec<SpectrumEntry>,
    convergence: ConvergenceSection,
    constants: GeometricConstants,
    /// Largest relative eigenvalue error estimate at the finest level.
    relative_error: f64,
}

/// Run every stage of a scenario and assemble the report.
pub fn run_scenario(scenario: &Scenario, config: &Config) -> Result<Report> {
    scenario.validate()?;
    config.validate()?;
    let mut constants = scenario
        .constants
        .clone()
        .unwrap_or_else(|| GeometricConstants::euclidean(scenario.default_dim()));

    let (entries, convergence, relative_error) = match &scenario.spectrum {
        None => (Vec::new(), None, None),
        Some(SpectrumSpec::Analytic { count, family }) => {
            let s = family.spectrum(*count).map_err(|e| e.at_stage("spectrum"))?;
            (vec![plain_entry(s)], None, None)
        }
        Some(SpectrumSpec::Fem(fem)) => {
            let d = run_fem(fem, constants, config)?;
            constants = d.constants;
            (d.entries, Some(d.convergence), Some(d.relative_error))
        }
    };
    let spectrum = entries.last().map(|e| &e.spectrum);

    let cluster_tolerance = if relative_error.is_some() {
        config.checks.fem_cluster_tolerance
    } else {
        config.checks.cluster_tolerance
    };
    let ctx = CheckContext {
        tolerance: Tolerance {
            relative: config.checks.relative_tolerance,
            absolute: 0.0,
        },
        cluster_tolerance,
        recursion_exponent: scenario.recursion_exponent,
    };
    let mut checks = Vec::new();
    for spec in &scenario.checks {
        let spectrum = spectrum.expect("validated: checks have a spectrum");
        let results = run_check(spec, spectrum, &constants, &ctx).map_err(|e| e.at_stage("checks"))?;
        checks.extend(results);
    }
    if let Some(eps) = relative_error {
        checks = checks
            .into_iter()
            .map(|c| widen(c, eps, ctx.tolerance.relative))
            .collect();
    }

    let gamma2 = if scenario.gamma2 {
        let spectrum = spectrum.expect("validated: the probe has a spectrum");
        let r = gamma2_probe(spectrum, constants.n, cluster_tolerance).map_err(|e| e.at_stage("checks"))?;
        Some(Gamma2Entry::new(&r))
    } else {
        None
    };
    let focal = scenario
        .focal
        .iter()
        .map(|f| focal_constants(f.m1, f.m2).map(FocalEntry::from))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at_stage("focal"))?;
    let identities = scenario
        .identities
        .iter()
        .map(|i| run_identity(i, config.solver.seed))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| e.at_stage("identities"))?;

    let summary = Summary::tally(&checks, &identities);
    let constants_used =
        serde_json::to_value(constants_without_moments(&constants)).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(Report {
        toolkit: "driftspec".into(),
        version: crate::VERSION.into(),
        config_hash: config_hash(config, scenario)?,
        scenario: scenario.clone(),
        spectra: entries,
        convergence,
        constants_used,
        checks,
        focal,
        gamma2,
        identities,
        summary,
        footer: FOOTER.into(),
    })
}

fn constants_without_moments(gc: &GeometricConstants) -> GeometricConstants {
    GeometricConstants {
        moments: None,
        ..gc.clone()
    }
}

fn plain_entry(spectrum: Spectrum) -> SpectrumEntry {
    SpectrumEntry {
        resolution: None,
        h: None,
        dofs: None,
        method: None,
        iterations: None,
        max_residual: None,
        spectrum,
    }
}

/// Evaluate one battery entry over its index range.
fn run_check(spec: &CheckSpec, s: &Spectrum, gc: &GeometricConstants, ctx: &CheckContext) -> Result<Vec<CheckResult>> {
    let kind = spec.id.index_kind();
    if kind == IndexKind::None {
        return Ok(vec![evaluate(spec.id, s, gc, None, ctx)?]);
    }
    if let Some([a, b]) = spec.k.or(spec.j) {
        return (a..=b).map(|i| evaluate(spec.id, s, gc, Some(i), ctx)).collect();
    }
    // Every admissible index: skip indices the check rejects, stop once the
    // spectrum runs out.
    let mut out = Vec::new();
    for i in 0..=s.expanded().len() {
        match evaluate(spec.id, s, gc, Some(i), ctx) {
            Ok(r) => out.push(r),
            Err(Error::InvalidArgument(_)) => continue,
            Err(Error::SpectrumTooShort { .. }) if !out.is_empty() => break,
            Err(Error::SpectrumTooShort { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    if out.is_empty() {
        return Err(Error::SpectrumTooShort {
            check: spec.id.to_string(),
            needed: s.expanded().len() + 1,
            available: s.expanded().len(),
        });
    }
    Ok(out)
}

/// Rejudge a discrete check with three times its error estimate as slack.
///
/// The compared quantities are at most quadratic in the eigenvalues, so a
/// relative eigenvalue error `ε` moves each side by at most about `2ε`.
fn widen(c: CheckResult, relative_error: f64, relative: f64) -> CheckResult {
    if c.status == CheckStatus::NotApplicable {
        return c;
    }
    let estimate = 2.0 * relative_error * c.lhs.abs().max(c.rhs.abs());
    let mut c = c.rejudged(&Tolerance {
        relative,
        absolute: 3.0 * estimate,
    });
    c.error_estimate = Some(estimate);
    c
}

fn drift_for(fem: &FemSpec, mesh: &Mesh) -> Result<DriftField> {
    if fem.drift.is_empty() {
        Ok(DriftField::zero(mesh.ambient_dim()))
    } else {
        let nu = DriftField::new(fem.drift.clone());
        nu.check_dim(mesh.ambient_dim())?;
        Ok(nu)
    }
}

fn solve_level(fem: &FemSpec, mesh: &Mesh, nu: &DriftField, config: &Config) -> Result<EigenSolution> {
    let system = assemble(mesh, nu, fem.boundary).map_err(|e| e.at_stage("assemble"))?;
    solve_system(&system, fem.count, &config.solver, "fem").map_err(|e| e.at_stage("solve"))
}

fn run_fem(fem: &FemSpec, mut constants: GeometricConstants, config: &Config) -> Result<Discrete> {
    let immersion = fem.mesh.immersion().map_err(|e| e.at_stage("geometry"))?;
    let im = immersion.as_deref();
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    let mut finest = None;
    let oracle = match &fem.oracle {
        Some(f) => {
            let s = f.spectrum(fem.count).map_err(|e| e.at_stage("spectrum"))?;
            Some(s.expanded())
        }
        None => None,
    };
    if fem.resolutions.len() < 2 {
        return Err(Error::Config(
            "a discrete spectrum needs at least two resolutions".into(),
        ));
    }
    for &level in &fem.resolutions {
        let mesh = fem.mesh.build(level, im).map_err(|e| e.at_stage("mesh"))?;
        let nu = drift_for(fem, &mesh).map_err(|e| e.at_stage("mesh"))?;
        let sol = solve_level(fem, &mesh, &nu, config)?;
        let values = sol.spectrum.expanded();
        let h = mesh.max_edge_length();
        let errors = oracle.as_ref().map(|exact| {
            values
                .iter()
                .zip(exact)
                .map(|(v, e)| {
                    if *e == 0.0 {
                        (v - e).abs()
                    } else {
                        (v - e).abs() / e.abs()
                    }
                })
                .collect()
        });
        rows.push(ConvergenceRow {
            resolution: level,
            h,
            values: values.clone(),
            errors,
        });
        entries.push(SpectrumEntry {
            resolution: Some(level),
            h: Some(h),
            dofs: Some(sol.vectors.nrows()),
            method: Some(sol.method),
            iterations: Some(sol.iterations),
            max_residual: Some(sol.residual_norms.iter().copied().fold(0.0, f64::max)),
            spectrum: sol.spectrum.clone(),
        });
        finest = Some((mesh, nu, sol));
    }
    let (mesh, nu, sol) = finest.expect("at least one level");

    let error_estimates = richardson(&rows);
    if fem.extrapolate {
        entries.push(plain_entry(extrapolated(&rows, &sol.spectrum)?));
    }
    let relative_error = error_estimates.iter().copied().fold(0.0, f64::max);
    let observed_orders = oracle.as_ref().map(|_| observed_orders(&rows, fem.boundary));

    if fem.derive_constants {
        derive_constants(fem, &mesh, &nu, im, &mut constants).map_err(|e| e.at_stage("geometry"))?;
    }
    if fem.moments {
        let terms = curvature_terms(&fem.mesh, &mesh, im).map_err(|e| e.at_stage("geometry"))?;
        let system = assemble(&mesh, &nu, fem.boundary).map_err(|e| e.at_stage("assemble"))?;
        let moments = eigen_moments(&mesh, &nu, &system, &sol.vectors, &terms).map_err(|e| e.at_stage("moments"))?;
        constants.moments = Some(moments);
    }
    Ok(Discrete {
        entries,
        convergence: ConvergenceSection {
            rows,
            observed_orders,
            error_estimates,
        },
        constants,
        relative_error,
    })
}

/// Relative error of each finest-level value from the last two levels,
/// assuming second-order convergence in `h`.
fn richardson(rows: &[ConvergenceRow]) -> Vec<f64> {
    let (prev, last) = (&rows[rows.len() - 2], &rows[rows.len() - 1]);
    let ratio = (prev.h / last.h).powi(2);
    last.values
        .iter()
        .zip(&prev.values)
        .map(|(f, c)| {
            if *f == 0.0 {
                0.0
            } else {
                (f - c).abs() / (ratio - 1.0).max(1e-12) / f.abs()
            }
        })
        .collect()
}

/// `Λ_h + (Λ_h − Λ_H)/((H/h)² − 1)`, re-sorted.
fn extrapolated(rows: &[ConvergenceRow], finest: &Spectrum) -> Result<Spectrum> {
    let (prev, last) = (&rows[rows.len() - 2], &rows[rows.len() - 1]);
    let ratio = (prev.h / last.h).powi(2);
    let mut values: Vec<f64> = last
        .values
        .iter()
        .zip(&prev.values)
        .map(|(f, c)| if *f == 0.0 { 0.0 } else { f + (f - c) / (ratio - 1.0) })
        .collect();
    values.sort_by(f64::total_cmp);
    Spectrum::from_expanded(values, finest.index_base(), "fem-richardson")
}

fn observed_orders(rows: &[ConvergenceRow], boundary: Boundary) -> Vec<f64> {
    let count = rows[0].values.len();
    (0..count)
        .map(|i| {
            if boundary == Boundary::Closed && i == 0 {
                return f64::NAN;
            }
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter_map(|r| {
                    let e = r.errors.as_ref()?[i];
                    (e > 0.0).then(|| (r.h.ln(), e.ln()))
                })
                .collect();
            if pts.len() < 2 {
                return f64::NAN;
            }
            let n = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            sxy / sxx
        })
        .map(|v: f64| if v.is_finite() { v } else { 0.0 })
        .collect()
}

fn curvature_terms(spec: &MeshSpec, mesh: &Mesh, im: Option<&dyn Immersion>) -> Result<Vec<f64>> {
    match (spec.constant_curvature_term(), im) {
        (Some(c), _) => Ok(vec![c; mesh.cells().len()]),
        (None, Some(im)) => cell_curvature_terms(mesh, im),
        (None, None) => Err(Error::Config("mean curvature is unknown for this mesh".into())),
    }
}

/// Measure `c1 = max n²H²`, `d1 = max |ν^⊤|` and, on closed meshes, the
/// weighted mean of `n²H² + 3|ν^⊤|²`.
fn derive_constants(
    fem: &FemSpec,
    mesh: &Mesh,
    nu: &DriftField,
    im: Option<&dyn Immersion>,
    gc: &mut GeometricConstants,
) -> Result<()> {
    match im {
        Some(im) => {
            let grid = SampleGrid::uniform(im.domain(), 41)?;
            let measured = extrinsic_constants(im, nu, &grid)?;
            gc.c1 = measured.c1;
            gc.d1 = measured.d1;
        }
        None => {
            let c = fem.mesh.constant_curvature_term().unwrap_or(0.0);
            gc.c1 = c;
            // The tangential part never exceeds the full drift.
            gc.d1 = match fem.mesh {
                MeshSpec::Interval { .. } | MeshSpec::UnitSquare | MeshSpec::Disk { .. } => nu.norm(),
                _ => crate::fem::cell_tangential_drift(mesh, nu)?
                    .into_iter()
                    .fold(0.0, f64::max)
                    .max(nu.norm()),
            };
        }
    }
    if fem.boundary == Boundary::Closed {
        let curvature = curvature_terms(&fem.mesh, mesh, im)?;
        let tangential = crate::fem::cell_tangential_drift(mesh, nu)?;
        let factors: Vec<f64> = curvature
            .iter()
            .zip(&tangential)
            .map(|(c, t)| c + 3.0 * t * t)
            .collect();
        gc.reilly_ratio = Some(weighted_mean(mesh, nu, &factors)?);
    }
    Ok(())
}

fn identity_u(x: &DVector<f64>) -> f64 {
    (x[0] + 0.3 * x[1]).sin() + x[x.len() - 1] * x[0]
}

fn identity_w(x: &DVector<f64>) -> f64 {
    (0.5 * x[1]).exp() - x[0] * x[0]
}

fn run_identity(spec: &super::IdentitySpec, seed: u64) -> Result<IdentityEntry> {
    let im = spec.immersion.build()?;
    let nu = if spec.drift.is_empty() {
        DriftField::zero(im.ambient_dim())
    } else {
        DriftField::new(spec.drift.clone())
    };
    let mut points = if spec.per_axis > 0 {
        SampleGrid::uniform(im.domain(), spec.per_axis)?.points
    } else {
        Vec::new()
    };
    if spec.random_points > 0 {
        points.extend(SampleGrid::random(im.domain(), spec.random_points, seed).points);
    }
    let grid = SampleGrid { points };
    let detail = verify_extrinsic_identities(im.as_ref(), &nu, &identity_u, &identity_w, &grid, spec.step)?;
    let max_residual = detail.max_residual();
    let inequalities_hold = detail.inequalities_hold();
    Ok(IdentityEntry {
        immersion: im.name(),
        max_residual,
        threshold: spec.threshold,
        inequalities_hold,
        holds: inequalities_hold && max_residual < spec.threshold,
        detail,
    })
}
