//! Bounds for the drift Laplacian on immersed domains, in closed form and
//! with eigenfunction moments, plus their submanifold specializations.

use super::{
    provenance, window_sum, yang_sums, CheckId, CheckResult, EigenMoments, Expanded, GeometricConstants, Index,
    Tolerance,
};
use crate::error::{invalid, Error, Result};
use crate::spectra::{IndexBase, Spectrum};

/// Interpretation attached to every window sum.
pub(crate) const SAME_INDEX_NOTE: &str = "eigenvalues on the right side taken at index j";

fn first_k(seq: &Expanded, id: CheckId, k: usize) -> Result<()> {
    if k < seq.first() {
        return Err(invalid(format!("{id}: k must be at least {}", seq.first())));
    }
    seq.require(k + 1, id)
}

fn first_j(seq: &Expanded, id: CheckId, j: usize, n: usize) -> Result<()> {
    if j < seq.first() {
        return Err(invalid(format!("{id}: j must be at least {}", seq.first())));
    }
    seq.require(j + n, id)
}

/// Yang-type pair: `Σ(Λ_{k+1}−Λ_i)² ≤ (4/n)Σ(Λ_{k+1}−Λ_i)(Λ_i + D√Λ_i + D²/4 + C/4)`
/// and the `(6/n)(Λ_i + D²/2 + C/6)` variant.
fn yang_pair(
    seq: &Expanded,
    ids: (CheckId, CheckId),
    n: usize,
    c: f64,
    d: f64,
    k: usize,
    tol: &Tolerance,
    prov: String,
) -> Result<(CheckResult, CheckResult)> {
    first_k(seq, ids.0, k)?;
    let nf = n as f64;
    let (sq, wa) = yang_sums(seq, k, |_, v| v + d * v.sqrt() + d * d / 4.0 + c / 4.0);
    let (_, wb) = yang_sums(seq, k, |_, v| v + d * d / 2.0 + c / 6.0);
    Ok((
        CheckResult::evaluated(ids.0, Index::K(k), sq, 4.0 / nf * wa, tol, prov.clone()),
        CheckResult::evaluated(ids.1, Index::K(k), sq, 6.0 / nf * wb, tol, prov),
    ))
}

/// Window-sum pair: `Σ_{l=1}^{n} Λ_{j+l} ≤ (n+4)Λ_j + 4D√Λ_j + D² + C` and
/// `≤ (n+6)Λ_j + 3D² + C`.
fn sum_pair(
    seq: &Expanded,
    ids: (CheckId, CheckId),
    n: usize,
    c: f64,
    d: f64,
    j: usize,
    tol: &Tolerance,
    prov: String,
) -> Result<(CheckResult, CheckResult)> {
    first_j(seq, ids.0, j, n)?;
    let nf = n as f64;
    let lj = seq.at(j);
    let lhs = window_sum(seq, j, n);
    Ok((
        CheckResult::evaluated(
            ids.0,
            Index::J(j),
            lhs,
            (nf + 4.0) * lj + 4.0 * d * lj.sqrt() + d * d + c,
            tol,
            prov.clone(),
        )
        .with_note(SAME_INDEX_NOTE),
        CheckResult::evaluated(ids.1, Index::J(j), lhs, (nf + 6.0) * lj + 3.0 * d * d + c, tol, prov)
            .with_note(SAME_INDEX_NOTE),
    ))
}

/// The drift Yang-type pair on a Dirichlet spectrum.
pub fn check_yang_xin(
    s: &Spectrum,
    gc: &GeometricConstants,
    k: usize,
    tol: &Tolerance,
) -> Result<(CheckResult, CheckResult)> {
    let seq = Expanded::new(s);
    seq.require_base(IndexBase::DirichletFromOne, CheckId::DriftYang)?;
    let prov = provenance(&seq, Some(gc), "");
    yang_pair(
        &seq,
        (CheckId::DriftYang, CheckId::DriftYangShifted),
        gc.n,
        gc.c1,
        gc.d1,
        k,
        tol,
        prov,
    )
}

/// The drift window-sum pair on a Dirichlet spectrum; the `i` of the
/// statement is taken equal to `j`.
pub fn check_ppw_type_xin(
    s: &Spectrum,
    gc: &GeometricConstants,
    j: usize,
    tol: &Tolerance,
) -> Result<(CheckResult, CheckResult)> {
    let seq = Expanded::new(s);
    seq.require_base(IndexBase::DirichletFromOne, CheckId::DriftSum)?;
    let prov = provenance(&seq, Some(gc), "");
    sum_pair(
        &seq,
        (CheckId::DriftSum, CheckId::DriftSumShifted),
        gc.n,
        gc.c1,
        gc.d1,
        j,
        tol,
        prov,
    )
}

/// Variants whose constants are weighted integrals of eigenfunctions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentForm {
    Yang,
    YangShifted,
    Sum,
    SumShifted,
    ClosedSum,
    ClosedSumShifted,
    ClosedYang,
    ClosedYangShifted,
}

impl MomentForm {
    pub fn id(self) -> CheckId {
        match self {
            MomentForm::Yang => CheckId::MomentYang,
            MomentForm::YangShifted => CheckId::MomentYangShifted,
            MomentForm::Sum => CheckId::MomentSum,
            MomentForm::SumShifted => CheckId::MomentSumShifted,
            MomentForm::ClosedSum => CheckId::ClosedMomentSum,
            MomentForm::ClosedSumShifted => CheckId::ClosedMomentSumShifted,
            MomentForm::ClosedYang => CheckId::ClosedMomentYang,
            MomentForm::ClosedYangShifted => CheckId::ClosedMomentYangShifted,
        }
    }

    pub fn from_id(id: CheckId) -> Option<Self> {
        [
            MomentForm::Yang,
            MomentForm::YangShifted,
            MomentForm::Sum,
            MomentForm::SumShifted,
            MomentForm::ClosedSum,
            MomentForm::ClosedSumShifted,
            MomentForm::ClosedYang,
            MomentForm::ClosedYangShifted,
        ]
        .into_iter()
        .find(|f| f.id() == id)
    }

    fn base(self) -> IndexBase {
        match self {
            MomentForm::Yang | MomentForm::YangShifted | MomentForm::Sum | MomentForm::SumShifted => {
                IndexBase::DirichletFromOne
            }
            _ => IndexBase::ClosedFromZero,
        }
    }
}

/// Evaluate an integral-form bound at index `k` (Yang forms) or `j` (sums).
pub fn check_moment_forms(
    s: &Spectrum,
    gc: &GeometricConstants,
    index: usize,
    form: MomentForm,
    tol: &Tolerance,
) -> Result<CheckResult> {
    let id = form.id();
    let seq = Expanded::new(s);
    seq.require_base(form.base(), id)?;
    let moments = gc.moments.as_deref().ok_or_else(|| Error::MissingConstant {
        field: "moments",
        check: id.to_string(),
    })?;
    let moment = |i: usize| -> Result<EigenMoments> {
        moments
            .get(i - seq.first())
            .copied()
            .ok_or_else(|| Error::MissingConstant {
                field: "moments",
                check: format!("{id} at index {i}"),
            })
    };
    let nf = gc.n as f64;
    let prov = provenance(&seq, Some(gc), "eigenfunction moments supplied");
    match form {
        MomentForm::Yang | MomentForm::YangShifted | MomentForm::ClosedYang | MomentForm::ClosedYangShifted => {
            let k = index;
            first_k(&seq, id, k)?;
            let ms: Vec<EigenMoments> = (seq.first()..=k).map(moment).collect::<Result<_>>()?;
            let shifted = matches!(form, MomentForm::YangShifted | MomentForm::ClosedYangShifted);
            let (sq, w) = yang_sums(&seq, k, |i, v| {
                let m = ms[i - seq.first()];
                if shifted {
                    v + (m.curvature + 3.0 * m.drift_sq) / 6.0
                } else {
                    v + (m.curvature + m.drift_sq + 4.0 * v.sqrt() * m.drift) / 4.0
                }
            });
            let factor = if shifted { 6.0 } else { 4.0 } / nf;
            Ok(CheckResult::evaluated(id, Index::K(k), sq, factor * w, tol, prov))
        }
        _ => {
            let j = index;
            first_j(&seq, id, j, gc.n)?;
            let m = moment(j)?;
            let lj = seq.at(j);
            let lhs = window_sum(&seq, j, gc.n);
            let rhs = match form {
                MomentForm::Sum | MomentForm::ClosedSum => {
                    (nf + 4.0) * lj + m.curvature + m.drift_sq + 4.0 * lj.sqrt() * m.drift
                }
                _ => (nf + 6.0) * lj + m.curvature + 3.0 * m.drift_sq,
            };
            Ok(CheckResult::evaluated(id, Index::J(j), lhs, rhs, tol, prov))
        }
    }
}

/// Specializations to particular ambient geometries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Submanifold {
    /// Minimal in Euclidean space; Yang form.
    MinimalYang,
    /// Minimal in Euclidean space; difference window sum.
    MinimalSum,
    SphereYang,
    SphereSum,
    UnitSphereYang,
    UnitSphereSum,
    ProjectiveYang,
    ProjectiveSum,
    /// A function with unit gradient and bounded Laplacian.
    UnitGradient,
    /// An eigenmap into a unit sphere.
    Eigenmap,
}

impl Submanifold {
    pub fn id(self) -> CheckId {
        match self {
            Submanifold::MinimalYang => CheckId::MinimalYang,
            Submanifold::MinimalSum => CheckId::MinimalSum,
            Submanifold::SphereYang => CheckId::SphereYang,
            Submanifold::SphereSum => CheckId::SphereSum,
            Submanifold::UnitSphereYang => CheckId::UnitSphereYang,
            Submanifold::UnitSphereSum => CheckId::UnitSphereSum,
            Submanifold::ProjectiveYang => CheckId::ProjectiveYang,
            Submanifold::ProjectiveSum => CheckId::ProjectiveSum,
            Submanifold::UnitGradient => CheckId::UnitGradient,
            Submanifold::Eigenmap => CheckId::Eigenmap,
        }
    }

    pub fn from_id(id: CheckId) -> Option<Self> {
        [
            Submanifold::MinimalYang,
            Submanifold::MinimalSum,
            Submanifold::SphereYang,
            Submanifold::SphereSum,
            Submanifold::UnitSphereYang,
            Submanifold::UnitSphereSum,
            Submanifold::ProjectiveYang,
            Submanifold::ProjectiveSum,
            Submanifold::UnitGradient,
            Submanifold::Eigenmap,
        ]
        .into_iter()
        .find(|s| s.id() == id)
    }
}

/// Evaluate a submanifold specialization at `k` (Yang forms) or `j` (sums).
///
/// The drift constant is always `max|ν^⊤|` taken from `gc.d1`.
pub fn check_submanifold_corollaries(
    s: &Spectrum,
    gc: &GeometricConstants,
    index: usize,
    which: Submanifold,
    tol: &Tolerance,
) -> Result<CheckResult> {
    let id = which.id();
    let seq = Expanded::new(s);
    seq.require_base(IndexBase::DirichletFromOne, id)?;
    let n = gc.n;
    let nf = n as f64;
    let d = gc.d1;
    let curvature = match which {
        Submanifold::MinimalYang | Submanifold::MinimalSum => 0.0,
        Submanifold::SphereYang | Submanifold::SphereSum => {
            let h = gc.require(gc.sphere_mean_curvature_sq, "sphere_mean_curvature_sq", id)?;
            nf * nf * (h + 1.0)
        }
        Submanifold::UnitSphereYang | Submanifold::UnitSphereSum => nf * nf,
        Submanifold::ProjectiveYang | Submanifold::ProjectiveSum => {
            let h = gc.require(gc.projective_mean_curvature_sq, "projective_mean_curvature_sq", id)?;
            let df = gc.require(gc.d_f, "d_f", id)? as f64;
            nf * nf * h + 2.0 * nf * (nf + df)
        }
        Submanifold::UnitGradient | Submanifold::Eigenmap => 0.0,
    };
    let prov = provenance(&seq, Some(gc), &format!("curvature constant {curvature:.6e}"));
    match which {
        Submanifold::MinimalYang
        | Submanifold::SphereYang
        | Submanifold::UnitSphereYang
        | Submanifold::ProjectiveYang => {
            let (yang, _) = yang_pair(&seq, (id, id), n, curvature, d, index, tol, prov)?;
            Ok(yang)
        }
        Submanifold::MinimalSum | Submanifold::SphereSum | Submanifold::UnitSphereSum | Submanifold::ProjectiveSum => {
            let j = index;
            first_j(&seq, id, j, n)?;
            let lj = seq.at(j);
            let lhs: f64 = (1..=n).map(|l| seq.at(j + l) - lj).sum();
            let rhs = 4.0 * lj + 4.0 * d * lj.sqrt() + d * d + curvature;
            Ok(CheckResult::evaluated(id, Index::J(j), lhs, rhs, tol, prov))
        }
        Submanifold::UnitGradient => {
            let k = index;
            first_k(&seq, id, k)?;
            let e = gc.require(gc.c3, "c3", id)? + d;
            let (sq, w) = yang_sums(&seq, k, |_, v| 4.0 * v + 4.0 * e * v.sqrt() + e * e);
            Ok(CheckResult::evaluated(id, Index::K(k), sq, w, tol, prov))
        }
        Submanifold::Eigenmap => {
            let k = index;
            first_k(&seq, id, k)?;
            let eta = gc.require(gc.eta, "eta", id)?;
            let (sq, w) = yang_sums(&seq, k, |_, v| 4.0 * v + 4.0 * d * v.sqrt() + d * d + eta);
            Ok(CheckResult::evaluated(id, Index::K(k), sq, w, tol, prov))
        }
    }
}
