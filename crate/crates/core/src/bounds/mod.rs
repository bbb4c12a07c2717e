//! Eigenvalue inequalities as computable predicates.
//!
//! Every inequality is stored in the orientation `lhs ≤ rhs`; the margin is
//! `rhs − lhs` and the check holds when the margin is at least `−allowance`.
//! Sums over eigenvalues always count multiplicity.

mod catalog;
mod classical;
mod closed;
mod drift;
mod soliton;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::{IndexBase, Spectrum, ANALYTIC_CLUSTER_TOL};

pub use catalog::{catalog, CheckId, CheckInfo, IndexKind};
pub use classical::{ball_ratio, check_classical, Classical};
pub use closed::{
    check_closed, focal_constants, gamma2_probe, ClosedBound, FocalConstants, Gamma2Position, Gamma2Report,
};
pub use drift::{
    check_moment_forms, check_ppw_type_xin, check_submanifold_corollaries, check_yang_xin, MomentForm, Submanifold,
};
pub use soliton::{
    check_growth, check_recursion_bound, check_soliton, gap_bounds, recursion_bound, recursion_coefficient,
    recursion_invariant, SolitonForm,
};

/// Per-eigenfunction weighted integrals `∫u²n²H²e^w`, `∫u²|ν^⊤|²e^w`, `∫u²|ν^⊤|e^w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenMoments {
    pub curvature: f64,
    pub drift_sq: f64,
    pub drift: f64,
}

/// Geometric inputs of the inequalities.
///
/// `c1` and `d1` are maxima for the supplied immersion; an immersion realizing
/// the infimum over all isometric immersions is never known, and any single
/// immersion yields a valid, possibly weaker, bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GeometricConstants {
    /// Intrinsic dimension.
    pub n: usize,
    /// `max n²H²`.
    #[serde(default)]
    pub c1: f64,
    /// `max |ν^⊤|`.
    #[serde(default)]
    pub d1: f64,
    /// Real dimension of the projective field (1, 2 or 4).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_f: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m2: Option<usize>,
    /// Eigenvalue of an eigenmap into a unit sphere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Bound on `|ΔW|` for a function with `|∇W| = 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c3: Option<f64>,
    /// Multiplicity of the first nonzero closed eigenvalue.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n0: Option<usize>,
    /// `∫(n²H² + 3|ν^⊤|²)e^w / ∫e^w` over a closed manifold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reilly_ratio: Option<f64>,
    /// `max |H̄|²` for a submanifold of a unit sphere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sphere_mean_curvature_sq: Option<f64>,
    /// `max |Ĥ|²` for a submanifold of a projective space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projective_mean_curvature_sq: Option<f64>,
    /// Aligned with the multiplicity-expanded spectrum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<Vec<EigenMoments>>,
}

impl GeometricConstants {
    pub fn new(n: usize, c1: f64, d1: f64) -> Self {
        GeometricConstants {
            n,
            c1,
            d1,
            ..Default::default()
        }
    }

    /// Flat Euclidean domain without drift.
    pub fn euclidean(n: usize) -> Self {
        GeometricConstants::new(n, 0.0, 0.0)
    }

    /// Parse and validate a TOML table of constants.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let gc: GeometricConstants = toml::from_str(text).map_err(|e| Error::Parse(format!("constants: {e}")))?;
        gc.validate()?;
        Ok(gc)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("geometric constants: {m}")));
        if self.n == 0 {
            return bad("n must be at least 1");
        }
        let reals = [
            ("c1", Some(self.c1)),
            ("d1", Some(self.d1)),
            ("eta", self.eta),
            ("c3", self.c3),
            ("reilly_ratio", self.reilly_ratio),
            ("sphere_mean_curvature_sq", self.sphere_mean_curvature_sq),
            ("projective_mean_curvature_sq", self.projective_mean_curvature_sq),
        ];
        for (name, v) in reals {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return bad(&format!("{name} must be finite and nonnegative"));
                }
            }
        }
        if let Some(d) = self.d_f {
            if ![1, 2, 4].contains(&d) {
                return bad("d_f must be 1, 2 or 4");
            }
        }
        Ok(())
    }

    pub(crate) fn require<T: Copy>(&self, value: Option<T>, field: &'static str, check: CheckId) -> Result<T> {
        value.ok_or_else(|| Error::MissingConstant {
            field,
            check: check.as_str().to_string(),
        })
    }

    /// Constants rescaled to a spectrum multiplied by `c²`.
    pub fn scaled(&self, c: f64) -> Self {
        let c2 = c * c;
        GeometricConstants {
            c1: self.c1 * c2,
            d1: self.d1 * c,
            eta: self.eta.map(|v| v * c2),
            c3: self.c3.map(|v| v * c),
            reilly_ratio: self.reilly_ratio.map(|v| v * c2),
            moments: self.moments.as_ref().map(|ms| {
                ms.iter()
                    .map(|m| EigenMoments {
                        curvature: m.curvature * c2,
                        drift_sq: m.drift_sq * c2,
                        drift: m.drift * c,
                    })
                    .collect()
            }),
            ..self.clone()
        }
    }

    fn summary(&self) -> String {
        format!("n={} C1={:.6e} D1={:.6e}", self.n, self.c1, self.d1)
    }
}

/// Allowed negative margin: `max(relative·max(|lhs|,|rhs|), absolute)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::analytic()
    }
}

impl Tolerance {
    pub fn analytic() -> Self {
        Tolerance {
            relative: 1e-9,
            absolute: 0.0,
        }
    }

    /// Analytic tolerance widened by three discretization-error estimates.
    pub fn numerical(error_estimate: f64) -> Self {
        Tolerance {
            relative: 1e-9,
            absolute: 3.0 * error_estimate.abs(),
        }
    }

    pub fn allowance(&self, lhs: f64, rhs: f64) -> f64 {
        (self.relative * lhs.abs().max(rhs.abs())).max(self.absolute)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Holds,
    Fails,
    /// The predicate is vacuous or undefined for these inputs.
    NotApplicable,
}

/// Outcome of one inequality at one index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub allowance: f64,
    pub holds: bool,
    pub status: CheckStatus,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
    pub inputs_provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
}

impl CheckResult {
    fn evaluated(id: CheckId, index: Index, lhs: f64, rhs: f64, tol: &Tolerance, provenance: String) -> Self {
        let margin = rhs - lhs;
        let allowance = tol.allowance(lhs, rhs);
        let holds = margin >= -allowance;
        let (k, j) = index.split();
        CheckResult {
            check_id: id.as_str().to_string(),
            k,
            j,
            lhs,
            rhs,
            margin,
            allowance,
            holds,
            status: if holds { CheckStatus::Holds } else { CheckStatus::Fails },
            note: String::new(),
            inputs_provenance: provenance,
            error_estimate: None,
        }
    }

    fn not_applicable(id: CheckId, index: Index, note: impl Into<String>, provenance: String) -> Self {
        let (k, j) = index.split();
        CheckResult {
            check_id: id.as_str().to_string(),
            k,
            j,
            lhs: 0.0,
            rhs: 0.0,
            margin: 0.0,
            allowance: 0.0,
            holds: false,
            status: CheckStatus::NotApplicable,
            note: note.into(),
            inputs_provenance: provenance,
            error_estimate: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        let note = note.into();
        if !note.is_empty() {
            if self.note.is_empty() {
                self.note = note;
            } else {
                self.note = format!("{}; {note}", self.note);
            }
        }
        self
    }

    /// Re-judge the stored margin under a different tolerance.
    pub fn rejudged(mut self, tol: &Tolerance) -> Self {
        if self.status == CheckStatus::NotApplicable {
            return self;
        }
        self.allowance = tol.allowance(self.lhs, self.rhs);
        self.holds = self.margin >= -self.allowance;
        self.status = if self.holds {
            CheckStatus::Holds
        } else {
            CheckStatus::Fails
        };
        self
    }

    /// Holds, or is vacuous.
    pub fn satisfied(&self) -> bool {
        self.status != CheckStatus::Fails
    }
}

/// Which index parameter a result carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Index {
    K(usize),
    J(usize),
    None,
}

impl Index {
    fn split(self) -> (Option<usize>, Option<usize>) {
        match self {
            Index::K(k) => (Some(k), None),
            Index::J(j) => (None, Some(j)),
            Index::None => (None, None),
        }
    }
}

/// Settings shared by a batch of checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckContext {
    pub tolerance: Tolerance,
    /// Relative merge tolerance for distinct-value extraction.
    pub cluster_tolerance: f64,
    /// Exponent `f` of the recursion machinery; defaults to `n`.
    pub recursion_exponent: Option<f64>,
}

impl Default for CheckContext {
    fn default() -> Self {
        CheckContext {
            tolerance: Tolerance::analytic(),
            cluster_tolerance: ANALYTIC_CLUSTER_TOL,
            recursion_exponent: None,
        }
    }
}

/// Multiplicity-expanded view of a spectrum in its own index convention.
pub(crate) struct Expanded<'a> {
    values: Vec<f64>,
    first: usize,
    base: IndexBase,
    source: &'a str,
}

impl<'a> Expanded<'a> {
    pub(crate) fn new(s: &'a Spectrum) -> Self {
        Expanded {
            values: s.expanded(),
            first: s.index_base().first_index(),
            base: s.index_base(),
            source: s.source(),
        }
    }

    pub(crate) fn require_base(&self, base: IndexBase, id: CheckId) -> Result<()> {
        if self.base != base {
            return Err(Error::IndexBase {
                check: id.as_str().to_string(),
                expected: base.label(),
            });
        }
        Ok(())
    }

    /// Fail unless the eigenvalue with index `last` exists.
    pub(crate) fn require(&self, last: usize, id: CheckId) -> Result<()> {
        let available = self.values.len();
        let needed = last + 1 - self.first;
        if last < self.first || needed > available {
            return Err(Error::SpectrumTooShort {
                check: id.as_str().to_string(),
                needed,
                available,
            });
        }
        Ok(())
    }

    pub(crate) fn at(&self, i: usize) -> f64 {
        self.values[i - self.first]
    }

    pub(crate) fn first(&self) -> usize {
        self.first
    }

    pub(crate) fn source(&self) -> &str {
        self.source
    }
}

fn require_index(id: CheckId, index: Option<usize>) -> Result<usize> {
    index.ok_or_else(|| Error::Config(format!("check `{}` needs an index", id.as_str())))
}

/// Evaluate any check by id. `index` is `k` or `j` as the catalog declares.
pub fn evaluate(
    id: CheckId,
    s: &Spectrum,
    gc: &GeometricConstants,
    index: Option<usize>,
    ctx: &CheckContext,
) -> Result<CheckResult> {
    gc.validate()?;
    let tol = &ctx.tolerance;
    use CheckId::*;
    match id {
        Ppw
        | HileProtter
        | YangFirst
        | YangSecond
        | AshbaughBenguria
        | AshbaughBenguriaRefined
        | LevitinParnovski
        | ChenChengYang
        | ChenChengSum
        | ChengQi
        | BallRatio => {
            let which = Classical::from_id(id).expect("classical id");
            check_classical(s, gc, index, which, tol)
        }
        DriftYang | DriftYangShifted => {
            let (a, b) = check_yang_xin(s, gc, require_index(id, index)?, tol)?;
            Ok(if id == DriftYang { a } else { b })
        }
        DriftSum | DriftSumShifted => {
            let (a, b) = check_ppw_type_xin(s, gc, require_index(id, index)?, tol)?;
            Ok(if id == DriftSum { a } else { b })
        }
        MomentYang
        | MomentYangShifted
        | MomentSum
        | MomentSumShifted
        | ClosedMomentSum
        | ClosedMomentSumShifted
        | ClosedMomentYang
        | ClosedMomentYangShifted => {
            let form = MomentForm::from_id(id).expect("moment id");
            check_moment_forms(s, gc, require_index(id, index)?, form, tol)
        }
        SolitonYang | SolitonYangShifted | SolitonSum | SolitonSumShifted => {
            let form = SolitonForm::from_id(id).expect("soliton id");
            check_soliton(s, gc.n, require_index(id, index)?, form, tol)
        }
        RecursionStep => {
            let k = require_index(id, index)?;
            let f = ctx.recursion_exponent.unwrap_or(gc.n as f64);
            let seq = Expanded::new(s);
            seq.require_base(IndexBase::DirichletFromOne, id)?;
            seq.require(k + 1, id)?;
            let values: Vec<f64> = (1..=k + 1).map(|i| seq.at(i)).collect();
            let results = recursion_invariant(&values, f, tol)?;
            Ok(results
                .into_iter()
                .last()
                .expect("k ≥ 1 gives one step")
                .with_provenance(s.source()))
        }
        RecursionBound => {
            let f = ctx.recursion_exponent.unwrap_or(gc.n as f64);
            check_recursion_bound(s, f, require_index(id, index)?, tol)
        }
        SolitonGrowth => check_growth(s, gc.n, require_index(id, index)?, tol),
        SolitonGap | SolitonGapShifted => {
            let (a, b) = gap_bounds(s, gc.n, require_index(id, index)?, tol)?;
            Ok(if id == SolitonGap { a } else { b })
        }
        MinimalYang | MinimalSum | SphereYang | SphereSum | UnitSphereYang | UnitSphereSum | ProjectiveYang
        | ProjectiveSum | UnitGradient | Eigenmap => {
            let which = Submanifold::from_id(id).expect("submanifold id");
            check_submanifold_corollaries(s, gc, require_index(id, index)?, which, tol)
        }
        ClosedSum
        | ClosedSumShifted
        | Reilly
        | MinimalSphereSum
        | MinimalSphereSumShifted
        | ClosedYang
        | ClosedYangShifted
        | MinimalSphereYang
        | MinimalSphereYangShifted
        | Isoparametric
        | Focal
        | FocalS5
        | FocalS15 => {
            let which = ClosedBound::from_id(id).expect("closed id");
            check_closed(s, gc, index, which, tol)
        }
        SecondGap => Ok(gamma2_probe(s, gc.n, ctx.cluster_tolerance)?.to_check(tol, s.source())),
    }
}

impl CheckResult {
    fn with_provenance(mut self, source: &str) -> Self {
        self.inputs_provenance = format!("{source}; {}", self.inputs_provenance);
        self
    }
}

pub(crate) fn provenance(seq: &Expanded, gc: Option<&GeometricConstants>, extra: &str) -> String {
    let mut p = format!("spectrum: {}", seq.source());
    if let Some(gc) = gc {
        p.push_str(&format!("; {}", gc.summary()));
        if gc.c1 > 0.0 || gc.d1 > 0.0 {
            p.push_str(" (maxima over the supplied immersion)");
        }
    }
    if !extra.is_empty() {
        p.push_str("; ");
        p.push_str(extra);
    }
    p
}

/// `Σ_{i=first}^{k} (L − Λ_i)²` and `Σ (L − Λ_i)·term(Λ_i)` with `L = Λ_{k+1}`.
pub(crate) fn yang_sums(seq: &Expanded, k: usize, term: impl Fn(usize, f64) -> f64) -> (f64, f64) {
    let top = seq.at(k + 1);
    let mut square = 0.0;
    let mut weighted = 0.0;
    for i in seq.first()..=k {
        let v = seq.at(i);
        let gap = top - v;
        square += gap * gap;
        weighted += gap * term(i, v);
    }
    (square, weighted)
}

/// `Σ_{l=1}^{n} Λ_{j+l}`.
pub(crate) fn window_sum(seq: &Expanded, j: usize, n: usize) -> f64 {
    (1..=n).map(|l| seq.at(j + l)).sum()
}
