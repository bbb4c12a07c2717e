//! Bounds for closed eigenvalue problems, counted from `Λ̄_0 = 0`.

use serde::Serialize;

use super::{provenance, window_sum, yang_sums, CheckId, CheckResult, Expanded, GeometricConstants, Index, Tolerance};
use crate::error::{invalid, Error, Result};
use crate::spectra::{distinct_eigenvalues, IndexBase, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedBound {
    Sum,
    SumShifted,
    Reilly,
    MinimalSphereSum,
    MinimalSphereSumShifted,
    Yang,
    YangShifted,
    MinimalSphereYang,
    MinimalSphereYangShifted,
    Isoparametric,
    Focal,
    FocalS5,
    FocalS15,
}

impl ClosedBound {
    pub fn id(self) -> CheckId {
        match self {
            ClosedBound::Sum => CheckId::ClosedSum,
            ClosedBound::SumShifted => CheckId::ClosedSumShifted,
            ClosedBound::Reilly => CheckId::Reilly,
            ClosedBound::MinimalSphereSum => CheckId::MinimalSphereSum,
            ClosedBound::MinimalSphereSumShifted => CheckId::MinimalSphereSumShifted,
            ClosedBound::Yang => CheckId::ClosedYang,
            ClosedBound::YangShifted => CheckId::ClosedYangShifted,
            ClosedBound::MinimalSphereYang => CheckId::MinimalSphereYang,
            ClosedBound::MinimalSphereYangShifted => CheckId::MinimalSphereYangShifted,
            ClosedBound::Isoparametric => CheckId::Isoparametric,
            ClosedBound::Focal => CheckId::Focal,
            ClosedBound::FocalS5 => CheckId::FocalS5,
            ClosedBound::FocalS15 => CheckId::FocalS15,
        }
    }

    pub fn from_id(id: CheckId) -> Option<Self> {
        use ClosedBound::*;
        [
            Sum,
            SumShifted,
            Reilly,
            MinimalSphereSum,
            MinimalSphereSumShifted,
            Yang,
            YangShifted,
            MinimalSphereYang,
            MinimalSphereYangShifted,
            Isoparametric,
            Focal,
            FocalS5,
            FocalS15,
        ]
        .into_iter()
        .find(|b| b.id() == id)
    }
}

/// Spectral data of the focal submanifold `M₁` for multiplicities `(m₁, m₂)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FocalConstants {
    pub m1: usize,
    pub m2: usize,
    /// Dimension `2(m₁+m₂)` of the isoparametric hypersurface.
    pub hypersurface_dim: usize,
    /// `dim M₁ = m₁ + 2m₂`, also the first nonzero eigenvalue.
    pub focal_dim: usize,
    /// Multiplicity of the first nonzero eigenvalue.
    pub first_multiplicity: usize,
    /// Right side of the mean bound in its stated form `2(n+m₂+2)`.
    pub stated_mean_bound: f64,
    /// `2·dim M₁ + 4`, the value the window-sum estimate produces.
    pub derived_mean_bound: f64,
    /// `dim M₁ · (2·dim M₁ + 4)`.
    pub derived_sum_bound: f64,
    /// Bound on the second distinct eigenvalue from the derived mean.
    pub gamma2_bound: f64,
}

pub fn focal_constants(m1: usize, m2: usize) -> Result<FocalConstants> {
    if m1 == 0 || m2 == 0 {
        return Err(invalid("focal multiplicities must be positive"));
    }
    let n = 2 * (m1 + m2);
    let dim = m1 + 2 * m2;
    let derived = 2.0 * dim as f64 + 4.0;
    Ok(FocalConstants {
        m1,
        m2,
        hypersurface_dim: n,
        focal_dim: dim,
        first_multiplicity: n + 2,
        stated_mean_bound: 2.0 * (n + m2 + 2) as f64,
        derived_mean_bound: derived,
        derived_sum_bound: dim as f64 * derived,
        gamma2_bound: derived,
    })
}

fn closed<'a>(s: &'a Spectrum, id: CheckId) -> Result<Expanded<'a>> {
    let seq = Expanded::new(s);
    seq.require_base(IndexBase::ClosedFromZero, id)?;
    Ok(seq)
}

fn need(id: CheckId, index: Option<usize>) -> Result<usize> {
    index.ok_or_else(|| Error::Config(format!("check `{id}` needs an index")))
}

/// Evaluate a closed-problem bound. `index` is `j` for window sums and `k`
/// for Yang forms; the remaining bounds take none.
pub fn check_closed(
    s: &Spectrum,
    gc: &GeometricConstants,
    index: Option<usize>,
    which: ClosedBound,
    tol: &Tolerance,
) -> Result<CheckResult> {
    let id = which.id();
    let seq = closed(s, id)?;
    let n = gc.n;
    let nf = n as f64;
    let d = gc.d1;
    let prov = provenance(&seq, Some(gc), "");
    let done = |index: Index, lhs: f64, rhs: f64| CheckResult::evaluated(id, index, lhs, rhs, tol, prov.clone());
    match which {
        ClosedBound::Sum
        | ClosedBound::SumShifted
        | ClosedBound::MinimalSphereSum
        | ClosedBound::MinimalSphereSumShifted => {
            let j = need(id, index)?;
            seq.require(j + n, id)?;
            let c = match which {
                ClosedBound::Sum | ClosedBound::SumShifted => gc.c1,
                _ => nf * nf,
            };
            let lj = seq.at(j);
            let lhs = window_sum(&seq, j, n);
            let rhs = match which {
                ClosedBound::Sum | ClosedBound::MinimalSphereSum => (nf + 4.0) * lj + 4.0 * d * lj.sqrt() + d * d + c,
                _ => (nf + 6.0) * lj + 3.0 * d * d + c,
            };
            Ok(done(Index::J(j), lhs, rhs))
        }
        ClosedBound::Yang
        | ClosedBound::YangShifted
        | ClosedBound::MinimalSphereYang
        | ClosedBound::MinimalSphereYangShifted => {
            let k = need(id, index)?;
            seq.require(k + 1, id)?;
            let c = match which {
                ClosedBound::Yang | ClosedBound::YangShifted => gc.c1,
                _ => nf * nf,
            };
            let r = match which {
                ClosedBound::Yang | ClosedBound::MinimalSphereYang => {
                    let (sq, w) = yang_sums(&seq, k, |_, v| v + d * v.sqrt() + d * d / 4.0 + c / 4.0);
                    done(Index::K(k), sq, 4.0 / nf * w)
                }
                _ => {
                    let (sq, w) = yang_sums(&seq, k, |_, v| v + d * d / 2.0 + c / 6.0);
                    done(Index::K(k), sq, 6.0 / nf * w)
                }
            };
            Ok(r)
        }
        ClosedBound::Reilly => {
            let ratio = gc.require(gc.reilly_ratio, "reilly_ratio", id)?;
            seq.require(n, id)?;
            Ok(done(Index::None, (1..=n).map(|k| seq.at(k)).sum(), ratio))
        }
        ClosedBound::Isoparametric => {
            let n0 = gc.require(gc.n0, "n0", id)?;
            seq.require(n0 + n, id)?;
            let mean = window_sum(&seq, n0, n) / nf;
            Ok(done(Index::None, mean, 2.0 * nf + 4.0))
        }
        ClosedBound::Focal => {
            let m1 = gc.require(gc.m1, "m1", id)?;
            let m2 = gc.require(gc.m2, "m2", id)?;
            let fc = focal_constants(m1, m2)?;
            let start = fc.first_multiplicity;
            let terms = fc.focal_dim;
            seq.require(start + terms, id)?;
            let mean = window_sum(&seq, start, terms) / terms as f64;
            Ok(done(Index::None, mean, fc.stated_mean_bound)
                .with_note(format!("window-sum estimate gives {}", fc.derived_mean_bound)))
        }
        ClosedBound::FocalS5 | ClosedBound::FocalS15 => {
            let (m1, m2) = if which == ClosedBound::FocalS5 { (1, 1) } else { (4, 3) };
            let fc = focal_constants(m1, m2)?;
            seq.require(fc.first_multiplicity + fc.focal_dim, id)?;
            let sum = window_sum(&seq, fc.first_multiplicity, fc.focal_dim);
            Ok(done(Index::None, sum, fc.derived_sum_bound))
        }
    }
}

/// Where the second distinct closed eigenvalue sits relative to `[2n, 2n+2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Gamma2Position {
    BelowWindow,
    InWindow,
    AboveWindow,
    AboveProvenBound,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Gamma2Report {
    pub n: usize,
    pub gamma1: f64,
    pub gamma2: f64,
    pub window: [f64; 2],
    pub proven_bound: f64,
    pub position: Gamma2Position,
    pub cluster_tolerance: f64,
}

impl Gamma2Report {
    pub fn to_check(&self, tol: &Tolerance, source: &str) -> CheckResult {
        let prov = format!("spectrum: {source}; cluster tolerance {:e}", self.cluster_tolerance);
        CheckResult::evaluated(
            CheckId::SecondGap,
            Index::None,
            self.gamma2,
            self.proven_bound,
            tol,
            prov,
        )
        .with_note(format!(
            "second distinct eigenvalue {:.9} is {:?} relative to [{}, {}]",
            self.gamma2, self.position, self.window[0], self.window[1]
        ))
    }
}

/// Locate `Γ̄₂` of a closed spectrum against the window `[2n, 2n+2]` and the
/// proven bound `2n+4`.
pub fn gamma2_probe(s: &Spectrum, n: usize, cluster_tolerance: f64) -> Result<Gamma2Report> {
    closed(s, CheckId::SecondGap)?;
    let gamma = distinct_eigenvalues(s, cluster_tolerance)?;
    let (gamma1, gamma2) = match (gamma.get(1), gamma.get(2)) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::SpectrumTooShort {
                check: CheckId::SecondGap.to_string(),
                needed: 3,
                available: gamma.len(),
            })
        }
    };
    let nf = n as f64;
    let window = [2.0 * nf, 2.0 * nf + 2.0];
    let proven_bound = 2.0 * nf + 4.0;
    let slack = 1e-9 * proven_bound;
    let position = if gamma2 < window[0] - slack {
        Gamma2Position::BelowWindow
    } else if gamma2 <= window[1] + slack {
        Gamma2Position::InWindow
    } else if gamma2 <= proven_bound + slack {
        Gamma2Position::AboveWindow
    } else {
        Gamma2Position::AboveProvenBound
    };
    Ok(Gamma2Report {
        n,
        gamma1,
        gamma2,
        window,
        proven_bound,
        position,
        cluster_tolerance,
    })
}
