//! Inequalities for the Dirichlet Laplacian on Euclidean domains and their
//! submanifold analogues without drift.

use super::{provenance, window_sum, yang_sums, CheckId, CheckResult, Expanded, GeometricConstants, Index, Tolerance};
use crate::error::{invalid, Error, Result};
use crate::spectra::bessel::bessel_zero;
use crate::spectra::{IndexBase, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classical {
    Ppw,
    HileProtter,
    YangFirst,
    YangSecond,
    AshbaughBenguria,
    AshbaughBenguriaRefined,
    LevitinParnovski,
    ChenChengYang,
    ChenChengSum,
    ChengQi,
    BallRatio,
}

impl Classical {
    pub fn id(self) -> CheckId {
        match self {
            Classical::Ppw => CheckId::Ppw,
            Classical::HileProtter => CheckId::HileProtter,
            Classical::YangFirst => CheckId::YangFirst,
            Classical::YangSecond => CheckId::YangSecond,
            Classical::AshbaughBenguria => CheckId::AshbaughBenguria,
            Classical::AshbaughBenguriaRefined => CheckId::AshbaughBenguriaRefined,
            Classical::LevitinParnovski => CheckId::LevitinParnovski,
            Classical::ChenChengYang => CheckId::ChenChengYang,
            Classical::ChenChengSum => CheckId::ChenChengSum,
            Classical::ChengQi => CheckId::ChengQi,
            Classical::BallRatio => CheckId::BallRatio,
        }
    }

    pub fn from_id(id: CheckId) -> Option<Self> {
        [
            Classical::Ppw,
            Classical::HileProtter,
            Classical::YangFirst,
            Classical::YangSecond,
            Classical::AshbaughBenguria,
            Classical::AshbaughBenguriaRefined,
            Classical::LevitinParnovski,
            Classical::ChenChengYang,
            Classical::ChenChengSum,
            Classical::ChengQi,
            Classical::BallRatio,
        ]
        .into_iter()
        .find(|c| c.id() == id)
    }
}

/// `Λ_2/Λ_1` of the unit ball in `ℝⁿ`, for `n ≤ 3`.
pub fn ball_ratio(n: usize) -> Result<f64> {
    match n {
        1 => Ok(4.0),
        2 => Ok((bessel_zero(1, 1) / bessel_zero(0, 1)).powi(2)),
        3 => {
            // First positive root of tan x = x.
            let g = |x: f64| x.sin() - x * x.cos();
            let (mut lo, mut hi) = (std::f64::consts::PI, 1.49 * std::f64::consts::PI);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(lo) * g(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok((0.5 * (lo + hi) / std::f64::consts::PI).powi(2))
        }
        _ => Err(invalid(format!("ball ratio is tabulated for n ≤ 3, got {n}"))),
    }
}

fn need_index(id: CheckId, index: Option<usize>) -> Result<usize> {
    index.ok_or_else(|| Error::Config(format!("check `{id}` needs an index")))
}

fn positive_index(id: CheckId, i: usize) -> Result<usize> {
    if i == 0 {
        return Err(invalid(format!("{id}: index must be at least 1")));
    }
    Ok(i)
}

/// Evaluate one classical inequality.
pub fn check_classical(
    s: &Spectrum,
    gc: &GeometricConstants,
    index: Option<usize>,
    which: Classical,
    tol: &Tolerance,
) -> Result<CheckResult> {
    let id = which.id();
    let seq = Expanded::new(s);
    seq.require_base(IndexBase::DirichletFromOne, id)?;
    let n = gc.n;
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let nf = n as f64;
    let uses_constants = matches!(which, Classical::ChenChengYang | Classical::ChenChengSum);
    let prov = provenance(&seq, uses_constants.then_some(gc), "");
    let done = |index: Index, lhs: f64, rhs: f64| CheckResult::evaluated(id, index, lhs, rhs, tol, prov.clone());

    match which {
        Classical::Ppw
        | Classical::HileProtter
        | Classical::YangFirst
        | Classical::YangSecond
        | Classical::ChenChengYang => {
            let k = positive_index(id, need_index(id, index)?)?;
            seq.require(k + 1, id)?;
            let kf = k as f64;
            let total: f64 = (1..=k).map(|i| seq.at(i)).sum();
            let top = seq.at(k + 1);
            let r = match which {
                Classical::Ppw => done(Index::K(k), top - seq.at(k), 4.0 * total / (nf * kf)),
                Classical::HileProtter => {
                    if (1..=k).any(|i| seq.at(i) >= top) {
                        return Ok(CheckResult::not_applicable(
                            id,
                            Index::K(k),
                            "Λ_{k+1} coincides with Λ_k, the sum is undefined",
                            prov,
                        ));
                    }
                    let rhs: f64 = (1..=k).map(|i| seq.at(i) / (top - seq.at(i))).sum();
                    done(Index::K(k), nf * kf / 4.0, rhs)
                }
                Classical::YangFirst => {
                    let (sq, w) = yang_sums(&seq, k, |_, v| v);
                    done(Index::K(k), sq, 4.0 / nf * w)
                }
                Classical::YangSecond => done(Index::K(k), top, (1.0 + 4.0 / nf) * total / kf),
                _ => {
                    let (sq, w) = yang_sums(&seq, k, |_, v| v + gc.c1 / 4.0);
                    done(Index::K(k), sq, 4.0 / nf * w)
                }
            };
            Ok(r)
        }
        Classical::AshbaughBenguria | Classical::AshbaughBenguriaRefined | Classical::ChenChengSum => {
            seq.require(n + 1, id)?;
            let shift = if which == Classical::ChenChengSum {
                gc.c1 / 4.0
            } else {
                0.0
            };
            let first = seq.at(1) + shift;
            let ratio = (2..=n + 1).map(|i| seq.at(i) + shift).sum::<f64>() / first;
            let rhs = match which {
                Classical::AshbaughBenguriaRefined => nf + 3.0 + seq.at(1) / seq.at(2),
                _ => nf + 4.0,
            };
            Ok(done(Index::None, ratio, rhs))
        }
        Classical::LevitinParnovski => {
            let j = positive_index(id, need_index(id, index)?)?;
            seq.require(j + n, id)?;
            Ok(done(Index::J(j), window_sum(&seq, j, n) / seq.at(j), nf + 4.0))
        }
        Classical::ChengQi => {
            let j = need_index(id, index)?;
            if j < 1 || j > n + 2 {
                return Err(invalid(format!("{id}: j must lie in 1..={}, got {j}", n + 2)));
            }
            seq.require((n + 1).max(j), id)?;
            let l1 = seq.at(1);
            let tail = l1 / seq.at(j);
            let (lhs1, rhs1) = (seq.at(2) / l1, 2.0 - tail);
            let (lhs2, rhs2) = ((2..=n + 1).map(|i| seq.at(i)).sum::<f64>() / l1, nf + 3.0 + tail);
            let first = done(Index::J(j), lhs1, rhs1);
            // The first alternative is strict.
            let first_holds = first.margin > 0.0;
            let second = done(Index::J(j), lhs2, rhs2);
            let (label, pick) = match (first_holds, second.holds) {
                (true, true) => ("both alternatives hold", second),
                (true, false) => ("alternative Λ_2/Λ_1 < 2−Λ_1/Λ_j holds", first),
                (false, true) => ("alternative on the ratio sum holds", second),
                (false, false) => ("neither alternative holds", second),
            };
            Ok(pick.with_note(label))
        }
        Classical::BallRatio => {
            seq.require(2, id)?;
            Ok(done(Index::None, seq.at(2) / seq.at(1), ball_ratio(n)?))
        }
    }
}
