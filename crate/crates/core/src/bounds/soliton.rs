//! Bounds for translating solitons and the recursion machinery behind them.

use super::{provenance, window_sum, yang_sums, CheckId, CheckResult, Expanded, Index, Tolerance};
use crate::error::{invalid, Result};
use crate::spectra::{IndexBase, Spectrum};

/// The four universal soliton forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolitonForm {
    /// Yang form with `Λ_i + √Λ_i + n²/4`.
    Yang,
    /// Yang form with `(6/n)(Λ_i + n²/6)`.
    YangShifted,
    /// `Σ Λ_{j+l} ≤ (n+4)Λ_j + n² + 4√Λ_j`.
    Sum,
    /// `Σ Λ_{j+l} ≤ (n+6)Λ_j + n²`.
    SumShifted,
}

impl SolitonForm {
    pub fn id(self) -> CheckId {
        match self {
            SolitonForm::Yang => CheckId::SolitonYang,
            SolitonForm::YangShifted => CheckId::SolitonYangShifted,
            SolitonForm::Sum => CheckId::SolitonSum,
            SolitonForm::SumShifted => CheckId::SolitonSumShifted,
        }
    }

    pub fn from_id(id: CheckId) -> Option<Self> {
        [
            SolitonForm::Yang,
            SolitonForm::YangShifted,
            SolitonForm::Sum,
            SolitonForm::SumShifted,
        ]
        .into_iter()
        .find(|f| f.id() == id)
    }

    fn shifted(self) -> bool {
        matches!(self, SolitonForm::YangShifted | SolitonForm::SumShifted)
    }
}

const LOW_DIMENSION_NOTE: &str = "the shifted form is stated for n ≥ 2; evaluated for information";

fn dirichlet<'a>(s: &'a Spectrum, id: CheckId) -> Result<Expanded<'a>> {
    let seq = Expanded::new(s);
    seq.require_base(IndexBase::DirichletFromOne, id)?;
    Ok(seq)
}

fn positive(id: CheckId, i: usize) -> Result<()> {
    if i == 0 {
        return Err(invalid(format!("{id}: index must be at least 1")));
    }
    Ok(())
}

/// Evaluate a soliton form at `k` (Yang) or `j` (sums) for intrinsic dimension `n`.
pub fn check_soliton(s: &Spectrum, n: usize, index: usize, form: SolitonForm, tol: &Tolerance) -> Result<CheckResult> {
    let id = form.id();
    let seq = dirichlet(s, id)?;
    positive(id, index)?;
    if n == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    let nf = n as f64;
    let prov = provenance(&seq, None, &format!("unit drift, n={n}"));
    let result = match form {
        SolitonForm::Yang | SolitonForm::YangShifted => {
            let k = index;
            seq.require(k + 1, id)?;
            if form == SolitonForm::Yang {
                let (sq, w) = yang_sums(&seq, k, |_, v| v + v.sqrt() + nf * nf / 4.0);
                CheckResult::evaluated(id, Index::K(k), sq, 4.0 / nf * w, tol, prov)
            } else {
                let (sq, w) = yang_sums(&seq, k, |_, v| v + nf * nf / 6.0);
                CheckResult::evaluated(id, Index::K(k), sq, 6.0 / nf * w, tol, prov)
            }
        }
        SolitonForm::Sum | SolitonForm::SumShifted => {
            let j = index;
            seq.require(j + n, id)?;
            let lj = seq.at(j);
            let lhs = window_sum(&seq, j, n);
            let rhs = if form == SolitonForm::Sum {
                (nf + 4.0) * lj + nf * nf + 4.0 * lj.sqrt()
            } else {
                (nf + 6.0) * lj + nf * nf
            };
            CheckResult::evaluated(id, Index::J(j), lhs, rhs, tol, prov).with_note(super::drift::SAME_INDEX_NOTE)
        }
    };
    Ok(if form.shifted() && n < 2 {
        result.with_note(LOW_DIMENSION_NOTE)
    } else {
        result
    })
}

/// `(1 + 4/f)·k^{2/f}·λ_1`.
pub fn recursion_bound(lambda1: f64, f: f64, k: usize) -> f64 {
    (1.0 + 4.0 / f) * (k as f64).powf(2.0 / f) * lambda1
}

/// `C(f,k)`, the contraction factor of one recursion step.
pub fn recursion_coefficient(f: f64, k: usize) -> f64 {
    let kf = k as f64;
    1.0 - (1.0 / (3.0 * f)) * (kf / (kf + 1.0)).powf(4.0 / f) * (1.0 + 2.0 / f) * (1.0 + 4.0 / f) / (kf + 1.0).powi(3)
}

/// Whether `Σ_{i≤k}(μ_{k+1}−μ_i)² ≤ (4/f)Σ_{i≤k} μ_i(μ_{k+1}−μ_i)` with slack `tol`.
fn quadratic_hypothesis(mu: &[f64], f: f64, k: usize, tol: &Tolerance) -> bool {
    let top = mu[k];
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for &m in &mu[..k] {
        lhs += (top - m) * (top - m);
        rhs += m * (top - m);
    }
    rhs *= 4.0 / f;
    rhs - lhs >= -tol.allowance(lhs, rhs)
}

fn validate_sequence(mu: &[f64], f: f64) -> Result<()> {
    if !(f > 0.0 && f.is_finite()) {
        return Err(invalid(format!("recursion exponent must be positive, got {f}")));
    }
    if mu.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(invalid("recursion needs positive finite numbers"));
    }
    if mu.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("recursion needs a nondecreasing sequence"));
    }
    Ok(())
}

/// One recursion step `F_{k+1} ≤ C(f,k)((k+1)/k)^{4/f}F_k` for every
/// `k = 1, …, len−1`. Steps whose quadratic hypothesis fails are reported as
/// not applicable.
pub fn recursion_invariant(mu: &[f64], f: f64, tol: &Tolerance) -> Result<Vec<CheckResult>> {
    validate_sequence(mu, f)?;
    if mu.len() < 2 {
        return Err(invalid("recursion needs at least two numbers"));
    }
    let id = CheckId::RecursionStep;
    let big_f = |k: usize| {
        let kf = k as f64;
        let mean = mu[..k].iter().sum::<f64>() / kf;
        let mean_sq = mu[..k].iter().map(|v| v * v).sum::<f64>() / kf;
        (1.0 + 2.0 / f) * mean * mean - mean_sq
    };
    let prov = format!("f={f}");
    let mut out = Vec::with_capacity(mu.len() - 1);
    for k in 1..mu.len() {
        let coefficient = recursion_coefficient(f, k);
        let note = format!("C(f,k)={coefficient:.12}");
        if !quadratic_hypothesis(mu, f, k, tol) {
            out.push(
                CheckResult::not_applicable(id, Index::K(k), "quadratic hypothesis fails at this k", prov.clone())
                    .with_note(note),
            );
            continue;
        }
        let kf = k as f64;
        let rhs = coefficient * ((kf + 1.0) / kf).powf(4.0 / f) * big_f(k);
        out.push(CheckResult::evaluated(id, Index::K(k), big_f(k + 1), rhs, tol, prov.clone()).with_note(note));
    }
    Ok(out)
}

/// `Λ_{k+1} ≤ (1+4/f)k^{2/f}Λ_1`, applicable when the quadratic hypothesis
/// holds for every index up to `k`.
pub fn check_recursion_bound(s: &Spectrum, f: f64, k: usize, tol: &Tolerance) -> Result<CheckResult> {
    let id = CheckId::RecursionBound;
    let seq = dirichlet(s, id)?;
    positive(id, k)?;
    seq.require(k + 1, id)?;
    let mu: Vec<f64> = (1..=k + 1).map(|i| seq.at(i)).collect();
    validate_sequence(&mu, f)?;
    let prov = provenance(&seq, None, &format!("f={f}"));
    if let Some(bad) = (1..=k).find(|&m| !quadratic_hypothesis(&mu, f, m, tol)) {
        return Ok(CheckResult::not_applicable(
            id,
            Index::K(k),
            format!("quadratic hypothesis fails at k={bad}"),
            prov,
        ));
    }
    Ok(CheckResult::evaluated(
        id,
        Index::K(k),
        mu[k],
        recursion_bound(mu[0], f, k),
        tol,
        prov,
    ))
}

/// `Λ_{k+1} + n²/6 ≤ (1+6/n)(Λ_1 + n²/6)k^{3/n}`.
pub fn check_growth(s: &Spectrum, n: usize, k: usize, tol: &Tolerance) -> Result<CheckResult> {
    let id = CheckId::SolitonGrowth;
    let seq = dirichlet(s, id)?;
    positive(id, k)?;
    seq.require(k + 1, id)?;
    let nf = n as f64;
    let shift = nf * nf / 6.0;
    let lhs = seq.at(k + 1) + shift;
    let rhs = (1.0 + 6.0 / nf) * (seq.at(1) + shift) * (k as f64).powf(3.0 / nf);
    let prov = provenance(&seq, None, &format!("unit drift, n={n}"));
    Ok(CheckResult::evaluated(id, Index::K(k), lhs, rhs, tol, prov))
}

/// Consecutive-gap bounds for `Λ_{k+1} − Λ_k`. A negative discriminant makes
/// the bound undefined, reported as not applicable.
pub fn gap_bounds(s: &Spectrum, n: usize, k: usize, tol: &Tolerance) -> Result<(CheckResult, CheckResult)> {
    let seq = dirichlet(s, CheckId::SolitonGap)?;
    positive(CheckId::SolitonGap, k)?;
    seq.require(k + 1, CheckId::SolitonGap)?;
    let nf = n as f64;
    let kf = k as f64;
    let vals: Vec<f64> = (1..=k).map(|i| seq.at(i)).collect();
    let total: f64 = vals.iter().sum();
    let mean = total / kf;
    let variance = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / kf;
    let roots: f64 = vals.iter().map(|v| v.sqrt()).sum();
    let three_halves: f64 = vals.iter().map(|v| v.powf(1.5)).sum();
    let gap = seq.at(k + 1) - seq.at(k);
    let prov = provenance(&seq, None, &format!("unit drift, n={n}"));

    let centre = (2.0 / nf) * (total + roots) / kf + nf / 2.0;
    let cross = (4.0 / nf) * (roots * total - kf * three_halves) / (kf * kf);
    let first = centre * centre - (1.0 + 4.0 / nf) * variance + cross;
    let second = ((3.0 / nf) * mean + nf / 3.0).powi(2) - (1.0 + 6.0 / nf) * variance;

    let judge = |id: CheckId, disc: f64| {
        if disc < 0.0 {
            CheckResult::not_applicable(
                id,
                Index::K(k),
                format!("negative discriminant {disc:.6e}"),
                prov.clone(),
            )
        } else {
            CheckResult::evaluated(id, Index::K(k), gap, 2.0 * disc.sqrt(), tol, prov.clone())
        }
    };
    Ok((
        judge(CheckId::SolitonGap, first),
        judge(CheckId::SolitonGapShifted, second),
    ))
}
