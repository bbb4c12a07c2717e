//! The `Spectrum` type, analytic spectra of model geometries, and distinct-value
//! extraction.

pub mod bessel;

use std::f64::consts::PI;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Which eigenvalue carries index 0 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndexBase {
    /// `Λ_1 ≤ Λ_2 ≤ …` on a domain with Dirichlet data.
    DirichletFromOne,
    /// `0 = Λ̄_0 < Λ̄_1 ≤ …` on a closed manifold.
    ClosedFromZero,
}

impl IndexBase {
    pub fn first_index(self) -> usize {
        match self {
            IndexBase::DirichletFromOne => 1,
            IndexBase::ClosedFromZero => 0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            IndexBase::DirichletFromOne => "Dirichlet",
            IndexBase::ClosedFromZero => "closed",
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SpectrumRepr {
    index_base: IndexBase,
    values: Vec<f64>,
    multiplicities: Vec<usize>,
    source: String,
}

/// Ascending eigenvalues grouped by multiplicity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumRepr", into = "SpectrumRepr")]
pub struct Spectrum {
    values: Vec<f64>,
    multiplicities: Vec<usize>,
    index_base: IndexBase,
    source: String,
}

impl TryFrom<SpectrumRepr> for Spectrum {
    type Error = Error;
    fn try_from(r: SpectrumRepr) -> Result<Self> {
        Spectrum::new(r.values, r.multiplicities, r.index_base, r.source)
    }
}

impl From<Spectrum> for SpectrumRepr {
    fn from(s: Spectrum) -> Self {
        SpectrumRepr {
            index_base: s.index_base,
            values: s.values,
            multiplicities: s.multiplicities,
            source: s.source,
        }
    }
}

impl Spectrum {
    /// Build from grouped values, validating every invariant.
    pub fn new(
        values: Vec<f64>,
        multiplicities: Vec<usize>,
        index_base: IndexBase,
        source: impl Into<String>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("spectrum has no values"));
        }
        if values.len() != multiplicities.len() {
            return Err(invalid(format!(
                "{} values but {} multiplicities",
                values.len(),
                multiplicities.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(invalid(format!("eigenvalue {v} is negative or not finite")));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("grouped values must be strictly ascending"));
        }
        if multiplicities.contains(&0) {
            return Err(invalid("multiplicities must be at least 1"));
        }
        match index_base {
            IndexBase::DirichletFromOne if values[0] <= 0.0 => {
                return Err(invalid("Dirichlet spectra must start above zero"));
            }
            IndexBase::ClosedFromZero if values[0] != 0.0 || multiplicities[0] != 1 => {
                return Err(invalid("closed spectra must start with a simple zero eigenvalue"));
            }
            _ => {}
        }
        Ok(Spectrum {
            values,
            multiplicities,
            index_base,
            source: source.into(),
        })
    }

    /// Build from a multiplicity-expanded list; exactly equal values are grouped.
    pub fn from_expanded(mut expanded: Vec<f64>, index_base: IndexBase, source: impl Into<String>) -> Result<Self> {
        if expanded.iter().any(|v| v.is_nan()) {
            return Err(invalid("eigenvalue is NaN"));
        }
        expanded.sort_by(f64::total_cmp);
        let mut values: Vec<f64> = Vec::new();
        let mut multiplicities: Vec<usize> = Vec::new();
        for v in expanded {
            match values.last() {
                Some(&last) if last == v => *multiplicities.last_mut().unwrap() += 1,
                _ => {
                    values.push(v);
                    multiplicities.push(1);
                }
            }
        }
        Spectrum::new(values, multiplicities, index_base, source)
    }

    /// Grouped distinct values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn index_base(&self) -> IndexBase {
        self.index_base
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }

    /// Number of eigenvalues counted with multiplicity.
    pub fn len(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Values repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&v, &m)| std::iter::repeat_n(v, m))
            .collect()
    }

    /// Smallest and largest admissible index in this spectrum's own convention.
    pub fn index_range(&self) -> (usize, usize) {
        let first = self.index_base.first_index();
        (first, first + self.len() - 1)
    }

    /// Eigenvalue by index in this spectrum's convention (multiplicity counted).
    pub fn eigenvalue(&self, index: usize) -> Result<f64> {
        let (first, last) = self.index_range();
        if index < first || index > last {
            return Err(invalid(format!(
                "index {index} outside {first}..={last} of this {} spectrum",
                self.index_base.label()
            )));
        }
        let mut offset = index - first;
        for (&v, &m) in self.values.iter().zip(&self.multiplicities) {
            if offset < m {
                return Ok(v);
            }
            offset -= m;
        }
        unreachable!("index checked against length")
    }

    /// Keep the first `count` eigenvalues counted with multiplicity.
    pub fn truncated(&self, count: usize) -> Result<Spectrum> {
        if count == 0 {
            return Err(invalid("cannot truncate to zero values"));
        }
        let mut expanded = self.expanded();
        expanded.truncate(count);
        Spectrum::from_expanded(expanded, self.index_base, self.source.clone())
    }

    /// Multiply every eigenvalue by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Spectrum> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(invalid("scale factor must be positive"));
        }
        Spectrum::new(
            self.values.iter().map(|v| v * factor).collect(),
            self.multiplicities.clone(),
            self.index_base,
            format!("{} scaled by {factor}", self.source),
        )
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Spectrum> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("spectrum JSON: {e}")))
    }

    /// CSV rows `index,value,multiplicity`; `index` is the first index of the group.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "value", "multiplicity"]).map_err(csv_error)?;
        let mut index = self.index_base.first_index();
        for (&v, &m) in self.values.iter().zip(&self.multiplicities) {
            w.write_record([index.to_string(), format!("{v:.17e}"), m.to_string()])
                .map_err(csv_error)?;
            index += m;
        }
        w.flush()?;
        Ok(())
    }

    /// Inverse of [`Spectrum::write_csv`]; the index base is inferred from the
    /// first index column (0 means closed).
    pub fn read_csv<R: Read>(input: R, source: impl Into<String>) -> Result<Spectrum> {
        let mut r = csv::Reader::from_reader(input);
        let mut values = Vec::new();
        let mut multiplicities = Vec::new();
        let mut base = None;
        for (line, record) in r.records().enumerate() {
            let record = record.map_err(csv_error)?;
            let field = |i: usize| {
                record
                    .get(i)
                    .ok_or_else(|| Error::Parse(format!("spectrum CSV row {}: missing column {i}", line + 2)))
            };
            let parse_err = |what: &str| Error::Parse(format!("spectrum CSV row {}: bad {what}", line + 2));
            let index: usize = field(0)?.trim().parse().map_err(|_| parse_err("index"))?;
            let value: f64 = field(1)?.trim().parse().map_err(|_| parse_err("value"))?;
            let mult: usize = field(2)?.trim().parse().map_err(|_| parse_err("multiplicity"))?;
            if base.is_none() {
                base = Some(if index == 0 {
                    IndexBase::ClosedFromZero
                } else {
                    IndexBase::DirichletFromOne
                });
            }
            values.push(value);
            multiplicities.push(mult);
        }
        let base = base.ok_or_else(|| Error::Parse("spectrum CSV has no rows".into()))?;
        Spectrum::new(values, multiplicities, base, source)
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(format!("CSV: {e}"))
}

/// Distinct eigenvalues `Γ̄_0 < Γ̄_1 < …` after merging near-coincident values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSequence {
    pub distinct_values: Vec<f64>,
    /// Total multiplicity absorbed by each cluster.
    pub multiplicities: Vec<usize>,
    pub cluster_tolerance: f64,
}

impl GammaSequence {
    pub fn len(&self) -> usize {
        self.distinct_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distinct_values.is_empty()
    }

    /// `Γ̄_i`, counted from 0.
    pub fn get(&self, i: usize) -> Option<f64> {
        self.distinct_values.get(i).copied()
    }
}

/// Default cluster tolerance for exact spectra.
pub const ANALYTIC_CLUSTER_TOL: f64 = 1e-6;
/// Default cluster tolerance for discretized spectra.
pub const FEM_CLUSTER_TOL: f64 = 1e-3;

/// Merge values whose relative distance to the first member of their cluster is
/// below `cluster_tolerance`; each cluster is represented by that first member.
pub fn distinct_eigenvalues(s: &Spectrum, cluster_tolerance: f64) -> Result<GammaSequence> {
    if !(cluster_tolerance > 0.0 && cluster_tolerance < 0.1) {
        return Err(invalid("cluster tolerance must lie in (0, 0.1)"));
    }
    let mut distinct_values: Vec<f64> = Vec::new();
    let mut multiplicities: Vec<usize> = Vec::new();
    for (&v, &m) in s.values().iter().zip(s.multiplicities()) {
        match distinct_values.last() {
            Some(&rep) if v - rep < cluster_tolerance * v.abs() => {
                *multiplicities.last_mut().unwrap() += m;
            }
            _ => {
                distinct_values.push(v);
                multiplicities.push(m);
            }
        }
    }
    Ok(GammaSequence {
        distinct_values,
        multiplicities,
        cluster_tolerance,
    })
}

fn require_count(count: usize) -> Result<()> {
    if count == 0 {
        Err(invalid("count must be at least 1"))
    } else {
        Ok(())
    }
}

/// Dirichlet spectrum of `u'' + b u'` on `(0, length)`: `k²π²/length² + b²/4`.
pub fn interval_drift_spectrum(length: f64, drift: f64, count: usize) -> Result<Spectrum> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(invalid("interval length must be positive"));
    }
    if !drift.is_finite() {
        return Err(invalid("drift must be finite"));
    }
    require_count(count)?;
    let shift = drift * drift / 4.0;
    let values = (1..=count).map(|k| (k as f64 * PI / length).powi(2) + shift).collect();
    Spectrum::new(
        values,
        vec![1; count],
        IndexBase::DirichletFromOne,
        format!("analytic interval length={length} drift={drift}"),
    )
}

/// Dirichlet spectrum of a box `Π(0, L_i)` with constant drift: the first `count`
/// values (with multiplicity) of `Σ k_i²π²/L_i² + |b|²/4`, `k_i ≥ 1`.
pub fn box_spectrum(side_lengths: &[f64], drift: &[f64], count: usize) -> Result<Spectrum> {
    if side_lengths.is_empty() {
        return Err(invalid("box needs at least one side"));
    }
    if side_lengths.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
        return Err(invalid("box sides must be positive"));
    }
    if drift.len() != side_lengths.len() {
        return Err(invalid(format!(
            "drift has {} components for a {}-dimensional box",
            drift.len(),
            side_lengths.len()
        )));
    }
    require_count(count)?;
    let weights: Vec<f64> = side_lengths.iter().map(|l| 1.0 / (l * l)).collect();
    let base: f64 = weights.iter().sum();
    // The tuples (m,1,…,1), m = 1..count, already give `count` values, so every
    // one of the first `count` values is at most this threshold.
    let threshold = weights
        .iter()
        .map(|w| base + w * ((count * count) as f64 - 1.0))
        .fold(f64::INFINITY, f64::min);
    let mut sums = Vec::new();
    enumerate_lattice(&weights, 0, 0.0, base, threshold * (1.0 + 1e-12), &mut sums);
    sums.sort_by(f64::total_cmp);
    sums.truncate(count);
    let shift = drift.iter().map(|b| b * b).sum::<f64>() / 4.0;
    let expanded: Vec<f64> = sums.iter().map(|s| PI * PI * s + shift).collect();
    let mut values: Vec<f64> = Vec::new();
    let mut multiplicities: Vec<usize> = Vec::new();
    for v in expanded {
        match values.last() {
            Some(&last) if (v - last) <= 1e-13 * v => *multiplicities.last_mut().unwrap() += 1,
            _ => {
                values.push(v);
                multiplicities.push(1);
            }
        }
    }
    Spectrum::new(
        values,
        multiplicities,
        IndexBase::DirichletFromOne,
        format!("analytic box sides={side_lengths:?} drift={drift:?}"),
    )
}

fn enumerate_lattice(
    weights: &[f64],
    axis: usize,
    partial: f64,
    remaining_min: f64,
    threshold: f64,
    out: &mut Vec<f64>,
) {
    if axis == weights.len() {
        out.push(partial);
        return;
    }
    let w = weights[axis];
    let rest_min = remaining_min - w;
    let mut k = 1usize;
    loop {
        let here = partial + w * (k * k) as f64;
        if here + rest_min > threshold {
            break;
        }
        enumerate_lattice(weights, axis + 1, here, rest_min, threshold, out);
        k += 1;
    }
}

/// Dirichlet Laplacian on the disk of the given radius: the first `count`
/// distinct values `(j_{m,k}/radius)²`, multiplicity 2 for `m ≥ 1`.
pub fn disk_spectrum(radius: f64, count: usize) -> Result<Spectrum> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(invalid("disk radius must be positive"));
    }
    require_count(count)?;
    let axial = bessel::bessel_zeros(0, count);
    let bound = axial[count - 1] * (1.0 + 1e-12);
    let mut levels: Vec<(f64, usize)> = axial.iter().map(|&z| (z, 1)).collect();
    let mut m = 1;
    loop {
        let zeros = bessel::bessel_zeros_below(m, bound);
        if zeros.is_empty() {
            break;
        }
        levels.extend(zeros.into_iter().map(|z| (z, 2)));
        m += 1;
    }
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    levels.truncate(count);
    let r2 = radius * radius;
    Spectrum::new(
        levels.iter().map(|(z, _)| z * z / r2).collect(),
        levels.iter().map(|(_, m)| *m).collect(),
        IndexBase::DirichletFromOne,
        format!("analytic disk radius={radius}"),
    )
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

/// Dimension of degree-`k` spherical harmonics on `Sⁿ`.
pub fn sphere_multiplicity(n: usize, k: usize) -> Result<usize> {
    let (n, k) = (n as u64, k as u64);
    let top = binomial(n + k, n).ok_or_else(|| invalid("multiplicity overflows"))?;
    let low = if k >= 2 {
        binomial(n + k - 2, n).ok_or_else(|| invalid("multiplicity overflows"))?
    } else {
        0
    };
    usize::try_from(top - low).map_err(|_| invalid("multiplicity overflows"))
}

/// Closed spectrum of the round unit `Sⁿ`: the first `count` distinct levels
/// `k(k+n−1)`, `k = 0..count`.
pub fn sphere_spectrum(n: usize, count: usize) -> Result<Spectrum> {
    if n == 0 {
        return Err(invalid("sphere dimension must be at least 1"));
    }
    require_count(count)?;
    let mut values = Vec::with_capacity(count);
    let mut multiplicities = Vec::with_capacity(count);
    for k in 0..count {
        values.push((k * (k + n - 1)) as f64);
        multiplicities.push(sphere_multiplicity(n, k)?);
    }
    Spectrum::new(
        values,
        multiplicities,
        IndexBase::ClosedFromZero,
        format!("analytic sphere n={n}"),
    )
}

/// Closed spectrum of `S^p(√(p/n)) × S^q(√(q/n))`, `n = p + q`: the first
/// `count` distinct levels `(n/p)k(k+p−1) + (n/q)l(l+q−1)`.
pub fn clifford_torus_spectrum(p: usize, q: usize, count: usize) -> Result<Spectrum> {
    if p == 0 || q == 0 {
        return Err(invalid("torus factor dimensions must be at least 1"));
    }
    require_count(count)?;
    let n = p + q;
    // Level value is n·N/(pq) with integer numerator N = q·a(k) + p·b(l).
    let a = |k: usize| (k * (k + p - 1)) as u64;
    let b = |l: usize| (l * (l + q - 1)) as u64;
    let mut reach = count.max(2);
    loop {
        let mut levels: std::collections::BTreeMap<u64, usize> = Default::default();
        for k in 0..=reach {
            for l in 0..=reach {
                let numerator = q as u64 * a(k) + p as u64 * b(l);
                let mult = sphere_multiplicity(p, k)? * sphere_multiplicity(q, l)?;
                *levels.entry(numerator).or_insert(0) += mult;
            }
        }
        let complete_below = (q as u64 * a(reach + 1)).min(p as u64 * b(reach + 1));
        let complete: Vec<(u64, usize)> = levels
            .into_iter()
            .filter(|(num, _)| *num < complete_below)
            .take(count)
            .collect();
        if complete.len() == count {
            let scale = n as f64 / (p * q) as f64;
            return Spectrum::new(
                complete.iter().map(|(num, _)| scale * *num as f64).collect(),
                complete.iter().map(|(_, m)| *m).collect(),
                IndexBase::ClosedFromZero,
                format!("analytic Clifford torus p={p} q={q}"),
            );
        }
        reach *= 2;
    }
}

/// Volume of the unit ball in `ℝⁿ`.
pub fn unit_ball_volume(n: usize) -> f64 {
    // Γ(n/2 + 1) by the half-integer recurrence.
    let mut gamma = if n.is_multiple_of(2) { 1.0 } else { PI.sqrt() / 2.0 };
    let mut arg = if n.is_multiple_of(2) { 1.0 } else { 1.5 };
    let target = n as f64 / 2.0 + 1.0;
    while arg < target - 0.25 {
        gamma *= arg;
        arg += 1.0;
    }
    PI.powf(n as f64 / 2.0) / gamma
}

/// Leading Weyl term `4π²(ω_n·volume)^{−2/n} k^{2/n}`.
pub fn weyl_value(volume: f64, n: usize, k: usize) -> f64 {
    let nf = n as f64;
    4.0 * PI * PI * (unit_ball_volume(n) * volume).powf(-2.0 / nf) * (k as f64).powf(2.0 / nf)
}

/// `Λ_k` divided by its Weyl value.
pub fn weyl_ratio(s: &Spectrum, volume: f64, n: usize, k: usize) -> Result<f64> {
    if !(volume > 0.0) {
        return Err(invalid("volume must be positive"));
    }
    if n == 0 || k == 0 {
        return Err(invalid("dimension and index must be at least 1"));
    }
    Ok(s.eigenvalue(k)? / weyl_value(volume, n, k))
}
