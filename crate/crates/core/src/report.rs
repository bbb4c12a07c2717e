//! Reports written by scenario runs, and the plot series derived from them.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{CheckResult, CheckStatus, FocalConstants, Gamma2Position};
use crate::config::Config;
use crate::eigensolve::SolveMethod;
use crate::error::{Error, Result};
use crate::geometry::IdentityReport;
use crate::scenario::Scenario;
use crate::spectra::Spectrum;

/// Fixed closing statement of every report.
pub const FOOTER: &str = "Only the model spectra listed here are evaluated. Statements about arbitrary complete \
manifolds, the infimum over isometric immersions and the open conjectures cannot be reproduced at this scale; \
they are exercised by the property-based test suites instead.";

/// Everything a run produced, in a stable field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub toolkit: String,
    pub version: String,
    /// SHA-256 of the effective config and scenario.
    pub config_hash: String,
    pub scenario: Scenario,
    pub spectra: Vec<SpectrumEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceSection>,
    pub constants_used: serde_json::Value,
    pub checks: Vec<CheckResult>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub focal: Vec<FocalEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<Gamma2Entry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub identities: Vec<IdentityEntry>,
    pub summary: Summary,
    pub footer: String,
}

/// A spectrum with the discretization it came from, if any.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dofs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<SolveMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    pub spectrum: Spectrum,
}

/// Refinement ladder of a discrete run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSection {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares log-log slopes against the oracle, per eigenvalue.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed_orders: Option<Vec<f64>>,
    /// Relative error estimate of each finest-level eigenvalue.
    pub error_estimates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub resolution: usize,
    pub h: f64,
    pub values: Vec<f64>,
    /// Relative errors against the oracle, when one is declared.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub errors: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FocalEntry {
    pub m1: usize,
    pub m2: usize,
    pub hypersurface_dim: usize,
    pub focal_dim: usize,
    pub first_multiplicity: usize,
    pub stated_mean_bound: f64,
    pub derived_mean_bound: f64,
    pub derived_sum_bound: f64,
    pub gamma2_bound: f64,
}

impl From<FocalConstants> for FocalEntry {
    fn from(f: FocalConstants) -> Self {
        FocalEntry {
            m1: f.m1,
            m2: f.m2,
            hypersurface_dim: f.hypersurface_dim,
            focal_dim: f.focal_dim,
            first_multiplicity: f.first_multiplicity,
            stated_mean_bound: f.stated_mean_bound,
            derived_mean_bound: f.derived_mean_bound,
            derived_sum_bound: f.derived_sum_bound,
            gamma2_bound: f.gamma2_bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gamma2Entry {
    pub n: usize,
    pub gamma1: f64,
    pub gamma2: f64,
    pub window: [f64; 2],
    pub proven_bound: f64,
    pub position: String,
    pub in_window: bool,
}

impl Gamma2Entry {
    pub(crate) fn new(r: &crate::bounds::Gamma2Report) -> Self {
        let position = serde_json::to_value(r.position)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        Gamma2Entry {
            n: r.n,
            gamma1: r.gamma1,
            gamma2: r.gamma2,
            window: r.window,
            proven_bound: r.proven_bound,
            position,
            in_window: r.position == Gamma2Position::InWindow,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityEntry {
    pub immersion: String,
    pub max_residual: f64,
    pub threshold: f64,
    pub inequalities_hold: bool,
    pub holds: bool,
    pub detail: IdentityReport,
}

/// Counts over `checks`, plus identity failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub holds: usize,
    pub fails: usize,
    pub not_applicable: usize,
    pub identity_failures: usize,
}

impl Summary {
    pub fn tally(checks: &[CheckResult], identities: &[IdentityEntry]) -> Self {
        let count = |s: CheckStatus| checks.iter().filter(|c| c.status == s).count();
        Summary {
            total: checks.len(),
            holds: count(CheckStatus::Holds),
            fails: count(CheckStatus::Fails),
            not_applicable: count(CheckStatus::NotApplicable),
            identity_failures: identities.iter().filter(|i| !i.holds).count(),
        }
    }

    pub fn all_hold(&self) -> bool {
        self.fails == 0 && self.identity_failures == 0
    }
}

/// Hex SHA-256 of the canonical JSON of config and scenario.
pub fn config_hash(config: &Config, scenario: &Scenario) -> Result<String> {
    let canonical = serde_json::to_string(&(config, scenario)).map_err(|e| Error::Parse(e.to_string()))?;
    let digest = Sha256::digest(canonical.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("report: {e}")))
    }

    /// Spectrum the checks ran on: the finest level, or the analytic one.
    pub fn final_spectrum(&self) -> Option<&Spectrum> {
        self.spectra.last().map(|e| &e.spectrum)
    }

    /// Write `<name>.json` and the CSV tables into `dir`; returns the paths.
    pub fn write_all(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let json = dir.join(format!("{}.json", self.scenario.name));
        std::fs::write(&json, self.to_json()?)?;
        written.push(json);
        let checks = dir.join(format!("{}_checks.csv", self.scenario.name));
        self.write_checks_csv(std::fs::File::create(&checks)?)?;
        written.push(checks);
        written.extend(write_plot_data(self, PlotSelector::All, dir)?);
        Ok(written)
    }

    pub fn write_checks_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Parse(format!("csv: {e}"));
        w.write_record(["check_id", "k", "j", "lhs", "rhs", "margin", "allowance", "status"])
            .map_err(csv_err)?;
        for c in &self.checks {
            let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
            let status = match c.status {
                CheckStatus::Holds => "holds",
                CheckStatus::Fails => "fails",
                CheckStatus::NotApplicable => "not_applicable",
            };
            w.write_record([
                c.check_id.clone(),
                opt(c.k),
                opt(c.j),
                format!("{:?}", c.lhs),
                format!("{:?}", c.rhs),
                format!("{:?}", c.margin),
                format!("{:?}", c.allowance),
                status.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Which series `plot-data` extracts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlotSelector {
    All,
    Eigenvalues,
    /// Margins of every check, or of one id.
    Margins(Option<String>),
    Convergence,
}

impl std::str::FromStr for PlotSelector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all" => PlotSelector::All,
            "eigenvalues" => PlotSelector::Eigenvalues,
            "margins" => PlotSelector::Margins(None),
            "convergence" => PlotSelector::Convergence,
            other => match other.strip_prefix("margins:") {
                Some(id) if !id.is_empty() => PlotSelector::Margins(Some(id.to_string())),
                _ => {
                    return Err(Error::Config(format!(
                        "unknown selector `{other}` (all, eigenvalues, margins[:id], convergence)"
                    )))
                }
            },
        })
    }
}

fn write_series(path: &Path, header: &[String], rows: &[Vec<f64>], integer_first: bool) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Parse(format!("csv: {e}")))?;
    w.write_record(header).map_err(|e| Error::Parse(format!("csv: {e}")))?;
    for r in rows {
        let fields: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(i, v)| {
                if i == 0 && integer_first {
                    format!("{}", *v as i64)
                } else {
                    format!("{v:?}")
                }
            })
            .collect();
        w.write_record(&fields).map_err(|e| Error::Parse(format!("csv: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Write the selected `(k, Λ_k)`, `(k, margin_k)` and `(h, error)` series as
/// CSV files in `dir`. An empty result means nothing matched.
pub fn write_plot_data(report: &Report, selector: PlotSelector, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let name = &report.scenario.name;
    let mut written = Vec::new();
    let want = |s: &PlotSelector| selector == PlotSelector::All || &selector == s;

    if want(&PlotSelector::Eigenvalues) {
        if let Some(s) = report.final_spectrum() {
            let first = s.index_base().first_index();
            let rows: Vec<Vec<f64>> = s
                .expanded()
                .iter()
                .enumerate()
                .map(|(i, v)| vec![(first + i) as f64, *v])
                .collect();
            let path = dir.join(format!("{name}_eigenvalues.csv"));
            write_series(&path, &["k".into(), "lambda".into()], &rows, true)?;
            written.push(path);
        }
    }

    let margin_filter = match &selector {
        PlotSelector::All => Some(None),
        PlotSelector::Margins(id) => Some(id.clone()),
        _ => None,
    };
    if let Some(filter) = margin_filter {
        let mut ids: Vec<&str> = Vec::new();
        for c in &report.checks {
            if !ids.contains(&c.check_id.as_str()) {
                ids.push(&c.check_id);
            }
        }
        for id in ids {
            if filter.as_deref().is_some_and(|f| f != id) {
                continue;
            }
            let rows: Vec<Vec<f64>> = report
                .checks
                .iter()
                .filter(|c| c.check_id == id && c.status != CheckStatus::NotApplicable)
                .filter_map(|c| c.k.or(c.j).map(|i| vec![i as f64, c.margin]))
                .collect();
            if rows.is_empty() {
                continue;
            }
            let path = dir.join(format!("{name}_margins_{id}.csv"));
            write_series(&path, &["k".into(), "margin".into()], &rows, true)?;
            written.push(path);
        }
    }

    if want(&PlotSelector::Convergence) {
        if let Some(conv) = &report.convergence {
            if conv.rows.iter().all(|r| r.errors.is_some()) {
                let count = conv.rows[0].values.len();
                let mut header = vec!["h".to_string()];
                header.extend((1..=count).map(|i| format!("error_{i}")));
                let rows: Vec<Vec<f64>> = conv
                    .rows
                    .iter()
                    .map(|r| {
                        std::iter::once(r.h)
                            .chain(r.errors.clone().unwrap_or_default())
                            .collect()
                    })
                    .collect();
                let path = dir.join(format!("{name}_convergence.csv"));
                write_series(&path, &header, &rows, false)?;
                written.push(path);
            }
        }
    }
    Ok(written)
}
