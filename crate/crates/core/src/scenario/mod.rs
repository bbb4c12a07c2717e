//! Self-contained experiment files and the pipeline that runs them.

mod pipeline;

use serde::{Deserialize, Serialize};

use crate::bounds::{CheckId, GeometricConstants, IndexKind};
use crate::error::{Error, Result};
use crate::fem::{
    mesh_circle, mesh_clifford_torus, mesh_curve, mesh_disk, mesh_disk_on, mesh_icosphere, mesh_interval, mesh_patch,
    mesh_unit_square, Boundary, Mesh,
};
use crate::geometry::{Immersion, ImmersionSpec};
use crate::spectra::{
    box_spectrum, clifford_torus_spectrum, disk_spectrum, interval_drift_spectrum, sphere_spectrum, IndexBase, Spectrum,
};

pub use pipeline::run_scenario;

/// Scenario files shipped with the crate, as `(name, TOML text)`.
pub const BUNDLED: &[(&str, &str)] = &[
    ("interval_drift", include_str!("../../scenarios/interval_drift.toml")),
    ("disk_ppw", include_str!("../../scenarios/disk_ppw.toml")),
    (
        "square_dirichlet",
        include_str!("../../scenarios/square_dirichlet.toml"),
    ),
    ("sphere_closed", include_str!("../../scenarios/sphere_closed.toml")),
    (
        "icosphere_closed",
        include_str!("../../scenarios/icosphere_closed.toml"),
    ),
    ("clifford_torus", include_str!("../../scenarios/clifford_torus.toml")),
    ("grim_reaper", include_str!("../../scenarios/grim_reaper.toml")),
    ("bowl_soliton", include_str!("../../scenarios/bowl_soliton.toml")),
    ("focal", include_str!("../../scenarios/focal.toml")),
    ("identities", include_str!("../../scenarios/identities.toml")),
];

/// Parse a bundled scenario by name.
pub fn bundled(name: &str) -> Result<Scenario> {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Config(format!("no bundled scenario `{name}`")))?;
    Scenario::from_toml_str(text)
}

/// One experiment: a spectrum, its geometric constants and a battery of checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    /// Absent for scenarios that only report constants or identities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<SpectrumSpec>,
    /// Defaults to a flat, drift-free setting of the spectrum's dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<GeometricConstants>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recursion_exponent: Option<f64>,
    /// Locate the second distinct closed eigenvalue against `[2n, 2n+2]`.
    #[serde(default)]
    pub gamma2: bool,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub focal: Vec<FocalSpec>,
    #[serde(default)]
    pub identities: Vec<IdentitySpec>,
}

/// Where the eigenvalues come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpectrumSpec {
    Analytic { count: usize, family: AnalyticFamily },
    Fem(FemSpec),
}

/// Model spectra with closed forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalyticFamily {
    Interval {
        length: f64,
        #[serde(default)]
        drift: f64,
    },
    Box {
        sides: Vec<f64>,
        #[serde(default)]
        drift: Vec<f64>,
    },
    Disk {
        radius: f64,
    },
    Sphere {
        n: usize,
    },
    CliffordTorus {
        p: usize,
        q: usize,
    },
    /// Values listed verbatim, multiplicities expanded.
    Explicit {
        values: Vec<f64>,
        index_base: IndexBase,
    },
}

impl AnalyticFamily {
    pub fn spectrum(&self, count: usize) -> Result<Spectrum> {
        match self {
            AnalyticFamily::Interval { length, drift } => interval_drift_spectrum(*length, *drift, count),
            AnalyticFamily::Box { sides, drift } => {
                let drift = if drift.is_empty() {
                    vec![0.0; sides.len()]
                } else {
                    drift.clone()
                };
                box_spectrum(sides, &drift, count)
            }
            AnalyticFamily::Disk { radius } => disk_spectrum(*radius, count),
            AnalyticFamily::Sphere { n } => sphere_spectrum(*n, count),
            AnalyticFamily::CliffordTorus { p, q } => clifford_torus_spectrum(*p, *q, count),
            AnalyticFamily::Explicit { values, index_base } => {
                Spectrum::from_expanded(values.clone(), *index_base, "explicit")
            }
        }
    }

    /// Intrinsic dimension of the underlying geometry.
    pub fn dim(&self) -> usize {
        match self {
            AnalyticFamily::Interval { .. } => 1,
            AnalyticFamily::Box { sides, .. } => sides.len(),
            AnalyticFamily::Disk { .. } => 2,
            AnalyticFamily::Sphere { n } => *n,
            AnalyticFamily::CliffordTorus { p, q } => p + q,
            AnalyticFamily::Explicit { .. } => 1,
        }
    }
}

/// Discrete spectra along a refinement ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FemSpec {
    /// Eigenpairs per level, the closed zero mode included.
    pub count: usize,
    pub boundary: Boundary,
    /// Ascending levels; their meaning depends on the mesh kind.
    pub resolutions: Vec<usize>,
    /// Constant drift vector in ambient coordinates; zero when empty.
    #[serde(default)]
    pub drift: Vec<f64>,
    pub mesh: MeshSpec,
    /// Closed-form spectrum for the error column of the convergence table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<AnalyticFamily>,
    /// Replace `c1`, `d1` (and `reilly_ratio` on closed meshes) by values
    /// measured on the geometry.
    #[serde(default)]
    pub derive_constants: bool,
    /// Attach eigenfunction moments from the finest level.
    #[serde(default)]
    pub moments: bool,
    /// Run the checks on the Richardson extrapolation of the last two levels
    /// instead of the finest level itself.
    #[serde(default)]
    pub extrapolate: bool,
}

/// Mesh families; `level` is the resolution from the ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSpec {
    /// `(0, length)` with `level` cells.
    Interval { length: f64 },
    /// Circle with `level` cells.
    Circle { radius: f64 },
    /// Parametric curve with `level` cells.
    Curve { immersion: ImmersionSpec },
    /// Parametric surface on an `level × level` grid.
    Patch { immersion: ImmersionSpec },
    /// `[0, 1]²` on an `level × level` grid.
    UnitSquare,
    /// Disk with `level` rings.
    Disk { radius: f64 },
    /// Disk of parameters lifted through a surface, `level` rings.
    DiskOn { immersion: ImmersionSpec, radius: f64 },
    /// Unit icosphere, `level` subdivisions.
    Icosphere,
    /// Clifford torus in `ℝ⁴` on a `level × level` grid.
    CliffordTorus,
}

impl MeshSpec {
    pub fn immersion(&self) -> Result<Option<Box<dyn Immersion>>> {
        match self {
            MeshSpec::Curve { immersion } | MeshSpec::Patch { immersion } | MeshSpec::DiskOn { immersion, .. } => {
                immersion.build().map(Some)
            }
            _ => Ok(None),
        }
    }

    pub fn build(&self, level: usize, immersion: Option<&dyn Immersion>) -> Result<Mesh> {
        let im = || immersion.ok_or_else(|| Error::Config("mesh kind needs an immersion".into()));
        match self {
            MeshSpec::Interval { length } => mesh_interval(*length, level),
            MeshSpec::Circle { radius } => mesh_circle(*radius, level),
            MeshSpec::Curve { .. } => mesh_curve(im()?, level),
            MeshSpec::Patch { .. } => mesh_patch(im()?, level),
            MeshSpec::UnitSquare => mesh_unit_square(level),
            MeshSpec::Disk { radius } => mesh_disk(*radius, level),
            MeshSpec::DiskOn { radius, .. } => mesh_disk_on(im()?, *radius, level),
            MeshSpec::Icosphere => mesh_icosphere(level),
            MeshSpec::CliffordTorus => mesh_clifford_torus(level),
        }
    }

    /// `|nH⃗|²` where it is constant on the whole geometry.
    pub(crate) fn constant_curvature_term(&self) -> Option<f64> {
        match self {
            MeshSpec::Interval { .. } | MeshSpec::UnitSquare | MeshSpec::Disk { .. } => Some(0.0),
            MeshSpec::Circle { radius } => Some(1.0 / (radius * radius)),
            MeshSpec::Icosphere | MeshSpec::CliffordTorus => Some(4.0),
            _ => None,
        }
    }
}

/// One check of the battery, with an optional inclusive index range.
///
/// Without a range every admissible index of the spectrum is checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub id: CheckId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<[usize; 2]>,
}

/// Multiplicities of an isoparametric family whose focal constants are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FocalSpec {
    pub m1: usize,
    pub m2: usize,
}

/// Pointwise extrinsic identities sampled on a patch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitySpec {
    pub immersion: ImmersionSpec,
    #[serde(default)]
    pub drift: Vec<f64>,
    /// Points per axis of a uniform grid.
    #[serde(default = "default_per_axis")]
    pub per_axis: usize,
    /// Additional uniformly random points, seeded from the solver seed.
    #[serde(default)]
    pub random_points: usize,
    /// Finite-difference spacing of the Laplacian.
    #[serde(default = "default_identity_step")]
    pub step: f64,
    /// Largest admissible residual.
    #[serde(default = "default_identity_threshold")]
    pub threshold: f64,
}

fn default_per_axis() -> usize {
    5
}

fn default_identity_step() -> f64 {
    2e-5
}

fn default_identity_threshold() -> f64 {
    1e-6
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Parse(format!("scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read scenario {}: {e}", path.display())))?;
        Scenario::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(format!("scenario `{}`: {m}", self.name)));
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return bad("name must be a nonempty identifier".into());
        }
        if self.spectrum.is_none() && (!self.checks.is_empty() || self.gamma2) {
            return bad("checks need a [spectrum] section".into());
        }
        match &self.spectrum {
            None => {}
            Some(SpectrumSpec::Analytic { count, .. }) if *count == 0 => return bad("count must be positive".into()),
            Some(SpectrumSpec::Fem(f)) => {
                if f.count == 0 {
                    return bad("count must be positive".into());
                }
                if f.resolutions.is_empty() || f.resolutions.windows(2).any(|w| w[0] >= w[1]) {
                    return bad("resolutions must be nonempty and strictly ascending".into());
                }
                if f.moments && f.boundary == Boundary::Closed && f.count < 2 {
                    return bad("moments need at least two eigenpairs".into());
                }
            }
            _ => {}
        }
        if let Some(gc) = &self.constants {
            gc.validate()?;
        }
        for c in &self.checks {
            let kind = c.id.index_kind();
            let range = match (kind, c.k, c.j) {
                (_, Some(_), Some(_)) => return bad(format!("{}: give k or j, not both", c.id)),
                (IndexKind::K, r, None) => r,
                (IndexKind::J, None, r) => r,
                (IndexKind::None, None, None) => None,
                _ => return bad(format!("{}: index range does not match the check's index", c.id)),
            };
            if let Some([a, b]) = range {
                if a > b {
                    return bad(format!("{}: index range [{a}, {b}] is descending", c.id));
                }
            }
        }
        for f in &self.focal {
            if f.m1 == 0 || f.m2 == 0 {
                return bad("focal multiplicities must be positive".into());
            }
        }
        for i in &self.identities {
            if i.per_axis == 0 && i.random_points == 0 {
                return bad("identity sampling needs at least one point".into());
            }
            if !(i.step > 0.0 && i.threshold > 0.0) {
                return bad("identity step and threshold must be positive".into());
            }
        }
        Ok(())
    }

    /// Dimension used when no constants are supplied.
    pub(crate) fn default_dim(&self) -> usize {
        match &self.spectrum {
            None => 1,
            Some(SpectrumSpec::Analytic { family, .. }) => family.dim(),
            Some(SpectrumSpec::Fem(f)) => match &f.mesh {
                MeshSpec::Interval { .. } | MeshSpec::Circle { .. } | MeshSpec::Curve { .. } => 1,
                _ => 2,
            },
        }
    }
}
