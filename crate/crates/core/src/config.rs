//! Global settings shared by every command.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bounds::CheckContext;
use crate::eigensolve::SolverSettings;
use crate::error::{Error, Result};

/// Environment variable naming a config file when `--config` is absent.
pub const CONFIG_ENV: &str = "DRIFTSPEC_CONFIG";

/// Contents of the global TOML config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[derive(Default)]
pub struct Config {
    pub solver: SolverSettings,
    pub checks: CheckSettings,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckSettings {
    /// Relative tolerance of analytic comparisons.
    pub relative_tolerance: f64,
    /// Relative gap below which eigenvalues merge into one distinct value.
    pub cluster_tolerance: f64,
    /// Relative gap used when clustering discrete spectra.
    pub fem_cluster_tolerance: f64,
}

impl Default for CheckSettings {
    fn default() -> Self {
        let ctx = CheckContext::default();
        CheckSettings {
            relative_tolerance: ctx.tolerance.relative,
            cluster_tolerance: ctx.cluster_tolerance,
            fem_cluster_tolerance: 5e-2,
        }
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Config::from_toml_str(&text)
    }

    /// Load from an explicit path, else from `$DRIFTSPEC_CONFIG`, else defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self> {
        let path = explicit
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        match path {
            Some(p) => Config::from_path(&p),
            None => Ok(Config::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.solver;
        if !(s.tol > 0.0 && s.tol < 1e-2) {
            return Err(Error::Config("solver.tol must lie in (0, 1e-2)".into()));
        }
        if s.max_iterations == 0 {
            return Err(Error::Config("solver.max_iterations must be positive".into()));
        }
        let c = &self.checks;
        if !(c.relative_tolerance >= 0.0 && c.relative_tolerance < 1e-2) {
            return Err(Error::Config("checks.relative_tolerance must lie in [0, 1e-2)".into()));
        }
        for (name, v) in [
            ("cluster_tolerance", c.cluster_tolerance),
            ("fem_cluster_tolerance", c.fem_cluster_tolerance),
        ] {
            if !(v > 0.0 && v < 0.1) {
                return Err(Error::Config(format!("checks.{name} must lie in (0, 0.1)")));
            }
        }
        Ok(())
    }
}
