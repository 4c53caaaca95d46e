//! Experiment configuration (JSON, `schema_version` 1).

use std::path::{Path, PathBuf};

use ldos_core::maps::{PerturbationSpec, ShearKind, Window, WindowMode};
use ldos_core::quantum::QuantizationKnobs;
use ldos_core::stadium::{DEFAULT_MASS, DEFAULT_MOMENTUM};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Schema(u32),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    Catmap,
    Stadium,
}

/// One dimension or a list of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Dimensions {
    One(usize),
    Many(Vec<usize>),
}

impl Dimensions {
    pub fn to_vec(&self) -> Vec<usize> {
        match self {
            Dimensions::One(n) => vec![*n],
            Dimensions::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    #[serde(default = "default_kind")]
    pub kind: ShearKind,
    #[serde(default = "default_window")]
    pub window: Window,
    #[serde(default)]
    pub mode: WindowMode,
}

fn default_kind() -> ShearKind {
    ShearKind::MomentumShear
}

fn default_window() -> Window {
    Window::Global
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        Self {
            kind: default_kind(),
            window: default_window(),
            mode: WindowMode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StadiumConfig {
    #[serde(default = "default_x0")]
    pub x0: f64,
    /// Deformations `δx`, nonnegative and strictly increasing.
    #[serde(default = "default_delta_x_grid")]
    pub delta_x_grid: Vec<f64>,
    #[serde(default = "default_momentum")]
    pub p_mag: f64,
    #[serde(default = "default_mass")]
    pub mass: f64,
}

fn default_x0() -> f64 {
    1.0
}

fn default_momentum() -> f64 {
    DEFAULT_MOMENTUM
}

fn default_mass() -> f64 {
    DEFAULT_MASS
}

/// 50 evenly spaced points on `[0, 0.1]`.
pub fn default_delta_x_grid() -> Vec<f64> {
    (0..50).map(|i| 0.1 * i as f64 / 49.0).collect()
}

impl Default for StadiumConfig {
    fn default() -> Self {
        Self {
            x0: default_x0(),
            delta_x_grid: default_delta_x_grid(),
            p_mag: default_momentum(),
            mass: default_mass(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub system: System,
    #[serde(default = "default_n")]
    pub n: Dimensions,
    /// Reference strength of the unperturbed map.
    #[serde(default)]
    pub k0: f64,
    /// Scaled strengths `χ = N δk`.
    #[serde(default)]
    pub chi_grid: Vec<f64>,
    #[serde(default)]
    pub perturbation: PerturbationConfig,
    #[serde(default)]
    pub quantization: QuantizationKnobs,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: u64,
    /// Steps of the survival amplitude and dephasing estimate.
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Largest orbit period for the action-uniformity diagnostic.
    #[serde(default = "default_po_n_max")]
    pub po_n_max: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub stadium: StadiumConfig,
}

fn default_n() -> Dimensions {
    Dimensions::One(300)
}

fn default_bins() -> usize {
    ldos_core::distributions::DEFAULT_BINS
}

fn default_mc_samples() -> u64 {
    100_000
}

fn default_steps() -> usize {
    5
}

fn default_po_n_max() -> u32 {
    6
}

fn check_grid(name: &str, grid: &[f64]) -> Result<(), ConfigError> {
    if grid.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(ConfigError::Invalid(format!(
            "{name} entries must be finite and nonnegative"
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ConfigError::Invalid(format!(
            "{name} must be strictly increasing"
        )));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Schema(self.schema_version));
        }
        let dims = self.n.to_vec();
        if dims.is_empty() || dims.iter().any(|&n| n < 2) {
            return Err(ConfigError::Invalid("every N must be at least 2".into()));
        }
        check_grid("chi_grid", &self.chi_grid)?;
        if self.bins < 8 {
            return Err(ConfigError::Invalid("bins must be at least 8".into()));
        }
        if self.mc_samples == 0 {
            return Err(ConfigError::Invalid("mc_samples must be positive".into()));
        }
        if self.po_n_max == 0 {
            return Err(ConfigError::Invalid("po_n_max must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(ConfigError::Invalid("threads must be positive".into()));
        }
        if !self.k0.is_finite() {
            return Err(ConfigError::Invalid("k0 must be finite".into()));
        }
        self.base_spec()?;
        let s = &self.stadium;
        check_grid("stadium.delta_x_grid", &s.delta_x_grid)?;
        if !(s.x0 > 0.0 && s.p_mag > 0.0 && s.mass > 0.0) {
            return Err(ConfigError::Invalid(
                "stadium x0, p_mag and mass must be positive".into(),
            ));
        }
        if s.delta_x_grid
            .last()
            .is_some_and(|&d| d > ldos_core::stadium::MAX_DEFORMATION)
        {
            return Err(ConfigError::Invalid(
                "stadium deformations are limited to 0.5".into(),
            ));
        }
        Ok(())
    }

    /// Unperturbed spec at strength `k0`.
    pub fn base_spec(&self) -> Result<PerturbationSpec, ConfigError> {
        let p = &self.perturbation;
        PerturbationSpec::new(p.kind, self.k0, p.window, p.mode)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn dimensions(&self) -> Vec<usize> {
        self.n.to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::from_json(
            r#"{"schema_version": 1, "system": "catmap", "chi_grid": [0, 1, 2]}"#,
        )
        .unwrap();
        assert_eq!(cfg.dimensions(), vec![300]);
        assert_eq!(cfg.bins, 256);
        assert_eq!(cfg.perturbation.kind, ShearKind::MomentumShear);
        assert_eq!(cfg.stadium.delta_x_grid.len(), 50);
        assert!((cfg.stadium.delta_x_grid[49] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn local_window_and_lists() {
        let cfg = ExperimentConfig::from_json(
            r#"{"schema_version": 1, "system": "catmap", "n": [200, 400], "chi_grid": [1],
                "perturbation": {"window": {"local": {"q0": 0.01, "beta": 0.2}}, "mode": "truncated"}}"#,
        )
        .unwrap();
        assert_eq!(cfg.dimensions(), vec![200, 400]);
        assert_eq!(cfg.base_spec().unwrap().area(), 0.2);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            r#"{"schema_version": 2, "system": "catmap"}"#,
            r#"{"schema_version": 1, "system": "catmap", "chi_grid": [2, 1]}"#,
            r#"{"schema_version": 1, "system": "catmap", "chi_grid": [-1]}"#,
            r#"{"schema_version": 1, "system": "catmap", "n": 1}"#,
            r#"{"schema_version": 1, "system": "catmap", "bins": 4}"#,
            r#"{"schema_version": 1, "system": "catmap", "bogus": 4}"#,
            r#"{"schema_version": 1, "system": "catmap", "perturbation": {"kind": "momentum_plus_position_shear", "window": {"local": {"q0": 0.1, "beta": 0.2}}}}"#,
            r#"{"schema_version": 1, "system": "stadium", "stadium": {"delta_x_grid": [0, 0.7]}}"#,
        ];
        for text in bad {
            assert!(ExperimentConfig::from_json(text).is_err(), "{text}");
        }
    }
}
