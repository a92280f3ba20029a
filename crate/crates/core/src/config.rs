//! Run configuration, read from JSON.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::PrepotentialSource;
use crate::scan::Sampling;
use crate::verify::{DEFAULT_DIRECTIONS, DEFAULT_ORDER, DEFAULT_TOL_IDENTITY, DEFAULT_TOL_INEQUALITY};

pub const SCHEMA_VERSION: u32 = 1;
pub const MAX_ORDER: usize = 10;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    HodgeRiemann,
    Horizontality,
    Theorem12,
    YukawaEstimates,
    RicciCrosscheck,
    CurvatureCrossengine,
    ParallelCurvature,
    Siegel,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::HodgeRiemann,
        Suite::Horizontality,
        Suite::Theorem12,
        Suite::YukawaEstimates,
        Suite::RicciCrosscheck,
        Suite::CurvatureCrossengine,
        Suite::ParallelCurvature,
        Suite::Siegel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::HodgeRiemann => "hodge-riemann",
            Suite::Horizontality => "horizontality",
            Suite::Theorem12 => "theorem12",
            Suite::YukawaEstimates => "yukawa-estimates",
            Suite::RicciCrosscheck => "ricci-crosscheck",
            Suite::CurvatureCrossengine => "curvature-crossengine",
            Suite::ParallelCurvature => "parallel-curvature",
            Suite::Siegel => "siegel",
        }
    }

    /// Smallest prepotential jet order the suite can run with.
    pub fn required_order(self) -> usize {
        match self {
            Suite::HodgeRiemann | Suite::Siegel => 3,
            Suite::Horizontality => 3,
            Suite::RicciCrosscheck | Suite::CurvatureCrossengine => 4,
            Suite::Theorem12 | Suite::YukawaEstimates | Suite::ParallelCurvature => 6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_tol_identity")]
    pub identity: f64,
    #[serde(default = "default_tol_inequality")]
    pub inequality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: DEFAULT_TOL_IDENTITY,
            inequality: DEFAULT_TOL_INEQUALITY,
        }
    }
}

fn default_tol_identity() -> f64 {
    DEFAULT_TOL_IDENTITY
}

fn default_tol_inequality() -> f64 {
    DEFAULT_TOL_INEQUALITY
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

fn default_order() -> usize {
    DEFAULT_ORDER
}

fn default_directions() -> usize {
    DEFAULT_DIRECTIONS
}

fn default_suites() -> Vec<Suite> {
    Suite::ALL.to_vec()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub prepotential: PrepotentialSource,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default = "default_suites")]
    pub suites: Vec<Suite>,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_directions")]
    pub directions: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputOptions,
}

impl RunConfig {
    /// All suites with default settings on the given source.
    pub fn for_source(prepotential: PrepotentialSource) -> RunConfig {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            prepotential,
            sampling: Sampling::default(),
            suites: default_suites(),
            order: DEFAULT_ORDER,
            seed: 0,
            directions: DEFAULT_DIRECTIONS,
            tolerances: Tolerances::default(),
            output: OutputOptions::default(),
        }
    }

    /// Suites in canonical order without duplicates.
    pub fn canonical_suites(&self) -> Vec<Suite> {
        let mut s = self.suites.clone();
        s.sort();
        s.dedup();
        s
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::Invalid(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.order > MAX_ORDER {
            return Err(ConfigError::Invalid(format!(
                "order {} exceeds the maximum of {MAX_ORDER}",
                self.order
            )));
        }
        for suite in self.canonical_suites() {
            if self.order < suite.required_order() {
                return Err(ConfigError::Invalid(format!(
                    "suite {} needs order >= {}, got {}",
                    suite.name(),
                    suite.required_order(),
                    self.order
                )));
            }
        }
        if self.suites.is_empty() {
            return Err(ConfigError::Invalid("no suites selected".into()));
        }
        for (name, t) in [
            ("identity", self.tolerances.identity),
            ("inequality", self.tolerances.inequality),
        ] {
            if !(t >= 0.0) || !t.is_finite() {
                return Err(ConfigError::Invalid(format!("{name} tolerance must be finite and >= 0")));
            }
        }
        if self.directions == 0 {
            return Err(ConfigError::Invalid("directions must be positive".into()));
        }
        Ok(())
    }
}

/// Parses and validates a config; syntax and schema errors carry line and column.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let config: RunConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &std::path::Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}
