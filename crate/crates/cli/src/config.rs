//! Run configuration.
//!
//! A JSON file such as
//!
//! ```json
//! {
//!   "p": 2,
//!   "geometry": { "kind": "linear-rational" },
//!   "catalogue": null,
//!   "mu_star": { "L2": 1 },
//!   "budgets": { "subset_search": 6, "tuple": 1000000, "matching": 100000 },
//!   "seed": 7,
//!   "exhaustive_limit": 12
//! }
//! ```
//!
//! Every key is optional. The file is taken from `--config`, else from the
//! `COLLAPSE_CONFIG` environment variable, else the defaults apply.
//! Command-line flags override the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use collapse_core::codes::Catalogue;
use collapse_core::collapse::MuSpec;
use collapse_core::colored::{SearchMode, SearchOptions, HARD_LIMIT};
use collapse_core::GeometryKind;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::format::{parse_catalogue, FormatError, GeometrySpec};

pub const CONFIG_ENV: &str = "COLLAPSE_CONFIG";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budgets {
    /// Size bound of the violation search above the exhaustive limit.
    pub subset_search: usize,
    /// Candidate tuples a code enumeration may examine.
    pub tuple: u64,
    /// Search nodes of a type comparison.
    pub matching: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            subset_search: 6,
            tuple: collapse_core::codes::DEFAULT_TUPLE_BUDGET,
            matching: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Used by the commands that create structures; commands reading a
    /// structure take `p` from it.
    pub p: u32,
    pub geometry: GeometrySpec,
    /// Catalogue file. Without one, the line code `L_p` is used in linear
    /// geometries and the power code `P_p` in the function field.
    pub catalogue: Option<PathBuf>,
    /// `μ*` overrides by template name.
    pub mu_star: BTreeMap<String, u64>,
    pub budgets: Budgets,
    pub seed: Option<u64>,
    pub exhaustive_limit: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: 2,
            geometry: GeometrySpec::LinearRational,
            catalogue: None,
            mu_star: BTreeMap::new(),
            budgets: Budgets::default(),
            seed: None,
            exhaustive_limit: SearchOptions::default().exhaustive_limit,
        }
    }
}

#[derive(Debug)]
pub enum ConfigError {
    Io(PathBuf, std::io::Error),
    Format(FormatError),
    Invalid(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            ConfigError::Format(e) => write!(f, "{e}"),
            ConfigError::Invalid(m) => write!(f, "invalid configuration: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

pub fn read_file(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_path_buf(), e))
}

impl RunConfig {
    pub fn parse(source: &str, text: &str) -> Result<Self, FormatError> {
        serde_json::from_str(text).map_err(|e| FormatError {
            source: source.into(),
            line: e.line().max(1),
            column: e.column().max(1),
            message: {
                let m = e.to_string();
                m.rfind(" at line ")
                    .map_or(m.clone(), |i| m[..i].to_string())
            },
        })
    }

    /// Reads `path`; a relative catalogue path is taken relative to the
    /// config file.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = read_file(path)?;
        let mut c =
            RunConfig::parse(&path.display().to_string(), &text).map_err(ConfigError::Format)?;
        if let (Some(cat), Some(dir)) = (&c.catalogue, path.parent()) {
            if cat.is_relative() {
                c.catalogue = Some(dir.join(cat));
            }
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.p < 2 {
            return bad(format!("p must be at least 2, got {}", self.p));
        }
        GeometryKind::from(self.geometry)
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let b = &self.budgets;
        if b.subset_search == 0 || b.tuple == 0 || b.matching == 0 {
            return bad("budgets must be positive".into());
        }
        if self.exhaustive_limit == 0 || self.exhaustive_limit > HARD_LIMIT {
            return bad(format!("exhaustive_limit must lie in 1..={HARD_LIMIT}"));
        }
        Ok(())
    }

    pub fn geometry(&self) -> GeometryKind {
        self.geometry.into()
    }

    /// The seed of a randomized command; such commands refuse to run
    /// without one.
    pub fn require_seed(&self, command: &str) -> Result<u64, ConfigError> {
        self.seed.ok_or_else(|| {
            ConfigError::Invalid(format!(
                "`{command}` is randomized and needs a seed (--seed or \"seed\")"
            ))
        })
    }

    pub fn search(&self) -> SearchOptions {
        SearchOptions {
            mode: SearchMode::Exact,
            exhaustive_limit: self.exhaustive_limit,
            violation_bound: self.budgets.subset_search,
        }
    }

    /// SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }

    /// The catalogue for structures with this `p` and geometry, and the
    /// text it was read from.
    pub fn catalogue(
        &self,
        p: u32,
        geom: &GeometryKind,
    ) -> Result<(Catalogue, Option<String>), ConfigError> {
        match &self.catalogue {
            Some(path) => {
                let text = read_file(path)?;
                let cat = parse_catalogue(&path.display().to_string(), &text)
                    .map_err(ConfigError::Format)?;
                Ok((cat, Some(text)))
            }
            None if geom.is_linear() => Ok((Catalogue::lines(p), None)),
            None => Ok((Catalogue::powers(p), None)),
        }
    }

    pub fn mu_spec(&self, cat: &Catalogue, p: u32) -> Result<MuSpec, ConfigError> {
        let invalid = |e: collapse_core::Error| ConfigError::Invalid(e.to_string());
        let mut spec = MuSpec::new(cat, p).map_err(invalid)?;
        for (name, v) in &self.mu_star {
            spec = spec.with_mu_star(cat, name, *v).map_err(invalid)?;
        }
        Ok(spec)
    }
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}
