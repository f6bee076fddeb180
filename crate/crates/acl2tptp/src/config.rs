//! Run configuration: a TOML file merged with command-line overrides
//! (flags win). The `ACL2TPTP_CONFIG` environment variable names the
//! default config file.

use serde::Deserialize;
use std::path::{Path, PathBuf};

pub const CONFIG_ENV: &str = "ACL2TPTP_CONFIG";

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Directory the manifest's dump paths are relative to.
    pub corpus_root: Option<PathBuf>,
    /// Manifest listing dump files in chronological order.
    pub manifest: Option<PathBuf>,
    /// Proof-supporters deps file.
    pub deps: Option<PathBuf>,
    /// Run directory all outputs go under.
    pub out: Option<PathBuf>,
    /// k-NN neighbor count.
    pub k: Option<usize>,
    /// Advice length.
    pub n: Option<usize>,
    /// Prover stanza file for `bench`.
    pub provers: Option<PathBuf>,
    /// Concurrent prover runs.
    pub workers: Option<usize>,
    /// Restrict learning/problem generation to one book category.
    pub category: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), source: e })?;
        toml::from_str(&text)
            .map_err(|e| ConfigError::Parse { path: path.display().to_string(), message: e.to_string() })
    }

    /// The config named by `--config`, else by `ACL2TPTP_CONFIG`, else empty.
    pub fn load_default(explicit: Option<&Path>) -> Result<RunConfig, ConfigError> {
        match explicit {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) => Self::load(Path::new(&p)),
                None => Ok(RunConfig::default()),
            },
        }
    }

    /// Overlay `other` (typically CLI flags) on top of `self`; set fields win.
    pub fn merged_with(mut self, other: RunConfig) -> RunConfig {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if other.$field.is_some() { self.$field = other.$field; })*
            };
        }
        take!(corpus_root, manifest, deps, out, k, n, provers, workers, category);
        self
    }

    pub fn manifest_required(&self) -> Result<&Path, ConfigError> {
        self.manifest
            .as_deref()
            .ok_or_else(|| ConfigError::Invalid("a manifest path is required (--manifest)".into()))
    }

    pub fn deps_required(&self) -> Result<&Path, ConfigError> {
        self.deps
            .as_deref()
            .ok_or_else(|| ConfigError::Invalid("a deps path is required (--deps)".into()))
    }

    pub fn provers_required(&self) -> Result<&Path, ConfigError> {
        self.provers
            .as_deref()
            .ok_or_else(|| ConfigError::Invalid("a prover config is required (--provers)".into()))
    }

    /// Root the manifest entries resolve against: explicit corpus_root, or
    /// the manifest's own directory.
    pub fn effective_corpus_root(&self) -> Result<PathBuf, ConfigError> {
        if let Some(root) = &self.corpus_root {
            return Ok(root.clone());
        }
        let manifest = self.manifest_required()?;
        Ok(manifest.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(".")))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("run"))
    }

    pub fn knn(&self) -> crate::learn::KnnConfig {
        let default = crate::learn::KnnConfig::default();
        crate::learn::KnnConfig {
            k: self.k.unwrap_or(default.k),
            n: self.n.unwrap_or(default.n),
            tie_break: default.tie_break,
        }
    }

    pub fn workers_or_default(&self) -> usize {
        self.workers.unwrap_or(4)
    }

    /// Check the invariants the spec pins: referenced paths exist and the
    /// numeric knobs are at least 1.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (label, value) in [("k", self.k), ("n", self.n), ("workers", self.workers)] {
            if value == Some(0) {
                return Err(ConfigError::Invalid(format!("{label} must be at least 1")));
            }
        }
        for (label, path) in [
            ("manifest", &self.manifest),
            ("deps", &self.deps),
            ("provers", &self.provers),
        ] {
            if let Some(p) = path {
                if !p.is_file() {
                    return Err(ConfigError::Invalid(format!(
                        "{label} file `{}` does not exist",
                        p.display()
                    )));
                }
            }
        }
        if let Some(root) = &self.corpus_root {
            if !root.is_dir() {
                return Err(ConfigError::Invalid(format!(
                    "corpus_root `{}` is not a directory",
                    root.display()
                )));
            }
        }
        Ok(())
    }
}
