use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;

use processkit_core::metamodel::ValidationReport;
use processkit_core::model::{DirAssets, ModelStore, StoreError};
use processkit_core::{parse_metamodel, validate_conventions, Metamodel};

use crate::service::{Service, ServiceError};

/// Server configuration, read from TOML:
///
/// ```toml
/// listen = "127.0.0.1:8080"
/// default_variant = "bund"
/// metamodel = "fixture-a.mm"
/// store_dir = "store"          # optional; persists published snapshots
///
/// [[models]]
/// path = "fixture-a.xml"
/// variant = "bund"
/// version = "2.4"
/// assets = "."                 # optional; defaults to the model's directory
/// ```
///
/// Relative paths are resolved against the directory of the config file.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_listen")]
    pub listen: String,
    pub default_variant: String,
    pub metamodel: PathBuf,
    #[serde(default)]
    pub store_dir: Option<PathBuf>,
    #[serde(default)]
    pub models: Vec<ModelSource>,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSource {
    pub path: PathBuf,
    pub variant: String,
    pub version: String,
    #[serde(default)]
    pub assets: Option<PathBuf>,
}

fn default_listen() -> String {
    "127.0.0.1:8080".into()
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Syntax {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("{path}: {source}")]
    Metamodel {
        path: PathBuf,
        #[source]
        source: processkit_core::metamodel::MetamodelError,
    },
    #[error("{path}: metamodel violates {} modelling convention(s); run `processkit validate`", .report.findings.len())]
    Conventions { path: PathBuf, report: ValidationReport },
    #[error("{path}: {source}")]
    Model {
        path: PathBuf,
        #[source]
        source: StoreError,
    },
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Service(#[from] ServiceError),
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut config: Config = toml::from_str(&text).map_err(|source| ConfigError::Syntax {
            path: path.to_owned(),
            source,
        })?;
        config.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        join(&mut self.metamodel);
        if let Some(dir) = &mut self.store_dir {
            join(dir);
        }
        for model in &mut self.models {
            join(&mut model.path);
            if let Some(assets) = &mut model.assets {
                join(assets);
            }
        }
    }

    /// Reads the metamodel, refusing one that breaks the conventions.
    pub fn load_metamodel(&self) -> Result<Metamodel, ConfigError> {
        let text = std::fs::read_to_string(&self.metamodel).map_err(|source| ConfigError::Io {
            path: self.metamodel.clone(),
            source,
        })?;
        let mm = parse_metamodel(&text).map_err(|source| ConfigError::Metamodel {
            path: self.metamodel.clone(),
            source,
        })?;
        let report = validate_conventions(&mm);
        if !report.is_clean() {
            return Err(ConfigError::Conventions {
                path: self.metamodel.clone(),
                report,
            });
        }
        Ok(mm)
    }

    /// Loads the metamodel, ingests every configured model and returns the
    /// ready service.
    pub fn build_service(&self) -> Result<Service, ConfigError> {
        let mm = self.load_metamodel()?;
        let store = match &self.store_dir {
            Some(dir) => ModelStore::open(&mm, dir)?,
            None => ModelStore::new(),
        };
        for model in &self.models {
            let bytes = std::fs::read(&model.path).map_err(|source| ConfigError::Io {
                path: model.path.clone(),
                source,
            })?;
            let assets_dir = model
                .assets
                .clone()
                .or_else(|| model.path.parent().map(Path::to_owned))
                .unwrap_or_default();
            store
                .ingest(&mm, &bytes, &model.variant, &model.version, &DirAssets(assets_dir))
                .map_err(|source| ConfigError::Model {
                    path: model.path.clone(),
                    source,
                })?;
        }
        Ok(Service::new(mm, Arc::new(store), &self.default_variant)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_paths_follow_the_config_file() {
        let mut config: Config = toml::from_str(
            "default_variant = \"bund\"\nmetamodel = \"mm.mm\"\n[[models]]\npath = \"m.xml\"\nvariant = \"bund\"\nversion = \"1\"\n",
        )
        .unwrap();
        config.resolve_paths(Path::new("/etc/pk"));
        assert_eq!(config.listen, "127.0.0.1:8080");
        assert_eq!(config.metamodel, Path::new("/etc/pk/mm.mm"));
        assert_eq!(config.models[0].path, Path::new("/etc/pk/m.xml"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<Config>("default_variant = \"a\"\nmetamodel = \"x\"\nport = 1\n").is_err());
    }
}
