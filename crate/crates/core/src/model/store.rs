use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use super::{ingest_model, serialize_model, AssetSource, IngestError, ModelSnapshot, NoAssets};
use crate::metamodel::Metamodel;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("unknown variant `{0}`")]
    UnknownVariant(String),
    #[error("variant `{variant}` has no version `{version}`")]
    UnknownVersion { variant: String, version: String },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Load {
        path: PathBuf,
        #[source]
        source: IngestError,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VersionSelector {
    Latest,
    Exact(String),
}

impl FromStr for VersionSelector {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(if s == "latest" {
            VersionSelector::Latest
        } else {
            VersionSelector::Exact(s.to_owned())
        })
    }
}

impl fmt::Display for VersionSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VersionSelector::Latest => f.write_str("latest"),
            VersionSelector::Exact(v) => f.write_str(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariantVersions {
    pub variant: String,
    pub versions: Vec<String>,
}

type Catalog = BTreeMap<String, BTreeMap<String, Arc<ModelSnapshot>>>;

/// In-process snapshot store. Publication swaps a whole snapshot under the
/// write lock, so readers hold either the previous or the new `Arc`.
#[derive(Default)]
pub struct ModelStore {
    catalog: RwLock<Catalog>,
    directory: Option<PathBuf>,
}

impl ModelStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Store that also writes every published snapshot to
    /// `{dir}/{variant}/{version}.xml`.
    pub fn persistent(dir: impl Into<PathBuf>) -> Self {
        Self {
            catalog: RwLock::default(),
            directory: Some(dir.into()),
        }
    }

    /// Opens a persistent store and loads every snapshot file found in it.
    pub fn open(mm: &Metamodel, dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let store = Self::persistent(dir);
        let root = store.directory.clone().expect("persistent store");
        let io_err = |path: &Path, source| StoreError::Io {
            path: path.to_owned(),
            source,
        };
        if !root.exists() {
            return Ok(store);
        }
        let mut files = Vec::new();
        for variant_dir in std::fs::read_dir(&root).map_err(|e| io_err(&root, e))? {
            let variant_dir = variant_dir.map_err(|e| io_err(&root, e))?.path();
            if !variant_dir.is_dir() {
                continue;
            }
            for file in std::fs::read_dir(&variant_dir).map_err(|e| io_err(&variant_dir, e))? {
                let path = file.map_err(|e| io_err(&variant_dir, e))?.path();
                if path.extension().is_some_and(|e| e == "xml") {
                    files.push(path);
                }
            }
        }
        files.sort();
        for path in files {
            let variant = path
                .parent()
                .and_then(Path::file_name)
                .and_then(|n| n.to_str())
                .unwrap_or_default()
                .to_owned();
            let version = path
                .file_stem()
                .and_then(|n| n.to_str())
                .unwrap_or_default()
                .to_owned();
            let bytes = std::fs::read(&path).map_err(|e| io_err(&path, e))?;
            let snapshot = ingest_model(mm, &bytes, &variant, &version, &NoAssets)
                .map_err(|source| StoreError::Load {
                    path: path.clone(),
                    source,
                })?;
            store.insert(snapshot);
        }
        Ok(store)
    }

    /// Ingests an instance document and publishes the resulting snapshot.
    pub fn ingest(
        &self,
        mm: &Metamodel,
        document: &[u8],
        variant: &str,
        version: &str,
        assets: &dyn AssetSource,
    ) -> Result<Arc<ModelSnapshot>, StoreError> {
        let snapshot = ingest_model(mm, document, variant, version, assets)?;
        self.publish(snapshot)
    }

    /// Publishes a snapshot, replacing any previous one with the same
    /// variant and version.
    pub fn publish(&self, snapshot: ModelSnapshot) -> Result<Arc<ModelSnapshot>, StoreError> {
        if let Some(path) = self.snapshot_path(&snapshot.variant, &snapshot.version) {
            write_atomically(&path, serialize_model(&snapshot).as_bytes())
                .map_err(|source| StoreError::Io { path, source })?;
        }
        Ok(self.insert(snapshot))
    }

    fn insert(&self, snapshot: ModelSnapshot) -> Arc<ModelSnapshot> {
        let snapshot = Arc::new(snapshot);
        let mut catalog = self.catalog.write().unwrap_or_else(|e| e.into_inner());
        catalog
            .entry(snapshot.variant.clone())
            .or_default()
            .insert(snapshot.version.clone(), Arc::clone(&snapshot));
        snapshot
    }

    pub fn snapshot_path(&self, variant: &str, version: &str) -> Option<PathBuf> {
        self.directory
            .as_ref()
            .map(|d| d.join(variant).join(format!("{version}.xml")))
    }

    /// Looks up a snapshot. `Latest` picks the lexicographically greatest
    /// version of the variant.
    pub fn get_snapshot(
        &self,
        variant: &str,
        version: &VersionSelector,
    ) -> Result<Arc<ModelSnapshot>, StoreError> {
        let catalog = self.catalog.read().unwrap_or_else(|e| e.into_inner());
        let versions = catalog
            .get(variant)
            .ok_or_else(|| StoreError::UnknownVariant(variant.to_owned()))?;
        let found = match version {
            VersionSelector::Latest => versions.values().next_back(),
            VersionSelector::Exact(v) => versions.get(v),
        };
        found.cloned().ok_or_else(|| StoreError::UnknownVersion {
            variant: variant.to_owned(),
            version: version.to_string(),
        })
    }

    pub fn has_variant(&self, variant: &str) -> bool {
        self.catalog
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .contains_key(variant)
    }

    pub fn list_variants(&self) -> Vec<VariantVersions> {
        let catalog = self.catalog.read().unwrap_or_else(|e| e.into_inner());
        catalog
            .iter()
            .map(|(variant, versions)| VariantVersions {
                variant: variant.clone(),
                versions: versions.keys().cloned().collect(),
            })
            .collect()
    }
}

fn write_atomically(path: &Path, bytes: &[u8]) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("xml.tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}
