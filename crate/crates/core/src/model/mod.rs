//! Process model instances: validated, immutable snapshots of one
//! (variant, version) of a process line.

mod ingest;
mod serialize;
mod store;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use indexmap::IndexMap;

pub use ingest::{declared_identity, ingest_model, AssetSource, DirAssets, IngestError, NoAssets};
pub use serialize::serialize_model;
pub use store::{ModelStore, StoreError, VariantVersions, VersionSelector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectCharacteristic {
    pub key: String,
    pub label: String,
    pub values: Vec<String>,
}

impl ProjectCharacteristic {
    pub fn declares(&self, value: &str) -> bool {
        self.values.iter().any(|v| v == value)
    }
}

/// Accepted values per characteristic key. An element with a condition is
/// part of a tailored process only if every clause admits the selection.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ApplicabilityCondition {
    pub clauses: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessElement {
    pub type_name: String,
    pub id: String,
    pub attribute_values: BTreeMap<String, String>,
    /// Composition route segment -> composed element ids, in order.
    pub children: BTreeMap<String, Vec<String>>,
    /// Aggregation/directed route segment -> referenced element ids, in order.
    pub references: BTreeMap<String, Vec<String>>,
    pub applicability: Option<ApplicabilityCondition>,
}

impl ProcessElement {
    pub fn attribute(&self, name: &str) -> Option<&str> {
        self.attribute_values.get(name).map(String::as_str)
    }

    pub fn name(&self) -> &str {
        self.attribute("name").unwrap_or_default()
    }

    /// Targets of the association identified by its route segment.
    pub fn targets(&self, segment: &str) -> &[String] {
        self.children
            .get(segment)
            .or_else(|| self.references.get(segment))
            .map(Vec::as_slice)
            .unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Asset {
    pub media_type: String,
    pub bytes: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSnapshot {
    pub(crate) variant: String,
    pub(crate) version: String,
    /// Elements in document order.
    pub(crate) elements: IndexMap<String, ProcessElement>,
    pub(crate) characteristics: Vec<ProjectCharacteristic>,
    pub(crate) assets: BTreeMap<String, Asset>,
    /// Child id -> composition parent id.
    pub(crate) parents: HashMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown asset `{0}`")]
pub struct UnknownAsset(pub String);

impl ModelSnapshot {
    pub fn variant(&self) -> &str {
        &self.variant
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn elements(&self) -> impl ExactSizeIterator<Item = &ProcessElement> {
        self.elements.values()
    }

    pub fn element(&self, id: &str) -> Option<&ProcessElement> {
        self.elements.get(id)
    }

    pub fn elements_of_type<'a>(
        &'a self,
        type_name: &'a str,
    ) -> impl Iterator<Item = &'a ProcessElement> {
        self.elements
            .values()
            .filter(move |e| e.type_name == type_name)
    }

    pub fn characteristics(&self) -> &[ProjectCharacteristic] {
        &self.characteristics
    }

    pub fn characteristic(&self, key: &str) -> Option<&ProjectCharacteristic> {
        self.characteristics.iter().find(|c| c.key == key)
    }

    pub fn assets(&self) -> &BTreeMap<String, Asset> {
        &self.assets
    }

    /// Composition parent of an element.
    pub fn parent(&self, id: &str) -> Option<&ProcessElement> {
        self.parents.get(id).and_then(|p| self.elements.get(p))
    }

    pub fn get_binary(&self, asset_id: &str) -> Result<&Asset, UnknownAsset> {
        self.assets
            .get(asset_id)
            .ok_or_else(|| UnknownAsset(asset_id.to_owned()))
    }

    /// Copy restricted to the elements accepted by `keep`. Links to dropped
    /// elements are pruned. `keep` must be closed under composition parents
    /// for the result to remain a forest.
    pub(crate) fn retain(&self, keep: impl Fn(&ProcessElement) -> bool) -> ModelSnapshot {
        let kept: HashMap<&str, bool> = self
            .elements
            .values()
            .map(|e| (e.id.as_str(), keep(e)))
            .collect();
        let alive = |id: &String| kept.get(id.as_str()).copied().unwrap_or(false);
        let prune = |links: &BTreeMap<String, Vec<String>>| {
            links
                .iter()
                .map(|(k, ids)| (k.clone(), ids.iter().filter(|i| alive(i)).cloned().collect()))
                .collect()
        };
        let elements: IndexMap<String, ProcessElement> = self
            .elements
            .values()
            .filter(|e| alive(&e.id))
            .map(|e| {
                let mut e2 = e.clone();
                e2.children = prune(&e.children);
                e2.references = prune(&e.references);
                (e.id.clone(), e2)
            })
            .collect();
        let parents = self
            .parents
            .iter()
            .filter(|(child, parent)| alive(child) && alive(parent))
            .map(|(c, p)| (c.clone(), p.clone()))
            .collect();
        ModelSnapshot {
            variant: self.variant.clone(),
            version: self.version.clone(),
            elements,
            characteristics: self.characteristics.clone(),
            assets: self.assets.clone(),
            parents,
        }
    }
}
