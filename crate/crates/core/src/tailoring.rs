//! Live tailoring: request parameters select characteristic values, and each
//! response only contains the elements applicable to that selection.

use std::collections::BTreeMap;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::model::{ModelSnapshot, ProcessElement};

/// Characteristic key -> selected value. The empty profile filters nothing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TailoringProfile {
    selections: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TailoringError {
    #[error("unknown tailoring characteristic `{0}`")]
    UnknownKey(String),
    #[error("value `{value}` is not declared for characteristic `{key}`")]
    UndeclaredValue { key: String, value: String },
    #[error("characteristic `{0}` selected more than once")]
    DuplicateKey(String),
}

impl TailoringProfile {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn selections(&self) -> &BTreeMap<String, String> {
        &self.selections
    }

    pub fn selection(&self, key: &str) -> Option<&str> {
        self.selections.get(key).map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.selections.is_empty()
    }

    /// Adds a selection without checking it against a snapshot.
    pub fn with(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.selections.insert(key.into(), value.into());
        self
    }
}

/// Builds a profile from request parameters, rejecting keys and values the
/// snapshot does not declare.
pub fn parse_profile<K, V>(
    snapshot: &ModelSnapshot,
    params: impl IntoIterator<Item = (K, V)>,
) -> Result<TailoringProfile, TailoringError>
where
    K: AsRef<str>,
    V: AsRef<str>,
{
    let mut selections = BTreeMap::new();
    for (key, value) in params {
        let (key, value) = (key.as_ref(), value.as_ref());
        let characteristic = snapshot
            .characteristic(key)
            .ok_or_else(|| TailoringError::UnknownKey(key.to_owned()))?;
        if !characteristic.declares(value) {
            return Err(TailoringError::UndeclaredValue {
                key: key.to_owned(),
                value: value.to_owned(),
            });
        }
        if selections.insert(key.to_owned(), value.to_owned()).is_some() {
            return Err(TailoringError::DuplicateKey(key.to_owned()));
        }
    }
    Ok(TailoringProfile { selections })
}

/// Conjunction across condition keys, disjunction within one key. Keys the
/// profile leaves unselected never exclude an element.
pub fn is_applicable(element: &ProcessElement, profile: &TailoringProfile) -> bool {
    let Some(condition) = &element.applicability else {
        return true;
    };
    condition
        .clauses
        .iter()
        .all(|(key, accepted)| match profile.selection(key) {
            None => true,
            Some(value) => accepted.contains(value),
        })
}

/// Whether an element belongs to the tailored process: it and all of its
/// composition ancestors must be applicable.
pub fn is_included(snapshot: &ModelSnapshot, element: &ProcessElement, profile: &TailoringProfile) -> bool {
    let mut current = Some(element);
    while let Some(e) = current {
        if !is_applicable(e, profile) {
            return false;
        }
        current = snapshot.parent(&e.id);
    }
    true
}

/// Materializes the tailored process as a snapshot of its own.
pub fn tailor(snapshot: &ModelSnapshot, profile: &TailoringProfile) -> ModelSnapshot {
    if profile.is_empty() {
        return snapshot.clone();
    }
    snapshot.retain(|e| is_included(snapshot, e, profile))
}

/// A profile as exchanged with the assistant and the CLI.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SavedProfile {
    pub name: String,
    #[serde(default)]
    pub selections: BTreeMap<String, String>,
}

impl SavedProfile {
    pub fn new(name: impl Into<String>, profile: &TailoringProfile) -> Self {
        Self {
            name: name.into(),
            selections: profile.selections.clone(),
        }
    }

    /// Checks the stored selections against a snapshot.
    pub fn to_profile(&self, snapshot: &ModelSnapshot) -> Result<TailoringProfile, TailoringError> {
        parse_profile(snapshot, &self.selections)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown profile `{0}`")]
pub struct UnknownProfile(pub String);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StoredProfile {
    pub id: String,
    pub name: String,
    pub selections: BTreeMap<String, String>,
}

/// Server-side profile store. Every save gets a fresh id; nothing is overwritten.
#[derive(Default)]
pub struct ProfileStore {
    profiles: RwLock<Vec<StoredProfile>>,
}

impl ProfileStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn save(&self, name: &str, profile: &TailoringProfile) -> String {
        let mut profiles = self.profiles.write().unwrap_or_else(|e| e.into_inner());
        let id = format!("p{}", profiles.len() + 1);
        profiles.push(StoredProfile {
            id: id.clone(),
            name: name.to_owned(),
            selections: profile.selections.clone(),
        });
        id
    }

    pub fn load(&self, id: &str) -> Result<TailoringProfile, UnknownProfile> {
        self.get(id).map(|p| TailoringProfile {
            selections: p.selections,
        })
    }

    pub fn get(&self, id: &str) -> Result<StoredProfile, UnknownProfile> {
        let profiles = self.profiles.read().unwrap_or_else(|e| e.into_inner());
        profiles
            .iter()
            .find(|p| p.id == id)
            .cloned()
            .ok_or_else(|| UnknownProfile(id.to_owned()))
    }

    pub fn list(&self) -> Vec<StoredProfile> {
        self.profiles.read().unwrap_or_else(|e| e.into_inner()).clone()
    }
}
