//! Project-specific artifacts generated from a tailored snapshot.

mod plan;
mod process_doc;
mod templates;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Cursor, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::metamodel::Metamodel;
use crate::model::{ModelSnapshot, ProcessElement};
use crate::tailoring::TailoringProfile;

pub use plan::{build_project_plan, generate_project_plan, PlanEntry, ProjectPlan, PLAN_FILE};
pub use process_doc::{generate_process_doc, page_path, INDEX_PAGE};
pub use templates::generate_doc_templates;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExportKind {
    ProcessDoc,
    DocTemplates,
    ProjectPlan,
}

impl ExportKind {
    pub const ALL: [ExportKind; 3] = [
        ExportKind::ProcessDoc,
        ExportKind::DocTemplates,
        ExportKind::ProjectPlan,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExportKind::ProcessDoc => "process-doc",
            ExportKind::DocTemplates => "doc-templates",
            ExportKind::ProjectPlan => "project-plan",
        }
    }
}

impl fmt::Display for ExportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown export kind `{0}` (expected process-doc, doc-templates or project-plan)")]
pub struct UnknownExportKind(pub String);

impl FromStr for ExportKind {
    type Err = UnknownExportKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExportKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownExportKind(s.to_owned()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExportError {
    #[error("the metamodel declares no `{role}` type, so `{kind}` cannot be generated")]
    Unsupported { kind: ExportKind, role: &'static str },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: ExportKind,
    pub variant: String,
    pub version: String,
    /// Selections of the profile the bundle was tailored with.
    pub profile: BTreeMap<String, String>,
    /// Seconds since the Unix epoch.
    pub generated_at: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExportBundle {
    pub kind: ExportKind,
    /// Relative path -> content.
    pub files: BTreeMap<String, Vec<u8>>,
    pub manifest: Manifest,
}

impl ExportBundle {
    fn new(kind: ExportKind, snapshot: &ModelSnapshot, profile: &TailoringProfile, generated_at: u64) -> Self {
        Self {
            kind,
            files: BTreeMap::new(),
            manifest: Manifest {
                kind,
                variant: snapshot.variant().to_owned(),
                version: snapshot.version().to_owned(),
                profile: profile.selections().clone(),
                generated_at,
            },
        }
    }

    pub fn manifest_json(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(&self.manifest).expect("manifest serializes");
        bytes.push(b'\n');
        bytes
    }

    /// Zip archive with `manifest.json` and every file, in path order, with
    /// fixed entry timestamps.
    pub fn to_zip(&self) -> Vec<u8> {
        use zip::write::SimpleFileOptions;
        use zip::{CompressionMethod, DateTime, ZipWriter};

        let options = SimpleFileOptions::default()
            .compression_method(CompressionMethod::Stored)
            .last_modified_time(DateTime::default())
            .unix_permissions(0o644);
        let mut writer = ZipWriter::new(Cursor::new(Vec::new()));
        let manifest = self.manifest_json();
        let entries = std::iter::once((MANIFEST_FILE, manifest.as_slice()))
            .chain(self.files.iter().map(|(p, b)| (p.as_str(), b.as_slice())));
        for (path, bytes) in entries {
            writer
                .start_file(path, options)
                .and_then(|()| writer.write_all(bytes).map_err(Into::into))
                .expect("writing to memory cannot fail");
        }
        writer
            .finish()
            .expect("writing to memory cannot fail")
            .into_inner()
    }
}

/// Elements of a tailored snapshot the API can serve: every element of an
/// endpoint type plus everything such an element embeds or references.
pub(crate) fn reachable<'s>(snapshot: &'s ModelSnapshot, mm: &Metamodel) -> Vec<&'s ProcessElement> {
    let is_endpoint = |e: &ProcessElement| mm.element_type(&e.type_name).is_some_and(|t| t.is_endpoint);
    let mut linked = std::collections::HashSet::new();
    for e in snapshot.elements().filter(|e| is_endpoint(e)) {
        for ids in e.children.values().chain(e.references.values()) {
            linked.extend(ids.iter().map(String::as_str));
        }
    }
    snapshot
        .elements()
        .filter(|e| is_endpoint(e) || linked.contains(e.id.as_str()))
        .collect()
}

/// Dispatches to the generator for `kind`.
pub fn generate(
    kind: ExportKind,
    snapshot: &ModelSnapshot,
    mm: &Metamodel,
    profile: &TailoringProfile,
    generated_at: u64,
) -> Result<ExportBundle, ExportError> {
    match kind {
        ExportKind::ProcessDoc => Ok(generate_process_doc(snapshot, mm, profile, generated_at)),
        ExportKind::DocTemplates => generate_doc_templates(snapshot, mm, profile, generated_at),
        ExportKind::ProjectPlan => Ok(generate_project_plan(snapshot, mm, profile, generated_at)),
    }
}

/// Unix time for manifests; `SOURCE_DATE_EPOCH` overrides the clock.
pub fn timestamp_now() -> u64 {
    if let Some(epoch) = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse().ok())
    {
        return epoch;
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or_default()
}
