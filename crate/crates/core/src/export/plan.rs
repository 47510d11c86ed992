use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{reachable, ExportBundle, ExportKind};
use crate::metamodel::{Metamodel, TypeRole};
use crate::model::{ModelSnapshot, ProcessElement};
use crate::tailoring::{tailor, TailoringProfile};

pub const PLAN_FILE: &str = "project-plan.json";

/// Skeleton a planning tool can import. Not a schedule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectPlan {
    pub variant: String,
    pub version: String,
    pub entries: Vec<PlanEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEntry {
    pub id: String,
    #[serde(rename = "type")]
    pub type_name: String,
    pub name: String,
    /// Nearest plan-role composition ancestor.
    pub parent: Option<String>,
    pub entries: Vec<PlanEntry>,
}

impl ProjectPlan {
    /// Every entry, depth first.
    pub fn flatten(&self) -> Vec<&PlanEntry> {
        fn walk<'a>(entries: &'a [PlanEntry], out: &mut Vec<&'a PlanEntry>) {
            for e in entries {
                out.push(e);
                walk(&e.entries, out);
            }
        }
        let mut out = Vec::new();
        walk(&self.entries, &mut out);
        out
    }
}

/// Builds the plan tree of the tailored process: elements of plan-role types
/// in model order, each nested below its nearest plan-role ancestor along the
/// composition chain.
pub fn build_project_plan(snapshot: &ModelSnapshot, mm: &Metamodel, profile: &TailoringProfile) -> ProjectPlan {
    let tailored = tailor(snapshot, profile);
    let is_plan = |e: &ProcessElement| {
        mm.element_type(&e.type_name)
            .is_some_and(|t| t.has_role(TypeRole::Plan))
    };
    let planned: Vec<&ProcessElement> = reachable(&tailored, mm).into_iter().filter(|e| is_plan(e)).collect();
    let in_plan: HashSet<&str> = planned.iter().map(|e| e.id.as_str()).collect();

    let plan_parent = |element: &ProcessElement| -> Option<String> {
        let mut current = tailored.parent(&element.id);
        while let Some(p) = current {
            if in_plan.contains(p.id.as_str()) {
                return Some(p.id.clone());
            }
            current = tailored.parent(&p.id);
        }
        None
    };

    let mut by_parent: HashMap<Option<String>, Vec<&ProcessElement>> = HashMap::new();
    for element in &planned {
        by_parent.entry(plan_parent(element)).or_default().push(element);
    }

    fn build(parent: Option<String>, by_parent: &HashMap<Option<String>, Vec<&ProcessElement>>) -> Vec<PlanEntry> {
        by_parent
            .get(&parent)
            .map(|children| {
                children
                    .iter()
                    .map(|e| PlanEntry {
                        id: e.id.clone(),
                        type_name: e.type_name.clone(),
                        name: e.name().to_owned(),
                        parent: parent.clone(),
                        entries: build(Some(e.id.clone()), by_parent),
                    })
                    .collect()
            })
            .unwrap_or_default()
    }

    ProjectPlan {
        variant: snapshot.variant().to_owned(),
        version: snapshot.version().to_owned(),
        entries: build(None, &by_parent),
    }
}

pub fn generate_project_plan(
    snapshot: &ModelSnapshot,
    mm: &Metamodel,
    profile: &TailoringProfile,
    generated_at: u64,
) -> ExportBundle {
    let plan = build_project_plan(snapshot, mm, profile);
    let mut json = serde_json::to_vec_pretty(&plan).expect("plan serializes");
    json.push(b'\n');
    let mut bundle = ExportBundle::new(ExportKind::ProjectPlan, snapshot, profile, generated_at);
    bundle.files.insert(PLAN_FILE.into(), json);
    bundle
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::fixture_a;

    fn ids(entries: &[PlanEntry]) -> Vec<&str> {
        entries.iter().map(|e| e.id.as_str()).collect()
    }

    #[test]
    fn discipline_with_work_products() {
        let (mm, snap) = fixture_a();
        let plan = build_project_plan(&snap, &mm, &TailoringProfile::empty());
        assert_eq!(ids(&plan.entries), ["d1"]);
        let d1 = &plan.entries[0];
        assert_eq!(d1.parent, None);
        assert_eq!(d1.name, "Planning");
        assert_eq!(ids(&d1.entries), ["wp1", "wp2"]);
        assert!(d1.entries.iter().all(|e| e.parent.as_deref() == Some("d1")));
    }

    #[test]
    fn tailored_out_entries_vanish() {
        let (mm, snap) = fixture_a();
        let plan = build_project_plan(&snap, &mm, &TailoringProfile::empty().with("projectType", "maint"));
        assert_eq!(ids(&plan.entries[0].entries), ["wp2"]);
    }

    #[test]
    fn file_is_parseable() {
        let (mm, snap) = fixture_a();
        let bundle = generate_project_plan(&snap, &mm, &TailoringProfile::empty(), 0);
        let plan: ProjectPlan = serde_json::from_slice(&bundle.files[PLAN_FILE]).unwrap();
        assert_eq!(plan.flatten().len(), 3);
        assert_eq!(plan.variant, "bund");
    }
}
