use std::collections::BTreeSet;
use std::path::{Component, Path, PathBuf};

use processkit_core::export::{generate, ExportBundle, ExportError, ExportKind, ProjectPlan, PLAN_FILE};
use processkit_core::model::NoAssets;
use processkit_core::{ingest_model, parse_metamodel, Metamodel, ModelSnapshot, TailoringProfile};
use processkit_testkit::{generate as generate_model, profiles, Model};

fn load(model: &Model) -> (Metamodel, ModelSnapshot) {
    let mm = parse_metamodel(&model.metamodel_text()).unwrap();
    let snap = ingest_model(&mm, model.model_xml().as_bytes(), &model.variant, &model.version, &NoAssets).unwrap();
    (mm, snap)
}

fn to_profile(p: &processkit_testkit::Profile) -> TailoringProfile {
    p.iter()
        .fold(TailoringProfile::empty(), |acc, (k, v)| acc.with(k.clone(), v.clone()))
}

/// Values of `attr="..."` occurrences in an HTML page.
fn attr_values<'a>(html: &'a str, attr: &str) -> Vec<&'a str> {
    let needle = format!("{attr}=\"");
    html.match_indices(&needle)
        .filter_map(|(at, _)| {
            let start = at + needle.len();
            html[start..].find('"').map(|len| &html[start..start + len])
        })
        .collect()
}

fn normalize(path: &Path) -> PathBuf {
    let mut out = PathBuf::new();
    for c in path.components() {
        match c {
            Component::ParentDir => {
                out.pop();
            }
            Component::CurDir => {}
            other => out.push(other),
        }
    }
    out
}

fn check_links(bundle: &ExportBundle) {
    for (path, bytes) in &bundle.files {
        let html = std::str::from_utf8(bytes).unwrap();
        let dir = Path::new(path).parent().unwrap_or(Path::new(""));
        for href in attr_values(html, "href") {
            let target = normalize(&dir.join(href));
            assert!(
                bundle.files.contains_key(target.to_str().unwrap()),
                "{path} links to missing {href}"
            );
        }
    }
}

fn doc_ids(bundle: &ExportBundle) -> BTreeSet<String> {
    bundle
        .files
        .values()
        .flat_map(|b| attr_values(std::str::from_utf8(b).unwrap(), "id").into_iter().map(str::to_owned).collect::<Vec<_>>())
        .collect()
}

#[test]
fn bundles_agree_with_the_api_on_random_models() {
    for seed in 0..60 {
        let model = generate_model(seed);
        let (mm, snap) = load(&model);
        for p in profiles(&model, seed, 4) {
            let profile = to_profile(&p);
            let reachable = model.reachable_ids(&p);
            let of_role = |pred: fn(&processkit_testkit::Type) -> bool| -> BTreeSet<String> {
                reachable
                    .iter()
                    .filter(|id| pred(model.ty(&model.element(id).unwrap().type_name)))
                    .cloned()
                    .collect()
            };

            let doc = generate(ExportKind::ProcessDoc, &snap, &mm, &profile, 0).unwrap();
            check_links(&doc);
            assert_eq!(doc_ids(&doc), reachable, "seed {seed} {p:?}");

            match generate(ExportKind::DocTemplates, &snap, &mm, &profile, 0) {
                Ok(templates) => {
                    let ids: BTreeSet<String> = templates
                        .files
                        .keys()
                        .map(|k| k.trim_start_matches("templates/").trim_end_matches(".md").to_owned())
                        .collect();
                    assert_eq!(ids, of_role(|t| t.work_product), "seed {seed}");
                }
                Err(ExportError::Unsupported { .. }) => {
                    assert!(model.types.iter().all(|t| !t.work_product));
                }
            }

            let plan = generate(ExportKind::ProjectPlan, &snap, &mm, &profile, 0).unwrap();
            let plan: ProjectPlan = serde_json::from_slice(&plan.files[PLAN_FILE]).unwrap();
            let ids: BTreeSet<String> = plan.flatten().iter().map(|e| e.id.clone()).collect();
            assert_eq!(ids, of_role(|t| t.plan), "seed {seed}");
        }
    }
}

#[test]
fn bundles_are_deterministic_except_for_the_timestamp() {
    let model = generate_model(11);
    let (mm, snap) = load(&model);
    for kind in ExportKind::ALL {
        let Ok(a) = generate(kind, &snap, &mm, &TailoringProfile::empty(), 1) else {
            continue;
        };
        let b = generate(kind, &snap, &mm, &TailoringProfile::empty(), 2).unwrap();
        assert_eq!(a.files, b.files);
        let mut c = b.clone();
        c.manifest.generated_at = 1;
        assert_eq!(a.to_zip(), c.to_zip());
        assert_ne!(a.to_zip(), b.to_zip());
    }
}

#[test]
fn empty_models() {
    let mm = parse_metamodel(
        "types:\n  A [endpoint, work-product, plan]:\n    id: string public\n    name: string public\n",
    )
    .unwrap();
    let snap = ingest_model(&mm, b"<ProcessModel variant=\"v\" version=\"1\"/>", "v", "1", &NoAssets).unwrap();
    let empty = TailoringProfile::empty();
    let doc = generate(ExportKind::ProcessDoc, &snap, &mm, &empty, 0).unwrap();
    assert_eq!(doc.files.keys().collect::<Vec<_>>(), ["index.html"]);
    let templates = generate(ExportKind::DocTemplates, &snap, &mm, &empty, 0).unwrap();
    assert!(templates.files.is_empty());
    assert!(!templates.to_zip().is_empty());
    let plan = generate(ExportKind::ProjectPlan, &snap, &mm, &empty, 0).unwrap();
    let plan: ProjectPlan = serde_json::from_slice(&plan.files[PLAN_FILE]).unwrap();
    assert!(plan.entries.is_empty());
}
