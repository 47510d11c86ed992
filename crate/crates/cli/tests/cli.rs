use std::path::Path;
use std::process::{Command, Output};

use processkit_testkit::{fixture_a_dir, fixture_a_metamodel_path, fixture_a_model_path};

fn processkit(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_processkit"))
        .args(args)
        .current_dir(cwd)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn mm() -> String {
    fixture_a_metamodel_path().display().to_string()
}

fn model() -> String {
    fixture_a_model_path().display().to_string()
}

#[test]
fn validate_accepts_the_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = processkit(&["validate", "--metamodel", &mm(), "--model", &model()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("ok (5 types, 3 associations, 13 routes)"), "{text}");
    assert!(text.contains("ok (bund 2.4, 6 elements)"), "{text}");
}

#[test]
fn convention_findings_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    // Tool is not an endpoint yet is the source of an association.
    let text = "name: broken\ntypes:\n  Tool:\n    id: string public\n    name: string public\n  Vendor [endpoint]:\n    id: string public\n    name: string public\nassociations:\n  Tool aggregation(Makers, many) Vendor\n";
    std::fs::write(dir.path().join("broken.mm"), text).unwrap();
    let out = processkit(&["validate", "--metamodel", "broken.mm"], dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(!stdout(&out).is_empty(), "findings are listed");
}

#[test]
fn usage_and_io_errors_have_their_own_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(processkit(&["validate"], dir.path()).status.code(), Some(2));
    assert_eq!(processkit(&["export", "pdf", "--metamodel", &mm(), "--model", &model()], dir.path()).status.code(), Some(2));
    assert_eq!(processkit(&["validate", "--metamodel", "missing.mm"], dir.path()).status.code(), Some(3));
}

#[test]
fn openapi_is_written_in_the_requested_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = processkit(&["openapi", "--metamodel", &mm(), "--model", &model(), "--out", "api.yaml"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let yaml = std::fs::read_to_string(dir.path().join("api.yaml")).unwrap();
    assert!(yaml.contains("/api/discipline/{disciplineId}/workproduct:"));
    assert!(yaml.contains("projectType"));

    let out = processkit(&["openapi", "--metamodel", &mm(), "--out", "api.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("api.json")).unwrap()).unwrap();
    assert!(json["paths"]["/api/methodreference/{methodreferenceId}/bibitemref"].is_object());
}

#[test]
fn ingest_writes_into_the_store_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = processkit(&["ingest", "--metamodel", &mm(), "--model", &model(), "--out", "store"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let written = std::fs::read_to_string(dir.path().join("store/bund/2.4.xml")).unwrap();
    assert!(written.contains("Risk List"));
}

#[test]
fn export_writes_a_named_archive() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("maint.json"), r#"{"name": "m", "selections": {"projectType": "maint"}}"#).unwrap();
    let out = processkit(
        &["export", "doc-templates", "--metamodel", &mm(), "--model", &model(), "--profile", "maint.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = std::fs::read(dir.path().join("bund-2.4-doc-templates.zip")).unwrap();
    let mut archive = zip::ZipArchive::new(std::io::Cursor::new(bytes)).unwrap();
    let names: Vec<String> = (0..archive.len())
        .map(|i| archive.by_index(i).unwrap().name().unwrap().into_owned())
        .collect();
    assert_eq!(names, ["manifest.json", "templates/wp2.md"]);
    let manifest: serde_json::Value = serde_json::from_reader(archive.by_name("manifest.json").unwrap()).unwrap();
    assert_eq!(manifest["generated_at"], 1_700_000_000);

    // A profile naming an unknown value is an input error.
    std::fs::write(dir.path().join("bad.json"), r#"{"name": "x", "selections": {"projectType": "web"}}"#).unwrap();
    let out = processkit(
        &["export", "process-doc", "--metamodel", &mm(), "--model", &model(), "--profile", "bad.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(fixture_a_dir().join("assets/logo.png").exists());
}
