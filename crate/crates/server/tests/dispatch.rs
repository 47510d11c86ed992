use std::io::Cursor;
use std::sync::Arc;

use processkit_core::model::{DirAssets, ModelStore};
use processkit_core::parse_metamodel;
use processkit_server::{Request, Service, XML_MEDIA_TYPE, ZIP_MEDIA_TYPE};
use processkit_testkit::{fixture_a_dir, fixture_a_metamodel_path, fixture_a_model_path, Tree};

fn service() -> Service {
    let mm = parse_metamodel(&std::fs::read_to_string(fixture_a_metamodel_path()).unwrap()).unwrap();
    let store = ModelStore::new();
    let doc = std::fs::read(fixture_a_model_path()).unwrap();
    store
        .ingest(&mm, &doc, "bund", "2.4", &DirAssets(fixture_a_dir()))
        .unwrap();
    // An older release without wp2 and without the condition on wp1.
    let old = String::from_utf8(doc)
        .unwrap()
        .replace("version=\"2.4\"", "version=\"2.3\"")
        .replace("wp1 wp2", "wp1")
        .replace("    <Condition key=\"projectType\" values=\"dev\"/>\n", "");
    let old = cut_element(&old, "<WorkProduct id=\"wp2\"", "</WorkProduct>");
    store
        .ingest(&mm, old.as_bytes(), "bund", "2.3", &DirAssets(fixture_a_dir()))
        .unwrap();
    Service::new(mm, Arc::new(store), "bund").unwrap().with_clock(|| 42)
}

fn cut_element(doc: &str, start: &str, end: &str) -> String {
    let from = doc.find(start).unwrap();
    let to = from + doc[from..].find(end).unwrap() + end.len();
    format!("{}{}", &doc[..from], &doc[to..])
}

fn get(service: &Service, target: &str) -> (u16, String) {
    let response = service.dispatch(&Request::get(target));
    (response.status, response.body_text().to_owned())
}

fn tree(service: &Service, target: &str) -> Tree {
    let response = service.dispatch(&Request::get(target));
    assert_eq!(response.status, 200, "{target}: {}", response.body_text());
    assert_eq!(response.media_type, XML_MEDIA_TYPE);
    Tree::parse(response.body_text()).unwrap()
}

fn error_code(body: &str) -> String {
    let v: serde_json::Value = serde_json::from_str(body).unwrap();
    v["code"].as_str().unwrap().to_owned()
}

#[test]
fn health_and_variants() {
    let s = service();
    assert_eq!(get(&s, "/healthz"), (200, "ok\n".into()));
    let (status, body) = get(&s, "/variants");
    assert_eq!(status, 200);
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v, serde_json::json!([{ "variant": "bund", "versions": ["2.3", "2.4"] }]));
}

#[test]
fn live_tailoring() {
    let s = service();
    let ids = |q: &str| tree(&s, &format!("/api/discipline/d1/workproduct{q}")).ids().join(" ");
    assert_eq!(ids(""), "d1 wp1 wp2");
    assert_eq!(ids("?projectType=dev"), "d1 wp1 wp2");
    assert_eq!(ids("?projectType=maint"), "d1 wp2");
}

#[test]
fn errors_are_json_with_codes() {
    let s = service();
    for (target, status, code) in [
        ("/api/nosuchtype", 404, "unknown-route"),
        ("/api/discipline/zz", 404, "unknown-id"),
        ("/api/discipline/wp1", 404, "unknown-id"),
        ("/api/workproduct/wp1?projectType=maint", 404, "filtered"),
        ("/api/workproduct?projectType=web", 400, "invalid-parameter"),
        ("/api/workproduct?size=large", 400, "invalid-parameter"),
        ("/api/bund/9.9/discipline", 404, "unknown-version"),
        ("/assets/nothing", 404, "unknown-asset"),
        ("/export/pdf", 404, "unknown-export"),
        ("/profiles/p99", 404, "unknown-profile"),
        ("/nowhere", 404, "unknown-route"),
    ] {
        let response = s.dispatch(&Request::get(target));
        assert_eq!(response.status, status, "{target}");
        assert_eq!(error_code(response.body_text()), code, "{target}");
        let v: serde_json::Value = serde_json::from_slice(&response.body).unwrap();
        assert_eq!(v["status"], status);
        assert!(!v["message"].as_str().unwrap().is_empty());
    }
}

#[test]
fn version_selection_is_isolated() {
    let s = service();
    assert_eq!(tree(&s, "/api/bund/2.3/workproduct").ids(), ["wp1"]);
    assert_eq!(tree(&s, "/api/bund/latest/workproduct").ids(), ["wp1", "wp2"]);
    assert_eq!(tree(&s, "/api/workproduct").ids(), ["wp1", "wp2"]);
    // Without a condition in 2.3, maint keeps wp1.
    assert_eq!(tree(&s, "/api/bund/2.3/workproduct?projectType=maint").ids(), ["wp1"]);
    assert_eq!(get(&s, "/api/bund/2.3/workproduct/wp2").0, 404);
}

#[test]
fn identical_requests_give_identical_bytes() {
    let s = service();
    for target in ["/api/discipline/d1", "/api/workproduct?projectType=maint", "/openapi.json"] {
        assert_eq!(s.dispatch(&Request::get(target)), s.dispatch(&Request::get(target)));
    }
}

#[test]
fn assets_pass_through() {
    let s = service();
    let response = s.dispatch(&Request::get("/assets/logo"));
    assert_eq!(response.status, 200);
    assert_eq!(response.media_type, "image/png");
    assert_eq!(response.body, std::fs::read(fixture_a_dir().join("assets/logo.png")).unwrap());
    assert_eq!(s.dispatch(&Request::get("/assets/bund/2.3/logo")).body, response.body);
}

#[test]
fn exports_are_zip_archives() {
    let s = service();
    let response = s.dispatch(&Request::get("/export/doc-templates?projectType=maint"));
    assert_eq!(response.status, 200);
    assert_eq!(response.media_type, ZIP_MEDIA_TYPE);
    assert!(response.headers.iter().any(|(k, v)| *k == "content-disposition" && v.contains("doc-templates")));
    let mut archive = zip::ZipArchive::new(Cursor::new(response.body)).unwrap();
    let names: Vec<String> = (0..archive.len()).map(|i| archive.by_index(i).unwrap().name().unwrap().into_owned()).collect();
    assert_eq!(names, ["manifest.json", "templates/wp2.md"]);
    let manifest: serde_json::Value = serde_json::from_reader(archive.by_name("manifest.json").unwrap()).unwrap();
    assert_eq!(manifest["profile"], serde_json::json!({ "projectType": "maint" }));
    assert_eq!(manifest["generated_at"], 42);
}

#[test]
fn profiles_round_trip() {
    let s = service();
    let created = s.dispatch(&Request::post(
        "/profiles",
        r#"{"name": "maintenance", "selections": {"projectType": "maint"}}"#,
    ));
    assert_eq!(created.status, 201, "{}", created.body_text());
    let v: serde_json::Value = serde_json::from_slice(&created.body).unwrap();
    assert_eq!(v["id"], "p1");
    let (status, body) = get(&s, "/profiles/p1");
    assert_eq!(status, 200);
    let fetched: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(fetched["selections"]["projectType"], "maint");
    assert_eq!(fetched["name"], "maintenance");
    let listed: serde_json::Value = serde_json::from_str(&get(&s, "/profiles").1).unwrap();
    assert_eq!(listed.as_array().unwrap().len(), 1);

    let bad = s.dispatch(&Request::post("/profiles", r#"{"name": "x", "selections": {"projectType": "web"}}"#));
    assert_eq!(bad.status, 400);
    let garbage = s.dispatch(&Request::post("/profiles", "not json"));
    assert_eq!((garbage.status, error_code(garbage.body_text()).as_str()), (400, "invalid-profile"));
}

#[test]
fn openapi_in_both_formats() {
    let s = service();
    let (status, yaml) = get(&s, "/openapi.yaml");
    assert_eq!(status, 200);
    assert!(yaml.contains("/api/discipline/{disciplineId}/workproduct:"));
    let (status, json) = get(&s, "/openapi.json");
    assert_eq!(status, 200);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["components"]["schemas"]["Discipline"]["required"], serde_json::json!(["id", "version", "name"]));
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn serves_over_tcp() {
    use tokio::io::{AsyncReadExt, AsyncWriteExt};

    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let server = tokio::spawn(processkit_server::http::serve(listener, Arc::new(service())));

    let mut stream = tokio::net::TcpStream::connect(addr).await.unwrap();
    stream
        .write_all(b"GET /api/workproduct?projectType=maint HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n")
        .await
        .unwrap();
    let mut raw = Vec::new();
    stream.read_to_end(&mut raw).await.unwrap();
    let text = String::from_utf8(raw).unwrap();
    assert!(text.starts_with("HTTP/1.1 200"), "{text}");
    assert!(text.to_ascii_lowercase().contains("content-type: application/xml; charset=utf-8"));
    let body = &text[text.find("\r\n\r\n").unwrap() + 4..];
    assert_eq!(Tree::parse(body).unwrap().ids(), ["wp2"]);
    server.abort();
}
