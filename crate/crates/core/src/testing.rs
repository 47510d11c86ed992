use std::path::Path;

use crate::metamodel::{parse_metamodel, Metamodel};
use crate::model::{ingest_model, DirAssets, ModelSnapshot};

pub(crate) const FIXTURE_MM: &str = include_str!("../../../fixtures/fixture-a/fixture-a.mm");
pub(crate) const FIXTURE_MODEL: &str = include_str!("../../../fixtures/fixture-a/fixture-a.xml");

pub(crate) fn fixture_a() -> (Metamodel, ModelSnapshot) {
    let mm = parse_metamodel(FIXTURE_MM).unwrap();
    let snap = ingest_fixture_doc(&mm, FIXTURE_MODEL);
    (mm, snap)
}

pub(crate) fn ingest_fixture_doc(mm: &Metamodel, doc: &str) -> ModelSnapshot {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/fixture-a");
    ingest_model(mm, doc.as_bytes(), "bund", "2.4", &DirAssets(dir)).unwrap()
}
