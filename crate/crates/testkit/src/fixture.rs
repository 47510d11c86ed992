//! The canonical corpus, both as files on disk and restated by hand in the
//! test kit's own model so the oracle can be checked against it.

use std::path::PathBuf;

use crate::model::{Assoc, Attr, Characteristic, Element, Kind, Link, Model, Type, Vis};

pub fn fixture_a_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/fixture-a")
}

pub fn fixture_a_metamodel_path() -> PathBuf {
    fixture_a_dir().join("fixture-a.mm")
}

pub fn fixture_a_model_path() -> PathBuf {
    fixture_a_dir().join("fixture-a.xml")
}

fn attr(name: &str, kind: Kind, vis: Vis) -> Attr {
    Attr { name: name.into(), kind, vis }
}

fn ty(name: &str, endpoint: bool, work_product: bool, plan: bool, attrs: Vec<Attr>) -> Type {
    Type { name: name.into(), endpoint, work_product, plan, attrs }
}

fn element(type_name: &str, values: &[(&str, &str)]) -> Element {
    Element {
        id: values[0].1.into(),
        type_name: type_name.into(),
        values: values.iter().map(|(k, v)| ((*k).into(), (*v).into())).collect(),
        links: Vec::new(),
        condition: Vec::new(),
    }
}

pub fn fixture_a_model() -> Model {
    use Kind::{Html, Integer, String as Str};
    use Vis::{Private, Protected, Public};

    let types = vec![
        ty(
            "Discipline",
            true,
            false,
            true,
            vec![
                attr("id", Str, Public),
                attr("version", Str, Public),
                attr("name", Str, Public),
                attr("number", Integer, Private),
                attr("description", Html, Private),
            ],
        ),
        ty(
            "WorkProduct",
            true,
            true,
            true,
            vec![
                attr("id", Str, Public),
                attr("name", Str, Public),
                attr("acceptanceCriteria", Str, Protected),
                attr("description", Html, Private),
            ],
        ),
        ty(
            "Tool",
            true,
            false,
            false,
            vec![attr("id", Str, Public), attr("name", Str, Public), attr("vendor", Str, Protected)],
        ),
        ty(
            "MethodReference",
            true,
            false,
            false,
            vec![
                attr("id", Str, Public),
                attr("version", Str, Public),
                attr("name", Str, Public),
                attr("description", Html, Private),
            ],
        ),
        ty(
            "BibliographyItem",
            true,
            false,
            false,
            vec![attr("id", Str, Public), attr("name", Str, Public), attr("citationText", Str, Private)],
        ),
    ];
    let assocs = vec![
        Assoc {
            source: "Discipline".into(),
            kind: Link::Composition,
            name: None,
            many: true,
            target: "WorkProduct".into(),
        },
        Assoc {
            source: "WorkProduct".into(),
            kind: Link::Aggregation,
            name: Some("Tools".into()),
            many: true,
            target: "Tool".into(),
        },
        Assoc {
            source: "MethodReference".into(),
            kind: Link::Directed,
            name: Some("BibItemRef".into()),
            many: true,
            target: "BibliographyItem".into(),
        },
    ];

    let mut d1 = element(
        "Discipline",
        &[
            ("id", "d1"),
            ("version", "1.0"),
            ("name", "Planning"),
            ("number", "1"),
            (
                "description",
                "<p>Planning &amp; control of the project.</p><img src=\"/assets/logo\" alt=\"logo\"/>",
            ),
        ],
    );
    d1.links.push((0, vec!["wp1".into(), "wp2".into()]));
    let mut wp1 = element(
        "WorkProduct",
        &[
            ("id", "wp1"),
            ("name", "Project Plan"),
            ("acceptanceCriteria", "Approved by the steering committee"),
            ("description", "<p>Schedule, budget and milestones.</p>"),
        ],
    );
    wp1.links.push((1, vec!["t1".into()]));
    wp1.condition.push(("projectType".into(), vec!["dev".into()]));
    let mut wp2 = element(
        "WorkProduct",
        &[
            ("id", "wp2"),
            ("name", "Risk List"),
            ("acceptanceCriteria", "Every risk has an owner"),
            ("description", "<p>Identified risks and mitigations.</p>"),
        ],
    );
    wp2.links.push((1, vec!["t1".into()]));
    let t1 = element("Tool", &[("id", "t1"), ("name", "Issue Tracker"), ("vendor", "ACME")]);
    let mut m1 = element(
        "MethodReference",
        &[
            ("id", "m1"),
            ("version", "1.0"),
            ("name", "Test-Driven Development"),
            ("description", "<p>Write a failing test before the code.</p>"),
        ],
    );
    m1.links.push((2, vec!["b1".into()]));
    let b1 = element(
        "BibliographyItem",
        &[
            ("id", "b1"),
            ("name", "Beck: TDD by Example"),
            (
                "citationText",
                "K. Beck. Test-Driven Development: By Example. Addison-Wesley, 2002.",
            ),
        ],
    );

    Model {
        name: "fixture-a".into(),
        variant: "bund".into(),
        version: "2.4".into(),
        types,
        assocs,
        characteristics: vec![Characteristic {
            key: "projectType".into(),
            label: "Project type".into(),
            values: vec!["dev".into(), "maint".into()],
        }],
        elements: vec![d1, wp1, wp2, t1, m1, b1],
    }
}
