use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io;
use std::path::{Component, Path, PathBuf};

use base64::Engine as _;
use indexmap::IndexMap;
use roxmltree::{Document, Node};

use super::{Asset, ModelSnapshot, ProcessElement, ProjectCharacteristic};
use crate::metamodel::{AssociationKind, AttributeKind, Metamodel, Multiplicity, Visibility};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("malformed XML: {0}")]
    Malformed(String),
    #[error("line {line}: {message}")]
    Schema { line: u32, message: String },
    #[error("duplicate element id `{0}`")]
    DuplicateId(String),
    #[error("element `{from}` refers to unknown element `{to}`")]
    DanglingReference { from: String, to: String },
    #[error("element `{element}`: unknown characteristic `{key}`")]
    UnknownCharacteristic { element: String, key: String },
    #[error("element `{element}`: value `{value}` is not declared for characteristic `{key}`")]
    UnknownCharacteristicValue {
        element: String,
        key: String,
        value: String,
    },
    #[error("element `{0}` breaks the composition forest (second parent or cycle)")]
    CompositionForest(String),
    #[error("asset `{id}`: {message}")]
    Asset { id: String, message: String },
}

/// Resolves `href` attributes of `<Asset>` declarations.
pub trait AssetSource {
    fn load(&self, href: &str) -> io::Result<Vec<u8>>;
}

/// Rejects every `href`; only inline assets are accepted.
pub struct NoAssets;

impl AssetSource for NoAssets {
    fn load(&self, href: &str) -> io::Result<Vec<u8>> {
        Err(io::Error::new(
            io::ErrorKind::NotFound,
            format!("no asset directory configured for `{href}`"),
        ))
    }
}

/// Loads asset files relative to a base directory (usually the directory of
/// the instance document). Paths escaping the directory are refused.
pub struct DirAssets(pub PathBuf);

impl AssetSource for DirAssets {
    fn load(&self, href: &str) -> io::Result<Vec<u8>> {
        let rel = Path::new(href);
        if rel
            .components()
            .any(|c| !matches!(c, Component::Normal(_) | Component::CurDir))
        {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("asset path `{href}` must be relative and stay inside the model directory"),
            ));
        }
        std::fs::read(self.0.join(rel))
    }
}

const MODEL_TAG: &str = "ProcessModel";
const CHARACTERISTIC_TAG: &str = "Characteristic";
const ASSET_TAG: &str = "Asset";

/// The `variant` and `version` attributes declared on a document's root
/// element, if any.
pub fn declared_identity(document: &[u8]) -> Result<(Option<String>, Option<String>), IngestError> {
    let text = std::str::from_utf8(document)
        .map_err(|e| IngestError::Malformed(format!("document is not UTF-8: {e}")))?;
    let doc = Document::parse(text).map_err(|e| IngestError::Malformed(e.to_string()))?;
    let root = doc.root_element();
    Ok((
        root.attribute("variant").map(str::to_owned),
        root.attribute("version").map(str::to_owned),
    ))
}

/// Builds a validated snapshot from an instance document.
///
/// `variant` and `version` name the snapshot; when the root element carries
/// `variant`/`version` attributes they must agree.
pub fn ingest_model(
    mm: &Metamodel,
    document: &[u8],
    variant: &str,
    version: &str,
    assets: &dyn AssetSource,
) -> Result<ModelSnapshot, IngestError> {
    let text = std::str::from_utf8(document)
        .map_err(|e| IngestError::Malformed(format!("document is not UTF-8: {e}")))?;
    let doc = Document::parse(text).map_err(|e| IngestError::Malformed(e.to_string()))?;
    let root = doc.root_element();
    let schema = |node: Node<'_, '_>, message: String| IngestError::Schema {
        line: doc.text_pos_at(node.range().start).row,
        message,
    };

    if root.tag_name().name() != MODEL_TAG {
        return Err(schema(
            root,
            format!("root element must be <{MODEL_TAG}>, found <{}>", root.tag_name().name()),
        ));
    }
    for (attr, expected) in [("variant", variant), ("version", version)] {
        if let Some(found) = root.attribute(attr) {
            if found != expected {
                return Err(schema(
                    root,
                    format!("document declares {attr} `{found}` but `{expected}` was requested"),
                ));
            }
        }
    }
    for (what, value) in [("variant", variant), ("version", version)] {
        if !is_token(value) {
            return Err(schema(root, format!("invalid {what} `{value}`")));
        }
    }
    if mm.endpoint_by_segment(variant).is_some() {
        return Err(schema(
            root,
            format!("variant `{variant}` clashes with an endpoint route segment"),
        ));
    }

    let mut characteristics: Vec<ProjectCharacteristic> = Vec::new();
    let mut asset_map = BTreeMap::new();
    for node in root.children().filter(Node::is_element) {
        match node.tag_name().name() {
            CHARACTERISTIC_TAG => {
                let c = read_characteristic(node, &schema)?;
                if characteristics.iter().any(|x| x.key == c.key) {
                    return Err(schema(node, format!("characteristic `{}` declared twice", c.key)));
                }
                characteristics.push(c);
            }
            ASSET_TAG => {
                let (id, asset) = read_asset(node, assets, &schema)?;
                if asset_map.insert(id.clone(), asset).is_some() {
                    return Err(schema(node, format!("asset `{id}` declared twice")));
                }
            }
            _ => {}
        }
    }

    let mut elements: IndexMap<String, ProcessElement> = IndexMap::new();
    for node in root.children().filter(Node::is_element) {
        let tag = node.tag_name().name();
        if tag == CHARACTERISTIC_TAG || tag == ASSET_TAG {
            continue;
        }
        let element = read_element(mm, node, &characteristics, &schema)?;
        if elements.contains_key(&element.id) {
            return Err(IngestError::DuplicateId(element.id));
        }
        elements.insert(element.id.clone(), element);
    }

    let parents = check_links(mm, &elements)?;
    Ok(ModelSnapshot {
        variant: variant.to_owned(),
        version: version.to_owned(),
        elements,
        characteristics,
        assets: asset_map,
        parents,
    })
}

type SchemaErr<'s> = dyn Fn(Node<'_, '_>, String) -> IngestError + 's;

fn read_characteristic(
    node: Node<'_, '_>,
    schema: &SchemaErr<'_>,
) -> Result<ProjectCharacteristic, IngestError> {
    let key = node
        .attribute("key")
        .ok_or_else(|| schema(node, "characteristic without `key`".into()))?;
    if !crate::metamodel::is_identifier(key) {
        return Err(schema(node, format!("invalid characteristic key `{key}`")));
    }
    let mut values: Vec<String> = Vec::new();
    for child in node.children().filter(Node::is_element) {
        if child.tag_name().name() != "Value" {
            return Err(schema(child, format!("unexpected <{}> in characteristic", child.tag_name().name())));
        }
        let id = child
            .attribute("id")
            .ok_or_else(|| schema(child, "value without `id`".into()))?;
        if !is_token(id) {
            return Err(schema(child, format!("invalid value identifier `{id}`")));
        }
        if values.iter().any(|v| v == id) {
            return Err(schema(child, format!("value `{id}` declared twice for `{key}`")));
        }
        values.push(id.to_owned());
    }
    if values.is_empty() {
        return Err(schema(node, format!("characteristic `{key}` has no values")));
    }
    Ok(ProjectCharacteristic {
        key: key.to_owned(),
        label: node.attribute("label").unwrap_or(key).to_owned(),
        values,
    })
}

fn read_asset(
    node: Node<'_, '_>,
    source: &dyn AssetSource,
    schema: &SchemaErr<'_>,
) -> Result<(String, Asset), IngestError> {
    let id = node
        .attribute("id")
        .ok_or_else(|| schema(node, "asset without `id`".into()))?;
    if !is_token(id) {
        return Err(schema(node, format!("invalid asset id `{id}`")));
    }
    let media_type = node
        .attribute("mediaType")
        .ok_or_else(|| schema(node, format!("asset `{id}` lacks `mediaType`")))?;
    let asset_err = |message: String| IngestError::Asset {
        id: id.to_owned(),
        message,
    };
    let bytes = match (node.attribute("href"), node.attribute("encoding")) {
        (Some(href), None) => source
            .load(href)
            .map_err(|e| asset_err(format!("cannot read `{href}`: {e}")))?,
        (None, Some("base64")) => {
            let text: String = node
                .text()
                .unwrap_or_default()
                .chars()
                .filter(|c| !c.is_whitespace())
                .collect();
            base64::engine::general_purpose::STANDARD
                .decode(text)
                .map_err(|e| asset_err(format!("invalid base64 payload: {e}")))?
        }
        _ => {
            return Err(asset_err(
                "expected either `href` or `encoding=\"base64\"` with inline content".into(),
            ))
        }
    };
    Ok((
        id.to_owned(),
        Asset {
            media_type: media_type.to_owned(),
            bytes,
        },
    ))
}

fn read_element(
    mm: &Metamodel,
    node: Node<'_, '_>,
    characteristics: &[ProjectCharacteristic],
    schema: &SchemaErr<'_>,
) -> Result<ProcessElement, IngestError> {
    let tag = node.tag_name().name();
    let ty = mm
        .element_type(tag)
        .ok_or_else(|| schema(node, format!("unknown element type <{tag}>")))?;

    let mut values = BTreeMap::new();
    for attr in node.attributes() {
        let def = ty.attribute(attr.name()).ok_or_else(|| {
            schema(node, format!("<{tag}> has no attribute `{}`", attr.name()))
        })?;
        if def.kind == AttributeKind::Integer && attr.value().trim().parse::<i64>().is_err() {
            return Err(schema(
                node,
                format!("attribute `{}` must be an integer, got `{}`", def.name, attr.value()),
            ));
        }
        values.insert(attr.name().to_owned(), attr.value().to_owned());
    }
    for def in &ty.attributes {
        let required = def.visibility == Visibility::Public || def.name == "id" || def.name == "name";
        if required && !values.contains_key(&def.name) {
            return Err(schema(node, format!("<{tag}> lacks required attribute `{}`", def.name)));
        }
    }
    let id = values
        .get("id")
        .cloned()
        .ok_or_else(|| schema(node, format!("<{tag}> lacks required attribute `id`")))?;
    if !values.contains_key("name") {
        return Err(schema(node, format!("<{tag}> lacks required attribute `name`")));
    }
    if !is_token(&id) {
        return Err(schema(node, format!("invalid element id `{id}` (allowed: letters, digits, `_`, `-`, `.`)")));
    }

    let mut element = ProcessElement {
        type_name: tag.to_owned(),
        id: id.clone(),
        attribute_values: values,
        children: BTreeMap::new(),
        references: BTreeMap::new(),
        applicability: None,
    };

    for child in node.children().filter(Node::is_element) {
        match child.tag_name().name() {
            kind_tag @ ("Children" | "Refs") => {
                let segment = child
                    .attribute("assoc")
                    .ok_or_else(|| schema(child, format!("<{kind_tag}> lacks `assoc`")))?;
                let assoc = mm.association_by_segment(tag, segment).ok_or_else(|| {
                    schema(child, format!("<{tag}> has no association `{segment}`"))
                })?;
                let composed = assoc.kind == AssociationKind::Composition;
                if composed != (kind_tag == "Children") {
                    let expected = if composed { "Children" } else { "Refs" };
                    return Err(schema(
                        child,
                        format!("association `{segment}` must be listed in <{expected}>"),
                    ));
                }
                let ids: Vec<String> = child
                    .text()
                    .unwrap_or_default()
                    .split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|s| !s.is_empty())
                    .map(str::to_owned)
                    .collect();
                if assoc.upper == Multiplicity::One && ids.len() > 1 {
                    return Err(schema(
                        child,
                        format!("association `{segment}` admits at most one target"),
                    ));
                }
                let links = if composed {
                    &mut element.children
                } else {
                    &mut element.references
                };
                if links.insert(segment.to_owned(), ids).is_some() {
                    return Err(schema(child, format!("association `{segment}` listed twice")));
                }
            }
            "Condition" => {
                let key = child
                    .attribute("key")
                    .ok_or_else(|| schema(child, "<Condition> lacks `key`".into()))?;
                let declared = characteristics.iter().find(|c| c.key == key).ok_or_else(|| {
                    IngestError::UnknownCharacteristic {
                        element: id.clone(),
                        key: key.to_owned(),
                    }
                })?;
                let mut accepted = BTreeSet::new();
                for value in child
                    .attribute("values")
                    .unwrap_or_default()
                    .split(',')
                    .map(str::trim)
                    .filter(|v| !v.is_empty())
                {
                    if !declared.declares(value) {
                        return Err(IngestError::UnknownCharacteristicValue {
                            element: id.clone(),
                            key: key.to_owned(),
                            value: value.to_owned(),
                        });
                    }
                    accepted.insert(value.to_owned());
                }
                if accepted.is_empty() {
                    return Err(schema(child, format!("condition on `{key}` accepts no values")));
                }
                let cond = element.applicability.get_or_insert_with(Default::default);
                if cond.clauses.insert(key.to_owned(), accepted).is_some() {
                    return Err(schema(child, format!("condition on `{key}` given twice")));
                }
            }
            other => {
                return Err(schema(child, format!("unexpected <{other}> inside <{tag}>")));
            }
        }
    }
    Ok(element)
}

/// Resolves every link, checks target types and returns the composition
/// parent map after verifying it forms a forest.
fn check_links(
    mm: &Metamodel,
    elements: &IndexMap<String, ProcessElement>,
) -> Result<HashMap<String, String>, IngestError> {
    let mut parents: HashMap<String, String> = HashMap::new();
    for element in elements.values() {
        for (segment, ids) in element.children.iter().chain(&element.references) {
            let assoc = mm
                .association_by_segment(&element.type_name, segment)
                .expect("segment checked while reading");
            for target in ids {
                let Some(found) = elements.get(target) else {
                    return Err(IngestError::DanglingReference {
                        from: element.id.clone(),
                        to: target.clone(),
                    });
                };
                if found.type_name != assoc.target {
                    return Err(IngestError::DanglingReference {
                        from: element.id.clone(),
                        to: format!("{target} (a {}, expected {})", found.type_name, assoc.target),
                    });
                }
            }
        }
        for target in element.children.values().flatten() {
            if target == &element.id || parents.insert(target.clone(), element.id.clone()).is_some() {
                return Err(IngestError::CompositionForest(target.clone()));
            }
        }
    }
    for start in parents.keys() {
        let mut current = start;
        let mut steps = 0;
        while let Some(parent) = parents.get(current) {
            steps += 1;
            if parent == start || steps > parents.len() {
                return Err(IngestError::CompositionForest(start.clone()));
            }
            current = parent;
        }
    }
    Ok(parents)
}

/// Identifier used for element ids, values, variants and versions. Safe in
/// URL path segments and file names.
pub(crate) fn is_token(s: &str) -> bool {
    !s.is_empty()
        && s != "."
        && s != ".."
        && s
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}
