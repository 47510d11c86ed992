//! OpenAPI 3 description of the derived route surface.

use serde_json::{json, Map, Value};

use crate::metamodel::{Association, AssociationKind, AttributeDef, AttributeKind, ElementType, Metamodel, Visibility};
use crate::model::ProjectCharacteristic;
use crate::projection::{visible_attributes, Access, RESPONSE_TAG};
use crate::routes::{RouteKind, RouteSpec, RouteTable};

pub const OPENAPI_VERSION: &str = "3.0.3";
pub const HTML_SCHEMA: &str = "typeHtml";
const XML_MEDIA_TYPE: &str = "application/xml";

/// A generated OpenAPI document. Key order is stable, so both serializations
/// are deterministic.
#[derive(Clone, Debug, PartialEq)]
pub struct OpenApiDocument(Value);

impl OpenApiDocument {
    pub fn value(&self) -> &Value {
        &self.0
    }

    pub fn paths(&self) -> impl Iterator<Item = &str> {
        self.0["paths"]
            .as_object()
            .into_iter()
            .flat_map(|m| m.keys().map(String::as_str))
    }

    pub fn schema(&self, name: &str) -> Option<&Value> {
        self.0["components"]["schemas"].get(name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.0).expect("JSON values always serialize");
        s.push('\n');
        s
    }

    pub fn to_yaml(&self) -> String {
        serde_yaml::to_string(&self.0).expect("JSON values always serialize as YAML")
    }
}

/// Describes every route of `routes`, one component schema per element type
/// and the tailoring characteristics as optional query parameters.
pub fn generate_openapi(
    mm: &Metamodel,
    routes: &RouteTable,
    characteristics: &[ProjectCharacteristic],
) -> OpenApiDocument {
    let tailoring: Vec<Value> = characteristics.iter().map(tailoring_parameter).collect();

    let mut paths = Map::new();
    for route in routes.routes() {
        paths.insert(format!("/{}", route.pattern), json!({ "get": operation(mm, route, &tailoring) }));
    }

    let mut schemas = Map::new();
    for ty in mm.types() {
        schemas.insert(ty.name.clone(), type_schema(mm, ty));
    }
    let uses_html = mm
        .types()
        .flat_map(|t| &t.attributes)
        .any(|a| a.kind == AttributeKind::HtmlText);
    if uses_html {
        schemas.insert(
            HTML_SCHEMA.into(),
            json!({ "type": "string", "format": "html", "description": "HTML fragment" }),
        );
    }

    OpenApiDocument(json!({
        "openapi": OPENAPI_VERSION,
        "info": {
            "title": format!("{} process API", mm.name()),
            "version": "1.0.0",
            "description": "Process content derived from the metamodel. Every model route is also \
                            reachable below /api/{variant}/{version}/ to select a specific process \
                            variant and version; the bare /api/ prefix serves the default variant \
                            in its latest version. Query parameters select characteristic values \
                            and tailor the response.",
        },
        "paths": paths,
        "components": { "schemas": schemas },
    }))
}

fn tailoring_parameter(c: &ProjectCharacteristic) -> Value {
    json!({
        "name": c.key,
        "in": "query",
        "required": false,
        "description": c.label,
        "schema": { "type": "string", "enum": c.values },
    })
}

fn operation(mm: &Metamodel, route: &RouteSpec, tailoring: &[Value]) -> Value {
    let source = mm
        .element_type(&route.source_type)
        .expect("routes reference declared types");
    let mut parameters = Vec::new();
    if let Some(param) = route.id_param() {
        parameters.push(json!({
            "name": param,
            "in": "path",
            "required": true,
            "schema": { "type": "string" },
        }));
    }
    parameters.extend(tailoring.iter().cloned());

    let assoc = route.association.and_then(|i| mm.associations().get(i));
    let (operation_id, summary, schema) = match (route.kind, assoc) {
        (RouteKind::Collection, _) => (
            format!("list{}", source.name),
            format!("All {} elements of the tailored process", source.name),
            json!({
                "type": "object",
                "xml": { "name": RESPONSE_TAG },
                "properties": {
                    source.name.clone(): {
                        "type": "array",
                        "items": summary_schema(source, Access::Collection, &source.name),
                    }
                },
            }),
        ),
        (RouteKind::ById, _) => (
            format!("get{}", source.name),
            format!("One {} with all of its attributes", source.name),
            schema_ref(&source.name),
        ),
        (RouteKind::Nested, Some(assoc)) => {
            let mut item = summary_schema(source, Access::Collection, &source.name);
            let (key, value) = association_property(mm, assoc);
            item["properties"][key] = value;
            (
                format!("get{}{}", source.name, crate::metamodel::capitalize(&assoc.segment())),
                format!("{} elements associated with one {}", route.target_type, source.name),
                json!({
                    "type": "object",
                    "xml": { "name": RESPONSE_TAG },
                    "properties": { source.name.clone(): item },
                }),
            )
        }
        (RouteKind::Nested, None) => unreachable!("nested routes carry an association"),
    };

    let mut responses = Map::new();
    responses.insert(
        "200".into(),
        json!({
            "description": "Tailored process content",
            "content": { XML_MEDIA_TYPE: { "schema": schema } },
        }),
    );
    if !tailoring.is_empty() {
        responses.insert("400".into(), json!({ "description": "Invalid tailoring parameter" }));
    }
    responses.insert(
        "404".into(),
        json!({ "description": "Unknown element, or element not part of the tailored process (code `filtered`)" }),
    );

    json!({
        "operationId": operation_id,
        "summary": summary,
        "parameters": parameters,
        "responses": responses,
    })
}

fn schema_ref(name: &str) -> Value {
    json!({ "$ref": format!("#/components/schemas/{name}") })
}

/// Full schema of a type as returned by its by-id route.
fn type_schema(mm: &Metamodel, ty: &ElementType) -> Value {
    let required: Vec<&str> = ty
        .attributes
        .iter()
        .filter(|a| a.visibility == Visibility::Public)
        .map(|a| a.name.as_str())
        .collect();
    let mut properties = Map::new();
    for attr in &ty.attributes {
        properties.insert(attr.name.clone(), attribute_schema(attr));
    }
    for assoc in mm.outgoing(&ty.name) {
        let (key, value) = association_property(mm, assoc);
        properties.insert(key, value);
    }
    json!({
        "type": "object",
        "xml": { "name": ty.name },
        "required": required,
        "properties": properties,
    })
}

fn attribute_schema(attr: &AttributeDef) -> Value {
    let scalar = match attr.kind {
        AttributeKind::String => json!({ "type": "string" }),
        AttributeKind::Integer => json!({ "type": "integer" }),
        AttributeKind::HtmlText if attr.visibility == Visibility::Public => {
            json!({ "type": "string", "format": "html" })
        }
        AttributeKind::HtmlText => json!({ "allOf": [schema_ref(HTML_SCHEMA)] }),
    };
    let mut schema = scalar;
    schema["xml"] = if attr.visibility == Visibility::Public {
        json!({ "attribute": true })
    } else {
        json!({ "name": attr.element_tag() })
    };
    schema
}

/// Inline object for an embedded element whose properties point into the
/// target type's schema.
fn summary_schema(ty: &ElementType, access: Access, xml_name: &str) -> Value {
    let visible = visible_attributes(ty, access);
    let required: Vec<&str> = visible
        .iter()
        .filter(|a| a.visibility == Visibility::Public)
        .map(|a| a.name.as_str())
        .collect();
    let mut properties = Map::new();
    for attr in visible {
        properties.insert(
            attr.name.clone(),
            json!({ "$ref": format!("#/components/schemas/{}/properties/{}", ty.name, attr.name) }),
        );
    }
    json!({
        "type": "object",
        "xml": { "name": xml_name },
        "required": required,
        "properties": properties,
    })
}

fn association_property(mm: &Metamodel, assoc: &Association) -> (String, Value) {
    let target = mm
        .element_type(&assoc.target)
        .expect("associations reference declared types");
    let access = match assoc.kind {
        AssociationKind::Composition => Access::EmbeddedComposed,
        AssociationKind::Aggregation => Access::EmbeddedAggregated,
        AssociationKind::Directed => Access::Reference,
    };
    let item = summary_schema(target, access, assoc.node_tag());
    let value = if assoc.is_wrapped() {
        json!({
            "type": "array",
            "items": item,
            "xml": { "wrapped": true, "name": assoc.wrapper_tag() },
        })
    } else {
        item
    };
    (assoc.node_tag().to_owned(), value)
}
