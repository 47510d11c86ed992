use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::{AssociationKind, ElementType, Metamodel, Visibility};

/// Modeling conventions a metamodel must satisfy before routes are derived.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    /// Endpoint types expose a public `id`.
    #[serde(rename = "RULE-ENDPOINT-ID")]
    EndpointId,
    /// Endpoint types expose a public `name`.
    #[serde(rename = "RULE-ENDPOINT-NAME")]
    EndpointName,
    /// Embedded-only types still carry public `id` and `name`.
    #[serde(rename = "RULE-ELEMENT-ID-NAME")]
    ElementIdName,
    #[serde(rename = "RULE-ATTRIBUTE-UNIQUE")]
    AttributeUnique,
    #[serde(rename = "RULE-DIRECTED-NAME")]
    DirectedName,
    #[serde(rename = "RULE-NO-GENERALIZATION")]
    NoGeneralization,
    /// Associations start at endpoint types so they have a by-id route to hang off.
    #[serde(rename = "RULE-SOURCE-ENDPOINT")]
    SourceEndpoint,
    /// Endpoint types need distinct lowercase names.
    #[serde(rename = "RULE-TYPE-SEGMENT")]
    TypeSegment,
    /// Outgoing associations of one type need distinct route segments.
    #[serde(rename = "RULE-ROUTE-SEGMENT")]
    RouteSegment,
    /// Child elements of a by-id response must have distinct tags.
    #[serde(rename = "RULE-CHILD-TAG")]
    ChildTag,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::EndpointId => "RULE-ENDPOINT-ID",
            Rule::EndpointName => "RULE-ENDPOINT-NAME",
            Rule::ElementIdName => "RULE-ELEMENT-ID-NAME",
            Rule::AttributeUnique => "RULE-ATTRIBUTE-UNIQUE",
            Rule::DirectedName => "RULE-DIRECTED-NAME",
            Rule::NoGeneralization => "RULE-NO-GENERALIZATION",
            Rule::SourceEndpoint => "RULE-SOURCE-ENDPOINT",
            Rule::TypeSegment => "RULE-TYPE-SEGMENT",
            Rule::RouteSegment => "RULE-ROUTE-SEGMENT",
            Rule::ChildTag => "RULE-CHILD-TAG",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "scope", rename_all = "kebab-case")]
pub enum Location {
    Type { name: String },
    Attribute { type_name: String, attribute: String },
    /// Index into the metamodel's association list.
    Association { index: usize, source: String, target: String },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Type { name } => write!(f, "type {name}"),
            Location::Attribute {
                type_name,
                attribute,
            } => write!(f, "attribute {type_name}.{attribute}"),
            Location::Association {
                index,
                source,
                target,
            } => write!(f, "association #{} ({source} -> {target})", index + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub rule: Rule,
    pub location: Location,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.rule, self.location, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.findings.iter().any(|f| f.rule == rule)
    }

    fn push(&mut self, rule: Rule, location: Location, message: impl Into<String>) {
        self.findings.push(Finding {
            rule,
            location,
            message: message.into(),
        });
    }
}

pub fn validate_conventions(mm: &Metamodel) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut segments: HashMap<String, &str> = HashMap::new();
    for ty in mm.types() {
        check_type(ty, &mut report);
        if ty.is_endpoint {
            if let Some(other) = segments.insert(ty.segment(), &ty.name) {
                report.push(
                    Rule::TypeSegment,
                    Location::Type {
                        name: ty.name.clone(),
                    },
                    format!("route segment `{}` is also used by `{other}`", ty.segment()),
                );
            }
        }
    }

    for (index, assoc) in mm.associations().iter().enumerate() {
        let location = || Location::Association {
            index,
            source: assoc.source.clone(),
            target: assoc.target.clone(),
        };
        if assoc.kind == AssociationKind::Directed && assoc.name.is_none() {
            report.push(
                Rule::DirectedName,
                location(),
                "directed associations must be named",
            );
        }
        let source_is_endpoint = mm
            .element_type(&assoc.source)
            .is_some_and(|t| t.is_endpoint);
        if !source_is_endpoint {
            report.push(
                Rule::SourceEndpoint,
                location(),
                format!("source `{}` is not an endpoint type", assoc.source),
            );
        }
    }

    for ty in mm.types() {
        let mut seen_segments: HashSet<String> = HashSet::new();
        let mut seen_tags: HashSet<String> = ty
            .attributes
            .iter()
            .filter(|a| a.visibility != Visibility::Public)
            .map(|a| a.element_tag())
            .collect();
        for (index, assoc) in mm
            .associations()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.source == ty.name)
        {
            let location = || Location::Association {
                index,
                source: assoc.source.clone(),
                target: assoc.target.clone(),
            };
            if !seen_segments.insert(assoc.segment()) {
                report.push(
                    Rule::RouteSegment,
                    location(),
                    format!(
                        "route segment `{}` is already used by another association of `{}`",
                        assoc.segment(),
                        ty.name
                    ),
                );
            }
            if !seen_tags.insert(assoc.child_tag()) {
                report.push(
                    Rule::ChildTag,
                    location(),
                    format!(
                        "element tag `{}` is already used inside `{}`",
                        assoc.child_tag(),
                        ty.name
                    ),
                );
            }
        }
    }

    report
}

fn check_type(ty: &ElementType, report: &mut ValidationReport) {
    let type_loc = || Location::Type {
        name: ty.name.clone(),
    };
    let mut seen = HashSet::new();
    for attr in &ty.attributes {
        if !seen.insert(attr.name.as_str()) {
            report.push(
                Rule::AttributeUnique,
                Location::Attribute {
                    type_name: ty.name.clone(),
                    attribute: attr.name.clone(),
                },
                format!("attribute `{}` declared twice", attr.name),
            );
        }
    }
    if let Some(sup) = &ty.supertype {
        report.push(
            Rule::NoGeneralization,
            type_loc(),
            format!("generalization of `{sup}` is not supported"),
        );
    }
    let public = |name: &str| {
        ty.attribute(name)
            .is_some_and(|a| a.visibility == Visibility::Public)
    };
    if ty.is_endpoint {
        if !public("id") {
            report.push(
                Rule::EndpointId,
                type_loc(),
                "endpoint type lacks a public `id` attribute",
            );
        }
        if !public("name") {
            report.push(
                Rule::EndpointName,
                type_loc(),
                "endpoint type lacks a public `name` attribute",
            );
        }
    } else if !public("id") || !public("name") {
        report.push(
            Rule::ElementIdName,
            type_loc(),
            "type lacks public `id` and `name` attributes",
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metamodel::parse_metamodel;

    const FIXTURE_A: &str = include_str!("../../../../fixtures/fixture-a/fixture-a.mm");

    fn findings(doc: &str) -> ValidationReport {
        validate_conventions(&parse_metamodel(doc).unwrap())
    }

    #[test]
    fn fixture_a_is_clean() {
        let report = findings(FIXTURE_A);
        assert!(report.is_clean(), "{:?}", report.findings);
    }

    #[test]
    fn endpoint_without_public_id() {
        let report = findings("types:\n  A [endpoint]:\n    id: string private\n    name: string public\n");
        assert!(report.has(Rule::EndpointId));
        assert_eq!(report.findings.len(), 1);
        assert_eq!(report.findings[0].location, Location::Type { name: "A".into() });
    }

    #[test]
    fn directed_without_name() {
        let report = findings(
            "types:\n  A [endpoint]:\n    id: string public\n    name: string public\n\
             associations:\n  A directed(many) A\n",
        );
        assert!(report.has(Rule::DirectedName));
        assert_eq!(report.findings.len(), 1);
    }

    #[test]
    fn collisions_and_generalization() {
        let report = findings(
            "types:\n  A [endpoint]:\n    id: string public\n    name: string public\n    id: string public\n\
             \x20 B extends A [endpoint]:\n    id: string public\n    name: string public\n\
             \x20 C:\n    id: string public\n\
             associations:\n  A composition(many) B\n  A aggregation(b, many) B\n  C composition(1) A\n",
        );
        for rule in [
            Rule::AttributeUnique,
            Rule::NoGeneralization,
            Rule::RouteSegment,
            Rule::ChildTag,
            Rule::SourceEndpoint,
            Rule::ElementIdName,
        ] {
            assert!(report.has(rule), "missing {rule}: {:?}", report.findings);
        }
    }

    #[test]
    fn type_segment_collision() {
        let report = findings(
            "types:\n  Tool [endpoint]:\n    id: string public\n    name: string public\n\
             \x20 TOOL [endpoint]:\n    id: string public\n    name: string public\n",
        );
        assert!(report.has(Rule::TypeSegment));
    }

    #[test]
    fn attribute_tag_collides_with_wrapper() {
        let report = findings(
            "types:\n  A [endpoint]:\n    id: string public\n    name: string public\n    bs: string private\n\
             \x20 B [endpoint]:\n    id: string public\n    name: string public\n\
             associations:\n  A composition(many) B\n",
        );
        assert!(report.has(Rule::ChildTag));
    }
}
