//! Builds response documents for routes by applying attribute visibility,
//! composition embedding, named-association resolution, multiplicity
//! wrappers and the tailoring filter.

use crate::metamodel::{Association, AssociationKind, AttributeDef, ElementType, Metamodel, Visibility};
use crate::model::{ModelSnapshot, ProcessElement};
use crate::response::{Node, ResponseDoc};
use crate::routes::{RouteKind, RouteMatch};
use crate::tailoring::{is_included, TailoringProfile};

/// How an element is reached; decides which attributes are visible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Access {
    Collection,
    ById,
    EmbeddedComposed,
    EmbeddedAggregated,
    Reference,
}

impl Access {
    pub const ALL: [Access; 5] = [
        Access::Collection,
        Access::ById,
        Access::EmbeddedComposed,
        Access::EmbeddedAggregated,
        Access::Reference,
    ];

    fn admits(self, visibility: Visibility) -> bool {
        match self {
            Access::ById => true,
            Access::EmbeddedAggregated => visibility != Visibility::Private,
            Access::Collection | Access::EmbeddedComposed | Access::Reference => {
                visibility == Visibility::Public
            }
        }
    }

    fn for_association(kind: AssociationKind) -> Self {
        match kind {
            AssociationKind::Composition => Access::EmbeddedComposed,
            AssociationKind::Aggregation => Access::EmbeddedAggregated,
            AssociationKind::Directed => Access::Reference,
        }
    }
}

/// Visible attributes in declaration order.
pub fn visible_attributes(ty: &ElementType, access: Access) -> Vec<&AttributeDef> {
    ty.attributes
        .iter()
        .filter(|a| access.admits(a.visibility))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProjectionError {
    #[error("unknown endpoint type `{0}`")]
    UnknownType(String),
    #[error("no {type_name} with id `{id}`")]
    UnknownId { type_name: String, id: String },
    #[error("{type_name} `{id}` is not part of the tailored process")]
    Filtered { type_name: String, id: String },
    #[error("{type_name} has no association `{segment}`")]
    UnknownSegment { type_name: String, segment: String },
}

/// Evaluates routes against one snapshot under one tailoring profile.
pub struct Projector<'a> {
    mm: &'a Metamodel,
    snapshot: &'a ModelSnapshot,
    profile: &'a TailoringProfile,
}

pub const RESPONSE_TAG: &str = "response";

impl<'a> Projector<'a> {
    pub fn new(mm: &'a Metamodel, snapshot: &'a ModelSnapshot, profile: &'a TailoringProfile) -> Self {
        Self {
            mm,
            snapshot,
            profile,
        }
    }

    pub fn evaluate(&self, matched: &RouteMatch<'_>) -> Result<ResponseDoc, ProjectionError> {
        let route = matched.route;
        let id = matched.id.unwrap_or_default();
        match route.kind {
            RouteKind::Collection => self.collection(&route.source_type),
            RouteKind::ById => self.element(&route.source_type, id),
            RouteKind::Nested => {
                let assoc = route
                    .association
                    .and_then(|i| self.mm.associations().get(i))
                    .ok_or_else(|| ProjectionError::UnknownSegment {
                        type_name: route.source_type.clone(),
                        segment: route.pattern.clone(),
                    })?;
                self.association(&route.source_type, id, &assoc.segment())
            }
        }
    }

    /// `<response>` listing every included element of an endpoint type with
    /// its public attributes.
    pub fn collection(&self, type_name: &str) -> Result<ResponseDoc, ProjectionError> {
        let ty = self.endpoint(type_name)?;
        let mut root = Node::new(RESPONSE_TAG);
        for element in self.snapshot.elements_of_type(type_name) {
            if self.included(element) {
                root = root.child(self.node(element, ty, Access::Collection, &ty.name));
            }
        }
        Ok(ResponseDoc { root })
    }

    /// Full view of one element: all attributes, and every association
    /// resolved one level deep.
    pub fn element(&self, type_name: &str, id: &str) -> Result<ResponseDoc, ProjectionError> {
        let ty = self.endpoint(type_name)?;
        let element = self.addressed(ty, id)?;
        let mut root = self.node(element, ty, Access::ById, &ty.name);
        for assoc in self.mm.outgoing(&ty.name) {
            root.children.extend(
                self.association_content(element, assoc)
                    .into_iter()
                    .map(crate::response::Content::Element),
            );
        }
        Ok(ResponseDoc { root })
    }

    /// `<response>` holding the source element (public attributes) and the
    /// targets of one association.
    pub fn association(&self, type_name: &str, id: &str, segment: &str) -> Result<ResponseDoc, ProjectionError> {
        let ty = self.endpoint(type_name)?;
        let assoc = self
            .mm
            .association_by_segment(&ty.name, segment)
            .ok_or_else(|| ProjectionError::UnknownSegment {
                type_name: ty.name.clone(),
                segment: segment.to_owned(),
            })?;
        let element = self.addressed(ty, id)?;
        let mut source = self.node(element, ty, Access::Collection, &ty.name);
        if let Some(node) = self.association_content(element, assoc) {
            source = source.child(node);
        }
        Ok(ResponseDoc {
            root: Node::new(RESPONSE_TAG).child(source),
        })
    }

    fn endpoint(&self, type_name: &str) -> Result<&'a ElementType, ProjectionError> {
        self.mm
            .element_type(type_name)
            .filter(|t| t.is_endpoint)
            .ok_or_else(|| ProjectionError::UnknownType(type_name.to_owned()))
    }

    fn addressed(&self, ty: &ElementType, id: &str) -> Result<&'a ProcessElement, ProjectionError> {
        let element = self
            .snapshot
            .element(id)
            .filter(|e| e.type_name == ty.name)
            .ok_or_else(|| ProjectionError::UnknownId {
                type_name: ty.name.clone(),
                id: id.to_owned(),
            })?;
        if !self.included(element) {
            return Err(ProjectionError::Filtered {
                type_name: ty.name.clone(),
                id: id.to_owned(),
            });
        }
        Ok(element)
    }

    fn included(&self, element: &ProcessElement) -> bool {
        is_included(self.snapshot, element, self.profile)
    }

    /// Public attributes become XML attributes, other visible ones child
    /// elements with a capitalized tag.
    fn node(&self, element: &ProcessElement, ty: &ElementType, access: Access, tag: &str) -> Node {
        let mut node = Node::new(tag);
        let mut nested = Vec::new();
        for attr in visible_attributes(ty, access) {
            let Some(value) = element.attribute(&attr.name) else {
                continue;
            };
            if attr.visibility == Visibility::Public {
                node = node.attr(&attr.name, value);
            } else {
                nested.push(Node::new(attr.element_tag()).text(value));
            }
        }
        for n in nested {
            node = node.child(n);
        }
        node
    }

    /// Nodes an association contributes below its source: a wrapper for
    /// multi-valued ends, otherwise the target node if present.
    fn association_content(&self, element: &ProcessElement, assoc: &Association) -> Option<Node> {
        let Some(target_ty) = self.mm.element_type(&assoc.target) else {
            return None;
        };
        let access = Access::for_association(assoc.kind);
        let mut nodes = element
            .targets(&assoc.segment())
            .iter()
            .filter_map(|id| self.snapshot.element(id))
            .filter(|t| self.included(t))
            .map(|t| self.node(t, target_ty, access, assoc.node_tag()));
        if assoc.is_wrapped() {
            let mut wrapper = Node::new(assoc.wrapper_tag());
            wrapper.children.extend(nodes.map(crate::response::Content::Element));
            Some(wrapper)
        } else {
            nodes.next()
        }
    }
}

pub fn project_collection(
    snapshot: &ModelSnapshot,
    mm: &Metamodel,
    type_name: &str,
    tailoring: &TailoringProfile,
) -> Result<ResponseDoc, ProjectionError> {
    Projector::new(mm, snapshot, tailoring).collection(type_name)
}

pub fn project_element(
    snapshot: &ModelSnapshot,
    mm: &Metamodel,
    type_name: &str,
    id: &str,
    tailoring: &TailoringProfile,
) -> Result<ResponseDoc, ProjectionError> {
    Projector::new(mm, snapshot, tailoring).element(type_name, id)
}

pub fn resolve_association(
    snapshot: &ModelSnapshot,
    mm: &Metamodel,
    type_name: &str,
    id: &str,
    segment: &str,
    tailoring: &TailoringProfile,
) -> Result<ResponseDoc, ProjectionError> {
    Projector::new(mm, snapshot, tailoring).association(type_name, id, segment)
}
