//! The conceptual process metamodel: element types, attribute visibility and
//! the associations that make process content browsable.

mod parse;
mod validate;

use std::collections::BTreeSet;
use std::fmt;

use indexmap::IndexMap;

pub use parse::parse_metamodel;
pub use validate::{validate_conventions, Finding, Location, Rule, ValidationReport};

/// 1-based position inside a metamodel description document.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetamodelErrorKind {
    Syntax(String),
    UnknownVisibility(String),
    UnknownKind(String),
    NoElementTypes,
    DuplicateType(String),
    DanglingReference(String),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct MetamodelError {
    pub position: Option<Position>,
    pub kind: MetamodelErrorKind,
}

impl MetamodelError {
    pub(crate) fn at(position: Position, kind: MetamodelErrorKind) -> Self {
        Self {
            position: Some(position),
            kind,
        }
    }

    pub(crate) fn new(kind: MetamodelErrorKind) -> Self {
        Self {
            position: None,
            kind,
        }
    }
}

impl fmt::Display for MetamodelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(pos) = self.position {
            write!(f, "{pos}: ")?;
        }
        match &self.kind {
            MetamodelErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            MetamodelErrorKind::UnknownVisibility(kw) => write!(
                f,
                "unknown visibility `{kw}` (expected public, protected or private)"
            ),
            MetamodelErrorKind::UnknownKind(kw) => write!(
                f,
                "unknown attribute kind `{kw}` (expected string, integer or html-text)"
            ),
            MetamodelErrorKind::NoElementTypes => write!(f, "no element types defined"),
            MetamodelErrorKind::DuplicateType(name) => {
                write!(f, "duplicate element type `{name}`")
            }
            MetamodelErrorKind::DanglingReference(name) => {
                write!(f, "reference to undefined element type `{name}`")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttributeKind {
    String,
    Integer,
    HtmlText,
}

impl AttributeKind {
    pub fn keyword(self) -> &'static str {
        match self {
            AttributeKind::String => "string",
            AttributeKind::Integer => "integer",
            AttributeKind::HtmlText => "html-text",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "string" => Some(AttributeKind::String),
            "integer" => Some(AttributeKind::Integer),
            "html-text" => Some(AttributeKind::HtmlText),
            _ => None,
        }
    }
}

/// Attribute visibility. Ordered from most to least exposed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Visibility {
    Public,
    Protected,
    Private,
}

impl Visibility {
    pub fn keyword(self) -> &'static str {
        match self {
            Visibility::Public => "public",
            Visibility::Protected => "protected",
            Visibility::Private => "private",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "public" => Some(Visibility::Public),
            "protected" => Some(Visibility::Protected),
            "private" => Some(Visibility::Private),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttributeDef {
    pub name: String,
    pub kind: AttributeKind,
    pub visibility: Visibility,
}

impl AttributeDef {
    pub fn new(name: impl Into<String>, kind: AttributeKind, visibility: Visibility) -> Self {
        Self {
            name: name.into(),
            kind,
            visibility,
        }
    }

    /// Tag used when the attribute is rendered as a child element:
    /// `description` becomes `<Description>`.
    pub fn element_tag(&self) -> String {
        capitalize(&self.name)
    }
}

/// Export semantics a type can carry. The engine itself is agnostic of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeRole {
    /// Each element yields a document template.
    WorkProduct,
    /// Elements appear in the project plan skeleton.
    Plan,
}

impl TypeRole {
    pub fn keyword(self) -> &'static str {
        match self {
            TypeRole::WorkProduct => "work-product",
            TypeRole::Plan => "plan",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementType {
    pub name: String,
    pub is_endpoint: bool,
    pub roles: BTreeSet<TypeRole>,
    /// Declared supertype. Generalization is parsed but rejected by validation.
    pub supertype: Option<String>,
    pub attributes: Vec<AttributeDef>,
}

impl ElementType {
    pub fn new(name: impl Into<String>, is_endpoint: bool) -> Self {
        Self {
            name: name.into(),
            is_endpoint,
            roles: BTreeSet::new(),
            supertype: None,
            attributes: Vec::new(),
        }
    }

    pub fn with_attribute(
        mut self,
        name: impl Into<String>,
        kind: AttributeKind,
        visibility: Visibility,
    ) -> Self {
        self.attributes.push(AttributeDef::new(name, kind, visibility));
        self
    }

    pub fn with_role(mut self, role: TypeRole) -> Self {
        self.roles.insert(role);
        self
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeDef> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn has_role(&self, role: TypeRole) -> bool {
        self.roles.contains(&role)
    }

    /// Lowercase route segment, e.g. `discipline`.
    pub fn segment(&self) -> String {
        self.name.to_lowercase()
    }

    /// Name of the path parameter in by-id routes, e.g. `disciplineId`.
    pub fn id_param(&self) -> String {
        format!("{}Id", self.segment())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AssociationKind {
    Composition,
    Aggregation,
    Directed,
}

impl AssociationKind {
    pub fn keyword(self) -> &'static str {
        match self {
            AssociationKind::Composition => "composition",
            AssociationKind::Aggregation => "aggregation",
            AssociationKind::Directed => "directed",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "composition" => Some(AssociationKind::Composition),
            "aggregation" => Some(AssociationKind::Aggregation),
            "directed" => Some(AssociationKind::Directed),
            _ => None,
        }
    }
}

/// Upper bound of the target end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Multiplicity {
    One,
    Many,
}

impl Multiplicity {
    pub fn keyword(self) -> &'static str {
        match self {
            Multiplicity::One => "1",
            Multiplicity::Many => "many",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Association {
    pub source: String,
    pub target: String,
    pub kind: AssociationKind,
    pub name: Option<String>,
    pub upper: Multiplicity,
}

impl Association {
    pub fn new(
        source: impl Into<String>,
        kind: AssociationKind,
        name: Option<&str>,
        upper: Multiplicity,
        target: impl Into<String>,
    ) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            kind,
            name: name.map(str::to_owned),
            upper,
        }
    }

    /// Route segment below the source's by-id route. Compositions navigate by
    /// target type, named associations by their name.
    pub fn segment(&self) -> String {
        match (self.kind, &self.name) {
            (AssociationKind::Composition, _) | (_, None) => self.target.to_lowercase(),
            (_, Some(name)) => name.to_lowercase(),
        }
    }

    /// Tag of a single target node in a response.
    pub fn node_tag(&self) -> &str {
        match (self.kind, &self.name) {
            (AssociationKind::Directed, Some(name)) => name,
            _ => &self.target,
        }
    }

    pub fn wrapper_tag(&self) -> String {
        format!("{}s", self.node_tag())
    }

    /// The tag this association contributes directly below its source node.
    pub fn child_tag(&self) -> String {
        match self.upper {
            Multiplicity::Many => self.wrapper_tag(),
            Multiplicity::One => self.node_tag().to_owned(),
        }
    }

    pub fn is_wrapped(&self) -> bool {
        self.upper == Multiplicity::Many
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metamodel {
    name: String,
    types: IndexMap<String, ElementType>,
    associations: Vec<Association>,
}

impl Metamodel {
    /// Assembles a metamodel, checking the structural invariants that do not
    /// depend on conventions: at least one type, unique type names and
    /// associations that only mention declared types.
    pub fn new(
        name: impl Into<String>,
        types: Vec<ElementType>,
        associations: Vec<Association>,
    ) -> Result<Self, MetamodelError> {
        if types.is_empty() {
            return Err(MetamodelError::new(MetamodelErrorKind::NoElementTypes));
        }
        let mut map = IndexMap::with_capacity(types.len());
        for ty in types {
            if ty.name.is_empty() {
                return Err(MetamodelError::new(MetamodelErrorKind::Syntax(
                    "element type name is empty".into(),
                )));
            }
            if map.contains_key(&ty.name) {
                return Err(MetamodelError::new(MetamodelErrorKind::DuplicateType(
                    ty.name,
                )));
            }
            map.insert(ty.name.clone(), ty);
        }
        for ty in map.values() {
            if let Some(sup) = &ty.supertype {
                if !map.contains_key(sup) {
                    return Err(MetamodelError::new(
                        MetamodelErrorKind::DanglingReference(sup.clone()),
                    ));
                }
            }
        }
        for assoc in &associations {
            for end in [&assoc.source, &assoc.target] {
                if !map.contains_key(end) {
                    return Err(MetamodelError::new(
                        MetamodelErrorKind::DanglingReference(end.clone()),
                    ));
                }
            }
        }
        Ok(Self {
            name: name.into(),
            types: map,
            associations,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn types(&self) -> impl Iterator<Item = &ElementType> {
        self.types.values()
    }

    pub fn element_type(&self, name: &str) -> Option<&ElementType> {
        self.types.get(name)
    }

    pub fn associations(&self) -> &[Association] {
        &self.associations
    }

    /// Outgoing associations of a type in declaration order.
    pub fn outgoing<'a>(&'a self, type_name: &'a str) -> impl Iterator<Item = &'a Association> {
        self.associations
            .iter()
            .filter(move |a| a.source == type_name)
    }

    pub fn association_by_segment(&self, type_name: &str, segment: &str) -> Option<&Association> {
        self.associations
            .iter()
            .find(|a| a.source == type_name && a.segment() == segment)
    }

    /// Endpoint type addressed by a lowercase route segment.
    pub fn endpoint_by_segment(&self, segment: &str) -> Option<&ElementType> {
        self.types
            .values()
            .find(|t| t.is_endpoint && t.segment() == segment)
    }

    pub fn types_with_role(&self, role: TypeRole) -> impl Iterator<Item = &ElementType> {
        self.types.values().filter(move |t| t.has_role(role))
    }
}

/// Writes the metamodel back in its description format. Parsing the output
/// yields an equal metamodel.
impl fmt::Display for Metamodel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name: {}", self.name)?;
        writeln!(f)?;
        writeln!(f, "types:")?;
        for ty in self.types.values() {
            write!(f, "  {}", ty.name)?;
            if let Some(sup) = &ty.supertype {
                write!(f, " extends {sup}")?;
            }
            let mut tags: Vec<&str> = Vec::new();
            if ty.is_endpoint {
                tags.push("endpoint");
            }
            tags.extend(ty.roles.iter().map(|r| r.keyword()));
            if !tags.is_empty() {
                write!(f, " [{}]", tags.join(", "))?;
            }
            writeln!(f, ":")?;
            for attr in &ty.attributes {
                writeln!(
                    f,
                    "    {}: {} {}",
                    attr.name,
                    attr.kind.keyword(),
                    attr.visibility.keyword()
                )?;
            }
        }
        if !self.associations.is_empty() {
            writeln!(f)?;
            writeln!(f, "associations:")?;
            for a in &self.associations {
                write!(f, "  {} {}(", a.source, a.kind.keyword())?;
                if let Some(name) = &a.name {
                    write!(f, "{name}, ")?;
                }
                writeln!(f, "{}) {}", a.upper.keyword(), a.target)?;
            }
        }
        Ok(())
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}
