//! The test kit's own picture of a process model. Deliberately plain data so
//! the oracle shares no code with the engine under test.

use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    String,
    Integer,
    Html,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Vis {
    Public,
    Protected,
    Private,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Link {
    Composition,
    Aggregation,
    Directed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attr {
    pub name: String,
    pub kind: Kind,
    pub vis: Vis,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Type {
    pub name: String,
    pub endpoint: bool,
    pub work_product: bool,
    pub plan: bool,
    pub attrs: Vec<Attr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assoc {
    pub source: String,
    pub kind: Link,
    pub name: Option<String>,
    pub many: bool,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Characteristic {
    pub key: String,
    pub label: String,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub id: String,
    pub type_name: String,
    /// Present attribute values, in declaration order.
    pub values: Vec<(String, String)>,
    /// Association index -> target ids.
    pub links: Vec<(usize, Vec<String>)>,
    /// Characteristic key -> accepted values.
    pub condition: Vec<(String, Vec<String>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub name: String,
    pub variant: String,
    pub version: String,
    pub types: Vec<Type>,
    pub assocs: Vec<Assoc>,
    pub characteristics: Vec<Characteristic>,
    pub elements: Vec<Element>,
}

impl Kind {
    fn keyword(self) -> &'static str {
        match self {
            Kind::String => "string",
            Kind::Integer => "integer",
            Kind::Html => "html-text",
        }
    }
}

impl Vis {
    fn keyword(self) -> &'static str {
        match self {
            Vis::Public => "public",
            Vis::Protected => "protected",
            Vis::Private => "private",
        }
    }
}

impl Link {
    fn keyword(self) -> &'static str {
        match self {
            Link::Composition => "composition",
            Link::Aggregation => "aggregation",
            Link::Directed => "directed",
        }
    }
}

impl Element {
    pub fn value(&self, attr: &str) -> Option<&str> {
        self.values
            .iter()
            .find(|(n, _)| n == attr)
            .map(|(_, v)| v.as_str())
    }

    pub fn targets(&self, assoc: usize) -> &[String] {
        self.links
            .iter()
            .find(|(i, _)| *i == assoc)
            .map(|(_, t)| t.as_slice())
            .unwrap_or_default()
    }
}

impl Assoc {
    /// URL segment under the source's by-id route.
    pub fn segment(&self) -> String {
        match (&self.kind, &self.name) {
            (Link::Composition, _) | (_, None) => self.target.to_lowercase(),
            (_, Some(n)) => n.to_lowercase(),
        }
    }

    pub fn tag(&self) -> String {
        match (&self.kind, &self.name) {
            (Link::Directed, Some(n)) => n.clone(),
            _ => self.target.clone(),
        }
    }
}

impl Model {
    pub fn ty(&self, name: &str) -> &Type {
        self.types
            .iter()
            .find(|t| t.name == name)
            .unwrap_or_else(|| panic!("type {name} not in model"))
    }

    pub fn element(&self, id: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.id == id)
    }

    /// The metamodel in the engine's text format.
    pub fn metamodel_text(&self) -> String {
        let mut out = format!("# generated\nname: {}\n\ntypes:\n", self.name);
        for t in &self.types {
            let mut tags = Vec::new();
            if t.endpoint {
                tags.push("endpoint");
            }
            if t.work_product {
                tags.push("work-product");
            }
            if t.plan {
                tags.push("plan");
            }
            if tags.is_empty() {
                let _ = writeln!(out, "  {}:", t.name);
            } else {
                let _ = writeln!(out, "  {} [{}]:", t.name, tags.join(", "));
            }
            for a in &t.attrs {
                let _ = writeln!(out, "    {}: {} {}", a.name, a.kind.keyword(), a.vis.keyword());
            }
        }
        if !self.assocs.is_empty() {
            out.push_str("\nassociations:\n");
            for a in &self.assocs {
                let upper = if a.many { "many" } else { "1" };
                let args = match &a.name {
                    Some(n) => format!("{n}, {upper}"),
                    None => upper.to_owned(),
                };
                let _ = writeln!(out, "  {} {}({args}) {}", a.source, a.kind.keyword(), a.target);
            }
        }
        out
    }

    /// The instance document in the engine's input format.
    pub fn model_xml(&self) -> String {
        let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            out,
            "<ProcessModel variant=\"{}\" version=\"{}\">",
            attr(&self.variant),
            attr(&self.version)
        );
        for c in &self.characteristics {
            let _ = writeln!(out, "  <Characteristic key=\"{}\" label=\"{}\">", attr(&c.key), attr(&c.label));
            for v in &c.values {
                let _ = writeln!(out, "    <Value id=\"{}\"/>", attr(v));
            }
            out.push_str("  </Characteristic>\n");
        }
        for e in &self.elements {
            let _ = write!(out, "  <{} id=\"{}\"", e.type_name, attr(&e.id));
            for (n, v) in &e.values {
                if n != "id" {
                    let _ = write!(out, " {n}=\"{}\"", attr(v));
                }
            }
            let links: Vec<_> = e.links.iter().filter(|(_, t)| !t.is_empty()).collect();
            if links.is_empty() && e.condition.is_empty() {
                out.push_str("/>\n");
                continue;
            }
            out.push_str(">\n");
            for (i, targets) in links {
                let a = &self.assocs[*i];
                let tag = if a.kind == Link::Composition { "Children" } else { "Refs" };
                let _ = writeln!(out, "    <{tag} assoc=\"{}\">{}</{tag}>", a.segment(), targets.join(" "));
            }
            for (key, values) in &e.condition {
                let _ = writeln!(out, "    <Condition key=\"{}\" values=\"{}\"/>", attr(key), values.join(","));
            }
            let _ = writeln!(out, "  </{}>", e.type_name);
        }
        out.push_str("</ProcessModel>\n");
        out
    }
}

fn attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\t' => out.push_str("&#9;"),
            _ => out.push(c),
        }
    }
    out
}
