//! Response documents and their XML wire form.

use crate::xml::{escape_attr, escape_text};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Content {
    Element(Node),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub tag: String,
    pub attributes: Vec<(String, String)>,
    pub children: Vec<Content>,
}

impl Node {
    pub fn new(tag: impl Into<String>) -> Self {
        Self {
            tag: tag.into(),
            attributes: Vec::new(),
            children: Vec::new(),
        }
    }

    pub fn attr(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.attributes.push((name.into(), value.into()));
        self
    }

    pub fn child(mut self, node: Node) -> Self {
        self.children.push(Content::Element(node));
        self
    }

    pub fn text(mut self, text: impl Into<String>) -> Self {
        self.children.push(Content::Text(text.into()));
        self
    }

    pub fn attribute(&self, name: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    pub fn elements(&self) -> impl Iterator<Item = &Node> {
        self.children.iter().filter_map(|c| match c {
            Content::Element(n) => Some(n),
            Content::Text(_) => None,
        })
    }

    pub fn find(&self, tag: &str) -> Option<&Node> {
        self.elements().find(|n| n.tag == tag)
    }

    /// Every `id` attribute in this subtree, in document order.
    pub fn ids(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_ids(&mut out);
        out
    }

    fn collect_ids<'a>(&'a self, out: &mut Vec<&'a str>) {
        if let Some(id) = self.attribute("id") {
            out.push(id);
        }
        for child in self.elements() {
            child.collect_ids(out);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResponseDoc {
    pub root: Node,
}

pub const XML_DECLARATION: &str = r#"<?xml version="1.0" encoding="UTF-8"?>"#;

/// Serializes with a declaration line and two-space indentation. Elements
/// holding text are written on one line so text content is preserved.
pub fn render_xml(doc: &ResponseDoc) -> Vec<u8> {
    let mut out = String::with_capacity(256);
    out.push_str(XML_DECLARATION);
    out.push('\n');
    write_node(&mut out, &doc.root, 0);
    out.into_bytes()
}

fn write_node(out: &mut String, node: &Node, depth: usize) {
    indent(out, depth);
    write_open(out, node);
    if node.children.is_empty() {
        out.push_str("/>\n");
        return;
    }
    out.push('>');
    let has_text = node.children.iter().any(|c| matches!(c, Content::Text(_)));
    if has_text {
        for c in &node.children {
            write_inline(out, c);
        }
    } else {
        out.push('\n');
        for child in node.elements() {
            write_node(out, child, depth + 1);
        }
        indent(out, depth);
    }
    write_close(out, node);
    out.push('\n');
}

fn write_inline(out: &mut String, content: &Content) {
    match content {
        Content::Text(t) => escape_text(out, t),
        Content::Element(n) => {
            write_open(out, n);
            if n.children.is_empty() {
                out.push_str("/>");
            } else {
                out.push('>');
                for c in &n.children {
                    write_inline(out, c);
                }
                write_close(out, n);
            }
        }
    }
}

fn write_open(out: &mut String, node: &Node) {
    out.push('<');
    out.push_str(&node.tag);
    for (name, value) in &node.attributes {
        out.push(' ');
        out.push_str(name);
        out.push_str("=\"");
        escape_attr(out, value);
        out.push('"');
    }
}

fn write_close(out: &mut String, node: &Node) {
    out.push_str("</");
    out.push_str(&node.tag);
    out.push('>');
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_response() {
        let doc = ResponseDoc {
            root: Node::new("response"),
        };
        assert_eq!(
            String::from_utf8(render_xml(&doc)).unwrap(),
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<response/>\n"
        );
    }

    #[test]
    fn nested_layout() {
        let doc = ResponseDoc {
            root: Node::new("Discipline")
                .attr("id", "d1")
                .child(Node::new("Number").text("1"))
                .child(Node::new("WorkProducts").child(Node::new("WorkProduct").attr("id", "wp1"))),
        };
        let xml = String::from_utf8(render_xml(&doc)).unwrap();
        assert_eq!(
            xml,
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
             <Discipline id=\"d1\">\n\
             \x20 <Number>1</Number>\n\
             \x20 <WorkProducts>\n\
             \x20   <WorkProduct id=\"wp1\"/>\n\
             \x20 </WorkProducts>\n\
             </Discipline>\n"
        );
        assert_eq!(render_xml(&doc), render_xml(&doc));
    }

    #[test]
    fn html_text_survives_a_reparse() {
        let html = "<p>Risk &amp; \"issue\" list</p><img src=\"/assets/logo\"/>";
        let doc = ResponseDoc {
            root: Node::new("Description").attr("note", "a<b & \"c\"\n").text(html),
        };
        let xml = String::from_utf8(render_xml(&doc)).unwrap();
        assert!(!xml.contains("<p>"));
        let parsed = roxmltree::Document::parse(&xml).unwrap();
        let root = parsed.root_element();
        assert_eq!(root.text(), Some(html));
        assert_eq!(root.attribute("note"), Some("a<b & \"c\"\n"));
    }
}
