use std::collections::BTreeMap;
use std::fmt;

/// Order-insensitive for attributes, order-sensitive for children: the
/// comparison a client of the XML API can rely on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    pub tag: String,
    pub attrs: BTreeMap<String, String>,
    pub text: Option<String>,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn new(tag: impl Into<String>) -> Self {
        Self {
            tag: tag.into(),
            attrs: BTreeMap::new(),
            text: None,
            children: Vec::new(),
        }
    }

    pub fn attr(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.attrs.insert(name.into(), value.into());
        self
    }

    pub fn text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }

    pub fn child(mut self, child: Tree) -> Self {
        self.children.push(child);
        self
    }

    /// Parses a document; whitespace between elements is insignificant.
    pub fn parse(xml: &str) -> Result<Tree, String> {
        let doc = roxmltree::Document::parse(xml).map_err(|e| e.to_string())?;
        Ok(Self::from_node(doc.root_element()))
    }

    fn from_node(node: roxmltree::Node<'_, '_>) -> Tree {
        let mut tree = Tree::new(node.tag_name().name());
        for a in node.attributes() {
            tree.attrs.insert(a.name().to_owned(), a.value().to_owned());
        }
        let mut text = String::new();
        for child in node.children() {
            if child.is_element() {
                tree.children.push(Self::from_node(child));
            } else if let Some(t) = child.text() {
                text.push_str(t);
            }
        }
        if tree.children.is_empty() && !text.is_empty() {
            tree.text = Some(text);
        }
        tree
    }

    /// Every `id` attribute in the tree, depth first.
    pub fn ids(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_ids(&mut out);
        out
    }

    fn collect_ids<'a>(&'a self, out: &mut Vec<&'a str>) {
        if let Some(id) = self.attrs.get("id") {
            out.push(id);
        }
        for c in &self.children {
            c.collect_ids(out);
        }
    }

    pub fn find(&self, tag: &str) -> Option<&Tree> {
        self.children.iter().find(|c| c.tag == tag)
    }

    fn write_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        write!(f, "{:indent$}<{}", "", self.tag, indent = depth * 2)?;
        for (k, v) in &self.attrs {
            write!(f, " {k}={v:?}")?;
        }
        match (&self.text, self.children.is_empty()) {
            (Some(t), _) => writeln!(f, ">{t:?}</{}>", self.tag),
            (None, true) => writeln!(f, "/>"),
            (None, false) => {
                writeln!(f, ">")?;
                for c in &self.children {
                    c.write_indented(f, depth + 1)?;
                }
                writeln!(f, "{:indent$}</{}>", "", self.tag, indent = depth * 2)
            }
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_indented(f, 0)
    }
}
