//! Brute-force evaluation of requests straight from the navigation,
//! visibility, multiplicity and tailoring rules. Every question is answered
//! by scanning the whole model; nothing is indexed or cached.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{Assoc, Element, Link, Model, Type, Vis};
use crate::tree::Tree;

pub type Profile = BTreeMap<String, String>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expected {
    Ok(Tree),
    /// No element of the addressed type has the id.
    UnknownId,
    /// The element exists but is not part of the tailored process.
    Filtered,
    /// The path matches no route at all.
    NoRoute,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Seen {
    Collection,
    ById,
    Composed,
    Aggregated,
    Referenced,
}

fn shows(seen: Seen, vis: Vis) -> bool {
    match seen {
        Seen::ById => true,
        Seen::Aggregated => vis == Vis::Public || vis == Vis::Protected,
        Seen::Collection | Seen::Composed | Seen::Referenced => vis == Vis::Public,
    }
}

impl Model {
    /// Route templates the metamodel implies, e.g. `api/tool/{toolId}/vendors`.
    pub fn route_patterns(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for t in self.types.iter().filter(|t| t.endpoint) {
            let seg = t.name.to_lowercase();
            out.insert(format!("api/{seg}"));
            out.insert(format!("api/{seg}/{{{seg}Id}}"));
            for a in self.assocs.iter().filter(|a| a.source == t.name) {
                if a.kind == Link::Directed && a.name.is_none() {
                    continue;
                }
                out.insert(format!("api/{seg}/{{{seg}Id}}/{}", a.segment()));
            }
        }
        out
    }

    /// Concrete request paths worth asking: every collection, every by-id
    /// and nested route for each element of the type, one id of another type
    /// and one id that does not exist.
    pub fn request_paths(&self) -> Vec<String> {
        let mut out = Vec::new();
        for t in self.types.iter().filter(|t| t.endpoint) {
            let seg = t.name.to_lowercase();
            out.push(format!("api/{seg}"));
            let mut ids: Vec<&str> = self
                .elements
                .iter()
                .filter(|e| e.type_name == t.name)
                .map(|e| e.id.as_str())
                .collect();
            if let Some(foreign) = self.elements.iter().find(|e| e.type_name != t.name) {
                ids.push(&foreign.id);
            }
            ids.push("no-such-id");
            let segments: Vec<String> = self
                .assocs
                .iter()
                .filter(|a| a.source == t.name && !(a.kind == Link::Directed && a.name.is_none()))
                .map(Assoc::segment)
                .collect();
            for id in ids {
                out.push(format!("api/{seg}/{id}"));
                for s in &segments {
                    out.push(format!("api/{seg}/{id}/{s}"));
                }
            }
        }
        out
    }

    fn parent_of(&self, id: &str) -> Option<&Element> {
        self.elements.iter().find(|p| {
            self.assocs.iter().enumerate().any(|(i, a)| {
                a.kind == Link::Composition && a.source == p.type_name && p.targets(i).iter().any(|t| t == id)
            })
        })
    }

    fn applicable(e: &Element, profile: &Profile) -> bool {
        e.condition.iter().all(|(key, accepted)| match profile.get(key) {
            None => true,
            Some(v) => accepted.contains(v),
        })
    }

    /// An element stays in the tailored process when it and every element
    /// that (transitively) composes it are applicable.
    pub fn included(&self, e: &Element, profile: &Profile) -> bool {
        if !Self::applicable(e, profile) {
            return false;
        }
        match self.parent_of(&e.id) {
            Some(p) => self.included(p, profile),
            None => true,
        }
    }

    pub fn included_ids(&self, profile: &Profile) -> BTreeSet<String> {
        self.elements
            .iter()
            .filter(|e| self.included(e, profile))
            .map(|e| e.id.clone())
            .collect()
    }

    /// Ids the API can ever show under `profile`: included elements of
    /// endpoint types and included elements they link to.
    pub fn reachable_ids(&self, profile: &Profile) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for e in &self.elements {
            if !self.ty(&e.type_name).endpoint || !self.included(e, profile) {
                continue;
            }
            out.insert(e.id.clone());
            for (i, targets) in &e.links {
                if self.assocs[*i].source != e.type_name {
                    continue;
                }
                for t in targets {
                    if let Some(te) = self.element(t) {
                        if self.included(te, profile) {
                            out.insert(t.clone());
                        }
                    }
                }
            }
        }
        out
    }

    fn node(&self, e: &Element, t: &Type, seen: Seen, tag: &str) -> Tree {
        let mut node = Tree::new(tag);
        for a in t.attrs.iter().filter(|a| a.vis == Vis::Public && shows(seen, a.vis)) {
            if let Some(v) = e.value(&a.name) {
                node = node.attr(a.name.clone(), v);
            }
        }
        for a in t.attrs.iter().filter(|a| a.vis != Vis::Public && shows(seen, a.vis)) {
            if let Some(v) = e.value(&a.name) {
                let mut tag = a.name.clone();
                tag[..1].make_ascii_uppercase();
                node = node.child(Tree::new(tag).text(v));
            }
        }
        node
    }

    fn association_node(&self, e: &Element, index: usize, profile: &Profile) -> Option<Tree> {
        let a = &self.assocs[index];
        let target_type = self.ty(&a.target);
        let seen = match a.kind {
            Link::Composition => Seen::Composed,
            Link::Aggregation => Seen::Aggregated,
            Link::Directed => Seen::Referenced,
        };
        let tag = a.tag();
        let nodes: Vec<Tree> = e
            .targets(index)
            .iter()
            .filter_map(|id| self.element(id))
            .filter(|t| self.included(t, profile))
            .map(|t| self.node(t, target_type, seen, &tag))
            .collect();
        if a.many {
            let mut wrapper = Tree::new(format!("{tag}s"));
            wrapper.children = nodes;
            Some(wrapper)
        } else {
            nodes.into_iter().next()
        }
    }

    /// What the API must answer for `path` (without leading slash or
    /// variant prefix) under `profile`.
    pub fn expect(&self, path: &str, profile: &Profile) -> Expected {
        let parts: Vec<&str> = path.split('/').collect();
        if parts.len() < 2 || parts.len() > 4 || parts[0] != "api" {
            return Expected::NoRoute;
        }
        let Some(t) = self
            .types
            .iter()
            .find(|t| t.endpoint && t.name.to_lowercase() == parts[1])
        else {
            return Expected::NoRoute;
        };
        if parts.len() == 2 {
            let mut root = Tree::new("response");
            for e in self.elements.iter().filter(|e| e.type_name == t.name) {
                if self.included(e, profile) {
                    root = root.child(self.node(e, t, Seen::Collection, &t.name));
                }
            }
            return Expected::Ok(root);
        }
        let assoc = if parts.len() == 4 {
            match self.assocs.iter().position(|a| {
                a.source == t.name && !(a.kind == Link::Directed && a.name.is_none()) && a.segment() == parts[3]
            }) {
                Some(i) => Some(i),
                None => return Expected::NoRoute,
            }
        } else {
            None
        };
        let Some(e) = self
            .elements
            .iter()
            .find(|e| e.id == parts[2] && e.type_name == t.name)
        else {
            return Expected::UnknownId;
        };
        if !self.included(e, profile) {
            return Expected::Filtered;
        }
        match assoc {
            None => {
                let mut root = self.node(e, t, Seen::ById, &t.name);
                for (i, _) in self.assocs.iter().enumerate().filter(|(_, a)| a.source == t.name) {
                    if let Some(n) = self.association_node(e, i, profile) {
                        root = root.child(n);
                    }
                }
                Expected::Ok(root)
            }
            Some(i) => {
                let mut source = self.node(e, t, Seen::Collection, &t.name);
                if let Some(n) = self.association_node(e, i, profile) {
                    source = source.child(n);
                }
                Expected::Ok(Tree::new("response").child(source))
            }
        }
    }
}
