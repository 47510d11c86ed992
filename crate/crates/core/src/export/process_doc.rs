use std::fmt::Write as _;

use base64::Engine as _;

use super::{reachable, ExportBundle, ExportKind};
use crate::metamodel::{AssociationKind, AttributeDef, AttributeKind, ElementType, Metamodel};
use crate::model::{ModelSnapshot, ProcessElement};
use crate::projection::{visible_attributes, Access};
use crate::tailoring::{tailor, TailoringProfile};
use crate::xml;

pub const INDEX_PAGE: &str = "index.html";

/// Bundle-relative path of the page documenting an endpoint element.
pub fn page_path(ty: &ElementType, id: &str) -> String {
    format!("{}/{id}.html", ty.segment())
}

/// Static HTML site of the tailored process: an index plus one page per
/// endpoint element. Every association becomes a hyperlink (endpoint
/// targets) or an embedded block (other targets); images referencing model
/// assets are inlined as data URIs.
pub fn generate_process_doc(
    snapshot: &ModelSnapshot,
    mm: &Metamodel,
    profile: &TailoringProfile,
    generated_at: u64,
) -> ExportBundle {
    let tailored = tailor(snapshot, profile);
    let mut bundle = ExportBundle::new(ExportKind::ProcessDoc, snapshot, profile, generated_at);
    let site = Site { mm, snapshot: &tailored };

    let mut pages = Vec::new();
    for element in reachable(&tailored, mm) {
        let Some(ty) = mm.element_type(&element.type_name).filter(|t| t.is_endpoint) else {
            continue;
        };
        bundle
            .files
            .insert(page_path(ty, &element.id), site.element_page(ty, element).into_bytes());
        pages.push((ty, element));
    }
    bundle
        .files
        .insert(INDEX_PAGE.into(), site.index_page(profile, &pages).into_bytes());
    bundle
}

struct Site<'a> {
    mm: &'a Metamodel,
    snapshot: &'a ModelSnapshot,
}

impl Site<'_> {
    fn index_page(&self, profile: &TailoringProfile, pages: &[(&ElementType, &ProcessElement)]) -> String {
        let title = format!("Process {} {}", self.snapshot.variant(), self.snapshot.version());
        let mut body = format!("<h1>{}</h1>\n", escape_text(&title));
        if !profile.is_empty() {
            body.push_str("<h2>Project characteristics</h2>\n<ul>\n");
            for (key, value) in profile.selections() {
                let label = self
                    .snapshot
                    .characteristic(key)
                    .map_or(key.as_str(), |c| c.label.as_str());
                let _ = writeln!(body, "<li>{}: {}</li>", escape_text(label), escape_text(value));
            }
            body.push_str("</ul>\n");
        }
        for ty in self.mm.types().filter(|t| t.is_endpoint) {
            let of_type: Vec<_> = pages.iter().filter(|(t, _)| t.name == ty.name).collect();
            if of_type.is_empty() {
                continue;
            }
            let _ = writeln!(body, "<h2>{}</h2>\n<ul>", escape_text(&ty.name));
            for (ty, element) in of_type {
                let _ = writeln!(
                    body,
                    "<li><a href=\"{}\">{}</a></li>",
                    escape_attr(&page_path(ty, &element.id)),
                    escape_text(element.name())
                );
            }
            body.push_str("</ul>\n");
        }
        html_page(&title, &body)
    }

    fn element_page(&self, ty: &ElementType, element: &ProcessElement) -> String {
        let title = format!("{}: {}", ty.name, element.name());
        let mut body = String::from("<p><a href=\"../index.html\">Process overview</a></p>\n");
        let _ = writeln!(body, "<h1 id=\"{}\">{}</h1>", escape_attr(&element.id), escape_text(&title));

        if let Some(parent) = self.snapshot.parent(&element.id) {
            let _ = writeln!(body, "<p>Part of {}</p>", self.link_or_name(parent));
        }
        body.push_str(&self.attribute_list(element, visible_attributes(ty, Access::ById)));

        for assoc in self.mm.outgoing(&ty.name) {
            let targets = element.targets(&assoc.segment());
            let heading = if assoc.is_wrapped() { assoc.wrapper_tag() } else { assoc.node_tag().to_owned() };
            let _ = writeln!(body, "<h2>{}</h2>", escape_text(&heading));
            if targets.is_empty() {
                body.push_str("<p>None.</p>\n");
                continue;
            }
            let access = match assoc.kind {
                AssociationKind::Composition => Access::EmbeddedComposed,
                AssociationKind::Aggregation => Access::EmbeddedAggregated,
                AssociationKind::Directed => Access::Reference,
            };
            body.push_str("<ul>\n");
            for target in targets.iter().filter_map(|id| self.snapshot.element(id)) {
                let target_ty = self.mm.element_type(&target.type_name);
                match target_ty {
                    Some(t) if t.is_endpoint => {
                        let _ = writeln!(body, "<li>{}</li>", self.link_or_name(target));
                    }
                    _ => {
                        let _ = write!(
                            body,
                            "<li id=\"{}\">{}\n",
                            escape_attr(&target.id),
                            escape_text(target.name())
                        );
                        if let Some(t) = target_ty {
                            body.push_str(&self.attribute_list(target, visible_attributes(t, access)));
                        }
                        body.push_str("</li>\n");
                    }
                }
            }
            body.push_str("</ul>\n");
        }
        html_page(&title, &body)
    }

    fn link_or_name(&self, element: &ProcessElement) -> String {
        match self.mm.element_type(&element.type_name) {
            Some(ty) if ty.is_endpoint => format!(
                "<a href=\"../{}\">{}</a>",
                escape_attr(&page_path(ty, &element.id)),
                escape_text(element.name())
            ),
            _ => escape_text(element.name()),
        }
    }

    fn attribute_list(&self, element: &ProcessElement, attributes: Vec<&AttributeDef>) -> String {
        let mut out = String::from("<dl>\n");
        for attr in attributes {
            let Some(value) = element.attribute(&attr.name) else {
                continue;
            };
            let rendered = match attr.kind {
                AttributeKind::HtmlText => self.inline_assets(value),
                _ => escape_text(value),
            };
            let _ = writeln!(out, "<dt>{}</dt>\n<dd>{rendered}</dd>", escape_text(&attr.element_tag()));
        }
        out.push_str("</dl>\n");
        out
    }

    /// Rewrites `src` attributes pointing at `/assets/{id}` into data URIs so
    /// the bundle is self-contained. Unknown assets are left untouched.
    fn inline_assets(&self, html: &str) -> String {
        let mut out = String::with_capacity(html.len());
        let mut rest = html;
        while let Some(pos) = find_asset_src(rest) {
            let (before, tail) = rest.split_at(pos.value_start);
            out.push_str(before);
            let value = &tail[..pos.value_len];
            let asset_id = value.rsplit('/').next().unwrap_or_default();
            match self.snapshot.get_binary(asset_id) {
                Ok(asset) => {
                    let _ = write!(
                        out,
                        "data:{};base64,{}",
                        asset.media_type,
                        base64::engine::general_purpose::STANDARD.encode(&asset.bytes)
                    );
                }
                Err(_) => out.push_str(value),
            }
            rest = &tail[pos.value_len..];
        }
        out.push_str(rest);
        out
    }
}

struct AssetSrc {
    value_start: usize,
    value_len: usize,
}

fn find_asset_src(html: &str) -> Option<AssetSrc> {
    let mut from = 0;
    while let Some(rel) = html[from..].find("src=") {
        let quote_at = from + rel + 4;
        let quote = html[quote_at..].chars().next()?;
        if quote == '"' || quote == '\'' {
            let value_start = quote_at + 1;
            if let Some(len) = html[value_start..].find(quote) {
                if html[value_start..value_start + len].starts_with("/assets/") {
                    return Some(AssetSrc { value_start, value_len: len });
                }
            }
        }
        from = quote_at;
    }
    None
}

fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    xml::escape_text(&mut out, s);
    out
}

fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    xml::escape_attr(&mut out, s);
    out
}

fn html_page(title: &str, body: &str) -> String {
    format!(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>{}</title>\n</head>\n<body>\n{body}</body>\n</html>\n",
        escape_text(title)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::fixture_a;

    fn page(bundle: &ExportBundle, path: &str) -> String {
        String::from_utf8(bundle.files[path].clone()).unwrap()
    }

    #[test]
    fn one_page_per_endpoint_element() {
        let (mm, snap) = fixture_a();
        let bundle = generate_process_doc(&snap, &mm, &TailoringProfile::empty(), 0);
        let paths: Vec<&str> = bundle.files.keys().map(String::as_str).collect();
        assert_eq!(
            paths,
            [
                "bibliographyitem/b1.html",
                "discipline/d1.html",
                "index.html",
                "methodreference/m1.html",
                "tool/t1.html",
                "workproduct/wp1.html",
                "workproduct/wp2.html",
            ]
        );
    }

    #[test]
    fn tailoring_drops_pages_and_links() {
        let (mm, snap) = fixture_a();
        let maint = TailoringProfile::empty().with("projectType", "maint");
        let bundle = generate_process_doc(&snap, &mm, &maint, 0);
        assert!(!bundle.files.contains_key("workproduct/wp1.html"));
        let d1 = page(&bundle, "discipline/d1.html");
        assert!(d1.contains("href=\"../workproduct/wp2.html\""));
        assert!(!d1.contains("wp1"));
        assert!(page(&bundle, "index.html").contains("Project type: maint"));
    }

    #[test]
    fn images_are_inlined() {
        let (mm, snap) = fixture_a();
        let bundle = generate_process_doc(&snap, &mm, &TailoringProfile::empty(), 0);
        let d1 = page(&bundle, "discipline/d1.html");
        assert!(d1.contains("src=\"data:image/png;base64,iVBOR"));
        assert!(!d1.contains("/assets/"));
    }

    #[test]
    fn pages_show_by_id_attributes_and_parents() {
        let (mm, snap) = fixture_a();
        let bundle = generate_process_doc(&snap, &mm, &TailoringProfile::empty(), 0);
        let wp1 = page(&bundle, "workproduct/wp1.html");
        assert!(wp1.contains("<dt>AcceptanceCriteria</dt>"));
        assert!(wp1.contains("Part of <a href=\"../discipline/d1.html\">Planning</a>"));
        assert!(wp1.contains("<a href=\"../tool/t1.html\">Issue Tracker</a>"));
        let m1 = page(&bundle, "methodreference/m1.html");
        assert!(m1.contains("<h2>BibItemRefs</h2>"));
        assert!(m1.contains("href=\"../bibliographyitem/b1.html\""));
    }

    #[test]
    fn src_scanner() {
        let html = r#"<p><img alt="x" src='/assets/a'/><img src="http://x/y"/><img src="/assets/v/1/b"></p>"#;
        let first = find_asset_src(html).unwrap();
        assert_eq!(&html[first.value_start..first.value_start + first.value_len], "/assets/a");
        assert!(find_asset_src("no images").is_none());
        assert!(find_asset_src("src=").is_none());
    }
}
