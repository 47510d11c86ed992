use std::fmt::Write as _;

use super::{reachable, ExportBundle, ExportError, ExportKind};
use crate::metamodel::{AttributeKind, Metamodel, TypeRole, Visibility};
use crate::model::ModelSnapshot;
use crate::tailoring::{tailor, TailoringProfile};

/// One Markdown template per tailored element of a work-product-role type:
/// the element name as title, its description, and one section per
/// protected attribute for the project to fill in.
pub fn generate_doc_templates(
    snapshot: &ModelSnapshot,
    mm: &Metamodel,
    profile: &TailoringProfile,
    generated_at: u64,
) -> Result<ExportBundle, ExportError> {
    if mm.types_with_role(TypeRole::WorkProduct).next().is_none() {
        return Err(ExportError::Unsupported {
            kind: ExportKind::DocTemplates,
            role: TypeRole::WorkProduct.keyword(),
        });
    }
    let tailored = tailor(snapshot, profile);
    let mut bundle = ExportBundle::new(ExportKind::DocTemplates, snapshot, profile, generated_at);
    for element in reachable(&tailored, mm) {
        let Some(ty) = mm
            .element_type(&element.type_name)
            .filter(|t| t.has_role(TypeRole::WorkProduct))
        else {
            continue;
        };
        let mut doc = format!("# {}\n\n", element.name());
        let _ = writeln!(doc, "_{} `{}`_\n", ty.name, element.id);
        if let Some(description) = ty.attribute("description").and_then(|a| {
            let value = element.attribute(&a.name)?;
            Some(match a.kind {
                AttributeKind::HtmlText => html_to_text(value),
                _ => value.trim().to_owned(),
            })
        }) {
            if !description.is_empty() {
                let _ = writeln!(doc, "{description}\n");
            }
        }
        for attr in ty.attributes.iter().filter(|a| a.visibility == Visibility::Protected) {
            let _ = writeln!(doc, "## {}\n", attr.element_tag());
            if let Some(guidance) = element.attribute(&attr.name) {
                let _ = writeln!(doc, "> {}\n", guidance.trim());
            }
            doc.push_str("_To be completed._\n\n");
        }
        let doc = format!("{}\n", doc.trim_end());
        bundle
            .files
            .insert(format!("templates/{}.md", element.id), doc.into_bytes());
    }
    Ok(bundle)
}

/// Plain text of an HTML fragment: tags dropped, the common entities decoded,
/// whitespace collapsed.
fn html_to_text(html: &str) -> String {
    let mut text = String::with_capacity(html.len());
    let mut in_tag = false;
    for c in html.chars() {
        match c {
            '<' => {
                in_tag = true;
                text.push(' ');
            }
            '>' if in_tag => in_tag = false,
            _ if !in_tag => text.push(c),
            _ => {}
        }
    }
    let decoded = text
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&quot;", "\"")
        .replace("&#39;", "'")
        .replace("&apos;", "'")
        .replace("&nbsp;", " ")
        .replace("&amp;", "&");
    decoded.split_whitespace().collect::<Vec<_>>().join(" ")
}
