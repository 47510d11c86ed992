use base64::Engine as _;

use super::ModelSnapshot;
use crate::xml::{escape_attr, escape_text};

/// Writes a snapshot as a self-contained instance document (assets inlined as
/// base64). Ingesting the output reproduces an equal snapshot.
pub fn serialize_model(snapshot: &ModelSnapshot) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<ProcessModel");
    attr(&mut out, "variant", &snapshot.variant);
    attr(&mut out, "version", &snapshot.version);
    out.push_str(">\n");

    for c in &snapshot.characteristics {
        out.push_str("  <Characteristic");
        attr(&mut out, "key", &c.key);
        attr(&mut out, "label", &c.label);
        out.push_str(">\n");
        for v in &c.values {
            out.push_str("    <Value");
            attr(&mut out, "id", v);
            out.push_str("/>\n");
        }
        out.push_str("  </Characteristic>\n");
    }
    for (id, asset) in &snapshot.assets {
        out.push_str("  <Asset");
        attr(&mut out, "id", id);
        attr(&mut out, "mediaType", &asset.media_type);
        attr(&mut out, "encoding", "base64");
        out.push('>');
        out.push_str(&base64::engine::general_purpose::STANDARD.encode(&asset.bytes));
        out.push_str("</Asset>\n");
    }

    for e in snapshot.elements.values() {
        out.push_str("  <");
        out.push_str(&e.type_name);
        for (name, value) in &e.attribute_values {
            attr(&mut out, name, value);
        }
        let empty = e.children.is_empty() && e.references.is_empty() && e.applicability.is_none();
        if empty {
            out.push_str("/>\n");
            continue;
        }
        out.push_str(">\n");
        for (tag, links) in [("Children", &e.children), ("Refs", &e.references)] {
            for (segment, ids) in links {
                out.push_str("    <");
                out.push_str(tag);
                attr(&mut out, "assoc", segment);
                out.push('>');
                escape_text(&mut out, &ids.join(" "));
                out.push_str("</");
                out.push_str(tag);
                out.push_str(">\n");
            }
        }
        if let Some(cond) = &e.applicability {
            for (key, values) in &cond.clauses {
                out.push_str("    <Condition");
                attr(&mut out, "key", key);
                attr(&mut out, "values", &values.iter().cloned().collect::<Vec<_>>().join(","));
                out.push_str("/>\n");
            }
        }
        out.push_str("  </");
        out.push_str(&e.type_name);
        out.push_str(">\n");
    }
    out.push_str("</ProcessModel>\n");
    out
}

fn attr(out: &mut String, name: &str, value: &str) {
    out.push(' ');
    out.push_str(name);
    out.push_str("=\"");
    escape_attr(out, value);
    out.push('"');
}
