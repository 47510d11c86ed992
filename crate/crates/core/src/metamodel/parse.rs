//! Reader for the metamodel description format:
//!
//! ```text
//! name: fixture-a
//!
//! types:
//!   Discipline [endpoint, plan]:
//!     id: string public
//!     number: integer private
//!
//! associations:
//!   Discipline composition(many) WorkProduct
//!   MethodReference directed(BibItemRef, many) BibliographyItem
//! ```

use std::collections::HashMap;

use super::{
    is_identifier, Association, AssociationKind, AttributeDef, AttributeKind, ElementType,
    Metamodel, MetamodelError, MetamodelErrorKind, Multiplicity, Position, TypeRole, Visibility,
};

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Types,
    Associations,
}

struct Line<'a> {
    number: usize,
    indent: usize,
    text: &'a str,
}

impl Line<'_> {
    fn pos(&self, offset: usize) -> Position {
        Position {
            line: self.number,
            column: self.indent + offset + 1,
        }
    }

    fn syntax(&self, offset: usize, msg: impl Into<String>) -> MetamodelError {
        MetamodelError::at(self.pos(offset), MetamodelErrorKind::Syntax(msg.into()))
    }
}

/// Parses a metamodel description document.
pub fn parse_metamodel(document: &str) -> Result<Metamodel, MetamodelError> {
    let mut name: Option<String> = None;
    let mut section = Section::None;
    let mut types: Vec<ElementType> = Vec::new();
    let mut type_positions: HashMap<String, Position> = HashMap::new();
    let mut header_indent = 0usize;
    let mut references: Vec<(String, Position)> = Vec::new();
    let mut associations = Vec::new();

    for (idx, raw) in document.lines().enumerate() {
        let content = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let content = content.trim_end();
        if content.trim().is_empty() {
            continue;
        }
        if let Some(col) = content.find('\t') {
            return Err(MetamodelError::at(
                Position {
                    line: idx + 1,
                    column: col + 1,
                },
                MetamodelErrorKind::Syntax("tabs are not allowed for indentation".into()),
            ));
        }
        let indent = content.len() - content.trim_start().len();
        let line = Line {
            number: idx + 1,
            indent,
            text: content.trim_start(),
        };

        if indent == 0 {
            if let Some(rest) = line.text.strip_prefix("name:") {
                if name.is_some() {
                    return Err(line.syntax(0, "`name` given twice"));
                }
                let value = rest.trim();
                if value.is_empty() || value.contains(char::is_whitespace) {
                    return Err(line.syntax(5, "metamodel name must be a single word"));
                }
                name = Some(value.to_owned());
                section = Section::None;
            } else if line.text == "types:" {
                section = Section::Types;
            } else if line.text == "associations:" {
                section = Section::Associations;
            } else {
                return Err(line.syntax(
                    0,
                    format!(
                        "unexpected `{}`; expected `name:`, `types:` or `associations:`",
                        line.text
                    ),
                ));
            }
            continue;
        }

        match section {
            Section::None => return Err(line.syntax(0, "indented line outside of a section")),
            Section::Types => {
                if let Some(header) = line.text.strip_suffix(':') {
                    let ty = parse_type_header(&line, header, &mut references)?;
                    if type_positions.contains_key(&ty.name) {
                        return Err(MetamodelError::at(
                            line.pos(0),
                            MetamodelErrorKind::DuplicateType(ty.name),
                        ));
                    }
                    type_positions.insert(ty.name.clone(), line.pos(0));
                    header_indent = indent;
                    types.push(ty);
                } else {
                    let Some(current) = types.last_mut() else {
                        return Err(line.syntax(0, "attribute outside of a type"));
                    };
                    if indent <= header_indent {
                        return Err(line.syntax(
                            0,
                            "attribute must be indented below its type (or type header lacks `:`)",
                        ));
                    }
                    current.attributes.push(parse_attribute(&line)?);
                }
            }
            Section::Associations => {
                associations.push(parse_association(&line, &mut references)?);
            }
        }
    }

    if types.is_empty() {
        return Err(MetamodelError::new(MetamodelErrorKind::NoElementTypes));
    }
    for (name, pos) in references {
        if !type_positions.contains_key(&name) {
            return Err(MetamodelError::at(
                pos,
                MetamodelErrorKind::DanglingReference(name),
            ));
        }
    }
    Metamodel::new(name.unwrap_or_else(|| "process".into()), types, associations)
}

fn parse_type_header(
    line: &Line<'_>,
    header: &str,
    references: &mut Vec<(String, Position)>,
) -> Result<ElementType, MetamodelError> {
    let (head, tags) = match header.find('[') {
        Some(open) => {
            let Some(close) = header.rfind(']') else {
                return Err(line.syntax(open, "unclosed `[`"));
            };
            if !header[close + 1..].trim().is_empty() {
                return Err(line.syntax(close + 1, "unexpected text after `]`"));
            }
            (&header[..open], Some((open + 1, &header[open + 1..close])))
        }
        None => (header, None),
    };

    let words: Vec<&str> = head.split_whitespace().collect();
    let (type_name, supertype) = match words.as_slice() {
        [name] => (*name, None),
        [name, "extends", sup] => (*name, Some(*sup)),
        _ => {
            return Err(line.syntax(
                0,
                "type header must be `Name [tags]:` or `Name extends Base [tags]:`",
            ))
        }
    };
    if !is_identifier(type_name) {
        return Err(line.syntax(0, format!("`{type_name}` is not a valid type name")));
    }
    let mut ty = ElementType::new(type_name, false);
    if let Some(sup) = supertype {
        let offset = head.find(sup).unwrap_or(0);
        if !is_identifier(sup) {
            return Err(line.syntax(offset, format!("`{sup}` is not a valid type name")));
        }
        references.push((sup.to_owned(), line.pos(offset)));
        ty.supertype = Some(sup.to_owned());
    }

    if let Some((start, tags)) = tags {
        for tag in tags.split(',') {
            let offset = start + tag.len() - tag.trim_start().len();
            match tag.trim() {
                "endpoint" => ty.is_endpoint = true,
                "work-product" => {
                    ty.roles.insert(TypeRole::WorkProduct);
                }
                "plan" => {
                    ty.roles.insert(TypeRole::Plan);
                }
                "" => {}
                other => return Err(line.syntax(offset, format!("unknown type tag `{other}`"))),
            }
        }
    }
    Ok(ty)
}

fn parse_attribute(line: &Line<'_>) -> Result<AttributeDef, MetamodelError> {
    let Some((name, rest)) = line.text.split_once(':') else {
        return Err(line.syntax(0, "expected `name: kind visibility`"));
    };
    let name = name.trim();
    if !is_identifier(name) {
        return Err(line.syntax(0, format!("`{name}` is not a valid attribute name")));
    }
    let rest_offset = name.len() + 1;
    let words: Vec<&str> = rest.split_whitespace().collect();
    let (kind_word, vis_word) = match words.as_slice() {
        [kind, vis] => (*kind, *vis),
        [_] => return Err(line.syntax(rest_offset, "missing visibility")),
        _ => return Err(line.syntax(rest_offset, "expected `kind visibility` after `:`")),
    };
    let kind_offset = rest_offset + rest.find(kind_word).unwrap_or(0);
    let kind = AttributeKind::from_keyword(kind_word).ok_or_else(|| {
        MetamodelError::at(
            line.pos(kind_offset),
            MetamodelErrorKind::UnknownKind(kind_word.into()),
        )
    })?;
    let vis_offset = rest_offset + rest.rfind(vis_word).unwrap_or(0);
    let vis_word_bare = vis_word
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .unwrap_or(vis_word);
    let visibility = Visibility::from_keyword(vis_word_bare).ok_or_else(|| {
        MetamodelError::at(
            line.pos(vis_offset),
            MetamodelErrorKind::UnknownVisibility(vis_word_bare.into()),
        )
    })?;
    Ok(AttributeDef::new(name, kind, visibility))
}

fn parse_association(
    line: &Line<'_>,
    references: &mut Vec<(String, Position)>,
) -> Result<Association, MetamodelError> {
    let text = line.text;
    let usage = "expected `Source kind(name, upper) Target`";
    let (Some(open), Some(close)) = (text.find('('), text.find(')')) else {
        return Err(line.syntax(0, usage));
    };
    if close < open {
        return Err(line.syntax(close, usage));
    }
    let head: Vec<&str> = text[..open].split_whitespace().collect();
    let [source, kind_word] = head.as_slice() else {
        return Err(line.syntax(0, usage));
    };
    let kind_offset = text[..open].rfind(kind_word).unwrap_or(0);
    let kind = AssociationKind::from_keyword(kind_word).ok_or_else(|| {
        line.syntax(
            kind_offset,
            format!(
                "unknown association kind `{kind_word}` (expected composition, aggregation or directed)"
            ),
        )
    })?;
    let target = text[close + 1..].trim();
    if target.is_empty() || target.contains(char::is_whitespace) {
        return Err(line.syntax(close + 1, usage));
    }
    for (word, offset) in [(*source, 0), (target, text.rfind(target).unwrap_or(0))] {
        if !is_identifier(word) {
            return Err(line.syntax(offset, format!("`{word}` is not a valid type name")));
        }
        references.push((word.to_owned(), line.pos(offset)));
    }

    let args: Vec<&str> = text[open + 1..close].split(',').map(str::trim).collect();
    let (name, upper_word) = match args.as_slice() {
        [upper] => (None, *upper),
        [name, upper] => (Some(*name), *upper),
        _ => return Err(line.syntax(open + 1, "expected `(upper)` or `(name, upper)`")),
    };
    let upper = match upper_word {
        "1" => Multiplicity::One,
        "many" | "*" => Multiplicity::Many,
        other => {
            return Err(line.syntax(
                open + 1,
                format!("unknown multiplicity `{other}` (expected 1 or many)"),
            ))
        }
    };
    if let Some(name) = name {
        if !is_identifier(name) {
            return Err(line.syntax(open + 1, format!("`{name}` is not a valid association name")));
        }
    }
    Ok(Association::new(*source, kind, name, upper, target))
}
