//! Structured XML: the clean serialization of the logical tree.
//!
//! Structural headings become `<Part>`, `<Chapter>`, `<Section>`,
//! `<Subsection>`, `<EndPart>` and `<LastPart>` elements with a `Number`
//! attribute where the heading is numbered; keyword headings become
//! elements named after the keyword itself. Every node carries a
//! `<Name>` child (the authoritative title) and, when the heading had a
//! `(from ...)` clause, a `<References>` child. Body blocks are
//! re-emitted in the flat vocabulary. See `docs/structured-format.md`.

use crate::ingest::{self, FlatEvent, FlatEventKind};
use crate::xml::{self, Element, Node};

use super::{
    events_to_blocks, validate_tree, Block, DocNode, DocTree, HeadingEntry, HeadingKind,
    StructureError,
};

const NAME: &str = "Name";
const REFERENCES: &str = "References";
const BOOK: &str = "Book";

const BLOCK_ELEMENTS: [&str; 4] = ["P", "Figure", "Table", "L"];

const RESERVED_NAMES: [&str; 21] = [
    "Book", "Part", "Chapter", "Section", "Subsection", "EndPart", "LastPart", "Name",
    "References", "P", "Figure", "ImageData", "Caption", "Table", "TR", "TH", "TD", "L", "LI",
    "LI_Label", "LI_Title",
];

/// Element name for a keyword heading: invalid name characters map to
/// `_`, and titles that would collide with the schema vocabulary (or
/// with an already-prefixed name) get a `Keyword_` prefix. This keeps
/// the mapping injective over any keyword vocabulary.
pub(crate) fn keyword_element_name(title: &str) -> String {
    let mut name = String::with_capacity(title.len());
    for c in title.chars() {
        if c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.') {
            name.push(c);
        } else {
            name.push('_');
        }
    }
    let starts_ok = name
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    if !starts_ok {
        name.insert(0, '_');
    }
    if RESERVED_NAMES.contains(&name.as_str()) || name.starts_with("Keyword_") {
        name = format!("Keyword_{name}");
    }
    name
}

fn structural_element_name(kind: HeadingKind) -> Option<&'static str> {
    Some(match kind {
        HeadingKind::Part => "Part",
        HeadingKind::Chapter => "Chapter",
        HeadingKind::Section => "Section",
        HeadingKind::Subsection => "Subsection",
        HeadingKind::EndPart => "EndPart",
        HeadingKind::LastPart => "LastPart",
        HeadingKind::Keyword => return None,
    })
}

fn kind_for_element(name: &str) -> Option<HeadingKind> {
    Some(match name {
        "Part" => HeadingKind::Part,
        "Chapter" => HeadingKind::Chapter,
        "Section" => HeadingKind::Section,
        "Subsection" => HeadingKind::Subsection,
        "EndPart" => HeadingKind::EndPart,
        "LastPart" => HeadingKind::LastPart,
        _ => return None,
    })
}

/// Turn canonical blocks back into flat events for re-emission.
pub(crate) fn blocks_to_events(blocks: &[Block]) -> Vec<FlatEvent> {
    fn push(events: &mut Vec<FlatEvent>, kind: FlatEventKind) {
        events.push(FlatEvent {
            kind,
            attrs: Vec::new(),
            line: 0,
        });
    }

    fn push_list(events: &mut Vec<FlatEvent>, list: &super::ListBlock) {
        push(events, FlatEventKind::ListStart);
        for item in &list.items {
            push(events, FlatEventKind::ItemStart);
            if !item.label.is_empty() {
                push(events, FlatEventKind::ItemLabel(item.label.clone()));
            }
            if !item.title.is_empty() {
                push(events, FlatEventKind::ItemTitle(item.title.clone()));
            }
            if let Some(sub) = &item.sublist {
                push_list(events, sub);
            }
            push(events, FlatEventKind::ItemEnd);
        }
        push(events, FlatEventKind::ListEnd);
    }

    let mut events = Vec::new();
    for block in blocks {
        match block {
            Block::Paragraph(text) => {
                push(&mut events, FlatEventKind::ParaStart);
                push(&mut events, FlatEventKind::Text(text.clone()));
                push(&mut events, FlatEventKind::ParaEnd);
            }
            Block::Figure(figure) => {
                push(&mut events, FlatEventKind::FigureStart);
                if !figure.src.is_empty() {
                    push(&mut events, FlatEventKind::ImageData(figure.src.clone()));
                }
                if !figure.caption.trim().is_empty() {
                    push(&mut events, FlatEventKind::CaptionStart);
                    push(&mut events, FlatEventKind::Text(figure.caption.clone()));
                    push(&mut events, FlatEventKind::CaptionEnd);
                }
                push(&mut events, FlatEventKind::FigureEnd);
            }
            Block::Table(table) => {
                push(&mut events, FlatEventKind::TableStart);
                if !table.caption.trim().is_empty() {
                    push(&mut events, FlatEventKind::TableCaption(table.caption.clone()));
                }
                for row in &table.header_rows {
                    if row.is_empty() {
                        continue;
                    }
                    push(&mut events, FlatEventKind::RowStart);
                    for cell in row {
                        push(&mut events, FlatEventKind::HeaderCell(cell.clone()));
                    }
                    push(&mut events, FlatEventKind::RowEnd);
                }
                for row in &table.data_rows {
                    if row.is_empty() {
                        continue;
                    }
                    push(&mut events, FlatEventKind::RowStart);
                    for cell in row {
                        push(&mut events, FlatEventKind::DataCell(cell.clone()));
                    }
                    push(&mut events, FlatEventKind::RowEnd);
                }
                push(&mut events, FlatEventKind::TableEnd);
            }
            Block::List(list) => push_list(&mut events, list),
        }
    }
    events
}

/// Serialize a valid tree to structured XML. Refuses trees with
/// validation violations, since duplicate or malformed numbers would
/// produce a broken site downstream.
pub fn serialize_structured_xml(tree: &DocTree) -> Result<String, StructureError> {
    let report = validate_tree(tree);
    if !report.is_valid() {
        return Err(StructureError::InvalidTree(report));
    }

    if tree.root_blocks.is_empty() && tree.children.is_empty() {
        return Ok(format!("<{BOOK}/>\n"));
    }

    let mut out = String::new();
    out.push_str(&format!("<{BOOK}>\n"));
    ingest::write_flat_events(&blocks_to_events(&tree.root_blocks), 1, &mut out);
    for child in &tree.children {
        write_node(child, 1, &mut out);
    }
    out.push_str(&format!("</{BOOK}>\n"));
    Ok(out)
}

fn write_node(node: &DocNode, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    let heading = &node.heading;
    let element = match structural_element_name(heading.kind) {
        Some(name) => name.to_string(),
        None => keyword_element_name(&heading.title),
    };

    out.push_str(&pad);
    out.push('<');
    out.push_str(&element);
    if !heading.number.is_empty() {
        out.push_str(" Number=\"");
        xml::escape_attr(&heading.number, out);
        out.push('"');
    }
    out.push_str(">\n");

    out.push_str(&pad);
    out.push_str("  <Name>");
    xml::escape_text(&heading.title, out);
    out.push_str("</Name>\n");

    if !heading.references.is_empty() {
        out.push_str(&pad);
        out.push_str("  <References>");
        xml::escape_text(&heading.references.join(", "), out);
        out.push_str("</References>\n");
    }

    ingest::write_flat_events(&blocks_to_events(&node.blocks), indent + 1, out);
    for child in &node.children {
        write_node(child, indent + 1, out);
    }

    out.push_str(&pad);
    out.push_str("</");
    out.push_str(&element);
    out.push_str(">\n");
}

/// Parse structured XML back into a tree. Exact inverse of
/// [`serialize_structured_xml`] on its image; anything outside the
/// schema is a [`StructureError::SchemaViolation`].
pub fn parse_structured_xml(input: &str) -> Result<DocTree, StructureError> {
    let nodes = xml::parse_fragment(input).map_err(|e| StructureError::SchemaViolation {
        element: String::new(),
        line: e.line,
        reason: e.reason,
    })?;

    let mut roots = nodes.iter();
    let book = match roots.next() {
        Some(Node::Element(e)) if e.name == BOOK => e,
        Some(Node::Element(e)) => {
            return Err(StructureError::SchemaViolation {
                element: e.name.clone(),
                line: e.line,
                reason: format!("expected document element `{BOOK}`"),
            })
        }
        Some(Node::Text(t)) => {
            return Err(StructureError::SchemaViolation {
                element: String::new(),
                line: t.line,
                reason: "expected document element, found character data".into(),
            })
        }
        None => {
            return Err(StructureError::SchemaViolation {
                element: String::new(),
                line: 1,
                reason: "empty document".into(),
            })
        }
    };
    if let Some(extra) = roots.next() {
        let line = match extra {
            Node::Element(e) => e.line,
            Node::Text(t) => t.line,
        };
        return Err(StructureError::SchemaViolation {
            element: BOOK.into(),
            line,
            reason: "content after the document element".into(),
        });
    }

    let mut tree = DocTree::default();
    parse_children(book, &mut tree.root_blocks, &mut tree.children)?;
    Ok(tree)
}

fn parse_children(
    parent: &Element,
    blocks: &mut Vec<Block>,
    children: &mut Vec<DocNode>,
) -> Result<(), StructureError> {
    for child in &parent.children {
        match child {
            Node::Text(t) => {
                return Err(StructureError::SchemaViolation {
                    element: parent.name.clone(),
                    line: t.line,
                    reason: "unexpected character data".into(),
                })
            }
            Node::Element(e) => {
                if BLOCK_ELEMENTS.contains(&e.name.as_str()) {
                    let events = ingest::events_from_element(e).map_err(|err| {
                        StructureError::SchemaViolation {
                            element: e.name.clone(),
                            line: e.line,
                            reason: err.to_string(),
                        }
                    })?;
                    blocks.extend(events_to_blocks(&events));
                } else if matches!(e.name.as_str(), NAME | REFERENCES) {
                    // Handled by the caller; reaching one here means it
                    // appeared out of position.
                    return Err(StructureError::SchemaViolation {
                        element: e.name.clone(),
                        line: e.line,
                        reason: format!("`{}` outside a heading element", e.name),
                    });
                } else {
                    children.push(parse_node(e)?);
                }
            }
        }
    }
    Ok(())
}

fn parse_node(e: &Element) -> Result<DocNode, StructureError> {
    let kind = match kind_for_element(&e.name) {
        Some(kind) => kind,
        None => {
            // Keyword elements are recognized by their mandatory <Name>
            // child; anything else is outside the schema.
            let first_is_name = e.child_elements().next().is_some_and(|c| c.name == NAME);
            if !first_is_name {
                return Err(StructureError::SchemaViolation {
                    element: e.name.clone(),
                    line: e.line,
                    reason: "unknown element".into(),
                });
            }
            HeadingKind::Keyword
        }
    };

    let number = e.attr("Number").unwrap_or("").to_string();
    let numbered = matches!(
        kind,
        HeadingKind::Part | HeadingKind::Chapter | HeadingKind::Section | HeadingKind::Subsection
    );
    if numbered && number.is_empty() {
        return Err(StructureError::SchemaViolation {
            element: e.name.clone(),
            line: e.line,
            reason: "missing `Number` attribute".into(),
        });
    }

    let mut title: Option<String> = None;
    let mut references: Vec<String> = Vec::new();
    let mut rest = Element {
        name: e.name.clone(),
        attrs: Vec::new(),
        children: Vec::new(),
        line: e.line,
    };
    for child in &e.children {
        match child {
            Node::Element(c) if c.name == NAME && title.is_none() => {
                title = Some(flatten(c));
            }
            Node::Element(c) if c.name == REFERENCES && references.is_empty() => {
                references = flatten(c)
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect();
            }
            other => rest.children.push(other.clone()),
        }
    }
    let title = title.ok_or_else(|| StructureError::SchemaViolation {
        element: e.name.clone(),
        line: e.line,
        reason: "missing `<Name>` child".into(),
    })?;

    let mut node = DocNode {
        heading: HeadingEntry {
            kind,
            number: if numbered { number } else { String::new() },
            title,
            references,
            source_line: e.line,
        },
        blocks: Vec::new(),
        children: Vec::new(),
    };
    parse_children(&rest, &mut node.blocks, &mut node.children)?;
    Ok(node)
}

fn flatten(e: &Element) -> String {
    let mut pieces = Vec::new();
    fn walk(e: &Element, pieces: &mut Vec<String>) {
        for child in &e.children {
            match child {
                Node::Text(t) => pieces.push(t.text.clone()),
                Node::Element(c) => walk(c, pieces),
            }
        }
    }
    walk(e, &mut pieces);
    pieces.join(" ")
}
