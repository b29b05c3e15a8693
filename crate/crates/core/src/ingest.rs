//! Flat-stream ingestion: byte sanitization, event parsing and heading
//! queue extraction.
//!
//! The flat input is the presentation-oriented XML produced by PDF
//! conversion: a stream of `<P>`, `<Figure>`, `<Table>` and `<L>`
//! constructs with no logical nesting. Heading paragraphs are marked by
//! an `id` attribute containing a marker keyword (`LinkTarget` by
//! default). See `docs/flat-format.md` for the full grammar.

use std::fmt;

use thiserror::Error;

use crate::diag::Diagnostic;
use crate::xml::{self, Element, Node};

/// Marker substring identifying heading paragraphs in the flat stream.
pub const DEFAULT_MARKER: &str = "LinkTarget";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("input is not valid UTF-8 (byte {offset})")]
    InvalidEncoding { offset: usize },
    #[error("line {line}: unrecoverable markup: {reason}")]
    UnrecoverableMarkup { line: u32, reason: String },
    #[error("line {line}: malformed input: {reason}")]
    MalformedInput { line: u32, reason: String },
}

/// One markup token of the flat stream, in document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlatEventKind {
    ParaStart,
    ParaEnd,
    Text(String),
    FigureStart,
    FigureEnd,
    /// Image reference; the payload is the `src` attribute value.
    ImageData(String),
    CaptionStart,
    CaptionEnd,
    TableStart,
    TableEnd,
    TableCaption(String),
    RowStart,
    RowEnd,
    HeaderCell(String),
    DataCell(String),
    ListStart,
    ListEnd,
    ItemStart,
    ItemEnd,
    ItemLabel(String),
    ItemTitle(String),
}

/// An event plus the attributes that were on its source tag and the
/// 1-based line it came from. `line` is diagnostic metadata; tests that
/// assert round-trip equality normalize it first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlatEvent {
    pub kind: FlatEventKind,
    pub attrs: Vec<(String, String)>,
    pub line: u32,
}

impl FlatEvent {
    fn new(kind: FlatEventKind, line: u32) -> Self {
        FlatEvent {
            kind,
            attrs: Vec::new(),
            line,
        }
    }

    fn with_attrs(kind: FlatEventKind, attrs: Vec<(String, String)>, line: u32) -> Self {
        FlatEvent { kind, attrs, line }
    }

    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }
}

/// A heading paragraph pulled out of the event stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawHeadingLine {
    /// 1-based line of the paragraph in the flat input.
    pub line_no: u32,
    /// The full `id` attribute value (contains the marker keyword).
    pub id: String,
    /// Trimmed heading text, e.g. `7 Classes`.
    pub text: String,
    /// Index of the paragraph's `ParaStart` in the event sequence, so
    /// content between consecutive headings can later be attached.
    pub event_index: usize,
}

impl fmt::Display for RawHeadingLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line_no, self.text)
    }
}

/// Escape stray `<`, `>` and `&` so the stream parses as XML.
///
/// Angle brackets that form syntactically valid markup tokens are left
/// untouched, whatever the element name, so genuinely mis-balanced
/// markup still fails the balance check below instead of being silently
/// converted to text. Everything else (`a < b`, `x > y`, a bare `&`) is
/// escaped. The operation is idempotent.
pub fn sanitize_stream(raw: &[u8]) -> Result<String, IngestError> {
    let text = std::str::from_utf8(raw).map_err(|e| IngestError::InvalidEncoding {
        offset: e.valid_up_to(),
    })?;

    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(c) = rest.chars().next() {
        match c {
            '<' => match xml::scan_markup(rest) {
                Some(len) => {
                    out.push_str(&rest[..len]);
                    rest = &rest[len..];
                }
                None => {
                    out.push_str("&lt;");
                    rest = &rest[1..];
                }
            },
            '>' => {
                out.push_str("&gt;");
                rest = &rest[1..];
            }
            '&' => match xml::entity_len(rest) {
                Some(len) => {
                    out.push_str(&rest[..len]);
                    rest = &rest[len..];
                }
                None => {
                    out.push_str("&amp;");
                    rest = &rest[1..];
                }
            },
            _ => {
                out.push(c);
                rest = &rest[c.len_utf8()..];
            }
        }
    }

    // Escaping cannot repair unbalanced tags; reject those here with the
    // offending line rather than letting every later stage fail.
    if let Err(e) = xml::parse_fragment(&out) {
        return Err(IngestError::UnrecoverableMarkup {
            line: e.line,
            reason: e.reason,
        });
    }
    Ok(out)
}

const PARA: &str = "P";
const FIGURE: &str = "Figure";
const IMAGE_DATA: &str = "ImageData";
const CAPTION: &str = "Caption";
const TABLE: &str = "Table";
const ROW: &str = "TR";
const HEADER_CELL: &str = "TH";
const DATA_CELL: &str = "TD";
const LIST: &str = "L";
const ITEM: &str = "LI";
const ITEM_LABEL: &str = "LI_Label";
const ITEM_TITLE: &str = "LI_Title";

/// Parse a sanitized flat stream into its event sequence.
///
/// The element vocabulary is closed: `P`, `Figure`/`ImageData`/`Caption`,
/// `Table`/`TR`/`TH`/`TD` and `L`/`LI`/`LI_Label`/`LI_Title`. Unknown
/// elements degrade losslessly: wrappers with element children are
/// transparent, leaf unknowns become paragraph text.
pub fn parse_flat_stream(clean: &str) -> Result<Vec<FlatEvent>, IngestError> {
    let nodes = xml::parse_fragment(clean).map_err(|e| IngestError::MalformedInput {
        line: e.line,
        reason: e.reason,
    })?;
    let mut events = Vec::new();
    for node in &nodes {
        emit_content_node(node, &mut events)?;
    }
    Ok(events)
}

/// Event sequence for a single already-parsed element subtree. Used by
/// the structured-XML reader to re-ingest block content.
pub(crate) fn events_from_element(e: &Element) -> Result<Vec<FlatEvent>, IngestError> {
    let mut events = Vec::new();
    emit_content_node(&Node::Element(e.clone()), &mut events)?;
    Ok(events)
}

fn emit_content_node(node: &Node, out: &mut Vec<FlatEvent>) -> Result<(), IngestError> {
    match node {
        Node::Text(t) => {
            out.push(FlatEvent::new(FlatEventKind::ParaStart, t.line));
            out.push(FlatEvent::new(FlatEventKind::Text(t.text.clone()), t.line));
            out.push(FlatEvent::new(FlatEventKind::ParaEnd, t.line));
            Ok(())
        }
        Node::Element(e) => match e.name.as_str() {
            PARA => emit_paragraph(e, out),
            FIGURE => emit_figure(e, out),
            TABLE => emit_table(e, out),
            LIST => emit_list(e, out),
            _ => emit_unknown(e, out),
        },
    }
}

/// A `<P>` is mixed content: text runs become a paragraph; block
/// constructs nested inside it (`Figure`, `Table`, `L`) are emitted
/// standalone, as if the wrapper were absent. A paragraph that only
/// wraps a figure therefore produces no `Para*` events at all.
fn emit_paragraph(e: &Element, out: &mut Vec<FlatEvent>) -> Result<(), IngestError> {
    let mut buffer = String::new();
    let mut buffer_line = e.line;
    let mut emitted_any = false;
    let mut attrs_used = false;

    let flush =
        |buffer: &mut String, line: u32, out: &mut Vec<FlatEvent>, attrs_used: &mut bool| {
            if buffer.is_empty() {
                return false;
            }
            let attrs = if *attrs_used {
                Vec::new()
            } else {
                *attrs_used = true;
                e.attrs.clone()
            };
            out.push(FlatEvent::with_attrs(FlatEventKind::ParaStart, attrs, line));
            out.push(FlatEvent::new(
                FlatEventKind::Text(std::mem::take(buffer)),
                line,
            ));
            out.push(FlatEvent::new(FlatEventKind::ParaEnd, line));
            true
        };

    for child in &e.children {
        match child {
            Node::Text(t) => {
                if buffer.is_empty() {
                    buffer_line = t.line;
                }
                buffer.push_str(&t.text);
            }
            Node::Element(c) if matches!(c.name.as_str(), FIGURE | TABLE | LIST) => {
                flush(&mut buffer, buffer_line, out, &mut attrs_used);
                emit_content_node(child, out)?;
                emitted_any = true;
            }
            Node::Element(c) => {
                // Inline unknowns flatten into the running text.
                if buffer.is_empty() {
                    buffer_line = c.line;
                }
                buffer.push_str(&flatten_text(c));
            }
        }
    }
    emitted_any |= flush(&mut buffer, buffer_line, out, &mut attrs_used);

    if !emitted_any {
        // Wholly empty paragraph; keep it so starts and ends balance.
        out.push(FlatEvent::with_attrs(
            FlatEventKind::ParaStart,
            e.attrs.clone(),
            e.line,
        ));
        out.push(FlatEvent::new(FlatEventKind::ParaEnd, e.line));
    }
    Ok(())
}

fn emit_figure(e: &Element, out: &mut Vec<FlatEvent>) -> Result<(), IngestError> {
    out.push(FlatEvent::with_attrs(
        FlatEventKind::FigureStart,
        e.attrs.clone(),
        e.line,
    ));
    let mut stragglers: Vec<&Element> = Vec::new();
    for child in e.child_elements() {
        match child.name.as_str() {
            IMAGE_DATA => {
                let src = child.attr("src").unwrap_or("").to_string();
                if src.is_empty() {
                    return Err(IngestError::MalformedInput {
                        line: child.line,
                        reason: "ImageData without a non-empty `src` attribute".into(),
                    });
                }
                let extra: Vec<(String, String)> = child
                    .attrs
                    .iter()
                    .filter(|(k, _)| k != "src")
                    .cloned()
                    .collect();
                out.push(FlatEvent::with_attrs(
                    FlatEventKind::ImageData(src),
                    extra,
                    child.line,
                ));
            }
            CAPTION => {
                out.push(FlatEvent::new(FlatEventKind::CaptionStart, child.line));
                for piece in caption_pieces(child) {
                    out.push(FlatEvent::new(FlatEventKind::Text(piece.0), piece.1));
                }
                out.push(FlatEvent::new(FlatEventKind::CaptionEnd, child.line));
            }
            _ => stragglers.push(child),
        }
    }
    out.push(FlatEvent::new(FlatEventKind::FigureEnd, e.line));
    for s in stragglers {
        emit_content_node(&Node::Element(s.clone()), out)?;
    }
    Ok(())
}

/// Caption text, one piece per nested paragraph (or direct text run).
fn caption_pieces(caption: &Element) -> Vec<(String, u32)> {
    let mut pieces = Vec::new();
    for child in &caption.children {
        match child {
            Node::Text(t) => pieces.push((t.text.clone(), t.line)),
            Node::Element(e) => {
                let text = flatten_text(e);
                if !text.is_empty() {
                    pieces.push((text, e.line));
                }
            }
        }
    }
    pieces
}

fn emit_table(e: &Element, out: &mut Vec<FlatEvent>) -> Result<(), IngestError> {
    out.push(FlatEvent::with_attrs(
        FlatEventKind::TableStart,
        e.attrs.clone(),
        e.line,
    ));
    let mut stragglers: Vec<&Element> = Vec::new();
    for child in e.child_elements() {
        match child.name.as_str() {
            CAPTION => {
                out.push(FlatEvent::new(
                    FlatEventKind::TableCaption(flatten_text(child)),
                    child.line,
                ));
            }
            ROW => {
                out.push(FlatEvent::new(FlatEventKind::RowStart, child.line));
                for cell in child.child_elements() {
                    match cell.name.as_str() {
                        HEADER_CELL => out.push(FlatEvent::new(
                            FlatEventKind::HeaderCell(flatten_text(cell)),
                            cell.line,
                        )),
                        _ => out.push(FlatEvent::new(
                            FlatEventKind::DataCell(flatten_text(cell)),
                            cell.line,
                        )),
                    }
                }
                out.push(FlatEvent::new(FlatEventKind::RowEnd, child.line));
            }
            _ => stragglers.push(child),
        }
    }
    out.push(FlatEvent::new(FlatEventKind::TableEnd, e.line));
    for s in stragglers {
        emit_content_node(&Node::Element(s.clone()), out)?;
    }
    Ok(())
}

fn emit_list(e: &Element, out: &mut Vec<FlatEvent>) -> Result<(), IngestError> {
    out.push(FlatEvent::with_attrs(
        FlatEventKind::ListStart,
        e.attrs.clone(),
        e.line,
    ));
    for child in e.child_elements() {
        match child.name.as_str() {
            ITEM => {
                out.push(FlatEvent::new(FlatEventKind::ItemStart, child.line));
                let mut title_runs = String::new();
                let mut title_line = child.line;
                let mut nested: Vec<&Element> = Vec::new();
                let mut label: Option<(String, u32)> = None;
                for part in &child.children {
                    match part {
                        Node::Text(t) => {
                            if title_runs.is_empty() {
                                title_line = t.line;
                            }
                            title_runs.push_str(&t.text);
                        }
                        Node::Element(p) => match p.name.as_str() {
                            ITEM_LABEL => label = Some((flatten_text(p), p.line)),
                            ITEM_TITLE => {
                                if title_runs.is_empty() {
                                    title_line = p.line;
                                }
                                title_runs.push_str(&flatten_text(p));
                            }
                            LIST => nested.push(p),
                            _ => title_runs.push_str(&flatten_text(p)),
                        },
                    }
                }
                if let Some((text, line)) = label {
                    out.push(FlatEvent::new(FlatEventKind::ItemLabel(text), line));
                }
                if !title_runs.is_empty() {
                    out.push(FlatEvent::new(
                        FlatEventKind::ItemTitle(title_runs),
                        title_line,
                    ));
                }
                for n in nested {
                    emit_list(n, out)?;
                }
                out.push(FlatEvent::new(FlatEventKind::ItemEnd, child.line));
            }
            // Sibling-form nesting: an <L> directly inside an <L>.
            LIST => emit_list(child, out)?,
            _ => {
                let text = flatten_text(child);
                if !text.is_empty() {
                    out.push(FlatEvent::new(FlatEventKind::ItemStart, child.line));
                    out.push(FlatEvent::new(FlatEventKind::ItemTitle(text), child.line));
                    out.push(FlatEvent::new(FlatEventKind::ItemEnd, child.line));
                }
            }
        }
    }
    out.push(FlatEvent::new(FlatEventKind::ListEnd, e.line));
    Ok(())
}

fn emit_unknown(e: &Element, out: &mut Vec<FlatEvent>) -> Result<(), IngestError> {
    let has_element_children = e.child_elements().next().is_some();
    if has_element_children {
        // Transparent wrapper (e.g. the document root): process children
        // in place.
        for child in &e.children {
            emit_content_node(child, out)?;
        }
        return Ok(());
    }
    let text = flatten_text(e);
    if !text.is_empty() {
        out.push(FlatEvent::new(FlatEventKind::ParaStart, e.line));
        out.push(FlatEvent::new(FlatEventKind::Text(text), e.line));
        out.push(FlatEvent::new(FlatEventKind::ParaEnd, e.line));
    }
    Ok(())
}

/// All descendant character data of `e`, joined with single spaces
/// between runs from different children.
fn flatten_text(e: &Element) -> String {
    fn walk(e: &Element, pieces: &mut Vec<String>) {
        for child in &e.children {
            match child {
                Node::Text(t) => pieces.push(t.text.clone()),
                Node::Element(c) => walk(c, pieces),
            }
        }
    }
    let mut pieces = Vec::new();
    walk(e, &mut pieces);
    pieces.join(" ")
}

/// Serialize events back to flat XML. The output is canonical (one
/// construct per line, two-space indentation) and re-parses to the same
/// event sequence.
pub fn serialize_flat_events(events: &[FlatEvent]) -> String {
    let mut out = String::new();
    write_flat_events(events, 0, &mut out);
    out
}

pub(crate) fn write_flat_events(events: &[FlatEvent], base_indent: usize, out: &mut String) {
    use FlatEventKind::*;

    let mut depth = base_indent;
    let mut i = 0;

    fn pad(out: &mut String, depth: usize) {
        for _ in 0..depth {
            out.push_str("  ");
        }
    }
    fn text_element(out: &mut String, depth: usize, name: &str, attrs: &str, text: &str) {
        pad(out, depth);
        out.push('<');
        out.push_str(name);
        out.push_str(attrs);
        out.push('>');
        xml::escape_text(text, out);
        out.push_str("</");
        out.push_str(name);
        out.push_str(">\n");
    }

    while i < events.len() {
        let ev = &events[i];
        let attrs = xml::format_attrs(&ev.attrs);
        match &ev.kind {
            ParaStart => {
                match (events.get(i + 1).map(|e| &e.kind), events.get(i + 2).map(|e| &e.kind)) {
                    (Some(Text(t)), Some(ParaEnd)) => {
                        text_element(out, depth, PARA, &attrs, t);
                        i += 3;
                        continue;
                    }
                    (Some(ParaEnd), _) => {
                        pad(out, depth);
                        out.push_str(&format!("<{PARA}{attrs}/>\n"));
                        i += 2;
                        continue;
                    }
                    _ => {
                        pad(out, depth);
                        out.push_str(&format!("<{PARA}{attrs}>\n"));
                        depth += 1;
                    }
                }
            }
            ParaEnd => {
                depth = depth.saturating_sub(1);
                pad(out, depth);
                out.push_str("</P>\n");
            }
            Text(t) => {
                // Bare text (inside captions or unusual sequences) is
                // carried by a paragraph of its own.
                text_element(out, depth, PARA, "", t);
            }
            FigureStart => {
                pad(out, depth);
                out.push_str(&format!("<{FIGURE}{attrs}>\n"));
                depth += 1;
            }
            FigureEnd => {
                depth = depth.saturating_sub(1);
                pad(out, depth);
                out.push_str("</Figure>\n");
            }
            ImageData(src) => {
                pad(out, depth);
                let mut tag = format!("<{IMAGE_DATA} src=\"");
                xml::escape_attr(src, &mut tag);
                tag.push('"');
                tag.push_str(&attrs);
                tag.push_str("/>\n");
                out.push_str(&tag);
            }
            CaptionStart => {
                pad(out, depth);

                out.push_str(&format!("<{CAPTION}{attrs}>\n"));
                depth += 1;
            }
            CaptionEnd => {
                depth = depth.saturating_sub(1);
                pad(out, depth);
                out.push_str("</Caption>\n");
            }
            TableStart => {
                pad(out, depth);
                out.push_str(&format!("<{TABLE}{attrs}>\n"));
                depth += 1;
            }
            TableEnd => {
                depth = depth.saturating_sub(1);
                pad(out, depth);
                out.push_str("</Table>\n");
            }
            TableCaption(t) => {
                pad(out, depth);
                out.push_str("<Caption><P>");
                xml::escape_text(t, out);
                out.push_str("</P></Caption>\n");
            }
            RowStart => {
                pad(out, depth);
                out.push_str(&format!("<{ROW}{attrs}>\n"));
                depth += 1;
            }
            RowEnd => {
                depth = depth.saturating_sub(1);
                pad(out, depth);
                out.push_str("</TR>\n");
            }
            HeaderCell(t) => text_element(out, depth, HEADER_CELL, &attrs, t),
            DataCell(t) => text_element(out, depth, DATA_CELL, &attrs, t),
            ListStart => {
                pad(out, depth);
                out.push_str(&format!("<{LIST}{attrs}>\n"));
                depth += 1;
            }
            ListEnd => {
                depth = depth.saturating_sub(1);
                pad(out, depth);
                out.push_str("</L>\n");
            }
            ItemStart => {
                pad(out, depth);
                out.push_str(&format!("<{ITEM}{attrs}>\n"));
                depth += 1;
            }
            ItemEnd => {
                depth = depth.saturating_sub(1);
                pad(out, depth);
                out.push_str("</LI>\n");
            }
            ItemLabel(t) => text_element(out, depth, ITEM_LABEL, &attrs, t),
            ItemTitle(t) => text_element(out, depth, ITEM_TITLE, &attrs, t),
        }
        i += 1;
    }
}

/// Extract heading paragraphs: those whose `id` attribute contains the
/// marker keyword, in document order. `marker` must be non-empty.
///
/// Empty marked paragraphs are skipped with a diagnostic; heading text
/// spanning multiple lines is kept but flagged, since headings are
/// assumed to be single lines.
pub fn collect_heading_queue(
    events: &[FlatEvent],
    marker: &str,
    diags: &mut Vec<Diagnostic>,
) -> Vec<RawHeadingLine> {
    assert!(!marker.is_empty(), "heading marker must be non-empty");

    let mut queue = Vec::new();
    let mut i = 0;
    while i < events.len() {
        let ev = &events[i];
        if ev.kind == FlatEventKind::ParaStart {
            if let Some(id) = ev.attr("id").filter(|id| id.contains(marker)) {
                let mut text = String::new();
                let mut j = i + 1;
                while j < events.len() {
                    match &events[j].kind {
                        FlatEventKind::Text(t) => text.push_str(t),
                        FlatEventKind::ParaEnd => break,
                        _ => break,
                    }
                    j += 1;
                }
                let trimmed = text.trim();
                if trimmed.is_empty() {
                    diags.push(Diagnostic::new(
                        ev.line,
                        format!("marked heading paragraph (id `{id}`) has no text; skipped"),
                    ));
                } else {
                    if trimmed.contains('\n') {
                        diags.push(Diagnostic::new(
                            ev.line,
                            format!("heading `{}` spans multiple lines", trimmed.replace('\n', "\\n")),
                        ));
                    }
                    queue.push(RawHeadingLine {
                        line_no: ev.line,
                        id: id.to_string(),
                        text: trimmed.to_string(),
                        event_index: i,
                    });
                }
            }
        }
        i += 1;
    }
    queue
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(events: &[FlatEvent]) -> Vec<&FlatEventKind> {
        events.iter().map(|e| &e.kind).collect()
    }

    #[test]
    fn sanitize_leaves_escaped_text_unchanged() {
        let out = sanitize_stream(b"<P>x &lt; y</P>").unwrap();
        assert_eq!(out, "<P>x &lt; y</P>");
    }

    #[test]
    fn sanitize_escapes_stray_brackets() {
        let out = sanitize_stream(b"<P>a < b</P>").unwrap();
        assert_eq!(out, "<P>a &lt; b</P>");
        let out = sanitize_stream(b"<P>a > b</P>").unwrap();
        assert_eq!(out, "<P>a &gt; b</P>");
    }

    #[test]
    fn sanitize_escapes_bare_ampersand() {
        let out = sanitize_stream(b"<P>Smith & Co &amp; more</P>").unwrap();
        assert_eq!(out, "<P>Smith &amp; Co &amp; more</P>");
    }

    #[test]
    fn sanitize_rejects_unbalanced_markup() {
        let err = sanitize_stream(b"<P><Q></P>").unwrap_err();
        match err {
            IngestError::UnrecoverableMarkup { line, .. } => assert_eq!(line, 1),
            other => panic!("expected UnrecoverableMarkup, got {other:?}"),
        }
    }

    #[test]
    fn sanitize_is_idempotent_on_fixture() {
        let raw = b"<P>a < b & c > d</P>\n<Doc><P>x</P></Doc>";
        let once = sanitize_stream(raw).unwrap();
        let twice = sanitize_stream(once.as_bytes()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn sanitize_rejects_non_utf8() {
        assert!(matches!(
            sanitize_stream(&[0x3c, 0x50, 0xff, 0xfe]),
            Err(IngestError::InvalidEncoding { .. })
        ));
    }

    #[test]
    fn figure_fragment_event_sequence() {
        // The <P> wrapper around a figure is transparent.
        let input = r#"<P>
<Figure>
<ImageData src="images/UML_img_1.jpg"/>
<Caption>
<P>Figure 2.1 - Level 0 package diagram</P>
</Caption>
</Figure>
</P>"#;
        let events = parse_flat_stream(input).unwrap();
        assert_eq!(
            kinds(&events),
            vec![
                &FlatEventKind::FigureStart,
                &FlatEventKind::ImageData("images/UML_img_1.jpg".into()),
                &FlatEventKind::CaptionStart,
                &FlatEventKind::Text("Figure 2.1 - Level 0 package diagram".into()),
                &FlatEventKind::CaptionEnd,
                &FlatEventKind::FigureEnd,
            ]
        );
    }

    #[test]
    fn empty_input_yields_empty_sequence() {
        assert!(parse_flat_stream("").unwrap().is_empty());
    }

    #[test]
    fn list_fragment_event_sequence() {
        let input = r#"<P>
<L>
<LI>
<LI_Label>&#9679;</LI_Label>
<LI_Title>abstract syntax compliance.</LI_Title>
</LI>
<LI>
<LI_Label>&#9679;</LI_Label>
<LI_Title>concrete syntax compliance .</LI_Title>
</LI>
</L>
</P>"#;
        let events = parse_flat_stream(input).unwrap();
        assert_eq!(
            kinds(&events),
            vec![
                &FlatEventKind::ListStart,
                &FlatEventKind::ItemStart,
                &FlatEventKind::ItemLabel("\u{25cf}".into()),
                &FlatEventKind::ItemTitle("abstract syntax compliance.".into()),
                &FlatEventKind::ItemEnd,
                &FlatEventKind::ItemStart,
                &FlatEventKind::ItemLabel("\u{25cf}".into()),
                &FlatEventKind::ItemTitle("concrete syntax compliance .".into()),
                &FlatEventKind::ItemEnd,
                &FlatEventKind::ListEnd,
            ]
        );
    }

    #[test]
    fn table_fragment_event_sequence() {
        let input = r#"<Table>
<Caption>
<P>Table 2.1 Compliance statement</P>
</Caption>
<TR>
<TH>Compliance Summary</TH>
</TR>
<TR>
<TD>Level 1</TD>
<TD>YES</TD>
<TD>YES</TD>
<TD>NO</TD>
</TR>
</Table>"#;
        let events = parse_flat_stream(input).unwrap();
        assert_eq!(
            kinds(&events),
            vec![
                &FlatEventKind::TableStart,
                &FlatEventKind::TableCaption("Table 2.1 Compliance statement".into()),
                &FlatEventKind::RowStart,
                &FlatEventKind::HeaderCell("Compliance Summary".into()),
                &FlatEventKind::RowEnd,
                &FlatEventKind::RowStart,
                &FlatEventKind::DataCell("Level 1".into()),
                &FlatEventKind::DataCell("YES".into()),
                &FlatEventKind::DataCell("YES".into()),
                &FlatEventKind::DataCell("NO".into()),
                &FlatEventKind::RowEnd,
                &FlatEventKind::TableEnd,
            ]
        );
    }

    #[test]
    fn unknown_leaf_degrades_to_paragraph() {
        let events = parse_flat_stream("<Annotation>side note</Annotation>").unwrap();
        assert_eq!(
            kinds(&events),
            vec![
                &FlatEventKind::ParaStart,
                &FlatEventKind::Text("side note".into()),
                &FlatEventKind::ParaEnd,
            ]
        );
    }

    #[test]
    fn unknown_wrapper_is_transparent() {
        let events = parse_flat_stream("<TaggedPDF-doc><P>x</P><P>y</P></TaggedPDF-doc>").unwrap();
        assert_eq!(events.len(), 6);
        assert_eq!(events[1].kind, FlatEventKind::Text("x".into()));
        assert_eq!(events[4].kind, FlatEventKind::Text("y".into()));
    }

    #[test]
    fn image_without_src_is_malformed() {
        let err = parse_flat_stream("<Figure><ImageData/></Figure>").unwrap_err();
        assert!(matches!(err, IngestError::MalformedInput { .. }));
    }

    #[test]
    fn heading_queue_collects_marked_paragraphs() {
        let input = concat!(
            "<P id=\"LinkTarget_111914\">7 Classes </P>\n",
            "<P>plain paragraph</P>\n",
            "<P id=\"LinkTarget_111915\">7.1 Overview</P>\n",
        );
        let events = parse_flat_stream(input).unwrap();
        let mut diags = Vec::new();
        let queue = collect_heading_queue(&events, DEFAULT_MARKER, &mut diags);
        assert!(diags.is_empty());
        assert_eq!(queue.len(), 2);
        assert_eq!(queue[0].id, "LinkTarget_111914");
        assert_eq!(queue[0].text, "7 Classes");
        assert_eq!(queue[0].line_no, 1);
        assert_eq!(queue[0].event_index, 0);
        assert_eq!(queue[1].text, "7.1 Overview");
        assert_eq!(queue[1].line_no, 3);
    }

    #[test]
    fn heading_queue_empty_when_nothing_marked() {
        let events = parse_flat_stream("<P>one</P><P>two</P>").unwrap();
        let mut diags = Vec::new();
        assert!(collect_heading_queue(&events, DEFAULT_MARKER, &mut diags).is_empty());
    }

    #[test]
    fn heading_queue_preserves_document_order_across_figures() {
        let input = concat!(
            "<P id=\"LinkTarget_1\">1 One</P>",
            "<Figure><ImageData src=\"a.jpg\"/></Figure>",
            "<P id=\"LinkTarget_2\">2 Two</P>",
            "<Figure><ImageData src=\"b.jpg\"/></Figure>",
            "<P id=\"LinkTarget_3\">3 Three</P>",
        );
        let events = parse_flat_stream(input).unwrap();
        let mut diags = Vec::new();
        let queue = collect_heading_queue(&events, DEFAULT_MARKER, &mut diags);
        let texts: Vec<&str> = queue.iter().map(|h| h.text.as_str()).collect();
        assert_eq!(texts, vec!["1 One", "2 Two", "3 Three"]);
    }

    #[test]
    fn roundtrip_of_parsed_events() {
        let input = concat!(
            "<P id=\"LinkTarget_1\">1 Heading</P>",
            "<P>Body text with x &lt; y inside.</P>",
            "<Figure><ImageData src=\"images/a.jpg\"/><Caption><P>Cap</P></Caption></Figure>",
            "<Table><Caption><P>T</P></Caption><TR><TH>H</TH></TR><TR><TD>a</TD><TD></TD></TR></Table>",
            "<L><LI><LI_Label>-</LI_Label><LI_Title>t</LI_Title><L><LI><LI_Title>u</LI_Title></LI></L></LI></L>",
        );
        let events = parse_flat_stream(input).unwrap();
        let serialized = serialize_flat_events(&events);
        let reparsed = parse_flat_stream(&serialized).unwrap();
        let normalize = |evs: &[FlatEvent]| -> Vec<FlatEvent> {
            evs.iter()
                .map(|e| FlatEvent {
                    line: 0,
                    ..e.clone()
                })
                .collect()
        };
        assert_eq!(normalize(&events), normalize(&reparsed));
    }
}
