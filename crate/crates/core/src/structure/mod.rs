//! Logical structure extraction: heading classification, stack-based
//! tree building, validation, and the structured XML format.
//!
//! Flat streams carry headings as marked paragraphs; this module turns
//! the ordered heading queue back into the part/chapter/section tree the
//! document's table of contents implies. The rebuild is a pure stack
//! discipline over heading ranks, which closes every node in exactly the
//! right place regardless of how mangled the source nesting was.

mod xml_io;

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use thiserror::Error;

use crate::diag::Diagnostic;
use crate::ingest::{FlatEvent, FlatEventKind, RawHeadingLine};

pub use xml_io::{parse_structured_xml, serialize_structured_xml};

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("invalid heading pattern `{pattern}`: {source}")]
    InvalidPattern {
        pattern: String,
        source: Box<regex::Error>,
    },
    #[error("document tree failed validation:\n{0}")]
    InvalidTree(ValidationReport),
    #[error("line {line}: schema violation at `{element}`: {reason}")]
    SchemaViolation {
        element: String,
        line: u32,
        reason: String,
    },
}

/// Heading taxonomy. The rank drives the tree builder's pop rule: an
/// incoming heading closes every open node of equal or higher rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HeadingKind {
    Part,
    Chapter,
    Section,
    Subsection,
    Keyword,
    EndPart,
    LastPart,
}

impl HeadingKind {
    pub fn rank(self) -> u8 {
        match self {
            HeadingKind::Part => 1,
            HeadingKind::Chapter => 2,
            HeadingKind::Section => 3,
            HeadingKind::Subsection => 4,
            HeadingKind::Keyword => 5,
            HeadingKind::EndPart => 6,
            HeadingKind::LastPart => 7,
        }
    }

    pub fn from_rank(rank: u8) -> Option<Self> {
        Some(match rank {
            1 => HeadingKind::Part,
            2 => HeadingKind::Chapter,
            3 => HeadingKind::Section,
            4 => HeadingKind::Subsection,
            5 => HeadingKind::Keyword,
            6 => HeadingKind::EndPart,
            7 => HeadingKind::LastPart,
            _ => return None,
        })
    }

    /// Structural headings get their own hypertext page; keyword
    /// headings render as anchored sections inside their parent's page.
    pub fn is_structural(self) -> bool {
        !matches!(self, HeadingKind::Keyword)
    }

    pub fn label(self) -> &'static str {
        match self {
            HeadingKind::Part => "Part",
            HeadingKind::Chapter => "Chapter",
            HeadingKind::Section => "Section",
            HeadingKind::Subsection => "Subsection",
            HeadingKind::Keyword => "Keyword",
            HeadingKind::EndPart => "EndPart",
            HeadingKind::LastPart => "LastPart",
        }
    }
}

/// A classified heading.
///
/// `number` is kept as the original string (`7.3.1`, `I`); nothing ever
/// does arithmetic on it, since page filenames use it verbatim. It is
/// empty exactly for Keyword/EndPart/LastPart headings. `source_line`
/// is diagnostic metadata; equality-based tests normalize it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadingEntry {
    pub kind: HeadingKind,
    pub number: String,
    pub title: String,
    /// Package names from a trailing `(from X, Y)` clause.
    pub references: Vec<String>,
    pub source_line: u32,
}

impl HeadingEntry {
    pub fn describe(&self) -> String {
        if self.number.is_empty() {
            self.title.clone()
        } else {
            format!("{} {}", self.number, self.title)
        }
    }
}

/// A heading plus the event-stream position of its paragraph, so the
/// content between consecutive headings can be attached to the right
/// node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueuedHeading {
    pub entry: HeadingEntry,
    pub event_index: usize,
}

/// Body content owned directly by one heading.
///
/// Canonical form (what the parsers produce and the serializer expects):
/// paragraph text has non-whitespace content, table rows have at least
/// one cell, and pure-whitespace cell text is normalized to empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Block {
    Paragraph(String),
    Figure(FigureBlock),
    Table(TableBlock),
    List(ListBlock),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FigureBlock {
    /// Relative image path, e.g. `images/UML_img_1.jpg`. May be empty
    /// when the source figure carried no image reference.
    pub src: String,
    pub caption: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TableBlock {
    pub caption: String,
    pub header_rows: Vec<Vec<String>>,
    pub data_rows: Vec<Vec<String>>,
}

impl TableBlock {
    /// Rendered column count: the widest observed row, header or data.
    pub fn width(&self) -> usize {
        self.header_rows
            .iter()
            .chain(self.data_rows.iter())
            .map(|r| r.len())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ListBlock {
    pub items: Vec<ListItem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListItem {
    pub label: String,
    pub title: String,
    pub sublist: Option<ListBlock>,
}

/// One node of the logical tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocNode {
    pub heading: HeadingEntry,
    pub blocks: Vec<Block>,
    pub children: Vec<DocNode>,
}

/// The logical document: a synthetic root holding any preamble content
/// and the top-level nodes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DocTree {
    pub root_blocks: Vec<Block>,
    pub children: Vec<DocNode>,
}

impl DocTree {
    /// All nodes in pre-order (the original queue order).
    pub fn pre_order(&self) -> Vec<&DocNode> {
        fn walk<'a>(node: &'a DocNode, out: &mut Vec<&'a DocNode>) {
            out.push(node);
            for child in &node.children {
                walk(child, out);
            }
        }
        let mut out = Vec::new();
        for child in &self.children {
            walk(child, &mut out);
        }
        out
    }

    pub fn heading_count(&self) -> usize {
        self.pre_order().len()
    }

    pub fn structural_count(&self) -> usize {
        self.pre_order()
            .iter()
            .filter(|n| n.heading.kind.is_structural())
            .count()
    }
}

/// Classification patterns. Table-style headings are recognized by
/// regular expressions tried in fixed precedence: Part, EndPart,
/// LastPart, Chapter, Section, Subsection; anything left is a Keyword.
#[derive(Debug, Clone)]
pub struct HeadingPatterns {
    part: Regex,
    chapter: Regex,
    section: Regex,
    subsection: Regex,
    end_part: Regex,
    last_part: Regex,
    /// Known keyword titles; unmatched headings outside this vocabulary
    /// are still classified Keyword but flagged in diagnostics.
    pub keyword_vocabulary: Vec<String>,
}

pub const DEFAULT_PART_PATTERN: &str = r"^Part\s+[IVXLC]+";
pub const DEFAULT_CHAPTER_PATTERN: &str = r"^\d+\s+\S";
pub const DEFAULT_SECTION_PATTERN: &str = r"^\d+\.\d+\s";
pub const DEFAULT_SUBSECTION_PATTERN: &str = r"^\d+(\.\d+){2,}\s";
pub const DEFAULT_END_PART_PATTERN: &str = r"^Annex";
pub const DEFAULT_LAST_PART_PATTERN: &str = r"^Index$";

/// Keyword titles that recur across the studied specifications.
pub const DEFAULT_KEYWORD_VOCABULARY: &[&str] = &[
    "Associations",
    "Attributes",
    "Constraints",
    "Description",
    "Generalizations",
    "Notation",
    "Semantics",
];

impl Default for HeadingPatterns {
    fn default() -> Self {
        HeadingPatterns::new(
            DEFAULT_PART_PATTERN,
            DEFAULT_CHAPTER_PATTERN,
            DEFAULT_SECTION_PATTERN,
            DEFAULT_SUBSECTION_PATTERN,
            DEFAULT_END_PART_PATTERN,
            DEFAULT_LAST_PART_PATTERN,
            DEFAULT_KEYWORD_VOCABULARY
                .iter()
                .map(|s| s.to_string())
                .collect(),
        )
        .expect("default patterns compile")
    }
}

impl HeadingPatterns {
    pub fn new(
        part: &str,
        chapter: &str,
        section: &str,
        subsection: &str,
        end_part: &str,
        last_part: &str,
        keyword_vocabulary: Vec<String>,
    ) -> Result<Self, StructureError> {
        let compile = |pattern: &str| {
            Regex::new(pattern).map_err(|source| StructureError::InvalidPattern {
                pattern: pattern.to_string(),
                source: Box::new(source),
            })
        };
        Ok(HeadingPatterns {
            part: compile(part)?,
            chapter: compile(chapter)?,
            section: compile(section)?,
            subsection: compile(subsection)?,
            end_part: compile(end_part)?,
            last_part: compile(last_part)?,
            keyword_vocabulary,
        })
    }
}

/// Split a trailing `(from X, Y)` clause off a heading, returning the
/// remaining text and the referenced package names.
fn split_references(text: &str) -> (String, Vec<String>) {
    static FROM_CLAUSE: OnceLock<Regex> = OnceLock::new();
    let re = FROM_CLAUSE.get_or_init(|| Regex::new(r"\(\s*from\s+([^)]*)\)\s*$").unwrap());
    match re.captures(text) {
        Some(caps) => {
            let refs = caps[1]
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            let base = text[..caps.get(0).unwrap().start()].trim().to_string();
            (base, refs)
        }
        None => (text.trim().to_string(), Vec::new()),
    }
}

fn is_roman(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| "IVXLCDM".contains(c))
}

fn is_separator_token(token: &str) -> bool {
    matches!(token, "-" | "\u{2013}" | "\u{2014}" | ":" | "\u{00b7}")
}

/// Split `base` into a number and the remaining title, where the number
/// is the first token accepted by `is_number`.
fn split_number(base: &str, is_number: impl Fn(&str) -> bool) -> (String, String) {
    let tokens: Vec<&str> = base.split_whitespace().collect();
    match tokens.iter().position(|t| is_number(t)) {
        Some(idx) => {
            let number = tokens[idx].trim_end_matches('.').to_string();
            let mut title_tokens = &tokens[idx + 1..];
            while title_tokens.first().is_some_and(|t| is_separator_token(t)) {
                title_tokens = &title_tokens[1..];
            }
            (number, title_tokens.join(" "))
        }
        None => (String::new(), base.to_string()),
    }
}

/// Classify one heading line against the Table-style taxonomy.
///
/// Kind is assigned by the first matching pattern in fixed precedence;
/// a trailing `(from ...)` clause is parsed into `references` and
/// stripped from the title. Anything unmatched becomes a Keyword and is
/// flagged when outside the configured vocabulary.
pub fn classify_heading(
    line: &RawHeadingLine,
    patterns: &HeadingPatterns,
    diags: &mut Vec<Diagnostic>,
) -> HeadingEntry {
    let (base, references) = split_references(&line.text);

    let (kind, number, title) = if patterns.part.is_match(&base) {
        let (number, title) = split_number(&base, is_roman);
        (HeadingKind::Part, number, title)
    } else if patterns.end_part.is_match(&base) {
        (HeadingKind::EndPart, String::new(), base.clone())
    } else if patterns.last_part.is_match(&base) {
        (HeadingKind::LastPart, String::new(), base.clone())
    } else if patterns.subsection.is_match(&base) {
        let (number, title) = split_number(&base, |t| t.starts_with(|c: char| c.is_ascii_digit()));
        (HeadingKind::Subsection, number, title)
    } else if patterns.section.is_match(&base) {
        let (number, title) = split_number(&base, |t| t.starts_with(|c: char| c.is_ascii_digit()));
        (HeadingKind::Section, number, title)
    } else if patterns.chapter.is_match(&base) {
        let (number, title) = split_number(&base, |t| t.starts_with(|c: char| c.is_ascii_digit()));
        (HeadingKind::Chapter, number, title)
    } else {
        if !patterns.keyword_vocabulary.iter().any(|k| k == &base) {
            diags.push(Diagnostic::new(
                line.line_no,
                format!("heading `{}` matched no structural pattern; classified as keyword", base),
            ));
        }
        (HeadingKind::Keyword, String::new(), base.clone())
    };

    HeadingEntry {
        kind,
        number,
        title,
        references,
        source_line: line.line_no,
    }
}

/// Classify a whole queue, pairing each entry with its event position.
pub fn classify_queue(
    queue: &[RawHeadingLine],
    patterns: &HeadingPatterns,
    diags: &mut Vec<Diagnostic>,
) -> Vec<QueuedHeading> {
    queue
        .iter()
        .map(|line| QueuedHeading {
            entry: classify_heading(line, patterns, diags),
            event_index: line.event_index,
        })
        .collect()
}

/// Rebuild the logical tree from the heading queue.
///
/// Stack discipline: while the incoming heading's rank is less than or
/// equal to the rank on top of the stack, pop and close; then push and
/// open. The queue is drained at the end, so every heading is opened and
/// closed exactly once. Content events between heading i and heading
/// i+1 become the blocks of node i; anything before the first heading
/// attaches to the synthetic root.
pub fn build_tree(
    queue: &[QueuedHeading],
    events: &[FlatEvent],
    diags: &mut Vec<Diagnostic>,
) -> DocTree {
    struct OpenNode {
        entry: HeadingEntry,
        blocks: Vec<Block>,
        children: Vec<DocNode>,
    }

    fn close(stack: &mut Vec<OpenNode>, roots: &mut Vec<DocNode>) {
        let open = stack.pop().expect("close with non-empty stack");
        let node = DocNode {
            heading: open.entry,
            blocks: open.blocks,
            children: open.children,
        };
        match stack.last_mut() {
            Some(parent) => parent.children.push(node),
            None => roots.push(node),
        }
    }

    let root_end = queue.first().map_or(events.len(), |q| q.event_index);
    let root_blocks = events_to_blocks(&events[..root_end]);

    let mut stack: Vec<OpenNode> = Vec::new();
    let mut roots: Vec<DocNode> = Vec::new();

    for (i, queued) in queue.iter().enumerate() {
        // The heading's own paragraph is not body content; skip to the
        // event after its ParaEnd.
        let mut start = queued.event_index;
        while start < events.len() {
            let done = events[start].kind == FlatEventKind::ParaEnd;
            start += 1;
            if done {
                break;
            }
        }
        let end = queue
            .get(i + 1)
            .map_or(events.len(), |next| next.event_index);
        let blocks = events_to_blocks(&events[start.min(end)..end]);

        let rank = queued.entry.kind.rank();
        while stack
            .last()
            .is_some_and(|top| rank <= top.entry.kind.rank())
        {
            close(&mut stack, &mut roots);
        }
        stack.push(OpenNode {
            entry: queued.entry.clone(),
            blocks,
            children: Vec::new(),
        });
    }
    while !stack.is_empty() {
        close(&mut stack, &mut roots);
    }

    let tree = DocTree {
        root_blocks,
        children: roots,
    };
    flag_noncontiguous_numbering(&tree, diags);
    tree
}

/// Flag sibling jumps like 7.3 followed by 7.5. Only numbers whose last
/// dot component is an integer participate.
fn flag_noncontiguous_numbering(tree: &DocTree, diags: &mut Vec<Diagnostic>) {
    fn last_component(number: &str) -> Option<(&str, u64)> {
        let (prefix, last) = match number.rfind('.') {
            Some(dot) => (&number[..dot], &number[dot + 1..]),
            None => ("", number),
        };
        last.parse::<u64>().ok().map(|n| (prefix, n))
    }

    fn check_siblings(children: &[DocNode], diags: &mut Vec<Diagnostic>) {
        for pair in children.windows(2) {
            let (a, b) = (&pair[0].heading, &pair[1].heading);
            if a.kind != b.kind {
                continue;
            }
            if let (Some((pa, na)), Some((pb, nb))) =
                (last_component(&a.number), last_component(&b.number))
            {
                if pa == pb && nb != na + 1 {
                    diags.push(Diagnostic::new(
                        b.source_line,
                        format!(
                            "non-contiguous numbering: `{}` followed by `{}`",
                            a.number, b.number
                        ),
                    ));
                }
            }
        }
        for child in children {
            check_siblings(&child.children, diags);
        }
    }
    check_siblings(&tree.children, diags);
}

/// Group a run of content events into blocks.
pub fn events_to_blocks(events: &[FlatEvent]) -> Vec<Block> {
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < events.len() {
        match &events[i].kind {
            FlatEventKind::ParaStart => {
                let mut text = String::new();
                i += 1;
                while i < events.len() {
                    match &events[i].kind {
                        FlatEventKind::Text(t) => text.push_str(t),
                        FlatEventKind::ParaEnd => {
                            i += 1;
                            break;
                        }
                        _ => break,
                    }
                    i += 1;
                }
                if !text.trim().is_empty() {
                    blocks.push(Block::Paragraph(text));
                }
            }
            FlatEventKind::FigureStart => {
                let mut src = String::new();
                let mut caption_pieces: Vec<String> = Vec::new();
                i += 1;
                while i < events.len() {
                    match &events[i].kind {
                        FlatEventKind::ImageData(s) => {
                            if src.is_empty() {
                                src = s.clone();
                            }
                        }
                        FlatEventKind::CaptionStart => {
                            i += 1;
                            while i < events.len() {
                                match &events[i].kind {
                                    FlatEventKind::Text(t) => caption_pieces.push(t.clone()),
                                    FlatEventKind::CaptionEnd => break,
                                    _ => break,
                                }
                                i += 1;
                            }
                        }
                        FlatEventKind::FigureEnd => {
                            i += 1;
                            break;
                        }
                        _ => {}
                    }
                    i += 1;
                }
                blocks.push(Block::Figure(FigureBlock {
                    src,
                    caption: caption_pieces.join(" "),
                }));
            }
            FlatEventKind::TableStart => {
                let mut table = TableBlock::default();
                i += 1;
                while i < events.len() {
                    match &events[i].kind {
                        FlatEventKind::TableCaption(t) => table.caption = t.clone(),
                        FlatEventKind::RowStart => {
                            let mut cells: Vec<String> = Vec::new();
                            let mut all_header = true;
                            i += 1;
                            while i < events.len() {
                                match &events[i].kind {
                                    FlatEventKind::HeaderCell(t) => cells.push(t.clone()),
                                    FlatEventKind::DataCell(t) => {
                                        all_header = false;
                                        cells.push(t.clone());
                                    }
                                    FlatEventKind::RowEnd => break,
                                    _ => break,
                                }
                                i += 1;
                            }
                            if !cells.is_empty() {
                                if all_header {
                                    table.header_rows.push(cells);
                                } else {
                                    table.data_rows.push(cells);
                                }
                            }
                        }
                        FlatEventKind::TableEnd => {
                            i += 1;
                            break;
                        }
                        _ => {}
                    }
                    i += 1;
                }
                blocks.push(Block::Table(table));
            }
            FlatEventKind::ListStart => {
                i += 1;
                let list = parse_list_events(events, &mut i);
                blocks.push(Block::List(list));
            }
            _ => i += 1,
        }
    }
    blocks
}

/// Parse list events after a `ListStart` until the matching `ListEnd`.
fn parse_list_events(events: &[FlatEvent], i: &mut usize) -> ListBlock {
    let mut list = ListBlock::default();
    while *i < events.len() {
        match &events[*i].kind {
            FlatEventKind::ItemStart => {
                *i += 1;
                let mut item = ListItem {
                    label: String::new(),
                    title: String::new(),
                    sublist: None,
                };
                while *i < events.len() {
                    match &events[*i].kind {
                        FlatEventKind::ItemLabel(t) => item.label = t.clone(),
                        FlatEventKind::ItemTitle(t) => item.title = t.clone(),
                        FlatEventKind::ListStart => {
                            *i += 1;
                            let sub = parse_list_events(events, i);
                            match &mut item.sublist {
                                None => item.sublist = Some(sub),
                                Some(existing) => existing.items.extend(sub.items),
                            }
                            // The recursion already consumed ListEnd.
                            continue;
                        }
                        FlatEventKind::ItemEnd => break,
                        _ => {}
                    }
                    *i += 1;
                }
                list.items.push(item);
            }
            FlatEventKind::ListStart => {
                // Sibling-form nesting attaches to the preceding item.
                *i += 1;
                let sub = parse_list_events(events, i);
                match list.items.last_mut() {
                    Some(item) => match &mut item.sublist {
                        None => item.sublist = Some(sub),
                        Some(existing) => existing.items.extend(sub.items),
                    },
                    None => list.items.push(ListItem {
                        label: String::new(),
                        title: String::new(),
                        sublist: Some(sub),
                    }),
                }
            }
            FlatEventKind::ListEnd => {
                *i += 1;
                return list;
            }
            _ => *i += 1,
        }
    }
    list
}

/// One invariant violation found by [`validate_tree`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A child's rank does not exceed its parent's.
    RankOrder {
        parent: String,
        parent_line: u32,
        child: String,
        child_line: u32,
    },
    /// A section/subsection number does not extend its parent's number.
    NumberPrefix {
        parent_number: String,
        child_number: String,
        line: u32,
    },
    /// A structural heading with no number, or an unnumbered kind
    /// carrying one.
    NumberShape { heading: String, line: u32, expected_empty: bool },
    /// The same number on two headings; filenames would collide.
    DuplicateNumber {
        number: String,
        first_line: u32,
        line: u32,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RankOrder {
                parent,
                parent_line,
                child,
                child_line,
            } => write!(
                f,
                "rank order: `{child}` (line {child_line}) cannot nest under `{parent}` (line {parent_line})"
            ),
            Violation::NumberPrefix {
                parent_number,
                child_number,
                line,
            } => write!(
                f,
                "number prefix: `{child_number}` (line {line}) does not extend parent `{parent_number}`"
            ),
            Violation::NumberShape { heading, line, expected_empty } => {
                if *expected_empty {
                    write!(f, "number shape: `{heading}` (line {line}) must not carry a number")
                } else {
                    write!(f, "number shape: `{heading}` (line {line}) is missing a number")
                }
            }
            Violation::DuplicateNumber {
                number,
                first_line,
                line,
            } => write!(
                f,
                "duplicate number `{number}` on lines {first_line} and {line}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// Check the tree invariants: rank ordering on every edge, number
/// prefixing for sections and subsections, number presence per kind,
/// and global number uniqueness. An empty report means the tree is
/// valid and safe to serialize.
pub fn validate_tree(tree: &DocTree) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen_numbers: HashMap<&str, u32> = HashMap::new();

    fn walk<'a>(
        node: &'a DocNode,
        parent: Option<&'a DocNode>,
        violations: &mut Vec<Violation>,
        seen: &mut HashMap<&'a str, u32>,
    ) {
        let h = &node.heading;
        let expect_empty = !matches!(
            h.kind,
            HeadingKind::Part | HeadingKind::Chapter | HeadingKind::Section | HeadingKind::Subsection
        );
        if h.number.is_empty() != expect_empty {
            violations.push(Violation::NumberShape {
                heading: h.describe(),
                line: h.source_line,
                expected_empty: expect_empty,
            });
        }

        if let Some(p) = parent {
            if h.kind.rank() <= p.heading.kind.rank() {
                violations.push(Violation::RankOrder {
                    parent: p.heading.describe(),
                    parent_line: p.heading.source_line,
                    child: h.describe(),
                    child_line: h.source_line,
                });
            }
            if matches!(h.kind, HeadingKind::Section | HeadingKind::Subsection)
                && !p.heading.number.is_empty()
                && !h.number.is_empty()
                && !h.number.starts_with(&format!("{}.", p.heading.number))
            {
                violations.push(Violation::NumberPrefix {
                    parent_number: p.heading.number.clone(),
                    child_number: h.number.clone(),
                    line: h.source_line,
                });
            }
        }

        if !h.number.is_empty() {
            match seen.get(h.number.as_str()) {
                Some(&first_line) => violations.push(Violation::DuplicateNumber {
                    number: h.number.clone(),
                    first_line,
                    line: h.source_line,
                }),
                None => {
                    seen.insert(h.number.as_str(), h.source_line);
                }
            }
        }

        for child in &node.children {
            walk(child, Some(node), violations, seen);
        }
    }

    for child in &tree.children {
        walk(child, None, &mut violations, &mut seen_numbers);
    }
    ValidationReport { violations }
}
