//! Hypertext generation: chunk the logical tree into one page per
//! structural heading, render blocks to HTML fragments, wire the
//! Previous/Next chain, and write the site to disk.
//!
//! Pages are small on purpose: jumping to a whole page gives a better
//! sense of location than landing mid-document, and the Previous/Next
//! chain preserves the original reading order. Chunking stops at the
//! subsection level; keyword sub-subsections stay inside their parent's
//! page as anchored sections.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::structure::{
    validate_tree, Block, DocNode, DocTree, FigureBlock, ListBlock, TableBlock, ValidationReport,
};
use crate::xml::{escape_attr, escape_text};

#[derive(Debug, Error)]
pub enum SitegenError {
    #[error("document tree failed validation:\n{0}")]
    InvalidTree(ValidationReport),
    #[error("cannot derive a page filename from an empty number")]
    EmptyNumber,
    #[error("failed to write `{path}`: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// The table-of-contents page filename.
pub const TOC_FILENAME: &str = "index.html";
/// The shared stylesheet filename.
pub const STYLESHEET_FILENAME: &str = "style.css";

/// An in-page anchor for a keyword heading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anchor {
    pub id: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Nav {
    pub prev: Option<String>,
    pub next: Option<String>,
    pub toc: String,
}

/// One output hypertext page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageSpec {
    /// Site-root-relative filename, e.g. `7.3.1.html`.
    pub filename: String,
    /// Heading title without its number.
    pub title: String,
    /// Heading number (or a title slug for unnumbered structural pages).
    pub number: String,
    /// Heading rank, used for styling classes.
    pub rank: u8,
    /// Rendered body fragments in order.
    pub body: Vec<String>,
    /// One anchor per keyword block on this page.
    pub anchors: Vec<Anchor>,
    pub nav: Nav,
}

impl PageSpec {
    /// The visible page heading, `number title` or just the title.
    pub fn display_title(&self) -> String {
        if self.number.is_empty() || self.number == self.title {
            self.title.clone()
        } else {
            format!("{} {}", self.number, self.title)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteManifest {
    pub toc_page: PageSpec,
    /// Structural pages in document (pre-order) order.
    pub pages: Vec<PageSpec>,
    pub concept_pages: Vec<PageSpec>,
    /// Directory whose contents are copied to `<out>/images/`.
    pub asset_dir: Option<PathBuf>,
}

impl SiteManifest {
    /// Total emitted page count: structural pages + ToC + concept pages.
    pub fn total_pages(&self) -> usize {
        self.pages.len() + 1 + self.concept_pages.len()
    }

    pub fn all_pages(&self) -> impl Iterator<Item = &PageSpec> {
        std::iter::once(&self.toc_page)
            .chain(self.pages.iter())
            .chain(self.concept_pages.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitSummary {
    pub files_written: usize,
    pub bytes_written: u64,
}

/// Filename for a structural page: the heading number plus `.html`.
pub fn page_filename(number: &str) -> Result<String, SitegenError> {
    if number.is_empty() {
        return Err(SitegenError::EmptyNumber);
    }
    Ok(format!("{number}.html"))
}

/// Lowercased alphanumeric slug with `-` separators, for anchors and
/// unnumbered page names.
pub fn slugify(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_dash = false;
    for c in text.chars() {
        if c.is_alphanumeric() {
            if pending_dash && !out.is_empty() {
                out.push('-');
            }
            pending_dash = false;
            for lower in c.to_lowercase() {
                out.push(lower);
            }
        } else {
            pending_dash = true;
        }
    }
    if out.is_empty() {
        out.push_str("untitled");
    }
    out
}

/// Effective page number for a structural heading: the real number, or
/// a title slug for unnumbered kinds (EndPart/LastPart pages behave
/// like chapter pages).
fn structural_page_number(node: &DocNode) -> String {
    if node.heading.number.is_empty() {
        slugify(&node.heading.title)
    } else {
        node.heading.number.clone()
    }
}

/// Page numbers for every structural node in pre-order, deduplicated so
/// filenames never collide. Pagination and the ToC both rely on this
/// assignment. The ToC owns `index.html`, so a heading slugging to
/// `index` (e.g. a LastPart titled "Index") is shifted aside.
fn assign_page_numbers(tree: &DocTree) -> Vec<String> {
    let mut used: BTreeSet<String> = BTreeSet::new();
    used.insert("index".to_string());
    let mut numbers = Vec::new();
    for node in tree.pre_order() {
        if !node.heading.kind.is_structural() {
            continue;
        }
        let base = structural_page_number(node);
        let mut candidate = base.clone();
        let mut n = 1;
        while !used.insert(candidate.clone()) {
            n += 1;
            candidate = format!("{base}-{n}");
        }
        numbers.push(candidate);
    }
    numbers
}

/// Chunk the tree into pages: one per structural heading in pre-order.
/// A page carries the heading's own blocks and its keyword children as
/// anchored sections, but not its structural children — those get their
/// own pages. Navigation links are not set yet; see [`link_pages`].
pub fn paginate(tree: &DocTree) -> Result<SiteManifest, SitegenError> {
    let report = validate_tree(tree);
    if !report.is_valid() {
        return Err(SitegenError::InvalidTree(report));
    }

    let numbers = assign_page_numbers(tree);
    let mut pages = Vec::new();
    let mut index = 0usize;

    for node in tree.pre_order() {
        if !node.heading.kind.is_structural() {
            continue;
        }
        let number = numbers[index].clone();
        index += 1;

        let mut body: Vec<String> = node.blocks.iter().map(render_block).collect();
        let mut anchors = Vec::new();
        let mut used_ids = BTreeSet::new();
        for child in &node.children {
            if !child.heading.kind.is_structural() {
                body.push(render_keyword_section(
                    child,
                    &number,
                    &mut used_ids,
                    &mut anchors,
                ));
            }
        }

        pages.push(PageSpec {
            filename: page_filename(&number)?,
            title: node.heading.title.clone(),
            number,
            rank: node.heading.kind.rank(),
            body,
            anchors,
            nav: Nav {
                prev: None,
                next: None,
                toc: TOC_FILENAME.to_string(),
            },
        });
    }

    Ok(SiteManifest {
        toc_page: render_toc(tree),
        pages,
        concept_pages: Vec::new(),
        asset_dir: None,
    })
}

/// Render a keyword heading as an anchored in-page section. Nested
/// keyword children recurse inside the same fragment; structural
/// children are skipped (they have pages of their own).
fn render_keyword_section(
    node: &DocNode,
    page_number: &str,
    used_ids: &mut BTreeSet<String>,
    anchors: &mut Vec<Anchor>,
) -> String {
    let base = format!("{}-{}", slugify(&node.heading.title), page_number);
    let mut id = base.clone();
    let mut n = 1;
    while !used_ids.insert(id.clone()) {
        n += 1;
        id = format!("{base}-{n}");
    }
    anchors.push(Anchor {
        id: id.clone(),
        label: node.heading.title.clone(),
    });

    let mut out = String::new();
    out.push_str("<section class=\"keyword-block\" id=\"");
    escape_attr(&id, &mut out);
    out.push_str("\">\n<h2 class=\"keyword-title\">");
    escape_text(&node.heading.title, &mut out);
    out.push_str("</h2>\n");
    for block in &node.blocks {
        out.push_str(&render_block(block));
        out.push('\n');
    }
    for child in &node.children {
        if !child.heading.kind.is_structural() {
            out.push_str(&render_keyword_section(child, page_number, used_ids, anchors));
            out.push('\n');
        }
    }
    out.push_str("</section>");
    out
}

/// The table-of-contents page: a nested list of links to every
/// structural page, `number title` per entry, indented by rank.
pub fn render_toc(tree: &DocTree) -> PageSpec {
    let numbers = assign_page_numbers(tree);
    let mut index = 0usize;

    // Keyword headings have no page; their structural descendants are
    // promoted to the enclosing level so every page stays reachable.
    fn collect_structural(children: &[DocNode]) -> Vec<&DocNode> {
        let mut out = Vec::new();
        for child in children {
            if child.heading.kind.is_structural() {
                out.push(child);
            } else {
                out.extend(collect_structural(&child.children));
            }
        }
        out
    }

    fn entries(children: &[DocNode], numbers: &[String], index: &mut usize, out: &mut String) {
        let structural = collect_structural(children);
        if structural.is_empty() {
            return;
        }
        out.push_str("<ul class=\"toc\">\n");
        for node in structural {
            let number = &numbers[*index];
            *index += 1;
            let rank = node.heading.kind.rank();
            out.push_str(&format!(
                "<li class=\"toc-rank-{rank}\"><a class=\"toc-link\" href=\""
            ));
            escape_attr(&format!("{number}.html"), out);
            out.push_str("\">");
            let label = if node.heading.number.is_empty() {
                node.heading.title.clone()
            } else {
                format!("{} {}", node.heading.number, node.heading.title)
            };
            escape_text(&label, out);
            out.push_str("</a>");
            entries(&node.children, numbers, index, out);
            out.push_str("</li>\n");
        }
        out.push_str("</ul>");
    }

    let mut body = Vec::new();
    for block in &tree.root_blocks {
        body.push(render_block(block));
    }
    let mut list = String::new();
    entries(&tree.children, &numbers, &mut index, &mut list);
    if !list.is_empty() {
        body.push(list);
    }

    PageSpec {
        filename: TOC_FILENAME.to_string(),
        title: "Table of Contents".to_string(),
        number: String::new(),
        rank: 0,
        body,
        anchors: Vec::new(),
        nav: Nav {
            prev: None,
            next: None,
            toc: TOC_FILENAME.to_string(),
        },
    }
}

pub fn render_block(block: &Block) -> String {
    match block {
        Block::Paragraph(text) => {
            let mut out = String::from("<p class=\"doc-para\">");
            escape_text(text, &mut out);
            out.push_str("</p>");
            out
        }
        Block::Figure(figure) => render_figure(figure),
        Block::Table(table) => render_table(table),
        Block::List(list) => render_list(list),
    }
}

/// A centered image with its caption underneath. The relative `src`
/// path is preserved; whether the file exists on disk is a packaging
/// concern, not a rendering error.
pub fn render_figure(figure: &FigureBlock) -> String {
    let mut out = String::from("<div class=\"figure\">");
    if !figure.src.is_empty() {
        out.push_str("\n<img src=\"");
        escape_attr(&figure.src, &mut out);
        out.push_str("\" />");
    }
    if !figure.caption.is_empty() {
        out.push_str("\n<p class=\"figure-caption\">");
        escape_text(&figure.caption, &mut out);
        out.push_str("</p>");
    }
    out.push_str("\n</div>");
    out
}

/// Caption first, then header and data rows. The rendered width is the
/// widest observed row; ragged rows are padded with empty cells rather
/// than truncated to a fixed column count.
pub fn render_table(table: &TableBlock) -> String {
    let width = table.width();
    let mut out = String::from("<table class=\"doc-table\">");
    if !table.caption.is_empty() {
        out.push_str("\n<caption>");
        escape_text(&table.caption, &mut out);
        out.push_str("</caption>");
    }
    let mut row_out = |cells: &[String], tag: &str, class: &str| {
        out.push_str("\n<tr>");
        for i in 0..width {
            let text = cells.get(i).map(String::as_str).unwrap_or("");
            out.push_str(&format!("<{tag}{class}>"));
            escape_text(text, &mut out);
            out.push_str(&format!("</{tag}>"));
        }
        out.push_str("</tr>");
    };
    for row in &table.header_rows {
        row_out(row, "th", " class=\"table-header\"");
    }
    for row in &table.data_rows {
        row_out(row, "td", "");
    }
    out.push_str("\n</table>");
    out
}

/// Items render label then title; sublists recurse with the next color
/// class in a cyclic three-color palette (navy, maroon, olive).
pub fn render_list(list: &ListBlock) -> String {
    fn render_at(list: &ListBlock, depth: usize, out: &mut String) {
        if list.items.is_empty() {
            return;
        }
        out.push_str(&format!(
            "<ul class=\"doc-list list-depth-{}\">\n",
            depth % 3
        ));
        for item in &list.items {
            out.push_str("<li>");
            if !item.label.is_empty() {
                out.push_str("<span class=\"list-label\">");
                escape_text(&item.label, out);
                out.push_str("</span>");
            }
            if !item.title.is_empty() {
                if !item.label.is_empty() {
                    out.push(' ');
                }
                out.push_str("<span class=\"list-title\">");
                escape_text(&item.title, out);
                out.push_str("</span>");
            }
            if let Some(sub) = &item.sublist {
                out.push('\n');
                render_at(sub, depth + 1, out);
            }
            out.push_str("</li>\n");
        }
        out.push_str("</ul>");
    }
    let mut out = String::new();
    render_at(list, 0, &mut out);
    out
}

/// Wire the Previous/Next chain: a pairwise sweep over consecutive
/// structural pages in document order. The first page has no Previous,
/// the last no Next; every page links back to the ToC.
pub fn link_pages(mut manifest: SiteManifest) -> SiteManifest {
    for i in 0..manifest.pages.len() {
        manifest.pages[i].nav.toc = TOC_FILENAME.to_string();
        if i + 1 < manifest.pages.len() {
            let next = manifest.pages[i + 1].filename.clone();
            let prev = manifest.pages[i].filename.clone();
            manifest.pages[i].nav.next = Some(next);
            manifest.pages[i + 1].nav.prev = Some(prev);
        }
    }
    manifest.toc_page.nav.toc = TOC_FILENAME.to_string();
    for page in &mut manifest.concept_pages {
        page.nav.toc = TOC_FILENAME.to_string();
    }
    manifest
}

/// `../` prefix needed to reach the site root from this page.
fn root_prefix(filename: &str) -> String {
    "../".repeat(filename.matches('/').count())
}

/// Full HTML document for one page. Output is well-formed XML (void
/// elements self-closed) so generated sites can be checked by any XML
/// parser.
pub fn page_html(page: &PageSpec) -> String {
    let prefix = root_prefix(&page.filename);
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\" />\n<title>");
    escape_text(&page.display_title(), &mut out);
    out.push_str("</title>\n<link rel=\"stylesheet\" href=\"");
    escape_attr(&format!("{prefix}{STYLESHEET_FILENAME}"), &mut out);
    out.push_str("\" />\n</head>\n<body>\n<nav class=\"pagenav\">");

    match &page.nav.prev {
        Some(file) => {
            out.push_str("<a class=\"nav-prev\" href=\"");
            escape_attr(&format!("{prefix}{file}"), &mut out);
            out.push_str("\">Previous</a>");
        }
        None => out.push_str("<span class=\"nav-prev nav-absent\">Previous</span>"),
    }
    out.push_str(" | <a class=\"nav-toc\" href=\"");
    escape_attr(&format!("{prefix}{}", page.nav.toc), &mut out);
    out.push_str("\">Table of Contents</a> | ");
    match &page.nav.next {
        Some(file) => {
            out.push_str("<a class=\"nav-next\" href=\"");
            escape_attr(&format!("{prefix}{file}"), &mut out);
            out.push_str("\">Next</a>");
        }
        None => out.push_str("<span class=\"nav-next nav-absent\">Next</span>"),
    }
    out.push_str("</nav>\n<h1 class=\"heading-rank-");
    out.push_str(&page.rank.to_string());
    out.push_str("\">");
    escape_text(&page.display_title(), &mut out);
    out.push_str("</h1>\n");
    for fragment in &page.body {
        out.push_str(fragment);
        out.push('\n');
    }
    out.push_str("</body>\n</html>\n");
    out
}

/// Semantic color classes for every element class the pages emit. One
/// stylesheet serves the whole site; visited links change color so the
/// reader can see their interaction history.
pub const STYLESHEET: &str = "\
body {
  font-family: Georgia, 'Times New Roman', serif;
  max-width: 56em;
  margin: 1.5em auto;
  padding: 0 1em;
  color: #1a1a1a;
}
a { color: #0645ad; }
a:visited { color: #6b2fa5; }
.pagenav { border-bottom: 1px solid #ccc; padding-bottom: 0.5em; }
.nav-absent { color: #aaa; }
.heading-rank-1 { color: #5b0000; }
.heading-rank-2 { color: #7a1010; }
.heading-rank-3 { color: #8a4500; }
.heading-rank-4 { color: #145214; }
.heading-rank-6, .heading-rank-7 { color: #333366; }
.keyword-block { border-left: 3px solid #88a; padding-left: 0.8em; margin: 1em 0; }
.keyword-title { color: #225577; }
.doc-para { text-align: justify; }
.figure { text-align: center; margin: 1em 0; }
.figure img { max-width: 100%; }
.figure-caption { font-style: italic; color: #444; }
.doc-table { border-collapse: collapse; margin: 1em 0; }
.doc-table caption { font-weight: bold; padding: 0.3em; }
.doc-table th, .doc-table td { border: 1px solid #999; padding: 0.25em 0.6em; }
th.table-header { background: #e4e4f0; }
.doc-list { list-style: none; }
.list-depth-0 { color: navy; }
.list-depth-1 { color: maroon; }
.list-depth-2 { color: olive; }
.toc { list-style: none; }
.toc-link { text-decoration: none; }
.concept-group { color: #225577; }
.concept-list { list-style: none; }
.concept-packages { color: #666; font-size: 0.9em; }
";

/// Write the site: every page, the shared stylesheet, and a copy of the
/// asset directory. Output is deterministic: identical manifests yield
/// byte-identical trees.
pub fn emit_site(manifest: &SiteManifest, out_dir: &Path) -> Result<EmitSummary, SitegenError> {
    fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SitegenError {
        let path = path.to_path_buf();
        move |source| SitegenError::Io { path, source }
    }

    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;

    let mut summary = EmitSummary {
        files_written: 0,
        bytes_written: 0,
    };
    let mut write_file = |path: PathBuf, contents: &[u8]| -> Result<(), SitegenError> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        fs::write(&path, contents).map_err(io_err(&path))?;
        summary.files_written += 1;
        summary.bytes_written += contents.len() as u64;
        Ok(())
    };

    for page in manifest.all_pages() {
        write_file(out_dir.join(&page.filename), page_html(page).as_bytes())?;
    }
    write_file(out_dir.join(STYLESHEET_FILENAME), STYLESHEET.as_bytes())?;

    if let Some(asset_dir) = &manifest.asset_dir {
        if asset_dir.is_dir() {
            copy_dir(asset_dir, &out_dir.join("images"), &mut write_file)?;
        }
    }

    Ok(summary)
}

fn copy_dir(
    from: &Path,
    to: &Path,
    write_file: &mut impl FnMut(PathBuf, &[u8]) -> Result<(), SitegenError>,
) -> Result<(), SitegenError> {
    let mut entries: Vec<PathBuf> = fs::read_dir(from)
        .map_err(|source| SitegenError::Io {
            path: from.to_path_buf(),
            source,
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    for entry in entries {
        let name = match entry.file_name() {
            Some(name) => name.to_owned(),
            None => continue,
        };
        if entry.is_dir() {
            copy_dir(&entry, &to.join(&name), write_file)?;
        } else {
            let contents = fs::read(&entry).map_err(|source| SitegenError::Io {
                path: entry.clone(),
                source,
            })?;
            write_file(to.join(&name), &contents)?;
        }
    }
    Ok(())
}
