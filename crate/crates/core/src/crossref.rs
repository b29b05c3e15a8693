//! Cross referencing: bind every heading keyword to its page or anchor
//! and rewrite page text so each occurrence becomes a hyperlink.
//!
//! Every heading has either an independent hypertext page (structural
//! headings) or an in-page anchor (keyword headings), so heading titles
//! double as link targets. Bindings are serialized one per line as
//! `keyword@<a href="target">keyword</a>` in `UniqueKeywords.txt`.
//!
//! Raw replace-all would corrupt output: a substring keyword would eat
//! into a longer one, a second run would nest anchors, and a page would
//! link its own title to itself. Replacement is therefore whole-word,
//! skips text already inside an anchor, skips the page's own bindings,
//! and applies longer keywords first.

use std::collections::HashMap;

use thiserror::Error;

use crate::sitegen::{PageSpec, SiteManifest};
use crate::xml::escape_attr;

#[derive(Debug, Error)]
pub enum CrossrefError {
    #[error("line {line}: bad keyword file entry: {reason}")]
    BadLine { line: usize, reason: String },
}

/// A keyword as it appears in HTML character data (entity-escaped).
/// Matching and replacement both operate on this form, so visible text
/// is preserved byte for byte.
fn escape_visible(s: &str) -> String {
    let mut out = String::new();
    crate::xml::escape_text(s, &mut out);
    out
}

/// One keyword bound to its link target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordBinding {
    /// The visible keyword: a heading title.
    pub keyword: String,
    /// Target page, site-root-relative.
    pub file: String,
    /// In-page anchor id for keyword headings.
    pub anchor: Option<String>,
    /// Position in document order, preserved through filtering so the
    /// keyword file can stay in document order.
    pub doc_index: usize,
}

impl KeywordBinding {
    /// `7.3.1.html` or `7.3.1.html#notation-7.3.1`.
    pub fn target(&self) -> String {
        match &self.anchor {
            Some(anchor) => format!("{}#{}", self.file, anchor),
            None => self.file.clone(),
        }
    }

    /// The anchor fragment substituted for the keyword. Visible text is
    /// exactly the keyword; `prefix` adjusts the href for pages below
    /// the site root.
    pub fn replacement_html(&self, prefix: &str) -> String {
        let mut out = String::from("<a href=\"");
        escape_attr(&format!("{prefix}{}", self.target()), &mut out);
        out.push_str("\">");
        crate::xml::escape_text(&self.keyword, &mut out);
        out.push_str("</a>");
        out
    }

    /// Serialized line form: `keyword@replacement`.
    pub fn to_line(&self) -> String {
        format!("{}@{}", self.keyword, self.replacement_html(""))
    }
}

/// One binding per heading title: structural pages bind their title to
/// the page file, keyword anchors bind their label to `file#anchor`.
/// Bindings come out in document order.
pub fn build_keyword_map(manifest: &SiteManifest) -> Vec<KeywordBinding> {
    let mut bindings = Vec::new();
    for page in &manifest.pages {
        if !page.title.is_empty() {
            bindings.push(KeywordBinding {
                keyword: page.title.clone(),
                file: page.filename.clone(),
                anchor: None,
                doc_index: bindings.len(),
            });
        }
        for anchor in &page.anchors {
            if anchor.label.is_empty() {
                continue;
            }
            bindings.push(KeywordBinding {
                keyword: anchor.label.clone(),
                file: page.filename.clone(),
                anchor: Some(anchor.id.clone()),
                doc_index: bindings.len(),
            });
        }
    }
    bindings
}

/// Drop ambiguous keywords and order the survivors for application:
///
/// - a keyword bound to more than one distinct target is removed
///   entirely (it has many independent pages, so a link would guess);
/// - duplicate bindings to the same target collapse to the first;
/// - survivors are ordered longest keyword first, so superstring
///   keywords are applied before their substrings.
pub fn filter_ambiguous(bindings: Vec<KeywordBinding>) -> Vec<KeywordBinding> {
    let mut targets: HashMap<&str, Vec<&KeywordBinding>> = HashMap::new();
    for binding in &bindings {
        targets.entry(&binding.keyword).or_default().push(binding);
    }

    let mut kept: Vec<KeywordBinding> = Vec::new();
    for binding in &bindings {
        let group = &targets[binding.keyword.as_str()];
        let first_target = group[0].target();
        if group.iter().any(|b| b.target() != first_target) {
            continue;
        }
        if group[0].doc_index != binding.doc_index {
            continue;
        }
        kept.push(binding.clone());
    }

    kept.sort_by(|a, b| {
        b.keyword
            .len()
            .cmp(&a.keyword.len())
            .then(a.doc_index.cmp(&b.doc_index))
    });
    kept
}

/// Serialize bindings to the keyword file, one line per binding, in
/// document order.
pub fn write_keyword_file(bindings: &[KeywordBinding]) -> String {
    let mut ordered: Vec<&KeywordBinding> = bindings.iter().collect();
    ordered.sort_by_key(|b| b.doc_index);
    let mut out = String::new();
    for binding in ordered {
        out.push_str(&binding.to_line());
        out.push('\n');
    }
    out
}

/// Parse a keyword file written by [`write_keyword_file`].
pub fn load_keyword_file(text: &str) -> Result<Vec<KeywordBinding>, CrossrefError> {
    let mut bindings = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let n = i + 1;
        let bad = |reason: &str| CrossrefError::BadLine {
            line: n,
            reason: reason.to_string(),
        };
        let (keyword, fragment) = line.split_once('@').ok_or_else(|| bad("missing `@`"))?;
        let rest = fragment
            .strip_suffix("</a>")
            .ok_or_else(|| bad("replacement is not an anchor fragment"))?;
        let href_start = rest.find("href=\"").ok_or_else(|| bad("missing href"))?;
        let after = &rest[href_start + 6..];
        let href_end = after.find('"').ok_or_else(|| bad("unterminated href"))?;
        let target = &after[..href_end];
        let visible_start = after[href_end..]
            .find('>')
            .ok_or_else(|| bad("unterminated open tag"))?;
        let visible = &after[href_end + visible_start + 1..];
        if visible != escape_visible(keyword) {
            return Err(bad("visible text does not equal the keyword"));
        }
        let (file, anchor) = match target.split_once('#') {
            Some((file, anchor)) => (file.to_string(), Some(anchor.to_string())),
            None => (target.to_string(), None),
        };
        bindings.push(KeywordBinding {
            keyword: keyword.to_string(),
            file,
            anchor,
            doc_index: bindings.len(),
        });
    }
    Ok(bindings)
}

/// Rewrite the body of every page so each whole-word keyword occurrence
/// links to its target. Replacement is one pass over the binding list
/// per page, so earlier (longer) bindings shield their matches from
/// later (shorter) ones. Text already inside an anchor is never touched,
/// and a page never links to itself; together these make the operation
/// idempotent. `href_prefix` adjusts targets for pages below the site
/// root (`../` for concept pages).
pub fn apply_crossrefs(pages: &mut [PageSpec], bindings: &[KeywordBinding], href_prefix: &str) {
    for page in pages {
        for binding in bindings {
            if binding.file == page.filename {
                continue;
            }
            let needle = escape_visible(&binding.keyword);
            if needle.is_empty() {
                continue;
            }
            let replacement = binding.replacement_html(href_prefix);
            for fragment in &mut page.body {
                if fragment.contains(needle.as_str()) {
                    *fragment = rewrite_fragment(fragment, &needle, &replacement);
                }
            }
        }
    }
}

/// Replace whole-word occurrences of `needle` in the text runs of an
/// HTML fragment, skipping markup and anything inside an `<a>` element.
fn rewrite_fragment(html: &str, needle: &str, replacement: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let mut rest = html;
    let mut anchor_depth = 0usize;

    while let Some(tag_start) = rest.find('<') {
        let (text, tail) = rest.split_at(tag_start);
        if anchor_depth == 0 {
            replace_whole_words(text, needle, replacement, &mut out);
        } else {
            out.push_str(text);
        }
        let tag_end = match tail.find('>') {
            Some(end) => end,
            None => {
                out.push_str(tail);
                return out;
            }
        };
        let tag = &tail[..=tag_end];
        match anchor_delta(tag) {
            1 => anchor_depth += 1,
            -1 => anchor_depth = anchor_depth.saturating_sub(1),
            _ => {}
        }
        out.push_str(tag);
        rest = &tail[tag_end + 1..];
    }
    if anchor_depth == 0 {
        replace_whole_words(rest, needle, replacement, &mut out);
    } else {
        out.push_str(rest);
    }
    out
}

/// +1 for an opening `<a>`, -1 for `</a>`, 0 otherwise.
fn anchor_delta(tag: &str) -> i32 {
    let inner = tag.trim_start_matches('<').trim_end_matches('>');
    let (closing, name_part) = match inner.strip_prefix('/') {
        Some(rest) => (true, rest),
        None => (false, inner),
    };
    let name: String = name_part
        .chars()
        .take_while(|c| c.is_ascii_alphanumeric())
        .collect();
    if name.eq_ignore_ascii_case("a") && !name_part.ends_with('/') {
        if closing {
            -1
        } else {
            1
        }
    } else {
        0
    }
}

fn replace_whole_words(text: &str, needle: &str, replacement: &str, out: &mut String) {
    let mut rest = text;
    while let Some(pos) = rest.find(needle) {
        let before_ok = rest[..pos].chars().next_back().is_none_or(|c| !c.is_alphanumeric());
        let after_ok = rest[pos + needle.len()..]
            .chars()
            .next()
            .is_none_or(|c| !c.is_alphanumeric());
        if before_ok && after_ok {
            out.push_str(&rest[..pos]);
            out.push_str(replacement);
            rest = &rest[pos + needle.len()..];
        } else {
            let step = rest[pos..].chars().next().map_or(1, |c| c.len_utf8());
            out.push_str(&rest[..pos + step]);
            rest = &rest[pos + step..];
        }
    }
    out.push_str(rest);
}

/// Visible text of an HTML fragment: markup stripped, entities kept.
pub fn strip_tags(html: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let mut rest = html;
    while let Some(start) = rest.find('<') {
        out.push_str(&rest[..start]);
        match rest[start..].find('>') {
            Some(end) => rest = &rest[start + end + 1..],
            None => return out,
        }
    }
    out.push_str(rest);
    out
}
