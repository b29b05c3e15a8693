//! Minimal XML reading shared by the flat-stream and structured-document
//! parsers.
//!
//! This is not a general XML library. The input vocabularies are closed
//! (see `docs/flat-format.md` and `docs/structured-format.md`), documents
//! are UTF-8, and there is no namespace or DTD processing. Comments,
//! processing instructions and doctype declarations are scanned and
//! dropped. Whitespace-only text runs between elements are dropped; all
//! other character data is preserved verbatim after entity decoding.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct XmlError {
    pub line: u32,
    pub reason: String,
}

impl fmt::Display for XmlError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.reason)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Node {
    Element(Element),
    Text(TextRun),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Element {
    pub name: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<Node>,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct TextRun {
    pub text: String,
    pub line: u32,
}

impl Element {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    /// Child elements, skipping text runs.
    pub fn child_elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|n| match n {
            Node::Element(e) => Some(e),
            Node::Text(_) => None,
        })
    }
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == ':'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | ':' | '-' | '.')
}

/// Length in bytes of a recognized entity reference starting at `s`
/// (which must begin with `&`), or `None` if `s` does not start one.
/// Recognized: the five XML built-ins and numeric character references.
pub(crate) fn entity_len(s: &str) -> Option<usize> {
    debug_assert!(s.starts_with('&'));
    // Entities are short and ASCII; give up within a dozen characters.
    let semi = s
        .char_indices()
        .take(12)
        .find(|&(_, c)| c == ';')
        .map(|(i, _)| i)?;
    let body = &s[1..semi];
    let known = matches!(body, "lt" | "gt" | "amp" | "quot" | "apos");
    let numeric = body.strip_prefix('#').is_some_and(|d| {
        if let Some(hex) = d.strip_prefix('x').or_else(|| d.strip_prefix('X')) {
            !hex.is_empty() && hex.chars().all(|c| c.is_ascii_hexdigit())
        } else {
            !d.is_empty() && d.chars().all(|c| c.is_ascii_digit())
        }
    });
    if known || numeric {
        Some(semi + 1)
    } else {
        None
    }
}

fn decode_entity(body: &str) -> Option<char> {
    match body {
        "lt" => Some('<'),
        "gt" => Some('>'),
        "amp" => Some('&'),
        "quot" => Some('"'),
        "apos" => Some('\''),
        _ => {
            let digits = body.strip_prefix('#')?;
            let code = if let Some(hex) = digits.strip_prefix('x').or_else(|| digits.strip_prefix('X'))
            {
                u32::from_str_radix(hex, 16).ok()?
            } else {
                digits.parse::<u32>().ok()?
            };
            char::from_u32(code)
        }
    }
}

/// Length in bytes of a syntactically valid markup token starting at the
/// `<` at the beginning of `s`: an open/close/self-closing tag, comment,
/// processing instruction or doctype declaration. `None` when the `<`
/// does not start valid markup (a stray bracket).
pub(crate) fn scan_markup(s: &str) -> Option<usize> {
    debug_assert!(s.starts_with('<'));
    let bytes = s.as_bytes();
    if s.starts_with("<!--") {
        return s.find("-->").map(|i| i + 3);
    }
    if s.starts_with("<?") {
        return s.find("?>").map(|i| i + 2);
    }
    if s.starts_with("<!") {
        // Doctype-like declaration; internal subsets are out of scope.
        return s.find('>').map(|i| i + 1);
    }
    let mut i = 1;
    if bytes.get(i) == Some(&b'/') {
        i += 1;
    }
    let rest = &s[i..];
    let first = rest.chars().next()?;
    if !is_name_start(first) {
        return None;
    }
    i += first.len_utf8();
    while let Some(c) = s[i..].chars().next() {
        if is_name_char(c) {
            i += c.len_utf8();
        } else {
            break;
        }
    }
    // Attributes and tag end. Quoted values may contain anything except
    // the closing quote.
    loop {
        let c = s[i..].chars().next()?;
        match c {
            '>' => return Some(i + 1),
            '/' if s[i..].starts_with("/>") => return Some(i + 2),
            '"' | '\'' => {
                let close = s[i + 1..].find(c)?;
                i += 1 + close + 1;
            }
            '<' => return None,
            _ => i += c.len_utf8(),
        }
    }
}

struct Reader<'a> {
    input: &'a str,
    pos: usize,
    line: u32,
}

impl<'a> Reader<'a> {
    fn new(input: &'a str) -> Self {
        Reader {
            input,
            pos: 0,
            line: 1,
        }
    }

    fn rest(&self) -> &'a str {
        &self.input[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn advance(&mut self, n: usize) {
        let taken = &self.input[self.pos..self.pos + n];
        self.line += taken.matches('\n').count() as u32;
        self.pos += n;
    }

    fn error(&self, reason: impl Into<String>) -> XmlError {
        XmlError {
            line: self.line,
            reason: reason.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.advance(c.len_utf8());
            } else {
                break;
            }
        }
    }

    fn read_name(&mut self) -> Result<String, XmlError> {
        let mut name = String::new();
        match self.peek() {
            Some(c) if is_name_start(c) => {
                name.push(c);
                self.advance(c.len_utf8());
            }
            _ => return Err(self.error("expected element name")),
        }
        while let Some(c) = self.peek() {
            if is_name_char(c) {
                name.push(c);
                self.advance(c.len_utf8());
            } else {
                break;
            }
        }
        Ok(name)
    }

    fn read_attrs(&mut self) -> Result<(Vec<(String, String)>, bool), XmlError> {
        let mut attrs = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some('>') => {
                    self.advance(1);
                    return Ok((attrs, false));
                }
                Some('/') => {
                    if self.rest().starts_with("/>") {
                        self.advance(2);
                        return Ok((attrs, true));
                    }
                    return Err(self.error("expected `/>`"));
                }
                Some(c) if is_name_start(c) => {
                    let name = self.read_name()?;
                    self.skip_ws();
                    if self.peek() != Some('=') {
                        return Err(self.error(format!("attribute `{name}` missing `=`")));
                    }
                    self.advance(1);
                    self.skip_ws();
                    let quote = match self.peek() {
                        Some(q @ ('"' | '\'')) => q,
                        _ => return Err(self.error(format!("attribute `{name}` missing quote"))),
                    };
                    self.advance(1);
                    let raw = match self.rest().find(quote) {
                        Some(end) => {
                            let v = &self.rest()[..end];
                            let v = v.to_string();
                            self.advance(end + 1);
                            v
                        }
                        None => return Err(self.error(format!("unterminated value for `{name}`"))),
                    };
                    let value = self.decode_text(&raw)?;
                    attrs.push((name, value));
                }
                Some(c) => return Err(self.error(format!("unexpected `{c}` in tag"))),
                None => return Err(self.error("unterminated tag")),
            }
        }
    }

    fn decode_text(&self, raw: &str) -> Result<String, XmlError> {
        let mut out = String::with_capacity(raw.len());
        let mut rest = raw;
        while let Some(amp) = rest.find('&') {
            out.push_str(&rest[..amp]);
            rest = &rest[amp..];
            match entity_len(rest) {
                Some(len) => {
                    let body = &rest[1..len - 1];
                    match decode_entity(body) {
                        Some(c) => out.push(c),
                        None => {
                            return Err(self.error(format!("invalid character reference `&{body};`")))
                        }
                    }
                    rest = &rest[len..];
                }
                None => return Err(self.error("bare `&` in character data")),
            }
        }
        out.push_str(rest);
        Ok(out)
    }
}

/// Parse a document fragment: a sequence of elements and text runs.
/// Whitespace-only runs are dropped. Errors carry the 1-based line of
/// the offending token; unclosed elements report the line they opened on.
pub(crate) fn parse_fragment(input: &str) -> Result<Vec<Node>, XmlError> {
    let mut r = Reader::new(input);
    let mut stack: Vec<Element> = Vec::new();
    let mut top: Vec<Node> = Vec::new();

    fn push_node(stack: &mut [Element], top: &mut Vec<Node>, node: Node) {
        match stack.last_mut() {
            Some(open) => open.children.push(node),
            None => top.push(node),
        }
    }

    while let Some(c) = r.peek() {
        if c == '<' {
            let rest = r.rest();
            if rest.starts_with("<!--") || rest.starts_with("<?") || rest.starts_with("<!") {
                match scan_markup(rest) {
                    Some(len) => r.advance(len),
                    None => return Err(r.error("unterminated declaration")),
                }
                continue;
            }
            if rest.starts_with("</") {
                let line = r.line;
                r.advance(2);
                let name = r.read_name()?;
                r.skip_ws();
                if r.peek() != Some('>') {
                    return Err(r.error(format!("malformed closing tag `</{name}`")));
                }
                r.advance(1);
                match stack.pop() {
                    Some(open) if open.name == name => {
                        push_node(&mut stack, &mut top, Node::Element(open));
                    }
                    Some(open) => {
                        return Err(XmlError {
                            line,
                            reason: format!(
                                "mismatched closing tag `</{name}>`; `<{}>` opened on line {} is still open",
                                open.name, open.line
                            ),
                        });
                    }
                    None => {
                        return Err(XmlError {
                            line,
                            reason: format!("closing tag `</{name}>` without matching open tag"),
                        });
                    }
                }
                continue;
            }
            let line = r.line;
            r.advance(1);
            let name = r.read_name()?;
            let (attrs, self_closing) = r.read_attrs()?;
            let element = Element {
                name,
                attrs,
                children: Vec::new(),
                line,
            };
            if self_closing {
                push_node(&mut stack, &mut top, Node::Element(element));
            } else {
                stack.push(element);
            }
            continue;
        }
        // Character data up to the next markup token.
        let line = r.line;
        let end = r.rest().find('<').unwrap_or(r.rest().len());
        let raw = &r.rest()[..end];
        let text = r.decode_text(raw)?;
        r.advance(end);
        if !text.trim().is_empty() {
            push_node(&mut stack, &mut top, Node::Text(TextRun { text, line }));
        }
    }

    if let Some(open) = stack.first() {
        return Err(XmlError {
            line: open.line,
            reason: format!("`<{}>` opened on line {} is never closed", open.name, open.line),
        });
    }
    Ok(top)
}

pub(crate) fn escape_text(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
}

pub(crate) fn escape_attr(s: &str, out: &mut String) {
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
}

/// Render an attribute list as ` k="v" k2="v2"` (leading space included
/// when non-empty).
pub(crate) fn format_attrs(attrs: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in attrs {
        out.push(' ');
        out.push_str(k);
        out.push_str("=\"");
        escape_attr(v, &mut out);
        out.push('"');
    }
    out
}
