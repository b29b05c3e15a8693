//! Term-frequency statistics: token ranking and heading prominence.
//!
//! Headings turn out to sit among a document's most frequent words.
//! To quantify that, document tokens are ranked by frequency, the rank
//! positions P1..PN of the heading tokens are collected, and the
//! prominence percentage is mean(P) * 100 / d, where d is the ranked
//! token count. A percentage of 15 means headings live in the top 15%
//! of the frequency ranking.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("no heading token survived filtering")]
    EmptyHeadings,
    #[error("cannot emit a report from zero rows")]
    EmptyReport,
}

/// An exact non-negative rational, kept reduced. Prominence means and
/// percentages are reported exactly rather than through floating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Ratio {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den);
        Ratio {
            num: num / g,
            den: den / g,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Decimal string rounded to one fractional digit (`12.2`).
    pub fn to_decimal_1(self) -> String {
        let tenths = (self.num * 10 + self.den / 2) / self.den;
        format!("{}.{}", tenths / 10, tenths % 10)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_1())
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

#[derive(Debug, Clone, Default)]
pub struct TokenizerConfig {
    /// Tokens dropped after lowercasing. Empty by default: stop-word
    /// removal is opt-in.
    pub stop_words: BTreeSet<String>,
}

/// Lowercased maximal alphanumeric runs, in order. Deterministic.
pub fn tokenize(text: &str, config: &TokenizerConfig) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            for lower in c.to_lowercase() {
                current.push(lower);
            }
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    if config.stop_words.is_empty() {
        tokens
    } else {
        tokens
            .into_iter()
            .filter(|t| !config.stop_words.contains(t))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenCount {
    pub token: String,
    pub count: u64,
}

/// Tokens sorted by frequency, highest first, ties broken by first
/// occurrence. Counts are non-increasing and tokens unique.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenRanking {
    pub entries: Vec<TokenCount>,
}

impl TokenRanking {
    /// Number of distinct ranked tokens (the d of the percentage
    /// formula).
    pub fn distinct_count(&self) -> usize {
        self.entries.len()
    }

    /// Total token occurrences.
    pub fn raw_count(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }
}

pub fn rank_tokens(tokens: &[String]) -> TokenRanking {
    let mut counts: HashMap<&str, (u64, usize)> = HashMap::new();
    for (i, token) in tokens.iter().enumerate() {
        let entry = counts.entry(token.as_str()).or_insert((0, i));
        entry.0 += 1;
    }
    let mut entries: Vec<(&str, u64, usize)> =
        counts.into_iter().map(|(t, (c, i))| (t, c, i)).collect();
    entries.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
    TokenRanking {
        entries: entries
            .into_iter()
            .map(|(token, count, _)| TokenCount {
                token: token.to_string(),
                count,
            })
            .collect(),
    }
}

/// Which heading tokens participate in the prominence measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProminenceMode {
    AllHeadings,
    /// Keep only heading tokens whose document count exceeds `k`.
    MinOccurrenceThreshold(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProminenceReport {
    /// 1-based ranks of the surviving heading tokens, ascending.
    pub positions: Vec<usize>,
    /// Mean of the positions.
    pub mean: Ratio,
    /// Distinct ranked document tokens (primary d).
    pub distinct_token_count: usize,
    /// Raw document token occurrences, reported alongside.
    pub raw_token_count: u64,
    /// Heading tokens given as input, before filtering.
    pub heading_token_count: usize,
    /// Heading tokens absent from the document ranking.
    pub missing: Vec<String>,
    /// mean * 100 / distinct_token_count.
    pub percentage: Ratio,
    pub mode: ProminenceMode,
}

/// Rank positions of the heading tokens inside the document ranking and
/// the derived prominence percentage. Heading tokens missing from the
/// ranking are reported, not fatal; an empty survivor set is an error.
pub fn heading_prominence(
    doc_ranking: &TokenRanking,
    heading_tokens: &BTreeSet<String>,
    mode: ProminenceMode,
) -> Result<ProminenceReport, StatsError> {
    let rank_by_token: HashMap<&str, (usize, u64)> = doc_ranking
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| (e.token.as_str(), (i + 1, e.count)))
        .collect();

    let mut positions = Vec::new();
    let mut missing = Vec::new();
    for token in heading_tokens {
        match rank_by_token.get(token.as_str()) {
            Some(&(rank, count)) => {
                let keep = match mode {
                    ProminenceMode::AllHeadings => true,
                    ProminenceMode::MinOccurrenceThreshold(k) => count > k,
                };
                if keep {
                    positions.push(rank);
                }
            }
            None => missing.push(token.clone()),
        }
    }
    positions.sort_unstable();

    if positions.is_empty() {
        return Err(StatsError::EmptyHeadings);
    }

    let distinct = doc_ranking.distinct_count();
    let sum: u64 = positions.iter().map(|&p| p as u64).sum();
    let n = positions.len() as u64;
    let mean = Ratio::new(sum, n);
    let percentage = Ratio::new(sum * 100, n * distinct as u64);

    Ok(ProminenceReport {
        positions,
        mean,
        distinct_token_count: distinct,
        raw_token_count: doc_ranking.raw_count(),
        heading_token_count: heading_tokens.len(),
        missing,
        percentage,
        mode,
    })
}

/// One row of the tabular report.
#[derive(Debug, Clone, PartialEq)]
pub struct StatsRow {
    pub name: String,
    pub heading_count: usize,
    pub crossref_heading_count: usize,
    pub doc_token_count: usize,
    pub heading_token_count: usize,
    pub percentage: Ratio,
    pub page_count: usize,
}

/// Tab-separated report, one row per document, mirroring the shape of
/// the evaluation table: headings, headings used in cross-referencing,
/// document tokens, heading tokens, prominence percentage, page count.
pub fn emit_report(rows: &[StatsRow]) -> Result<String, StatsError> {
    if rows.is_empty() {
        return Err(StatsError::EmptyReport);
    }
    let mut out = String::from(
        "Document\tHeadings\tHeadings in Cross-Ref\tDoc Tokens\tHeading Tokens\tPercentage\tHypertext Pages\n",
    );
    for row in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            row.name,
            row.heading_count,
            row.crossref_heading_count,
            row.doc_token_count,
            row.heading_token_count,
            row.percentage.to_decimal_1(),
            row.page_count,
        ));
    }
    Ok(out)
}
