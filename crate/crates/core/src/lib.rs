//! Re-engineering of flat, presentation-oriented document streams into
//! a logical tree, a clean structured XML, and a multi-page
//! cross-referenced hypertext site.
//!
//! The pipeline runs in stages, each usable on its own:
//!
//! 1. [`ingest`] — sanitize the flat XML stream, parse it into events,
//!    and pull out the ordered heading queue.
//! 2. [`structure`] — classify headings, rebuild the logical tree with
//!    a stack discipline, validate it, and read/write structured XML.
//! 3. [`sitegen`] — chunk the tree into one hypertext page per
//!    structural heading, render blocks, and wire Previous/Next links.
//! 4. [`concepts`] — extract class and package catalogs from
//!    `Class Descriptions` sections.
//! 5. [`crossref`] — bind heading keywords to their pages and rewrite
//!    page text so every occurrence links to its target.
//! 6. [`stats`] — token frequency rankings and heading prominence
//!    reports.

pub mod concepts;
pub mod crossref;
pub mod diag;
pub mod ingest;
pub mod sitegen;
pub mod stats;
pub mod structure;

mod xml;

pub use diag::Diagnostic;
