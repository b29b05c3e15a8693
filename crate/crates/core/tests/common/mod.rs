//! Shared test support: a deterministic PRNG, random document
//! generators, and an independent XML well-formedness oracle.
#![allow(dead_code)]

use std::io::Write;
use std::process::{Command, Stdio};

use docweave_core::structure::{
    Block, DocNode, DocTree, FigureBlock, HeadingEntry, HeadingKind, ListBlock, ListItem,
    TableBlock,
};

/// xorshift64* — small, seedable, deterministic across platforms.
pub struct XorShift(u64);

impl XorShift {
    pub fn new(seed: u64) -> Self {
        XorShift(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        x.wrapping_mul(0x2545F4914F6CDD1D)
    }

    /// Uniform-ish value in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u64() % n
    }

    pub fn chance(&mut self, percent: u64) -> bool {
        self.below(100) < percent
    }
}

/// Check well-formedness with a conformant XML parser (Python's expat
/// via xml.etree). Independent of the crate's own reader by
/// construction. Requires `python3` on PATH, which the test environment
/// provides.
pub fn xml_well_formed(content: &str) -> bool {
    let mut child = Command::new("python3")
        .args([
            "-c",
            "import sys, xml.etree.ElementTree as ET; ET.fromstring(sys.stdin.buffer.read())",
        ])
        .stdin(Stdio::piped())
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .expect("python3 must be available for the conformance oracle");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(content.as_bytes())
        .unwrap();
    child.wait().unwrap().success()
}

/// Random printable text with markup-significant characters mixed in.
/// Guaranteed to contain at least one alphanumeric character.
pub fn random_text(rng: &mut XorShift, max_len: usize) -> String {
    const ALPHABET: &[&str] = &[
        "a", "b", "c", "X", "Y", "7", " ", " ", "de", "fg", "\u{25cf}", "\u{e9}", "-", ".", ",",
    ];
    let len = 1 + rng.below(max_len.max(1) as u64) as usize;
    let mut out = String::new();
    for _ in 0..len {
        out.push_str(ALPHABET[rng.below(ALPHABET.len() as u64) as usize]);
    }
    out.push('k');
    out
}

/// Text that may also contain raw `<`, `>` and `&`, for sanitizer tests.
pub fn random_hostile_text(rng: &mut XorShift, max_len: usize) -> String {
    const ALPHABET: &[&str] = &[
        "a", "b", "x ", "7", " < ", " > ", "&", "&amp;", "&lt;", "q<r", "s>t", "< ", " >",
    ];
    let len = 1 + rng.below(max_len.max(1) as u64) as usize;
    let mut out = String::new();
    for _ in 0..len {
        out.push_str(ALPHABET[rng.below(ALPHABET.len() as u64) as usize]);
    }
    out
}

pub fn random_blocks(rng: &mut XorShift) -> Vec<Block> {
    let count = rng.below(4) as usize;
    let mut blocks = Vec::new();
    for _ in 0..count {
        blocks.push(match rng.below(4) {
            0 => Block::Paragraph(random_text(rng, 12)),
            1 => Block::Figure(FigureBlock {
                src: if rng.chance(80) {
                    format!("images/img_{}.jpg", rng.below(50))
                } else {
                    String::new()
                },
                caption: if rng.chance(70) {
                    random_text(rng, 8)
                } else {
                    String::new()
                },
            }),
            2 => {
                let rows = 1 + rng.below(3);
                let mut table = TableBlock {
                    caption: if rng.chance(60) {
                        random_text(rng, 6)
                    } else {
                        String::new()
                    },
                    ..Default::default()
                };
                if rng.chance(60) {
                    let cells = 1 + rng.below(3);
                    table
                        .header_rows
                        .push((0..cells).map(|_| random_text(rng, 4)).collect());
                }
                for _ in 0..rows {
                    let cells = 1 + rng.below(5);
                    table.data_rows.push(
                        (0..cells)
                            .map(|_| {
                                if rng.chance(15) {
                                    String::new()
                                } else {
                                    random_text(rng, 4)
                                }
                            })
                            .collect(),
                    );
                }
                Block::Table(table)
            }
            _ => Block::List(random_list(rng, 0)),
        });
    }
    blocks
}

fn random_list(rng: &mut XorShift, depth: usize) -> ListBlock {
    let count = 1 + rng.below(3) as usize;
    let mut list = ListBlock::default();
    for _ in 0..count {
        list.items.push(ListItem {
            label: if rng.chance(70) {
                "\u{25cf}".to_string()
            } else {
                String::new()
            },
            title: if rng.chance(85) {
                random_text(rng, 8)
            } else {
                String::new()
            },
            sublist: if depth < 3 && rng.chance(30) {
                Some(random_list(rng, depth + 1))
            } else {
                None
            },
        });
    }
    list
}

pub fn heading(kind: HeadingKind, number: &str, title: &str) -> HeadingEntry {
    HeadingEntry {
        kind,
        number: number.to_string(),
        title: title.to_string(),
        references: Vec::new(),
        source_line: 0,
    }
}

/// A structurally valid random tree: ranks increase on every edge,
/// numbers extend their parents and are globally unique, and blocks are
/// in canonical form.
pub fn random_valid_tree(rng: &mut XorShift) -> DocTree {
    let mut chapter_counter = 0u64;
    let mut part_counter = 0usize;
    let mut title_counter = 0u64;

    fn roman(n: usize) -> String {
        const NUMERALS: [&str; 8] = ["I", "II", "III", "IV", "V", "VI", "VII", "VIII"];
        NUMERALS[n % NUMERALS.len()].to_string()
    }

    // Subsections are all rank 4, so the stack discipline makes deeper
    // numbers (1.1.1.1) siblings of their shallower neighbors, never
    // children. The generator mirrors that.
    fn subsections(
        rng: &mut XorShift,
        parent_number: &str,
        title_counter: &mut u64,
    ) -> Vec<DocNode> {
        let count = rng.below(3) as usize;
        let mut out = Vec::new();
        for i in 0..count {
            *title_counter += 1;
            let number = format!("{parent_number}.{}", i + 1);
            let mut entry = heading(
                HeadingKind::Subsection,
                &number,
                &format!("Topic{title_counter}"),
            );
            if rng.chance(30) {
                entry.references = vec![format!("Pkg{}", rng.below(5))];
            }
            out.push(DocNode {
                heading: entry,
                blocks: random_blocks(rng),
                children: keywords(rng, title_counter),
            });
            if rng.chance(20) {
                *title_counter += 1;
                out.push(DocNode {
                    heading: heading(
                        HeadingKind::Subsection,
                        &format!("{number}.1"),
                        &format!("Topic{title_counter}"),
                    ),
                    blocks: random_blocks(rng),
                    children: Vec::new(),
                });
            }
        }
        out
    }

    fn keywords(rng: &mut XorShift, title_counter: &mut u64) -> Vec<DocNode> {
        let count = rng.below(3) as usize;
        let mut out = Vec::new();
        for _ in 0..count {
            *title_counter += 1;
            out.push(DocNode {
                heading: heading(HeadingKind::Keyword, "", &format!("Word{title_counter}")),
                blocks: random_blocks(rng),
                children: Vec::new(),
            });
        }
        out
    }

    let sections = |rng: &mut XorShift, chapter_number: u64, title_counter: &mut u64| {
        let count = rng.below(4) as usize;
        let mut out = Vec::new();
        for i in 0..count {
            *title_counter += 1;
            let number = format!("{chapter_number}.{}", i + 1);
            let mut children = keywords(rng, title_counter);
            children.extend(subsections(rng, &number, title_counter));
            out.push(DocNode {
                heading: heading(
                    HeadingKind::Section,
                    &number,
                    &format!("Area{title_counter}"),
                ),
                blocks: random_blocks(rng),
                children,
            });
        }
        out
    };

    let chapters = |rng: &mut XorShift,
                        chapter_counter: &mut u64,
                        title_counter: &mut u64| {
        let count = 1 + rng.below(3) as usize;
        let mut out = Vec::new();
        for _ in 0..count {
            *chapter_counter += 1;
            *title_counter += 1;
            let number = chapter_counter.to_string();
            let n = *chapter_counter;
            let mut children = keywords(rng, title_counter);
            children.extend(sections(rng, n, title_counter));
            out.push(DocNode {
                heading: heading(
                    HeadingKind::Chapter,
                    &number,
                    &format!("Chapter{title_counter}"),
                ),
                blocks: random_blocks(rng),
                children,
            });
        }
        out
    };

    let mut tree = DocTree {
        root_blocks: random_blocks(rng),
        children: Vec::new(),
    };
    let part_count = rng.below(3) as usize;
    for _ in 0..part_count {
        part_counter += 1;
        title_counter += 1;
        tree.children.push(DocNode {
            heading: heading(
                HeadingKind::Part,
                &roman(part_counter - 1),
                &format!("Part{title_counter}"),
            ),
            blocks: random_blocks(rng),
            children: chapters(rng, &mut chapter_counter, &mut title_counter),
        });
    }
    // Some documents have no parts at all; add top-level chapters.
    if part_count == 0 || rng.chance(30) {
        tree.children
            .extend(chapters(rng, &mut chapter_counter, &mut title_counter));
    }
    if rng.chance(25) {
        title_counter += 1;
        tree.children.push(DocNode {
            heading: heading(HeadingKind::EndPart, "", &format!("Annex A{title_counter}")),
            blocks: random_blocks(rng),
            children: Vec::new(),
        });
    }
    if rng.chance(20) {
        tree.children.push(DocNode {
            heading: heading(HeadingKind::LastPart, "", "Index"),
            blocks: random_blocks(rng),
            children: Vec::new(),
        });
    }
    tree
}

/// Zero every source line so trees can be compared across a
/// serialization round trip (lines are diagnostic metadata).
pub fn normalize_tree(tree: &DocTree) -> DocTree {
    fn normalize_node(node: &DocNode) -> DocNode {
        DocNode {
            heading: HeadingEntry {
                source_line: 0,
                ..node.heading.clone()
            },
            blocks: node.blocks.clone(),
            children: node.children.iter().map(normalize_node).collect(),
        }
    }
    DocTree {
        root_blocks: tree.root_blocks.clone(),
        children: tree.children.iter().map(normalize_node).collect(),
    }
}
