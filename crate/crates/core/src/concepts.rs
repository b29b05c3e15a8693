//! Concept catalogs: class and package hierarchies extracted from the
//! logical tree.
//!
//! Modeling specifications list their classes under sections titled
//! `Class Descriptions`, one subsection per class, with the owning
//! packages named in a `(from ...)` clause. That structural pattern is
//! enough to build a class catalog and, by matching references against
//! a package-name list, a package catalog.

use std::collections::BTreeMap;

use crate::sitegen::{page_filename, slugify, Nav, PageSpec, TOC_FILENAME};
use crate::structure::{DocNode, DocTree, HeadingKind};
use crate::xml::{escape_attr, escape_text};

/// Default trigger string for class-description sections.
pub const DEFAULT_TRIGGER: &str = "Class Descriptions";

/// Bucket for classes whose references match no configured package (or
/// that have no references at all). Keeps the catalog a total partition.
pub const UNASSIGNED_PACKAGE: &str = "(unassigned)";

/// One extracted class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassEntry {
    pub name: String,
    /// Reference strings from the class's `(from ...)` clause.
    pub packages: Vec<String>,
    /// The class's hypertext page, e.g. `9.3.1.html`.
    pub page: String,
    /// Owning context: the nearest enclosing chapter title.
    pub group_title: String,
}

/// Package name mapped to its member classes, in document order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PackageCatalog {
    pub packages: BTreeMap<String, Vec<ClassEntry>>,
}

/// Find every class entry: for each section whose title starts with
/// `trigger` (exact, case-sensitive), each child subsection yields one
/// entry named by the subsection title, carrying its references and
/// page filename. The group title is the nearest enclosing chapter.
pub fn extract_class_hierarchy(tree: &DocTree, trigger: &str) -> Vec<ClassEntry> {
    fn walk(node: &DocNode, chapter: &str, trigger: &str, out: &mut Vec<ClassEntry>) {
        let chapter_here = if node.heading.kind == HeadingKind::Chapter {
            node.heading.title.as_str()
        } else {
            chapter
        };

        if node.heading.kind == HeadingKind::Section && node.heading.title.starts_with(trigger) {
            for child in &node.children {
                if child.heading.kind != HeadingKind::Subsection {
                    continue;
                }
                let page = match page_filename(&child.heading.number) {
                    Ok(page) => page,
                    Err(_) => continue,
                };
                out.push(ClassEntry {
                    name: child.heading.title.clone(),
                    packages: child.heading.references.clone(),
                    page,
                    group_title: chapter_here.to_string(),
                });
            }
        }
        for child in &node.children {
            walk(child, chapter_here, trigger, out);
        }
    }

    let mut out = Vec::new();
    for child in &tree.children {
        walk(child, "", trigger, &mut out);
    }
    out
}

/// True when reference `r` matches package `p` under the exclusion
/// rule: `r` contains `p`, and `r` does not contain any other configured
/// package that has `p` as a substring. The longest configured match
/// therefore wins (`CompleteActions` beats `Actions`).
fn reference_matches(reference: &str, package: &str, all_packages: &[String]) -> bool {
    if !reference.contains(package) {
        return false;
    }
    !all_packages.iter().any(|other| {
        other != package && other.contains(package) && reference.contains(other.as_str())
    })
}

/// Assign classes to packages. Classes whose references match no
/// configured package, or that have no references, land in the
/// `(unassigned)` bucket so nothing is lost.
pub fn extract_package_catalog(entries: &[ClassEntry], packages: &[String]) -> PackageCatalog {
    let mut catalog = PackageCatalog::default();
    for entry in entries {
        let mut assigned = false;
        for package in packages {
            let matches = entry
                .packages
                .iter()
                .any(|r| reference_matches(r, package, packages));
            if matches {
                catalog
                    .packages
                    .entry(package.clone())
                    .or_default()
                    .push(entry.clone());
                assigned = true;
            }
        }
        if !assigned {
            catalog
                .packages
                .entry(UNASSIGNED_PACKAGE.to_string())
                .or_default()
                .push(entry.clone());
        }
    }
    catalog
}

/// Distinct reference strings across all entries, sorted. Used as the
/// package list when the configuration names none: every reference is a
/// package name in the studied corpus.
pub fn derive_package_names(entries: &[ClassEntry]) -> Vec<String> {
    let mut names: Vec<String> = entries
        .iter()
        .flat_map(|e| e.packages.iter().cloned())
        .collect();
    names.sort();
    names.dedup();
    names
}

/// Render the concept pages: one class-hierarchy page grouping classes
/// by their chapter, and one page per package listing member classes.
/// Every class name links to its hypertext page. Empty inputs produce
/// no pages.
pub fn render_concept_pages(classes: &[ClassEntry], catalog: &PackageCatalog) -> Vec<PageSpec> {
    let mut pages = Vec::new();
    if classes.is_empty() && catalog.packages.is_empty() {
        return pages;
    }

    // Concept pages live under concepts/, one directory below the site
    // root, so page links need a ../ prefix.
    let class_link = |entry: &ClassEntry, out: &mut String| {
        out.push_str("<li><a href=\"");
        escape_attr(&format!("../{}", entry.page), out);
        out.push_str("\">");
        escape_text(&entry.name, out);
        out.push_str("</a>");
        if !entry.packages.is_empty() {
            out.push_str(" <span class=\"concept-packages\">(from ");
            escape_text(&entry.packages.join(", "), out);
            out.push_str(")</span>");
        }
        out.push_str("</li>\n");
    };

    if !classes.is_empty() {
        let mut body = Vec::new();
        let mut groups: Vec<&str> = Vec::new();
        for entry in classes {
            if !groups.contains(&entry.group_title.as_str()) {
                groups.push(&entry.group_title);
            }
        }
        for group in groups {
            let mut fragment = String::new();
            fragment.push_str("<h2 class=\"concept-group\">");
            escape_text(if group.is_empty() { "Classes" } else { group }, &mut fragment);
            fragment.push_str("</h2>\n<ul class=\"concept-list\">\n");
            for entry in classes.iter().filter(|e| e.group_title == group) {
                class_link(entry, &mut fragment);
            }
            fragment.push_str("</ul>");
            body.push(fragment);
        }
        pages.push(PageSpec {
            filename: "concepts/classes.html".to_string(),
            title: "Class Hierarchy".to_string(),
            number: String::new(),
            rank: 2,
            body,
            anchors: Vec::new(),
            nav: Nav {
                prev: None,
                next: None,
                toc: TOC_FILENAME.to_string(),
            },
        });
    }

    for (package, members) in &catalog.packages {
        let mut fragment = String::from("<ul class=\"concept-list\">\n");
        for entry in members {
            class_link(entry, &mut fragment);
        }
        fragment.push_str("</ul>");
        pages.push(PageSpec {
            filename: format!("concepts/package-{}.html", slugify(package)),
            title: package.clone(),
            number: String::new(),
            rank: 2,
            body: vec![fragment],
            anchors: Vec::new(),
            nav: Nav {
                prev: None,
                next: None,
                toc: TOC_FILENAME.to_string(),
            },
        });
    }

    pages
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{DocNode, DocTree, HeadingEntry, HeadingKind};

    fn node(
        kind: HeadingKind,
        number: &str,
        title: &str,
        references: Vec<&str>,
        children: Vec<DocNode>,
    ) -> DocNode {
        DocNode {
            heading: HeadingEntry {
                kind,
                number: number.into(),
                title: title.into(),
                references: references.into_iter().map(String::from).collect(),
                source_line: 0,
            },
            blocks: vec![],
            children,
        }
    }

    fn uml_fixture() -> DocTree {
        DocTree {
            root_blocks: vec![],
            children: vec![node(
                HeadingKind::Chapter,
                "9",
                "Composite Structures",
                vec![],
                vec![
                    node(HeadingKind::Section, "9.1", "Overview", vec![], vec![]),
                    node(
                        HeadingKind::Section,
                        "9.3",
                        "Class Descriptions",
                        vec![],
                        vec![
                            node(
                                HeadingKind::Subsection,
                                "9.3.1",
                                "Class",
                                vec!["StructuredClasses"],
                                vec![],
                            ),
                            node(
                                HeadingKind::Subsection,
                                "9.3.2",
                                "Connector",
                                vec!["InternalStructures"],
                                vec![],
                            ),
                        ],
                    ),
                ],
            )],
        }
    }

    #[test]
    fn extracts_classes_with_packages_and_pages() {
        let classes = extract_class_hierarchy(&uml_fixture(), DEFAULT_TRIGGER);
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0].name, "Class");
        assert_eq!(classes[0].packages, vec!["StructuredClasses"]);
        assert_eq!(classes[0].page, "9.3.1.html");
        assert_eq!(classes[0].group_title, "Composite Structures");
    }

    #[test]
    fn no_trigger_section_means_no_classes() {
        let tree = DocTree {
            root_blocks: vec![],
            children: vec![node(
                HeadingKind::Chapter,
                "1",
                "Intro",
                vec![],
                vec![node(HeadingKind::Section, "1.1", "Scope", vec![], vec![])],
            )],
        };
        assert!(extract_class_hierarchy(&tree, DEFAULT_TRIGGER).is_empty());
    }

    #[test]
    fn two_chapters_group_separately() {
        let tree = DocTree {
            root_blocks: vec![],
            children: vec![
                node(
                    HeadingKind::Chapter,
                    "8",
                    "Components",
                    vec![],
                    vec![node(
                        HeadingKind::Section,
                        "8.3",
                        "Class Descriptions",
                        vec![],
                        vec![node(
                            HeadingKind::Subsection,
                            "8.3.1",
                            "Component",
                            vec!["BasicComponents"],
                            vec![],
                        )],
                    )],
                ),
                node(
                    HeadingKind::Chapter,
                    "9",
                    "Composite Structures",
                    vec![],
                    vec![node(
                        HeadingKind::Section,
                        "9.3",
                        "Class Descriptions",
                        vec![],
                        vec![node(
                            HeadingKind::Subsection,
                            "9.3.1",
                            "Class",
                            vec!["StructuredClasses"],
                            vec![],
                        )],
                    )],
                ),
            ],
        };
        let classes = extract_class_hierarchy(&tree, DEFAULT_TRIGGER);
        let groups: Vec<&str> = classes.iter().map(|c| c.group_title.as_str()).collect();
        assert_eq!(groups, vec!["Components", "Composite Structures"]);
    }

    fn entry(name: &str, refs: Vec<&str>) -> ClassEntry {
        ClassEntry {
            name: name.into(),
            packages: refs.into_iter().map(String::from).collect(),
            page: format!("{}.html", name.to_lowercase()),
            group_title: "Actions".into(),
        }
    }

    #[test]
    fn longest_configured_match_wins() {
        let packages = vec!["Actions".to_string(), "CompleteActions".to_string()];
        let entries = vec![entry("CreateObjectAction", vec!["CompleteActions"])];
        let catalog = extract_package_catalog(&entries, &packages);
        assert!(catalog.packages.contains_key("CompleteActions"));
        assert!(!catalog.packages.contains_key("Actions"));
    }

    #[test]
    fn exact_reference_without_competitor_matches() {
        let packages = vec!["Actions".to_string()];
        let entries = vec![entry("ValueSpecificationAction", vec!["Actions"])];
        let catalog = extract_package_catalog(&entries, &packages);
        assert_eq!(catalog.packages["Actions"].len(), 1);
    }

    #[test]
    fn catalog_matches_brute_force_assignment() {
        let packages: Vec<String> = ["Actions", "StructuredActions", "CompleteActions"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let entries = vec![
            entry("A", vec!["Actions"]),
            entry("B", vec!["CompleteActions"]),
            entry("C", vec!["StructuredActions"]),
            entry("D", vec!["Actions", "CompleteActions"]),
            entry("E", vec!["Kernel"]),
            entry("F", vec![]),
        ];

        // Exhaustive matcher: for every (class, package) pair, assign
        // when some reference contains the package but no longer
        // configured package name that contains it.
        let mut expected: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for e in &entries {
            let mut any = false;
            for p in &packages {
                let hit = e.packages.iter().any(|r| {
                    r.contains(p.as_str())
                        && !packages.iter().any(|q| {
                            q != p && q.contains(p.as_str()) && r.contains(q.as_str())
                        })
                });
                if hit {
                    expected.entry(p.clone()).or_default().push(e.name.clone());
                    any = true;
                }
            }
            if !any {
                expected
                    .entry(UNASSIGNED_PACKAGE.into())
                    .or_default()
                    .push(e.name.clone());
            }
        }

        let catalog = extract_package_catalog(&entries, &packages);
        let actual: BTreeMap<String, Vec<String>> = catalog
            .packages
            .iter()
            .map(|(p, members)| (p.clone(), members.iter().map(|m| m.name.clone()).collect()))
            .collect();
        assert_eq!(actual, expected);
    }

    #[test]
    fn empty_inputs_render_no_pages() {
        assert!(render_concept_pages(&[], &PackageCatalog::default()).is_empty());
    }

    #[test]
    fn package_page_lists_classes_under_its_header() {
        let entries = vec![entry("CreateObjectAction", vec!["Actions"])];
        let catalog = extract_package_catalog(&entries, &["Actions".to_string()]);
        let pages = render_concept_pages(&entries, &catalog);
        let actions = pages
            .iter()
            .find(|p| p.filename == "concepts/package-actions.html")
            .unwrap();
        assert_eq!(actions.title, "Actions");
        assert!(actions.body[0].contains("href=\"../createobjectaction.html\""));
        assert!(actions.body[0].contains(">CreateObjectAction</a>"));
    }

    #[test]
    fn all_concept_links_point_at_member_pages() {
        let classes = extract_class_hierarchy(&uml_fixture(), DEFAULT_TRIGGER);
        let names = derive_package_names(&classes);
        let catalog = extract_package_catalog(&classes, &names);
        let pages = render_concept_pages(&classes, &catalog);
        let hrefs: Vec<&str> = pages
            .iter()
            .flat_map(|p| p.body.iter())
            .flat_map(|f| f.split("href=\"").skip(1))
            .filter_map(|s| s.split('"').next())
            .collect();
        for href in hrefs {
            let target = href.trim_start_matches("../");
            assert!(
                classes.iter().any(|c| c.page == target),
                "dangling link {href}"
            );
        }
    }
}
