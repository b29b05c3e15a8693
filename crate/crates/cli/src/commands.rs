//! The pipeline stages behind each subcommand.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use docweave_core::concepts::{
    derive_package_names, extract_class_hierarchy, extract_package_catalog, render_concept_pages,
};
use docweave_core::crossref::{
    apply_crossrefs, build_keyword_map, filter_ambiguous, write_keyword_file, KeywordBinding,
};
use docweave_core::diag::Diagnostic;
use docweave_core::ingest::{
    collect_heading_queue, parse_flat_stream, sanitize_stream, IngestError,
};
use docweave_core::sitegen::{emit_site, link_pages, paginate, SiteManifest, SitegenError};
use docweave_core::stats::{
    emit_report, heading_prominence, rank_tokens, tokenize, ProminenceMode, StatsError, StatsRow,
    TokenizerConfig,
};
use docweave_core::structure::{
    build_tree, classify_queue, parse_structured_xml, serialize_structured_xml, validate_tree,
    Block, DocTree, ListBlock, StructureError,
};

use crate::config::PipelineConfig;

/// Failures mapped onto the documented exit codes: 1 validation,
/// 2 I/O and configuration, 3 malformed input.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Io(String),
    Malformed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
            CliError::Malformed(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "validation: {msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
            CliError::Malformed(msg) => write!(f, "malformed input: {msg}"),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Malformed(e.to_string())
    }
}

impl From<StructureError> for CliError {
    fn from(e: StructureError) -> Self {
        match e {
            StructureError::InvalidTree(report) => CliError::Validation(report.to_string()),
            StructureError::SchemaViolation { .. } => CliError::Malformed(e.to_string()),
            StructureError::InvalidPattern { .. } => CliError::Io(e.to_string()),
        }
    }
}

impl From<SitegenError> for CliError {
    fn from(e: SitegenError) -> Self {
        match e {
            SitegenError::InvalidTree(report) => CliError::Validation(report.to_string()),
            SitegenError::EmptyNumber => CliError::Validation(e.to_string()),
            SitegenError::Io { .. } => CliError::Io(e.to_string()),
        }
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn required_input(config: &PipelineConfig) -> Result<&Path, CliError> {
    config
        .input
        .as_deref()
        .ok_or_else(|| CliError::Io("no input file given (use --input or the config file)".into()))
}

fn required_output(config: &PipelineConfig) -> Result<&Path, CliError> {
    config
        .output
        .as_deref()
        .ok_or_else(|| CliError::Io("no output path given (use --out or the config file)".into()))
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::Io(format!("cannot read `{}`: {e}", path.display())))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("cannot create `{}`: {e}", parent.display())))?;
        }
    }
    fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write `{}`: {e}", path.display())))
}

fn print_diagnostics(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("note: {d}");
    }
}

/// Ingest + structure: flat bytes to a validated logical tree.
fn extract_tree(config: &PipelineConfig, raw: &[u8]) -> Result<(DocTree, Vec<Diagnostic>), CliError> {
    let patterns = config.heading_patterns().map_err(CliError::Io)?;
    let clean = sanitize_stream(raw)?;
    let events = parse_flat_stream(&clean)?;
    let mut diags = Vec::new();
    let raw_queue = collect_heading_queue(&events, &config.marker, &mut diags);
    let queue = classify_queue(&raw_queue, &patterns, &mut diags);
    let tree = build_tree(&queue, &events, &mut diags);
    let report = validate_tree(&tree);
    if !report.is_valid() {
        return Err(CliError::Validation(report.to_string()));
    }
    Ok((tree, diags))
}

/// Everything between a tree and an emitted site: pagination, concept
/// pages, the navigation chain, and cross-referencing.
fn build_site(
    config: &PipelineConfig,
    tree: &DocTree,
    asset_dir: Option<PathBuf>,
) -> Result<(SiteManifest, Vec<KeywordBinding>), CliError> {
    let mut manifest = paginate(tree)?;

    if config.stage_concepts {
        let classes = extract_class_hierarchy(tree, &config.concepts_trigger);
        let packages = if config.concepts_packages.is_empty() {
            derive_package_names(&classes)
        } else {
            config.concepts_packages.clone()
        };
        let catalog = extract_package_catalog(&classes, &packages);
        manifest.concept_pages = render_concept_pages(&classes, &catalog);
    }

    let mut manifest = link_pages(manifest);
    manifest.asset_dir = asset_dir;

    let bindings = if config.stage_crossref {
        filter_ambiguous(build_keyword_map(&manifest))
    } else {
        Vec::new()
    };
    if !bindings.is_empty() {
        apply_crossrefs(&mut manifest.pages, &bindings, "");
        apply_crossrefs(std::slice::from_mut(&mut manifest.toc_page), &bindings, "");
        apply_crossrefs(&mut manifest.concept_pages, &bindings, "../");
    }
    Ok((manifest, bindings))
}

pub fn cmd_extract(config: &PipelineConfig) -> Result<(), CliError> {
    let input = required_input(config)?;
    let output = required_output(config)?;
    let raw = read_file(input)?;
    let (tree, diags) = extract_tree(config, &raw)?;
    print_diagnostics(&diags);
    let xml = serialize_structured_xml(&tree)?;
    if config.dry_run {
        println!(
            "dry run: extracted {} headings from `{}`; nothing written",
            tree.heading_count(),
            input.display()
        );
        return Ok(());
    }
    write_file(output, xml.as_bytes())?;
    println!(
        "extracted {} headings from `{}` into `{}`",
        tree.heading_count(),
        input.display(),
        output.display()
    );
    Ok(())
}

fn load_structured(config: &PipelineConfig) -> Result<(DocTree, PathBuf), CliError> {
    let input = required_input(config)?;
    let raw = read_file(input)?;
    let text = String::from_utf8(raw)
        .map_err(|_| CliError::Malformed(format!("`{}` is not UTF-8", input.display())))?;
    Ok((parse_structured_xml(&text)?, input.to_path_buf()))
}

pub fn cmd_render(config: &PipelineConfig) -> Result<(), CliError> {
    let (tree, input) = load_structured(config)?;
    let out_dir = required_output(config)?;
    let asset_dir = input.parent().map(|p| p.join("images"));
    let (manifest, bindings) = build_site(config, &tree, asset_dir)?;

    if config.dry_run {
        println!(
            "dry run: site would contain {} pages ({} structural + ToC + {} concept); nothing written",
            manifest.total_pages(),
            manifest.pages.len(),
            manifest.concept_pages.len()
        );
        return Ok(());
    }

    let summary = emit_site(&manifest, out_dir)?;
    write_file(
        &out_dir.join("UniqueKeywords.txt"),
        write_keyword_file(&bindings).as_bytes(),
    )?;
    println!(
        "rendered {} pages ({} files, {} bytes) into `{}`; {} keyword bindings",
        manifest.total_pages(),
        summary.files_written + 1,
        summary.bytes_written,
        out_dir.display(),
        bindings.len()
    );
    Ok(())
}

pub fn cmd_concepts(config: &PipelineConfig) -> Result<(), CliError> {
    let (tree, _) = load_structured(config)?;
    let classes = extract_class_hierarchy(&tree, &config.concepts_trigger);
    let packages = if config.concepts_packages.is_empty() {
        derive_package_names(&classes)
    } else {
        config.concepts_packages.clone()
    };
    let catalog = extract_package_catalog(&classes, &packages);

    println!("classes ({}):", classes.len());
    for class in &classes {
        let from = if class.packages.is_empty() {
            String::new()
        } else {
            format!(" (from {})", class.packages.join(", "))
        };
        println!("  [{}] {}{} -> {}", class.group_title, class.name, from, class.page);
    }
    println!("packages ({}):", catalog.packages.len());
    for (package, members) in &catalog.packages {
        let names: Vec<&str> = members.iter().map(|m| m.name.as_str()).collect();
        println!("  {package}: {}", names.join(", "));
    }
    Ok(())
}

pub fn cmd_crossref(config: &PipelineConfig) -> Result<(), CliError> {
    let (tree, _) = load_structured(config)?;
    let manifest = link_pages(paginate(&tree)?);
    let bindings = filter_ambiguous(build_keyword_map(&manifest));
    let body = write_keyword_file(&bindings);
    match (&config.output, config.dry_run) {
        (Some(path), false) => {
            write_file(path, body.as_bytes())?;
            println!("wrote {} keyword bindings to `{}`", bindings.len(), path.display());
        }
        _ => print!("{body}"),
    }
    Ok(())
}

/// Document tokens (headings plus body blocks, document order) and the
/// distinct heading-token set.
fn document_tokens(
    tree: &DocTree,
    tokenizer: &TokenizerConfig,
) -> (Vec<String>, BTreeSet<String>) {
    fn block_text(block: &Block, out: &mut Vec<String>) {
        match block {
            Block::Paragraph(text) => out.push(text.clone()),
            Block::Figure(figure) => out.push(figure.caption.clone()),
            Block::Table(table) => {
                out.push(table.caption.clone());
                for row in table.header_rows.iter().chain(table.data_rows.iter()) {
                    out.extend(row.iter().cloned());
                }
            }
            Block::List(list) => list_text(list, out),
        }
    }
    fn list_text(list: &ListBlock, out: &mut Vec<String>) {
        for item in &list.items {
            out.push(item.label.clone());
            out.push(item.title.clone());
            if let Some(sub) = &item.sublist {
                list_text(sub, out);
            }
        }
    }

    let mut doc_tokens = Vec::new();
    let mut heading_tokens = BTreeSet::new();
    let mut texts = Vec::new();
    for block in &tree.root_blocks {
        block_text(block, &mut texts);
    }
    for text in texts.drain(..) {
        doc_tokens.extend(tokenize(&text, tokenizer));
    }
    for node in tree.pre_order() {
        let heading_line = node.heading.describe();
        let tokens = tokenize(&heading_line, tokenizer);
        heading_tokens.extend(tokens.iter().cloned());
        doc_tokens.extend(tokens);
        let mut texts = Vec::new();
        for block in &node.blocks {
            block_text(block, &mut texts);
        }
        for text in texts {
            doc_tokens.extend(tokenize(&text, tokenizer));
        }
    }
    (doc_tokens, heading_tokens)
}

fn stats_row(
    config: &PipelineConfig,
    tree: &DocTree,
    name: &str,
) -> Result<(StatsRow, docweave_core::stats::ProminenceReport), CliError> {
    let tokenizer = TokenizerConfig {
        stop_words: config.stats_stop_words.iter().cloned().collect(),
    };
    let (doc_tokens, heading_tokens) = document_tokens(tree, &tokenizer);
    let ranking = rank_tokens(&doc_tokens);
    let mode = match config.stats_min_occurrence {
        Some(k) => ProminenceMode::MinOccurrenceThreshold(k),
        None => ProminenceMode::AllHeadings,
    };
    let report = heading_prominence(&ranking, &heading_tokens, mode)?;

    // Page and binding counts must agree with what render produces,
    // concept pages included.
    let (manifest, bindings) = build_site(config, tree, None)?;

    let row = StatsRow {
        name: name.to_string(),
        heading_count: tree.heading_count(),
        crossref_heading_count: bindings.len(),
        doc_token_count: report.distinct_token_count,
        heading_token_count: report.heading_token_count,
        percentage: report.percentage,
        page_count: manifest.total_pages(),
    };
    Ok((row, report))
}

pub fn cmd_stats(config: &PipelineConfig) -> Result<(), CliError> {
    let (tree, input) = load_structured(config)?;
    let name = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "document".to_string());
    let (row, prominence) = stats_row(config, &tree, &name)?;
    let report = emit_report(std::slice::from_ref(&row))?;
    print!("{report}");
    // The Doc Tokens column counts distinct ranked tokens (positions
    // are ranks in that list); the raw occurrence count rides along.
    eprintln!(
        "note: {} raw token occurrences, {} distinct (the Doc Tokens column)",
        prominence.raw_token_count, prominence.distinct_token_count
    );
    for missing in &prominence.missing {
        eprintln!("note: heading token `{missing}` does not occur in the document body");
    }
    if let (Some(path), false) = (&config.output, config.dry_run) {
        write_file(path, report.as_bytes())?;
    }
    Ok(())
}

/// The whole pipeline is literally the composition of the staged
/// commands: extract writes the structured document, render reads it
/// back, stats reads it back. Staged runs and pipeline runs therefore
/// produce identical outputs by construction.
pub fn cmd_pipeline(config: &PipelineConfig) -> Result<(), CliError> {
    let input = required_input(config)?;
    let out_dir = required_output(config)?.to_path_buf();

    if config.dry_run {
        let raw = read_file(input)?;
        let (tree, diags) = extract_tree(config, &raw)?;
        print_diagnostics(&diags);
        let asset_dir = input.parent().map(|p| p.join("images"));
        let (manifest, bindings) = build_site(config, &tree, asset_dir)?;
        println!(
            "dry run: {} headings; site would contain {} pages and {} keyword bindings; nothing written",
            tree.heading_count(),
            manifest.total_pages(),
            bindings.len()
        );
        return Ok(());
    }

    let structured_path = out_dir.join("structured.xml");

    let mut extract_config = config.clone();
    extract_config.output = Some(structured_path.clone());
    cmd_extract(&extract_config)?;

    // The flat input's images directory travels with the structured
    // file so render can copy it.
    let mut render_config = config.clone();
    render_config.input = Some(structured_path.clone());
    render_config.output = Some(out_dir.clone());
    let asset_source = input.parent().map(|p| p.join("images"));
    if let Some(asset) = asset_source.filter(|p| p.is_dir()) {
        // Rendering resolves images next to its input; for the staged
        // layout that is the output directory itself.
        let copied = out_dir.join("images");
        if !copied.exists() {
            copy_dir_recursive(&asset, &copied)?;
        }
    }
    cmd_render(&render_config)?;

    if config.stage_stats {
        let mut stats_config = config.clone();
        stats_config.input = Some(structured_path);
        stats_config.output = Some(out_dir.join("report.tsv"));
        match cmd_stats(&stats_config) {
            Ok(()) => {}
            Err(CliError::Validation(msg)) => {
                // A document with no heading tokens has no prominence
                // report; that is not a pipeline failure.
                eprintln!("note: statistics skipped: {msg}");
            }
            Err(other) => return Err(other),
        }
    }
    Ok(())
}

fn copy_dir_recursive(from: &Path, to: &Path) -> Result<(), CliError> {
    fs::create_dir_all(to)
        .map_err(|e| CliError::Io(format!("cannot create `{}`: {e}", to.display())))?;
    let entries = fs::read_dir(from)
        .map_err(|e| CliError::Io(format!("cannot read `{}`: {e}", from.display())))?;
    for entry in entries {
        let entry = entry.map_err(|e| CliError::Io(e.to_string()))?;
        let path = entry.path();
        let dest = to.join(entry.file_name());
        if path.is_dir() {
            copy_dir_recursive(&path, &dest)?;
        } else {
            fs::copy(&path, &dest)
                .map_err(|e| CliError::Io(format!("cannot copy `{}`: {e}", path.display())))?;
        }
    }
    Ok(())
}
