//! Command-line pipeline for re-engineering flat document streams into
//! structured XML and a cross-referenced hypertext site.

mod commands;
mod config;

use std::fs;
use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand};

use commands::CliError;
use config::PipelineConfig;

#[derive(Parser)]
#[command(
    name = "docweave",
    version,
    about = "Rebuild flat document tag streams into a logical tree and a hypertext site"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Key=value configuration file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Input file (flat XML for extract/pipeline, structured XML
    /// otherwise).
    #[arg(long, global = true, value_name = "FILE")]
    input: Option<PathBuf>,

    /// Output path (structured XML file for extract, directory for
    /// render/pipeline, report/keyword file otherwise).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Heading marker substring looked up in paragraph id attributes.
    #[arg(long, global = true, value_name = "TEXT")]
    marker: Option<String>,

    /// Keep only heading tokens occurring more than K times in the
    /// prominence statistics.
    #[arg(long, global = true, value_name = "K")]
    min_occurrence: Option<u64>,

    /// Validate and report without writing any file.
    #[arg(long, global = true)]
    dry_run: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a flat stream and write the structured XML document.
    Extract,
    /// Render a structured document into a hypertext site.
    Render,
    /// Print the class and package catalogs of a structured document.
    Concepts,
    /// Build the keyword bindings file for a structured document.
    Crossref,
    /// Print heading-prominence statistics for a structured document.
    Stats,
    /// Extract, render and report in one run.
    Pipeline,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut config = PipelineConfig::default();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read `{}`: {e}", path.display())))?;
        config.apply_file(&text).map_err(CliError::Io)?;
    }
    if let Some(input) = cli.input {
        config.input = Some(input);
    }
    if let Some(out) = cli.out {
        config.output = Some(out);
    }
    if let Some(marker) = cli.marker {
        config.marker = marker;
    }
    if let Some(k) = cli.min_occurrence {
        config.stats_min_occurrence = Some(k);
    }
    config.dry_run |= cli.dry_run;

    match cli.command {
        Command::Extract => commands::cmd_extract(&config),
        Command::Render => commands::cmd_render(&config),
        Command::Concepts => commands::cmd_concepts(&config),
        Command::Crossref => commands::cmd_crossref(&config),
        Command::Stats => commands::cmd_stats(&config),
        Command::Pipeline => commands::cmd_pipeline(&config),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(error) = run(cli) {
        eprintln!("error: {error}");
        process::exit(error.exit_code());
    }
}
