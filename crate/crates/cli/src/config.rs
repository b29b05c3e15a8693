//! Run configuration: a plain key=value file plus flag overrides.
//!
//! Defaults reproduce the full end-to-end behavior with nothing but an
//! input and an output, so a config file is only needed to change
//! patterns, vocabularies or stage toggles. Flags win over file keys.

use std::path::PathBuf;

use docweave_core::structure::{
    HeadingPatterns, DEFAULT_CHAPTER_PATTERN, DEFAULT_END_PART_PATTERN,
    DEFAULT_KEYWORD_VOCABULARY, DEFAULT_LAST_PART_PATTERN, DEFAULT_PART_PATTERN,
    DEFAULT_SECTION_PATTERN, DEFAULT_SUBSECTION_PATTERN,
};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    /// Substring of `id` attributes that marks heading paragraphs.
    pub marker: String,
    pub pattern_part: String,
    pub pattern_chapter: String,
    pub pattern_section: String,
    pub pattern_subsection: String,
    pub pattern_end_part: String,
    pub pattern_last_part: String,
    pub keywords: Vec<String>,
    pub concepts_trigger: String,
    /// Package names for the catalog; empty means derive them from the
    /// observed references.
    pub concepts_packages: Vec<String>,
    pub stats_min_occurrence: Option<u64>,
    pub stats_stop_words: Vec<String>,
    pub stage_concepts: bool,
    pub stage_crossref: bool,
    pub stage_stats: bool,
    pub dry_run: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: None,
            output: None,
            marker: docweave_core::ingest::DEFAULT_MARKER.to_string(),
            pattern_part: DEFAULT_PART_PATTERN.to_string(),
            pattern_chapter: DEFAULT_CHAPTER_PATTERN.to_string(),
            pattern_section: DEFAULT_SECTION_PATTERN.to_string(),
            pattern_subsection: DEFAULT_SUBSECTION_PATTERN.to_string(),
            pattern_end_part: DEFAULT_END_PART_PATTERN.to_string(),
            pattern_last_part: DEFAULT_LAST_PART_PATTERN.to_string(),
            keywords: DEFAULT_KEYWORD_VOCABULARY
                .iter()
                .map(|s| s.to_string())
                .collect(),
            concepts_trigger: docweave_core::concepts::DEFAULT_TRIGGER.to_string(),
            concepts_packages: Vec::new(),
            stats_min_occurrence: None,
            stats_stop_words: Vec::new(),
            stage_concepts: true,
            stage_crossref: true,
            stage_stats: true,
            dry_run: false,
        }
    }
}

impl PipelineConfig {
    /// Apply one config-file body on top of this configuration.
    pub fn apply_file(&mut self, text: &str) -> Result<(), String> {
        for (i, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected `key = value`", i + 1))?;
            let key = key.trim();
            let value = value.trim();
            let list = || -> Vec<String> {
                value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            };
            let flag = |value: &str| -> Result<bool, String> {
                match value {
                    "true" | "on" | "yes" | "1" => Ok(true),
                    "false" | "off" | "no" | "0" => Ok(false),
                    other => Err(format!("config line {}: `{other}` is not a boolean", i + 1)),
                }
            };
            match key {
                "input" => self.input = Some(PathBuf::from(value)),
                "output" => self.output = Some(PathBuf::from(value)),
                "marker" => self.marker = value.to_string(),
                "patterns.part" => self.pattern_part = value.to_string(),
                "patterns.chapter" => self.pattern_chapter = value.to_string(),
                "patterns.section" => self.pattern_section = value.to_string(),
                "patterns.subsection" => self.pattern_subsection = value.to_string(),
                "patterns.endpart" => self.pattern_end_part = value.to_string(),
                "patterns.lastpart" => self.pattern_last_part = value.to_string(),
                "keywords" => self.keywords = list(),
                "concepts.trigger" => self.concepts_trigger = value.to_string(),
                "concepts.packages" => self.concepts_packages = list(),
                "stats.min_occurrence" => {
                    let k = value
                        .parse::<u64>()
                        .map_err(|_| format!("config line {}: bad integer `{value}`", i + 1))?;
                    self.stats_min_occurrence = Some(k);
                }
                "stats.stop_words" => self.stats_stop_words = list(),
                "stages.concepts" => self.stage_concepts = flag(value)?,
                "stages.crossref" => self.stage_crossref = flag(value)?,
                "stages.stats" => self.stage_stats = flag(value)?,
                other => return Err(format!("config line {}: unknown key `{other}`", i + 1)),
            }
        }
        Ok(())
    }

    pub fn heading_patterns(&self) -> Result<HeadingPatterns, String> {
        if self.marker.is_empty() {
            return Err("marker must be non-empty".to_string());
        }
        HeadingPatterns::new(
            &self.pattern_part,
            &self.pattern_chapter,
            &self.pattern_section,
            &self.pattern_subsection,
            &self.pattern_end_part,
            &self.pattern_last_part,
            self.keywords.clone(),
        )
        .map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_need_no_keys() {
        let config = PipelineConfig::default();
        assert_eq!(config.marker, "LinkTarget");
        assert!(config.stage_concepts && config.stage_crossref && config.stage_stats);
        assert!(config.heading_patterns().is_ok());
    }

    #[test]
    fn file_keys_override_defaults() {
        let mut config = PipelineConfig::default();
        config
            .apply_file(
                "# comment\n\
                 marker = Bookmark\n\
                 keywords = Alpha, Beta\n\
                 concepts.packages = Actions, CompleteActions\n\
                 stats.min_occurrence = 2\n\
                 stages.concepts = off\n",
            )
            .unwrap();
        assert_eq!(config.marker, "Bookmark");
        assert_eq!(config.keywords, vec!["Alpha", "Beta"]);
        assert_eq!(
            config.concepts_packages,
            vec!["Actions", "CompleteActions"]
        );
        assert_eq!(config.stats_min_occurrence, Some(2));
        assert!(!config.stage_concepts);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        let mut config = PipelineConfig::default();
        assert!(config.apply_file("no-equals-sign\n").is_err());
        assert!(config.apply_file("bogus.key = 1\n").is_err());
        assert!(config.apply_file("stages.stats = maybe\n").is_err());
        assert!(config.apply_file("stats.min_occurrence = many\n").is_err());
    }
}
