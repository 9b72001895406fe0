use std::path::PathBuf;

use capstream_core::{EngineConfig, HighlightStyle, MarkupStyle, PlacementMode, PresentationMethod, UtteranceMode};
use clap::Args;

use crate::exit::{Classify, CliResult};

/// Presenter settings. Flags override values from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct EngineArgs {
    /// JSON engine config used as the base
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// rsvp, single_line, multi_line or karaoke
    #[arg(long)]
    pub method: Option<PresentationMethod>,
    /// RSVP reading speed
    #[arg(long)]
    pub wpm: Option<f64>,
    /// Maximum words per caption line
    #[arg(long)]
    pub words_per_line: Option<usize>,
    /// Lines per caption window
    #[arg(long)]
    pub lines: Option<usize>,
    /// none, italic, emoticon, bold_yellow or squiggly
    #[arg(long)]
    pub markup: Option<MarkupStyle>,
    /// font_color, bold, background, underline, italic or font_size
    #[arg(long)]
    pub highlight: Option<HighlightStyle>,
    /// left, right, below or traditional
    #[arg(long)]
    pub placement: Option<PlacementMode>,
    /// hidden, inline-plain, inline-colored, separated-plain or separated-colored
    #[arg(long)]
    pub utterance_mode: Option<UtteranceMode>,
    /// Words with confidence strictly below this are uncertain
    #[arg(long)]
    pub threshold: Option<f64>,
}

impl EngineArgs {
    pub fn to_config(&self) -> CliResult<EngineConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).input()?;
                serde_json::from_str(&text).input()?
            }
            None => EngineConfig::default(),
        };
        if let Some(v) = self.method {
            cfg.method = v;
        }
        if let Some(v) = self.wpm {
            cfg.wpm = v;
        }
        if let Some(v) = self.words_per_line {
            cfg.policy.max_words_per_line = v;
        }
        if let Some(v) = self.lines {
            cfg.policy.max_lines_per_window = v;
        }
        if let Some(v) = self.markup {
            cfg.annotation.markup_style = v;
        }
        if let Some(v) = self.highlight {
            cfg.annotation.highlight_style = v;
        }
        if let Some(v) = self.placement {
            cfg.placement_mode = v;
        }
        if let Some(v) = self.utterance_mode {
            cfg.utterance_mode = v;
        }
        if let Some(v) = self.threshold {
            cfg.annotation.confidence_threshold = v;
        }
        cfg.validate().input()?;
        Ok(cfg)
    }
}
