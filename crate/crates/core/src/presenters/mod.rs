//! Presentation methods: RSVP, single-line and multi-line scrolling, and
//! reader-driven karaoke highlighting.
//!
//! Presenters are event driven. They never read a clock; every input carries
//! its own timestamp and pacing is left to the caller.

mod engine;
mod frame;
mod rsvp;
mod state;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotate::{str_enum, AnnotationConfig};
use crate::layout::LineBreakPolicy;
use crate::placement::{PlacementMode, DEFAULT_BASE, DEFAULT_MARGIN};
use crate::router::UtteranceMode;

pub use engine::{render_view, Control, Engine, ModeChange, PlacementChange};
pub use frame::{round_box, Region, RegionId, RenderFrame};
pub use rsvp::{orp_index, rsvp_schedule, word_duration_ms, RsvpFrame};
pub use state::{LineIndex, PresenterState, View};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PresenterError {
    #[error("empty word stream")]
    EmptyStream,
    #[error("advance past the end of the presentation")]
    AdvancePastEnd,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PresentationMethod {
    Rsvp,
    SingleLine,
    MultiLine,
    #[default]
    Karaoke,
}

impl PresentationMethod {
    pub const ALL: [PresentationMethod; 4] = [
        PresentationMethod::Rsvp,
        PresentationMethod::SingleLine,
        PresentationMethod::MultiLine,
        PresentationMethod::Karaoke,
    ];
}

str_enum!(PresentationMethod {
    PresentationMethod::Rsvp => "rsvp",
    PresentationMethod::SingleLine => "single_line",
    PresentationMethod::MultiLine => "multi_line",
    PresentationMethod::Karaoke => "karaoke",
});

/// Full design-space selection for one display.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    pub method: PresentationMethod,
    pub policy: LineBreakPolicy,
    pub annotation: AnnotationConfig,
    pub placement_mode: PlacementMode,
    pub utterance_mode: UtteranceMode,
    pub wpm: f64,
    pub long_word_bonus_ms: u64,
    pub sentence_pause_ms: u64,
    pub sentence_terminators: Vec<String>,
    /// Caption box extent at scale 1.0.
    pub base_box: (f64, f64),
    pub margin: f64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            method: PresentationMethod::Karaoke,
            policy: LineBreakPolicy::default(),
            annotation: AnnotationConfig::default(),
            placement_mode: PlacementMode::Below,
            utterance_mode: UtteranceMode::Hidden,
            wpm: 45.0,
            long_word_bonus_ms: 300,
            sentence_pause_ms: 500,
            sentence_terminators: vec![".".into(), "?".into(), "!".into()],
            base_box: DEFAULT_BASE,
            margin: DEFAULT_MARGIN,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), PresenterError> {
        let bad = |m: String| Err(PresenterError::InvalidConfig(m));
        if !(10.0..=1000.0).contains(&self.wpm) {
            return bad(format!("wpm {} outside [10,1000]", self.wpm));
        }
        let (w, h) = self.base_box;
        if !(w > 0.0 && w < 1.0 && h > 0.0 && h < 1.0) {
            return bad(format!("base box {:?} must lie in (0,1)", self.base_box));
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return bad(format!("margin {} must be >= 0", self.margin));
        }
        self.policy.validate().or_else(bad)?;
        self.annotation.validate().or_else(bad)
    }
}
