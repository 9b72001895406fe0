//! Speaker/wearer stream separation for the personal-utterance display modes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::annotate::{str_enum, AnnotationConfig, StyledRun};
use crate::ingest::{SourceId, WordToken};

/// How the wearer's own speech is shown.
///
/// `InlinePlain` and `InlineColored` merge it into the speaker's captions,
/// the `Separated*` modes move it to a bottom-center personal region, and
/// `Hidden` drops it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UtteranceMode {
    Hidden,
    InlinePlain,
    InlineColored,
    SeparatedPlain,
    #[default]
    SeparatedColored,
}

impl UtteranceMode {
    pub const ALL: [UtteranceMode; 5] = [
        UtteranceMode::Hidden,
        UtteranceMode::InlinePlain,
        UtteranceMode::InlineColored,
        UtteranceMode::SeparatedPlain,
        UtteranceMode::SeparatedColored,
    ];

    pub fn is_separated(self) -> bool {
        matches!(self, UtteranceMode::SeparatedPlain | UtteranceMode::SeparatedColored)
    }

    pub fn is_colored(self) -> bool {
        matches!(self, UtteranceMode::InlineColored | UtteranceMode::SeparatedColored)
    }
}

str_enum!(UtteranceMode {
    UtteranceMode::Hidden => "hidden",
    UtteranceMode::InlinePlain => "inline-plain",
    UtteranceMode::InlineColored => "inline-colored",
    UtteranceMode::SeparatedPlain => "separated-plain",
    UtteranceMode::SeparatedColored => "separated-colored",
});

/// Where a single token goes under `mode`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Destination {
    Main,
    Personal,
    Dropped,
}

pub fn destination(source: SourceId, mode: UtteranceMode) -> Destination {
    match (source, mode) {
        (SourceId::Speaker, _) => Destination::Main,
        (SourceId::Wearer, UtteranceMode::Hidden) => Destination::Dropped,
        (SourceId::Wearer, m) if m.is_separated() => Destination::Personal,
        (SourceId::Wearer, _) => Destination::Main,
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Routed {
    pub main: Vec<WordToken>,
    pub personal: Vec<WordToken>,
}

/// Splits a token stream into main and personal streams.
///
/// Inline modes merge both sources into `main` ordered by `t_ms`; ties keep
/// input order.
pub fn route(tokens: &[WordToken], mode: UtteranceMode) -> Routed {
    let mut out = Routed::default();
    for t in tokens {
        match destination(t.source, mode) {
            Destination::Main => out.main.push(t.clone()),
            Destination::Personal => out.personal.push(t.clone()),
            Destination::Dropped => {}
        }
    }
    out.main.sort_by_key(|t| t.t_ms);
    out
}

/// Colors wearer runs in the `*_colored` modes. `runs` and `tokens` are parallel.
pub fn style_region(
    tokens: &[WordToken],
    runs: Vec<StyledRun>,
    mode: UtteranceMode,
    cfg: &AnnotationConfig,
) -> Vec<StyledRun> {
    debug_assert_eq!(tokens.len(), runs.len());
    tokens.iter().zip(runs).map(|(t, run)| style_personal(t, run, mode, cfg)).collect()
}

pub fn style_personal(token: &WordToken, mut run: StyledRun, mode: UtteranceMode, cfg: &AnnotationConfig) -> StyledRun {
    if token.source == SourceId::Wearer && mode.is_colored() {
        run.color = Some(cfg.personal_color);
    }
    run
}
