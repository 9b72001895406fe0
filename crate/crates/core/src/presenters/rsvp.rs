use crate::ingest::WordToken;

use super::{EngineConfig, PresenterError};

/// Fixation letter position for a word of `grapheme_len` graphemes.
///
/// Piecewise lookup that lands roughly a third of the way into the word.
pub fn orp_index(grapheme_len: usize) -> usize {
    match grapheme_len {
        0 | 1 => 0,
        2..=5 => 1,
        6..=9 => 2,
        10..=13 => 3,
        _ => 4,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RsvpFrame {
    pub token: WordToken,
    pub orp_index: usize,
    pub duration_ms: u64,
}

/// Display time for one word.
pub fn word_duration_ms(token: &WordToken, cfg: &EngineConfig) -> u64 {
    let base = (60_000.0 / cfg.wpm).round() as u64;
    let long = if token.grapheme_len >= 9 { cfg.long_word_bonus_ms } else { 0 };
    let pause = if cfg.sentence_terminators.iter().any(|t| !t.is_empty() && token.text.ends_with(t.as_str())) {
        cfg.sentence_pause_ms
    } else {
        0
    };
    base + long + pause
}

pub fn rsvp_schedule(tokens: &[WordToken], cfg: &EngineConfig) -> Result<Vec<RsvpFrame>, PresenterError> {
    if tokens.is_empty() {
        return Err(PresenterError::EmptyStream);
    }
    Ok(tokens
        .iter()
        .map(|t| RsvpFrame {
            token: t.clone(),
            orp_index: orp_index(t.grapheme_len),
            duration_ms: word_duration_ms(t, cfg),
        })
        .collect())
}
