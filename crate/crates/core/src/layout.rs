//! Greedy line breaking and window pagination.

use serde::{Deserialize, Serialize};

use crate::ingest::WordToken;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LineBreakPolicy {
    pub max_words_per_line: usize,
    pub max_lines_per_window: usize,
    pub max_graphemes_per_line: usize,
}

impl Default for LineBreakPolicy {
    fn default() -> Self {
        LineBreakPolicy { max_words_per_line: 3, max_lines_per_window: 2, max_graphemes_per_line: 30 }
    }
}

impl LineBreakPolicy {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_words_per_line == 0 || self.max_lines_per_window == 0 || self.max_graphemes_per_line == 0 {
            return Err("line break policy limits must all be >= 1".into());
        }
        Ok(())
    }

    /// Most words a window can show.
    pub fn window_capacity(&self) -> usize {
        self.max_words_per_line * self.max_lines_per_window
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CaptionLine {
    pub tokens: Vec<WordToken>,
}

impl CaptionLine {
    /// Graphemes including one separator between adjacent words.
    pub fn grapheme_width(&self) -> usize {
        let words: usize = self.tokens.iter().map(|t| t.grapheme_len).sum();
        words + self.tokens.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// A page of at most `max_lines_per_window` lines.
///
/// Word indices are positions in the sequence that was broken into lines,
/// counted from zero, so consecutive windows cover contiguous ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub lines: Vec<CaptionLine>,
    pub first_word_index: usize,
    pub last_word_index: usize,
}

/// Incremental greedy line breaker.
///
/// A line is closed as soon as it holds `max_words_per_line` words, or when the
/// next word would push it past the grapheme budget.
#[derive(Debug, Clone)]
pub struct LineBuilder {
    policy: LineBreakPolicy,
    open: CaptionLine,
    width: usize,
}

impl LineBuilder {
    pub fn new(policy: LineBreakPolicy) -> Self {
        LineBuilder { policy, open: CaptionLine::default(), width: 0 }
    }

    /// Adds a token, returning any lines it closed (at most two).
    pub fn push(&mut self, token: WordToken) -> Vec<CaptionLine> {
        let mut closed = Vec::new();
        if !self.open.is_empty() && self.width + 1 + token.grapheme_len > self.policy.max_graphemes_per_line {
            closed.extend(self.take());
        }
        self.width += if self.open.is_empty() { token.grapheme_len } else { token.grapheme_len + 1 };
        self.open.tokens.push(token);
        if self.open.len() >= self.policy.max_words_per_line {
            closed.extend(self.take());
        }
        closed
    }

    /// The line still accepting words, if any.
    pub fn open_line(&self) -> Option<&CaptionLine> {
        (!self.open.is_empty()).then_some(&self.open)
    }

    /// Closes and returns the open line.
    pub fn take(&mut self) -> Option<CaptionLine> {
        self.width = 0;
        let line = std::mem::take(&mut self.open);
        (!line.is_empty()).then_some(line)
    }
}

pub fn break_lines(tokens: &[WordToken], policy: &LineBreakPolicy) -> Vec<CaptionLine> {
    let mut builder = LineBuilder::new(*policy);
    let mut lines: Vec<CaptionLine> = tokens.iter().cloned().flat_map(|t| builder.push(t)).collect();
    lines.extend(builder.take());
    lines
}

pub fn paginate(lines: &[CaptionLine], policy: &LineBreakPolicy) -> Vec<Window> {
    let mut next_index = 0;
    lines
        .chunks(policy.max_lines_per_window)
        .map(|chunk| {
            let words: usize = chunk.iter().map(CaptionLine::len).sum();
            let first = next_index;
            next_index += words;
            Window {
                lines: chunk.to_vec(),
                first_word_index: first,
                last_word_index: (first + words).saturating_sub(1),
            }
        })
        .collect()
}
