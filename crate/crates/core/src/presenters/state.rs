//! Per-method presenter state machines.
//!
//! The state machines work on positions into the buffered main word stream
//! and emit [`View`]s; the engine turns views into styled, positioned frames.

use std::ops::Range;

use crate::ingest::WordToken;
use crate::layout::{LineBreakPolicy, LineBuilder};

use super::rsvp::word_duration_ms;
use super::{EngineConfig, PresentationMethod, PresenterError};

/// Greedy line breaking over a growing stream, tracked as position ranges.
#[derive(Debug, Clone)]
pub struct LineIndex {
    policy: LineBreakPolicy,
    builder: LineBuilder,
    closed: Vec<Range<usize>>,
    len: usize,
}

impl LineIndex {
    pub fn new(policy: LineBreakPolicy) -> Self {
        LineIndex { policy, builder: LineBuilder::new(policy), closed: Vec::new(), len: 0 }
    }

    fn closed_end(&self) -> usize {
        self.closed.last().map_or(0, |r| r.end)
    }

    /// Appends the token at the next position, returning the number of lines it closed.
    pub fn push(&mut self, token: WordToken) -> usize {
        let closed = self.builder.push(token);
        let n = closed.len();
        for line in closed {
            let start = self.closed_end();
            self.closed.push(start..start + line.len());
        }
        self.len += 1;
        n
    }

    /// Closes the open line, if any.
    pub fn close(&mut self) -> bool {
        match self.builder.take() {
            Some(line) => {
                let start = self.closed_end();
                self.closed.push(start..start + line.len());
                true
            }
            None => false,
        }
    }

    pub fn closed(&self) -> &[Range<usize>] {
        &self.closed
    }

    pub fn line_count(&self) -> usize {
        self.closed.len() + usize::from(self.closed_end() < self.len)
    }

    pub fn line(&self, i: usize) -> Range<usize> {
        if i < self.closed.len() {
            self.closed[i].clone()
        } else {
            self.closed_end()..self.len
        }
    }

    pub fn line_of(&self, pos: usize) -> usize {
        self.closed.partition_point(|r| r.end <= pos)
    }

    pub fn window_of(&self, pos: usize) -> usize {
        self.line_of(pos) / self.policy.max_lines_per_window
    }

    /// Lines of window `w` that exist so far.
    pub fn window_lines(&self, w: usize) -> Vec<Range<usize>> {
        let per = self.policy.max_lines_per_window;
        (w * per..((w + 1) * per).min(self.line_count())).map(|i| self.line(i)).collect()
    }

    pub fn last_window(&self) -> Option<Vec<Range<usize>>> {
        let n = self.line_count();
        (n > 0).then(|| self.window_lines((n - 1) / self.policy.max_lines_per_window))
    }
}

/// What the main region shows at one instant.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct View {
    pub t_ms: u64,
    pub lines: Vec<Range<usize>>,
    pub cursor: Option<usize>,
    /// RSVP fixation marker on the single visible word.
    pub orp: bool,
    pub end: bool,
}

impl View {
    pub fn word_count(&self) -> usize {
        self.lines.iter().map(ExactSizeIterator::len).sum()
    }
}

#[derive(Debug, Clone)]
pub struct PresenterState {
    pub method: PresentationMethod,
    tokens: Vec<WordToken>,
    lines: LineIndex,
    visible: Vec<Range<usize>>,
    /// Karaoke cursor position; equal to the token count while waiting for speech.
    cursor: usize,
    /// Ordinal of the window (karaoke) or segment (scrolling) on screen.
    pub window: usize,
    input_closed: bool,
    ended: bool,
    rsvp_free_at: u64,
    last_t: u64,
}

impl PresenterState {
    pub fn new(method: PresentationMethod, policy: LineBreakPolicy) -> Self {
        PresenterState {
            method,
            tokens: Vec::new(),
            lines: LineIndex::new(policy),
            visible: Vec::new(),
            cursor: 0,
            window: 0,
            input_closed: false,
            ended: false,
            rsvp_free_at: 0,
            last_t: 0,
        }
    }

    pub fn tokens(&self) -> &[WordToken] {
        &self.tokens
    }

    pub fn tokens_mut(&mut self) -> &mut [WordToken] {
        &mut self.tokens
    }

    pub fn ended(&self) -> bool {
        self.ended
    }

    pub fn input_closed(&self) -> bool {
        self.input_closed
    }

    /// Karaoke cursor word, if one is highlighted.
    pub fn cursor(&self) -> Option<usize> {
        (self.method == PresentationMethod::Karaoke && !self.ended && self.cursor < self.tokens.len())
            .then_some(self.cursor)
    }

    /// The view currently on screen.
    pub fn current_view(&self, t_ms: u64) -> View {
        let t_ms = t_ms.max(self.last_t);
        match self.method {
            PresentationMethod::Karaoke => {
                let lines = if self.tokens.is_empty() {
                    Vec::new()
                } else {
                    let pos = self.cursor.min(self.tokens.len() - 1);
                    self.lines.window_lines(self.lines.window_of(pos))
                };
                View { t_ms, lines, cursor: self.cursor(), orp: false, end: self.ended }
            }
            PresentationMethod::Rsvp => View {
                t_ms,
                lines: if self.ended { Vec::new() } else { self.visible.clone() },
                cursor: None,
                orp: !self.ended,
                end: self.ended,
            },
            _ => View { t_ms, lines: self.visible.clone(), cursor: None, orp: false, end: self.ended },
        }
    }

    fn emit(&mut self, t_ms: u64) -> View {
        let v = self.current_view(t_ms);
        self.last_t = v.t_ms;
        v
    }

    /// Feeds newly finalized main-stream words.
    pub fn push(&mut self, new_tokens: Vec<WordToken>, t_ms: u64, cfg: &EngineConfig) -> Vec<View> {
        if self.ended || new_tokens.is_empty() {
            return Vec::new();
        }
        match self.method {
            PresentationMethod::Rsvp => self.step_rsvp(new_tokens, t_ms, cfg),
            PresentationMethod::SingleLine => self.step_single_line(new_tokens, t_ms),
            PresentationMethod::MultiLine => self.step_multi_line(new_tokens, t_ms),
            PresentationMethod::Karaoke => self.step_karaoke(new_tokens, t_ms),
        }
    }

    fn append(&mut self, token: WordToken) -> usize {
        self.tokens.push(token.clone());
        self.lines.push(token)
    }

    /// RSVP: one view per word, each starting when the previous word's time is up.
    pub fn step_rsvp(&mut self, new_tokens: Vec<WordToken>, t_ms: u64, cfg: &EngineConfig) -> Vec<View> {
        let mut views = Vec::with_capacity(new_tokens.len());
        for token in new_tokens {
            let start = t_ms.max(self.rsvp_free_at);
            self.rsvp_free_at = start + word_duration_ms(&token, cfg);
            self.append(token);
            let pos = self.tokens.len() - 1;
            self.visible = std::iter::once(pos..pos + 1).collect();
            views.push(self.emit(start));
        }
        views
    }

    /// Single-line scrolling: each completed line replaces the one on screen.
    pub fn step_single_line(&mut self, new_tokens: Vec<WordToken>, t_ms: u64) -> Vec<View> {
        let mut views = Vec::new();
        for token in new_tokens {
            let closed = self.append(token);
            let all = self.lines.closed().len();
            for i in all - closed..all {
                self.visible = vec![self.lines.closed()[i].clone()];
                self.window = i;
                views.push(self.emit(t_ms));
            }
        }
        views
    }

    /// Multi-line scrolling: each completed segment of lines replaces the previous one.
    pub fn step_multi_line(&mut self, new_tokens: Vec<WordToken>, t_ms: u64) -> Vec<View> {
        let per = self.lines.policy.max_lines_per_window;
        let mut views = Vec::new();
        for token in new_tokens {
            let closed = self.append(token);
            let all = self.lines.closed().len();
            for n in all - closed + 1..=all {
                if n % per == 0 {
                    self.window = n / per - 1;
                    self.visible = self.lines.closed()[n - per..n].to_vec();
                    views.push(self.emit(t_ms));
                }
            }
        }
        views
    }

    fn step_karaoke(&mut self, new_tokens: Vec<WordToken>, t_ms: u64) -> Vec<View> {
        let was_waiting = self.cursor >= self.tokens.len();
        let first_new = self.tokens.len();
        for token in new_tokens {
            self.append(token);
        }
        self.window = self.lines.window_of(self.cursor.min(self.tokens.len() - 1));
        if was_waiting || self.lines.window_of(first_new) == self.window {
            vec![self.emit(t_ms)]
        } else {
            Vec::new()
        }
    }

    /// Moves the karaoke cursor one word forward.
    ///
    /// Passing the last word of a window moves to the next window. Past the
    /// final word the state ends once input is closed; while input is open it
    /// waits for the next word without highlighting anything.
    pub fn karaoke_advance(&mut self, t_ms: u64) -> Result<View, PresenterError> {
        if self.ended {
            return Err(PresenterError::AdvancePastEnd);
        }
        if self.cursor < self.tokens.len() {
            self.cursor += 1;
        }
        if self.cursor < self.tokens.len() {
            self.window = self.lines.window_of(self.cursor);
        } else if self.input_closed {
            self.ended = true;
        }
        Ok(self.emit(t_ms))
    }

    /// Marks the input stream finished and flushes any partial line or segment.
    pub fn close_input(&mut self, t_ms: u64) -> Vec<View> {
        if self.input_closed {
            return Vec::new();
        }
        self.input_closed = true;
        let mut views = Vec::new();
        match self.method {
            PresentationMethod::Rsvp => {
                self.lines.close();
                self.ended = true;
                views.push(self.emit(t_ms.max(self.rsvp_free_at)));
            }
            PresentationMethod::SingleLine => {
                if self.lines.close() {
                    self.window = self.lines.closed().len() - 1;
                    self.visible = vec![self.lines.closed()[self.window].clone()];
                    views.push(self.emit(t_ms));
                }
                self.ended = true;
                views.push(self.emit(t_ms));
            }
            PresentationMethod::MultiLine => {
                self.lines.close();
                let per = self.lines.policy.max_lines_per_window;
                let all = self.lines.closed().len();
                if !all.is_multiple_of(per) {
                    self.window = all / per;
                    self.visible = self.lines.closed()[all - all % per..].to_vec();
                    views.push(self.emit(t_ms));
                }
                self.ended = true;
                views.push(self.emit(t_ms));
            }
            PresentationMethod::Karaoke => {
                self.lines.close();
                if self.cursor >= self.tokens.len() {
                    self.ended = true;
                    views.push(self.emit(t_ms));
                }
            }
        }
        views
    }

    /// Ends the presentation regardless of reader progress.
    pub fn terminate(&mut self, t_ms: u64) -> Vec<View> {
        let mut views = self.close_input(t_ms);
        if !self.ended {
            self.ended = true;
            views.push(self.emit(t_ms));
        }
        views
    }
}
