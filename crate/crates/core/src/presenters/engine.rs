use serde::{Deserialize, Serialize};

use crate::annotate::{flag_uncertainty, style_highlight, style_markup, AnnotationConfig, StyledRun};
use crate::ingest::{TranscriptEvent, WordCounter, WordToken};
use crate::placement::{apply_drag, compute_box, FaceAnchor, PlacementMode};
use crate::router::{destination, style_personal, Destination, UtteranceMode};

use super::frame::{round_box, Region, RegionId, RenderFrame};
use super::rsvp::orp_index;
use super::state::{LineIndex, PresenterState, View};
use super::{EngineConfig, PresentationMethod, PresenterError};

/// A reader or operator input addressed to one display engine.
///
/// Wire form: `{"action":"advance"}`, `{"action":"set_placement","payload":{"mode":"left"}}`, ...
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", content = "payload", rename_all = "snake_case")]
pub enum Control {
    Advance,
    SetPlacement(PlacementChange),
    SetMode(ModeChange),
    /// Partial [`EngineConfig`] merged over the current one.
    SetConfig(serde_json::Value),
    Anchor(FaceAnchor),
}

/// Either an explicit mode or a drop point to snap.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlacementChange {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<PlacementMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drop: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ModeChange {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<UtteranceMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<PresentationMethod>,
}

/// One display's presentation engine: annotation, routing, presenter state,
/// placement and frame numbering.
#[derive(Debug, Clone)]
pub struct Engine {
    cfg: EngineConfig,
    state: PresenterState,
    personal_tokens: Vec<WordToken>,
    personal_lines: LineIndex,
    anchor: FaceAnchor,
    counter: WordCounter,
    next_frame_id: u64,
    words_read: usize,
}

impl Engine {
    pub fn new(cfg: EngineConfig) -> Result<Self, PresenterError> {
        cfg.validate()?;
        Ok(Engine {
            state: PresenterState::new(cfg.method, cfg.policy),
            personal_lines: LineIndex::new(cfg.policy),
            personal_tokens: Vec::new(),
            anchor: FaceAnchor::default(),
            counter: WordCounter::default(),
            next_frame_id: 0,
            words_read: 0,
            cfg,
        })
    }

    pub fn with_anchor(mut self, anchor: FaceAnchor) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn state(&self) -> &PresenterState {
        &self.state
    }

    pub fn anchor(&self) -> FaceAnchor {
        self.anchor
    }

    /// Words that have reached the reader: highlighted words for karaoke,
    /// displayed words otherwise.
    pub fn words_read(&self) -> usize {
        self.words_read
    }

    /// Feeds one transcript event. Interim hypotheses are ignored.
    pub fn push_event(&mut self, e: &TranscriptEvent) -> Vec<RenderFrame> {
        if !e.is_final {
            return Vec::new();
        }
        let tokens = self.counter.tokenize(e);
        self.push_tokens(tokens, e.t_ms)
    }

    pub fn push_tokens(&mut self, tokens: Vec<WordToken>, t_ms: u64) -> Vec<RenderFrame> {
        let mut main = Vec::new();
        let mut personal_changed = false;
        for token in tokens {
            let token = flag_uncertainty(token, &self.cfg.annotation);
            match destination(token.source, self.cfg.utterance_mode) {
                Destination::Main => main.push(token),
                Destination::Personal => {
                    self.personal_tokens.push(token.clone());
                    self.personal_lines.push(token);
                    personal_changed = true;
                }
                Destination::Dropped => {}
            }
        }
        let views = self.state.push(main, t_ms, &self.cfg);
        let mut frames = self.render_views(views);
        if personal_changed && frames.is_empty() {
            frames.push(self.render(t_ms));
        }
        frames
    }

    pub fn control(&mut self, control: &Control, t_ms: u64) -> Result<Vec<RenderFrame>, PresenterError> {
        match control {
            Control::Advance if self.cfg.method == PresentationMethod::Karaoke => {
                let view = self.state.karaoke_advance(t_ms)?;
                return Ok(self.render_views(vec![view]));
            }
            Control::Advance => {}
            Control::SetPlacement(change) => {
                if let Some(mode) = change.mode {
                    self.cfg.placement_mode = mode;
                } else if let Some(drop) = change.drop {
                    self.cfg.placement_mode = apply_drag(&self.anchor, drop, self.cfg.base_box, self.cfg.margin)
                        .map_err(|e| PresenterError::InvalidConfig(e.to_string()))?;
                }
            }
            Control::SetMode(change) => {
                let mut cfg = self.cfg.clone();
                if let Some(mode) = change.mode {
                    cfg.utterance_mode = mode;
                }
                if let Some(method) = change.method {
                    cfg.method = method;
                }
                self.reconfigure(cfg, t_ms)?;
            }
            Control::SetConfig(patch) => {
                let mut merged = serde_json::to_value(&self.cfg).expect("config serializes");
                merge_json(&mut merged, patch);
                let cfg: EngineConfig =
                    serde_json::from_value(merged).map_err(|e| PresenterError::InvalidConfig(e.to_string()))?;
                self.reconfigure(cfg, t_ms)?;
            }
            Control::Anchor(anchor) => {
                anchor.validate().map_err(|e| PresenterError::InvalidConfig(e.to_string()))?;
                self.anchor = *anchor;
            }
        }
        Ok(vec![self.render(t_ms)])
    }

    /// Applies a new config. Method or line-policy changes restart the
    /// presenter over the words buffered so far; utterance-mode changes apply
    /// to words arriving afterwards.
    fn reconfigure(&mut self, cfg: EngineConfig, t_ms: u64) -> Result<(), PresenterError> {
        cfg.validate()?;
        let threshold_changed = cfg.annotation.confidence_threshold != self.cfg.annotation.confidence_threshold;
        let restart = cfg.method != self.cfg.method || cfg.policy != self.cfg.policy;
        self.cfg = cfg;
        if threshold_changed {
            let ann = self.cfg.annotation.clone();
            reflag(self.state.tokens_mut(), &ann);
            reflag(&mut self.personal_tokens, &ann);
        }
        if restart {
            let tokens = self.state.tokens().to_vec();
            let closed = self.state.input_closed();
            self.state = PresenterState::new(self.cfg.method, self.cfg.policy);
            self.state.push(tokens, t_ms, &self.cfg);
            if closed {
                self.state.close_input(t_ms);
            }
            self.personal_lines = LineIndex::new(self.cfg.policy);
            for t in &self.personal_tokens {
                self.personal_lines.push(t.clone());
            }
        }
        Ok(())
    }

    /// Signals that no more words will arrive.
    pub fn close_input(&mut self, t_ms: u64) -> Vec<RenderFrame> {
        let views = self.state.close_input(t_ms);
        self.render_views(views)
    }

    /// Ends the presentation, emitting a final end-of-stream frame if needed.
    pub fn terminate(&mut self, t_ms: u64) -> Vec<RenderFrame> {
        let views = self.state.terminate(t_ms);
        self.render_views(views)
    }

    /// Re-renders what is currently on screen.
    pub fn render(&mut self, t_ms: u64) -> RenderFrame {
        let view = self.state.current_view(t_ms);
        self.render_view(&view)
    }

    fn render_views(&mut self, views: Vec<View>) -> Vec<RenderFrame> {
        views.iter().map(|v| self.render_view(v)).collect()
    }

    fn render_view(&mut self, view: &View) -> RenderFrame {
        let reached = match view.cursor {
            Some(c) => c + 1,
            None if self.cfg.method == PresentationMethod::Karaoke => 0,
            None => view.lines.iter().map(|r| r.end).max().unwrap_or(0),
        };
        self.words_read = self.words_read.max(reached);
        let personal = self.personal_view();
        let frame = render_view(
            self.state.tokens(),
            view,
            &self.personal_tokens,
            personal.as_deref(),
            &self.cfg,
            &self.anchor,
            self.next_frame_id,
        );
        self.next_frame_id += 1;
        frame
    }

    fn personal_view(&self) -> Option<Vec<std::ops::Range<usize>>> {
        if !self.cfg.utterance_mode.is_separated() {
            return None;
        }
        self.personal_lines.last_window()
    }
}

fn reflag(tokens: &mut [WordToken], cfg: &AnnotationConfig) {
    for t in tokens {
        t.uncertain = t.conf < cfg.confidence_threshold;
    }
}

fn merge_json(base: &mut serde_json::Value, patch: &serde_json::Value) {
    match (base, patch) {
        (serde_json::Value::Object(b), serde_json::Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(k) {
                    Some(slot) => merge_json(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, p) => *b = p.clone(),
    }
}

/// Composes a frame from a view: markup on every word, personal coloring,
/// highlight on the cursor, and boxes from the placement rules.
pub fn render_view(
    main_tokens: &[WordToken],
    view: &View,
    personal_tokens: &[WordToken],
    personal_lines: Option<&[std::ops::Range<usize>]>,
    cfg: &EngineConfig,
    anchor: &FaceAnchor,
    frame_id: u64,
) -> RenderFrame {
    let ann = &cfg.annotation;
    let style = |token: &WordToken, is_cursor: bool| -> StyledRun {
        let run = style_personal(token, style_markup(token, ann), cfg.utterance_mode, ann);
        style_highlight(run, ann, is_cursor)
    };
    let main_lines = view
        .lines
        .iter()
        .map(|range| {
            range
                .clone()
                .map(|pos| {
                    let token = &main_tokens[pos];
                    let mut run = style(token, view.cursor == Some(pos));
                    if view.orp {
                        run.orp = Some(orp_index(token.grapheme_len));
                    }
                    run
                })
                .collect()
        })
        .collect();
    let boxed =
        |mode| round_box(compute_box(anchor, mode, cfg.base_box, cfg.margin).expect("anchor validated on entry"));
    let mut regions = vec![Region { id: RegionId::Main, bbox: boxed(cfg.placement_mode), lines: main_lines }];
    if let Some(lines) = personal_lines {
        regions.push(Region {
            id: RegionId::Personal,
            bbox: boxed(PlacementMode::Traditional),
            lines: lines.iter().map(|r| r.clone().map(|pos| style(&personal_tokens[pos], false)).collect()).collect(),
        });
    }
    RenderFrame { frame_id, t_ms: view.t_ms, end_of_stream: view.end, regions }
}
