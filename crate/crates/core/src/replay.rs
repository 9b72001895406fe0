//! Offline, deterministic replay of a transcript log through one engine.
//!
//! A control script is JSON lines of the form
//! `{"t_ms":1200,"action":"advance"}` or
//! `{"t_ms":3000,"action":"set_placement","payload":{"mode":"left"}}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{parse_log, reconcile_partials, IngestError, TranscriptEvent};
use crate::metrics::{MetricsError, SessionMetrics};
use crate::placement::FaceAnchor;
use crate::presenters::{Control, Engine, EngineConfig, PresenterError, RenderFrame};

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("transcript log: {0}")]
    Log(#[from] IngestError),
    #[error("control script line {line}: {msg}")]
    Script { line: usize, msg: String },
    #[error("control script line {line}: {source}")]
    Control { line: usize, source: PresenterError },
    #[error(transparent)]
    Config(PresenterError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlEntry {
    pub t_ms: u64,
    #[serde(flatten)]
    pub control: Control,
    /// 1-based line in the script, for error reports.
    #[serde(skip)]
    pub line: usize,
}

impl ControlEntry {
    pub fn new(t_ms: u64, control: Control) -> Self {
        ControlEntry { t_ms, control, line: 0 }
    }

    pub fn to_record(&self) -> String {
        serde_json::to_string(self).expect("controls always serialize")
    }
}

/// Parses a control script; times must be non-decreasing.
pub fn parse_control_script(text: &str) -> Result<Vec<ControlEntry>, ReplayError> {
    let mut out: Vec<ControlEntry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let mut entry: ControlEntry =
            serde_json::from_str(raw).map_err(|e| ReplayError::Script { line, msg: e.to_string() })?;
        entry.line = line;
        if let Some(prev) = out.last() {
            if entry.t_ms < prev.t_ms {
                return Err(ReplayError::Script {
                    line,
                    msg: format!("t_ms {} earlier than previous {}", entry.t_ms, prev.t_ms),
                });
            }
        }
        out.push(entry);
    }
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct ReplayScript {
    pub events: Vec<TranscriptEvent>,
    pub config: EngineConfig,
    pub controls: Vec<ControlEntry>,
    pub anchor: FaceAnchor,
    /// Comprehension grade fed into the efficiency metric.
    pub comprehension: f64,
}

impl ReplayScript {
    pub fn from_texts(log: &str, controls: &str, config: EngineConfig) -> Result<Self, ReplayError> {
        Ok(ReplayScript {
            events: parse_log(log)?,
            config,
            controls: parse_control_script(controls)?,
            ..ReplayScript::default()
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplayOutput {
    pub frames: Vec<RenderFrame>,
    pub metrics: SessionMetrics,
}

impl ReplayOutput {
    /// One frame per line, each line newline-terminated.
    pub fn frame_log(&self) -> String {
        self.frames.iter().map(|f| f.to_json_line() + "\n").collect()
    }
}

/// Runs the script, calling `sink` with each batch of frames as it is produced.
///
/// Events and controls are merged by time, events first on ties. Input is
/// closed right after the last event and the presentation terminated after
/// the last control.
pub fn run_replay_with(
    script: &ReplayScript,
    mut sink: impl FnMut(&[RenderFrame]),
) -> Result<ReplayOutput, ReplayError> {
    let events = reconcile_partials(&script.events).events;
    let mut frames = Vec::new();
    if events.is_empty() {
        return Ok(ReplayOutput { frames, metrics: SessionMetrics::default() });
    }
    let mut engine = Engine::new(script.config.clone()).map_err(ReplayError::Config)?.with_anchor(script.anchor);
    let mut emit = |batch: Vec<RenderFrame>, frames: &mut Vec<RenderFrame>| {
        if !batch.is_empty() {
            sink(&batch);
            frames.extend(batch);
        }
    };

    let mut ctl = script.controls.iter().peekable();
    let mut now = 0;
    for e in &events {
        while let Some(c) = ctl.next_if(|c| c.t_ms < e.t_ms) {
            now = c.t_ms;
            let batch =
                engine.control(&c.control, now).map_err(|source| ReplayError::Control { line: c.line, source })?;
            emit(batch, &mut frames);
        }
        now = now.max(e.t_ms);
        emit(engine.push_event(e), &mut frames);
    }
    emit(engine.close_input(now), &mut frames);
    for c in ctl {
        now = now.max(c.t_ms);
        let batch = engine.control(&c.control, now).map_err(|source| ReplayError::Control { line: c.line, source })?;
        emit(batch, &mut frames);
    }
    emit(engine.terminate(now), &mut frames);

    let duration = match (frames.first(), frames.last()) {
        (Some(a), Some(b)) => b.t_ms - a.t_ms,
        _ => 0,
    };
    let metrics = SessionMetrics::new(engine.words_read() as u64, duration, script.comprehension)?;
    Ok(ReplayOutput { frames, metrics })
}

pub fn run_replay(script: &ReplayScript) -> Result<ReplayOutput, ReplayError> {
    run_replay_with(script, |_| {})
}
