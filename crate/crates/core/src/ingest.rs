//! Transcript event parsing, tokenization and partial/final reconciliation.
//!
//! The log format is line-delimited JSON, one object per line:
//!
//! ```text
//! {"type":"event","session":"s1","source":"speaker","utt":"u1","seq":1,"t_ms":0,"text":"hello","conf":0.97,"final":true}
//! ```
//!
//! `conf` defaults to 1.0 and `final` defaults to `true` when absent. An
//! optional `words` array (`[{"w":"hello","c":0.97}]`) carries per-word
//! confidences; when present its words joined by single spaces must equal
//! `text`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_segmentation::UnicodeSegmentation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("malformed record: {0}")]
    MalformedRecord(String),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<IngestError>,
    },
}

/// Who produced an utterance: the external speaker or the person wearing the display.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceId {
    Speaker,
    Wearer,
}

impl SourceId {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceId::Speaker => "speaker",
            SourceId::Wearer => "wearer",
        }
    }
}

impl fmt::Display for SourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordConfidence {
    #[serde(rename = "w")]
    pub text: String,
    #[serde(rename = "c")]
    pub conf: f64,
}

/// One timestamped ASR emission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEvent {
    #[serde(rename = "session")]
    pub session_id: String,
    pub source: SourceId,
    #[serde(rename = "utt")]
    pub utterance_id: String,
    pub seq: u64,
    pub t_ms: u64,
    pub text: String,
    #[serde(default = "default_conf")]
    pub conf: f64,
    #[serde(rename = "final", default = "default_final")]
    pub is_final: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub words: Option<Vec<WordConfidence>>,
}

fn default_conf() -> f64 {
    1.0
}

fn default_final() -> bool {
    true
}

#[derive(Deserialize)]
struct RawRecord {
    #[serde(rename = "type")]
    kind: String,
    session: String,
    source: SourceId,
    utt: String,
    seq: u64,
    t_ms: u64,
    text: String,
    conf: Option<f64>,
    #[serde(rename = "final")]
    is_final: Option<bool>,
    words: Option<Vec<WordConfidence>>,
}

#[derive(Serialize)]
struct RecordRef<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    #[serde(flatten)]
    event: &'a TranscriptEvent,
}

impl TranscriptEvent {
    /// Checks the per-event invariants (confidence ranges, non-empty session, words/text agreement).
    pub fn validate(&self) -> Result<(), IngestError> {
        if self.session_id.is_empty() {
            return Err(IngestError::DomainError("empty session id".into()));
        }
        check_conf(self.conf)?;
        if let Some(words) = &self.words {
            for w in words {
                check_conf(w.conf)?;
                if w.text.is_empty() || w.text.chars().any(char::is_whitespace) {
                    return Err(IngestError::DomainError(format!(
                        "word entry {:?} is empty or contains whitespace",
                        w.text
                    )));
                }
            }
            let joined = words.iter().map(|w| w.text.as_str()).collect::<Vec<_>>().join(" ");
            if joined != self.text {
                return Err(IngestError::DomainError(format!(
                    "words array {joined:?} does not match text {:?}",
                    self.text
                )));
            }
        }
        Ok(())
    }

    /// Serializes to one log/wire record (no trailing newline).
    pub fn to_record(&self) -> String {
        serde_json::to_string(&RecordRef { kind: "event", event: self }).expect("transcript events always serialize")
    }
}

fn check_conf(conf: f64) -> Result<(), IngestError> {
    if (0.0..=1.0).contains(&conf) {
        Ok(())
    } else {
        Err(IngestError::DomainError(format!("confidence {conf} outside [0,1]")))
    }
}

pub fn parse_record(line: &str) -> Result<TranscriptEvent, IngestError> {
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| IngestError::MalformedRecord(e.to_string()))?;
    if raw.kind != "event" {
        return Err(IngestError::MalformedRecord(format!("expected type \"event\", got {:?}", raw.kind)));
    }
    let event = TranscriptEvent {
        session_id: raw.session,
        source: raw.source,
        utterance_id: raw.utt,
        seq: raw.seq,
        t_ms: raw.t_ms,
        text: raw.text,
        conf: raw.conf.unwrap_or(1.0),
        is_final: raw.is_final.unwrap_or(true),
        words: raw.words,
    };
    event.validate()?;
    Ok(event)
}

/// Parses a whole transcript log. Blank lines are skipped; errors carry 1-based line numbers.
///
/// Also enforces the stream invariants: `seq` strictly increasing and `t_ms`
/// non-decreasing per (session, source).
pub fn parse_log(text: &str) -> Result<Vec<TranscriptEvent>, IngestError> {
    let mut out = Vec::new();
    let mut last: HashMap<(String, SourceId), (u64, u64)> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let at = |source| IngestError::AtLine { line: i + 1, source: Box::new(source) };
        if line.trim().is_empty() {
            continue;
        }
        let event = parse_record(line).map_err(at)?;
        let key = (event.session_id.clone(), event.source);
        if let Some(&(seq, t_ms)) = last.get(&key) {
            if event.seq <= seq {
                return Err(at(IngestError::DomainError(format!(
                    "seq {} not greater than previous {seq} for {}",
                    event.seq, event.source
                ))));
            }
            if event.t_ms < t_ms {
                return Err(at(IngestError::DomainError(format!(
                    "t_ms {} earlier than previous {t_ms} for {}",
                    event.t_ms, event.source
                ))));
            }
        }
        last.insert(key, (event.seq, event.t_ms));
        out.push(event);
    }
    Ok(out)
}

/// Number of extended grapheme clusters in `s`.
pub fn grapheme_count(s: &str) -> usize {
    s.graphemes(true).count()
}

/// One displayable word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordToken {
    pub text: String,
    pub grapheme_len: usize,
    pub conf: f64,
    pub source: SourceId,
    /// Ordinal of this word within its source's stream.
    pub index: u64,
    /// Timestamp of the event the word came from.
    pub t_ms: u64,
    pub uncertain: bool,
}

impl WordToken {
    pub fn new(text: impl Into<String>, conf: f64, source: SourceId, index: u64, t_ms: u64) -> Self {
        let text = text.into();
        WordToken { grapheme_len: grapheme_count(&text), text, conf, source, index, t_ms, uncertain: false }
    }
}

/// Splits a final event into word tokens numbered from `first_index`.
///
/// Per-word confidences come from `words` when present, otherwise every token
/// inherits the event confidence.
pub fn tokenize_event(e: &TranscriptEvent, first_index: u64) -> Vec<WordToken> {
    let make = |i: usize, text: &str, conf: f64| WordToken::new(text, conf, e.source, first_index + i as u64, e.t_ms);
    match &e.words {
        Some(words) => words
            .iter()
            .flat_map(|w| w.text.split_whitespace().map(move |t| (t, w.conf)))
            .enumerate()
            .map(|(i, (t, c))| make(i, t, c))
            .collect(),
        None => e.text.split_whitespace().enumerate().map(|(i, t)| make(i, t, e.conf)).collect(),
    }
}

/// Assigns per-source word indices across a sequence of events.
#[derive(Debug, Default, Clone)]
pub struct WordCounter {
    next: HashMap<SourceId, u64>,
}

impl WordCounter {
    pub fn tokenize(&mut self, e: &TranscriptEvent) -> Vec<WordToken> {
        let next = self.next.entry(e.source).or_insert(0);
        let tokens = tokenize_event(e, *next);
        *next += tokens.len() as u64;
        tokens
    }
}

/// An utterance whose interim hypotheses were never followed by a final.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrphanPartial {
    pub session_id: String,
    pub source: SourceId,
    pub utterance_id: String,
    pub last_seq: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Reconciled {
    pub events: Vec<TranscriptEvent>,
    pub orphans: Vec<OrphanPartial>,
}

/// Keeps only the last final event of each utterance, ordered by its `t_ms`.
///
/// Utterances are keyed by (session, source, utterance id). Partials are
/// always superseded; utterances with no final are reported as orphans.
pub fn reconcile_partials(events: &[TranscriptEvent]) -> Reconciled {
    type Key<'a> = (&'a str, SourceId, &'a str);
    let mut order: Vec<Key> = Vec::new();
    let mut finals: HashMap<Key, &TranscriptEvent> = HashMap::new();
    let mut partials: HashMap<Key, &TranscriptEvent> = HashMap::new();
    for e in events {
        let key = (e.session_id.as_str(), e.source, e.utterance_id.as_str());
        if !finals.contains_key(&key) && !partials.contains_key(&key) {
            order.push(key);
        }
        if e.is_final {
            finals.insert(key, e);
        } else {
            partials.insert(key, e);
        }
    }
    let mut out = Reconciled::default();
    for key in order {
        match finals.get(&key) {
            Some(e) => out.events.push((*e).clone()),
            None => {
                let p = partials[&key];
                out.orphans.push(OrphanPartial {
                    session_id: p.session_id.clone(),
                    source: p.source,
                    utterance_id: p.utterance_id.clone(),
                    last_seq: p.seq,
                });
            }
        }
    }
    out.events.sort_by_key(|e| e.t_ms);
    out
}
