//! Plain-text rendering of frames for golden-file comparison.
//!
//! Each word is written as
//! `[H]{#RRGGBB}{bg:#RRGGBB}{x1.4}{orp:2}*/_~text~_/*G[/H]` where every part
//! except the text is present only when the run carries that attribute:
//! `[H]..[/H]` highlighted cursor, `*..*` bold, `/../` italic, `_.._`
//! underline, `~..~` squiggly, and `G` the suffix glyph.

use std::fmt::Write;

use thiserror::Error;

use crate::annotate::{StyleFlag, StyledRun};
use crate::ingest::grapheme_count;
use crate::presenters::{Region, RenderFrame};

#[derive(Debug, Error, PartialEq)]
pub enum SnapshotError {
    #[error("frame log line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("frame {index} out of range: log has {len} frames")]
    IndexOutOfRange { index: usize, len: usize },
}

pub fn parse_frame_log(text: &str) -> Result<Vec<RenderFrame>, SnapshotError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            RenderFrame::from_json_line(l).map_err(|e| SnapshotError::Parse { line: i + 1, msg: e.to_string() })
        })
        .collect()
}

/// Renders frame `n` (0-based position in the log) of a frame log.
pub fn emit_snapshot(frame_log: &str, n: usize) -> Result<String, SnapshotError> {
    let frames = parse_frame_log(frame_log)?;
    frames.get(n).map(render_frame).ok_or(SnapshotError::IndexOutOfRange { index: n, len: frames.len() })
}

/// Renders every frame, separated by blank lines.
pub fn render_frames(frames: &[RenderFrame]) -> String {
    frames.iter().map(render_frame).collect::<Vec<_>>().join("\n")
}

pub fn render_frame(frame: &RenderFrame) -> String {
    let mut out =
        format!("frame {} t={}ms{}\n", frame.frame_id, frame.t_ms, if frame.end_of_stream { " end" } else { "" });
    for region in &frame.regions {
        render_region(&mut out, region);
    }
    out
}

fn render_region(out: &mut String, region: &Region) {
    let b = &region.bbox;
    let header = format!(
        " {} x={:.3} y={:.3} w={:.3} h={:.3} scale={:.3} ",
        serde_json::to_value(region.id).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default(),
        b.x,
        b.y,
        b.w,
        b.h,
        b.scale
    );
    let lines: Vec<String> =
        region.lines.iter().map(|l| l.iter().map(render_run).collect::<Vec<_>>().join(" ")).collect();
    let inner = lines.iter().map(|l| grapheme_count(l)).max().unwrap_or(0).max(grapheme_count(&header));
    let _ = writeln!(out, "+{header}{}+", "-".repeat(inner - grapheme_count(&header) + 2));
    if lines.is_empty() {
        let _ = writeln!(out, "| (empty){} |", " ".repeat(inner.saturating_sub(7)));
    }
    for l in &lines {
        let _ = writeln!(out, "| {l}{} |", " ".repeat(inner - grapheme_count(l)));
    }
    let _ = writeln!(out, "+{}+", "-".repeat(inner + 2));
}

pub fn render_run(run: &StyledRun) -> String {
    let mut body = run.text.clone();
    for (flag, sigil) in
        [(StyleFlag::Squiggly, "~"), (StyleFlag::Underline, "_"), (StyleFlag::Italic, "/"), (StyleFlag::Bold, "*")]
    {
        if run.has(flag) {
            body = format!("{sigil}{body}{sigil}");
        }
    }
    if let Some(g) = run.suffix_glyph {
        body.push(g);
    }
    let mut tags = String::new();
    if let Some(c) = run.color {
        let _ = write!(tags, "{{{c}}}");
    }
    if let Some(c) = run.background {
        let _ = write!(tags, "{{bg:{c}}}");
    }
    if run.size_scale != 1.0 {
        let _ = write!(tags, "{{x{}}}", run.size_scale);
    }
    if let Some(i) = run.orp {
        let _ = write!(tags, "{{orp:{i}}}");
    }
    let word = tags + &body;
    if run.has(StyleFlag::Highlighted) {
        format!("[H]{word}[/H]")
    } else {
        word
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::{flag_uncertainty, style_highlight, style_markup};
    use crate::annotate::{AnnotationConfig, MarkupStyle, Rgb};
    use crate::ingest::{SourceId, WordToken};

    fn styled(conf: f64, markup: MarkupStyle, cursor: bool) -> StyledRun {
        let cfg = AnnotationConfig { markup_style: markup, ..AnnotationConfig::default() };
        let t = flag_uncertainty(WordToken::new("word", conf, SourceId::Speaker, 0, 0), &cfg);
        style_highlight(style_markup(&t, &cfg), &cfg, cursor)
    }

    #[test]
    fn sigils() {
        assert_eq!(render_run(&StyledRun::plain("hi")), "hi");
        assert_eq!(render_run(&styled(0.5, MarkupStyle::Squiggly, false)), "~word~");
        assert_eq!(render_run(&styled(0.5, MarkupStyle::Italic, false)), "/word/");
        assert_eq!(render_run(&styled(0.5, MarkupStyle::BoldYellow, false)), "{#FFD400}*word*");
        assert_eq!(render_run(&styled(0.5, MarkupStyle::Emoticon, false)), "word\u{1F620}");
        assert_eq!(render_run(&styled(1.0, MarkupStyle::Squiggly, true)), "[H]{#D62718}word[/H]");
        let mut r = StyledRun::plain("go");
        r.background = Some(Rgb::GREEN);
        r.size_scale = 1.4;
        r.orp = Some(1);
        r.set(StyleFlag::Underline);
        assert_eq!(render_run(&r), "{bg:#1B8A3A}{x1.4}{orp:1}_go_");
    }

    #[test]
    fn out_of_range_and_parse_errors() {
        assert_eq!(emit_snapshot("", 0), Err(SnapshotError::IndexOutOfRange { index: 0, len: 0 }));
        assert!(matches!(emit_snapshot("\n{bad", 0), Err(SnapshotError::Parse { line: 2, .. })));
    }

    #[test]
    fn boxed_layout() {
        use crate::presenters::{Engine, EngineConfig};
        let mut e = Engine::new(EngineConfig::default()).unwrap();
        let toks = ["the", "quick", "brown", "fox"]
            .iter()
            .enumerate()
            .map(|(i, w)| WordToken::new(*w, 1.0, SourceId::Speaker, i as u64, 0))
            .collect();
        let frames = e.push_tokens(toks, 0);
        let log: String = frames.iter().map(|f| f.to_json_line() + "\n").collect();
        let snap = emit_snapshot(&log, 0).unwrap();
        let lines: Vec<&str> = snap.lines().collect();
        assert_eq!(lines[0], "frame 0 t=0ms");
        assert!(lines[1].starts_with("+ main x=0.325 y=0.445 w=0.350 h=0.120 scale=1.000 "));
        assert!(snap.contains("[H]{#D62718}the[/H] quick brown"));
        let widths: Vec<usize> = lines[1..].iter().map(|l| grapheme_count(l)).collect();
        assert!(widths.windows(2).all(|w| w[0] == w[1]), "{snap}");
    }
}
