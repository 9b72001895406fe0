//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use capstream_core::annotate::flag_uncertainty;
use capstream_core::metrics::dist::{chi_square_sf, f_sf, normal_two_sided, t_two_sided};
use capstream_core::metrics::{
    average_ranks, friedman_test, paired_t, quis_score, reading_efficiency, rm_anova, rtlx_score, sus_score,
    wilcoxon_signed_rank, RankMatrix,
};
use capstream_core::placement::{clamp_to_viewport, unclamped_box, MAX_SCALE, MIN_SCALE, TRADITIONAL_CENTER};
use capstream_core::presenters::{orp_index, rsvp_schedule};
use capstream_core::replay::{run_replay, ReplayScript};
use capstream_core::snapshot::render_frames;
use capstream_core::{
    AnnotationConfig, CaptionBox, Engine, EngineConfig, FaceAnchor, HighlightStyle, MarkupStyle, PlacementMode,
    PresentationMethod, RenderFrame, SourceId, TranscriptEvent, UtteranceMode, WordToken,
};
use capstream_relay::{start, Delivery, Message, RelayClient, RelayConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KARAOKE_STREAMS: usize = 256;
const KARAOKE_MAX_WORDS: usize = 500;
const KARAOKE_MAX_VISIBLE: usize = 6;
const KARAOKE_BUDGET: Duration = Duration::from_secs(5);
const RSVP_STREAMS: usize = 200;
const FLAG_WORDS: usize = 10_000;
const FLAG_THRESHOLD: f64 = 0.995;
const PLACEMENT_ANCHORS: usize = 10_000;
const CENTER_TOL: f64 = 1e-12;
const RELAY_EVENTS: u64 = 160;
const RELAY_P95_LIMIT: Duration = Duration::from_millis(50);
const RELAY_BUDGET: Duration = Duration::from_secs(10);
const EFFICIENCY_TOL: f64 = 0.01;
const EXACT_TOL: f64 = 1e-9;
const TABLE_TOL: f64 = 5e-4;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn manifest() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn word(i: usize, conf: f64, t_ms: u64) -> WordToken {
    WordToken::new(format!("w{i}"), conf, SourceId::Speaker, i as u64, t_ms)
}

fn highlighted(frame: &RenderFrame, cfg: &AnnotationConfig) -> Vec<String> {
    frame.main().runs().filter(|r| r.color == Some(cfg.highlight_color)).map(|r| r.text.clone()).collect()
}

fn karaoke_conservation() -> Check {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b61);
    let cfg = EngineConfig::default();
    ensure(cfg.policy.max_words_per_line == 3 && cfg.policy.max_lines_per_window == 2, || "policy is not 3x2".into())?;
    let mut total_words = 0;
    for stream in 0..KARAOKE_STREAMS {
        let n = rng.gen_range(1..=KARAOKE_MAX_WORDS);
        total_words += n;
        let mut engine = Engine::new(cfg.clone()).map_err(|e| e.to_string())?;
        let mut frames = Vec::new();
        let mut t = 0u64;
        let mut pushed = 0;
        while pushed < n {
            let k = rng.gen_range(1..=12).min(n - pushed);
            let tokens = (pushed..pushed + k).map(|i| word(i, 1.0, t)).collect();
            frames.extend(engine.push_tokens(tokens, t));
            pushed += k;
            for _ in 0..rng.gen_range(0..4) {
                t += 10;
                frames.extend(engine.control(&capstream_core::Control::Advance, t).map_err(|e| e.to_string())?);
            }
            t += 10;
        }
        frames.extend(engine.close_input(t));
        while !engine.state().ended() {
            t += 10;
            frames.extend(engine.control(&capstream_core::Control::Advance, t).map_err(|e| e.to_string())?);
        }
        let mut order: Vec<String> = Vec::new();
        for f in &frames {
            let visible = f.main().word_count();
            ensure(visible <= KARAOKE_MAX_VISIBLE, || format!("stream {stream}: {visible} words visible"))?;
            let h = highlighted(f, &cfg.annotation);
            ensure(h.len() <= 1, || format!("stream {stream}: {} words highlighted at once", h.len()))?;
            if let Some(w) = h.into_iter().next() {
                if order.last() != Some(&w) {
                    order.push(w);
                }
            }
        }
        let expected: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
        ensure(order == expected, || format!("stream {stream} ({n} words): highlight order diverged"))?;
        ensure(frames.last().is_some_and(|f| f.end_of_stream), || format!("stream {stream}: no end frame"))?;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < KARAOKE_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{KARAOKE_STREAMS} streams, {total_words} words, {elapsed:.2?}"))
}

fn rsvp_schedule_check() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7273);
    let cfg = EngineConfig { method: PresentationMethod::Rsvp, wpm: 60.0, ..EngineConfig::default() };
    for stream in 0..RSVP_STREAMS {
        let n = rng.gen_range(1..=300);
        let tokens: Vec<WordToken> = (0..n)
            .map(|i| {
                let len = rng.gen_range(1..=8);
                let text: String = (0..len).map(|_| rng.gen_range(b'a'..=b'z') as char).collect();
                WordToken::new(text, 1.0, SourceId::Speaker, i as u64, 0)
            })
            .collect();
        let schedule = rsvp_schedule(&tokens, &cfg).map_err(|e| e.to_string())?;
        ensure(schedule.len() == n, || format!("stream {stream}: {} scheduled for {n} words", schedule.len()))?;
        ensure(schedule.iter().all(|f| f.duration_ms == 1000), || format!("stream {stream}: duration != 1000 ms"))?;

        let mut engine = Engine::new(cfg.clone()).map_err(|e| e.to_string())?;
        let mut frames = engine.push_tokens(tokens.clone(), 0);
        frames.extend(engine.close_input(0));
        let words: Vec<&RenderFrame> = frames.iter().filter(|f| !f.end_of_stream).collect();
        ensure(words.len() == n, || format!("stream {stream}: {} word frames for {n} words", words.len()))?;
        for (i, f) in words.iter().enumerate() {
            ensure(f.t_ms == i as u64 * 1000, || format!("stream {stream}: frame {i} at {} ms", f.t_ms))?;
            let run = f.main().runs().next().ok_or("empty RSVP frame")?;
            ensure(run.text == tokens[i].text && run.orp == Some(orp_index(tokens[i].grapheme_len)), || {
                format!("stream {stream}: frame {i} shows {:?} orp {:?}", run.text, run.orp)
            })?;
        }
    }
    let table = |len: usize| match len {
        1 => 0,
        2..=5 => 1,
        6..=9 => 2,
        10..=13 => 3,
        _ => 4,
    };
    for len in 1..=20 {
        ensure(orp_index(len) == table(len), || format!("orp_index({len}) = {}", orp_index(len)))?;
    }
    Ok(format!("{RSVP_STREAMS} streams at 60 wpm, orp lengths 1-20"))
}

fn flagging() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x666c);
    let edges = [
        FLAG_THRESHOLD,
        f64::from_bits(FLAG_THRESHOLD.to_bits() - 1),
        f64::from_bits(FLAG_THRESHOLD.to_bits() + 1),
        0.0,
        1.0,
    ];
    let confs: Vec<f64> = (0..FLAG_WORDS)
        .map(|i| match i % 4 {
            0 => edges[rng.gen_range(0..edges.len())],
            1 => rng.gen_range(0.99..1.0),
            _ => rng.gen_range(0.0..=1.0),
        })
        .collect();
    let ann = AnnotationConfig::default();
    ensure(ann.confidence_threshold == FLAG_THRESHOLD, || format!("default threshold {}", ann.confidence_threshold))?;

    let cfg = EngineConfig { method: PresentationMethod::MultiLine, ..EngineConfig::default() };
    let mut engine = Engine::new(cfg).map_err(|e| e.to_string())?;
    engine.push_tokens(confs.iter().enumerate().map(|(i, &c)| word(i, c, 0)).collect(), 0);
    let flagged: Vec<bool> = engine.state().tokens().iter().map(|t| t.uncertain).collect();
    ensure(flagged.len() == FLAG_WORDS, || format!("{} tokens buffered", flagged.len()))?;
    for (i, (&f, &c)) in flagged.iter().zip(&confs).enumerate() {
        ensure(f == (c < FLAG_THRESHOLD), || format!("word {i} conf {c:e} flagged={f}"))?;
    }
    let count = flagged.iter().filter(|f| **f).count();

    for _ in 0..200 {
        let (a, b) = (rng.gen_range(0.0..=1.0), rng.gen_range(0.0..=1.0));
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        for (i, &c) in confs.iter().enumerate() {
            let at = |th: f64| {
                flag_uncertainty(word(i, c, 0), &AnnotationConfig { confidence_threshold: th, ..ann.clone() }).uncertain
            };
            ensure(!at(lo) || at(hi), || format!("word {i} flagged at {lo} but not {hi}"))?;
        }
    }
    Ok(format!("{count}/{FLAG_WORDS} flagged, 200 threshold pairs monotone"))
}

fn placement() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x706c);
    let cfg = EngineConfig::default();
    for i in 0..PLACEMENT_ANCHORS {
        let anchor = FaceAnchor {
            cx: rng.gen_range(0.0..=1.0),
            cy: rng.gen_range(0.0..=1.0),
            w: rng.gen_range(0.01..=0.6),
            h: rng.gen_range(0.01..=0.8),
        };
        let face = CaptionBox::of_face(&anchor);
        for mode in PlacementMode::ALL {
            let raw = unclamped_box(&anchor, mode, cfg.base_box, cfg.margin).map_err(|e| e.to_string())?;
            let clamped = clamp_to_viewport(raw);
            ensure((MIN_SCALE..=MAX_SCALE).contains(&clamped.scale), || {
                format!("anchor {i} {mode}: scale {}", clamped.scale)
            })?;
            ensure(clamped.within_viewport(), || format!("anchor {i} {mode}: {clamped:?} outside viewport"))?;
            ensure(clamped.w == raw.w && clamped.h == raw.h, || {
                format!("anchor {i} {mode}: clamping resized the box")
            })?;
            if mode == PlacementMode::Traditional {
                let (x, y) = clamped.center();
                ensure(
                    (x - TRADITIONAL_CENTER.0).abs() < CENTER_TOL && (y - TRADITIONAL_CENTER.1).abs() < CENTER_TOL,
                    || format!("anchor {i}: traditional center ({x}, {y})"),
                )?;
            } else {
                ensure(!raw.intersects(&face), || format!("anchor {i} {mode}: {raw:?} overlaps face"))?;
            }
        }
    }
    ensure(TRADITIONAL_CENTER == (0.5, 0.92), || "traditional center constant changed".into())?;
    Ok(format!("{PLACEMENT_ANCHORS} anchors x 4 modes"))
}

fn replay_fixture(method: PresentationMethod) -> Result<String, String> {
    let dir = manifest().join("tests/fixtures");
    let log = std::fs::read_to_string(dir.join("session_200.jsonl")).map_err(|e| e.to_string())?;
    let controls = std::fs::read_to_string(dir.join("controls_200.jsonl")).map_err(|e| e.to_string())?;
    let cfg = EngineConfig { method, utterance_mode: UtteranceMode::SeparatedColored, ..EngineConfig::default() };
    let script = ReplayScript::from_texts(&log, &controls, cfg).map_err(|e| e.to_string())?;
    Ok(run_replay(&script).map_err(|e| e.to_string())?.frame_log())
}

fn replay_binary(out: &Path) -> Result<Vec<u8>, String> {
    let dir = manifest().join("tests/fixtures");
    let status = Command::new(env!("CARGO_BIN_EXE_capstream"))
        .arg("replay")
        .arg("--log")
        .arg(dir.join("session_200.jsonl"))
        .arg("--controls")
        .arg(dir.join("controls_200.jsonl"))
        .arg("--out")
        .arg(out)
        .arg("--metrics")
        .arg(out.with_extension("metrics"))
        .status()
        .map_err(|e| e.to_string())?;
    ensure(status.success(), || format!("replay exited with {status}"))?;
    std::fs::read(out).map_err(|e| e.to_string())
}

fn determinism() -> Check {
    let log =
        std::fs::read_to_string(manifest().join("tests/fixtures/session_200.jsonl")).map_err(|e| e.to_string())?;
    let events = capstream_core::ingest::parse_log(&log).map_err(|e| e.to_string())?;
    let words: usize = events.iter().filter(|e| e.is_final).map(|e| e.text.split_whitespace().count()).sum();
    ensure(words == 200, || format!("fixture has {words} words"))?;

    let mut frames = 0;
    for method in [
        PresentationMethod::Karaoke,
        PresentationMethod::Rsvp,
        PresentationMethod::SingleLine,
        PresentationMethod::MultiLine,
    ] {
        let a = replay_fixture(method)?;
        let b = replay_fixture(method)?;
        ensure(!a.is_empty() && a == b, || format!("{method:?} replays differ"))?;
        frames += a.lines().count();
    }
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = replay_binary(&tmp.path().join("a.jsonl"))?;
    let b = replay_binary(&tmp.path().join("b.jsonl"))?;
    ensure(!a.is_empty() && a == b, || "binary replays differ".into())?;

    let core = manifest().join("../core/tests");
    let fixture_log = std::fs::read_to_string(core.join("fixtures/golden_log.jsonl")).map_err(|e| e.to_string())?;
    let fixture_controls =
        std::fs::read_to_string(core.join("fixtures/golden_controls.jsonl")).map_err(|e| e.to_string())?;
    let mut goldens = 0;
    let (mut methods, mut markups, mut highlights) = (BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
    let mut entries: Vec<PathBuf> = std::fs::read_dir(core.join("golden"))
        .map_err(|e| e.to_string())?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    entries.sort();
    for path in entries {
        let name = path.file_stem().and_then(|s| s.to_str()).ok_or("bad golden name")?;
        let parts: Vec<&str> = name.split("__").collect();
        let [method, markup, highlight, mode] = parts[..] else { return Err(format!("bad golden name {name}")) };
        let mut cfg = EngineConfig {
            method: method.parse().map_err(|e| format!("{name}: {e}"))?,
            utterance_mode: mode.parse().map_err(|e| format!("{name}: {e}"))?,
            ..EngineConfig::default()
        };
        cfg.annotation.markup_style = markup.parse::<MarkupStyle>().map_err(|e| format!("{name}: {e}"))?;
        cfg.annotation.highlight_style = highlight.parse::<HighlightStyle>().map_err(|e| format!("{name}: {e}"))?;
        let script =
            ReplayScript::from_texts(&fixture_log, &fixture_controls, cfg.clone()).map_err(|e| e.to_string())?;
        let rendered = render_frames(&run_replay(&script).map_err(|e| e.to_string())?.frames);
        let expected = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        ensure(rendered == expected, || format!("golden {name} drifted"))?;
        methods.insert(method.to_string());
        markups.insert(markup.to_string());
        highlights.insert(highlight.to_string());
        goldens += 1;
    }
    ensure(goldens == 12, || format!("{goldens} goldens"))?;
    ensure(methods.len() == 4 && markups.len() == 5 && highlights.len() == 6, || {
        format!("goldens cover {} methods, {} markups, {} highlights", methods.len(), markups.len(), highlights.len())
    })?;
    Ok(format!("4 methods x 2 replays ({frames} frames), binary x 2, {goldens} goldens byte-stable"))
}

fn relay_event(i: u64) -> TranscriptEvent {
    let source = if i % 4 == 3 { SourceId::Wearer } else { SourceId::Speaker };
    TranscriptEvent {
        session_id: "acceptance".into(),
        source,
        utterance_id: format!("u{i}"),
        seq: i,
        t_ms: i * 10,
        text: format!("e{i}a e{i}b e{i}c"),
        conf: 1.0,
        is_final: true,
        words: None,
    }
}

fn relay_config() -> EngineConfig {
    EngineConfig {
        method: PresentationMethod::MultiLine,
        utterance_mode: UtteranceMode::SeparatedColored,
        ..EngineConfig::default()
    }
}

fn relay_reference(events: &[TranscriptEvent]) -> Result<Vec<RenderFrame>, String> {
    let mut engine = Engine::new(relay_config()).map_err(|e| e.to_string())?.with_anchor(FaceAnchor::default());
    engine.render(0);
    let mut frames = Vec::new();
    for e in events {
        frames.extend(engine.push_event(e));
    }
    frames.extend(engine.close_input(events.last().map_or(0, |e| e.t_ms)));
    Ok(frames)
}

fn words_in_order(frames: &[RenderFrame]) -> HashMap<SourceId, Vec<u64>> {
    let mut seen: HashMap<SourceId, Vec<u64>> = HashMap::new();
    for f in frames {
        for region in &f.regions {
            for run in region.runs() {
                let Some(seq) = run.text.strip_prefix('e').and_then(|s| s[..s.len() - 1].parse::<u64>().ok()) else {
                    continue;
                };
                let source = relay_event(seq).source;
                let list = seen.entry(source).or_default();
                if list.last().is_none_or(|&last| last < seq) {
                    list.push(seq);
                }
            }
        }
    }
    seen
}

type Received = Vec<(Instant, RenderFrame)>;

async fn read_display(mut client: RelayClient, stop_after: Option<usize>) -> Result<Received, String> {
    let mut got = Vec::new();
    loop {
        if stop_after == Some(got.len()) {
            drop(client);
            return Ok(got);
        }
        match client.recv_timeout(Duration::from_secs(5)).await.map_err(|e| e.to_string())? {
            Some(Message::Frame(f)) => {
                let end = f.end_of_stream;
                got.push((Instant::now(), f));
                if end {
                    return Ok(got);
                }
            }
            other => return Err(format!("unexpected {other:?}")),
        }
    }
}

async fn relay_run() -> Check {
    let started = Instant::now();
    let events: Vec<TranscriptEvent> = (1..=RELAY_EVENTS).map(relay_event).collect();
    let reference = relay_reference(&events)?;
    let cfg =
        RelayConfig { tcp: Some("127.0.0.1:0".parse().unwrap()), ws: None, token: None, ..RelayConfig::default() };
    let relay = start(cfg).await.map_err(|e| e.to_string())?;
    let addr = relay.tcp_addr().ok_or("no tcp listener")?;

    let mut readers = Vec::new();
    for d in 0..3 {
        let mut client = RelayClient::display(addr, "acceptance", Delivery::Frames, Some(relay_config()), None)
            .await
            .map_err(|e| e.to_string())?;
        match client.recv_timeout(Duration::from_secs(5)).await.map_err(|e| e.to_string())? {
            Some(Message::Frame(f)) if f.frame_id == 0 => {}
            other => return Err(format!("display {d}: expected confirmation, got {other:?}")),
        }
        let stop_after = (d == 2).then_some(reference.len() / 2);
        readers.push(tokio::spawn(read_display(client, stop_after)));
    }

    let sent: Arc<std::sync::Mutex<HashMap<u64, Instant>>> = Arc::default();
    let mut publisher = RelayClient::publisher(addr, "acceptance", None, None).await.map_err(|e| e.to_string())?;
    for e in &events {
        sent.lock().unwrap().insert(e.t_ms, Instant::now());
        publisher.publish(e).await.map_err(|e| e.to_string())?;
        tokio::time::sleep(Duration::from_millis(2)).await;
    }
    publisher.bye().await.map_err(|e| e.to_string())?;

    let mut received = Vec::new();
    for r in readers {
        received.push(r.await.map_err(|e| e.to_string())??);
    }
    relay.shutdown().await;

    let sent = sent.lock().unwrap();
    let mut latencies = Vec::new();
    for (d, got) in received.iter().enumerate() {
        let frames: Vec<RenderFrame> = got.iter().map(|(_, f)| f.clone()).collect();
        if d == 2 {
            ensure(frames[..] == reference[..frames.len()], || "departing display saw a divergent prefix".into())?;
            continue;
        }
        ensure(frames == reference, || {
            format!("display {d}: {} frames differ from the {}-frame reference", frames.len(), reference.len())
        })?;
        let order = words_in_order(&frames);
        for (source, seqs) in &order {
            let expected: Vec<u64> = events.iter().filter(|e| e.source == *source).map(|e| e.seq).collect();
            ensure(*seqs == expected, || format!("display {d}: {source} words out of order or missing"))?;
        }
        for (at, f) in got.iter().filter(|(_, f)| !f.end_of_stream) {
            let t0 = sent.get(&f.t_ms).ok_or_else(|| format!("frame at {} ms matches no event", f.t_ms))?;
            latencies.push(at.saturating_duration_since(*t0));
        }
    }
    ensure(!latencies.is_empty(), || "no latency samples".into())?;
    latencies.sort();
    let p95 = latencies[(latencies.len() * 95).div_ceil(100) - 1];
    let elapsed = started.elapsed();
    ensure(p95 < RELAY_P95_LIMIT, || format!("p95 latency {p95:?}"))?;
    ensure(elapsed < RELAY_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{RELAY_EVENTS} events, {} frames x 2 displays match reference, p95 {p95:.2?} over {} samples, {elapsed:.2?}",
        reference.len(),
        latencies.len()
    ))
}

fn relay() -> Check {
    tokio::runtime::Builder::new_multi_thread().enable_all().build().map_err(|e| e.to_string())?.block_on(relay_run())
}

fn metrics_exactness() -> Check {
    let max_case = [5.0, 1.0, 5.0, 1.0, 5.0, 1.0, 5.0, 1.0, 5.0, 1.0];
    let sus_max = sus_score(&max_case).map_err(|e| e.to_string())?;
    let sus_mid = sus_score(&[3.0; 10]).map_err(|e| e.to_string())?;
    ensure(sus_max == 100.0 && sus_mid == 50.0, || format!("sus {sus_max}, {sus_mid}"))?;
    let eff = reading_efficiency(45.337, 6.854).map_err(|e| e.to_string())?;
    ensure((eff - 310.74).abs() <= EFFICIENCY_TOL, || format!("efficiency {eff}"))?;
    let rtlx = rtlx_score(&[10.0, 20.0, 30.0, 40.0, 50.0, 60.0]).map_err(|e| e.to_string())?;
    ensure(rtlx == 35.0, || format!("rtlx {rtlx}"))?;
    let quis = quis_score(&[7.0, 8.0, 7.0, 8.0, 7.0, 8.0]).map_err(|e| e.to_string())?;
    ensure(quis == 45.0, || format!("quis {quis}"))?;
    Ok(format!("sus 100/50, efficiency {eff:.4}, rtlx {rtlx}, quis {quis}"))
}

/// Two-sided exact p by enumerating all 2^n sign assignments over doubled ranks.
fn wilcoxon_brute_force(diffs: &[f64]) -> f64 {
    let nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    let doubled: Vec<u64> = average_ranks(&nz.iter().map(|d| d.abs()).collect::<Vec<_>>())
        .iter()
        .map(|r| (r * 2.0).round() as u64)
        .collect();
    let total: u64 = doubled.iter().sum();
    let plus: u64 = nz.iter().zip(&doubled).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let w = plus.min(total - plus);
    let n = nz.len();
    let below = (0u64..1 << n)
        .filter(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| doubled[i]).sum::<u64>() <= w)
        .count();
    (2.0 * below as f64 / (1u64 << n) as f64).min(1.0)
}

fn statistics() -> Check {
    let perfect = RankMatrix::new(vec![vec![1.0, 2.0, 3.0]; 3]).map_err(|e| e.to_string())?;
    let fr = friedman_test(&perfect);
    ensure((fr.statistic - 6.0).abs() < EXACT_TOL, || format!("friedman {}", fr.statistic))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x7374);
    let mut wilcoxon_cases = 0;
    for n in 1..=10 {
        for _ in 0..40 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..20) as f64).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0..20) as f64).collect();
            let diffs: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            if diffs.iter().all(|d| *d == 0.0) {
                continue;
            }
            let w = wilcoxon_signed_rank(&x, &y).map_err(|e| e.to_string())?;
            let bf = wilcoxon_brute_force(&diffs);
            ensure(w.exact, || format!("n={n}: normal approximation used"))?;
            ensure((w.result.p_value - bf).abs() < EXACT_TOL, || {
                format!("n={n}: p {} vs brute force {bf}", w.result.p_value)
            })?;
            wilcoxon_cases += 1;
        }
    }

    for case in 0..200 {
        let n = rng.gen_range(3..=20);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(0.0..10.0), rng.gen_range(0.0..12.0)]).collect();
        let a: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let b: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        let (t, _, tp) = paired_t(&a, &b).map_err(|e| e.to_string())?;
        let anova = rm_anova(&RankMatrix::new(rows).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let f = anova.result.statistic;
        ensure((f - t * t).abs() <= EXACT_TOL * (t * t).max(1.0), || format!("case {case}: F {f} vs t^2 {}", t * t))?;
        ensure((anova.result.p_value - tp).abs() <= EXACT_TOL, || {
            format!("case {case}: p {} vs {tp}", anova.result.p_value)
        })?;
    }

    let tabulated: [(&str, f64, f64); 10] = [
        ("chi2(1) 3.841", chi_square_sf(3.841, 1.0), 0.05),
        ("chi2(2) 5.991", chi_square_sf(5.991, 2.0), 0.05),
        ("chi2(10) 18.307", chi_square_sf(18.307, 10.0), 0.05),
        ("chi2(5) 15.086", chi_square_sf(15.086, 5.0), 0.01),
        ("t(1) 12.706", t_two_sided(12.706, 1.0), 0.05),
        ("t(10) 2.228", t_two_sided(2.228, 10.0), 0.05),
        ("t(20) 2.845", t_two_sided(2.845, 20.0), 0.01),
        ("F(2,10) 4.103", f_sf(4.103, 2.0, 10.0), 0.05),
        ("F(3,20) 4.938", f_sf(4.938, 3.0, 20.0), 0.01),
        ("z 1.960", normal_two_sided(1.96), 0.05),
    ];
    for (name, got, want) in tabulated {
        ensure((got - want).abs() < TABLE_TOL, || format!("{name}: {got} vs {want}"))?;
    }
    Ok(format!("friedman 6.0, {wilcoxon_cases} wilcoxon cases n<=10, 200 F=t^2 cases, 10 tabulated tails"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("karaoke_conservation", karaoke_conservation),
        ("rsvp_schedule", rsvp_schedule_check),
        ("uncertainty_flagging", flagging),
        ("placement_geometry", placement),
        ("determinism", determinism),
        ("relay_loopback", relay),
        ("metrics_exactness", metrics_exactness),
        ("statistics_oracles", statistics),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
