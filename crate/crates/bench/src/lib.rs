//! Shared inputs for the benchmarks.

use capstream_core::{SourceId, TranscriptEvent};

/// A deterministic lecture-like log of `n` final events with `words` words each.
pub fn synthetic_log(n: u64, words: usize) -> Vec<TranscriptEvent> {
    (1..=n)
        .map(|i| TranscriptEvent {
            session_id: "bench".into(),
            source: if i % 5 == 0 { SourceId::Wearer } else { SourceId::Speaker },
            utterance_id: format!("u{i}"),
            seq: i,
            t_ms: i * 700,
            text: (0..words).map(|j| format!("word{}", (i as usize * 7 + j) % 97)).collect::<Vec<_>>().join(" "),
            conf: if i % 3 == 0 { 0.97 } else { 0.999 },
            is_final: true,
            words: None,
        })
        .collect()
}

/// Deterministic pseudo-random scores in `[0, 10)`.
pub fn scores(n: usize, k: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut state = seed;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64 * 10.0
    };
    (0..n).map(|_| (0..k).map(|_| next()).collect()).collect()
}
