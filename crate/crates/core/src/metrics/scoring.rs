//! Reading-session and questionnaire scoring.

use serde::{Deserialize, Serialize};

use super::MetricsError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SessionMetrics {
    pub words_read: u64,
    pub duration_ms: u64,
    pub wpm: f64,
    /// Comprehension grade on a 0 to 10 scale.
    pub comprehension: f64,
    pub efficiency: f64,
}

impl SessionMetrics {
    pub fn new(words_read: u64, duration_ms: u64, comprehension: f64) -> Result<Self, MetricsError> {
        let wpm = words_per_minute(words_read, duration_ms);
        Ok(SessionMetrics {
            words_read,
            duration_ms,
            wpm,
            comprehension,
            efficiency: reading_efficiency(wpm, comprehension)?,
        })
    }
}

/// Words per minute; zero for an empty duration.
pub fn words_per_minute(words: u64, duration_ms: u64) -> f64 {
    if duration_ms == 0 {
        0.0
    } else {
        words as f64 / (duration_ms as f64 / 60_000.0)
    }
}

/// Reading speed weighted by comprehension.
pub fn reading_efficiency(wpm: f64, comprehension: f64) -> Result<f64, MetricsError> {
    if wpm.is_nan() || wpm < 0.0 {
        return Err(MetricsError::Domain(format!("wpm {wpm} must be >= 0")));
    }
    if !(0.0..=10.0).contains(&comprehension) {
        return Err(MetricsError::Domain(format!("comprehension {comprehension} outside [0,10]")));
    }
    Ok(wpm * comprehension)
}

fn check_range(items: &[f64], lo: f64, hi: f64) -> Result<(), MetricsError> {
    match items.iter().position(|v| !(lo..=hi).contains(v)) {
        Some(i) => Err(MetricsError::Range { index: i, value: items[i], lo, hi }),
        None => Ok(()),
    }
}

/// System Usability Scale score on 0..=100 from ten 1..=5 responses.
///
/// Odd-numbered items are positively worded and contribute `v - 1`;
/// even-numbered items contribute `5 - v`.
pub fn sus_score(items: &[f64]) -> Result<f64, MetricsError> {
    if items.len() != 10 {
        return Err(MetricsError::Arity { expected: "10".into(), got: items.len() });
    }
    check_range(items, 1.0, 5.0)?;
    let sum: f64 = items.iter().enumerate().map(|(i, v)| if i % 2 == 0 { v - 1.0 } else { 5.0 - v }).sum();
    Ok(sum * 2.5)
}

/// Raw TLX: unweighted mean of the six 0..=100 workload subscales.
pub fn rtlx_score(subscales: &[f64]) -> Result<f64, MetricsError> {
    if subscales.len() != 6 {
        return Err(MetricsError::Arity { expected: "6".into(), got: subscales.len() });
    }
    check_range(subscales, 0.0, 100.0)?;
    Ok(subscales.iter().sum::<f64>() / 6.0)
}

/// Sum of 0..=9 items from the overall-reactions part of QUIS.
pub fn quis_score(items: &[f64]) -> Result<f64, MetricsError> {
    if items.is_empty() {
        return Err(MetricsError::Arity { expected: ">= 1".into(), got: 0 });
    }
    check_range(items, 0.0, 9.0)?;
    Ok(items.iter().sum())
}
