//! Reading metrics, questionnaire scoring and within-subject statistics.

pub mod dist;
mod scoring;
mod stats;

use thiserror::Error;

pub use scoring::{quis_score, reading_efficiency, rtlx_score, sus_score, words_per_minute, SessionMetrics};
pub use stats::{
    average_ranks, friedman_test, paired_t, rm_anova, wilcoxon_signed_rank, PairedT, RankMatrix, RmAnova, TestResult,
    WilcoxonResult, WILCOXON_EXACT_MAX_N,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("expected {expected} items, got {got}")]
    Arity { expected: String, got: usize },
    #[error("item {index} = {value} outside [{lo}, {hi}]")]
    Range { index: usize, value: f64, lo: f64, hi: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("bad shape: {0}")]
    Shape(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("all paired differences are zero")]
    AllZeroDifferences,
}
