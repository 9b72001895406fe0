//! Within-subject significance tests: Friedman, Wilcoxon signed-rank,
//! one-way repeated-measures ANOVA and Bonferroni-corrected paired t-tests.
//!
//! All p-values are two-sided. Ties get average ranks.

use serde::Serialize;

use super::dist::{chi_square_sf, f_sf, normal_two_sided, t_two_sided};
use super::MetricsError;

/// Largest effective sample for which the Wilcoxon p-value is exact.
pub const WILCOXON_EXACT_MAX_N: usize = 12;

/// Subjects × conditions table of ratings or measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct RankMatrix {
    rows: Vec<Vec<f64>>,
    k: usize,
}

impl RankMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, MetricsError> {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if n < 2 || k < 2 {
            return Err(MetricsError::Degenerate(format!("need >= 2 subjects and >= 2 conditions, got {n}x{k}")));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != k) {
            return Err(MetricsError::Shape(format!("row {i} has {} cells, expected {k}", rows[i].len())));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(MetricsError::Shape("missing or non-finite cell".into()));
        }
        Ok(RankMatrix { rows, k })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Per-condition sums of within-row ranks.
    pub fn rank_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.k];
        for row in &self.rows {
            for (s, r) in sums.iter_mut().zip(average_ranks(row)) {
                *s += r;
            }
        }
        sums
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestResult {
    pub statistic: f64,
    pub df: Vec<u64>,
    pub p_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effect_size: Option<f64>,
}

/// 1-based ranks, ties sharing the average of the positions they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

pub fn friedman_test(m: &RankMatrix) -> TestResult {
    let (n, k) = (m.n() as f64, m.k() as f64);
    let sum_sq: f64 = m.rank_sums().iter().map(|r| r * r).sum();
    let chi2 = (12.0 / (n * k * (k + 1.0)) * sum_sq - 3.0 * n * (k + 1.0)).max(0.0);
    TestResult { statistic: chi2, df: vec![m.k() as u64 - 1], p_value: chi_square_sf(chi2, k - 1.0), effect_size: None }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WilcoxonResult {
    #[serde(flatten)]
    pub result: TestResult,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Pairs left after dropping zero differences.
    pub n_effective: usize,
    pub exact: bool,
}

pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64]) -> Result<WilcoxonResult, MetricsError> {
    if x.len() != y.len() || x.is_empty() {
        return Err(MetricsError::Shape(format!("paired samples of lengths {} and {}", x.len(), y.len())));
    }
    let diffs: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    if diffs.is_empty() {
        return Err(MetricsError::AllZeroDifferences);
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&abs);
    let w_plus: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let n = diffs.len();
    let total = (n * (n + 1)) as f64 / 2.0;
    let w_minus = total - w_plus;
    let w = w_plus.min(w_minus);
    let (p_value, exact) = if n <= WILCOXON_EXACT_MAX_N {
        (exact_signed_rank_p(&ranks, w), true)
    } else {
        (normal_signed_rank_p(&abs, &ranks, w_plus), false)
    };
    Ok(WilcoxonResult {
        result: TestResult { statistic: w, df: Vec::new(), p_value, effect_size: None },
        w_plus,
        w_minus,
        n_effective: n,
        exact,
    })
}

/// Two-sided exact p-value: 2·P(T⁺ ≤ w) under the null that every sign is
/// equally likely, from the subset-sum distribution of the (doubled) ranks.
fn exact_signed_rank_p(ranks: &[f64], w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut counts = vec![0u64; max + 1];
    counts[0] = 1;
    for &r in &doubled {
        for s in (r..=max).rev() {
            counts[s] += counts[s - r];
        }
    }
    let w2 = (w * 2.0).round() as usize;
    let at_or_below: u64 = counts[..=w2.min(max)].iter().sum();
    let total = 2f64.powi(ranks.len() as i32);
    (2.0 * at_or_below as f64 / total).min(1.0)
}

/// Normal approximation with tie and continuity corrections.
fn normal_signed_rank_p(abs: &[f64], ranks: &[f64], w_plus: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut sorted = abs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|v| **v == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    normal_two_sided(z)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedT {
    pub a: usize,
    pub b: usize,
    pub mean_diff: f64,
    pub t: f64,
    pub df: u64,
    pub p_value: f64,
    /// p-value times the number of pairwise comparisons, capped at 1.
    pub p_bonferroni: f64,
}

/// Paired t-test of `x - y`.
pub fn paired_t(x: &[f64], y: &[f64]) -> Result<(f64, u64, f64), MetricsError> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(MetricsError::Shape(format!("paired samples of lengths {} and {}", x.len(), y.len())));
    }
    let n = x.len() as f64;
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let t = if var == 0.0 {
        if mean == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(mean)
        }
    } else {
        mean / (var / n).sqrt()
    };
    let df = x.len() as u64 - 1;
    Ok((t, df, t_two_sided(t, df as f64)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RmAnova {
    #[serde(flatten)]
    pub result: TestResult,
    pub ss_conditions: f64,
    pub ss_subjects: f64,
    pub ss_error: f64,
    pub pairwise: Vec<PairedT>,
}

/// One-way repeated-measures ANOVA with partial eta squared as the effect size.
pub fn rm_anova(m: &RankMatrix) -> Result<RmAnova, MetricsError> {
    let (n, k) = (m.n(), m.k());
    let (nf, kf) = (n as f64, k as f64);
    let grand = m.rows().iter().flatten().sum::<f64>() / (nf * kf);
    let ss_total: f64 = m.rows().iter().flatten().map(|v| (v - grand).powi(2)).sum();
    let ss_subjects: f64 = m.rows().iter().map(|r| (r.iter().sum::<f64>() / kf - grand).powi(2)).sum::<f64>() * kf;
    let ss_conditions: f64 = (0..k).map(|j| (m.column(j).iter().sum::<f64>() / nf - grand).powi(2)).sum::<f64>() * nf;
    let ss_error = (ss_total - ss_subjects - ss_conditions).max(0.0);
    let (df1, df2) = ((k - 1) as u64, ((n - 1) * (k - 1)) as u64);

    let scale_eps = 1e-12 * ss_total.max(f64::MIN_POSITIVE);
    let (f, p) = if ss_error <= scale_eps {
        if ss_conditions <= scale_eps {
            (0.0, 1.0)
        } else {
            return Err(MetricsError::Degenerate("zero error variance: F is undefined".into()));
        }
    } else {
        let f = (ss_conditions / df1 as f64) / (ss_error / df2 as f64);
        (f, f_sf(f, df1 as f64, df2 as f64))
    };
    let eta = if ss_conditions + ss_error > 0.0 { ss_conditions / (ss_conditions + ss_error) } else { 0.0 };

    let comparisons = (k * (k - 1) / 2) as f64;
    let mut pairwise = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            let (xa, xb) = (m.column(a), m.column(b));
            let (t, df, p) = paired_t(&xa, &xb)?;
            let mean_diff = xa.iter().zip(&xb).map(|(u, v)| u - v).sum::<f64>() / nf;
            pairwise.push(PairedT { a, b, mean_diff, t, df, p_value: p, p_bonferroni: (p * comparisons).min(1.0) });
        }
    }
    Ok(RmAnova {
        result: TestResult { statistic: f, df: vec![df1, df2], p_value: p, effect_size: Some(eta) },
        ss_conditions,
        ss_subjects,
        ss_error,
        pairwise,
    })
}
