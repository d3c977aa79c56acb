//! Concentration statistics over mention counts.
//!
//! All functions take non-negative values and return `None` ("not
//! applicable") for inputs where the statistic is undefined: empty input,
//! an all-zero vector, or any negative / non-finite value.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::evaluation::ceil_count;

pub const DEFAULT_TOP_FRACTIONS: [f64; 6] = [0.01, 0.02, 0.05, 0.10, 0.20, 0.50];

fn usable(values: &[f64]) -> bool {
    !values.is_empty()
        && values.iter().all(|v| v.is_finite() && *v >= 0.0)
        && values.iter().any(|&v| v > 0.0)
}

fn sorted_ascending(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Gini coefficient, `sum_ij |x_i - x_j| / (2 n^2 mean)`.
///
/// Computed in O(n log n) from the sorted values:
/// `G = 2 * sum_i i * x_(i) / (n * total) - (n + 1) / n` with 1-based ranks.
pub fn gini(values: &[f64]) -> Option<f64> {
    if !usable(values) {
        return None;
    }
    let sorted = sorted_ascending(values);
    let n = sorted.len() as f64;
    let (weighted, total) = sorted
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(w, t), (i, &x)| (w + (i as f64 + 1.0) * x, t + x));
    Some((2.0 * weighted / (n * total) - (n + 1.0) / n).max(0.0))
}

/// Lorenz curve: `(i/n, cumulative_share_i)` over ascending values, starting
/// at `(0, 0)` and ending at `(1, 1)`.
pub fn lorenz(values: &[f64]) -> Option<Vec<(f64, f64)>> {
    if !usable(values) {
        return None;
    }
    let sorted = sorted_ascending(values);
    let n = sorted.len() as f64;
    let total: f64 = sorted.iter().sum();
    let mut points = Vec::with_capacity(sorted.len() + 1);
    points.push((0.0, 0.0));
    let mut cum = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        cum += x;
        points.push(((i + 1) as f64 / n, cum / total));
    }
    if let Some(last) = points.last_mut() {
        *last = (1.0, 1.0);
    }
    Some(points)
}

/// Area under a polyline by the trapezoid rule.
pub fn area_under(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum()
}

/// Share of the total held by the `ceil(fraction * n)` largest values.
/// `None` for a zero total or a fraction outside `(0, 1]`.
pub fn top_share(values: &[f64], fraction: f64) -> Option<f64> {
    if !usable(values) || !(fraction > 0.0 && fraction <= 1.0) {
        return None;
    }
    let mut sorted = sorted_ascending(values);
    sorted.reverse();
    let take = ceil_count(fraction, sorted.len()).clamp(1, sorted.len());
    let total: f64 = sorted.iter().sum();
    let top: f64 = sorted[..take].iter().sum();
    Some(if take == sorted.len() { 1.0 } else { top / total })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// Number of positive values used.
    pub points: usize,
}

/// `(rank, value)` for positive values ranked descending, rank starting at 1.
pub fn rank_frequency(values: &[f64]) -> Vec<(usize, f64)> {
    let mut positive: Vec<f64> = values.iter().copied().filter(|&v| v > 0.0 && v.is_finite()).collect();
    positive.sort_by(|a, b| b.total_cmp(a));
    positive.into_iter().enumerate().map(|(i, v)| (i + 1, v)).collect()
}

/// OLS fit of `ln(value)` on `ln(rank)` over positive values.
///
/// Zero values are dropped. Needs at least three positive values. A
/// perfectly constant input fits with slope 0 and r² = 1.
pub fn powerlaw_fit(values: &[f64]) -> Option<PowerLawFit> {
    let ranked = rank_frequency(values);
    if ranked.len() < 3 {
        return None;
    }
    let xs: Vec<f64> = ranked.iter().map(|&(r, _)| (r as f64).ln()).collect();
    let ys: Vec<f64> = ranked.iter().map(|&(_, v)| v.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r2 = if syy <= f64::EPSILON * n { 1.0 } else { 1.0 - ss_res / syy };
    Some(PowerLawFit {
        slope,
        intercept,
        r2,
        points: ranked.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Log-spaced histogram with four bins per decade, plus a `[0, 1)` bin for
/// zero counts. Bins are half-open.
pub fn log_histogram(values: &[f64]) -> Vec<HistogramBin> {
    let max = values.iter().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let edge = |j: u32| -> f64 {
        if j.is_multiple_of(4) {
            10u64.pow(j / 4) as f64
        } else {
            10f64.powf(j as f64 / 4.0)
        }
    };
    let mut edges = vec![0.0, 1.0];
    let mut j = 1;
    while *edges.last().expect("non-empty") <= max {
        edges.push(edge(j));
        j += 1;
    }
    let mut bins: Vec<HistogramBin> = edges
        .windows(2)
        .map(|w| HistogramBin {
            lower: w[0],
            upper: w[1],
            count: 0,
        })
        .collect();
    for &v in values.iter().filter(|v| v.is_finite() && **v >= 0.0) {
        let i = edges.partition_point(|&e| e <= v) - 1;
        let last = bins.len() - 1;
        bins[i.min(last)].count += 1;
    }
    bins
}

/// Everything the concentration panels need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub n: usize,
    pub total: f64,
    pub gini: Option<f64>,
    pub lorenz_points: Vec<(f64, f64)>,
    /// Keyed by the fraction formatted to two decimals, e.g. `"0.10"`.
    pub top_shares: BTreeMap<String, f64>,
    pub powerlaw_slope: Option<f64>,
    pub powerlaw_r2: Option<f64>,
    pub powerlaw_points: usize,
}

impl ConcentrationReport {
    pub fn compute(values: &[f64], fractions: &[f64]) -> Self {
        let fit = powerlaw_fit(values);
        Self {
            n: values.len(),
            total: values.iter().sum(),
            gini: gini(values),
            lorenz_points: lorenz(values).unwrap_or_default(),
            top_shares: fractions
                .iter()
                .filter_map(|&f| top_share(values, f).map(|s| (format!("{f:.2}"), s)))
                .collect(),
            powerlaw_slope: fit.map(|f| f.slope),
            powerlaw_r2: fit.map(|f| f.r2),
            powerlaw_points: fit.map_or(0, |f| f.points),
        }
    }

    pub fn is_applicable(&self) -> bool {
        self.gini.is_some()
    }

    pub fn top_share(&self, fraction: f64) -> Option<f64> {
        self.top_shares.get(&format!("{fraction:.2}")).copied()
    }
}

pub fn lorenz_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("population_fraction,mention_fraction\n");
    for (x, y) in points {
        out.push_str(&format!("{x},{y}\n"));
    }
    out
}

pub fn loglog_csv(values: &[f64]) -> String {
    let mut out = String::from("rank,count,log10_rank,log10_count\n");
    for (rank, v) in rank_frequency(values) {
        out.push_str(&format!("{rank},{v},{},{}\n", (rank as f64).log10(), v.log10()));
    }
    out
}

pub fn histogram_csv(bins: &[HistogramBin]) -> String {
    let mut out = String::from("bin_lower,bin_upper,startups\n");
    for b in bins {
        out.push_str(&format!("{},{},{}\n", b.lower, b.upper, b.count));
    }
    out
}
