//! Evaluation indexes for asset populations: Gini index, total exchange,
//! Kendall rank correlation between two snapshots, and the histogram and
//! gamma shape/scale summaries of a distribution.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Gini index of a population, in `[0, (N-1)/N]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct GiniValue(pub f64);

/// Total exchange: mean pool per exchange, per agent slot.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct FlowValue(pub f64);

/// Kendall rank correlation between two snapshots, in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct TauValue(pub f64);

macro_rules! impl_display {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Display::fmt(&self.0, f)
            }
        }
    )*};
}
impl_display!(GiniValue, FlowValue, TauValue);

/// Method-of-moments gamma parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFit {
    pub shape_k: f64,
    pub scale_theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    /// `counts.len() + 1` strictly ascending edges.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Values below the first edge (only possible with an explicit range).
    pub underflow: u64,
    /// Values above the last edge (only possible with an explicit range).
    pub overflow: u64,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

fn check_values(values: &[f64], what: &str) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(invalid(format!("{what} contains non-finite value {v}"))),
        None => Ok(()),
    }
}

/// Gini index from the ascending sort `r` of the assets:
/// `2 * sum(i * r_i) / (N * sum(r_i)) - (N + 1) / N`, with 1-based `i`.
pub fn gini(assets: &[f64]) -> Result<GiniValue> {
    let n = assets.len();
    if n < 2 {
        return Err(invalid(format!("gini needs at least 2 agents, got {n}")));
    }
    check_values(assets, "assets")?;
    if assets.iter().any(|&m| m < 0.0) {
        return Err(invalid("gini requires non-negative assets"));
    }
    let mut sorted = assets.to_vec();
    sorted.sort_by(f64::total_cmp);
    let total: f64 = sorted.iter().sum();
    if total <= 0.0 {
        return Err(Error::UndefinedGini);
    }
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(idx, &r)| (idx + 1) as f64 * r)
        .sum();
    let n = n as f64;
    let g = 2.0 * weighted / (n * total) - (n + 1.0) / n;
    // an all-equal vector can land a rounding error below zero
    Ok(GiniValue(g.max(0.0)))
}

/// `cumulative_pool / (2 * t_max)`.
pub fn total_exchange(cumulative_pool: f64, t_max: u64) -> Result<FlowValue> {
    if t_max == 0 {
        return Err(invalid("t_max must be at least 1"));
    }
    if !(cumulative_pool.is_finite() && cumulative_pool >= 0.0) {
        return Err(invalid(format!(
            "cumulative pool must be finite and non-negative, got {cumulative_pool}"
        )));
    }
    Ok(FlowValue(cumulative_pool / (2.0 * t_max as f64)))
}

/// Pair counts behind a Kendall tau.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub total_pairs: u64,
    /// Pairs ordered the same way in both snapshots.
    pub concordant: u64,
    /// Pairs ordered oppositely.
    pub discordant: u64,
}

impl PairCounts {
    pub fn tau(&self) -> f64 {
        if self.total_pairs == 0 {
            return 0.0;
        }
        (self.concordant as f64 - self.discordant as f64) / self.total_pairs as f64
    }
}

/// Kendall rank correlation between two snapshots of the same agents.
///
/// `(K - L) / (N (N - 1) / 2)` where `K` counts concordant and `L` discordant
/// pairs. Pairs tied in either snapshot count toward neither. Runs in
/// `O(N log N)`.
pub fn kendall_tau(first: &[f64], second: &[f64]) -> Result<TauValue> {
    let counts = kendall_pair_counts(first, second)?;
    if counts.concordant + counts.discordant == 0 {
        log::warn!("kendall tau: every pair is tied in at least one snapshot, tau defined as 0");
    }
    Ok(TauValue(counts.tau()))
}

pub fn kendall_pair_counts(first: &[f64], second: &[f64]) -> Result<PairCounts> {
    if first.len() != second.len() {
        return Err(invalid(format!(
            "snapshot lengths differ: {} vs {}",
            first.len(),
            second.len()
        )));
    }
    let n = first.len();
    if n < 2 {
        return Err(invalid(format!("kendall tau needs at least 2 agents, got {n}")));
    }
    check_values(first, "first snapshot")?;
    check_values(second, "second snapshot")?;

    // Values are finite, so partial_cmp is total; it also treats -0.0 == 0.0.
    let cmp = |a: &f64, b: &f64| a.partial_cmp(b).unwrap_or(Ordering::Equal);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| cmp(&first[a], &first[b]).then_with(|| cmp(&second[a], &second[b])));

    let tied_first = tied_pairs(order.iter().map(|&k| first[k]));
    let tied_both = tied_pairs_joint(order.iter().map(|&k| (first[k], second[k])));

    let mut ys: Vec<f64> = order.iter().map(|&k| second[k]).collect();
    let mut scratch = vec![0.0; n];
    let discordant = merge_count(&mut ys, &mut scratch);
    // ys is now sorted
    let tied_second = tied_pairs(ys.iter().copied());

    let total_pairs = n as u64 * (n as u64 - 1) / 2;
    let tied_any = tied_first + tied_second - tied_both;
    let concordant = total_pairs - tied_any - discordant;
    Ok(PairCounts { total_pairs, concordant, discordant })
}

fn tied_pairs(sorted: impl Iterator<Item = f64>) -> u64 {
    let mut total = 0;
    let mut run = 0u64;
    let mut prev: Option<f64> = None;
    for v in sorted {
        if prev == Some(v) {
            run += 1;
        } else {
            total += run * (run + 1) / 2;
            run = 0;
        }
        prev = Some(v);
    }
    total + run * (run + 1) / 2
}

fn tied_pairs_joint(sorted: impl Iterator<Item = (f64, f64)>) -> u64 {
    let mut total = 0;
    let mut run = 0u64;
    let mut prev: Option<(f64, f64)> = None;
    for v in sorted {
        if prev == Some(v) {
            run += 1;
        } else {
            total += run * (run + 1) / 2;
            run = 0;
        }
        prev = Some(v);
    }
    total + run * (run + 1) / 2
}

/// Sorts `v` ascending and returns the number of strict inversions.
fn merge_count(v: &mut [f64], scratch: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = {
        let (lo, hi) = v.split_at_mut(mid);
        let (s_lo, s_hi) = scratch.split_at_mut(mid);
        merge_count(lo, s_lo) + merge_count(hi, s_hi)
    };
    let (mut a, mut b, mut k) = (0, mid, 0);
    while a < mid && b < n {
        if v[b] < v[a] {
            scratch[k] = v[b];
            swaps += (mid - a) as u64;
            b += 1;
        } else {
            scratch[k] = v[a];
            a += 1;
        }
        k += 1;
    }
    scratch[k..k + mid - a].copy_from_slice(&v[a..mid]);
    k += mid - a;
    scratch[k..k + n - b].copy_from_slice(&v[b..n]);
    v.copy_from_slice(&scratch[..n]);
    swaps
}

/// Linear-bin histogram. With no range, bins span `[0, max(assets)]`.
/// The top edge is inclusive.
pub fn histogram(assets: &[f64], bins: usize, range: Option<(f64, f64)>) -> Result<Histogram> {
    if bins == 0 {
        return Err(invalid("histogram needs at least one bin"));
    }
    check_values(assets, "assets")?;
    let (lo, hi) = match range {
        Some((lo, hi)) => {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(invalid(format!("histogram range [{lo}, {hi}] is not ascending")));
            }
            (lo, hi)
        }
        None => {
            let max = assets.iter().copied().fold(0.0, f64::max);
            (0.0, if max > 0.0 { max } else { 1.0 })
        }
    };
    let width = (hi - lo) / bins as f64;
    let bin_edges: Vec<f64> = (0..=bins)
        .map(|b| if b == bins { hi } else { lo + b as f64 * width })
        .collect();

    let mut counts = vec![0u64; bins];
    let (mut underflow, mut overflow) = (0, 0);
    for &m in assets {
        if m < lo {
            underflow += 1;
        } else if m > hi {
            overflow += 1;
        } else {
            let b = (((m - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
    }
    Ok(Histogram { bin_edges, counts, underflow, overflow })
}

/// Method-of-moments gamma fit: `k = mean^2 / var`, `theta = var / mean`,
/// with the population (1/N) variance.
pub fn gamma_fit(assets: &[f64]) -> Result<GammaFit> {
    let n = assets.len();
    if n < 2 {
        return Err(invalid(format!("gamma fit needs at least 2 values, got {n}")));
    }
    check_values(assets, "assets")?;
    if assets.iter().any(|&m| m <= 0.0) {
        return Err(invalid("gamma fit requires strictly positive values"));
    }
    let mean = assets.iter().sum::<f64>() / n as f64;
    let var = assets.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / n as f64;
    if !(var > 0.0) {
        return Err(Error::DegenerateDistribution("sample variance is zero".into()));
    }
    Ok(GammaFit { shape_k: mean * mean / var, scale_theta: var / mean })
}
