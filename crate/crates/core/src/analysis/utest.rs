//! Two-sided Mann-Whitney-Wilcoxon rank-sum test.
//!
//! `U` is reported for the first group: `U_A = R_A − n1(n1+1)/2`, where
//! `R_A` is the sum of midranks of group A in the pooled sample. The exact
//! p-value enumerates the distribution of `U_A` over every assignment of
//! the observed pooled multiset to groups of sizes `n1`/`n2`, so ties are
//! handled without approximation. Above the permutation cap a normal
//! approximation with tie-corrected variance and continuity correction is
//! used.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UMethod {
    /// Exact when the permutation space is within the cap.
    #[default]
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AppliedMethod {
    Exact,
    NormalApproximation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UTestConfig {
    pub method: UMethod,
    /// Largest `C(n1 + n2, n1)` for which the exact distribution is used.
    pub exact_cap: u64,
}

impl Default for UTestConfig {
    fn default() -> Self {
        Self { method: UMethod::Auto, exact_cap: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UTestResult {
    /// `U` of the first group.
    pub u: f64,
    /// `U` of the second group; `u + u_b = n1·n2`.
    pub u_b: f64,
    pub n1: usize,
    pub n2: usize,
    pub p_value: f64,
    pub method: AppliedMethod,
    pub sidedness: String,
}

/// Midranks (1-based, ties averaged) of `values` in their pooled order.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let doubled = doubled_midranks(values);
    doubled.into_iter().map(|d| d as f64 / 2.0).collect()
}

/// Twice the midranks, which are always integers.
fn doubled_midranks(values: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0u64; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i+1 ..= j+1, doubled average
        let doubled = (i + 1 + j + 1) as u64;
        for &k in &order[i..=j] {
            ranks[k] = doubled;
        }
        i = j + 1;
    }
    ranks
}

/// `C(n, k)`, or `None` once it exceeds `cap`.
pub fn binomial_within(n: usize, k: usize, cap: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u128::from(cap) {
            return None;
        }
    }
    Some(acc as u64)
}

fn check_values(values: &[f64]) -> Result<(), AnalysisError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(AnalysisError::NonFinite);
    }
    Ok(())
}

pub fn mann_whitney_u(group_a: &[f64], group_b: &[f64], config: &UTestConfig) -> Result<UTestResult, AnalysisError> {
    if group_a.is_empty() || group_b.is_empty() {
        return Err(AnalysisError::EmptyGroup("mann-whitney input".into()));
    }
    check_values(group_a)?;
    check_values(group_b)?;
    let (n1, n2) = (group_a.len(), group_b.len());
    let pooled: Vec<f64> = group_a.iter().chain(group_b).copied().collect();
    let ranks = doubled_midranks(&pooled);
    let doubled_rank_sum_a: u64 = ranks[..n1].iter().sum();
    let offset = (n1 * (n1 + 1)) as u64;
    // 2·U_A
    let doubled_u = doubled_rank_sum_a - offset;
    let u = doubled_u as f64 / 2.0;
    let u_b = (n1 * n2) as f64 - u;

    let space = binomial_within(n1 + n2, n1, config.exact_cap);
    let use_exact = match config.method {
        UMethod::Exact => {
            if space.is_none() {
                return Err(AnalysisError::PermutationSpace { n1, n2, cap: config.exact_cap });
            }
            true
        }
        UMethod::Normal => false,
        UMethod::Auto => space.is_some(),
    };

    let (p_value, method) = if use_exact {
        (exact_p(&ranks, n1, doubled_rank_sum_a), AppliedMethod::Exact)
    } else {
        (normal_p(&pooled, n1, n2, u), AppliedMethod::NormalApproximation)
    };

    Ok(UTestResult { u, u_b, n1, n2, p_value, method, sidedness: "two_sided".into() })
}

/// `2·min(P(S ≤ s), P(S ≥ s))`, capped at 1, where `S` is the doubled rank
/// sum of a random size-`n1` subset of the pooled ranks.
fn exact_p(doubled_ranks: &[u64], n1: usize, observed: u64) -> f64 {
    let max_sum: u64 = {
        let mut r = doubled_ranks.to_vec();
        r.sort_unstable_by(|a, b| b.cmp(a));
        r[..n1].iter().sum()
    };
    let width = max_sum as usize + 1;
    // ways[k][s]: subsets of size k with doubled rank sum s
    let mut ways = vec![vec![0u128; width]; n1 + 1];
    ways[0][0] = 1;
    for &r in doubled_ranks {
        let r = r as usize;
        for k in (1..=n1).rev() {
            let (lower, upper) = ways.split_at_mut(k);
            let prev = &lower[k - 1];
            let cur = &mut upper[0];
            for s in (r..width).rev() {
                if prev[s - r] != 0 {
                    cur[s] += prev[s - r];
                }
            }
        }
    }
    let dist = &ways[n1];
    let total: u128 = dist.iter().sum();
    let obs = observed as usize;
    let lower: u128 = dist[..=obs].iter().sum();
    let upper: u128 = dist[obs..].iter().sum();
    let tail = lower.min(upper);
    (2.0 * tail as f64 / total as f64).min(1.0)
}

fn normal_p(pooled: &[f64], n1: usize, n2: usize, u: f64) -> f64 {
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let n = n1f + n2f;
    let mut sorted = pooled.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let variance = n1f * n2f / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if variance.is_nan() || variance <= 0.0 {
        return 1.0;
    }
    let mean = n1f * n2f / 2.0;
    let z = ((u - mean).abs() - 0.5).max(0.0) / variance.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(a: &[f64], b: &[f64]) -> UTestResult {
        mann_whitney_u(a, b, &UTestConfig { method: UMethod::Exact, ..Default::default() }).unwrap()
    }

    #[test]
    fn separated_groups() {
        let r = exact(&[1.0, 2.0], &[3.0, 4.0]);
        assert_eq!(r.u, 0.0);
        assert_eq!(r.u_b, 4.0);
        assert!((r.p_value - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.method, AppliedMethod::Exact);
    }

    #[test]
    fn complete_ties() {
        let r = exact(&[5.0, 5.0], &[5.0, 5.0]);
        assert_eq!(r.u, 2.0);
        assert_eq!(r.p_value, 1.0);
        let n =
            mann_whitney_u(&[5.0, 5.0], &[5.0, 5.0], &UTestConfig { method: UMethod::Normal, ..Default::default() })
                .unwrap();
        assert_eq!(n.p_value, 1.0);
    }

    #[test]
    fn midranks_average_ties() {
        assert_eq!(midranks(&[1.0, 2.0, 2.0, 4.0]), vec![1.0, 2.5, 2.5, 4.0]);
    }

    #[test]
    fn auto_switches_to_normal_above_cap() {
        let a: Vec<f64> = (0..28).map(f64::from).collect();
        let b: Vec<f64> = (0..21).map(|x| f64::from(x) + 0.5).collect();
        let r = mann_whitney_u(&a, &b, &UTestConfig::default()).unwrap();
        assert_eq!(r.method, AppliedMethod::NormalApproximation);
        assert_eq!(r.u + r.u_b, 588.0);
        assert!(matches!(
            mann_whitney_u(&a, &b, &UTestConfig { method: UMethod::Exact, ..Default::default() }),
            Err(AnalysisError::PermutationSpace { .. })
        ));
    }

    #[test]
    fn normal_matches_reference_value() {
        // 1..5 vs 6..10: z = (12.5 - 0.5) / sqrt(22.9166..) = 2.5067, p = 0.01219
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [6.0, 7.0, 8.0, 9.0, 10.0];
        let r = mann_whitney_u(&a, &b, &UTestConfig { method: UMethod::Normal, ..Default::default() }).unwrap();
        assert_eq!(r.u, 0.0);
        assert!((r.p_value - 0.012185).abs() < 1e-5, "{}", r.p_value);
        let e = exact(&a, &b);
        assert!((e.p_value - 2.0 / 252.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(mann_whitney_u(&[], &[1.0], &UTestConfig::default()), Err(AnalysisError::EmptyGroup(_))));
        assert!(matches!(mann_whitney_u(&[f64::NAN], &[1.0], &UTestConfig::default()), Err(AnalysisError::NonFinite)));
    }

    #[test]
    fn binomial_cap() {
        assert_eq!(binomial_within(4, 2, 10), Some(6));
        assert_eq!(binomial_within(49, 21, 200_000), None);
        assert_eq!(binomial_within(14, 7, 200_000), Some(3432));
    }
}
