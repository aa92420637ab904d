//! Rank statistics for comparing algorithms over repeated runs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of a pairwise comparison, from the first sample's point of view
/// (minimization: lower is better).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mark {
    #[serde(rename = "+")]
    Better,
    #[serde(rename = "-")]
    Worse,
    #[serde(rename = "≈")]
    Similar,
}

impl Mark {
    pub fn symbol(&self) -> &'static str {
        match self {
            Mark::Better => "+",
            Mark::Worse => "-",
            Mark::Similar => "≈",
        }
    }

    pub fn flipped(&self) -> Mark {
        match self {
            Mark::Better => Mark::Worse,
            Mark::Worse => Mark::Better,
            Mark::Similar => Mark::Similar,
        }
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl std::str::FromStr for Mark {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" => Ok(Mark::Better),
            "-" | "−" => Ok(Mark::Worse),
            "≈" | "~" | "=" => Ok(Mark::Similar),
            other => Err(Error::Format(format!("unknown mark `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankSumTest {
    /// Rank sum of the first sample (midranks).
    pub rank_sum: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    /// Whether the exact null distribution was used.
    pub exact: bool,
    pub mark: Mark,
}

/// Samples at most this large, without ties, use the exact null
/// distribution of the rank sum.
pub const EXACT_LIMIT: usize = 8;

/// Ascending ranks starting at 1; tied values share their average rank.
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
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

pub fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Sample standard deviation (`n - 1` denominator); zero for one value.
pub fn std_dev(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    if values.len() == 1 {
        return Some(0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
    Some((ss / (values.len() - 1) as f64).sqrt())
}

/// Number of `k`-subsets of `{1..n}` with each possible rank sum.
fn rank_sum_counts(n: usize, k: usize) -> Vec<f64> {
    let max_sum = k * (2 * n - k + 1) / 2;
    // counts[j][s]: subsets of size j with sum s among the ranks seen so far
    let mut counts = vec![vec![0.0f64; max_sum + 1]; k + 1];
    counts[0][0] = 1.0;
    for r in 1..=n {
        for j in (1..=k.min(r)).rev() {
            for s in (r..=max_sum).rev() {
                counts[j][s] += counts[j - 1][s - r];
            }
        }
    }
    counts.swap_remove(k)
}

fn exact_two_sided(rank_sum: f64, n1: usize, n2: usize) -> f64 {
    let counts = rank_sum_counts(n1 + n2, n1);
    let total: f64 = counts.iter().sum();
    let w = rank_sum.round() as usize;
    let lower: f64 = counts[..=w.min(counts.len() - 1)].iter().sum();
    let upper: f64 = counts[w.min(counts.len())..].iter().sum();
    (2.0 * lower.min(upper) / total).min(1.0)
}

/// Two-sided Wilcoxon rank-sum test of `a` against `b`.
///
/// Midranks handle ties. Small untied samples use the exact null
/// distribution; otherwise the normal approximation with tie-corrected
/// variance and a continuity correction. The mark reads from `a`'s side:
/// `+` when `a` is significantly better (lower), `-` when worse.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64], alpha: f64) -> Result<RankSumTest> {
    let (n1, n2) = (a.len(), b.len());
    if n1 < 2 || n2 < 2 {
        return Err(Error::NotEnoughIndividuals {
            needed: 2,
            available: n1.min(n2),
        });
    }
    if let Some(&v) = a.iter().chain(b).find(|v| !v.is_finite()) {
        return Err(Error::NonFiniteObjective(v));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = average_ranks(&pooled);
    let rank_sum: f64 = ranks[..n1].iter().sum();
    let n = (n1 + n2) as f64;
    let expected = n1 as f64 * (n + 1.0) / 2.0;

    let mut tie_term = 0.0;
    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&v| v == sorted[i]).count();
        tie_term += (j * j * j - j) as f64;
        i += j;
    }
    let has_ties = tie_term > 0.0;

    let (p_value, exact) = if !has_ties && n1 <= EXACT_LIMIT && n2 <= EXACT_LIMIT {
        (exact_two_sided(rank_sum, n1, n2), true)
    } else {
        let var = n1 as f64 * n2 as f64 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
        if var <= 0.0 {
            // every value identical
            (1.0, false)
        } else {
            let dev = ((rank_sum - expected).abs() - 0.5).max(0.0);
            let z = dev / var.sqrt();
            (libm::erfc(z / std::f64::consts::SQRT_2).min(1.0), false)
        }
    };

    let mark = if p_value < alpha {
        let (ma, mb) = (median(a).unwrap_or(0.0), median(b).unwrap_or(0.0));
        let a_lower = if ma != mb { ma < mb } else { rank_sum < expected };
        if a_lower {
            Mark::Better
        } else {
            Mark::Worse
        }
    } else {
        Mark::Similar
    };
    Ok(RankSumTest {
        rank_sum,
        p_value,
        exact,
        mark,
    })
}

/// Average rank of each algorithm across problems. `table[p][k]` is the
/// score (lower is better) of algorithm `k` on problem `p`.
pub fn mean_rank(table: &[Vec<f64>]) -> Result<Vec<f64>> {
    let k = table
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidParameter("mean rank needs at least one problem".into()))?;
    if k == 0 {
        return Err(Error::InvalidParameter("mean rank needs at least one algorithm".into()));
    }
    let mut acc = vec![0.0; k];
    for (p, row) in table.iter().enumerate() {
        if row.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                actual: row.len(),
            });
        }
        if let Some(i) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "missing or non-finite value for algorithm {i} on problem {p}"
            )));
        }
        for (a, r) in acc.iter_mut().zip(average_ranks(row)) {
            *a += r;
        }
    }
    Ok(acc.into_iter().map(|s| s / table.len() as f64).collect())
}

/// Percentage improvement of `variant` over `baseline` (minimization).
pub fn improvement_metric(baseline: f64, variant: f64) -> Result<f64> {
    if baseline == 0.0 {
        return Err(Error::InvalidParameter("improvement is undefined for a zero baseline".into()));
    }
    Ok((baseline - variant) / baseline * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Two-sided p by listing every way to assign ranks to the first sample.
    fn enumerate_p(n1: usize, n2: usize, observed: usize) -> f64 {
        let n = n1 + n2;
        let mut sums = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == n1 {
                sums.push((0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).sum::<usize>());
            }
        }
        let total = sums.len() as f64;
        let lo = sums.iter().filter(|&&s| s <= observed).count() as f64;
        let hi = sums.iter().filter(|&&s| s >= observed).count() as f64;
        (2.0 * lo.min(hi) / total).min(1.0)
    }

    #[test]
    fn separated_samples_match_enumeration() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [10.0, 11.0, 12.0, 13.0, 14.0];
        let t = wilcoxon_rank_sum(&a, &b, 0.05).unwrap();
        let oracle = enumerate_p(5, 5, 15);
        assert!((oracle - 2.0 / 252.0).abs() < 1e-15);
        assert!((t.p_value - oracle).abs() < 1e-12);
        assert_eq!(t.mark, Mark::Better);
        assert!(t.exact);
    }

    #[test]
    fn exact_matches_enumeration_for_every_sum() {
        for (n1, n2) in [(3, 4), (5, 5), (2, 7), (6, 3)] {
            let lo = n1 * (n1 + 1) / 2;
            let hi = lo + n1 * n2;
            for w in lo..=hi {
                let p = exact_two_sided(w as f64, n1, n2);
                assert!((p - enumerate_p(n1, n2, w)).abs() < 1e-12, "{n1} {n2} {w}");
            }
        }
    }

    #[test]
    fn swapping_flips_mark() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [10.0, 11.0, 12.0, 13.0, 14.0];
        assert_eq!(wilcoxon_rank_sum(&b, &a, 0.05).unwrap().mark, Mark::Worse);
    }

    #[test]
    fn identical_samples_are_similar() {
        let a = [3.0; 6];
        let t = wilcoxon_rank_sum(&a, &a, 0.05).unwrap();
        assert_eq!(t.p_value, 1.0);
        assert_eq!(t.mark, Mark::Similar);
        let b = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(wilcoxon_rank_sum(&b, &b, 0.05).unwrap().mark, Mark::Similar);
    }

    #[test]
    fn large_samples_use_normal_approximation() {
        let a: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let b: Vec<f64> = (0..30).map(|i| i as f64 + 15.5).collect();
        let t = wilcoxon_rank_sum(&a, &b, 0.05).unwrap();
        assert!(!t.exact);
        // hand computation: a's ranks are 1..16 then 2k-14 for k = 16..29,
        // W = 136 + 434 = 570, E = 915, var = 30*30*61/12 = 4575
        assert_eq!(t.rank_sum, 570.0);
        let z = (345.0f64 - 0.5) / 4575.0f64.sqrt();
        let p = libm::erfc(z / std::f64::consts::SQRT_2);
        assert!((t.p_value - p).abs() < 1e-12);
        assert_eq!(t.mark, Mark::Better);
    }

    #[test]
    fn tie_corrected_variance() {
        // pooled: 1,1,2,2,2,3,4,4 ; ties of size 2,3,2 → Σ(t³−t) = 6+24+6 = 36
        let a = [1.0, 2.0, 4.0, 2.0];
        let b = [1.0, 2.0, 3.0, 4.0];
        let t = wilcoxon_rank_sum(&a, &b, 0.05).unwrap();
        let (n1, n2, n) = (4.0, 4.0, 8.0);
        let var: f64 = n1 * n2 / 12.0 * ((n + 1.0) - 36.0 / (n * (n - 1.0)));
        let w = 1.5 + 4.0 + 7.5 + 4.0;
        assert_eq!(t.rank_sum, w);
        let z = ((w - 18.0f64).abs() - 0.5).max(0.0) / var.sqrt();
        assert!((t.p_value - libm::erfc(z / std::f64::consts::SQRT_2)).abs() < 1e-12);
    }

    #[test]
    fn rejects_tiny_or_bad_samples() {
        assert!(wilcoxon_rank_sum(&[1.0], &[1.0, 2.0], 0.05).is_err());
        assert!(wilcoxon_rank_sum(&[1.0, f64::NAN], &[1.0, 2.0], 0.05).is_err());
    }

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn mean_rank_examples() {
        let table = vec![vec![1.0, 2.0], vec![0.5, 9.0], vec![3.0, 4.0]];
        assert_eq!(mean_rank(&table).unwrap(), vec![1.0, 2.0]);
        let flat = vec![vec![5.0; 4]; 3];
        assert_eq!(mean_rank(&flat).unwrap(), vec![2.5; 4]);
        assert!(mean_rank(&[vec![1.0, 2.0], vec![1.0]]).is_err());
        assert!(mean_rank(&[vec![1.0, f64::NAN]]).is_err());
    }

    #[test]
    fn reported_rank_row_averages_to_353() {
        let ranks = [4.0, 4.0, 4.0, 4.0, 4.0, 1.0, 3.0, 5.0, 2.0, 4.0, 3.0, 2.0, 5.0, 3.0, 5.0];
        let m = mean(&ranks).unwrap();
        assert!((m - 3.53).abs() < 0.005);
    }

    #[test]
    fn improvement_examples() {
        assert_eq!(improvement_metric(100.0, 50.0).unwrap(), 50.0);
        assert_eq!(improvement_metric(100.0, 100.0).unwrap(), 0.0);
        assert_eq!(improvement_metric(100.0, 150.0).unwrap(), -50.0);
        assert!(improvement_metric(0.0, 1.0).is_err());
    }

    #[test]
    fn summary_helpers() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(mean(&[]), None);
        assert!((std_dev(&[1.0, 2.0, 3.0, 4.0]).unwrap() - 1.290_994_448_735_805_6).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn mean_rank_averages_to_midpoint(rows in prop::collection::vec(prop::collection::vec(0u8..5, 4), 1..10)) {
            let table: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
            let r = mean_rank(&table).unwrap();
            let avg = r.iter().sum::<f64>() / r.len() as f64;
            prop_assert!((avg - 2.5).abs() < 1e-12);
        }

        #[test]
        fn marks_invariant_under_monotone_transform(
            a in prop::collection::vec(-10.0f64..10.0, 2..20),
            b in prop::collection::vec(-10.0f64..10.0, 2..20),
        ) {
            let t1 = wilcoxon_rank_sum(&a, &b, 0.05).unwrap();
            let f = |v: &f64| v.exp() * 3.0 + 1.0;
            let ta: Vec<f64> = a.iter().map(f).collect();
            let tb: Vec<f64> = b.iter().map(f).collect();
            let t2 = wilcoxon_rank_sum(&ta, &tb, 0.05).unwrap();
            prop_assert_eq!(t1.rank_sum, t2.rank_sum);
            prop_assert_eq!(t1.p_value, t2.p_value);
            prop_assert_eq!(t1.mark, t2.mark);
        }

        #[test]
        fn antisymmetric(
            a in prop::collection::vec(-10.0f64..10.0, 2..12),
            b in prop::collection::vec(-10.0f64..10.0, 2..12),
        ) {
            let ab = wilcoxon_rank_sum(&a, &b, 0.05).unwrap();
            let ba = wilcoxon_rank_sum(&b, &a, 0.05).unwrap();
            prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
            if median(&a) != median(&b) {
                prop_assert_eq!(ab.mark, ba.mark.flipped());
            }
        }
    }
}
