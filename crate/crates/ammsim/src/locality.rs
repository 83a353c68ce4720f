//! Stride statistics and spatial-locality scoring of traces.
//!
//! Each array's loads and stores are walked in node-id order and the byte
//! distance between consecutive access addresses is recorded. The locality
//! score is `sum over strides s of P(s) / s`: 1.0 for a pure byte-stream,
//! approaching 0 as strides grow. Distances are absolute values, so a
//! reverse scan scores like a forward scan; repeated addresses carry no
//! spatial information and are tallied separately instead of entering the
//! distribution.

use std::collections::BTreeMap;
use std::fmt;

use crate::trace::{Ddg, NodeKind};

/// Distribution of byte distances between consecutive accesses.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StrideHistogram {
    counts: BTreeMap<u64, u64>,
    total: u64,
    zero_strides: u64,
}

impl StrideHistogram {
    pub fn from_counts(counts: &[(u64, u64)]) -> StrideHistogram {
        let mut h = StrideHistogram::default();
        for &(stride, count) in counts {
            if stride == 0 {
                h.zero_strides += count;
            } else if count > 0 {
                *h.counts.entry(stride).or_insert(0) += count;
                h.total += count;
            }
        }
        h
    }

    fn record(&mut self, stride: u64) {
        if stride == 0 {
            self.zero_strides += 1;
        } else {
            *self.counts.entry(stride).or_insert(0) += 1;
            self.total += 1;
        }
    }

    fn absorb(&mut self, other: &StrideHistogram) {
        for (&stride, &count) in &other.counts {
            *self.counts.entry(stride).or_insert(0) += count;
        }
        self.total += other.total;
        self.zero_strides += other.zero_strides;
    }

    /// Counted nonzero strides, ascending by stride.
    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn zero_strides(&self) -> u64 {
        self.zero_strides
    }

    /// The `k` most frequent strides, most frequent first; ties broken by
    /// smaller stride.
    pub fn top_buckets(&self, k: usize) -> Vec<(u64, u64)> {
        let mut buckets: Vec<(u64, u64)> = self.counts.iter().map(|(&s, &c)| (s, c)).collect();
        buckets.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        buckets.truncate(k);
        buckets
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalityError {
    /// No stride pairs recorded; the score is undefined.
    EmptyHistogram,
}

impl fmt::Display for LocalityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalityError::EmptyHistogram => {
                f.write_str("no strides recorded; locality is undefined")
            }
        }
    }
}

impl std::error::Error for LocalityError {}

/// Per-array histograms (in array declaration order) plus their merged sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalityReport {
    pub per_array: Vec<(String, StrideHistogram)>,
    pub merged: StrideHistogram,
}

/// Walks every declared array's access stream and builds the histograms.
///
/// Streams are kept per array and only their counts are merged: interleaving
/// accesses of unrelated arrays into one stream would manufacture strides no
/// real access pattern contains.
pub fn stride_histogram(ddg: &Ddg) -> LocalityReport {
    let mut per_array: Vec<(String, StrideHistogram)> = ddg
        .arrays()
        .iter()
        .map(|a| (a.name.clone(), StrideHistogram::default()))
        .collect();
    let mut last_addr: Vec<Option<u64>> = vec![None; per_array.len()];
    for node in ddg.nodes() {
        let (array, addr) = match node.kind {
            NodeKind::Load { array, addr, .. } | NodeKind::Store { array, addr, .. } => {
                (array, addr)
            }
            NodeKind::Compute { .. } => continue,
        };
        if let Some(prev) = last_addr[array] {
            per_array[array].1.record(prev.abs_diff(addr));
        }
        last_addr[array] = Some(addr);
    }
    let mut merged = StrideHistogram::default();
    for (_, h) in &per_array {
        merged.absorb(h);
    }
    LocalityReport { per_array, merged }
}

/// Spatial locality score `sum of P(s) / s` over recorded strides.
pub fn spatial_locality(hist: &StrideHistogram) -> Result<f64, LocalityError> {
    if hist.total == 0 {
        return Err(LocalityError::EmptyHistogram);
    }
    let total = hist.total as f64;
    Ok(hist
        .counts
        .iter()
        .map(|(&stride, &count)| (count as f64 / total) / stride as f64)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::DdgBuilder;
    use proptest::prelude::*;

    fn stream(addrs: &[u64]) -> StrideHistogram {
        let mut b = DdgBuilder::new();
        let a = b.array("A", 4096);
        for &addr in addrs {
            b.load(a, addr, 1, &[]);
        }
        stride_histogram(&b.build()).merged
    }

    #[test]
    fn byte_scan_scores_exactly_one() {
        let addrs: Vec<u64> = (0..64).collect();
        let h = stream(&addrs);
        assert_eq!(h.counts().get(&1), Some(&63));
        assert_eq!(h.total(), 63);
        assert_eq!(spatial_locality(&h).unwrap(), 1.0);
    }

    #[test]
    fn stride_eight_scan_scores_exactly_one_eighth() {
        let h = stream(&[0, 8, 16, 24]);
        assert_eq!(h.counts().get(&8), Some(&3));
        assert_eq!(spatial_locality(&h).unwrap(), 0.125);
    }

    #[test]
    fn repeated_address_counts_as_zero_stride() {
        let h = stream(&[0, 8, 8, 16]);
        assert_eq!(h.counts().get(&8), Some(&2));
        assert_eq!(h.zero_strides(), 1);
        assert_eq!(h.total(), 2);
    }

    #[test]
    fn fifty_fifty_mix_scores_nine_sixteenths() {
        let h = StrideHistogram::from_counts(&[(1, 50), (8, 50)]);
        assert_eq!(spatial_locality(&h).unwrap(), 0.5625);
    }

    #[test]
    fn reverse_scan_scores_like_forward_scan() {
        let fwd: Vec<u64> = (0..32).map(|i| i * 4).collect();
        let rev: Vec<u64> = fwd.iter().rev().copied().collect();
        assert_eq!(stream(&fwd), stream(&rev));
    }

    #[test]
    fn empty_histogram_is_an_error() {
        assert_eq!(spatial_locality(&stream(&[])), Err(LocalityError::EmptyHistogram));
        assert_eq!(spatial_locality(&stream(&[5])), Err(LocalityError::EmptyHistogram));
    }

    #[test]
    fn arrays_are_walked_separately_then_merged() {
        let mut b = DdgBuilder::new();
        let a = b.array("A", 64);
        let c = b.array("B", 64);
        // Interleaved in node order; per-array streams are still clean scans.
        for i in 0..4u64 {
            b.load(a, i, 1, &[]);
            b.load(c, i * 8, 8, &[]);
        }
        let report = stride_histogram(&b.build());
        assert_eq!(report.per_array[0].1.counts().get(&1), Some(&3));
        assert_eq!(report.per_array[1].1.counts().get(&8), Some(&3));
        assert_eq!(report.merged.total(), 6);
        assert_eq!(spatial_locality(&report.merged).unwrap(), 0.5 + 0.125 / 2.0);
    }

    #[test]
    fn top_buckets_order_by_count_then_stride() {
        let h = StrideHistogram::from_counts(&[(4, 10), (1, 10), (64, 30), (8, 2)]);
        assert_eq!(h.top_buckets(3), vec![(64, 30), (1, 10), (4, 10)]);
    }

    proptest! {
        #[test]
        fn score_stays_in_unit_interval(
            counts in proptest::collection::btree_map(1u64..10_000, 1u64..1000, 1..20)
        ) {
            let pairs: Vec<(u64, u64)> = counts.into_iter().collect();
            let h = StrideHistogram::from_counts(&pairs);
            let l = spatial_locality(&h).unwrap();
            prop_assert!(l > 0.0 && l <= 1.0);
        }

        #[test]
        fn moving_mass_to_a_larger_stride_lowers_the_score(
            counts in proptest::collection::btree_map(1u64..100, 1u64..100, 2..10),
            widen in 1u64..50
        ) {
            let pairs: Vec<(u64, u64)> = counts.iter().map(|(&s, &c)| (s, c)).collect();
            let before = spatial_locality(&StrideHistogram::from_counts(&pairs)).unwrap();
            // Push the smallest stride's mass out by `widen` bytes.
            let (&small, &mass) = counts.iter().next().unwrap();
            let mut moved: BTreeMap<u64, u64> = counts.clone();
            moved.remove(&small);
            *moved.entry(small + widen).or_insert(0) += mass;
            let pairs: Vec<(u64, u64)> = moved.into_iter().collect();
            let after = spatial_locality(&StrideHistogram::from_counts(&pairs)).unwrap();
            prop_assert!(after < before);
        }
    }
}
