//! Partitions of observations and the point-to-cluster distance ledger.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy::DistanceCache;
use crate::error::{invalid, Error, Result};
use crate::sum::CompensatedSum;
use crate::validation::ContingencyTable;

/// Assignment of `n` observations to `K` non-empty clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartitionRepr", into = "PartitionRepr")]
pub struct Partition {
    labels: Vec<usize>,
    sizes: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PartitionRepr {
    k: usize,
    labels: Vec<usize>,
}

impl TryFrom<PartitionRepr> for Partition {
    type Error = Error;

    fn try_from(r: PartitionRepr) -> Result<Self> {
        Partition::from_labels(r.labels, r.k)
    }
}

impl From<Partition> for PartitionRepr {
    fn from(p: Partition) -> Self {
        PartitionRepr {
            k: p.k(),
            labels: p.labels,
        }
    }
}

impl Partition {
    /// Builds a partition from labels in `0..k`. Every cluster must be used.
    pub fn from_labels(labels: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("partition needs at least one cluster"));
        }
        let mut sizes = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            if l >= k {
                return Err(invalid(format!("label {l} at position {i} is not below K={k}")));
            }
            sizes[l] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(invalid(format!("cluster {empty} has no members")));
        }
        Ok(Self { labels, sizes })
    }

    /// Builds a partition from arbitrary integer labels, numbering clusters
    /// by ascending label value.
    pub fn from_raw_labels(raw: &[i64]) -> Result<Self> {
        let mut distinct: Vec<i64> = raw.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        let labels = raw
            .iter()
            .map(|v| distinct.binary_search(v).expect("label present"))
            .collect();
        Self::from_labels(labels, distinct.len())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    #[inline]
    pub fn size(&self, k: usize) -> usize {
        self.sizes[k]
    }

    /// Indices of the members of cluster `k`, ascending.
    pub fn members(&self, k: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, &l)| (l == k).then_some(i))
            .collect()
    }

    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k()];
        for (i, &l) in self.labels.iter().enumerate() {
            out[l].push(i);
        }
        out
    }

    /// Same grouping with cluster ids renamed through `mapping[old] = new`.
    pub fn relabeled(&self, mapping: &[usize]) -> Result<Self> {
        let k = self.k();
        let mut seen = vec![false; k];
        if mapping.len() != k || mapping.iter().any(|&m| m >= k || std::mem::replace(&mut seen[m], true)) {
            return Err(invalid("relabeling must be a permutation of the cluster ids"));
        }
        Self::from_labels(self.labels.iter().map(|&l| mapping[l]).collect(), k)
    }

    /// Cross-tabulation against another partition of the same observations.
    pub fn contingency(&self, other: &Partition) -> Result<ContingencyTable> {
        ContingencyTable::from_labels(&self.labels, &other.labels)
    }

    fn check_move(&self, i: usize, to: usize) -> Result<usize> {
        if i >= self.len() {
            return Err(invalid(format!("point {i} out of range 0..{}", self.len())));
        }
        if to >= self.k() {
            return Err(invalid(format!("cluster {to} out of range 0..{}", self.k())));
        }
        let from = self.labels[i];
        if from == to {
            return Err(Error::RejectedMove(format!("point {i} is already in cluster {to}")));
        }
        if self.sizes[from] < 2 {
            return Err(Error::RejectedMove(format!(
                "moving point {i} would empty cluster {from}"
            )));
        }
        Ok(from)
    }

    fn relocate(&mut self, i: usize, from: usize, to: usize) {
        self.labels[i] = to;
        self.sizes[from] -= 1;
        self.sizes[to] += 1;
    }
}

/// Draws a partition of `n` points into `k` clusters, uniformly among all
/// assignments that leave no cluster empty. Deterministic for a fixed seed.
pub fn random_partition(n: usize, k: usize, seed: u64) -> Result<Partition> {
    random_partition_with(&mut ChaCha8Rng::seed_from_u64(seed), n, k)
}

/// [`random_partition`] driven by a caller-owned generator.
///
/// Points are labelled in order. With `r` points left to label and `e`
/// clusters still empty, the number of surjective completions obeys
/// `f(r, e) = e·f(r-1, e-1) + (K-e)·f(r-1, e)`; the next point opens an
/// empty cluster with probability `e·f(r-1, e-1) / f(r, e)`, which makes the
/// result exactly uniform over surjections. The table is kept in log space.
pub fn random_partition_with<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Result<Partition> {
    if k == 0 {
        return Err(invalid("K must be at least 1"));
    }
    if k > n {
        return Err(invalid(format!("K={k} exceeds the number of points n={n}")));
    }
    // log_f[r][e], r in 0..=n, e in 0..=k
    let mut log_f = vec![vec![f64::NEG_INFINITY; k + 1]; n + 1];
    log_f[0][0] = 0.0;
    for r in 1..=n {
        for e in 0..=k {
            let open = if e > 0 {
                (e as f64).ln() + log_f[r - 1][e - 1]
            } else {
                f64::NEG_INFINITY
            };
            let fill = if e < k {
                ((k - e) as f64).ln() + log_f[r - 1][e]
            } else {
                f64::NEG_INFINITY
            };
            log_f[r][e] = log_add_exp(open, fill);
        }
    }

    let mut empty: Vec<usize> = (0..k).collect();
    let mut used: Vec<usize> = Vec::with_capacity(k);
    let mut labels = Vec::with_capacity(n);
    for r in (1..=n).rev() {
        let e = empty.len();
        let p_open = if e == 0 {
            0.0
        } else {
            ((e as f64).ln() + log_f[r - 1][e - 1] - log_f[r][e]).exp()
        };
        let must_open = used.is_empty() || r == e;
        if e > 0 && (must_open || rng.gen::<f64>() < p_open) {
            let c = empty.swap_remove(rng.gen_range(0..e));
            used.push(c);
            labels.push(c);
        } else {
            labels.push(*used.choose(rng).expect("at least one cluster in use"));
        }
    }
    Partition::from_labels(labels, k)
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

/// Per-point sums of distances to every cluster, plus per-cluster sums of
/// within-cluster pair distances.
///
/// `sum(i, k) = Σ_{j∈π_k} d(i, j)` and `within(k) = Σ_{i<j∈π_k} d(i, j)`.
/// A relocation updates both in `O(n)`.
#[derive(Debug, Clone)]
pub struct ClusterSumLedger<'a> {
    cache: &'a DistanceCache,
    k: usize,
    sums: Vec<f64>,
    within: Vec<f64>,
}

impl<'a> ClusterSumLedger<'a> {
    pub fn build(partition: &Partition, cache: &'a DistanceCache) -> Result<Self> {
        let n = cache.n();
        if partition.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: partition.len(),
            });
        }
        let k = partition.k();
        let labels = partition.labels();
        let mut sums = vec![0.0; n * k];
        for i in 0..n {
            let mut acc = vec![CompensatedSum::new(); k];
            for (j, &d) in cache.row(i).iter().enumerate() {
                acc[labels[j]].add(d);
            }
            for (slot, a) in sums[i * k..(i + 1) * k].iter_mut().zip(&acc) {
                *slot = a.value();
            }
        }
        let mut within_acc = vec![CompensatedSum::new(); k];
        for i in 0..n {
            within_acc[labels[i]].add(sums[i * k + labels[i]]);
        }
        let within = within_acc.iter().map(|a| 0.5 * a.value()).collect();
        Ok(Self {
            cache,
            k,
            sums,
            within,
        })
    }

    pub fn cache(&self) -> &'a DistanceCache {
        self.cache
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn sum(&self, i: usize, k: usize) -> f64 {
        self.sums[i * self.k + k]
    }

    #[inline]
    pub fn within(&self, k: usize) -> f64 {
        self.within[k]
    }

    /// Within-cluster dispersion `W = Σ_k within(k) / n_k`.
    pub fn within_dispersion(&self, partition: &Partition) -> f64 {
        (0..self.k)
            .map(|k| self.within[k] / partition.size(k) as f64)
            .collect::<CompensatedSum>()
            .value()
    }

    fn apply_move(&mut self, i: usize, from: usize, to: usize) {
        let k = self.k;
        self.within[from] -= self.sums[i * k + from];
        self.within[to] += self.sums[i * k + to];
        for (j, &d) in self.cache.row(i).iter().enumerate() {
            self.sums[j * k + from] -= d;
            self.sums[j * k + to] += d;
        }
    }

    /// Largest relative difference against a from-scratch rebuild.
    pub fn max_relative_drift(&self, partition: &Partition) -> Result<f64> {
        let fresh = ClusterSumLedger::build(partition, self.cache)?;
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        let sums = self.sums.iter().zip(&fresh.sums).map(|(&a, &b)| rel(a, b));
        let within = self.within.iter().zip(&fresh.within).map(|(&a, &b)| rel(a, b));
        Ok(sums.chain(within).fold(0.0, f64::max))
    }
}

/// Moves point `i` into cluster `to`, updating labels, sizes and ledger.
pub fn move_point(
    partition: &mut Partition,
    ledger: &mut ClusterSumLedger<'_>,
    i: usize,
    to: usize,
) -> Result<()> {
    if ledger.k != partition.k() || ledger.cache.n() != partition.len() {
        return Err(invalid("ledger does not match partition"));
    }
    let from = partition.check_move(i, to)?;
    partition.relocate(i, from, to);
    ledger.apply_move(i, from, to);
    Ok(())
}

/// Moves every point of `points` (all currently in one cluster) into `to`.
pub fn move_points(
    partition: &mut Partition,
    ledger: &mut ClusterSumLedger<'_>,
    points: &[usize],
    to: usize,
) -> Result<()> {
    let Some(&first) = points.first() else {
        return Err(invalid("no points to move"));
    };
    if first >= partition.len() {
        return Err(invalid(format!("point {first} out of range")));
    }
    let from = partition.label(first);
    for &i in points {
        if i >= partition.len() || partition.label(i) != from {
            return Err(Error::RejectedMove("points are not all in one cluster".into()));
        }
    }
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid("repeated point in move set"));
    }
    if partition.size(from) <= points.len() {
        return Err(Error::RejectedMove(format!(
            "moving {} points would empty cluster {from}",
            points.len()
        )));
    }
    for &i in points {
        move_point(partition, ledger, i, to)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{Alpha, DataMatrix};

    fn cache_1d(values: &[f64]) -> DistanceCache {
        DistanceCache::build(&DataMatrix::from_column(values).unwrap(), Alpha::ONE)
    }

    #[test]
    fn from_labels_rejects_empty_clusters() {
        assert!(Partition::from_labels(vec![0, 0, 2], 3).is_err());
        assert!(Partition::from_labels(vec![0, 3], 2).is_err());
        let p = Partition::from_labels(vec![1, 0, 1], 2).unwrap();
        assert_eq!(p.sizes(), &[1, 2]);
        assert_eq!(p.members(1), vec![0, 2]);
    }

    #[test]
    fn raw_labels_are_compacted() {
        let p = Partition::from_raw_labels(&[7, -1, 7, 3]).unwrap();
        assert_eq!(p.labels(), &[2, 0, 2, 1]);
    }

    #[test]
    fn random_partition_n_equals_k_gives_singletons() {
        for seed in 0..20 {
            let p = random_partition(4, 4, seed).unwrap();
            assert_eq!(p.sizes(), &[1, 1, 1, 1]);
        }
    }

    #[test]
    fn random_partition_is_deterministic() {
        let a = random_partition(200, 2, 99).unwrap();
        let b = random_partition(200, 2, 99).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_partition(200, 2, 100).unwrap());
    }

    #[test]
    fn random_partition_rejects_too_many_clusters() {
        assert!(random_partition(3, 4, 0).is_err());
        assert!(random_partition(3, 0, 0).is_err());
    }

    #[test]
    fn random_partition_cluster_size_mean() {
        let mean = (0..1000u64)
            .map(|s| random_partition(200, 2, s).unwrap().size(0) as f64)
            .sum::<f64>()
            / 1000.0;
        assert!((mean - 100.0).abs() <= 5.0, "mean size {mean}");
    }

    #[test]
    fn random_partition_is_uniform_over_surjections() {
        // n=4, K=3 has 36 surjections; each should be hit ~1/36 of the time.
        let mut counts = std::collections::HashMap::new();
        let draws = 36_000;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..draws {
            let p = random_partition_with(&mut rng, 4, 3).unwrap();
            *counts.entry(p.labels().to_vec()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 36);
        for (labels, c) in counts {
            assert!((c as f64 - 1000.0).abs() < 150.0, "{labels:?} drawn {c} times");
        }
    }

    #[test]
    fn move_and_move_back_restores_ledger() {
        let cache = cache_1d(&[0.0, 0.4, 1.1, 3.0, 3.3, 7.5]);
        let mut p = Partition::from_labels(vec![0, 0, 0, 1, 1, 1], 2).unwrap();
        let mut ledger = ClusterSumLedger::build(&p, &cache).unwrap();
        let before = ledger.clone();
        move_point(&mut p, &mut ledger, 2, 1).unwrap();
        move_point(&mut p, &mut ledger, 2, 0).unwrap();
        for (a, b) in ledger.sums.iter().zip(&before.sums) {
            assert!((a - b).abs() <= 1e-12);
        }
        for (a, b) in ledger.within.iter().zip(&before.within) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn move_from_singleton_is_rejected() {
        let cache = cache_1d(&[0.0, 1.0, 2.0]);
        let mut p = Partition::from_labels(vec![0, 1, 1], 2).unwrap();
        let mut ledger = ClusterSumLedger::build(&p, &cache).unwrap();
        let err = move_point(&mut p, &mut ledger, 0, 1).unwrap_err();
        assert!(matches!(err, Error::RejectedMove(_)));
        assert!(matches!(
            move_point(&mut p, &mut ledger, 1, 1).unwrap_err(),
            Error::RejectedMove(_)
        ));
        assert_eq!(p.sizes(), &[1, 2]);
    }

    #[test]
    fn ledger_tracks_random_moves() {
        let values: Vec<f64> = (0..40).map(|i| ((i * 37) % 23) as f64 * 0.37).collect();
        let cache = cache_1d(&values);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut p = random_partition_with(&mut rng, 40, 4).unwrap();
        let mut ledger = ClusterSumLedger::build(&p, &cache).unwrap();
        for _ in 0..40 {
            let i = rng.gen_range(0..40);
            let to = rng.gen_range(0..4);
            let _ = move_point(&mut p, &mut ledger, i, to);
            let total: usize = p.sizes().iter().sum();
            assert_eq!(total, 40);
            assert!(p.sizes().iter().all(|&s| s >= 1));
            for k in 0..4 {
                assert_eq!(p.size(k), p.members(k).len());
            }
            assert!(ledger.max_relative_drift(&p).unwrap() <= 1e-10);
        }
    }
}
