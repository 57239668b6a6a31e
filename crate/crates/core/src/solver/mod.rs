//! k-groups fitting by first and second variation, and the α = 2 k-means path.
//!
//! The objective is the within-cluster dispersion
//! `W = Σ_j (n_j / 2) G(π_j, π_j)`. Moving a set `S` of `m` points from
//! cluster 1 (size `n₁`) to cluster 2 (size `n₂`) changes it by
//!
//! ```text
//! W(P) - W(P') = m·n₁ / (2(n₁ - m)) · ξ(S, π₁) - m·n₂ / (2(n₂ + m)) · ξ(S, π₂)
//! ```
//!
//! where `ξ(S, π) = 2/(m·n) ΣΣ|x - a|^α - 1/m² ΣΣ|a - a'|^α - 1/n² ΣΣ|x - x'|^α`.
//! Both fit loops relocate only when that difference is strictly positive.

mod first;
mod kmeans;
mod second;

pub use first::{fit_first_variation, refine_first_variation};
pub use kmeans::{fit_kmeans_alpha2, refine_kmeans, within_sum_of_squares};
pub use second::{fit_second_variation, greedy_pairs, refine_second_variation};

use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{Alpha, DataMatrix};
use crate::error::{invalid, Error, Result};
use crate::partition::{ClusterSumLedger, Partition};

pub const DEFAULT_RESTARTS: usize = 10;
pub const DEFAULT_MAX_PASSES: usize = 50;

/// Which local search drives the fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Single-point relocations.
    FirstVariation,
    /// Relocations of fixed nearest-neighbour pairs.
    SecondVariation,
    /// Single-point relocations scored with centroids (α forced to 2).
    KMeansAlpha2,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::FirstVariation => "first",
            Mode::SecondVariation => "second",
            Mode::KMeansAlpha2 => "kmeans",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first" | "first_variation" => Ok(Mode::FirstVariation),
            "second" | "second_variation" => Ok(Mode::SecondVariation),
            "kmeans" | "kmeans_alpha2" => Ok(Mode::KMeansAlpha2),
            other => Err(invalid(format!("unknown mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub k: usize,
    pub alpha: Alpha,
    pub restarts: usize,
    pub max_passes: usize,
    pub seed: u64,
    pub mode: Mode,
    /// Keep the relocation trace of the winning restart.
    #[serde(default)]
    pub record_trace: bool,
}

impl FitConfig {
    pub fn new(k: usize, alpha: Alpha, mode: Mode) -> Self {
        Self {
            k,
            alpha,
            restarts: DEFAULT_RESTARTS,
            max_passes: DEFAULT_MAX_PASSES,
            seed: 0,
            mode,
            record_trace: false,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_max_passes(mut self, max_passes: usize) -> Self {
        self.max_passes = max_passes;
        self
    }

    pub fn with_trace(mut self, record: bool) -> Self {
        self.record_trace = record;
        self
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("K must be at least 1"));
        }
        if self.k > n {
            return Err(invalid(format!("K={} exceeds the number of points n={n}", self.k)));
        }
        if self.restarts == 0 {
            return Err(invalid("restarts must be at least 1"));
        }
        if self.max_passes == 0 {
            return Err(invalid("max_passes must be at least 1"));
        }
        Ok(())
    }
}

/// One accepted relocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relocation {
    /// Zero-based index of the visit (point or pair) at which the move happened.
    pub step: usize,
    pub points: Vec<usize>,
    pub from: usize,
    pub to: usize,
    /// `E1 - E2`, the predicted decrease of `W`.
    pub gain: f64,
}

/// Outcome of one local search from one starting partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub partition: Partition,
    pub passes: usize,
    pub moves: usize,
    /// Stopped because a full cycle went by without a relocation.
    pub converged: bool,
    pub trace: Vec<Relocation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub partition: Partition,
    /// Within-cluster dispersion of `partition`, recomputed from scratch.
    pub within: f64,
    pub passes: usize,
    pub moves: usize,
    pub converged: bool,
    pub seed: u64,
    pub best_restart: usize,
    pub per_restart_within: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<Relocation>,
}

/// Dispatches on `cfg.mode`.
pub fn fit(data: &DataMatrix, cfg: &FitConfig) -> Result<FitResult> {
    match cfg.mode {
        Mode::FirstVariation => fit_first_variation(data, cfg),
        Mode::SecondVariation => fit_second_variation(data, cfg),
        Mode::KMeansAlpha2 => fit_kmeans_alpha2(data, cfg),
    }
}

/// Generator for one restart: ChaCha8 keyed by the fit seed, one stream per
/// restart index.
pub fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Runs every restart (in parallel) and keeps the one with the smallest
/// objective; ties go to the lowest restart index.
pub(crate) fn best_of_restarts<F>(cfg: &FitConfig, run_one: F) -> Result<FitResult>
where
    F: Fn(usize) -> Result<(Run, f64)> + Sync,
{
    let runs: Vec<(Run, f64)> = (0..cfg.restarts)
        .into_par_iter()
        .map(&run_one)
        .collect::<Result<_>>()?;
    let per_restart_within: Vec<f64> = runs.iter().map(|(_, w)| *w).collect();
    let best_restart = per_restart_within
        .iter()
        .enumerate()
        .fold(0, |best, (r, &w)| if w < per_restart_within[best] { r } else { best });
    let (run, within) = runs.into_iter().nth(best_restart).expect("at least one restart");
    if !within.is_finite() {
        return Err(Error::NumericInvariant(format!("objective is {within}")));
    }
    Ok(FitResult {
        partition: run.partition,
        within,
        passes: run.passes,
        moves: run.moves,
        converged: run.converged,
        seed: cfg.seed,
        best_restart,
        per_restart_within,
        trace: run.trace,
    })
}

#[inline]
pub(crate) fn stay_weight(m: usize, n1: usize) -> f64 {
    (m * n1) as f64 / (2.0 * (n1 - m) as f64)
}

#[inline]
pub(crate) fn join_weight(m: usize, n2: usize) -> f64 {
    (m * n2) as f64 / (2.0 * (n2 + m) as f64)
}

/// `ξ(S, π_k)` from the ledger. `S` may lie inside `π_k` (source cluster)
/// or outside it (candidate target).
pub(crate) fn xi_set(ledger: &ClusterSumLedger<'_>, points: &[usize], k: usize, nk: usize) -> f64 {
    let m = points.len() as f64;
    let nk = nk as f64;
    let cache = ledger.cache();
    let cross: f64 = points.iter().map(|&s| ledger.sum(s, k)).sum();
    let mut inner = 0.0;
    for (a, &s) in points.iter().enumerate() {
        for &t in &points[a + 1..] {
            inner += cache.get(s, t);
        }
    }
    2.0 * cross / (m * nk) - 2.0 * inner / (m * m) - 2.0 * ledger.within(k) / (nk * nk)
}

/// `ξ(a, π_k)` for a single point.
#[inline]
pub(crate) fn xi_point(ledger: &ClusterSumLedger<'_>, i: usize, k: usize, nk: usize) -> f64 {
    let nk = nk as f64;
    2.0 * ledger.sum(i, k) / nk - 2.0 * ledger.within(k) / (nk * nk)
}

/// Cost of keeping a point set in its cluster (`E1`) and of joining each
/// other cluster (`E2` candidates, `None` for the source cluster).
#[derive(Debug, Clone, PartialEq)]
pub struct RelocationCosts {
    pub from: usize,
    pub stay: f64,
    pub join: Vec<Option<f64>>,
}

impl RelocationCosts {
    /// Cheapest target; ties resolve to the lowest cluster id.
    pub fn best_target(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (k, cost) in self.join.iter().enumerate() {
            if let Some(c) = *cost {
                if best.is_none_or(|(_, b)| c < b) {
                    best = Some((k, c));
                }
            }
        }
        best
    }
}

fn check_point_set(points: &[usize], partition: &Partition) -> Result<usize> {
    let Some(&first) = points.first() else {
        return Err(invalid("empty point set"));
    };
    let n = partition.len();
    let mut seen = std::collections::HashSet::with_capacity(points.len());
    for &i in points {
        if i >= n {
            return Err(invalid(format!("point {i} out of range 0..{n}")));
        }
        if !seen.insert(i) {
            return Err(invalid(format!("point {i} repeated")));
        }
    }
    let from = partition.label(first);
    if points.iter().any(|&i| partition.label(i) != from) {
        return Err(invalid("points do not share a cluster"));
    }
    if points.len() >= partition.size(from) {
        return Err(Error::RejectedMove(format!(
            "moving {} points would empty cluster {from} of size {}",
            points.len(),
            partition.size(from)
        )));
    }
    Ok(from)
}

/// `E1` and every `E2` candidate for moving `points` together.
pub fn relocation_costs(
    points: &[usize],
    partition: &Partition,
    ledger: &ClusterSumLedger<'_>,
) -> Result<RelocationCosts> {
    let from = check_point_set(points, partition)?;
    let m = points.len();
    let n1 = partition.size(from);
    let stay = stay_weight(m, n1) * xi_set(ledger, points, from, n1);
    let join = (0..partition.k())
        .map(|k| {
            (k != from).then(|| {
                let nk = partition.size(k);
                join_weight(m, nk) * xi_set(ledger, points, k, nk)
            })
        })
        .collect();
    Ok(RelocationCosts { from, stay, join })
}

/// Exact change `W(P) - W(P')` when point `i` moves from `from` to `to`.
/// Positive means the move lowers `W`.
pub fn first_variation_delta(
    i: usize,
    from: usize,
    to: usize,
    partition: &Partition,
    ledger: &ClusterSumLedger<'_>,
) -> Result<f64> {
    mth_variation_delta(&[i], from, to, partition, ledger)
}

/// Exact change `W(P) - W(P^(m))` when the point set moves from `from` to `to`.
pub fn mth_variation_delta(
    points: &[usize],
    from: usize,
    to: usize,
    partition: &Partition,
    ledger: &ClusterSumLedger<'_>,
) -> Result<f64> {
    if from >= partition.k() || to >= partition.k() {
        return Err(invalid("cluster id out of range"));
    }
    if from == to {
        return Err(Error::RejectedMove("source and target cluster coincide".into()));
    }
    if let Some(&i) = points.iter().find(|&&i| i < partition.len() && partition.label(i) != from) {
        return Err(invalid(format!("point {i} is not in cluster {from}")));
    }
    let costs = relocation_costs(points, partition, ledger)?;
    Ok(costs.stay - costs.join[to].expect("target differs from source"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{disco, DistanceCache};

    fn w(values: &[f64], labels: Vec<usize>, k: usize) -> f64 {
        let cache = DistanceCache::build(&DataMatrix::from_column(values).unwrap(), Alpha::ONE);
        disco(&Partition::from_labels(labels, k).unwrap(), &cache)
            .unwrap()
            .within
    }

    #[test]
    fn bad_move_has_negative_delta() {
        let values = [0.0, 0.1, 10.0];
        let cache = DistanceCache::build(&DataMatrix::from_column(&values).unwrap(), Alpha::ONE);
        let p = Partition::from_labels(vec![0, 0, 1], 2).unwrap();
        let ledger = ClusterSumLedger::build(&p, &cache).unwrap();
        let delta = first_variation_delta(1, 0, 1, &p, &ledger).unwrap();
        let oracle = w(&values, vec![0, 0, 1], 2) - w(&values, vec![0, 1, 1], 2);
        assert!(delta < 0.0);
        assert!((delta - oracle).abs() <= 1e-12 * oracle.abs());
    }

    #[test]
    fn delta_rejects_singleton_source() {
        let cache = DistanceCache::build(&DataMatrix::from_column(&[0.0, 1.0, 2.0]).unwrap(), Alpha::ONE);
        let p = Partition::from_labels(vec![0, 1, 1], 2).unwrap();
        let ledger = ClusterSumLedger::build(&p, &cache).unwrap();
        assert!(matches!(
            first_variation_delta(0, 0, 1, &p, &ledger),
            Err(Error::RejectedMove(_))
        ));
        assert!(matches!(
            mth_variation_delta(&[1, 2], 1, 0, &p, &ledger),
            Err(Error::RejectedMove(_))
        ));
        assert!(first_variation_delta(1, 0, 1, &p, &ledger).is_err());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("first".parse::<Mode>().unwrap(), Mode::FirstVariation);
        assert_eq!("second".parse::<Mode>().unwrap(), Mode::SecondVariation);
        assert_eq!("kmeans".parse::<Mode>().unwrap(), Mode::KMeansAlpha2);
        assert!("lloyd".parse::<Mode>().is_err());
    }

    #[test]
    fn config_validation() {
        let cfg = FitConfig::new(3, Alpha::ONE, Mode::FirstVariation);
        assert!(cfg.validate(2).is_err());
        assert!(cfg.validate(3).is_ok());
        assert!(cfg.clone().with_restarts(0).validate(10).is_err());
        assert!(cfg.with_max_passes(0).validate(10).is_err());
    }
}
