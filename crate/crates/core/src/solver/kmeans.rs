//! The α = 2 instance of first variation, scored through centroids.
//!
//! At α = 2, `(n/2)·G(π, π) = Σ|x - c|²` and `ξ(x, π)/2 = |x - c|²`, so the
//! first-variation costs become `E1 = n₁/(n₁-1)·|x - c₁|²` and
//! `E2 = n₂/(n₂+1)·|x - c₂|²`: the Hartigan–Wong transfer test.

use crate::energy::{Alpha, DataMatrix};
use crate::error::{invalid, Error, Result};
use crate::partition::{random_partition_with, Partition};
use crate::sum::CompensatedSum;

use super::{best_of_restarts, restart_rng, FitConfig, FitResult, Relocation, Run};

struct Centroids {
    p: usize,
    means: Vec<f64>,
}

impl Centroids {
    fn compute(data: &DataMatrix, partition: &Partition) -> Self {
        let p = data.ncols();
        let mut means = vec![0.0; partition.k() * p];
        for (row, &l) in data.rows().zip(partition.labels()) {
            for (m, &x) in means[l * p..(l + 1) * p].iter_mut().zip(row) {
                *m += x;
            }
        }
        for (k, &size) in partition.sizes().iter().enumerate() {
            for m in &mut means[k * p..(k + 1) * p] {
                *m /= size as f64;
            }
        }
        Self { p, means }
    }

    fn mean(&self, k: usize) -> &[f64] {
        &self.means[k * self.p..(k + 1) * self.p]
    }

    fn squared_distance(&self, x: &[f64], k: usize) -> f64 {
        x.iter().zip(self.mean(k)).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    /// Moves `x` out of `from` (size `n1` before) into `to` (size `n2` before).
    fn transfer(&mut self, x: &[f64], from: usize, n1: usize, to: usize, n2: usize) {
        let p = self.p;
        let (n1, n2) = (n1 as f64, n2 as f64);
        for (m, &v) in self.means[from * p..(from + 1) * p].iter_mut().zip(x) {
            *m = (n1 * *m - v) / (n1 - 1.0);
        }
        for (m, &v) in self.means[to * p..(to + 1) * p].iter_mut().zip(x) {
            *m = (n2 * *m + v) / (n2 + 1.0);
        }
    }
}

/// `Σ_k Σ_{x∈π_k} |x - c_k|²`, the α = 2 within dispersion.
pub fn within_sum_of_squares(data: &DataMatrix, partition: &Partition) -> Result<f64> {
    if data.nrows() != partition.len() {
        return Err(Error::DimensionMismatch {
            expected: data.nrows(),
            actual: partition.len(),
        });
    }
    let centroids = Centroids::compute(data, partition);
    Ok(data
        .rows()
        .zip(partition.labels())
        .map(|(x, &l)| centroids.squared_distance(x, l))
        .collect::<CompensatedSum>()
        .value())
}

/// Point-by-point transfer search with maintained centroids. Visit order,
/// acceptance rule and tie-breaking match [`super::refine_first_variation`].
pub fn refine_kmeans(
    mut partition: Partition,
    data: &DataMatrix,
    max_passes: usize,
    record_trace: bool,
) -> Result<Run> {
    let n = data.nrows();
    if partition.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: partition.len(),
        });
    }
    let k = partition.k();
    let mut centroids = Centroids::compute(data, &partition);
    let mut labels = partition.labels().to_vec();
    let mut sizes = partition.sizes().to_vec();
    let mut trace = Vec::new();
    let (mut step, mut idle, mut moves) = (0usize, 0usize, 0usize);
    let mut moved_this_pass = false;
    let max_steps = max_passes.saturating_mul(n);

    while idle < n && step < max_steps {
        if step > 0 && step % n == 0 && moved_this_pass {
            partition = Partition::from_labels(labels.clone(), k)?;
            centroids = Centroids::compute(data, &partition);
            moved_this_pass = false;
        }
        let i = step % n;
        let visit = step;
        step += 1;

        let from = labels[i];
        let n1 = sizes[from];
        if n1 < 2 {
            idle += 1;
            continue;
        }
        let x = data.row(i);
        let stay = n1 as f64 / (n1 - 1) as f64 * centroids.squared_distance(x, from);
        let mut best: Option<(usize, f64)> = None;
        for to in (0..k).filter(|&c| c != from) {
            let n2 = sizes[to];
            let cost = n2 as f64 / (n2 + 1) as f64 * centroids.squared_distance(x, to);
            if best.is_none_or(|(_, b)| cost < b) {
                best = Some((to, cost));
            }
        }
        match best {
            Some((to, join)) if stay > join => {
                centroids.transfer(x, from, n1, to, sizes[to]);
                labels[i] = to;
                sizes[from] -= 1;
                sizes[to] += 1;
                moves += 1;
                idle = 0;
                moved_this_pass = true;
                if record_trace {
                    trace.push(Relocation {
                        step: visit,
                        points: vec![i],
                        from,
                        to,
                        gain: stay - join,
                    });
                }
            }
            _ => idle += 1,
        }
    }

    Ok(Run {
        partition: Partition::from_labels(labels, k)?,
        passes: step.div_ceil(n),
        moves,
        converged: idle >= n,
        trace,
    })
}

/// k-means as k-groups at α = 2. `cfg.alpha` must be 2.
pub fn fit_kmeans_alpha2(data: &DataMatrix, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate(data.nrows())?;
    if cfg.alpha != Alpha::TWO {
        return Err(invalid(format!("k-means path requires alpha = 2, got {}", cfg.alpha)));
    }
    best_of_restarts(cfg, |r| {
        let mut rng = restart_rng(cfg.seed, r);
        let start = random_partition_with(&mut rng, data.nrows(), cfg.k)?;
        let run = refine_kmeans(start, data, cfg.max_passes, cfg.record_trace)?;
        let within = within_sum_of_squares(data, &run.partition)?;
        Ok((run, within))
    })
}
