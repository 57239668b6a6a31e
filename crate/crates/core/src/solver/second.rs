//! k-groups by second variation: points are paired once, then pairs are
//! relocated as units.

use rand::Rng;

use crate::energy::{DataMatrix, DistanceCache};
use crate::error::{invalid, Error, Result};
use crate::partition::{move_points, random_partition_with, ClusterSumLedger, Partition};

use super::{
    best_of_restarts, join_weight, restart_rng, stay_weight, xi_set, FitConfig, FitResult,
    Relocation, Run,
};

/// Greedy global matching: repeatedly pair the two unpaired points at the
/// smallest cached distance (ties by index). With an odd count the last
/// point stays unpaired.
pub fn greedy_pairs(cache: &DistanceCache) -> Vec<(usize, usize)> {
    let n = cache.n();
    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        let row = cache.row(i);
        for (j, &d) in row.iter().enumerate().skip(i + 1) {
            candidates.push((d, i, j));
        }
    }
    candidates.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut paired = vec![false; n];
    let mut pairs = Vec::with_capacity(n / 2);
    for (_, i, j) in candidates {
        if !paired[i] && !paired[j] {
            paired[i] = true;
            paired[j] = true;
            pairs.push((i, j));
            if pairs.len() == n / 2 {
                break;
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Pair-relocation search. Every pair must start inside a single cluster.
/// Cycles through `pairs` in order; a pair leaves its cluster (size `n₁`)
/// when `n₁/(n₁-2)·ξ(pair, π₁)` strictly exceeds the best
/// `n_k/(n_k+2)·ξ(pair, π_k)`. Stops after a full cycle without a move or
/// `max_passes` cycles.
pub fn refine_second_variation(
    mut partition: Partition,
    pairs: &[(usize, usize)],
    cache: &DistanceCache,
    max_passes: usize,
    record_trace: bool,
) -> Result<Run> {
    if let Some(&(a, b)) = pairs.iter().find(|&&(a, b)| partition.label(a) != partition.label(b)) {
        return Err(invalid(format!("pair ({a}, {b}) is split across clusters")));
    }
    let k = partition.k();
    let n_pairs = pairs.len();
    if n_pairs == 0 {
        return Ok(Run {
            partition,
            passes: 0,
            moves: 0,
            converged: true,
            trace: Vec::new(),
        });
    }
    let mut ledger = ClusterSumLedger::build(&partition, cache)?;
    let mut trace = Vec::new();
    let (mut step, mut idle, mut moves) = (0usize, 0usize, 0usize);
    let mut moved_this_pass = false;
    let max_steps = max_passes.saturating_mul(n_pairs);

    while idle < n_pairs && step < max_steps {
        if step > 0 && step % n_pairs == 0 && moved_this_pass {
            ledger = ClusterSumLedger::build(&partition, cache)?;
            moved_this_pass = false;
        }
        let (a, b) = pairs[step % n_pairs];
        let visit = step;
        step += 1;

        let members = [a, b];
        let from = partition.label(a);
        let n1 = partition.size(from);
        if n1 < 3 {
            idle += 1;
            continue;
        }
        let stay = stay_weight(2, n1) * xi_set(&ledger, &members, from, n1);
        let mut best: Option<(usize, f64)> = None;
        for to in (0..k).filter(|&c| c != from) {
            let n2 = partition.size(to);
            let cost = join_weight(2, n2) * xi_set(&ledger, &members, to, n2);
            if best.is_none_or(|(_, c)| cost < c) {
                best = Some((to, cost));
            }
        }
        match best {
            Some((to, join)) if stay > join => {
                move_points(&mut partition, &mut ledger, &members, to)?;
                moves += 1;
                idle = 0;
                moved_this_pass = true;
                if record_trace {
                    trace.push(Relocation {
                        step: visit,
                        points: members.to_vec(),
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
        partition,
        passes: step.div_ceil(n_pairs),
        moves,
        converged: idle >= n_pairs,
        trace,
    })
}

/// One restart: optional held-out point (odd `n`), pairing, random pair
/// assignment, pair search, then the held-out point joins the cluster with
/// the smallest first-variation joining cost.
fn second_variation_run<R: Rng>(
    cache: &DistanceCache,
    cfg: &FitConfig,
    rng: &mut R,
) -> Result<Run> {
    let n = cache.n();
    let held_out = (n % 2 == 1).then(|| rng.gen_range(0..n));
    let kept: Vec<usize> = (0..n).filter(|&i| Some(i) != held_out).collect();
    let sub = match held_out {
        Some(_) => cache.subset(&kept),
        None => cache.clone(),
    };
    let pairs = greedy_pairs(&sub);
    if cfg.k > pairs.len() {
        return Err(invalid(format!(
            "K={} exceeds the number of pairs {}",
            cfg.k,
            pairs.len()
        )));
    }
    let pair_labels = random_partition_with(rng, pairs.len(), cfg.k)?;
    let mut labels = vec![0usize; sub.n()];
    for (p, &(a, b)) in pairs.iter().enumerate() {
        labels[a] = pair_labels.label(p);
        labels[b] = pair_labels.label(p);
    }
    let start = Partition::from_labels(labels, cfg.k)?;
    let mut run = refine_second_variation(start, &pairs, &sub, cfg.max_passes, cfg.record_trace)?;

    if let Some(h) = held_out {
        for r in &mut run.trace {
            for p in &mut r.points {
                *p = kept[*p];
            }
        }
        let ledger = ClusterSumLedger::build(&run.partition, &sub)?;
        let mut best: Option<(usize, f64)> = None;
        for c in 0..cfg.k {
            let members = run.partition.members(c);
            let nk = members.len();
            let to_h: f64 = members.iter().map(|&j| cache.get(h, kept[j])).sum();
            let nkf = nk as f64;
            let xi = 2.0 * to_h / nkf - 2.0 * ledger.within(c) / (nkf * nkf);
            let cost = join_weight(1, nk) * xi;
            if best.is_none_or(|(_, b)| cost < b) {
                best = Some((c, cost));
            }
        }
        let (target, _) = best.ok_or_else(|| Error::NumericInvariant("no cluster for held-out point".into()))?;
        let mut full = vec![target; n];
        for (j, &i) in kept.iter().enumerate() {
            full[i] = run.partition.label(j);
        }
        run.partition = Partition::from_labels(full, cfg.k)?;
    }
    Ok(run)
}

/// k-groups by second variation, best of `cfg.restarts` random starts.
pub fn fit_second_variation(data: &DataMatrix, cfg: &FitConfig) -> Result<FitResult> {
    let n = data.nrows();
    cfg.validate(n)?;
    let cache = DistanceCache::build(data, cfg.alpha);
    best_of_restarts(cfg, |r| {
        let mut rng = restart_rng(cfg.seed, r);
        let run = if n == cfg.k {
            // only the all-singletons partition exists
            let start = random_partition_with(&mut rng, n, cfg.k)?;
            Run {
                partition: start,
                passes: 0,
                moves: 0,
                converged: true,
                trace: Vec::new(),
            }
        } else {
            second_variation_run(&cache, cfg, &mut rng)?
        };
        let within = ClusterSumLedger::build(&run.partition, &cache)?.within_dispersion(&run.partition);
        Ok((run, within))
    })
}
