use crate::energy::{DataMatrix, DistanceCache};
use crate::error::Result;
use crate::partition::{move_point, random_partition_with, ClusterSumLedger, Partition};

use super::{best_of_restarts, join_weight, restart_rng, stay_weight, xi_point, FitConfig, FitResult, Relocation, Run};

/// Cycles through the points in index order, moving each to the cluster
/// with the smallest joining cost `E2` whenever its staying cost `E1` is
/// strictly larger. Stops after `n` consecutive visits without a move or
/// after `max_passes · n` visits.
pub fn refine_first_variation(
    mut partition: Partition,
    cache: &DistanceCache,
    max_passes: usize,
    record_trace: bool,
) -> Result<Run> {
    let n = cache.n();
    let k = partition.k();
    let mut ledger = ClusterSumLedger::build(&partition, cache)?;
    let mut trace = Vec::new();
    let (mut step, mut idle, mut moves) = (0usize, 0usize, 0usize);
    let mut moved_this_pass = false;
    let max_steps = max_passes.saturating_mul(n);

    while idle < n && step < max_steps {
        if step > 0 && step % n == 0 && moved_this_pass {
            // bound drift from incremental updates
            ledger = ClusterSumLedger::build(&partition, cache)?;
            moved_this_pass = false;
        }
        let i = step % n;
        let visit = step;
        step += 1;

        let from = partition.label(i);
        let n1 = partition.size(from);
        if n1 < 2 {
            idle += 1;
            continue;
        }
        let stay = stay_weight(1, n1) * xi_point(&ledger, i, from, n1);
        let mut best: Option<(usize, f64)> = None;
        for to in (0..k).filter(|&c| c != from) {
            let n2 = partition.size(to);
            let cost = join_weight(1, n2) * xi_point(&ledger, i, to, n2);
            if best.is_none_or(|(_, b)| cost < b) {
                best = Some((to, cost));
            }
        }
        match best {
            Some((to, join)) if stay > join => {
                move_point(&mut partition, &mut ledger, i, to)?;
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
        partition,
        passes: step.div_ceil(n),
        moves,
        converged: idle >= n,
        trace,
    })
}

/// k-groups by first variation, best of `cfg.restarts` random starts.
pub fn fit_first_variation(data: &DataMatrix, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate(data.nrows())?;
    let cache = DistanceCache::build(data, cfg.alpha);
    best_of_restarts(cfg, |r| {
        let mut rng = restart_rng(cfg.seed, r);
        let start = random_partition_with(&mut rng, cache.n(), cfg.k)?;
        let run = refine_first_variation(start, &cache, cfg.max_passes, cfg.record_trace)?;
        let within = ClusterSumLedger::build(&run.partition, &cache)?.within_dispersion(&run.partition);
        Ok((run, within))
    })
}
