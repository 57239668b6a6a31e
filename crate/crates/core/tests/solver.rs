mod common;

use common::{alphas, clustered, rel_close, sum_of_squares, within};
use kgroups::partition::random_partition;
use kgroups::solver::{
    first_variation_delta, fit, fit_first_variation, fit_kmeans_alpha2, greedy_pairs, mth_variation_delta,
    refine_first_variation, refine_second_variation, FitConfig, Mode, Relocation,
};
use kgroups::{disco, Alpha, ClusterSumLedger, DataMatrix, DistanceCache, Partition};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_rows(rng: &mut ChaCha8Rng, n: usize, p: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..p).map(|_| rng.gen_range(-4.0..4.0)).collect()).collect()
}

fn moved(labels: &[usize], points: &[usize], to: usize) -> Vec<usize> {
    let mut out = labels.to_vec();
    for &i in points {
        out[i] = to;
    }
    out
}

/// Applies `trace` to `start`, checking that each step lowers the direct
/// objective by the recorded gain. Returns the objective after each move.
fn replay(rows: &[Vec<f64>], alpha: f64, start: &Partition, trace: &[Relocation]) -> Vec<f64> {
    let mut labels = start.labels().to_vec();
    let mut w = within(rows, &labels, alpha);
    let mut path = vec![w];
    for r in trace {
        assert!(r.points.iter().all(|&i| labels[i] == r.from));
        assert!(r.gain > 0.0, "non-improving move recorded: {r:?}");
        labels = moved(&labels, &r.points, r.to);
        let next = within(rows, &labels, alpha);
        assert!(next < w, "objective rose from {w} to {next}");
        assert!(rel_close(w - next, r.gain, 1e-8), "gain {} vs decrease {}", r.gain, w - next);
        w = next;
        path.push(w);
    }
    path
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn delta_matches_recomputed_objective(
        (rows, labels, k) in clustered(4..25, 1..4, 2..=5),
        alpha in alphas(),
        m in 1usize..=3,
        pick in any::<u64>(),
    ) {
        let p = Partition::from_labels(labels.clone(), k).unwrap();
        let Some(from) = (0..k).find(|&c| p.size(c) > m) else { return Ok(()) };
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        let points: Vec<usize> = p.members(from).choose_multiple(&mut rng, m).copied().collect();
        let to = (from + rng.gen_range(1..k)) % k;

        let cache = DistanceCache::build(&DataMatrix::from_rows(&rows).unwrap(), Alpha::new(alpha).unwrap());
        let ledger = ClusterSumLedger::build(&p, &cache).unwrap();
        let oracle = within(&rows, &labels, alpha) - within(&rows, &moved(&labels, &points, to), alpha);
        let delta = mth_variation_delta(&points, from, to, &p, &ledger).unwrap();
        prop_assert!(rel_close(delta, oracle, 1e-9), "delta {} oracle {}", delta, oracle);
        if m == 1 {
            let first = first_variation_delta(points[0], from, to, &p, &ledger).unwrap();
            prop_assert!((first - delta).abs() <= 1e-12 * delta.abs().max(1.0));
        }
    }

    #[test]
    fn alpha2_delta_is_transfer_criterion(
        (rows, labels, k) in clustered(4..25, 1..4, 2..=4),
        pick in any::<u64>(),
    ) {
        let p = Partition::from_labels(labels.clone(), k).unwrap();
        let Some(from) = (0..k).find(|&c| p.size(c) > 1) else { return Ok(()) };
        let mut rng = ChaCha8Rng::seed_from_u64(pick);
        let i = *p.members(from).choose(&mut rng).unwrap();
        let to = (from + rng.gen_range(1..k)) % k;
        let centroid = |c: usize| -> Vec<f64> {
            let m = p.members(c);
            (0..rows[0].len()).map(|j| m.iter().map(|&r| rows[r][j]).sum::<f64>() / m.len() as f64).collect()
        };
        let d2 = |c: usize| common::dist(&rows[i], &centroid(c), 2.0);
        let (n1, n2) = (p.size(from) as f64, p.size(to) as f64);
        let oracle = n1 * d2(from) / (n1 - 1.0) - n2 * d2(to) / (n2 + 1.0);

        let cache = DistanceCache::build(&DataMatrix::from_rows(&rows).unwrap(), Alpha::TWO);
        let ledger = ClusterSumLedger::build(&p, &cache).unwrap();
        let delta = first_variation_delta(i, from, to, &p, &ledger).unwrap();
        prop_assert!(rel_close(delta, oracle, 1e-9));
    }
}

#[test]
fn first_variation_descends_and_terminates() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..40 {
        let n = rng.gen_range(6..40);
        let k = rng.gen_range(2..=4);
        let alpha = [0.5, 1.0, 1.5, 2.0][case % 4];
        let rows = random_rows(&mut rng, n, 2);
        let cache = DistanceCache::build(&DataMatrix::from_rows(&rows).unwrap(), Alpha::new(alpha).unwrap());
        let start = random_partition(n, k, case as u64).unwrap();
        let run = refine_first_variation(start.clone(), &cache, 50, true).unwrap();
        assert!(run.passes <= 50);
        assert_eq!(run.moves, run.trace.len());
        let path = replay(&rows, alpha, &start, &run.trace);
        assert!(rel_close(*path.last().unwrap(), within(&rows, run.partition.labels(), alpha), 1e-12));
    }
}

#[test]
fn second_variation_descends_with_pair_deltas() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..30 {
        let n = 2 * rng.gen_range(4..16);
        let alpha = [0.5, 1.0, 2.0][case % 3];
        let rows = random_rows(&mut rng, n, 2);
        let cache = DistanceCache::build(&DataMatrix::from_rows(&rows).unwrap(), Alpha::new(alpha).unwrap());
        let pairs = greedy_pairs(&cache);
        let pair_part = random_partition(pairs.len(), 2, case as u64).unwrap();
        let mut labels = vec![0; n];
        for (q, &(a, b)) in pairs.iter().enumerate() {
            labels[a] = pair_part.label(q);
            labels[b] = pair_part.label(q);
        }
        let start = Partition::from_labels(labels, 2).unwrap();
        let run = refine_second_variation(start.clone(), &pairs, &cache, 50, true).unwrap();
        replay(&rows, alpha, &start, &run.trace);

        // each recorded gain is the two-point delta at the state it was taken in
        let mut p = start;
        for r in &run.trace {
            let ledger = ClusterSumLedger::build(&p, &cache).unwrap();
            let delta = mth_variation_delta(&r.points, r.from, r.to, &p, &ledger).unwrap();
            assert!(rel_close(delta, r.gain, 1e-9));
            p = Partition::from_labels(moved(p.labels(), &r.points, r.to), 2).unwrap();
        }
    }
}

#[test]
fn kmeans_and_energy_at_alpha2_take_identical_moves() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for seed in 0..20u64 {
        let n = rng.gen_range(20..80);
        let k = rng.gen_range(2..=4);
        let data = DataMatrix::from_rows(&random_rows(&mut rng, n, 3)).unwrap();
        let energy = fit_first_variation(&data, &FitConfig::new(k, Alpha::TWO, Mode::FirstVariation).with_seed(seed).with_restarts(1).with_trace(true)).unwrap();
        let kmeans = fit_kmeans_alpha2(&data, &FitConfig::new(k, Alpha::TWO, Mode::KMeansAlpha2).with_seed(seed).with_restarts(1).with_trace(true)).unwrap();
        let key = |t: &[Relocation]| t.iter().map(|r| (r.step, r.points.clone(), r.from, r.to)).collect::<Vec<_>>();
        assert_eq!(key(&energy.trace), key(&kmeans.trace), "seed {seed}");
        for (a, b) in energy.trace.iter().zip(&kmeans.trace) {
            // ξ = 2D², so both searches predict the same decrease
            assert!(rel_close(a.gain, b.gain, 1e-8));
        }
        assert_eq!(energy.partition, kmeans.partition);
        assert!(rel_close(energy.within, kmeans.within, 1e-9));
        assert!(rel_close(kmeans.within, sum_of_squares(&(0..n).map(|i| data.row(i).to_vec()).collect::<Vec<_>>(), kmeans.partition.labels()), 1e-9));
    }
}

#[test]
fn restarts_are_reproducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let data = DataMatrix::from_rows(&random_rows(&mut rng, 61, 2)).unwrap();
    for mode in [Mode::FirstVariation, Mode::SecondVariation, Mode::KMeansAlpha2] {
        let alpha = if mode == Mode::KMeansAlpha2 { Alpha::TWO } else { Alpha::ONE };
        let cfg = FitConfig::new(3, alpha, mode).with_seed(99).with_restarts(6);
        let a = fit(&data, &cfg).unwrap();
        let b = fit(&data, &cfg).unwrap();
        assert_eq!(a, b);
        let bits = |r: &kgroups::solver::FitResult| r.per_restart_within.iter().map(|w| w.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(a.per_restart_within.len(), 6);
        assert!(a.per_restart_within.iter().all(|&w| w >= a.within));
    }
}

#[test]
fn reported_objective_matches_decomposition() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..12 {
        let n = rng.gen_range(10..50);
        let rows = random_rows(&mut rng, n, 2);
        let data = DataMatrix::from_rows(&rows).unwrap();
        let (mode, alpha) = [
            (Mode::FirstVariation, 0.5),
            (Mode::SecondVariation, 1.0),
            (Mode::KMeansAlpha2, 2.0),
        ][case % 3];
        let cfg = FitConfig::new(3, Alpha::new(alpha).unwrap(), mode).with_seed(case as u64).with_restarts(3);
        let fit = fit(&data, &cfg).unwrap();
        let cache = DistanceCache::build(&data, cfg.alpha);
        let d = disco(&fit.partition, &cache).unwrap();
        assert!((fit.within - d.within).abs() <= 1e-9 * d.within.max(1.0));
        assert!(fit.passes <= cfg.max_passes);
    }
}

#[test]
fn relabeled_start_follows_the_same_trajectory() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for case in 0..20 {
        let n = rng.gen_range(10..40);
        let k = 3;
        let rows = random_rows(&mut rng, n, 2);
        let cache = DistanceCache::build(&DataMatrix::from_rows(&rows).unwrap(), Alpha::ONE);
        let start = random_partition(n, k, case).unwrap();
        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(&mut rng);
        let a = refine_first_variation(start.clone(), &cache, 50, true).unwrap();
        let b = refine_first_variation(start.relabeled(&perm).unwrap(), &cache, 50, true).unwrap();
        let wa = replay(&rows, 1.0, &start, &a.trace);
        let wb = replay(&rows, 1.0, &start.relabeled(&perm).unwrap(), &b.trace);
        assert_eq!(wa.len(), wb.len());
        for (x, y) in wa.iter().zip(&wb) {
            assert!(rel_close(*x, *y, 1e-12));
        }
        assert_eq!(a.partition.relabeled(&perm).unwrap(), b.partition);
    }
}

#[test]
fn pass_cap_is_respected() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let rows = random_rows(&mut rng, 200, 2);
    let cache = DistanceCache::build(&DataMatrix::from_rows(&rows).unwrap(), Alpha::ONE);
    let run = refine_first_variation(random_partition(200, 5, 1).unwrap(), &cache, 1, false).unwrap();
    assert_eq!(run.passes, 1);
    assert!(!run.converged || run.moves == 0);
}
