//! Direct-summation oracles shared by the integration tests. Nothing here
//! goes through the distance cache or the ledger.
#![allow(dead_code)]

use proptest::prelude::*;

pub fn dist(x: &[f64], y: &[f64], alpha: f64) -> f64 {
    let d = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if d == 0.0 {
        0.0
    } else {
        d.powf(alpha)
    }
}

/// `Σ_j (n_j / 2) · mean_{a,b ∈ π_j} |a - b|^α`
pub fn within(rows: &[Vec<f64>], labels: &[usize], alpha: f64) -> f64 {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut total = 0.0;
    for c in 0..k {
        let members: Vec<&Vec<f64>> = rows.iter().zip(labels).filter(|(_, &l)| l == c).map(|(r, _)| r).collect();
        let n = members.len() as f64;
        if n == 0.0 {
            continue;
        }
        let s: f64 = members.iter().flat_map(|a| members.iter().map(move |b| dist(a, b, alpha))).sum();
        total += 0.5 * s / n;
    }
    total
}

/// `Σ_k Σ_{x ∈ π_k} |x - c_k|²`
pub fn sum_of_squares(rows: &[Vec<f64>], labels: &[usize]) -> f64 {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let p = rows[0].len();
    let mut total = 0.0;
    for c in 0..k {
        let members: Vec<&Vec<f64>> = rows.iter().zip(labels).filter(|(_, &l)| l == c).map(|(r, _)| r).collect();
        let centroid: Vec<f64> = (0..p)
            .map(|j| members.iter().map(|r| r[j]).sum::<f64>() / members.len() as f64)
            .collect();
        total += members.iter().map(|r| dist(r, &centroid, 2.0)).sum::<f64>();
    }
    total
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Rows with `p` coordinates each, plus labels in `0..k` that use every id.
pub fn clustered(
    n: std::ops::Range<usize>,
    p: std::ops::Range<usize>,
    k: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<usize>, usize)> {
    (n, p, k).prop_flat_map(|(n, p, k)| {
        let k = k.min(n);
        (
            prop::collection::vec(prop::collection::vec(-5.0..5.0f64, p), n),
            prop::collection::vec(0..k, n - k),
            Just(k),
        )
            .prop_map(|(rows, mut labels, k)| {
                // first k points seed every cluster
                let mut all: Vec<usize> = (0..k).collect();
                all.append(&mut labels);
                (rows, all, k)
            })
    })
}

pub fn alphas() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.5, 1.0, 1.5, 2.0])
}
