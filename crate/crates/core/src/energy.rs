//! Energy-distance primitives.
//!
//! Everything here is expressed against a [`DistanceCache`]: the α-powered
//! Euclidean distances are computed once per data set, and the dispersion,
//! two-sample statistics and the total/within/between decomposition all read
//! from the same matrix so that the solver and the diagnostics share one
//! numeric path.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::partition::Partition;
use crate::sum::CompensatedSum;

/// Exponent applied to Euclidean distances, restricted to `(0, 2]`.
///
/// `α = 2` is admitted so that the k-means objective is reachable as a
/// special case; for `α < 2` the energy distance characterizes equality of
/// distributions.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub const ONE: Alpha = Alpha(1.0);
    pub const TWO: Alpha = Alpha(2.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value <= 2.0 {
            Ok(Alpha(value))
        } else {
            Err(invalid(format!("alpha must lie in (0, 2], got {value}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Raises a plain distance to the power α.
    #[inline]
    pub fn powered(self, distance: f64) -> f64 {
        if distance == 0.0 {
            0.0
        } else if self.0 == 1.0 {
            distance
        } else {
            (self.0 * distance.ln()).exp()
        }
    }

    /// `|x - y|^α` given the squared Euclidean distance `|x - y|²`.
    ///
    /// α = 1 and α = 2 take exact shortcuts; all other exponents go through
    /// `exp((α/2)·ln s)` with `s = 0` mapped to zero.
    #[inline]
    pub fn powered_from_squared(self, squared: f64) -> f64 {
        if squared == 0.0 {
            0.0
        } else if self.0 == 2.0 {
            squared
        } else if self.0 == 1.0 {
            squared.sqrt()
        } else {
            (0.5 * self.0 * squared.ln()).exp()
        }
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Alpha::new(value)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

impl std::fmt::Display for Alpha {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `n` observations of `p` real features, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(invalid(format!(
                "data matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "non-finite value at row {}, column {}",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, values)
    }

    /// One-dimensional data, one observation per value.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::new(values.len(), 1, values.to_vec())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Keeps only the listed rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            if i >= self.rows {
                return Err(invalid(format!("row {i} out of range 0..{}", self.rows)));
            }
            values.extend_from_slice(self.row(i));
        }
        Self::new(indices.len(), self.cols, values)
    }
}

#[inline]
fn squared_euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `|x - y|^α` for two coordinate vectors.
pub fn alpha_distance(x: &[f64], y: &[f64], alpha: Alpha) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(alpha.powered_from_squared(squared_euclidean(x, y)))
}

/// Dense symmetric matrix of `|x_i - x_j|^α` with a zero diagonal.
#[derive(Debug, Clone)]
pub struct DistanceCache {
    n: usize,
    alpha: Alpha,
    dist: Vec<f64>,
}

impl DistanceCache {
    /// Computes all pairwise α-powered distances. Rows are filled in parallel.
    pub fn build(data: &DataMatrix, alpha: Alpha) -> Self {
        let n = data.nrows();
        let mut dist = vec![0.0; n * n];
        dist.par_chunks_mut(n).enumerate().for_each(|(i, out)| {
            let xi = data.row(i);
            for (j, slot) in out.iter_mut().enumerate() {
                if i != j {
                    *slot = alpha.powered_from_squared(squared_euclidean(xi, data.row(j)));
                }
            }
        });
        Self { n, alpha, dist }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    /// Cache restricted to `indices`; entry `(a, b)` of the result is
    /// entry `(indices[a], indices[b])` of `self`.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let m = indices.len();
        let mut dist = Vec::with_capacity(m * m);
        for &i in indices {
            let row = self.row(i);
            dist.extend(indices.iter().map(|&j| row[j]));
        }
        Self {
            n: m,
            alpha: self.alpha,
            dist,
        }
    }

    /// `Σ_{a∈A} Σ_{b∈B} |x_a - x_b|^α`, compensated.
    pub(crate) fn cross_sum(&self, a: &[usize], b: &[usize]) -> f64 {
        let mut acc = CompensatedSum::new();
        for &i in a {
            let row = self.row(i);
            for &j in b {
                acc.add(row[j]);
            }
        }
        acc.value()
    }
}

fn check_index_set(set: &[usize], n: usize, name: &str) -> Result<()> {
    if set.is_empty() {
        return Err(invalid(format!("index set {name} is empty")));
    }
    let mut seen = vec![false; n];
    for &i in set {
        if i >= n {
            return Err(invalid(format!("index {i} in {name} out of range 0..{n}")));
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(invalid(format!("index {i} repeated in {name}")));
        }
    }
    Ok(())
}

fn check_disjoint(a: &[usize], b: &[usize], n: usize) -> Result<()> {
    let mut in_a = vec![false; n];
    for &i in a {
        in_a[i] = true;
    }
    match b.iter().find(|&&j| in_a[j]) {
        Some(j) => Err(invalid(format!("index sets overlap at {j}"))),
        None => Ok(()),
    }
}

/// Mean pairwise α-distance between two index sets,
/// `G(A, B) = (1 / |A||B|) Σ_a Σ_b |x_a - x_b|^α`.
pub fn dispersion_g(a: &[usize], b: &[usize], cache: &DistanceCache) -> Result<f64> {
    check_index_set(a, cache.n(), "A")?;
    check_index_set(b, cache.n(), "B")?;
    Ok(cache.cross_sum(a, b) / (a.len() as f64 * b.len() as f64))
}

/// Two-sample energy statistic `2G(A,B) - G(A,A) - G(B,B)` for disjoint sets.
pub fn two_sample_xi(a: &[usize], b: &[usize], cache: &DistanceCache) -> Result<f64> {
    check_index_set(a, cache.n(), "A")?;
    check_index_set(b, cache.n(), "B")?;
    check_disjoint(a, b, cache.n())?;
    // fixed evaluation order makes the statistic exactly symmetric
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let ab = cache.cross_sum(a, b) / (na * nb);
    let aa = cache.cross_sum(a, a) / (na * na);
    let bb = cache.cross_sum(b, b) / (nb * nb);
    Ok(2.0 * ab - aa - bb)
}

/// Size-weighted statistic `(|A||B| / (|A|+|B|)) · ξ(A, B)`.
pub fn weighted_statistic(a: &[usize], b: &[usize], cache: &DistanceCache) -> Result<f64> {
    let xi = two_sample_xi(a, b, cache)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    Ok(na * nb / (na + nb) * xi)
}

/// Total, within-cluster and between-cluster dispersion of a partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disco {
    pub total: f64,
    pub within: f64,
    pub between: f64,
}

/// Decomposes the total dispersion `T = (N/2) G(D, D)` into the within
/// component `W = Σ_j (n_j/2) G(π_j, π_j)` and the between component
/// `B = Σ_{i<j} (n_i n_j / 2N) (2G(π_i,π_j) - G(π_i,π_i) - G(π_j,π_j))`.
///
/// Each of the three is evaluated from its own formula; `B` is not derived
/// as `T - W`.
pub fn disco(partition: &Partition, cache: &DistanceCache) -> Result<Disco> {
    let n = cache.n();
    if partition.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: partition.len(),
        });
    }
    let k = partition.k();
    if let Some(empty) = partition.sizes().iter().position(|&s| s == 0) {
        return Err(invalid(format!("cluster {empty} is empty")));
    }
    let labels = partition.labels();
    let mut total = CompensatedSum::new();
    let mut pair = vec![CompensatedSum::new(); k * k];
    for i in 0..n {
        let row = cache.row(i);
        let li = labels[i];
        for (j, &d) in row.iter().enumerate() {
            total.add(d);
            pair[li * k + labels[j]].add(d);
        }
    }
    let sizes: Vec<f64> = partition.sizes().iter().map(|&s| s as f64).collect();
    let g = |a: usize, b: usize| pair[a * k + b].value() / (sizes[a] * sizes[b]);
    let nf = n as f64;

    let total = total.value() / (2.0 * nf);
    let within = (0..k)
        .map(|j| 0.5 * sizes[j] * g(j, j))
        .collect::<CompensatedSum>()
        .value();
    let mut between = CompensatedSum::new();
    for i in 0..k {
        for j in i + 1..k {
            let xi = 2.0 * g(i, j) - g(i, i) - g(j, j);
            between.add(sizes[i] * sizes[j] / (2.0 * nf) * xi);
        }
    }
    Ok(Disco {
        total,
        within,
        between: between.value(),
    })
}
