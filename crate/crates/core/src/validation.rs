//! External cluster-validity indices: Diag, Kappa, Rand and corrected Rand.
//!
//! All four are computed from a [`ContingencyTable`]. Diag and Kappa need a
//! correspondence between the two label sets; it is taken to be the
//! one-to-one matching that maximizes the matched diagonal mass, solved
//! exactly by [`max_weight_assignment`].

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Cross-tabulation of two labelings of the same `n` observations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    cells: Vec<u64>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    n: u64,
}

fn compact(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut distinct = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    let mapped = labels
        .iter()
        .map(|l| distinct.binary_search(l).expect("label present"))
        .collect();
    (mapped, distinct.len())
}

impl ContingencyTable {
    /// Rows follow the sorted distinct values of `a`, columns those of `b`.
    pub fn from_labels(a: &[usize], b: &[usize]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                actual: b.len(),
            });
        }
        let (a, rows) = compact(a);
        let (b, cols) = compact(b);
        let mut cells = vec![0u64; rows * cols];
        for (&i, &j) in a.iter().zip(&b) {
            cells[i * cols + j] += 1;
        }
        Ok(Self::assemble(rows, cols, cells))
    }

    /// Table from explicit counts (`cells[r][c]`).
    pub fn from_cells(cells: &[Vec<u64>]) -> Result<Self> {
        let rows = cells.len();
        let cols = cells.first().map_or(0, Vec::len);
        if cells.iter().any(|r| r.len() != cols) {
            return Err(invalid("ragged contingency table"));
        }
        Ok(Self::assemble(rows, cols, cells.concat()))
    }

    fn assemble(rows: usize, cols: usize, cells: Vec<u64>) -> Self {
        let mut row_sums = vec![0u64; rows];
        let mut col_sums = vec![0u64; cols];
        for r in 0..rows {
            for c in 0..cols {
                let v = cells[r * cols + c];
                row_sums[r] += v;
                col_sums[c] += v;
            }
        }
        let n = row_sums.iter().sum();
        Self {
            rows,
            cols,
            cells,
            row_sums,
            col_sums,
            n,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn cell(&self, r: usize, c: usize) -> u64 {
        self.cells[r * self.cols + c]
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    /// Both labelings induce the same set partition.
    pub fn is_same_grouping(&self) -> bool {
        let nonzero_per_row = (0..self.rows)
            .all(|r| (0..self.cols).filter(|&c| self.cell(r, c) > 0).count() <= 1);
        let nonzero_per_col = (0..self.cols)
            .all(|c| (0..self.rows).filter(|&r| self.cell(r, c) > 0).count() <= 1);
        nonzero_per_row && nonzero_per_col
    }

    fn pair_counts(&self) -> Result<PairCounts> {
        if self.n < 2 {
            return Err(invalid(format!("pair-counting indices need n >= 2, got {}", self.n)));
        }
        Ok(PairCounts {
            joint: self.cells.iter().map(|&v| choose2(v)).sum(),
            rows: self.row_sums.iter().map(|&v| choose2(v)).sum(),
            cols: self.col_sums.iter().map(|&v| choose2(v)).sum(),
            total: choose2(self.n),
        })
    }

    /// Square weight matrix of side `max(rows, cols)`, zero-padded.
    fn padded(&self) -> Vec<Vec<u64>> {
        let side = self.rows.max(self.cols);
        (0..side)
            .map(|r| {
                (0..side)
                    .map(|c| {
                        if r < self.rows && c < self.cols {
                            self.cell(r, c)
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

struct PairCounts {
    /// pairs together in both labelings
    joint: u128,
    rows: u128,
    cols: u128,
    total: u128,
}

#[inline]
fn choose2(v: u64) -> u128 {
    let v = v as u128;
    v * v.saturating_sub(1) / 2
}

/// Fraction of the `C(n, 2)` pairs on which the two labelings agree.
pub fn rand_index(table: &ContingencyTable) -> Result<f64> {
    let p = table.pair_counts()?;
    let agreements = p.total + 2 * p.joint - p.rows - p.cols;
    Ok(agreements as f64 / p.total as f64)
}

/// Hubert–Arabie adjusted Rand index.
///
/// When the denominator vanishes (both labelings are a single cluster, or
/// both are all singletons) the value is 1 for identical groupings and 0
/// otherwise.
pub fn adjusted_rand(table: &ContingencyTable) -> Result<f64> {
    let p = table.pair_counts()?;
    // (joint - rows·cols/total) / ((rows + cols)/2 - rows·cols/total), scaled
    // by 2·total so that the only rounding is the final division
    let (joint, rows, cols, total) = (p.joint as i128, p.rows as i128, p.cols as i128, p.total as i128);
    let num = 2 * (joint * total - rows * cols);
    let denom = (rows + cols) * total - 2 * rows * cols;
    if denom == 0 {
        return Ok(if table.is_same_grouping() { 1.0 } else { 0.0 });
    }
    Ok(num as f64 / denom as f64)
}

/// Row-to-column matching that maximizes the total matched weight.
///
/// `weights` must be square; the result maps each row to its column.
/// Shortest-augmenting-path Hungarian method with potentials, `O(s³)`.
pub fn max_weight_assignment(weights: &[Vec<u64>]) -> Vec<usize> {
    let s = weights.len();
    if s == 0 {
        return Vec::new();
    }
    let top = weights.iter().flatten().copied().max().unwrap_or(0) as i128;
    let cost = |r: usize, c: usize| top - weights[r][c] as i128;

    // 1-based arrays; index 0 is the virtual source column.
    let inf = i128::MAX / 4;
    let mut u = vec![0i128; s + 1];
    let mut v = vec![0i128; s + 1];
    let mut owner = vec![0usize; s + 1];
    let mut way = vec![0usize; s + 1];
    for row in 1..=s {
        owner[0] = row;
        let mut col0 = 0usize;
        let mut minv = vec![inf; s + 1];
        let mut used = vec![false; s + 1];
        loop {
            used[col0] = true;
            let r0 = owner[col0];
            let mut delta = inf;
            let mut col1 = 0usize;
            for c in 1..=s {
                if !used[c] {
                    let cur = cost(r0 - 1, c - 1) - u[r0] - v[c];
                    if cur < minv[c] {
                        minv[c] = cur;
                        way[c] = col0;
                    }
                    if minv[c] < delta {
                        delta = minv[c];
                        col1 = c;
                    }
                }
            }
            for c in 0..=s {
                if used[c] {
                    u[owner[c]] += delta;
                    v[c] -= delta;
                } else {
                    minv[c] -= delta;
                }
            }
            col0 = col1;
            if owner[col0] == 0 {
                break;
            }
        }
        loop {
            let col1 = way[col0];
            owner[col0] = owner[col1];
            col0 = col1;
            if col0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; s];
    for c in 1..=s {
        assignment[owner[c] - 1] = c - 1;
    }
    assignment
}

struct Matched {
    diagonal: u64,
    chance: u128,
}

/// Maximizes the matched diagonal; among equally good matchings picks the
/// one with the least chance agreement `Σ row·col`, which makes the result
/// independent of how either side is labelled.
fn matched(table: &ContingencyTable) -> Matched {
    let cells = table.padded();
    let marginal = |r: usize, c: usize| {
        if r < table.rows && c < table.cols {
            table.row_sums[r] as u128 * table.col_sums[c] as u128
        } else {
            0
        }
    };
    // one diagonal unit outweighs any possible difference in chance mass
    let n2 = table.n as u128 * table.n as u128;
    let combined: Option<Vec<Vec<u64>>> = cells
        .iter()
        .enumerate()
        .map(|(r, row)| {
            row.iter()
                .enumerate()
                .map(|(c, &v)| u64::try_from(v as u128 * (n2 + 1) + n2 - marginal(r, c)).ok())
                .collect()
        })
        .collect();
    let assignment = max_weight_assignment(combined.as_deref().unwrap_or(&cells));
    let diagonal = assignment.iter().enumerate().map(|(r, &c)| cells[r][c]).sum();
    let chance = assignment
        .iter()
        .enumerate()
        .filter(|&(r, &c)| r < table.rows && c < table.cols)
        .map(|(r, &c)| table.row_sums[r] as u128 * table.col_sums[c] as u128)
        .sum();
    Matched { diagonal, chance }
}

/// Proportion of observations on the diagonal after optimal label matching.
pub fn diag_index(table: &ContingencyTable) -> Result<f64> {
    if table.n == 0 {
        return Err(invalid("empty contingency table"));
    }
    Ok(matched(table).diagonal as f64 / table.n as f64)
}

/// Cohen's kappa on the optimally matched table. When several matchings
/// reach the same diagonal, the one with the smallest chance agreement is
/// used.
///
/// If the chance agreement equals 1 the value is 1 when observed agreement is
/// also 1 and 0 otherwise.
pub fn kappa_index(table: &ContingencyTable) -> Result<f64> {
    if table.n == 0 {
        return Err(invalid("empty contingency table"));
    }
    let m = matched(table);
    let n = table.n as u128;
    if m.chance == n * n {
        return Ok(if m.diagonal as u128 == n { 1.0 } else { 0.0 });
    }
    let nf = table.n as f64;
    let observed = m.diagonal as f64 / nf;
    let chance = m.chance as f64 / (nf * nf);
    Ok((observed - chance) / (1.0 - chance))
}

/// The four external indices for one comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub diag: f64,
    pub kappa: f64,
    pub rand: f64,
    pub crand: f64,
}

impl IndexReport {
    pub fn from_table(table: &ContingencyTable) -> Result<Self> {
        Ok(Self {
            diag: diag_index(table)?,
            kappa: kappa_index(table)?,
            rand: rand_index(table)?,
            crand: adjusted_rand(table)?,
        })
    }

    /// Scores `found` against `truth`.
    pub fn compare(truth: &[usize], found: &[usize]) -> Result<Self> {
        Self::from_table(&ContingencyTable::from_labels(truth, found)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(a: &[usize], b: &[usize]) -> ContingencyTable {
        ContingencyTable::from_labels(a, b).unwrap()
    }

    #[test]
    fn contingency_examples() {
        let t = table(&[1, 1, 2, 2], &[1, 2, 1, 2]);
        assert_eq!((t.rows(), t.cols()), (2, 2));
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(t.cell(r, c), 1);
            }
        }
        let t = table(&[0, 0, 1, 2, 2, 2], &[0, 0, 1, 2, 2, 2]);
        assert_eq!(t.cell(0, 0), 2);
        assert_eq!(t.cell(1, 1), 1);
        assert_eq!(t.cell(2, 2), 3);
        assert_eq!(t.cell(0, 2), 0);
        assert_eq!(t.n(), 6);
        assert!(ContingencyTable::from_labels(&[0, 1], &[0]).is_err());
    }

    #[test]
    fn rand_examples() {
        assert_eq!(rand_index(&table(&[0, 0, 1, 1], &[0, 0, 1, 1])).unwrap(), 1.0);
        let r = rand_index(&table(&[1, 1, 2, 2], &[1, 2, 1, 2])).unwrap();
        assert!((r - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(rand_index(&table(&[0, 1, 2, 3], &[0, 0, 0, 0])).unwrap(), 0.0);
        assert!(rand_index(&table(&[0], &[0])).is_err());
    }

    #[test]
    fn adjusted_rand_examples() {
        assert_eq!(adjusted_rand(&table(&[0, 0, 1, 1], &[5, 5, 3, 3])).unwrap(), 1.0);
        // pairs: together/together 0, together/apart 2, apart/together 2,
        // apart/apart 2 -> 2(0·2 - 2·2) / (2·4 + 2·4) = -1/2
        let a = adjusted_rand(&table(&[1, 1, 2, 2], &[1, 2, 1, 2])).unwrap();
        assert!((a + 0.5).abs() < 1e-15);
        // degenerate: both single-cluster
        assert_eq!(adjusted_rand(&table(&[0, 0, 0], &[4, 4, 4])).unwrap(), 1.0);
        // degenerate: both all-singletons
        assert_eq!(adjusted_rand(&table(&[0, 1, 2], &[2, 0, 1])).unwrap(), 1.0);
    }

    #[test]
    fn diag_and_kappa_examples() {
        let same = table(&[0, 0, 1, 2], &[0, 0, 1, 2]);
        assert_eq!(diag_index(&same).unwrap(), 1.0);
        assert_eq!(kappa_index(&same).unwrap(), 1.0);

        let swapped = table(&[1, 1, 2, 2], &[2, 2, 1, 1]);
        assert_eq!(diag_index(&swapped).unwrap(), 1.0);
        assert_eq!(kappa_index(&swapped).unwrap(), 1.0);

        let crossed = table(&[1, 1, 2, 2], &[1, 2, 1, 2]);
        assert_eq!(diag_index(&crossed).unwrap(), 0.5);
        assert_eq!(kappa_index(&crossed).unwrap(), 0.0);
    }

    #[test]
    fn kappa_single_cluster_each() {
        let t = table(&[0, 0, 0], &[1, 1, 1]);
        assert_eq!(kappa_index(&t).unwrap(), 1.0);
    }

    #[test]
    fn rectangular_tables_are_padded() {
        // 3 true classes, 2 found clusters
        let t = table(&[0, 0, 1, 1, 2, 2], &[0, 0, 1, 1, 1, 1]);
        assert!((diag_index(&t).unwrap() - 4.0 / 6.0).abs() < 1e-15);
        let k = kappa_index(&t).unwrap();
        assert!(k > 0.0 && k < 1.0);
    }

    #[test]
    fn assignment_prefers_off_diagonal_when_heavier() {
        let w = vec![vec![1, 9, 0], vec![8, 1, 0], vec![0, 0, 5]];
        assert_eq!(max_weight_assignment(&w), vec![1, 0, 2]);
    }

    #[test]
    fn identical_partitions_report_ones() {
        let labels = [0, 1, 1, 2, 2, 2, 0];
        let r = IndexReport::compare(&labels, &labels).unwrap();
        assert_eq!(r, IndexReport { diag: 1.0, kappa: 1.0, rand: 1.0, crand: 1.0 });
    }
}
