//! Exact brute-force Euclidean k-nearest-neighbor search.
//!
//! Distance ties are broken by ascending row index so results, and the
//! provenance of anything built on them, are fully deterministic.

use ndarray::{ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// Neighbors of one query row, nearest first. The query itself is excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    pub query_index: usize,
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
}

impl NeighborList {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(squared_distance(a, b).sqrt())
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn squared_distance_rows(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Sorts `(squared distance, index)` pairs and keeps the first `k`.
fn take_nearest(mut candidates: Vec<(f64, usize)>, k: usize) -> (Vec<usize>, Vec<f64>) {
    candidates.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    candidates.truncate(k);
    candidates
        .into_iter()
        .map(|(d2, i)| (i, d2.sqrt()))
        .unzip()
}

/// The `k` rows of `x` nearest to row `query_index`, excluding the query row.
pub fn k_nearest(x: ArrayView2<'_, f64>, query_index: usize, k: usize) -> Result<NeighborList> {
    let n = x.nrows();
    if k == 0 || k >= n || query_index >= n {
        return Err(Error::KOutOfRange { k, rows: n });
    }
    let q = x.row(query_index);
    let candidates = x
        .outer_iter()
        .enumerate()
        .filter(|(i, _)| *i != query_index)
        .map(|(i, r)| (squared_distance_rows(q, r), i))
        .collect();
    let (indices, distances) = take_nearest(candidates, k);
    Ok(NeighborList {
        query_index,
        indices,
        distances,
    })
}

/// Neighbor lists for every row of `x`.
pub fn knn_table(x: ArrayView2<'_, f64>, k: usize) -> Result<Vec<NeighborList>> {
    (0..x.nrows()).map(|i| k_nearest(x, i, k)).collect()
}

/// The `k` rows of `x` nearest to an arbitrary point. Used by the k-NN
/// classifier, where the query is not a member of the reference set.
pub fn nearest_to_point(x: ArrayView2<'_, f64>, point: &[f64], k: usize) -> Result<(Vec<usize>, Vec<f64>)> {
    if point.len() != x.ncols() {
        return Err(Error::LengthMismatch {
            left: point.len(),
            right: x.ncols(),
        });
    }
    if k == 0 || k > x.nrows() {
        return Err(Error::KOutOfRange {
            k,
            rows: x.nrows() + 1,
        });
    }
    let point = ArrayView1::from(point);
    let candidates = x
        .outer_iter()
        .enumerate()
        .map(|(i, r)| (squared_distance_rows(point, r), i))
        .collect();
    Ok(take_nearest(candidates, k))
}
