use ndarray::{Array1, ArrayView2};
use rand::seq::index;
use rand::Rng;

use super::{check_rows, ConvexRecord, Provenance, SyntheticBatch};
use crate::error::{Error, Result};
use crate::neighbors::knn_table;

/// Convex-hull oversampling: a uniform minority seed plus `c` of its `k`
/// nearest neighbors chosen without replacement, combined with independent
/// `U[0, 1)` weights normalized to sum to one.
pub fn snocc_generate<R: Rng + ?Sized>(
    x_min: ArrayView2<'_, f64>,
    k: usize,
    c: usize,
    n: usize,
    rng: &mut R,
) -> Result<SyntheticBatch> {
    if c == 0 || c > k {
        return Err(Error::InvalidConfig(format!("need 1 <= c <= k, got c = {c}, k = {k}")));
    }
    check_rows(x_min, k + 1)?;
    let table = knn_table(x_min, k)?;
    let mut rows = Vec::with_capacity(n);
    let mut provenance = Vec::with_capacity(n);
    for _ in 0..n {
        let i = rng.random_range(0..x_min.nrows());
        let neighbors: Vec<usize> = index::sample(rng, k, c)
            .into_iter()
            .map(|p| table[i].indices[p])
            .collect();
        let weights = loop {
            let w: Vec<f64> = (0..=c).map(|_| rng.random::<f64>()).collect();
            // all-zero draw has probability 2^-53 per weight
            if w.iter().any(|v| *v > 0.0) {
                break w;
            }
        };
        let record = ConvexRecord::new(i, neighbors, weights);
        let mut sample = Array1::zeros(x_min.ncols());
        for (src, w) in record.sources().zip(&record.raw_weights) {
            sample.scaled_add(w / record.normalizer, &x_min.row(src));
        }
        rows.push(sample);
        provenance.push(Provenance::Convex(record));
    }
    Ok(SyntheticBatch::from_rows(x_min.ncols(), rows, provenance))
}
