use ndarray::{Array1, ArrayView1, ArrayView2};
use rand::Rng;

use super::{check_rows, ConvexRecord, Provenance, SyntheticBatch};
use crate::error::Result;
use crate::neighbors::knn_table;

/// `seed + u * (neighbor - seed)`.
pub fn interpolate(seed: ArrayView1<'_, f64>, neighbor: ArrayView1<'_, f64>, u: f64) -> Array1<f64> {
    let mut out = seed.to_owned();
    out.scaled_add(u, &(&neighbor - &seed));
    out
}

/// Classic SMOTE: pick a uniform minority seed, one of its `k` nearest
/// neighbors uniformly, and interpolate with `u ~ U[0, 1)`.
pub fn smote_generate<R: Rng + ?Sized>(
    x_min: ArrayView2<'_, f64>,
    k: usize,
    n: usize,
    rng: &mut R,
) -> Result<SyntheticBatch> {
    check_rows(x_min, k + 1)?;
    let table = knn_table(x_min, k)?;
    let mut rows = Vec::with_capacity(n);
    let mut provenance = Vec::with_capacity(n);
    for _ in 0..n {
        let i = rng.random_range(0..x_min.nrows());
        let j = table[i].indices[rng.random_range(0..k)];
        let u: f64 = rng.random();
        rows.push(interpolate(x_min.row(i), x_min.row(j), u));
        provenance.push(Provenance::Convex(ConvexRecord::new(i, vec![j], vec![1.0 - u, u])));
    }
    Ok(SyntheticBatch::from_rows(x_min.ncols(), rows, provenance))
}
