use ndarray::{Array1, ArrayView1, ArrayView2};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{centroid, check_rows, Provenance, SyntheticBatch};
use crate::error::{Error, Result};

/// `seed + g * (center - seed)`.
pub fn shift_toward_center(
    seed: ArrayView1<'_, f64>,
    center: ArrayView1<'_, f64>,
    g: f64,
) -> Array1<f64> {
    let mut out = seed.to_owned();
    out.scaled_add(g, &(&center - &seed));
    out
}

/// Moves a uniformly chosen minority row toward the minority centroid by a
/// multiplier `g ~ Normal(1, sigma_normal)`. `g` is not truncated, so samples
/// may land past the centroid or behind the seed.
pub fn normal_center_generate<R: Rng + ?Sized>(
    x_min: ArrayView2<'_, f64>,
    sigma_normal: f64,
    n: usize,
    rng: &mut R,
) -> Result<SyntheticBatch> {
    check_rows(x_min, 2)?;
    let normal = Normal::new(1.0, sigma_normal)
        .map_err(|e| Error::InvalidConfig(format!("sigma_normal: {e}")))?;
    let center = centroid(x_min);
    let mut rows = Vec::with_capacity(n);
    let mut provenance = Vec::with_capacity(n);
    for _ in 0..n {
        let i = rng.random_range(0..x_min.nrows());
        let g = normal.sample(rng);
        rows.push(shift_toward_center(x_min.row(i), center.view(), g));
        provenance.push(Provenance::CenterShift {
            seed_index: i,
            multiplier: g,
        });
    }
    Ok(SyntheticBatch::from_rows(x_min.ncols(), rows, provenance))
}
