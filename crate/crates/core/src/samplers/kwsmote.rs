use ndarray::{Array1, ArrayView2};
use rand::seq::index;
use rand::Rng;

use super::{check_rows, ConvexRecord, Method, Provenance, SamplerConfig, SyntheticBatch};
use crate::error::{Error, Result};
use crate::kernel::{default_bandwidth, Bandwidth};
use crate::neighbors::{knn_table, squared_distance_rows};

/// Kernel-weighted convex-combination oversampling.
///
/// Each candidate draws a uniform minority seed `x_i` and `c` of its `k`
/// nearest neighbors without replacement. Neighbor `j` gets the raw weight
/// `exp(-||x_i - x_j||^2 / (2 sigma^2))` and the seed gets `K(x_i, x_i) = 1`.
/// When the largest neighbor weight is below `cfg.threshold` the candidate is
/// skipped; otherwise the emitted sample is the weighted mean of the seed and
/// its chosen neighbors.
///
/// The random draws for a candidate do not depend on whether it is accepted,
/// so a fixed seed yields the same candidate stream for every threshold.
/// Drawing stops with [`Error::AttemptCapReached`] once
/// `cfg.max_attempt_factor * n` candidates were tried without `n` acceptances.
pub fn kwsmote_generate<R: Rng + ?Sized>(
    x_min: ArrayView2<'_, f64>,
    cfg: &SamplerConfig,
    n: usize,
    rng: &mut R,
) -> Result<SyntheticBatch> {
    if cfg.method != Method::Kwsmote {
        return Err(Error::InvalidConfig(format!(
            "kwsmote_generate called with method {}",
            cfg.method
        )));
    }
    cfg.validate()?;
    let (k, c) = (cfg.k_neighbors, cfg.convex_points);
    check_rows(x_min, k + 1)?;
    if n == 0 {
        return Ok(SyntheticBatch::empty(x_min.ncols()));
    }
    let bandwidth = match cfg.sigma {
        Some(s) => Bandwidth::new(s)?,
        None => default_bandwidth(x_min)?,
    };
    let table = knn_table(x_min, k)?;

    let max_attempts = cfg.max_attempt_factor.saturating_mul(n);
    let mut rows = Vec::with_capacity(n);
    let mut provenance = Vec::with_capacity(n);
    let mut skipped = 0;
    let mut attempts = 0;
    while rows.len() < n {
        if attempts == max_attempts {
            return Err(Error::AttemptCapReached {
                attempts,
                accepted: rows.len(),
                requested: n,
                skipped,
            });
        }
        attempts += 1;

        let i = rng.random_range(0..x_min.nrows());
        let neighbors: Vec<usize> = index::sample(rng, k, c)
            .into_iter()
            .map(|p| table[i].indices[p])
            .collect();
        let seed = x_min.row(i);
        let neighbor_weights: Vec<f64> = neighbors
            .iter()
            .map(|&j| bandwidth.weight(squared_distance_rows(seed, x_min.row(j))))
            .collect();

        let strongest = neighbor_weights.iter().copied().fold(0.0, f64::max);
        if strongest < cfg.threshold {
            skipped += 1;
            continue;
        }

        let mut raw_weights = Vec::with_capacity(c + 1);
        raw_weights.push(1.0);
        raw_weights.extend(neighbor_weights);
        let record = ConvexRecord::new(i, neighbors, raw_weights);

        let mut sample = Array1::zeros(x_min.ncols());
        for (src, w) in record.sources().zip(&record.raw_weights) {
            sample.scaled_add(w / record.normalizer, &x_min.row(src));
        }
        rows.push(sample);
        provenance.push(Provenance::Convex(record));
    }

    let mut batch = SyntheticBatch::from_rows(x_min.ncols(), rows, provenance);
    batch.skipped_count = skipped;
    batch.bandwidth = Some(bandwidth);
    Ok(batch)
}
