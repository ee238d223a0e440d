//! Synthetic minority-sample generators.
//!
//! Four methods share one configuration type and one output type:
//!
//! * [`smote_generate`]: uniform interpolation between a seed row and one of
//!   its k nearest minority neighbors.
//! * [`normal_center_generate`]: moves a seed row toward the minority centroid
//!   by a normally distributed multiplier with mean 1.
//! * [`snocc_generate`]: random convex combination of a seed row and `c` of its
//!   neighbors with normalized uniform weights.
//! * [`kwsmote_generate`]: convex combination of a seed row (weight 1) and `c`
//!   of its neighbors weighted by a Gaussian kernel, with candidates whose
//!   neighbor weights all fall below a threshold skipped.
//!
//! Every generated row carries a [`Provenance`] record from which it can be
//! rebuilt exactly.

mod kwsmote;
mod normal_center;
mod smote;
mod snocc;

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView2};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{append_synthetic, class_summary, ClassSummary, LabeledDataset};
use crate::error::{Error, Result};
use crate::kernel::Bandwidth;

pub use kwsmote::kwsmote_generate;
pub use normal_center::{normal_center_generate, shift_toward_center};
pub use smote::{interpolate, smote_generate};
pub use snocc::snocc_generate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Smote,
    Kwsmote,
    #[serde(rename = "normal", alias = "normal_center")]
    NormalCenter,
    Snocc,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Smote => "smote",
            Method::Kwsmote => "kwsmote",
            Method::NormalCenter => "normal",
            Method::Snocc => "snocc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smote" => Ok(Method::Smote),
            "kwsmote" => Ok(Method::Kwsmote),
            "normal" | "normal_center" => Ok(Method::NormalCenter),
            "snocc" => Ok(Method::Snocc),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

/// Parameters for every sampler. Fields a method does not use are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub method: Method,
    /// Neighbors considered per seed row (k).
    pub k_neighbors: usize,
    /// Neighbors combined per sample (c), used by kwsmote and snocc.
    pub convex_points: usize,
    /// Skip threshold on the largest neighbor kernel weight (tau), kwsmote only.
    pub threshold: f64,
    /// Gaussian kernel width; the variance heuristic is used when absent.
    pub sigma: Option<f64>,
    /// Standard deviation of the normal-center multiplier.
    pub sigma_normal: f64,
    /// Candidate draws are capped at `max_attempt_factor * n`.
    pub max_attempt_factor: usize,
}

impl SamplerConfig {
    pub fn new(method: Method) -> Self {
        SamplerConfig {
            method,
            k_neighbors: 5,
            convex_points: 3,
            threshold: 0.01,
            sigma: None,
            sigma_normal: 0.5,
            max_attempt_factor: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.k_neighbors == 0 {
            return bad("k must be positive".into());
        }
        if matches!(self.method, Method::Kwsmote | Method::Snocc) {
            if self.convex_points == 0 {
                return bad("c must be positive".into());
            }
            if self.convex_points > self.k_neighbors {
                return bad(format!(
                    "c = {} exceeds k = {}",
                    self.convex_points, self.k_neighbors
                ));
            }
        }
        if !(0.0..1.0).contains(&self.threshold) {
            return bad(format!("tau = {} not in [0, 1)", self.threshold));
        }
        if let Some(s) = self.sigma {
            Bandwidth::new(s)?;
        }
        if !(self.sigma_normal.is_finite() && self.sigma_normal > 0.0) {
            return bad(format!("sigma_normal = {} must be positive", self.sigma_normal));
        }
        if self.max_attempt_factor == 0 {
            return bad("max_attempt_factor must be positive".into());
        }
        Ok(())
    }
}

/// A sample written as `sum_j (raw_weights[j] / normalizer) * source_j`, where
/// source 0 is the seed row and sources 1.. are `neighbor_indices`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexRecord {
    pub seed_index: usize,
    pub neighbor_indices: Vec<usize>,
    pub raw_weights: Vec<f64>,
    pub normalizer: f64,
}

impl ConvexRecord {
    fn new(seed_index: usize, neighbor_indices: Vec<usize>, raw_weights: Vec<f64>) -> Self {
        debug_assert_eq!(raw_weights.len(), neighbor_indices.len() + 1);
        let normalizer = raw_weights.iter().sum();
        ConvexRecord {
            seed_index,
            neighbor_indices,
            raw_weights,
            normalizer,
        }
    }

    /// Seed index followed by the neighbor indices.
    pub fn sources(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.seed_index).chain(self.neighbor_indices.iter().copied())
    }

    pub fn normalized_weights(&self) -> Vec<f64> {
        self.raw_weights.iter().map(|w| w / self.normalizer).collect()
    }
}

/// How a synthetic row was produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Weighted combination of cited minority rows (smote, snocc, kwsmote).
    Convex(ConvexRecord),
    /// `seed + multiplier * (centroid - seed)` (normal-center). The
    /// multiplier is not truncated, so this is not a convex combination in
    /// general.
    CenterShift { seed_index: usize, multiplier: f64 },
}

impl Provenance {
    pub fn seed_index(&self) -> usize {
        match self {
            Provenance::Convex(r) => r.seed_index,
            Provenance::CenterShift { seed_index, .. } => *seed_index,
        }
    }

    pub fn as_convex(&self) -> Option<&ConvexRecord> {
        match self {
            Provenance::Convex(r) => Some(r),
            Provenance::CenterShift { .. } => None,
        }
    }

    /// Rebuilds the sample from the minority matrix it was drawn from.
    pub fn reconstruct(&self, x_min: ArrayView2<'_, f64>) -> Array1<f64> {
        match self {
            Provenance::Convex(r) => {
                let mut out = Array1::zeros(x_min.ncols());
                for (src, w) in r.sources().zip(&r.raw_weights) {
                    out.scaled_add(w / r.normalizer, &x_min.row(src));
                }
                out
            }
            Provenance::CenterShift {
                seed_index,
                multiplier,
            } => {
                let center = centroid(x_min);
                shift_toward_center(x_min.row(*seed_index), center.view(), *multiplier)
            }
        }
    }
}

/// Generated rows with one provenance record each.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticBatch {
    pub samples: Array2<f64>,
    pub provenance: Vec<Provenance>,
    /// Candidates rejected by the kwsmote threshold.
    pub skipped_count: usize,
    /// Kernel width used by kwsmote.
    pub bandwidth: Option<Bandwidth>,
}

impl SyntheticBatch {
    pub fn empty(n_features: usize) -> Self {
        SyntheticBatch {
            samples: Array2::zeros((0, n_features)),
            provenance: Vec::new(),
            skipped_count: 0,
            bandwidth: None,
        }
    }

    /// Wraps externally produced rows; the result has no provenance.
    pub fn from_samples(samples: Array2<f64>) -> Self {
        SyntheticBatch {
            samples,
            provenance: Vec::new(),
            skipped_count: 0,
            bandwidth: None,
        }
    }

    fn from_rows(
        n_features: usize,
        rows: Vec<Array1<f64>>,
        provenance: Vec<Provenance>,
    ) -> Self {
        let mut samples = Array2::zeros((rows.len(), n_features));
        for (mut dst, src) in samples.outer_iter_mut().zip(&rows) {
            dst.assign(src);
        }
        SyntheticBatch {
            samples,
            provenance,
            skipped_count: 0,
            bandwidth: None,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Number of minority rows needed to equalize the classes.
pub fn required_count(summary: &ClassSummary) -> usize {
    summary.majority_count - summary.minority_count
}

pub(crate) fn centroid(x: ArrayView2<'_, f64>) -> Array1<f64> {
    x.mean_axis(ndarray::Axis(0))
        .unwrap_or_else(|| Array1::zeros(x.ncols()))
}

/// `sum_j weights[j] * points[j] / sum(weights)` over rows of `x`.
pub fn convex_combination(
    x: ArrayView2<'_, f64>,
    rows: &[usize],
    weights: &[f64],
) -> Result<Array1<f64>> {
    if rows.len() != weights.len() {
        return Err(Error::LengthMismatch {
            left: rows.len(),
            right: weights.len(),
        });
    }
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|w| *w < 0.0) || total <= 0.0 {
        return Err(Error::InvalidConfig(
            "convex weights must be nonnegative with a positive sum".into(),
        ));
    }
    let mut out = Array1::zeros(x.ncols());
    for (&r, &w) in rows.iter().zip(weights) {
        out.scaled_add(w / total, &x.row(r));
    }
    Ok(out)
}

fn check_rows(x_min: ArrayView2<'_, f64>, needed: usize) -> Result<()> {
    if x_min.nrows() < needed {
        return Err(Error::TooFewRows {
            needed,
            have: x_min.nrows(),
        });
    }
    Ok(())
}

/// Runs the configured generator for `n` samples over the minority matrix.
pub fn generate<R: Rng + ?Sized>(
    x_min: ArrayView2<'_, f64>,
    cfg: &SamplerConfig,
    n: usize,
    rng: &mut R,
) -> Result<SyntheticBatch> {
    cfg.validate()?;
    match cfg.method {
        Method::Smote => smote_generate(x_min, cfg.k_neighbors, n, rng),
        Method::NormalCenter => normal_center_generate(x_min, cfg.sigma_normal, n, rng),
        Method::Snocc => snocc_generate(x_min, cfg.k_neighbors, cfg.convex_points, n, rng),
        Method::Kwsmote => kwsmote_generate(x_min, cfg, n, rng),
    }
}

/// Oversamples the minority class until both classes have the same count.
pub fn resample<R: Rng + ?Sized>(
    ds: &LabeledDataset,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<LabeledDataset> {
    resample_with_batch(ds, cfg, rng).map(|(out, _)| out)
}

/// Like [`resample`], also returning the generated batch.
pub fn resample_with_batch<R: Rng + ?Sized>(
    ds: &LabeledDataset,
    cfg: &SamplerConfig,
    rng: &mut R,
) -> Result<(LabeledDataset, SyntheticBatch)> {
    cfg.validate()?;
    let summary = class_summary(ds);
    let n = required_count(&summary);
    if n == 0 {
        return Ok((ds.clone(), SyntheticBatch::empty(ds.n_features())));
    }
    let x_min = ds.rows_with_label(&summary.minority_label);
    let batch = generate(x_min.view(), cfg, n, rng)?;
    let out = append_synthetic(ds, &batch, &summary.minority_label)?;
    Ok((out, batch))
}
