//! Gaussian (RBF) kernel weights and the default bandwidth heuristic.

use ndarray::ArrayView2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::neighbors::squared_distance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthSource {
    UserSupplied,
    Heuristic,
}

/// Kernel width `sigma`, always positive and finite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bandwidth {
    sigma: f64,
    source: BandwidthSource,
}

impl Bandwidth {
    pub fn new(sigma: f64) -> Result<Self> {
        Self::with_source(sigma, BandwidthSource::UserSupplied)
    }

    fn with_source(sigma: f64, source: BandwidthSource) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "kernel width must be positive and finite, got {sigma}"
            )));
        }
        Ok(Bandwidth { sigma, source })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn source(&self) -> BandwidthSource {
        self.source
    }

    /// Kernel value for a precomputed squared distance.
    pub fn weight(&self, squared_distance: f64) -> f64 {
        (-squared_distance / (2.0 * self.sigma * self.sigma)).exp()
    }
}

/// `exp(-||a - b||^2 / (2 sigma^2))`, in `(0, 1]` and exactly 1 when `a == b`.
pub fn gaussian_kernel(a: &[f64], b: &[f64], bw: &Bandwidth) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(bw.weight(squared_distance(a, b)))
}

/// `sigma = sqrt(Var(X_min) * n_features / 2)`, where the variance is the
/// population variance of all entries of `x_min` taken as one flat sequence.
///
/// With this width the kernel equals `exp(-gamma ||a - b||^2)` for
/// `gamma = 1 / (n_features * Var)`.
pub fn default_bandwidth(x_min: ArrayView2<'_, f64>) -> Result<Bandwidth> {
    if x_min.nrows() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            have: x_min.nrows(),
        });
    }
    let count = x_min.len() as f64;
    let mean = x_min.iter().sum::<f64>() / count;
    let var = x_min.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count;
    if var <= 0.0 {
        return Err(Error::DegenerateMinority);
    }
    Bandwidth::with_source(
        (var * x_min.ncols() as f64 / 2.0).sqrt(),
        BandwidthSource::Heuristic,
    )
}
