//! Two small classifiers used to evaluate resampled training sets: a
//! majority-vote k-NN and a full-batch gradient-descent logistic regression.
//!
//! Both return hard predictions plus a continuous positive-class score for
//! ROC AUC. A score of exactly 0.5 predicts the negative class.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{ClassLabel, LabeledDataset};
use crate::error::{Error, Result};
use crate::neighbors::nearest_to_point;

fn other_label(train: &LabeledDataset, positive: &ClassLabel) -> Result<ClassLabel> {
    let (a, b) = train.classes();
    if &a == positive {
        Ok(b)
    } else if &b == positive {
        Ok(a)
    } else {
        Err(Error::InvalidConfig(format!(
            "positive label {positive} does not occur in the training data"
        )))
    }
}

fn threshold(scores: &[f64], positive: &ClassLabel, negative: &ClassLabel) -> Vec<ClassLabel> {
    scores
        .iter()
        .map(|&s| if s > 0.5 { positive.clone() } else { negative.clone() })
        .collect()
}

/// Majority vote over the `k_votes` nearest training rows.
#[derive(Debug, Clone)]
pub struct KnnClassifierModel<'a> {
    train: &'a LabeledDataset,
    k_votes: usize,
    positive: ClassLabel,
    negative: ClassLabel,
}

impl<'a> KnnClassifierModel<'a> {
    pub fn fit(train: &'a LabeledDataset, k_votes: usize, positive: &ClassLabel) -> Result<Self> {
        if train.n_samples() == 0 {
            return Err(Error::EmptyDataset);
        }
        if k_votes == 0 || k_votes > train.n_samples() {
            return Err(Error::InvalidConfig(format!(
                "k_votes = {k_votes} must be in 1..={}",
                train.n_samples()
            )));
        }
        Ok(KnnClassifierModel {
            train,
            k_votes,
            positive: positive.clone(),
            negative: other_label(train, positive)?,
        })
    }

    /// Fraction of the nearest training rows that are positive.
    pub fn score(&self, point: ArrayView1<'_, f64>) -> Result<f64> {
        let point = point.to_vec();
        let (idx, _) = nearest_to_point(self.train.features(), &point, self.k_votes)?;
        let labels = self.train.labels();
        let votes = idx.iter().filter(|&&i| labels[i] == self.positive).count();
        Ok(votes as f64 / self.k_votes as f64)
    }

    pub fn predict(&self, features: ArrayView2<'_, f64>) -> Result<(Vec<ClassLabel>, Vec<f64>)> {
        let scores = features
            .outer_iter()
            .map(|row| self.score(row))
            .collect::<Result<Vec<_>>>()?;
        Ok((threshold(&scores, &self.positive, &self.negative), scores))
    }
}

pub fn knn_fit_predict(
    train: &LabeledDataset,
    test: ArrayView2<'_, f64>,
    k_votes: usize,
    positive: &ClassLabel,
) -> Result<(Vec<ClassLabel>, Vec<f64>)> {
    KnnClassifierModel::fit(train, k_votes, positive)?.predict(test)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    /// Initial weights are `U(-init_scale, init_scale)`; zero means all-zero
    /// initialization and no use of the generator.
    pub init_scale: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            epochs: 500,
            learning_rate: 0.1,
            init_scale: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: Array1<f64>,
    pub bias: f64,
    pub mean: Array1<f64>,
    pub scale: Array1<f64>,
    /// Features with zero training variance; their scale is fixed to 1.
    pub constant_features: Vec<usize>,
    positive: ClassLabel,
    negative: ClassLabel,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Mean log-loss of a linear model over already standardized rows, with
/// targets in {0, 1}.
pub fn log_loss(x: ArrayView2<'_, f64>, y: &[f64], weights: ArrayView1<'_, f64>, bias: f64) -> f64 {
    let z = x.dot(&weights) + bias;
    z.iter()
        .zip(y)
        .map(|(&z, &t)| softplus(z) - t * z)
        .sum::<f64>()
        / y.len() as f64
}

/// Analytic gradient of [`log_loss`] with respect to weights and bias.
pub fn log_loss_gradient(
    x: ArrayView2<'_, f64>,
    y: &[f64],
    weights: ArrayView1<'_, f64>,
    bias: f64,
) -> (Array1<f64>, f64) {
    let n = y.len() as f64;
    let residual: Array1<f64> = (x.dot(&weights) + bias)
        .iter()
        .zip(y)
        .map(|(&z, &t)| sigmoid(z) - t)
        .collect();
    (x.t().dot(&residual) / n, residual.sum() / n)
}

/// Trains on standardized features with full-batch gradient descent on the
/// mean log-loss. `positive` maps to target 1.
pub fn logistic_fit<R: Rng + ?Sized>(
    train: &LabeledDataset,
    cfg: &LogisticConfig,
    positive: &ClassLabel,
    rng: &mut R,
) -> Result<LogisticModel> {
    if !(cfg.learning_rate.is_finite() && cfg.learning_rate > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "learning rate {} must be positive",
            cfg.learning_rate
        )));
    }
    let negative = other_label(train, positive)?;
    let x = train.features();
    let mean = x.mean_axis(Axis(0)).ok_or(Error::EmptyDataset)?;
    let mut scale = x.std_axis(Axis(0), 0.0);
    let mut constant_features = Vec::new();
    for (j, s) in scale.iter_mut().enumerate() {
        if *s == 0.0 {
            *s = 1.0;
            constant_features.push(j);
        }
    }
    let xs = standardize(x, &mean, &scale);
    let y: Vec<f64> = train
        .labels()
        .iter()
        .map(|l| if l == positive { 1.0 } else { 0.0 })
        .collect();

    let mut weights = if cfg.init_scale > 0.0 {
        Array1::from_shape_fn(x.ncols(), |_| rng.random_range(-cfg.init_scale..cfg.init_scale))
    } else {
        Array1::zeros(x.ncols())
    };
    let mut bias = 0.0;
    for epoch in 0..cfg.epochs {
        let loss = log_loss(xs.view(), &y, weights.view(), bias);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        let (gw, gb) = log_loss_gradient(xs.view(), &y, weights.view(), bias);
        weights.scaled_add(-cfg.learning_rate, &gw);
        bias -= cfg.learning_rate * gb;
    }
    if weights.iter().any(|w| !w.is_finite()) || !bias.is_finite() {
        return Err(Error::NonFiniteLoss { epoch: cfg.epochs });
    }
    Ok(LogisticModel {
        weights,
        bias,
        mean,
        scale,
        constant_features,
        positive: positive.clone(),
        negative,
    })
}

fn standardize(x: ArrayView2<'_, f64>, mean: &Array1<f64>, scale: &Array1<f64>) -> Array2<f64> {
    (&x - mean) / scale
}

impl LogisticModel {
    /// Positive-class probabilities, clamped into the open interval (0, 1).
    pub fn scores(&self, features: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
        if features.ncols() != self.weights.len() {
            return Err(Error::Shape(format!(
                "model expects {} features, got {}",
                self.weights.len(),
                features.ncols()
            )));
        }
        let z = standardize(features, &self.mean, &self.scale).dot(&self.weights) + self.bias;
        let hi = 1.0 - f64::EPSILON / 2.0;
        Ok(z.iter().map(|&z| sigmoid(z).clamp(f64::MIN_POSITIVE, hi)).collect())
    }
}

pub fn logistic_predict(
    model: &LogisticModel,
    features: ArrayView2<'_, f64>,
) -> Result<(Vec<ClassLabel>, Vec<f64>)> {
    let scores = model.scores(features)?;
    Ok((threshold(&scores, &model.positive, &model.negative), scores))
}
