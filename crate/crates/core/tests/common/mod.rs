#![allow(dead_code)]

use std::path::PathBuf;

use kwsmote::{ClassLabel, LabeledDataset};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

/// Minority label `1` around the origin, majority label `0` around
/// `(separation, 0, ..., 0)`, both with unit isotropic spread.
pub fn two_gaussians(n_min: usize, n_maj: usize, dims: usize, separation: f64, seed: u64) -> LabeledDataset {
    let mut r = rng(seed);
    let n = n_min + n_maj;
    let features = Array2::from_shape_fn((n, dims), |(i, j)| {
        let z: f64 = StandardNormal.sample(&mut r);
        if i >= n_min && j == 0 {
            z + separation
        } else {
            z
        }
    });
    let mut labels = vec![ClassLabel::from(1); n_min];
    labels.extend(vec![ClassLabel::from(0); n_maj]);
    LabeledDataset::new(features, labels).unwrap()
}

/// Dataset counts from the UCI summary table: (name, samples, features, minority, majority).
pub const TABLE_ONE: [(&str, usize, usize, usize, usize); 4] = [
    ("blood", 748, 4, 178, 570),
    ("haberman", 306, 3, 81, 225),
    ("breast_cancer", 569, 30, 212, 357),
    ("diabetes", 768, 8, 268, 500),
];

/// Random stand-in with the same shape and class counts as a table row.
pub fn table_one_standin(name: &str) -> LabeledDataset {
    let &(_, _, d, n_min, n_maj) = TABLE_ONE.iter().find(|t| t.0 == name).unwrap();
    two_gaussians(n_min, n_maj, d, 1.0, name.len() as u64)
}

/// Minority matrix with a few Gaussian clusters of random scale.
pub fn random_clusters(rows: usize, dims: usize, r: &mut ChaCha8Rng) -> Array2<f64> {
    let n_centers = r.random_range(1..4);
    let centers: Vec<Vec<f64>> = (0..n_centers)
        .map(|_| (0..dims).map(|_| r.random_range(-5.0..5.0)).collect())
        .collect();
    let spread = r.random_range(0.2..2.0);
    let mut x = Array2::zeros((rows, dims));
    for i in 0..rows {
        let c = &centers[r.random_range(0..n_centers)];
        for j in 0..dims {
            let z: f64 = StandardNormal.sample(r);
            x[[i, j]] = c[j] + spread * z;
        }
    }
    x
}

pub fn dist(a: ndarray::ArrayView1<'_, f64>, b: ndarray::ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
