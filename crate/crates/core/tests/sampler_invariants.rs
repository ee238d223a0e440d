mod common;

use kwsmote::dataset::class_summary;
use kwsmote::samplers::{generate, resample, resample_with_batch, Method, Provenance, SamplerConfig};
use ndarray::Array2;
use proptest::prelude::*;

use common::{dist, random_clusters, rng};

fn config(method: Method, k: usize, c: usize, tau: f64) -> SamplerConfig {
    SamplerConfig {
        k_neighbors: k,
        convex_points: c,
        threshold: tau,
        ..SamplerConfig::new(method)
    }
}

fn check_reconstruction(x: &Array2<f64>, batch: &kwsmote::SyntheticBatch) -> Result<(), TestCaseError> {
    prop_assert_eq!(batch.provenance.len(), batch.len());
    for (p, prov) in batch.samples.outer_iter().zip(&batch.provenance) {
        let r = prov.reconstruct(x.view());
        for (a, b) in p.iter().zip(r.iter()) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn convex_methods_stay_in_reach(
        seed in any::<u64>(),
        rows in 8usize..40,
        dims in 1usize..6,
        k in 1usize..6,
        method in prop_oneof![Just(Method::Kwsmote), Just(Method::Snocc), Just(Method::Smote)],
    ) {
        let mut r = rng(seed);
        let x = random_clusters(rows, dims, &mut r);
        let c = 1 + (seed as usize % k);
        let batch = generate(x.view(), &config(method, k, c, 0.0), 60, &mut r).unwrap();
        check_reconstruction(&x, &batch)?;
        for (p, prov) in batch.samples.outer_iter().zip(&batch.provenance) {
            let rec = prov.as_convex().unwrap();
            let nu = rec.normalized_weights();
            prop_assert!(rec.raw_weights.iter().all(|w| *w >= 0.0));
            prop_assert!(rec.normalizer > 0.0);
            prop_assert!((nu.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            let seed_row = x.row(rec.seed_index);
            let reach = rec.neighbor_indices.iter().map(|&j| dist(x.row(j), seed_row)).fold(0.0, f64::max);
            prop_assert!(dist(p, seed_row) <= reach + 1e-9);
            if method == Method::Kwsmote {
                prop_assert_eq!(rec.raw_weights[0], 1.0);
                prop_assert!(nu.iter().all(|v| *v <= nu[0]));
            }
        }
    }

    #[test]
    fn normal_center_reconstructs(seed in any::<u64>(), rows in 2usize..30, dims in 1usize..5) {
        let mut r = rng(seed);
        let x = random_clusters(rows, dims, &mut r);
        let batch = generate(x.view(), &SamplerConfig::new(Method::NormalCenter), 40, &mut r).unwrap();
        check_reconstruction(&x, &batch)?;
        let all_shift = batch.provenance.iter().all(|p| matches!(p, Provenance::CenterShift { .. }));
        prop_assert!(all_shift);
    }

    #[test]
    fn raising_tau_never_lowers_skips(seed in any::<u64>(), taus in prop::collection::vec(0.0f64..0.6, 2..5)) {
        let mut r = rng(seed);
        let x = random_clusters(30, 3, &mut r);
        let mut taus = taus;
        taus.sort_by(f64::total_cmp);
        let mut last = 0;
        for tau in taus {
            let mut cfg = config(Method::Kwsmote, 5, 2, tau);
            cfg.sigma = Some(1.0);
            cfg.max_attempt_factor = 10_000;
            // a cap counts as more skips than any completed run
            let skipped = match generate(x.view(), &cfg, 50, &mut rng(seed ^ 0xabc)) {
                Ok(batch) => batch.skipped_count,
                Err(kwsmote::Error::AttemptCapReached { .. }) => usize::MAX,
                Err(e) => panic!("{e}"),
            };
            prop_assert!(skipped >= last);
            last = skipped;
        }
    }

    #[test]
    fn resample_balances_and_is_deterministic(
        seed in any::<u64>(),
        n_min in 7usize..30,
        extra in 0usize..40,
        method in prop_oneof![Just(Method::Kwsmote), Just(Method::Snocc), Just(Method::Smote), Just(Method::NormalCenter)],
    ) {
        let ds = common::two_gaussians(n_min, n_min + extra, 3, 2.0, seed);
        let mut cfg = config(method, 5, 3, 0.0);
        cfg.max_attempt_factor = 1000;
        let a = resample(&ds, &cfg, &mut rng(seed)).unwrap();
        let b = resample(&ds, &cfg, &mut rng(seed)).unwrap();
        prop_assert_eq!(&a, &b);
        let s = class_summary(&a);
        prop_assert_eq!(s.minority_count, s.majority_count);
        prop_assert_eq!(a.n_samples(), ds.n_samples() + extra);
        // originals untouched and first
        let head = a.features().slice(ndarray::s![..ds.n_samples(), ..]).to_owned();
        prop_assert_eq!(head.view(), ds.features());
    }
}

#[test]
fn balanced_input_is_returned_unchanged() {
    let ds = common::two_gaussians(10, 10, 2, 1.0, 3);
    let (out, batch) = resample_with_batch(&ds, &SamplerConfig::new(Method::Kwsmote), &mut rng(0)).unwrap();
    assert_eq!(out, ds);
    assert!(batch.is_empty());
}

#[test]
fn generator_error_propagates_from_resample() {
    // three minority rows cannot support k = 5
    let ds = common::two_gaussians(3, 10, 2, 1.0, 3);
    let err = resample(&ds, &SamplerConfig::new(Method::Smote), &mut rng(0)).unwrap_err();
    assert!(matches!(err, kwsmote::Error::TooFewRows { needed: 6, have: 3 }));
}
