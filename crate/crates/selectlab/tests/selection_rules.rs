//! Selection rules against a brute-force reading of the thresholding rule,
//! plus the invariants every strategy must honor.

use std::collections::BTreeSet;

use selectlab::data::{generate_gaussian_blobs, LabeledDataset, UnlabeledPool};
use selectlab::nn::{MlpModel, PROB_FLOOR};
use selectlab::strategies::{context_data_select, self_paced_select, SampleSource};

fn random_pool(m: usize, n_per_class: usize, seed: u64) -> UnlabeledPool {
    let src = generate_gaussian_blobs(m, n_per_class, m, 2.0, seed).unwrap();
    UnlabeledPool::new(src.features().clone(), src.labels().to_vec(), m).unwrap()
}

/// The rule, written blind: walk every sample, take the top-1 class by
/// scanning probabilities, compare `-ln p` with the threshold.
fn brute_force_select(
    classifier: &MlpModel,
    features: &selectlab::nn::Matrix,
    minors: &BTreeSet<usize>,
    lambda: f64,
) -> Vec<(usize, usize)> {
    let cache = classifier.forward(features).unwrap();
    let probs = cache.output();
    let mut picked = Vec::new();
    for r in 0..probs.rows() {
        let row = probs.row(r);
        let mut best = 0;
        for c in 1..row.len() {
            if row[c] > row[best] {
                best = c;
            }
        }
        if !minors.contains(&best) {
            continue;
        }
        let loss = -row[best].max(PROB_FLOOR).ln();
        if loss < lambda {
            picked.push((r, best));
        }
    }
    picked
}

#[test]
fn self_paced_matches_brute_force_exactly() {
    let m = 6;
    let pool = random_pool(m, 60, 17);
    let minors: BTreeSet<usize> = [0, 2, 4].into();
    for trial in 0..20u64 {
        let hidden = 3 + (trial % 5) as usize;
        let classifier = MlpModel::classifier(m, &[hidden], m, 1000 + trial).unwrap();
        let lambda = 0.1 + 0.25 * (trial % 9) as f64;
        let fast: Vec<(usize, usize)> =
            self_paced_select(&classifier, &pool, &minors, lambda)
                .unwrap()
                .iter()
                .map(|d| (d.index, d.assigned_label))
                .collect();
        let slow = brute_force_select(&classifier, pool.features(), &minors, lambda);
        assert_eq!(fast, slow, "trial {trial} lambda {lambda}");
    }
}

#[test]
fn selection_grows_monotonically_with_lambda() {
    let m = 5;
    let pool = random_pool(m, 80, 23);
    let minors: BTreeSet<usize> = [1, 3].into();
    let classifier = MlpModel::classifier(m, &[8], m, 99).unwrap();
    let mut previous: BTreeSet<usize> = BTreeSet::new();
    for step in 1..=12 {
        let lambda = 0.25 * step as f64;
        let current: BTreeSet<usize> = self_paced_select(&classifier, &pool, &minors, lambda)
            .unwrap()
            .iter()
            .map(|d| d.index)
            .collect();
        assert!(
            previous.is_subset(&current),
            "selection shrank when lambda grew to {lambda}"
        );
        previous = current;
    }
}

#[test]
fn all_decisions_are_minor_predictions_with_disciplined_labels() {
    let m = 6;
    let minors: BTreeSet<usize> = [0, 5].into();
    let labeled = generate_gaussian_blobs(m, 40, m, 1.5, 31).unwrap();
    let pool = random_pool(m, 40, 32);
    for trial in 0..10u64 {
        let classifier = MlpModel::classifier(m, &[6], m, 2000 + trial).unwrap();
        let pool_preds = classifier.predict(pool.features()).unwrap();
        let labeled_preds = classifier.predict(labeled.features()).unwrap();

        for d in self_paced_select(&classifier, &pool, &minors, 1.5).unwrap() {
            assert_eq!(d.source, SampleSource::Unlabeled);
            assert_eq!(d.assigned_label, pool_preds[d.index], "pseudo-label must be the top-1");
            assert!(minors.contains(&d.assigned_label));
            assert_eq!(d.weight, 1.0);
        }
        for d in context_data_select(&classifier, &labeled, &minors, 1.5).unwrap() {
            assert_eq!(d.source, SampleSource::Labeled);
            assert_eq!(d.assigned_label, labeled.labels()[d.index], "true label required");
            assert!(minors.contains(&labeled_preds[d.index]), "prediction must be minor");
        }
    }
}

#[test]
fn context_rule_catches_confused_majors_and_confident_minors() {
    // Train a classifier on blobs, then flip some major samples' features
    // toward the minor center so they are predicted minor confidently.
    let m = 3;
    let minors: BTreeSet<usize> = [0].into();
    let train = generate_gaussian_blobs(m, 200, 3, 6.0, 7).unwrap();
    let mut classifier = MlpModel::classifier(3, &[8], m, 1).unwrap();
    train_briefly(&mut classifier, &train, 30);

    // Majors relabeled as themselves but placed on the minor blob: the
    // classifier should call them minor with low loss.
    let minor_like = generate_gaussian_blobs(m, 5, 3, 6.0, 8).unwrap();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (i, &label) in minor_like.labels().iter().enumerate() {
        if label == 0 {
            rows.push(minor_like.features().row(i).to_vec());
            labels.push(1usize); // true-major, sitting on the minor blob
        }
    }
    let confused = LabeledDataset::new(
        selectlab::nn::Matrix::from_rows(&rows).unwrap(),
        labels.clone(),
        m,
    )
    .unwrap();

    let picked = context_data_select(&classifier, &confused, &minors, 0.6).unwrap();
    assert!(!picked.is_empty(), "confused majors should be selected");
    for d in &picked {
        assert_eq!(d.assigned_label, 1, "selected context data keeps the true major label");
    }
}

fn train_briefly(classifier: &mut MlpModel, ds: &LabeledDataset, epochs: u64) {
    use selectlab::data::minibatches;
    use selectlab::nn::{one_hot, Sgd, SgdConfig};
    let mut sgd = Sgd::new(SgdConfig {
        learning_rate: 0.1,
        momentum: 0.9,
        batch_size: 32,
        seed: 4,
    })
    .unwrap();
    for epoch in 0..epochs {
        for batch in minibatches(ds.len(), 32, 4, epoch) {
            let x = ds.features().select_rows(&batch);
            let labels: Vec<usize> = batch.iter().map(|&i| ds.labels()[i]).collect();
            let cache = classifier.forward(&x).unwrap();
            let grads = classifier
                .backward_cross_entropy(
                    &cache,
                    &one_hot(&labels, ds.num_classes()).unwrap(),
                    &vec![1.0 / labels.len() as f64; labels.len()],
                )
                .unwrap();
            sgd.step(classifier, &grads).unwrap();
        }
    }
}
