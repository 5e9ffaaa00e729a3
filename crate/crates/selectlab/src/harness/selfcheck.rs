//! Built-in property checks, runnable from the CLI (`selfcheck`).
//!
//! A fast, seeded subset of the guarantees the test suite verifies in
//! depth: gradient correctness against finite differences, selection-rule
//! equivalence with a brute-force filter, oversampling exactness, carving
//! arithmetic, the selector's sign behavior, and run determinism.

use std::collections::BTreeSet;

use rand::Rng;

use crate::data::{
    carve_imbalance, generate_gaussian_blobs, oversample_to_balance, rows_come_from, ImbalanceSpec,
    UnlabeledPool,
};
use crate::error::Result;
use crate::nn::{argmax, cross_entropy_loss, one_hot, Activation, Matrix, MlpModel, PROB_FLOOR};
use crate::seed::rng_from_seed;
use crate::selectnet::{
    selector_objective, train_selector, Candidate, SelectionFeature, SelectorNet,
};
use crate::strategies::{self_paced_select, SampleSource};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: &'static str, detail: String) -> Self {
        CheckResult {
            name,
            passed: true,
            detail,
        }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        CheckResult {
            name,
            passed: false,
            detail,
        }
    }
}

/// Runs every check; failures never panic, they report.
pub fn selfcheck() -> Vec<CheckResult> {
    [
        check_gradients(),
        check_selection_rule(),
        check_oversampling(),
        check_carving(),
        check_selector_sign(),
        check_determinism(),
    ]
    .into_iter()
    .map(|r| match r {
        Ok(result) => result,
        Err(err) => CheckResult::fail("internal", format!("check aborted: {err}")),
    })
    .collect()
}

fn check_gradients() -> Result<CheckResult> {
    let name = "gradient_vs_finite_difference";
    let mut worst: f64 = 0.0;
    for trial in 0..5u64 {
        let mut model = MlpModel::new(
            3,
            &[(4, Activation::Relu), (3, Activation::Softmax)],
            100 + trial,
        )?;
        let mut rng = rng_from_seed(200 + trial);
        let batch = Matrix::from_vec(2, 3, (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect())?;
        let labels: Vec<usize> = (0..2).map(|_| rng.gen_range(0..3)).collect();
        let one_hot_labels = one_hot(&labels, 3)?;
        let weights = vec![0.5; 2];

        let cache = model.forward(&batch)?;
        let grads = model.backward_cross_entropy(&cache, &one_hot_labels, &weights)?;
        let flat: Vec<f64> = grads
            .layers
            .iter()
            .flat_map(|lg| lg.d_weights.data().iter().chain(&lg.d_bias).copied().collect::<Vec<_>>())
            .collect();

        let h = 1e-5;
        for (p, &analytic) in flat.iter().enumerate() {
            let orig = model.get_param(p);
            model.set_param(p, orig + h);
            let plus = mean_ce(&model, &batch, &one_hot_labels)?;
            model.set_param(p, orig - h);
            let minus = mean_ce(&model, &batch, &one_hot_labels)?;
            model.set_param(p, orig);
            let numeric = (plus - minus) / (2.0 * h);
            let rel = (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8);
            worst = worst.max(rel);
        }
    }
    Ok(if worst < 1e-4 {
        CheckResult::pass(name, format!("max relative error {worst:.2e}"))
    } else {
        CheckResult::fail(name, format!("max relative error {worst:.2e} >= 1e-4"))
    })
}

fn mean_ce(model: &MlpModel, batch: &Matrix, labels: &Matrix) -> Result<f64> {
    let cache = model.forward(batch)?;
    Ok(cross_entropy_loss(cache.output(), labels)?.mean)
}

fn check_selection_rule() -> Result<CheckResult> {
    let name = "selection_rule_brute_force";
    let m = 5;
    let pool_src = generate_gaussian_blobs(m, 40, m, 2.0, 31)?;
    let pool = UnlabeledPool::new(pool_src.features().clone(), pool_src.labels().to_vec(), m)?;
    let minors: BTreeSet<usize> = [0, 3].into();
    for trial in 0..10u64 {
        let classifier = MlpModel::classifier(m, &[6], m, 300 + trial)?;
        let lambda = 0.2 + 0.3 * trial as f64;
        let fast = self_paced_select(&classifier, &pool, &minors, lambda)?;
        // Brute force: apply the rule one sample at a time.
        let probs = classifier.forward(pool.features())?;
        let mut slow = Vec::new();
        for r in 0..pool.len() {
            let row = probs.output().row(r);
            let pred = argmax(row);
            if minors.contains(&pred) && -(row[pred].max(PROB_FLOOR)).ln() < lambda {
                slow.push((r, pred));
            }
        }
        let fast_pairs: Vec<(usize, usize)> =
            fast.iter().map(|d| (d.index, d.assigned_label)).collect();
        if fast_pairs != slow {
            return Ok(CheckResult::fail(
                name,
                format!("mismatch at trial {trial}: {} vs {}", fast_pairs.len(), slow.len()),
            ));
        }
    }
    Ok(CheckResult::pass(name, "10 classifier states match exactly".to_string()))
}

fn check_oversampling() -> Result<CheckResult> {
    let name = "oversampling_exactness";
    let mut rng = rng_from_seed(77);
    for trial in 0..20u64 {
        let m = rng.gen_range(2..5);
        let source = generate_gaussian_blobs(m, 60, m, 1.0, 400 + trial)?;
        // Carve random per-class counts out of the source.
        let mut keep = Vec::new();
        for group in source.indices_by_class() {
            let count = rng.gen_range(1..=group.len());
            keep.extend_from_slice(&group[..count]);
        }
        keep.sort_unstable();
        let ds = source.subset(&keep)?;
        let balanced = oversample_to_balance(&ds, 500 + trial)?;
        let max = *ds.class_counts().iter().max().expect("non-empty");
        if balanced.class_counts() != vec![max; m] {
            return Ok(CheckResult::fail(name, format!("counts not balanced at trial {trial}")));
        }
        if !rows_come_from(&ds, &balanced) {
            return Ok(CheckResult::fail(name, format!("foreign row at trial {trial}")));
        }
    }
    Ok(CheckResult::pass(name, "20 random count vectors balanced exactly".to_string()))
}

fn check_carving() -> Result<CheckResult> {
    let name = "carving_arithmetic";
    let source = generate_gaussian_blobs(3, 5000, 3, 2.0, 9)?;
    let spec = ImbalanceSpec::new([0], 0.01, 0.90, 4)?;
    let split = carve_imbalance(&source, &spec)?;
    let counts = split.labeled.class_counts();
    let expected = vec![50, 4500, 4500];
    Ok(if counts == expected && (split.imbalance_ratio() - 90.0).abs() < 1e-12 {
        CheckResult::pass(name, format!("counts {counts:?}, ratio 90"))
    } else {
        CheckResult::fail(name, format!("counts {counts:?}, expected {expected:?}"))
    })
}

fn check_selector_sign() -> Result<CheckResult> {
    let name = "selector_sign_separation";
    let m = 4;
    let lambda = 0.6;
    let mut candidates = Vec::new();
    for i in 0..40 {
        let loss: f64 = if i % 2 == 0 { 0.1 } else { 1.5 };
        let p = (-loss).exp();
        let mut probs = vec![(1.0 - p) / (m - 1) as f64; m];
        probs[0] = p;
        candidates.push(Candidate {
            source: SampleSource::Unlabeled,
            index: i,
            predicted: 0,
            assigned_label: 0,
            feature: SelectionFeature::new(probs, loss)?,
        });
    }
    let mut selector = SelectorNet::new(m, 11)?;
    let before = selector_objective(&selector, &candidates, lambda)?;
    let defaults = crate::selectnet::SelectNetConfig::default();
    train_selector(&mut selector, &candidates, lambda, defaults.selector_steps, defaults.selector_lr)?;
    let after = selector_objective(&selector, &candidates, lambda)?;
    let scores = selector.scores(&candidates)?;
    let (mut low, mut high, mut n_low, mut n_high) = (0.0, 0.0, 0, 0);
    for (s, c) in scores.iter().zip(&candidates) {
        if c.feature.loss < lambda {
            low += s;
            n_low += 1;
        } else {
            high += s;
            n_high += 1;
        }
    }
    let gap = low / n_low as f64 - high / n_high as f64;
    Ok(if gap > 0.0 && after <= before {
        CheckResult::pass(name, format!("score gap {gap:.3}, objective {before:.4} -> {after:.4}"))
    } else {
        CheckResult::fail(name, format!("score gap {gap:.3}, objective {before:.4} -> {after:.4}"))
    })
}

fn check_determinism() -> Result<CheckResult> {
    let name = "run_determinism";
    let run = || -> Result<Vec<f64>> {
        let source = generate_gaussian_blobs(3, 60, 3, 2.5, 21)?;
        let spec = ImbalanceSpec::new([0], 0.1, 0.9, 3)?;
        let split = carve_imbalance(&source, &spec)?;
        let mut classifier = MlpModel::classifier(3, &[8], 3, 5)?;
        let sgd = crate::nn::SgdConfig {
            learning_rate: 0.05,
            momentum: 0.9,
            batch_size: 16,
            seed: 13,
        };
        let cfg = crate::selectnet::SelectNetConfig {
            rounds: 2,
            round_epochs: 2,
            init_epochs: 2,
            selector_steps: 20,
            ..Default::default()
        };
        crate::selectnet::run_selectnet(&split, &source, &mut classifier, &sgd, &cfg)?;
        Ok(classifier.params())
    };
    let a = run()?;
    let b = run()?;
    Ok(if a == b {
        CheckResult::pass(name, "two identical runs, bit-identical parameters".to_string())
    } else {
        CheckResult::fail(name, "identical runs diverged".to_string())
    })
}
