//! Acceptance suite: one test per gate criterion, each printing a
//! PASS/FAIL line (visible with `--nocapture`).
//!
//! Criteria 6, 7, 8, and 9 share one full desk-scale experiment (the
//! default configuration), executed once and cached.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::{finite_difference_grad, max_relative_error, random_model_and_objective};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use selectlab::data::{
    carve_imbalance, generate_gaussian_blobs, oversample_to_balance, ImbalanceSpec, UnlabeledPool,
};
use selectlab::harness::{prepare_data, run_experiment, ExperimentConfig, StrategyKind};
use selectlab::nn::{MlpModel, PROB_FLOOR};
use selectlab::selectnet::{
    selector_objective, train_selector, Candidate, SelectionFeature, SelectorNet,
};
use selectlab::strategies::{self_paced_select, SampleSource};

fn pass(criterion: &str, detail: &str) {
    println!("[{criterion}] PASS — {detail}");
}

// ---------------------------------------------------------------------------
// Criterion 1: gradient oracle.

#[test]
fn criterion_1_gradient_oracle() {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let (mut model, batch, objective) = random_model_and_objective(seed, 200);
        assert!(model.param_count() <= 200);
        let analytic = objective.analytic_grad(&model, &batch);
        let numeric = finite_difference_grad(&mut model, &batch, &objective);
        let err = max_relative_error(&analytic, &numeric);
        assert!(err < 1e-4, "net {seed}: max relative error {err:.3e}");
        worst = worst.max(err);
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    pass(
        "criterion 1",
        &format!("20 nets, worst relative error {worst:.2e}, {elapsed:?}"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 2: selection-rule oracle.

#[test]
fn criterion_2_selection_rule_oracle() {
    let started = Instant::now();
    let m = 8;
    let pool_source = generate_gaussian_blobs(m, 63, m, 2.0, 1234).unwrap();
    let subset: Vec<usize> = (0..500).collect();
    let pool_source = pool_source.subset(&subset).unwrap();
    let pool = UnlabeledPool::new(
        pool_source.features().clone(),
        pool_source.labels().to_vec(),
        m,
    )
    .unwrap();
    let minors: BTreeSet<usize> = [0, 2, 6, 7].into();
    let mut rng = ChaCha8Rng::seed_from_u64(99);

    for state in 0..50u64 {
        let hidden = rng.gen_range(2..10);
        let classifier = MlpModel::classifier(m, &[hidden], m, 5000 + state).unwrap();
        let lambda = rng.gen_range(0.05..3.0);

        let fast: Vec<(usize, usize)> = self_paced_select(&classifier, &pool, &minors, lambda)
            .unwrap()
            .iter()
            .map(|d| (d.index, d.assigned_label))
            .collect();

        // Brute force, straight from the rule: top-1 prediction must be a
        // minor class and its loss strictly below lambda.
        let cache = classifier.forward(pool.features()).unwrap();
        let probs = cache.output();
        let mut slow = Vec::new();
        for r in 0..pool.len() {
            let row = probs.row(r);
            let mut top = 0;
            for c in 1..m {
                if row[c] > row[top] {
                    top = c;
                }
            }
            if minors.contains(&top) && -(row[top].max(PROB_FLOOR)).ln() < lambda {
                slow.push((r, top));
            }
        }
        assert_eq!(fast, slow, "state {state}, lambda {lambda}");
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    pass(
        "criterion 2",
        &format!("50 classifier states over a 500-sample pool, exact equality, {elapsed:?}"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: oversampling exactness.

#[test]
fn criterion_3_oversampling_exactness() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(321);
    for trial in 0..100u64 {
        let m = rng.gen_range(2..6);
        let source = generate_gaussian_blobs(m, 40, m, 1.0, 9000 + trial).unwrap();
        let mut keep = Vec::new();
        for group in source.indices_by_class() {
            keep.extend_from_slice(&group[..rng.gen_range(1..=group.len())]);
        }
        keep.sort_unstable();
        let ds = source.subset(&keep).unwrap();

        let balanced = oversample_to_balance(&ds, 700 + trial).unwrap();
        let target = *ds.class_counts().iter().max().unwrap();
        assert_eq!(balanced.class_counts(), vec![target; m], "trial {trial}");
        // Originals retained, in order, as a prefix.
        assert_eq!(
            balanced.subset(&(0..ds.len()).collect::<Vec<_>>()).unwrap(),
            ds,
            "trial {trial}"
        );
        // Appended rows duplicate same-class originals.
        for i in ds.len()..balanced.len() {
            let label = balanced.labels()[i];
            let row = balanced.features().row(i);
            let found = (0..ds.len())
                .any(|j| ds.labels()[j] == label && ds.features().row(j) == row);
            assert!(found, "trial {trial}: appended row {i} is not an original");
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    pass("criterion 3", &format!("100 random count vectors exact, {elapsed:?}"));
}

// ---------------------------------------------------------------------------
// Criterion 4: selector sign property.

#[test]
fn criterion_4_selector_sign_property() {
    let started = Instant::now();
    let m = 10;
    let lambda = 0.6;
    for seed in 0..5u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + seed);
        let mut candidates = Vec::new();
        for i in 0..60 {
            let loss: f64 = if rng.gen_bool(0.5) { 0.1 } else { 1.5 };
            let p = (-loss).exp();
            let peak = i % m;
            let mut probs = vec![(1.0 - p) / (m - 1) as f64; m];
            probs[peak] = p;
            candidates.push(Candidate {
                source: SampleSource::Unlabeled,
                index: i,
                predicted: peak,
                assigned_label: peak,
                feature: SelectionFeature::new(probs, loss).unwrap(),
            });
        }
        let defaults = selectlab::selectnet::SelectNetConfig::default();
        let mut selector = SelectorNet::new(m, 8800 + seed).unwrap();
        let report = train_selector(
            &mut selector,
            &candidates,
            lambda,
            defaults.selector_steps,
            defaults.selector_lr,
        )
        .unwrap();
        assert!(
            report.objective_end < report.objective_start,
            "seed {seed}: objective {} -> {}",
            report.objective_start,
            report.objective_end
        );

        let scores = selector.scores(&candidates).unwrap();
        let mean = |low: bool| {
            let v: Vec<f64> = scores
                .iter()
                .zip(&candidates)
                .filter(|(_, c)| (c.feature.loss < lambda) == low)
                .map(|(s, _)| *s)
                .collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        let gap = mean(true) - mean(false);
        assert!(gap >= 0.3, "seed {seed}: separation {gap:.3} < 0.3");
        let end = selector_objective(&selector, &candidates, lambda).unwrap();
        assert!((end - report.objective_end).abs() < 1e-12);
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    pass(
        "criterion 4",
        &format!("5 seeds: separation >= 0.3 and objective decreased, {elapsed:?}"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 5: carving arithmetic.

#[test]
fn criterion_5_carving_arithmetic() {
    let source = generate_gaussian_blobs(4, 5000, 4, 1.5, 22).unwrap();
    let spec = ImbalanceSpec::new([0], 0.01, 0.90, 8).unwrap();
    let split = carve_imbalance(&source, &spec).unwrap();
    let counts = split.labeled.class_counts();
    assert_eq!(counts, vec![50, 4500, 4500, 4500]);
    assert_eq!(split.imbalance_ratio(), 90.0);
    pass("criterion 5", "5000/class at 0.01/0.90 gives 50 and 4500 labeled, ratio 90");
}

// ---------------------------------------------------------------------------
// The shared desk-scale experiment for criteria 6-9.

struct HeavyRun {
    config: ExperimentConfig,
    outcome: selectlab::harness::ExperimentOutcome,
    out_dir: PathBuf,
    elapsed: Duration,
}

static HEAVY: OnceLock<HeavyRun> = OnceLock::new();

fn heavy_run() -> &'static HeavyRun {
    HEAVY.get_or_init(|| {
        let out_dir =
            std::env::temp_dir().join(format!("selectlab_acceptance_{}", std::process::id()));
        fs::remove_dir_all(&out_dir).ok();
        let config = ExperimentConfig {
            out_dir: out_dir.clone(),
            ..ExperimentConfig::default()
        };
        let started = Instant::now();
        let outcome = run_experiment(&config).expect("desk-scale experiment");
        let elapsed = started.elapsed();
        HeavyRun {
            config,
            outcome,
            out_dir,
            elapsed,
        }
    })
}

fn summary_row<'a>(run: &'a HeavyRun, strategy: &str) -> &'a selectlab::harness::SummaryRow {
    run.outcome
        .summary
        .rows
        .iter()
        .find(|r| r.strategy == strategy)
        .expect("strategy present")
}

// ---------------------------------------------------------------------------
// Criterion 6: desk-scale ordering and minor-class recovery.

#[test]
fn criterion_6_desk_scale_ordering() {
    let run = heavy_run();
    assert!(
        run.elapsed < Duration::from_secs(600),
        "experiment took {:?}",
        run.elapsed
    );

    let acc = |name: &str| summary_row(run, name).median_overall_accuracy;
    let minor = |name: &str| summary_row(run, name).median_minor_recall;

    let selectnet = acc("selectnet");
    let context = acc("context");
    let imbalanced = acc("imbalanced");
    let self_paced = acc("self_paced");

    assert!(
        selectnet >= context,
        "selectnet {selectnet:.4} < context {context:.4}"
    );
    assert!(
        context >= imbalanced,
        "context {context:.4} < imbalanced {imbalanced:.4}"
    );
    assert!(
        selectnet >= self_paced,
        "selectnet {selectnet:.4} < self-paced {self_paced:.4}"
    );

    let recall_gap = minor("selectnet") - minor("imbalanced");
    assert!(recall_gap >= 0.15, "minor recall gap {recall_gap:.4} < 0.15");

    pass(
        "criterion 6",
        &format!(
            "acc: selectnet {selectnet:.4} >= context {context:.4} >= imbalanced {imbalanced:.4}, \
             selectnet >= self_paced {self_paced:.4}; minor recall gap {recall_gap:.3}; {:?}",
            run.elapsed
        ),
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: bounded selection counts; correct selections dominate.

#[test]
fn criterion_7_selection_count_shape() {
    let run = heavy_run();
    for record in &run.outcome.records {
        if record.strategy != StrategyKind::SelectNet {
            continue;
        }
        let last10 = &record.rounds[record.rounds.len() - 10..];
        let mut totals: Vec<f64> = last10.iter().map(|r| r.counts.total() as f64).collect();
        totals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = 0.5 * (totals[4] + totals[5]);
        let max = totals[9];
        assert!(
            max <= 2.0 * median,
            "seed {}: max {max} > 2 x median {median}",
            record.seed
        );

        let dominant = last10
            .iter()
            .filter(|r| {
                let c = &r.counts;
                c.unlabeled_minor > c.labeled_confused
                    && c.unlabeled_minor > c.labeled_minor
                    && c.unlabeled_minor > c.unlabeled_confused
            })
            .count();
        assert!(
            dominant >= 7,
            "seed {}: unlabeled_minor dominant in only {dominant}/10 rounds",
            record.seed
        );
    }
    pass(
        "criterion 7",
        "all selectnet seeds: last-10 max <= 2 x median, unlabeled_minor dominant >= 7/10",
    );
}

// ---------------------------------------------------------------------------
// Criterion 8: byte-identical reruns.

#[test]
fn criterion_8_determinism() {
    let run = heavy_run();
    // Re-execute one (strategy, seed) pair in isolation; its CSVs must be
    // byte-identical to the full experiment's outputs.
    let rerun_dir = run.out_dir.join("rerun");
    let mut config = run.config.clone();
    config.strategies = vec![StrategyKind::SelectNet];
    config.seeds = vec![run.config.seeds[0]];
    config.out_dir = rerun_dir.clone();
    run_experiment(&config).expect("rerun");

    let seed = run.config.seeds[0];
    for name in [
        format!("metrics_selectnet_{seed}.csv"),
        format!("selections_selectnet_{seed}.csv"),
    ] {
        let original = fs::read(run.out_dir.join(&name)).expect("original output");
        let rerun = fs::read(rerun_dir.join(&name)).expect("rerun output");
        assert_eq!(original, rerun, "{name} differs across reruns");
    }
    pass("criterion 8", "isolated rerun reproduced metrics and selections byte-for-byte");
}

// ---------------------------------------------------------------------------
// Criterion 9: label-discipline audit over every logged decision.

#[test]
fn criterion_9_label_discipline_audit() {
    let run = heavy_run();
    let mut audited = 0usize;
    for &seed in &run.config.seeds {
        // The split is a pure function of (config, seed); rebuild it to
        // audit against ground truth.
        let (split, _test) = prepare_data(&run.config, seed).expect("rebuild split");
        for record in run.outcome.records.iter().filter(|r| r.seed == seed) {
            for round in &record.rounds {
                for s in &round.selections {
                    match s.decision.source {
                        SampleSource::Labeled => {
                            assert_eq!(
                                s.decision.assigned_label,
                                split.labeled.labels()[s.decision.index],
                                "{} seed {seed} round {}: labeled decision must carry true label",
                                record.strategy.name(),
                                round.round
                            );
                        }
                        SampleSource::Unlabeled => {
                            assert_eq!(
                                s.decision.assigned_label, s.predicted,
                                "{} seed {seed} round {}: pool decision must carry its pseudo-label",
                                record.strategy.name(),
                                round.round
                            );
                        }
                    }
                    assert!(
                        split.spec.minor_classes().contains(&s.predicted),
                        "selection predicted a major class"
                    );
                    audited += 1;
                }
            }
        }
    }
    assert!(audited > 0, "no decisions to audit");
    pass(
        "criterion 9",
        &format!("{audited} logged decisions, zero label-discipline violations"),
    );
}

// ---------------------------------------------------------------------------
// Directional analogues beyond the gate: oversampling recovers some minor
// recall over the imbalanced baseline, and the selection methods beat
// plain rebalancing on overall accuracy. These hold on the frozen default
// seeds and are checked so regressions surface.

#[test]
fn ordering_oversample_recovers_minor_recall() {
    let run = heavy_run();
    let over = summary_row(run, "oversample").median_minor_recall;
    let imb = summary_row(run, "imbalanced").median_minor_recall;
    assert!(over > imb, "oversample minor recall {over:.4} <= imbalanced {imb:.4}");
    pass("table-1 analogue", &format!("oversample minor recall {over:.4} > imbalanced {imb:.4}"));
}

#[test]
fn ordering_self_paced_beats_oversampling_overall() {
    let run = heavy_run();
    let sp = summary_row(run, "self_paced").median_overall_accuracy;
    let over = summary_row(run, "oversample").median_overall_accuracy;
    assert!(sp >= over, "self-paced {sp:.4} < oversample {over:.4}");
    pass("table-1 analogue", &format!("self-paced {sp:.4} >= oversample {over:.4}"));
}
