//! Shared test oracles, kept independent of the library's backward path:
//! losses are recomputed from forward passes only, and gradients are
//! estimated by central finite differences.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use selectlab::nn::{one_hot, Activation, Matrix, MlpModel};

pub const FD_STEP: f64 = 1e-5;

/// The training objectives the gradient oracle exercises, one per head
/// activation the networks mix.
#[derive(Debug, Clone)]
pub enum Objective {
    /// Softmax head, mean cross-entropy against fixed integer labels.
    CrossEntropy { labels: Vec<usize> },
    /// Any head, mean of `sum_j c_ij * y_ij` with fixed coefficients.
    WeightedSum { coeffs: Matrix },
    /// Any head, mean squared error against fixed targets.
    Mse { targets: Matrix },
}

impl Objective {
    /// Loss via forward pass only (no library backward involvement).
    pub fn loss(&self, model: &MlpModel, batch: &Matrix) -> f64 {
        let out = model.forward(batch).expect("forward");
        let y = out.output();
        let b = y.rows() as f64;
        match self {
            Objective::CrossEntropy { labels } => {
                let mut total = 0.0;
                for (r, &label) in labels.iter().enumerate() {
                    total += -(y.get(r, label).max(1e-12)).ln();
                }
                total / b
            }
            Objective::WeightedSum { coeffs } => {
                let mut total = 0.0;
                for r in 0..y.rows() {
                    for c in 0..y.cols() {
                        total += coeffs.get(r, c) * y.get(r, c);
                    }
                }
                total / b
            }
            Objective::Mse { targets } => {
                let mut total = 0.0;
                for r in 0..y.rows() {
                    for c in 0..y.cols() {
                        let d = y.get(r, c) - targets.get(r, c);
                        total += d * d;
                    }
                }
                total / (b * y.cols() as f64)
            }
        }
    }

    /// Analytic gradient through the library's backward path, flattened in
    /// parameter order.
    pub fn analytic_grad(&self, model: &MlpModel, batch: &Matrix) -> Vec<f64> {
        let cache = model.forward(batch).expect("forward");
        let y = cache.output();
        let b = y.rows() as f64;
        let grads = match self {
            Objective::CrossEntropy { labels } => {
                let onehot = one_hot(labels, y.cols()).expect("one-hot");
                let weights = vec![1.0 / b; y.rows()];
                model
                    .backward_cross_entropy(&cache, &onehot, &weights)
                    .expect("backward")
            }
            Objective::WeightedSum { coeffs } => {
                let mut d = Matrix::zeros(y.rows(), y.cols());
                for r in 0..y.rows() {
                    for c in 0..y.cols() {
                        d.set(r, c, coeffs.get(r, c) / b);
                    }
                }
                model.backward(&cache, &d).expect("backward")
            }
            Objective::Mse { targets } => {
                let scale = 2.0 / (b * y.cols() as f64);
                let mut d = Matrix::zeros(y.rows(), y.cols());
                for r in 0..y.rows() {
                    for c in 0..y.cols() {
                        d.set(r, c, scale * (y.get(r, c) - targets.get(r, c)));
                    }
                }
                model.backward(&cache, &d).expect("backward")
            }
        };
        grads
            .layers
            .iter()
            .flat_map(|lg| {
                lg.d_weights
                    .data()
                    .iter()
                    .chain(&lg.d_bias)
                    .copied()
                    .collect::<Vec<f64>>()
            })
            .collect()
    }
}

/// Central finite differences over every parameter.
pub fn finite_difference_grad(model: &mut MlpModel, batch: &Matrix, objective: &Objective) -> Vec<f64> {
    let n = model.param_count();
    let mut grad = Vec::with_capacity(n);
    for p in 0..n {
        let orig = model.get_param(p);
        model.set_param(p, orig + FD_STEP);
        let plus = objective.loss(model, batch);
        model.set_param(p, orig - FD_STEP);
        let minus = objective.loss(model, batch);
        model.set_param(p, orig);
        grad.push((plus - minus) / (2.0 * FD_STEP));
    }
    grad
}

pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-8))
        .fold(0.0, f64::max)
}

/// Smallest |pre-activation| over all ReLU units for this batch, infinity
/// when the model has no ReLU layers. Central differences are only valid
/// away from the kink, so sampled models must keep clear of it.
fn min_relu_preactivation_margin(model: &MlpModel, batch: &Matrix) -> f64 {
    let mut margin = f64::INFINITY;
    let mut activations = batch.clone();
    for layer in model.layers() {
        let mut pre = Matrix::zeros(activations.rows(), layer.out_dim());
        for r in 0..activations.rows() {
            let x = activations.row(r);
            for o in 0..layer.out_dim() {
                let w = layer.weights().row(o);
                let z: f64 = layer.bias()[o] + w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>();
                pre.set(r, o, z);
                if layer.activation() == Activation::Relu {
                    margin = margin.min(z.abs());
                }
            }
        }
        for r in 0..pre.rows() {
            layer.activation().apply_row(pre.row_mut(r));
        }
        activations = pre;
    }
    margin
}

/// Builds a random small network with a randomly chosen head, its batch,
/// and a matching objective. Parameter counts stay at or below
/// `max_params`, and models whose ReLU pre-activations sit within 1e-3 of
/// the kink are resampled (finite differences would straddle the kink).
pub fn random_model_and_objective(
    seed: u64,
    max_params: usize,
) -> (MlpModel, Matrix, Objective) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let input = rng.gen_range(2..=5);
        let hidden = rng.gen_range(2..=8);
        let out = rng.gen_range(2..=4);
        let head = match rng.gen_range(0..4) {
            0 => Activation::Softmax,
            1 => Activation::Sigmoid,
            2 => Activation::Relu,
            _ => Activation::Identity,
        };
        let hidden_act = if rng.gen_bool(0.5) {
            Activation::Relu
        } else {
            Activation::Sigmoid
        };
        let params = (input * hidden + hidden) + (hidden * out + out);
        if params > max_params {
            continue;
        }
        let model = MlpModel::new(input, &[(hidden, hidden_act), (out, head)], rng.gen())
            .expect("model");
        let rows = rng.gen_range(1..=4);
        let batch = Matrix::from_vec(
            rows,
            input,
            (0..rows * input).map(|_| rng.gen_range(-1.5..1.5)).collect(),
        )
        .expect("batch");
        if min_relu_preactivation_margin(&model, &batch) < 1e-3 {
            continue;
        }
        let objective = match head {
            Activation::Softmax => Objective::CrossEntropy {
                labels: (0..rows).map(|_| rng.gen_range(0..out)).collect(),
            },
            Activation::Sigmoid => Objective::WeightedSum {
                coeffs: Matrix::from_vec(
                    rows,
                    out,
                    (0..rows * out).map(|_| rng.gen_range(-2.0..2.0)).collect(),
                )
                .expect("coeffs"),
            },
            _ => Objective::Mse {
                targets: Matrix::from_vec(
                    rows,
                    out,
                    (0..rows * out).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                )
                .expect("targets"),
            },
        };
        return (model, batch, objective);
    }
}
