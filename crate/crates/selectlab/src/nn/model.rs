//! Feed-forward network with explicit forward caches and backprop.
//!
//! The same `MlpModel` type serves as the classifier (softmax head over the
//! class logits) and, wrapped by the selection module, as the scoring
//! network (sigmoid head). Gradients are computed as a *weighted sum* of
//! per-sample gradients: whatever normalization a training objective needs
//! is folded into the per-sample weights or the output gradient by the
//! caller. This keeps one backprop path for every objective in the crate.

use rand::Rng;

use super::activation::Activation;
use super::layer::DenseLayer;
use super::loss::PROB_FLOOR;
use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    layers: Vec<DenseLayer>,
    seed: u64,
}

/// Activations captured during a forward pass.
///
/// `activations[0]` is the input batch; `activations[k + 1]` is the output
/// of layer `k`.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    activations: Vec<Matrix>,
}

impl ForwardCache {
    /// Final network output (post-activation of the last layer).
    pub fn output(&self) -> &Matrix {
        self.activations.last().expect("cache holds at least the input")
    }

    pub fn batch_size(&self) -> usize {
        self.activations[0].rows()
    }
}

/// Per-layer parameter gradients, shapes mirroring the model.
#[derive(Debug, Clone)]
pub struct LayerGradients {
    pub d_weights: Matrix,
    pub d_bias: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Gradients {
    pub layers: Vec<LayerGradients>,
}

impl Gradients {
    fn zeros_like(model: &MlpModel) -> Self {
        Gradients {
            layers: model
                .layers
                .iter()
                .map(|l| LayerGradients {
                    d_weights: Matrix::zeros(l.out_dim(), l.in_dim()),
                    d_bias: vec![0.0; l.out_dim()],
                })
                .collect(),
        }
    }
}

impl MlpModel {
    /// Builds a network from `(width, activation)` pairs with seeded
    /// fan-based initialization.
    pub fn new(input_dim: usize, layer_spec: &[(usize, Activation)], seed: u64) -> Result<Self> {
        if layer_spec.is_empty() {
            return Err(Error::config("a model needs at least one layer".to_string()));
        }
        let mut rng = rng_from_seed(seed);
        let mut layers = Vec::with_capacity(layer_spec.len());
        let mut in_dim = input_dim;
        for &(width, activation) in layer_spec {
            layers.push(DenseLayer::init(in_dim, width, activation, &mut rng)?);
            in_dim = width;
        }
        MlpModel::from_layers(layers, seed)
    }

    /// Wraps pre-built layers, validating that dimensions chain and that
    /// softmax appears only as the final layer.
    pub fn from_layers(layers: Vec<DenseLayer>, seed: u64) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::config("a model needs at least one layer".to_string()));
        }
        for pair in layers.windows(2) {
            if pair[0].out_dim() != pair[1].in_dim() {
                return Err(Error::config(format!(
                    "layer output dim {} does not chain into next input dim {}",
                    pair[0].out_dim(),
                    pair[1].in_dim()
                )));
            }
        }
        let last = layers.len() - 1;
        if layers[..last].iter().any(|l| l.activation() == Activation::Softmax) {
            return Err(Error::config(
                "softmax is only permitted as the final layer".to_string(),
            ));
        }
        Ok(MlpModel { layers, seed })
    }

    /// Standard classifier shape: ReLU hidden layers and a softmax head.
    pub fn classifier(
        input_dim: usize,
        hidden: &[usize],
        num_classes: usize,
        seed: u64,
    ) -> Result<Self> {
        if num_classes < 2 {
            return Err(Error::config("a classifier needs at least two classes".to_string()));
        }
        let mut spec: Vec<(usize, Activation)> =
            hidden.iter().map(|&w| (w, Activation::Relu)).collect();
        spec.push((num_classes, Activation::Softmax));
        MlpModel::new(input_dim, &spec, seed)
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [DenseLayer] {
        &mut self.layers
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty").out_dim()
    }

    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.in_dim() * l.out_dim() + l.out_dim())
            .sum()
    }

    /// Flat view of all parameters (weights row-major, then bias, per layer).
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend_from_slice(l.weights().data());
            out.extend_from_slice(l.bias());
        }
        out
    }

    pub fn get_param(&self, index: usize) -> f64 {
        let (layer, offset) = self.locate_param(index);
        let l = &self.layers[layer];
        let nw = l.in_dim() * l.out_dim();
        if offset < nw {
            l.weights().data()[offset]
        } else {
            l.bias()[offset - nw]
        }
    }

    pub fn set_param(&mut self, index: usize, value: f64) {
        let (layer, offset) = self.locate_param(index);
        let l = &mut self.layers[layer];
        let nw = l.in_dim() * l.out_dim();
        if offset < nw {
            l.weights_mut().data_mut()[offset] = value;
        } else {
            l.bias_mut()[offset - nw] = value;
        }
    }

    fn locate_param(&self, mut index: usize) -> (usize, usize) {
        for (k, l) in self.layers.iter().enumerate() {
            let n = l.in_dim() * l.out_dim() + l.out_dim();
            if index < n {
                return (k, index);
            }
            index -= n;
        }
        panic!("parameter index out of range");
    }

    /// Forward pass over a batch, returning the cached activations.
    pub fn forward(&self, batch: &Matrix) -> Result<ForwardCache> {
        if batch.cols() != self.input_dim() {
            return Err(Error::config(format!(
                "batch has {} columns but the first layer expects {}",
                batch.cols(),
                self.input_dim()
            )));
        }
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(batch.clone());
        for layer in &self.layers {
            let next = layer.forward(activations.last().expect("non-empty"));
            debug_assert!(next.is_finite());
            activations.push(next);
        }
        Ok(ForwardCache { activations })
    }

    /// Top-1 prediction per row; ties break toward the lowest class id.
    pub fn predict(&self, batch: &Matrix) -> Result<Vec<usize>> {
        let cache = self.forward(batch)?;
        Ok(cache.output().data().chunks(self.output_dim()).map(argmax).collect())
    }

    /// Backward pass from a gradient w.r.t. the network output.
    ///
    /// Returns the *sum* over batch rows of per-sample parameter gradients;
    /// `d_output` carries any per-sample weighting and normalization.
    pub fn backward(&self, cache: &ForwardCache, d_output: &Matrix) -> Result<Gradients> {
        self.check_cache(cache)?;
        let out = cache.output();
        if d_output.rows() != out.rows() || d_output.cols() != out.cols() {
            return Err(Error::usage(format!(
                "output gradient is {}x{} but the cached output is {}x{}",
                d_output.rows(),
                d_output.cols(),
                out.rows(),
                out.cols()
            )));
        }
        // Map through the head activation, then walk down the stack.
        let last = self.layers.len() - 1;
        let head = self.layers[last].activation();
        let mut d_pre = Matrix::zeros(out.rows(), out.cols());
        for r in 0..out.rows() {
            let mut row = vec![0.0; out.cols()];
            head.backprop_row(out.row(r), d_output.row(r), &mut row);
            d_pre.row_mut(r).copy_from_slice(&row);
        }
        Ok(self.backprop_from_last_pre(cache, d_pre))
    }

    /// Fused softmax + cross-entropy backward: the gradient w.r.t. the last
    /// pre-activation is `weight_i * (probs_i - onehot_i)` per sample.
    ///
    /// Requires a softmax head. As with [`MlpModel::backward`], the result
    /// is the weighted sum of per-sample gradients.
    pub fn backward_cross_entropy(
        &self,
        cache: &ForwardCache,
        labels_one_hot: &Matrix,
        sample_weights: &[f64],
    ) -> Result<Gradients> {
        self.check_cache(cache)?;
        if self.layers.last().expect("non-empty").activation() != Activation::Softmax {
            return Err(Error::usage(
                "cross-entropy backward requires a softmax head".to_string(),
            ));
        }
        let probs = cache.output();
        if labels_one_hot.rows() != probs.rows() || labels_one_hot.cols() != probs.cols() {
            return Err(Error::usage("label shape does not match cached output".to_string()));
        }
        if sample_weights.len() != probs.rows() {
            return Err(Error::usage("one weight per sample required".to_string()));
        }
        let mut d_pre = Matrix::zeros(probs.rows(), probs.cols());
        for (r, &w) in sample_weights.iter().enumerate() {
            let p = probs.row(r);
            let y = labels_one_hot.row(r);
            let dz = d_pre.row_mut(r);
            for c in 0..p.len() {
                dz[c] = w * (p[c] - y[c]);
            }
        }
        Ok(self.backprop_from_last_pre(cache, d_pre))
    }

    /// Per-sample cross-entropy losses for explicit integer labels,
    /// using the same probability floor as the loss function.
    pub fn losses_for_labels(&self, probs: &Matrix, labels: &[usize]) -> Result<Vec<f64>> {
        if probs.rows() != labels.len() {
            return Err(Error::usage("one label per row required".to_string()));
        }
        labels
            .iter()
            .enumerate()
            .map(|(r, &y)| {
                if y >= probs.cols() {
                    return Err(Error::input(format!("label {y} out of range")));
                }
                Ok(-(probs.get(r, y).max(PROB_FLOOR)).ln())
            })
            .collect()
    }

    fn check_cache(&self, cache: &ForwardCache) -> Result<()> {
        if cache.activations.len() != self.layers.len() + 1 {
            return Err(Error::usage(
                "forward cache does not match the model depth".to_string(),
            ));
        }
        for (k, layer) in self.layers.iter().enumerate() {
            if cache.activations[k].cols() != layer.in_dim()
                || cache.activations[k + 1].cols() != layer.out_dim()
                || cache.activations[k].rows() != cache.activations[k + 1].rows()
            {
                return Err(Error::usage(format!(
                    "forward cache shape mismatch at layer {k}"
                )));
            }
        }
        Ok(())
    }

    fn backprop_from_last_pre(&self, cache: &ForwardCache, d_pre_last: Matrix) -> Gradients {
        let mut grads = Gradients::zeros_like(self);
        let mut d_pre = d_pre_last;
        for k in (0..self.layers.len()).rev() {
            let layer = &self.layers[k];
            let input = &cache.activations[k];
            let lg = &mut grads.layers[k];
            let mut d_input = Matrix::zeros(input.rows(), layer.in_dim());
            for r in 0..input.rows() {
                let x = input.row(r);
                let dz = d_pre.row(r);
                for (o, &dzo) in dz.iter().enumerate() {
                    lg.d_bias[o] += dzo;
                    let wrow = layer.weights().row(o);
                    let grow = lg.d_weights.row_mut(o);
                    let din = d_input.row_mut(r);
                    for i in 0..x.len() {
                        grow[i] += dzo * x[i];
                        din[i] += dzo * wrow[i];
                    }
                }
            }
            if k > 0 {
                // Chain through the previous layer's activation.
                let prev = &self.layers[k - 1];
                let prev_out = &cache.activations[k];
                let mut next_d_pre = Matrix::zeros(d_input.rows(), d_input.cols());
                for r in 0..d_input.rows() {
                    let mut row = vec![0.0; d_input.cols()];
                    prev.activation().backprop_row(prev_out.row(r), d_input.row(r), &mut row);
                    next_d_pre.row_mut(r).copy_from_slice(&row);
                }
                d_pre = next_d_pre;
            }
        }
        grads
    }
}

/// Index of the row maximum; the first (lowest) index wins ties.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Seeded uniform init helper shared by tests that need raw random layers.
pub fn random_layer<R: Rng + ?Sized>(
    in_dim: usize,
    out_dim: usize,
    activation: Activation,
    rng: &mut R,
) -> Result<DenseLayer> {
    DenseLayer::init(in_dim, out_dim, activation, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_layer_passes_input_through() {
        let layer =
            DenseLayer::new(Matrix::identity(2), vec![0.0, 0.0], Activation::Identity).unwrap();
        let model = MlpModel::from_layers(vec![layer], 0).unwrap();
        let batch = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let cache = model.forward(&batch).unwrap();
        assert_eq!(cache.output().row(0), &[1.0, 2.0]);
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let model = MlpModel::classifier(4, &[8], 5, 42).unwrap();
        let batch = Matrix::from_rows(&[
            vec![0.1, -0.4, 2.0, 0.3],
            vec![-1.0, 0.0, 1.0, 5.0],
            vec![0.0, 0.0, 0.0, 0.0],
        ])
        .unwrap();
        let cache = model.forward(&batch).unwrap();
        for r in 0..3 {
            let sum: f64 = cache.output().row(r).iter().sum();
            assert!((sum - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn forward_rejects_dimension_mismatch() {
        let model = MlpModel::classifier(4, &[8], 5, 42).unwrap();
        let batch = Matrix::from_rows(&[vec![0.1, -0.4, 2.0]]).unwrap();
        assert!(matches!(model.forward(&batch), Err(Error::Config(_))));
    }

    #[test]
    fn softmax_rejected_in_hidden_position() {
        let err = MlpModel::new(
            3,
            &[(4, Activation::Softmax), (2, Activation::Identity)],
            0,
        );
        assert!(err.is_err());
    }

    #[test]
    fn same_seed_same_parameters() {
        let a = MlpModel::classifier(6, &[8, 4], 3, 9).unwrap();
        let b = MlpModel::classifier(6, &[8, 4], 3, 9).unwrap();
        assert_eq!(a.params(), b.params());
    }

    #[test]
    fn zero_output_gradient_gives_zero_parameter_gradients() {
        let model = MlpModel::classifier(3, &[4], 2, 1).unwrap();
        let batch = Matrix::from_rows(&[vec![0.5, -0.2, 1.0]]).unwrap();
        let cache = model.forward(&batch).unwrap();
        let d_out = Matrix::zeros(1, 2);
        let grads = model.backward(&cache, &d_out).unwrap();
        for lg in &grads.layers {
            assert!(lg.d_weights.data().iter().all(|&g| g == 0.0));
            assert!(lg.d_bias.iter().all(|&g| g == 0.0));
        }
    }

    #[test]
    fn backward_rejects_mismatched_cache() {
        let a = MlpModel::classifier(3, &[4], 2, 1).unwrap();
        let b = MlpModel::classifier(3, &[6], 2, 1).unwrap();
        let batch = Matrix::from_rows(&[vec![0.5, -0.2, 1.0]]).unwrap();
        let cache = a.forward(&batch).unwrap();
        let d_out = Matrix::zeros(1, 2);
        assert!(matches!(b.backward(&cache, &d_out), Err(Error::Usage(_))));
    }

    #[test]
    fn argmax_breaks_ties_toward_lowest_id() {
        assert_eq!(argmax(&[0.4, 0.4, 0.2]), 0);
        assert_eq!(argmax(&[0.1, 0.5, 0.5]), 1);
    }
}
