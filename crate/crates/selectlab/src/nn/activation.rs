//! Layer activations.

use serde::{Deserialize, Serialize};

/// Sigmoid outputs are clamped into this open interval so downstream logs
/// and score comparisons never see exact 0 or 1 even under saturation.
const SIGMOID_CLAMP: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Relu,
    Sigmoid,
    /// Row-wise softmax. Only valid as the final layer of a classifier.
    Softmax,
    Identity,
}

impl Activation {
    /// Applies the activation to one pre-activation row in place.
    pub fn apply_row(self, row: &mut [f64]) {
        match self {
            Activation::Identity => {}
            Activation::Relu => {
                for v in row.iter_mut() {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
            }
            Activation::Sigmoid => {
                for v in row.iter_mut() {
                    *v = (1.0 / (1.0 + (-*v).exp())).clamp(SIGMOID_CLAMP, 1.0 - SIGMOID_CLAMP);
                }
            }
            Activation::Softmax => {
                // Standard max-shift stabilization.
                let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let mut sum = 0.0;
                for v in row.iter_mut() {
                    *v = (*v - max).exp();
                    sum += *v;
                }
                for v in row.iter_mut() {
                    *v /= sum;
                }
            }
        }
    }

    /// Converts a gradient w.r.t. this activation's output into a gradient
    /// w.r.t. its pre-activation input, given the cached output row.
    ///
    /// Relu/Sigmoid/Identity are element-wise; Softmax requires the full
    /// Jacobian-vector product `dz_j = p_j (dy_j - sum_k dy_k p_k)`.
    pub(crate) fn backprop_row(self, output: &[f64], d_output: &[f64], d_pre: &mut [f64]) {
        match self {
            Activation::Identity => d_pre.copy_from_slice(d_output),
            Activation::Relu => {
                for ((dz, &y), &dy) in d_pre.iter_mut().zip(output).zip(d_output) {
                    *dz = if y > 0.0 { dy } else { 0.0 };
                }
            }
            Activation::Sigmoid => {
                for ((dz, &y), &dy) in d_pre.iter_mut().zip(output).zip(d_output) {
                    *dz = dy * y * (1.0 - y);
                }
            }
            Activation::Softmax => {
                let dot: f64 = d_output.iter().zip(output).map(|(&dy, &p)| dy * p).sum();
                for ((dz, &p), &dy) in d_pre.iter_mut().zip(output).zip(d_output) {
                    *dz = p * (dy - dot);
                }
            }
        }
    }
}
