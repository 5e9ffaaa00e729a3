//! Dense layer: `y = activation(W x + b)` with `W` of shape `(out, in)`.

use rand::distributions::{Distribution, Uniform};
use rand::Rng;

use super::activation::Activation;
use super::matrix::Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseLayer {
    weights: Matrix,
    bias: Vec<f64>,
    activation: Activation,
}

impl DenseLayer {
    pub fn new(weights: Matrix, bias: Vec<f64>, activation: Activation) -> Result<Self> {
        if bias.len() != weights.rows() {
            return Err(Error::config(format!(
                "bias length {} does not match weight rows {}",
                bias.len(),
                weights.rows()
            )));
        }
        if bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::input("non-finite bias entry".to_string()));
        }
        Ok(DenseLayer {
            weights,
            bias,
            activation,
        })
    }

    /// Fan-based uniform init `U(-sqrt(6/(in+out)), +sqrt(6/(in+out)))`,
    /// zero bias.
    pub fn init<R: Rng + ?Sized>(
        in_dim: usize,
        out_dim: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::config("layer dimensions must be positive".to_string()));
        }
        let limit = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let dist = Uniform::new_inclusive(-limit, limit);
        let data: Vec<f64> = (0..in_dim * out_dim).map(|_| dist.sample(rng)).collect();
        let weights = Matrix::from_vec(out_dim, in_dim, data)?;
        DenseLayer::new(weights, vec![0.0; out_dim], activation)
    }

    #[inline]
    pub fn in_dim(&self) -> usize {
        self.weights.cols()
    }

    #[inline]
    pub fn out_dim(&self) -> usize {
        self.weights.rows()
    }

    #[inline]
    pub fn activation(&self) -> Activation {
        self.activation
    }

    #[inline]
    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    #[inline]
    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub(crate) fn weights_mut(&mut self) -> &mut Matrix {
        &mut self.weights
    }

    pub(crate) fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    /// Forward pass over a batch: one output row per input row.
    pub(crate) fn forward(&self, input: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(input.rows(), self.out_dim());
        for r in 0..input.rows() {
            let x = input.row(r);
            let z = out.row_mut(r);
            for (o, zo) in z.iter_mut().enumerate() {
                let w = self.weights.row(o);
                let mut sum = self.bias[o];
                for (wi, xi) in w.iter().zip(x) {
                    sum += wi * xi;
                }
                *zo = sum;
            }
            self.activation.apply_row(z);
        }
        out
    }
}
