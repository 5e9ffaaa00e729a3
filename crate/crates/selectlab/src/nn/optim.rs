//! Plain SGD with optional momentum.

use serde::{Deserialize, Serialize};

use super::model::{Gradients, MlpModel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SgdConfig {
    pub learning_rate: f64,
    /// Momentum coefficient in `[0, 1)`; 0 disables the velocity buffer.
    pub momentum: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for SgdConfig {
    fn default() -> Self {
        SgdConfig {
            learning_rate: 0.05,
            momentum: 0.9,
            batch_size: 32,
            seed: 0,
        }
    }
}

impl SgdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return Err(Error::config(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::config(format!(
                "momentum must be in [0, 1), got {}",
                self.momentum
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch size must be at least 1".to_string()));
        }
        Ok(())
    }
}

/// Optimizer state: velocity buffers are created lazily on the first step.
#[derive(Debug)]
pub struct Sgd {
    config: SgdConfig,
    velocity: Option<Vec<(Vec<f64>, Vec<f64>)>>,
}

impl Sgd {
    pub fn new(config: SgdConfig) -> Result<Self> {
        config.validate()?;
        Ok(Sgd {
            config,
            velocity: None,
        })
    }

    pub fn config(&self) -> &SgdConfig {
        &self.config
    }

    /// `v <- momentum * v + g; p <- p - lr * v`
    pub fn step(&mut self, model: &mut MlpModel, grads: &Gradients) -> Result<()> {
        if grads.layers.len() != model.layers().len() {
            return Err(Error::usage("gradient layer count mismatch".to_string()));
        }
        for (layer, lg) in model.layers().iter().zip(&grads.layers) {
            if lg.d_weights.rows() != layer.out_dim()
                || lg.d_weights.cols() != layer.in_dim()
                || lg.d_bias.len() != layer.out_dim()
            {
                return Err(Error::usage("gradient shape mismatch".to_string()));
            }
        }
        let velocity = self.velocity.get_or_insert_with(|| {
            grads
                .layers
                .iter()
                .map(|lg| {
                    (
                        vec![0.0; lg.d_weights.data().len()],
                        vec![0.0; lg.d_bias.len()],
                    )
                })
                .collect()
        });
        let lr = self.config.learning_rate;
        let mu = self.config.momentum;
        for ((layer, lg), (vw, vb)) in
            model.layers_mut().iter_mut().zip(&grads.layers).zip(velocity.iter_mut())
        {
            let w = layer.weights_mut().data_mut();
            for ((wi, vi), &gi) in w.iter_mut().zip(vw.iter_mut()).zip(lg.d_weights.data()) {
                *vi = mu * *vi + gi;
                *wi -= lr * *vi;
            }
            let b = layer.bias_mut();
            for ((bi, vi), &gi) in b.iter_mut().zip(vb.iter_mut()).zip(&lg.d_bias) {
                *vi = mu * *vi + gi;
                *bi -= lr * *vi;
            }
        }
        Ok(())
    }
}
