//! Minimal dense-network substrate shared by the classifier and the
//! selection network: matrices, layers, losses, and seeded SGD.

mod activation;
mod layer;
mod loss;
mod matrix;
mod model;
mod optim;

pub use activation::Activation;
pub use layer::DenseLayer;
pub use loss::{cross_entropy_loss, one_hot, weighted_mean_loss, LossBatch, PROB_FLOOR};
pub use matrix::Matrix;
pub use model::{argmax, random_layer, ForwardCache, Gradients, LayerGradients, MlpModel};
pub use optim::{Sgd, SgdConfig};
