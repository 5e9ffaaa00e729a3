//! Synthetic Gaussian-blob datasets.

use rand::Rng;

use super::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::nn::Matrix;
use crate::seed::rng_from_seed;

/// Generates a balanced dataset of `num_classes * per_class` samples.
///
/// Class `c` is an isotropic unit-variance Gaussian centered on a signed
/// axis point: `+separation * e_c` for `c < dim`, `-separation * e_(c-dim)`
/// for the next `dim` classes. Centers are deterministic so the pairwise
/// class geometry depends only on `separation`, not the seed.
pub fn generate_gaussian_blobs(
    num_classes: usize,
    per_class: usize,
    dim: usize,
    separation: f64,
    seed: u64,
) -> Result<LabeledDataset> {
    if num_classes < 2 {
        return Err(Error::input("need at least two classes".to_string()));
    }
    if per_class == 0 {
        return Err(Error::input("per_class must be at least 1".to_string()));
    }
    if separation <= 0.0 || separation.is_nan() {
        return Err(Error::input(format!("separation must be positive, got {separation}")));
    }
    if num_classes > 2 * dim {
        return Err(Error::input(format!(
            "{num_classes} classes need dim >= {}, got {dim}",
            num_classes.div_ceil(2)
        )));
    }
    let mut rng = rng_from_seed(seed);
    let n = num_classes * per_class;
    let mut features = Matrix::zeros(n, dim);
    let mut labels = Vec::with_capacity(n);
    for c in 0..num_classes {
        let (axis, sign) = if c < dim { (c, 1.0) } else { (c - dim, -1.0) };
        for s in 0..per_class {
            let row = features.row_mut(c * per_class + s);
            for v in row.iter_mut() {
                *v = standard_normal(&mut rng);
            }
            row[axis] += sign * separation;
            labels.push(c);
        }
    }
    LabeledDataset::new(features, labels, num_classes)
}

/// Box-Muller draw from N(0, 1). Kept in-crate so the sample stream is
/// pinned by the ChaCha stream alone.
fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
