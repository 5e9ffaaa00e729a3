//! A desk-scale laboratory for class-imbalanced classification with
//! semi-supervised data selection.
//!
//! The library trains a small dense classifier on a labeled-but-imbalanced
//! dataset next to a pool of unlabeled data, and compares five training
//! strategies on identical splits:
//!
//! - **imbalanced** — train on the labeled data as-is;
//! - **oversample** — rebalance the labeled data by sampling with
//!   replacement;
//! - **self_paced** — every few epochs, add pool samples confidently
//!   predicted as a minor class, pseudo-labeled by the classifier;
//! - **context** — self-paced plus labeled samples predicted as minor,
//!   re-added with their true labels;
//! - **selectnet** — a second, learned network scores each candidate from
//!   `(class probabilities, loss)` and the score threshold decides what
//!   joins the training set.
//!
//! Start with [`harness::ExperimentConfig`] and [`harness::run_experiment`]
//! for end-to-end runs, or use the [`nn`], [`data`], [`strategies`],
//! [`selectnet`], and [`metrics`] modules directly. The accompanying book
//! (`book/`) walks through each concept; its code snippets compile and run
//! as this crate's doc-tests.
//!
//! ```
//! use selectlab::data::{carve_imbalance, generate_gaussian_blobs, ImbalanceSpec};
//!
//! let source = generate_gaussian_blobs(3, 100, 4, 2.0, 1)?;
//! let spec = ImbalanceSpec::new([0], 0.05, 0.9, 2)?;
//! let split = carve_imbalance(&source, &spec)?;
//! assert_eq!(split.labeled.class_counts(), vec![5, 90, 90]);
//! # Ok::<(), selectlab::Error>(())
//! ```

pub mod data;
mod error;
pub mod harness;
pub mod metrics;
pub mod nn;
pub mod report;
pub mod seed;
pub mod selectnet;
pub mod strategies;

pub use error::{Error, Result};

#[cfg(doctest)]
mod guide;
