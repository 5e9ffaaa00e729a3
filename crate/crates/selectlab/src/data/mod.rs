//! Dataset representation, synthetic generation, imbalance carving, and
//! oversampling.

mod batches;
mod carve;
mod dataset;
mod generate;
mod io;
mod oversample;

pub use batches::minibatches;
pub use carve::{carve_imbalance, kept_count, CarvedSplit, ImbalanceSpec};
pub use dataset::{LabeledDataset, UnlabeledPool};
pub use generate::generate_gaussian_blobs;
pub use io::{load_dataset, save_dataset, DatasetFormat};
pub use oversample::{oversample_to_balance, rows_come_from};
