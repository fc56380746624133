//! Trainable classifiers over feature vectors: a one-vs-one kernel SVM
//! trained with SMO, and a k-nearest-neighbor baseline.

mod kernel;
mod knn;
mod persist;
mod smo;
mod svm;

pub use crate::features::LabeledSample;
pub use kernel::{KernelKind, KernelParams};
pub use knn::KnnModel;
pub use persist::Model;
pub use smo::{BinarySolution, SmoConfig};
pub use svm::{svm_predict, svm_train, BinaryMachine, Prediction, SvmModel, TrainOptions};

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Checks that `data` is non-empty with a consistent dimension, returning
/// that dimension and the sorted distinct labels.
pub(crate) fn validate_training_data(data: &[LabeledSample]) -> Result<(usize, Vec<u8>)> {
    let first = data.first().ok_or(Error::EmptyData)?;
    let dim = first.features.len();
    if dim == 0 {
        return Err(Error::InvalidParameter("zero-dimensional features".into()));
    }
    if let Some(bad) = data.iter().find(|s| s.features.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.features.len(),
        });
    }
    let classes: BTreeSet<u8> = data.iter().map(|s| s.label).collect();
    Ok((dim, classes.into_iter().collect()))
}
