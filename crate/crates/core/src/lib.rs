//! Handwritten digit recognition built around regional weighted run-length
//! (RWRL) features.
//!
//! The pipeline is split into small, pure stages:
//!
//! * [`raster`]: image decoding, Gaussian smoothing, Otsu binarization and
//!   normalization to a 64×64 binary digit.
//! * [`contour`]: boundary pixel extraction.
//! * [`features`]: the 196-dimensional run-length feature vector.
//! * [`classifier`]: a one-vs-one kernel SVM trained with SMO, and a k-NN
//!   baseline.
//! * [`eval`]: holdout / stratified k-fold protocols, confusion matrices and
//!   the per-class and overall metric tables.
//! * [`dataset`]: directory manifests and a seeded synthetic digit generator.
//! * [`cli`]: the `rwrl` command line front end.

pub mod classifier;
pub mod cli;
pub mod contour;
pub mod dataset;
mod error;
pub mod eval;
pub mod features;
pub mod raster;

pub use error::{Error, Result};

pub use classifier::{KernelKind, KernelParams, KnnModel, LabeledSample, Model, SvmModel};
pub use contour::{extract_contour, ContourImage};
pub use eval::{ClassMetrics, ConfusionMatrix, OverallMetrics, Report};
pub use features::{extract_features, FeatureVector};
pub use raster::{BinaryImage, GrayImage, Polarity, PreprocessConfig};

/// Full chain from a grayscale digit to its feature vector: smoothing,
/// binarization, normalization, contour, run-length features.
pub fn image_features(img: &GrayImage, config: &PreprocessConfig) -> Result<FeatureVector> {
    let bin = raster::preprocess(img, config)?;
    Ok(extract_features(&extract_contour(&bin)?))
}
