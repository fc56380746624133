//! Stratified k-fold cross-validation of the SVM on a synthetic corpus,
//! with per-fold accuracies and the pooled report.
//!
//! ```text
//! cargo run --release --example cross_validation -- [per_class] [folds]
//! ```

use rayon::prelude::*;
use rwrl::classifier::KernelParams;
use rwrl::dataset::synth_corpus;
use rwrl::eval::{cross_validate, merge_all, ClassifierSpec, Report};
use rwrl::{image_features, LabeledSample, PreprocessConfig};

fn main() -> rwrl::Result<()> {
    let mut args = std::env::args().skip(1);
    let per_class: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    let folds: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);

    let config = PreprocessConfig::default();
    let samples = synth_corpus(7, per_class)
        .par_iter()
        .map(|(img, label)| Ok(LabeledSample::new(image_features(img, &config)?, *label)))
        .collect::<rwrl::Result<Vec<_>>>()?;

    let spec = ClassifierSpec::Svm {
        kernel: KernelParams::default(),
        scale: true,
    };
    let matrices = cross_validate(&spec, &samples, folds, 7)?;
    for (i, cm) in matrices.iter().enumerate() {
        println!("fold {}: {}/{} correct", i + 1, cm.trace(), cm.total());
    }
    print!("\n{}", Report::new(merge_all(&matrices)?).render_text());
    Ok(())
}
