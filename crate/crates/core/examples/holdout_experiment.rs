//! Trains the polynomial SVM and the 3-NN baseline on a synthetic corpus
//! (500 training / 100 test images per class) and prints both reports.
//!
//! ```text
//! cargo run --release --example holdout_experiment -- [seed]
//! ```

use std::time::Instant;

use rayon::prelude::*;
use rwrl::classifier::KernelParams;
use rwrl::dataset::synth_corpus;
use rwrl::eval::{evaluate_holdout, ClassifierSpec, Report};
use rwrl::{image_features, LabeledSample, PreprocessConfig};

fn main() -> rwrl::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);

    let start = Instant::now();
    let config = PreprocessConfig::default();
    let samples = synth_corpus(seed, 600)
        .par_iter()
        .map(|(img, label)| Ok(LabeledSample::new(image_features(img, &config)?, *label)))
        .collect::<rwrl::Result<Vec<_>>>()?;
    println!("{} samples extracted in {:.2?}", samples.len(), start.elapsed());

    let specs = [
        (
            "SVM (polynomial)",
            ClassifierSpec::Svm {
                kernel: KernelParams::default(),
                scale: true,
            },
        ),
        ("3-NN", ClassifierSpec::Knn { k: 3, scale: true }),
    ];
    for (name, spec) in specs {
        let start = Instant::now();
        let report = Report::new(evaluate_holdout(&spec, &samples, 500, seed)?);
        println!(
            "\n== {name}: accuracy {:.4} ({:.2?})\n",
            report.overall.accuracy,
            start.elapsed()
        );
        print!("{}", report.render_text());
    }
    Ok(())
}
