//! Trains an SVM and a k-NN model, writes both to disk, reads them back and
//! checks the reloaded models agree on fresh images.

use rwrl::classifier::{KernelParams, KnnModel, Model, SvmModel, TrainOptions};
use rwrl::dataset::synth_corpus;
use rwrl::{image_features, LabeledSample, PreprocessConfig};

fn extract(seed: u64, per_class: usize) -> rwrl::Result<Vec<LabeledSample>> {
    let config = PreprocessConfig::default();
    synth_corpus(seed, per_class)
        .iter()
        .map(|(img, label)| Ok(LabeledSample::new(image_features(img, &config)?, *label)))
        .collect()
}

fn main() -> rwrl::Result<()> {
    let train = extract(1, 40)?;
    let test = extract(2, 10)?;

    let models = [
        (
            "svm.model",
            Model::Svm(SvmModel::train(
                &train,
                &KernelParams::rbf(0.005, 10.0),
                &TrainOptions::default(),
            )?),
        ),
        ("knn.model", Model::Knn(KnnModel::fit(&train, 5, true)?)),
    ];
    let dir = std::env::temp_dir().join("rwrl-save-and-load");
    std::fs::create_dir_all(&dir)?;
    for (name, model) in &models {
        let path = dir.join(name);
        std::fs::write(&path, model.to_bytes())?;
        let loaded = Model::from_bytes(&std::fs::read(&path)?)?;
        let mut agree = 0;
        let mut correct = 0;
        for s in &test {
            let p = loaded.predict(s.features.as_slice())?;
            agree += (p == model.predict(s.features.as_slice())?) as usize;
            correct += (p == s.label) as usize;
        }
        println!(
            "{}: {} bytes, {agree}/{n} agree after reload, {correct}/{n} correct",
            path.display(),
            std::fs::metadata(&path)?.len(),
            n = test.len()
        );
    }
    Ok(())
}
