//! Evaluation protocols (holdout, stratified k-fold), confusion matrices and
//! the per-class / overall metric tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classifier::{KernelParams, KnnModel, LabeledSample, Model, SvmModel, TrainOptions};
use crate::error::{Error, Result};

/// Counts of (true class, predicted class); rows are true classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMatrix {
    classes: Vec<u8>,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    /// All-zero matrix over `classes`, which are sorted and deduplicated.
    pub fn new(classes: &[u8]) -> Self {
        let mut classes = classes.to_vec();
        classes.sort_unstable();
        classes.dedup();
        let k = classes.len();
        ConfusionMatrix {
            classes,
            counts: vec![0; k * k],
        }
    }

    /// Builds a matrix from explicit rows, one per class in `classes` order.
    pub fn from_rows(classes: &[u8], rows: &[Vec<u64>]) -> Result<Self> {
        let k = classes.len();
        if classes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("classes must be sorted and distinct".into()));
        }
        if rows.len() != k || rows.iter().any(|r| r.len() != k) {
            return Err(Error::LengthMismatch {
                expected: k,
                found: rows.len(),
            });
        }
        Ok(ConfusionMatrix {
            classes: classes.to_vec(),
            counts: rows.concat(),
        })
    }

    pub fn classes(&self) -> &[u8] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    fn index_of(&self, label: u8) -> Result<usize> {
        self.classes
            .binary_search(&label)
            .map_err(|_| Error::UnknownLabel(label))
    }

    pub fn record(&mut self, truth: u8, predicted: u8) -> Result<()> {
        let (t, p) = (self.index_of(truth)?, self.index_of(predicted)?);
        let k = self.num_classes();
        self.counts[t * k + p] += 1;
        Ok(())
    }

    /// Count at row `t`, column `p` (indices into [`classes`](Self::classes)).
    pub fn get(&self, t: usize, p: usize) -> u64 {
        self.counts[t * self.num_classes() + p]
    }

    pub fn row(&self, t: usize) -> &[u64] {
        let k = self.num_classes();
        &self.counts[t * k..(t + 1) * k]
    }

    pub fn row_sum(&self, t: usize) -> u64 {
        self.row(t).iter().sum()
    }

    pub fn col_sum(&self, p: usize) -> u64 {
        (0..self.num_classes()).map(|t| self.get(t, p)).sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.num_classes()).map(|c| self.get(c, c)).sum()
    }

    /// Adds another matrix over the same classes.
    pub fn merge(&mut self, other: &ConfusionMatrix) -> Result<()> {
        if other.classes != self.classes {
            return Err(Error::InvalidParameter(
                "confusion matrices have different classes".into(),
            ));
        }
        self.counts.iter_mut().zip(&other.counts).for_each(|(a, b)| *a += b);
        Ok(())
    }

    /// Table layout: `true\predicted,<labels...>` then one row per true class.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("true\\predicted");
        for c in &self.classes {
            write!(out, ",{c}").unwrap();
        }
        out.push('\n');
        for (t, c) in self.classes.iter().enumerate() {
            write!(out, "{c}").unwrap();
            for v in self.row(t) {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidParameter(format!("confusion CSV: {msg}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty"))?;
        let classes = header
            .split(',')
            .skip(1)
            .map(|t| t.trim().parse::<u8>().map_err(|_| bad("bad class label")))
            .collect::<Result<Vec<u8>>>()?;
        let mut rows = Vec::with_capacity(classes.len());
        for (i, line) in lines.enumerate() {
            let mut fields = line.split(',');
            let label = fields
                .next()
                .and_then(|t| t.trim().parse::<u8>().ok())
                .ok_or_else(|| bad("bad row label"))?;
            if classes.get(i) != Some(&label) {
                return Err(bad("row labels must match the header order"));
            }
            rows.push(
                fields
                    .map(|t| t.trim().parse::<u64>().map_err(|_| bad("bad count")))
                    .collect::<Result<Vec<u64>>>()?,
            );
        }
        ConfusionMatrix::from_rows(&classes, &rows)
    }
}

/// Accumulates `(true, predicted)` pairs.
pub fn confusion(pairs: &[(u8, u8)], classes: &[u8]) -> Result<ConfusionMatrix> {
    let mut cm = ConfusionMatrix::new(classes);
    for &(t, p) in pairs {
        cm.record(t, p)?;
    }
    Ok(cm)
}

/// One-vs-rest statistics for a single class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassMetrics {
    pub label: u8,
    pub tp: u64,
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
    pub tpr: f64,
    pub fpr: f64,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub mcc: f64,
    /// Balanced accuracy `(TPR + 1 - FPR) / 2`, the area under the ROC of a
    /// hard classifier.
    pub auc: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

fn class_metrics_unchecked(cm: &ConfusionMatrix) -> Vec<ClassMetrics> {
    let n = cm.total();
    (0..cm.num_classes())
        .map(|c| {
            let tp = cm.get(c, c);
            let fn_ = cm.row_sum(c) - tp;
            let fp = cm.col_sum(c) - tp;
            let tn = n - tp - fn_ - fp;
            let (tpf, fnf, fpf, tnf) = (tp as f64, fn_ as f64, fp as f64, tn as f64);
            let tpr = ratio(tpf, tpf + fnf);
            let fpr = ratio(fpf, fpf + tnf);
            let precision = ratio(tpf, tpf + fpf);
            let f_measure = ratio(2.0 * precision * tpr, precision + tpr);
            let mcc = ratio(
                tpf * tnf - fpf * fnf,
                ((tpf + fpf) * (tpf + fnf) * (tnf + fpf) * (tnf + fnf)).sqrt(),
            );
            ClassMetrics {
                label: cm.classes[c],
                tp,
                fn_,
                fp,
                tn,
                tpr,
                fpr,
                precision,
                recall: tpr,
                f_measure,
                mcc,
                auc: (tpr + 1.0 - fpr) / 2.0,
            }
        })
        .collect()
}

/// Per-class metrics. Every class needs at least one true sample.
pub fn class_metrics(cm: &ConfusionMatrix) -> Result<Vec<ClassMetrics>> {
    if let Some(c) = (0..cm.num_classes()).find(|&c| cm.row_sum(c) == 0) {
        return Err(Error::DegenerateMatrix(cm.classes[c]));
    }
    Ok(class_metrics_unchecked(cm))
}

/// Support-weighted average of the per-class rows.
pub fn weighted_average(metrics: &[ClassMetrics]) -> [f64; 7] {
    let total: u64 = metrics.iter().map(|m| m.tp + m.fn_).sum();
    let mut avg = [0.0; 7];
    if total == 0 {
        return avg;
    }
    for m in metrics {
        let w = (m.tp + m.fn_) as f64 / total as f64;
        let row = [m.tpr, m.fpr, m.precision, m.recall, m.f_measure, m.mcc, m.auc];
        avg.iter_mut().zip(row).for_each(|(a, v)| *a += w * v);
    }
    avg
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OverallMetrics {
    pub accuracy: f64,
    pub kappa: f64,
    /// Mean absolute error of one-hot predictions against one-hot truth,
    /// averaged over all class dimensions: `2e / K`.
    pub mae: f64,
    /// `sqrt(2e / K)`.
    pub rmse: f64,
    /// Normal-approximation 95% half-width of the accuracy.
    pub ci95_halfwidth: f64,
}

fn overall_metrics_unchecked(cm: &ConfusionMatrix) -> OverallMetrics {
    let n = cm.total() as f64;
    let k = cm.num_classes() as f64;
    if n == 0.0 {
        return OverallMetrics {
            accuracy: 0.0,
            kappa: 0.0,
            mae: 0.0,
            rmse: 0.0,
            ci95_halfwidth: 0.0,
        };
    }
    let accuracy = cm.trace() as f64 / n;
    let chance: f64 = (0..cm.num_classes())
        .map(|c| cm.row_sum(c) as f64 * cm.col_sum(c) as f64)
        .sum::<f64>()
        / (n * n);
    let kappa = if chance < 1.0 {
        (accuracy - chance) / (1.0 - chance)
    } else if accuracy == 1.0 {
        1.0
    } else {
        0.0
    };
    let error = 1.0 - accuracy;
    let mae = 2.0 * error / k;
    OverallMetrics {
        accuracy,
        kappa,
        mae,
        rmse: mae.sqrt(),
        ci95_halfwidth: 1.96 * (accuracy * (1.0 - accuracy) / n).sqrt(),
    }
}

pub fn overall_metrics(cm: &ConfusionMatrix) -> Result<OverallMetrics> {
    if cm.total() == 0 {
        return Err(Error::EmptyMatrix);
    }
    Ok(overall_metrics_unchecked(cm))
}

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

fn indices_by_class(labels: &[u8]) -> BTreeMap<u8, Vec<usize>> {
    let mut by_class: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    by_class
}

/// Partitions indices into `k` folds with per-class counts differing by at
/// most one between folds. Each fold is sorted.
pub fn stratified_kfold(labels: &[u8], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 folds, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for (label, mut idx) in indices_by_class(labels) {
        if idx.len() < k {
            return Err(Error::TooFewSamples(format!(
                "class {label} has {} samples for {k} folds",
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        for i in idx {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(folds)
}

/// Draws `train_per_class` samples of every class for training; everything
/// else is the test set. Both index lists are sorted.
pub fn holdout_split(labels: &[u8], train_per_class: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (label, mut idx) in indices_by_class(labels) {
        if idx.len() <= train_per_class {
            return Err(Error::TooFewSamples(format!(
                "class {label} has {} samples, need more than {train_per_class}",
                idx.len()
            )));
        }
        idx.shuffle(&mut rng);
        train.extend_from_slice(&idx[..train_per_class]);
        test.extend_from_slice(&idx[train_per_class..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

// ---------------------------------------------------------------------------
// Protocols
// ---------------------------------------------------------------------------

/// Which classifier to train in an evaluation run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClassifierSpec {
    Svm { kernel: KernelParams, scale: bool },
    Knn { k: usize, scale: bool },
}

impl ClassifierSpec {
    pub fn train(&self, data: &[LabeledSample], seed: u64) -> Result<Model> {
        match *self {
            ClassifierSpec::Svm { kernel, scale } => {
                let options = TrainOptions {
                    seed,
                    scale,
                    ..Default::default()
                };
                SvmModel::train(data, &kernel, &options).map(Model::Svm)
            }
            ClassifierSpec::Knn { k, scale } => KnnModel::fit(data, k, scale).map(Model::Knn),
        }
    }
}

fn pick(samples: &[LabeledSample], idx: &[usize]) -> Vec<LabeledSample> {
    idx.iter().map(|&i| samples[i].clone()).collect()
}

fn class_list(samples: &[LabeledSample]) -> Vec<u8> {
    let mut classes: Vec<u8> = samples.iter().map(|s| s.label).collect();
    classes.sort_unstable();
    classes.dedup();
    classes
}

/// Trains on `train` and tallies predictions on `test`.
pub fn train_and_test(
    spec: &ClassifierSpec,
    train: &[LabeledSample],
    test: &[LabeledSample],
    classes: &[u8],
    seed: u64,
) -> Result<ConfusionMatrix> {
    let model = spec.train(train, seed)?;
    let predictions = test
        .par_iter()
        .map(|s| model.predict(s.features.as_slice()).map(|p| (s.label, p)))
        .collect::<Result<Vec<_>>>()?;
    confusion(&predictions, classes)
}

pub fn evaluate_holdout(
    spec: &ClassifierSpec,
    samples: &[LabeledSample],
    train_per_class: usize,
    seed: u64,
) -> Result<ConfusionMatrix> {
    let labels: Vec<u8> = samples.iter().map(|s| s.label).collect();
    let (train, test) = holdout_split(&labels, train_per_class, seed)?;
    train_and_test(
        spec,
        &pick(samples, &train),
        &pick(samples, &test),
        &class_list(samples),
        seed,
    )
}

/// Per-fold confusion matrices of a stratified k-fold run. Each fold is
/// tested once against a model trained on the other folds.
pub fn cross_validate(
    spec: &ClassifierSpec,
    samples: &[LabeledSample],
    folds: usize,
    seed: u64,
) -> Result<Vec<ConfusionMatrix>> {
    let labels: Vec<u8> = samples.iter().map(|s| s.label).collect();
    let classes = class_list(samples);
    let split = stratified_kfold(&labels, folds, seed)?;
    (0..folds)
        .into_par_iter()
        .map(|f| {
            let train: Vec<usize> = split
                .iter()
                .enumerate()
                .filter(|&(g, _)| g != f)
                .flat_map(|(_, idx)| idx.iter().copied())
                .collect();
            train_and_test(spec, &pick(samples, &train), &pick(samples, &split[f]), &classes, seed)
        })
        .collect()
}

/// Sum of several matrices over the same classes.
pub fn merge_all(matrices: &[ConfusionMatrix]) -> Result<ConfusionMatrix> {
    let first = matrices.first().ok_or(Error::EmptyMatrix)?;
    let mut total = first.clone();
    for m in &matrices[1..] {
        total.merge(m)?;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Metric tables of one confusion matrix, renderable as text and CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub confusion: ConfusionMatrix,
    pub per_class: Vec<ClassMetrics>,
    pub overall: OverallMetrics,
}

impl Report {
    /// Never fails: classes without samples (or an empty matrix) get zero
    /// metrics.
    pub fn new(confusion: ConfusionMatrix) -> Self {
        let per_class = class_metrics_unchecked(&confusion);
        let overall = overall_metrics_unchecked(&confusion);
        Report {
            confusion,
            per_class,
            overall,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<8}{:>8}{:>8}{:>11}{:>8}{:>11}{:>8}{:>8}",
            "Class", "TPR", "FPR", "Precision", "Recall", "F-measure", "MCC", "AUC"
        )
        .unwrap();
        let row = |out: &mut String, name: &str, v: [f64; 7]| {
            writeln!(
                out,
                "{:<8}{:>8.3}{:>8.3}{:>11.3}{:>8.3}{:>11.3}{:>8.3}{:>8.3}",
                name, v[0], v[1], v[2], v[3], v[4], v[5], v[6]
            )
            .unwrap();
        };
        for m in &self.per_class {
            row(
                &mut out,
                &format!("'{}'", m.label),
                [m.tpr, m.fpr, m.precision, m.recall, m.f_measure, m.mcc, m.auc],
            );
        }
        row(&mut out, "Average", weighted_average(&self.per_class));
        let o = &self.overall;
        writeln!(out).unwrap();
        writeln!(
            out,
            "Accuracy {:.4} (+/- {:.4})  Kappa {:.4}  MAE {:.4}  RMSE {:.4}  N {}",
            o.accuracy,
            o.ci95_halfwidth,
            o.kappa,
            o.mae,
            o.rmse,
            self.confusion.total()
        )
        .unwrap();
        writeln!(out).unwrap();

        writeln!(out, "Confusion matrix (rows: true, columns: predicted)").unwrap();
        write!(out, "{:<8}", "").unwrap();
        for c in self.confusion.classes() {
            write!(out, "{:>7}", format!("'{c}'")).unwrap();
        }
        out.push('\n');
        for (t, c) in self.confusion.classes().iter().enumerate() {
            write!(out, "{:<8}", format!("'{c}'")).unwrap();
            for v in self.confusion.row(t) {
                write!(out, "{v:>7}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// `class,TPR,FPR,precision,recall,F,MCC,AUC` at 4 decimals.
    pub fn per_class_csv(&self) -> String {
        let mut out = String::from("class,TPR,FPR,precision,recall,F,MCC,AUC\n");
        for m in &self.per_class {
            writeln!(
                out,
                "{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}",
                m.label, m.tpr, m.fpr, m.precision, m.recall, m.f_measure, m.mcc, m.auc
            )
            .unwrap();
        }
        out
    }

    /// `accuracy,kappa,MAE,RMSE,ci95` at 4 decimals.
    pub fn overall_csv(&self) -> String {
        let o = &self.overall;
        format!(
            "accuracy,kappa,MAE,RMSE,ci95\n{:.4},{:.4},{:.4},{:.4},{:.4}\n",
            o.accuracy, o.kappa, o.mae, o.rmse, o.ci95_halfwidth
        )
    }

    /// Writes `report.txt`, `per_class.csv`, `overall.csv` and
    /// `confusion.csv` into `dir`, creating it if needed.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.txt"), self.render_text())?;
        std::fs::write(dir.join("per_class.csv"), self.per_class_csv())?;
        std::fs::write(dir.join("overall.csv"), self.overall_csv())?;
        std::fs::write(dir.join("confusion.csv"), self.confusion.to_csv())?;
        Ok(())
    }
}
