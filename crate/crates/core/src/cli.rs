//! The `rwrl` command line front end.
//!
//! Exit codes: 0 on success, 1 on usage or unexpected errors, 2 on missing,
//! unreadable or malformed input, 3 on a feature dimension mismatch.

use std::ffi::OsString;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::classifier::{KernelKind, KernelParams, LabeledSample, Model};
use crate::dataset::{scan_dataset, synth_generate};
use crate::error::Error;
use crate::eval::{self, ClassifierSpec, ConfusionMatrix, Report};
use crate::features::{read_feature_file, write_feature_file};
use crate::raster::{self, binarize, decode_image, encode_pgm, normalize_digit, Polarity, PreprocessConfig};
use crate::{extract_contour, extract_features};

#[derive(Debug, Parser)]
#[command(
    name = "rwrl",
    version,
    about = "Handwritten digit recognition with regional weighted run-length features"
)]
pub struct Cli {
    /// Worker threads for per-image and per-model work (default: logical CPUs)
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a synthetic digit corpus as out/<digit>/<index>.pgm
    Synth(SynthArgs),
    /// Smooth, binarize and normalize images to 64x64
    Preprocess(PreprocessArgs),
    /// Compute the 196-dimensional feature file of a class-labelled image tree
    Extract(ExtractArgs),
    /// Train a classifier on a feature file
    Train(TrainArgs),
    /// Classify the samples of a feature file with a saved model
    Predict(PredictArgs),
    /// Run a holdout or cross-validation experiment and write metric reports
    Eval(EvalArgs),
    /// Render metric reports from a confusion matrix CSV
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output directory
    #[arg(long)]
    pub output: PathBuf,
    /// Images per class
    #[arg(long, default_value_t = 100)]
    pub per_class: usize,
    /// Random seed
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct RasterArgs {
    /// Gaussian smoothing sigma in pixels (0 disables smoothing)
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Treat bright pixels as ink (default: dark ink on a light page)
    #[arg(long)]
    pub light_ink: bool,
}

impl RasterArgs {
    fn config(&self) -> Result<PreprocessConfig, CliError> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(CliError::usage("--sigma must be a non-negative number"));
        }
        Ok(PreprocessConfig {
            sigma: self.sigma,
            polarity: if self.light_ink {
                Polarity::LightInk
            } else {
                Polarity::DarkInk
            },
        })
    }
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Input directory, searched recursively for .pgm and .bmp files
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory; the input tree is mirrored with .pgm files
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub raster: RasterArgs,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Dataset root with one subdirectory per class, 0 to 9
    #[arg(long)]
    pub input: PathBuf,
    /// Feature file to write
    #[arg(long)]
    pub output: PathBuf,
    /// Inputs are already normalized binaries (as written by `preprocess`)
    #[arg(long)]
    pub preprocessed: bool,
    #[command(flatten)]
    pub raster: RasterArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifierKind {
    Svm,
    Knn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Poly,
    Linear,
    Rbf,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifierArgs {
    /// Classifier to train
    #[arg(long, value_enum, default_value_t = ClassifierKind::Svm)]
    pub classifier: ClassifierKind,
    /// SVM kernel
    #[arg(long, value_enum, default_value_t = KernelArg::Poly)]
    pub kernel: KernelArg,
    /// Polynomial kernel degree
    #[arg(long, default_value_t = 3)]
    pub degree: u32,
    /// Kernel gamma (default: 1 / feature dimension)
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Polynomial kernel offset
    #[arg(long, default_value_t = 1.0)]
    pub coef0: f64,
    /// SVM soft-margin penalty
    #[arg(long = "C", default_value_t = 1.0)]
    pub c: f64,
    /// Neighbors for the k-NN classifier
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Disable z-scoring of features
    #[arg(long)]
    pub no_scale: bool,
}

impl ClassifierArgs {
    fn spec(&self, dim: usize) -> Result<ClassifierSpec, CliError> {
        let scale = !self.no_scale;
        Ok(match self.classifier {
            ClassifierKind::Knn => ClassifierSpec::Knn { k: self.k, scale },
            ClassifierKind::Svm => {
                let kernel = KernelParams {
                    kind: match self.kernel {
                        KernelArg::Poly => KernelKind::Polynomial,
                        KernelArg::Linear => KernelKind::Linear,
                        KernelArg::Rbf => KernelKind::Rbf,
                    },
                    degree: self.degree,
                    gamma: self.gamma.unwrap_or(1.0 / dim as f64),
                    coef0: self.coef0,
                    c: self.c,
                };
                kernel.validate().map_err(|e| CliError::usage(e.to_string()))?;
                ClassifierSpec::Svm { kernel, scale }
            }
        })
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training feature file
    #[arg(long)]
    pub features: PathBuf,
    /// Model file to write
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
    /// Random seed
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model file written by `train`
    #[arg(long)]
    pub model: PathBuf,
    /// Feature file to classify
    #[arg(long)]
    pub features: PathBuf,
    /// Predictions CSV (default: standard output)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Feature file with all labelled samples
    #[arg(long)]
    pub features: PathBuf,
    /// Holdout mode: training samples drawn per class, the rest is tested
    #[arg(long, conflicts_with = "cv")]
    pub holdout: Option<usize>,
    /// Stratified cross-validation with this many folds (default mode, 3 folds)
    #[arg(long)]
    pub cv: Option<usize>,
    /// Directory for report.txt, per_class.csv, overall.csv, confusion.csv
    #[arg(long, default_value = "report")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub classifier: ClassifierArgs,
    /// Random seed for splits and training
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Confusion matrix CSV (header `true\predicted,<labels>`, one row per true class)
    #[arg(long)]
    pub confusion: PathBuf,
    /// Directory for the report files (default: print only)
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// A failure with its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionMismatch { .. } | Error::LengthMismatch { .. } => 3,
            Error::MalformedHeader(_)
            | Error::UnsupportedFormat(_)
            | Error::TruncatedData { .. }
            | Error::MalformedFeatureFile { .. }
            | Error::CorruptModel(_)
            | Error::VersionMismatch(_)
            | Error::MissingClassDir(_)
            | Error::NoImages(_)
            | Error::Io(_) => 2,
            _ => 1,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn io_context(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::input(format!("{}: {e}", path.display()))
}

/// Parses `std::env::args` and runs.
pub fn main() -> ExitCode {
    run_from(std::env::args_os())
}

/// Parses the given arguments (first one is the program name) and runs,
/// reporting errors on stderr.
pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.jobs {
        Some(0) => return Err(CliError::usage("--jobs must be at least 1")),
        Some(n) => {
            // the global pool can only be set once per process
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        None => {}
    }
    match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Preprocess(a) => cmd_preprocess(&a),
        Command::Extract(a) => cmd_extract(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Report(a) => cmd_report(&a),
    }
}

fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    let manifest = synth_generate(args.seed, args.per_class, &args.output)?;
    eprintln!("wrote {} images to {}", manifest.len(), args.output.display());
    Ok(())
}

fn is_image_path(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm") || e.eq_ignore_ascii_case("bmp"))
}

fn collect_images(root: &Path, rel: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    let mut items: Vec<_> = fs::read_dir(root.join(rel))?.collect::<Result<_, _>>()?;
    items.sort_by_key(|e| e.file_name());
    for item in items {
        let child = rel.join(item.file_name());
        let ty = item.file_type()?;
        if ty.is_dir() {
            collect_images(root, &child, out)?;
        } else if ty.is_file() && is_image_path(&child) {
            out.push(child);
        }
    }
    Ok(())
}

fn cmd_preprocess(args: &PreprocessArgs) -> Result<(), CliError> {
    let config = args.raster.config()?;
    let mut inputs = Vec::new();
    collect_images(&args.input, Path::new(""), &mut inputs).map_err(io_context(&args.input))?;
    if inputs.is_empty() {
        return Err(CliError::input(format!("no images under {}", args.input.display())));
    }

    let results: Vec<Result<(), String>> = inputs
        .par_iter()
        .map(|rel| {
            let src = args.input.join(rel);
            let bytes = fs::read(&src).map_err(|e| e.to_string())?;
            let img = decode_image(&bytes).map_err(|e| e.to_string())?;
            let bin = raster::preprocess(&img, &config).map_err(|e| e.to_string())?;
            let dst = args.output.join(rel).with_extension("pgm");
            if let Some(parent) = dst.parent() {
                fs::create_dir_all(parent).map_err(|e| e.to_string())?;
            }
            fs::write(&dst, encode_pgm(&bin.to_gray())).map_err(|e| e.to_string())
        })
        .collect();

    let mut ok = 0;
    for (rel, result) in inputs.iter().zip(results) {
        match result {
            Ok(()) => ok += 1,
            Err(msg) => eprintln!("warning: skipping {}: {msg}", rel.display()),
        }
    }
    eprintln!("preprocessed {ok} of {} images", inputs.len());
    if ok == 0 {
        return Err(CliError::input("no image was preprocessed"));
    }
    Ok(())
}

fn cmd_extract(args: &ExtractArgs) -> Result<(), CliError> {
    let config = args.raster.config()?;
    let manifest = scan_dataset(&args.input)?;
    let results: Vec<Result<Option<LabeledSample>, Error>> = manifest
        .entries
        .par_iter()
        .map(|entry| {
            let img = decode_image(&fs::read(manifest.full_path(entry))?)?;
            let bin = if args.preprocessed {
                let bin = binarize(&img, 127, config.polarity);
                if bin.width() == raster::NORMALIZED_SIZE && bin.height() == raster::NORMALIZED_SIZE {
                    Ok(bin)
                } else {
                    normalize_digit(&bin)
                }
            } else {
                raster::preprocess(&img, &config)
            };
            match bin {
                Ok(bin) => Ok(Some(LabeledSample::new(
                    extract_features(&extract_contour(&bin)?),
                    entry.label,
                ))),
                Err(Error::EmptyImage) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut samples = Vec::with_capacity(results.len());
    for (entry, result) in manifest.entries.iter().zip(results) {
        match result {
            Ok(Some(s)) => samples.push(s),
            Ok(None) => eprintln!("warning: skipping {}: no foreground", entry.path.display()),
            Err(e) => {
                return Err(CliError::input(format!("{}: {e}", entry.path.display())));
            }
        }
    }
    if samples.is_empty() {
        return Err(CliError::input("no features were extracted"));
    }
    let file = fs::File::create(&args.output).map_err(io_context(&args.output))?;
    let mut out = std::io::BufWriter::new(file);
    write_feature_file(&mut out, &samples)?;
    out.flush().map_err(io_context(&args.output))?;
    eprintln!("wrote {} feature vectors to {}", samples.len(), args.output.display());
    Ok(())
}

fn load_features(path: &Path) -> Result<(usize, Vec<LabeledSample>), CliError> {
    let file = fs::File::open(path).map_err(io_context(path))?;
    let (dim, samples) = read_feature_file(BufReader::new(file)).map_err(|e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    })?;
    if samples.is_empty() {
        return Err(CliError::input(format!("{}: no samples", path.display())));
    }
    Ok((dim, samples))
}

fn cmd_train(args: &TrainArgs) -> Result<(), CliError> {
    let (dim, samples) = load_features(&args.features)?;
    let spec = args.classifier.spec(dim)?;
    let model = spec.train(&samples, args.seed)?;
    fs::write(&args.model, model.to_bytes()).map_err(io_context(&args.model))?;
    eprintln!(
        "trained on {} samples, model written to {}",
        samples.len(),
        args.model.display()
    );
    Ok(())
}

fn cmd_predict(args: &PredictArgs) -> Result<(), CliError> {
    let bytes = fs::read(&args.model).map_err(io_context(&args.model))?;
    let model = Model::from_bytes(&bytes)?;
    let (dim, samples) = load_features(&args.features)?;
    if dim != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: dim,
        }
        .into());
    }
    let predictions = samples
        .par_iter()
        .map(|s| model.predict(s.features.as_slice()))
        .collect::<Result<Vec<u8>, Error>>()?;

    let mut csv = String::from("index,label,predicted\n");
    let mut hits = 0;
    for (i, (s, p)) in samples.iter().zip(&predictions).enumerate() {
        csv.push_str(&format!("{i},{},{p}\n", s.label));
        hits += (s.label == *p) as usize;
    }
    match &args.output {
        Some(path) => fs::write(path, csv).map_err(io_context(path))?,
        None => print!("{csv}"),
    }
    eprintln!(
        "accuracy against file labels: {:.4} ({hits}/{})",
        hits as f64 / samples.len() as f64,
        samples.len()
    );
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<(), CliError> {
    let (dim, samples) = load_features(&args.features)?;
    let spec = args.classifier.spec(dim)?;
    let report = match args.holdout {
        Some(per_class) => {
            let cm = eval::evaluate_holdout(&spec, &samples, per_class, args.seed)?;
            Report::new(cm)
        }
        None => {
            let folds = args.cv.unwrap_or(3);
            let per_fold = eval::cross_validate(&spec, &samples, folds, args.seed)?;
            let mut csv = String::from("fold,accuracy,n\n");
            for (f, cm) in per_fold.iter().enumerate() {
                csv.push_str(&format!(
                    "{},{:.4},{}\n",
                    f + 1,
                    cm.trace() as f64 / cm.total().max(1) as f64,
                    cm.total()
                ));
            }
            fs::create_dir_all(&args.out_dir).map_err(io_context(&args.out_dir))?;
            let folds_path = args.out_dir.join("folds.csv");
            fs::write(&folds_path, csv).map_err(io_context(&folds_path))?;
            Report::new(eval::merge_all(&per_fold)?)
        }
    };
    report.write_to_dir(&args.out_dir)?;
    print!("{}", report.render_text());
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.confusion).map_err(io_context(&args.confusion))?;
    let cm = ConfusionMatrix::from_csv(&text).map_err(|e| CliError::input(e.to_string()))?;
    let report = Report::new(cm);
    if let Some(dir) = &args.out_dir {
        report.write_to_dir(dir)?;
    }
    print!("{}", report.render_text());
    Ok(())
}
