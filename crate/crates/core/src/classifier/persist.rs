//! Line-oriented text model files.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! loaded model reproduces predictions bit for bit.

use std::fmt::Write as _;

use super::kernel::{KernelKind, KernelParams};
use super::knn::KnnModel;
use super::svm::{BinaryMachine, SvmModel};
use crate::error::{Error, Result};
use crate::features::FeatureScaler;

const SVM_MAGIC: &str = "#rwrl-svm-v";
const KNN_MAGIC: &str = "#rwrl-knn-v";
const VERSION: &str = "1";

/// Any persisted classifier.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Svm(SvmModel),
    Knn(KnnModel),
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Model::Svm(m) => m.dim(),
            Model::Knn(m) => m.dim(),
        }
    }

    pub fn predict(&self, v: &[f64]) -> Result<u8> {
        match self {
            Model::Svm(m) => m.predict(v).map(|p| p.label),
            Model::Knn(m) => m.predict(v),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            Model::Svm(m) => m.to_bytes(),
            Model::Knn(m) => m.to_bytes(),
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes).map_err(|_| corrupt("not UTF-8"))?;
        let header = text.lines().next().unwrap_or("");
        if header.starts_with(SVM_MAGIC) {
            SvmModel::from_bytes(bytes).map(Model::Svm)
        } else if header.starts_with(KNN_MAGIC) {
            KnnModel::from_bytes(bytes).map(Model::Knn)
        } else {
            Err(corrupt("unrecognized header"))
        }
    }
}

impl From<SvmModel> for Model {
    fn from(m: SvmModel) -> Self {
        Model::Svm(m)
    }
}

impl From<KnnModel> for Model {
    fn from(m: KnnModel) -> Self {
        Model::Knn(m)
    }
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptModel(msg.into())
}

fn push_floats(out: &mut String, key: &str, values: &[f64]) {
    out.push_str(key);
    for v in values {
        write!(out, " {v}").unwrap();
    }
    out.push('\n');
}

fn write_scaler(out: &mut String, scaler: &FeatureScaler) {
    writeln!(out, "dim {}", scaler.dim()).unwrap();
    push_floats(out, "mean", &scaler.mean);
    push_floats(out, "std", &scaler.std);
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(bytes: &'a [u8], magic: &str) -> Result<Self> {
        let text = std::str::from_utf8(bytes).map_err(|_| corrupt("not UTF-8"))?;
        let mut inner = text.lines().enumerate();
        let header = inner.next().map(|(_, l)| l.trim()).unwrap_or("");
        let version = header
            .strip_prefix(magic)
            .ok_or_else(|| corrupt(format!("expected {magic}{VERSION} header")))?;
        if version != VERSION {
            return Err(Error::VersionMismatch(header.to_string()));
        }
        Ok(Lines { inner })
    }

    /// Next line split into tokens, checking its leading keyword.
    fn expect(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let (no, line) = self
            .inner
            .next()
            .ok_or_else(|| corrupt(format!("unexpected end of file, expected {key:?}")))?;
        let mut tokens = line.split_ascii_whitespace();
        match tokens.next() {
            Some(k) if k == key => Ok(tokens.collect()),
            _ => Err(corrupt(format!("line {}: expected {key:?}", no + 1))),
        }
    }

    fn expect_value<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let tokens = self.expect(key)?;
        match tokens.as_slice() {
            [v] => v.parse().map_err(|_| corrupt(format!("bad value for {key:?}"))),
            _ => Err(corrupt(format!("expected one value for {key:?}"))),
        }
    }

    fn expect_floats(&mut self, key: &str, len: usize) -> Result<Vec<f64>> {
        let values = parse_floats(&self.expect(key)?)?;
        if values.len() != len {
            return Err(corrupt(format!("{key:?} has {} values, expected {len}", values.len())));
        }
        Ok(values)
    }

    fn expect_end(&mut self) -> Result<()> {
        self.expect("end")?;
        Ok(())
    }

    fn read_scaler(&mut self) -> Result<FeatureScaler> {
        let dim: usize = self.expect_value("dim")?;
        if dim == 0 {
            return Err(corrupt("zero dimension"));
        }
        let mean = self.expect_floats("mean", dim)?;
        let std = self.expect_floats("std", dim)?;
        Ok(FeatureScaler { mean, std })
    }

    fn next_raw(&mut self) -> Result<Vec<&'a str>> {
        self.inner
            .next()
            .map(|(_, l)| l.split_ascii_whitespace().collect())
            .ok_or_else(|| corrupt("unexpected end of file"))
    }
}

fn parse_floats(tokens: &[&str]) -> Result<Vec<f64>> {
    tokens
        .iter()
        .map(|t| t.parse::<f64>().map_err(|_| corrupt(format!("bad number {t:?}"))))
        .collect()
}

impl SvmModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = String::new();
        writeln!(out, "{SVM_MAGIC}{VERSION}").unwrap();
        let k = &self.kernel;
        writeln!(out, "kernel {}", k.kind).unwrap();
        writeln!(out, "degree {}", k.degree).unwrap();
        writeln!(out, "gamma {}", k.gamma).unwrap();
        writeln!(out, "coef0 {}", k.coef0).unwrap();
        writeln!(out, "C {}", k.c).unwrap();
        let classes: Vec<String> = self.classes.iter().map(u8::to_string).collect();
        writeln!(out, "classes {}", classes.join(" ")).unwrap();
        write_scaler(&mut out, &self.scaler);
        writeln!(out, "machines {}", self.machines.len()).unwrap();
        for m in &self.machines {
            writeln!(
                out,
                "machine {} {} bias {} nsv {}",
                m.positive,
                m.negative,
                m.bias,
                m.support_vectors.len()
            )
            .unwrap();
            for (sv, coef) in m.support_vectors.iter().zip(&m.coefficients) {
                write!(out, "{coef}").unwrap();
                for x in sv {
                    write!(out, " {x}").unwrap();
                }
                out.push('\n');
            }
        }
        out.push_str("end\n");
        out.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut lines = Lines::new(bytes, SVM_MAGIC)?;
        let kind: String = lines.expect_value("kernel")?;
        let kernel = KernelParams {
            kind: kind.parse::<KernelKind>().map_err(|_| corrupt("unknown kernel"))?,
            degree: lines.expect_value("degree")?,
            gamma: lines.expect_value("gamma")?,
            coef0: lines.expect_value("coef0")?,
            c: lines.expect_value("C")?,
        };
        kernel.validate().map_err(|e| corrupt(e.to_string()))?;
        let classes = lines
            .expect("classes")?
            .iter()
            .map(|t| t.parse::<u8>().map_err(|_| corrupt("bad class label")))
            .collect::<Result<Vec<u8>>>()?;
        if classes.len() < 2 || classes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(corrupt("class list must be sorted, distinct, and have >= 2 entries"));
        }
        let scaler = lines.read_scaler()?;
        let dim = scaler.dim();
        let count: usize = lines.expect_value("machines")?;
        if count != classes.len() * (classes.len() - 1) / 2 {
            return Err(corrupt("machine count does not match class count"));
        }
        let mut machines = Vec::with_capacity(count);
        for _ in 0..count {
            let head = lines.expect("machine")?;
            let (positive, negative, bias, nsv) = match head.as_slice() {
                [p, n, "bias", b, "nsv", s] => (
                    p.parse::<u8>().map_err(|_| corrupt("bad machine label"))?,
                    n.parse::<u8>().map_err(|_| corrupt("bad machine label"))?,
                    b.parse::<f64>().map_err(|_| corrupt("bad bias"))?,
                    s.parse::<usize>().map_err(|_| corrupt("bad support vector count"))?,
                ),
                _ => return Err(corrupt("malformed machine header")),
            };
            if classes.binary_search(&positive).is_err() || classes.binary_search(&negative).is_err() {
                return Err(corrupt("machine label not in class list"));
            }
            let mut support_vectors = Vec::with_capacity(nsv);
            let mut coefficients = Vec::with_capacity(nsv);
            for _ in 0..nsv {
                let values = parse_floats(&lines.next_raw()?)?;
                if values.len() != dim + 1 {
                    return Err(corrupt("support vector has the wrong dimension"));
                }
                coefficients.push(values[0]);
                support_vectors.push(values[1..].to_vec());
            }
            machines.push(BinaryMachine {
                positive,
                negative,
                support_vectors,
                coefficients,
                bias,
            });
        }
        lines.expect_end()?;
        Ok(SvmModel {
            kernel,
            classes,
            scaler,
            machines,
        })
    }
}

impl KnnModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = String::new();
        writeln!(out, "{KNN_MAGIC}{VERSION}").unwrap();
        writeln!(out, "k {}", self.k).unwrap();
        write_scaler(&mut out, &self.scaler);
        writeln!(out, "samples {}", self.samples.len()).unwrap();
        for (x, label) in &self.samples {
            write!(out, "{label}").unwrap();
            for v in x {
                write!(out, " {v}").unwrap();
            }
            out.push('\n');
        }
        out.push_str("end\n");
        out.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut lines = Lines::new(bytes, KNN_MAGIC)?;
        let k: usize = lines.expect_value("k")?;
        let scaler = lines.read_scaler()?;
        let count: usize = lines.expect_value("samples")?;
        if k == 0 || k > count {
            return Err(corrupt("k out of range"));
        }
        let mut samples = Vec::with_capacity(count);
        for _ in 0..count {
            let tokens = lines.next_raw()?;
            let (label, rest) = tokens.split_first().ok_or_else(|| corrupt("empty sample line"))?;
            let label = label.parse::<u8>().map_err(|_| corrupt("bad label"))?;
            let x = parse_floats(rest)?;
            if x.len() != scaler.dim() {
                return Err(corrupt("sample has the wrong dimension"));
            }
            samples.push((x, label));
        }
        lines.expect_end()?;
        Ok(KnnModel { k, scaler, samples })
    }
}
