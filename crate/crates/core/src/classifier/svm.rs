use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::kernel::KernelParams;
use super::smo::{self, Gram, SmoConfig};
use super::{validate_training_data, LabeledSample};
use crate::error::{Error, Result};
use crate::features::FeatureScaler;

/// Coefficients below this are not kept as support vectors.
const SUPPORT_EPS: f64 = 1e-12;

/// Training settings besides the kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainOptions {
    /// Seeds the per-machine sample order, which decides solver tie-breaks.
    pub seed: u64,
    /// z-score features with training statistics.
    pub scale: bool,
    pub smo: SmoConfig,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            seed: 0,
            scale: true,
            smo: SmoConfig::default(),
        }
    }
}

/// One binary machine of the one-vs-one ensemble. A positive decision value
/// votes for `positive`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryMachine {
    pub positive: u8,
    pub negative: u8,
    /// Support vectors in scaled feature space.
    pub support_vectors: Vec<Vec<f64>>,
    /// `y_i * alpha_i` per support vector.
    pub coefficients: Vec<f64>,
    pub bias: f64,
}

impl BinaryMachine {
    pub fn decision(&self, kernel: &KernelParams, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.coefficients)
            .map(|(sv, coef)| coef * kernel.eval(sv, x))
            .sum::<f64>()
            + self.bias
    }
}

/// A trained one-vs-one SVM.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel {
    pub(crate) kernel: KernelParams,
    pub(crate) classes: Vec<u8>,
    pub(crate) scaler: FeatureScaler,
    pub(crate) machines: Vec<BinaryMachine>,
}

/// Result of a one-vs-one vote.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub label: u8,
    /// Votes per class, aligned with [`SvmModel::classes`].
    pub votes: Vec<u32>,
}

/// Trains with default options except for the seed.
pub fn svm_train(data: &[LabeledSample], params: &KernelParams, seed: u64) -> Result<SvmModel> {
    SvmModel::train(
        data,
        params,
        &TrainOptions {
            seed,
            ..Default::default()
        },
    )
}

pub fn svm_predict(model: &SvmModel, v: &[f64]) -> Result<Prediction> {
    model.predict(v)
}

impl SvmModel {
    pub fn train(data: &[LabeledSample], params: &KernelParams, options: &TrainOptions) -> Result<Self> {
        params.validate()?;
        let (dim, classes) = validate_training_data(data)?;
        if classes.len() < 2 {
            return Err(Error::SingleClass);
        }
        let scaler = if options.scale {
            let raw: Vec<&[f64]> = data.iter().map(|s| s.features.as_slice()).collect();
            FeatureScaler::fit(&raw)?
        } else {
            FeatureScaler::identity(dim)
        };
        let scaled: Vec<Vec<f64>> = data
            .iter()
            .map(|s| scaler.transform(s.features.as_slice()))
            .collect::<Result<_>>()?;

        let mut pairs = Vec::new();
        for a in 0..classes.len() {
            for b in a + 1..classes.len() {
                pairs.push((classes[a], classes[b]));
            }
        }
        let machines = pairs
            .par_iter()
            .enumerate()
            .map(|(k, &(pos, neg))| {
                let seed = options.seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                train_pair(data, &scaled, pos, neg, params, &options.smo, seed)
            })
            .collect();

        Ok(SvmModel {
            kernel: *params,
            classes,
            scaler,
            machines,
        })
    }

    pub fn kernel(&self) -> &KernelParams {
        &self.kernel
    }

    pub fn classes(&self) -> &[u8] {
        &self.classes
    }

    pub fn machines(&self) -> &[BinaryMachine] {
        &self.machines
    }

    pub fn scaler(&self) -> &FeatureScaler {
        &self.scaler
    }

    pub fn dim(&self) -> usize {
        self.scaler.dim()
    }

    /// Decision values of every machine, in machine order.
    pub fn decision_values(&self, v: &[f64]) -> Result<Vec<f64>> {
        let x = self.scale_input(v)?;
        Ok(self.machines.iter().map(|m| m.decision(&self.kernel, &x)).collect())
    }

    /// Majority vote; ties go to the class with the larger summed |decision|
    /// over the machines it won, then to the smaller label.
    pub fn predict(&self, v: &[f64]) -> Result<Prediction> {
        let decisions = self.decision_values(v)?;
        let k = self.classes.len();
        let mut votes = vec![0u32; k];
        let mut strength = vec![0f64; k];
        let index_of = |label: u8| self.classes.binary_search(&label).expect("machine label in class list");
        for (m, d) in self.machines.iter().zip(decisions) {
            let winner = if d > 0.0 { m.positive } else { m.negative };
            let w = index_of(winner);
            votes[w] += 1;
            strength[w] += d.abs();
        }
        let mut best = 0;
        for c in 1..k {
            if votes[c] > votes[best] || (votes[c] == votes[best] && strength[c] > strength[best]) {
                best = c;
            }
        }
        Ok(Prediction {
            label: self.classes[best],
            votes,
        })
    }

    fn scale_input(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        self.scaler.transform(v)
    }
}

fn train_pair(
    data: &[LabeledSample],
    scaled: &[Vec<f64>],
    positive: u8,
    negative: u8,
    kernel: &KernelParams,
    smo_config: &SmoConfig,
    seed: u64,
) -> BinaryMachine {
    let mut members: Vec<usize> = (0..data.len())
        .filter(|&i| data[i].label == positive || data[i].label == negative)
        .collect();
    members.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let n = members.len();
    let y: Vec<f64> = members
        .iter()
        .map(|&i| if data[i].label == positive { 1.0 } else { -1.0 })
        .collect();
    let mut values = vec![0.0; n * n];
    for a in 0..n {
        let xa = &scaled[members[a]];
        for b in a..n {
            let k = kernel.eval(xa, &scaled[members[b]]);
            values[a * n + b] = k;
            values[b * n + a] = k;
        }
    }
    let solution = smo::solve(&Gram::new(n, values), &y, kernel.c, smo_config);

    // keep support vectors in original sample order
    let mut support: Vec<(usize, f64)> = (0..n)
        .filter(|&t| solution.alpha[t] > SUPPORT_EPS)
        .map(|t| (members[t], y[t] * solution.alpha[t]))
        .collect();
    support.sort_by_key(|&(i, _)| i);

    BinaryMachine {
        positive,
        negative,
        support_vectors: support.iter().map(|&(i, _)| scaled[i].clone()).collect(),
        coefficients: support.iter().map(|&(_, c)| c).collect(),
        bias: solution.bias,
    }
}
