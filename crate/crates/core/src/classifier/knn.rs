use super::{validate_training_data, LabeledSample};
use crate::error::{Error, Result};
use crate::features::FeatureScaler;

/// k-nearest-neighbor classifier over (optionally z-scored) features with
/// Euclidean distance.
#[derive(Clone, Debug, PartialEq)]
pub struct KnnModel {
    pub(crate) k: usize,
    pub(crate) scaler: FeatureScaler,
    /// Training samples in scaled space.
    pub(crate) samples: Vec<(Vec<f64>, u8)>,
}

impl KnnModel {
    pub fn fit(data: &[LabeledSample], k: usize, scale: bool) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyModel);
        }
        let (dim, _) = validate_training_data(data)?;
        if k == 0 || k > data.len() {
            return Err(Error::InvalidParameter(format!(
                "k = {k} must be in 1..={}",
                data.len()
            )));
        }
        let scaler = if scale {
            let raw: Vec<&[f64]> = data.iter().map(|s| s.features.as_slice()).collect();
            FeatureScaler::fit(&raw)?
        } else {
            FeatureScaler::identity(dim)
        };
        let samples = data
            .iter()
            .map(|s| Ok((scaler.transform(s.features.as_slice())?, s.label)))
            .collect::<Result<_>>()?;
        Ok(KnnModel { k, scaler, samples })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.scaler.dim()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Majority label among the `k` nearest samples. Neighbors at equal
    /// distance are ordered by label; a tie in votes goes to the tied class
    /// whose closest neighbor is nearest.
    pub fn predict(&self, v: &[f64]) -> Result<u8> {
        if self.samples.is_empty() {
            return Err(Error::EmptyModel);
        }
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        let query = self.scaler.transform(v)?;
        let mut neighbors: Vec<(f64, u8)> = self
            .samples
            .iter()
            .map(|(x, label)| {
                let d2: f64 = x.iter().zip(&query).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, *label)
            })
            .collect();
        neighbors.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        neighbors.truncate(self.k);

        // (label, votes, rank of its nearest neighbor)
        let mut tally: Vec<(u8, usize, usize)> = Vec::new();
        for (rank, &(_, label)) in neighbors.iter().enumerate() {
            match tally.iter_mut().find(|t| t.0 == label) {
                Some(t) => t.1 += 1,
                None => tally.push((label, 1, rank)),
            }
        }
        let best = tally
            .iter()
            .min_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)))
            .expect("k >= 1");
        Ok(best.0)
    }
}
