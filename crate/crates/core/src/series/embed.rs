//! Time-delay embedding of a series into lag-vector regression pairs.

use crate::error::{ForecastError, Result};

/// Lagged design matrix (row-major, most recent lag first) and targets.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedDataset {
    pub features: Vec<f64>,
    pub targets: Vec<f64>,
    pub p: usize,
}

impl EmbeddedDataset {
    pub fn rows(&self) -> usize {
        self.targets.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.p..(i + 1) * self.p]
    }

    /// Rows `range` as a new dataset.
    pub fn slice(&self, range: std::ops::Range<usize>) -> EmbeddedDataset {
        EmbeddedDataset {
            features: self.features[range.start * self.p..range.end * self.p].to_vec(),
            targets: self.targets[range].to_vec(),
            p: self.p,
        }
    }
}

/// Embeds `values` with order `p`: row `i` is `(y[i+p-1], ..., y[i])` and its
/// target is `y[i+p]` (0-based).
pub fn embed(values: &[f64], p: usize) -> Result<EmbeddedDataset> {
    if p == 0 {
        return Err(ForecastError::InvalidParameter("embedding order must be positive".into()));
    }
    if values.len() <= p {
        return Err(ForecastError::InsufficientData {
            needed: p + 1,
            got: values.len(),
        });
    }
    let rows = values.len() - p;
    let mut features = Vec::with_capacity(rows * p);
    for i in 0..rows {
        features.extend(values[i..i + p].iter().rev());
    }
    Ok(EmbeddedDataset {
        features,
        targets: values[p..].to_vec(),
        p,
    })
}

/// The most recent `p` values, newest first.
pub fn last_window(values: &[f64], p: usize) -> Vec<f64> {
    values[values.len() - p..].iter().rev().copied().collect()
}
