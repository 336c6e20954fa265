//! Time-series data model, corpus I/O, preprocessing and embedding.

pub mod corpus;
pub mod embed;
pub mod synth;
pub mod tests;
pub mod transform;

pub use corpus::{load_corpus, Corpus, CorpusOptions};
pub use embed::{embed, last_window, EmbeddedDataset};
pub use tests::{cox_stuart_test, seasonality_test, CoxStuart};
pub use transform::{PreprocessPlan, Prepared, TransformState};

use crate::error::{ForecastError, Result};

/// An identified, equally spaced univariate series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    id: String,
    values: Vec<f64>,
    period: usize,
    source: String,
}

impl TimeSeries {
    pub fn new(
        id: impl Into<String>,
        values: Vec<f64>,
        period: usize,
        source: impl Into<String>,
    ) -> Result<Self> {
        let id = id.into();
        if period == 0 {
            return Err(ForecastError::InvalidParameter(format!(
                "series {id}: seasonal period must be positive"
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(ForecastError::NonFinite(format!(
                "series {id}: value at t={i} is not finite"
            )));
        }
        if period > 1 && values.len() < 2 * period {
            return Err(ForecastError::InsufficientData {
                needed: 2 * period,
                got: values.len(),
            });
        }
        Ok(Self {
            id,
            values,
            period,
            source: source.into(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Observations per seasonal cycle; 1 means nonseasonal.
    pub fn period(&self) -> usize {
        self.period
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Keeps the first `cap` observations.
    pub fn truncate(&mut self, cap: usize) {
        self.values.truncate(cap);
    }

    /// Multiplies every observation by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod unit {
    use super::*;

    #[test]
    fn rejects_non_finite_and_short_seasonal() {
        assert!(TimeSeries::new("a", vec![1.0, f64::NAN], 1, "x").is_err());
        assert!(TimeSeries::new("a", vec![1.0; 7], 4, "x").is_err());
        assert!(TimeSeries::new("a", vec![1.0; 8], 4, "x").is_ok());
        assert!(TimeSeries::new("a", vec![1.0; 3], 0, "x").is_err());
    }

    #[test]
    fn truncate_keeps_prefix() {
        let mut s = TimeSeries::new("a", (0..1100).map(f64::from).collect(), 1, "x").unwrap();
        s.truncate(1000);
        assert_eq!(s.len(), 1000);
        assert_eq!(s.values()[999], 999.0);
    }
}
