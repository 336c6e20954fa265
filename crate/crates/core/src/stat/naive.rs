use super::{FittedModel, Forecaster};
use crate::error::{ForecastError, Result};
use crate::models::ModelId;

/// Random-walk forecast: every step repeats the last observation.
pub fn naive_forecast(train: &[f64], h: usize) -> Result<Vec<f64>> {
    let last = *train
        .last()
        .ok_or(ForecastError::InsufficientData { needed: 1, got: 0 })?;
    Ok(vec![last; h])
}

/// Seasonal random walk: step `k` repeats the most recent observation from
/// the same season, `y[n + k - m * ceil(k / m)]`.
pub fn snaive_forecast(train: &[f64], period: usize, h: usize) -> Result<Vec<f64>> {
    let m = period.max(1);
    let n = train.len();
    if n < m || n == 0 {
        return Err(ForecastError::InsufficientData {
            needed: m.max(1),
            got: n,
        });
    }
    Ok((1..=h)
        .map(|k| train[n + k - m * k.div_ceil(m) - 1])
        .collect())
}

struct Repeating {
    tail: Vec<f64>,
    label: &'static str,
}

impl FittedModel for Repeating {
    fn forecast(&self, h: usize) -> Vec<f64> {
        let m = self.tail.len();
        (1..=h).map(|k| self.tail[m + k - m * k.div_ceil(m) - 1]).collect()
    }

    fn describe(&self) -> String {
        format!("{}(m={})", self.label, self.tail.len())
    }
}

#[derive(Debug, Default, Clone)]
pub struct NaiveForecaster;

impl Forecaster for NaiveForecaster {
    fn id(&self) -> ModelId {
        ModelId::Naive
    }

    fn fit(&mut self, train: &[f64], _period: usize) -> Result<Box<dyn FittedModel>> {
        let last = naive_forecast(train, 1)?;
        Ok(Box::new(Repeating {
            tail: last,
            label: "naive",
        }))
    }
}

#[derive(Debug, Default, Clone)]
pub struct SeasonalNaiveForecaster;

impl Forecaster for SeasonalNaiveForecaster {
    fn id(&self) -> ModelId {
        ModelId::Naive2
    }

    fn fit(&mut self, train: &[f64], period: usize) -> Result<Box<dyn FittedModel>> {
        let m = period.max(1);
        snaive_forecast(train, m, 1)?;
        Ok(Box::new(Repeating {
            tail: train[train.len() - m..].to_vec(),
            label: "snaive",
        }))
    }
}
