//! Theta method in its simple-exponential-smoothing-with-drift form.

use super::ets::{ets_pass, EtsKind, ALPHA_BOUNDS};
use super::{FittedModel, Forecaster};
use crate::error::{ForecastError, Result};
use crate::models::ModelId;
use crate::optim::golden_section;

pub const MIN_TRAIN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaFit {
    pub alpha: f64,
    /// Final SES level.
    pub level: f64,
    /// OLS slope of the training window against time.
    pub slope: f64,
    pub n: usize,
}

impl ThetaFit {
    /// Drift added to the SES forecast at step `k`.
    pub fn drift(&self, k: usize) -> f64 {
        let a = self.alpha;
        self.slope / 2.0 * (k as f64 - 1.0 + 1.0 / a - (1.0 - a).powi(self.n as i32) / a)
    }

    pub fn forecast(&self, h: usize) -> Vec<f64> {
        (1..=h).map(|k| self.level + self.drift(k)).collect()
    }
}

fn ols_slope(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let t_mean = (n + 1.0) / 2.0;
    let y_mean = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, v) in y.iter().enumerate() {
        let dt = (i + 1) as f64 - t_mean;
        sxy += dt * (v - y_mean);
        sxx += dt * dt;
    }
    sxy / sxx
}

pub fn theta_fit(train: &[f64]) -> Result<ThetaFit> {
    if train.len() < MIN_TRAIN {
        return Err(ForecastError::InsufficientData {
            needed: MIN_TRAIN,
            got: train.len(),
        });
    }
    let (alpha, _) = golden_section(
        |a| ets_pass(EtsKind::Ann, train, a, 0.0, 0.0).sse,
        ALPHA_BOUNDS.0,
        ALPHA_BOUNDS.1,
        1e-4,
    );
    let level = ets_pass(EtsKind::Ann, train, alpha, 0.0, 0.0).level;
    Ok(ThetaFit {
        alpha,
        level,
        slope: ols_slope(train),
        n: train.len(),
    })
}

/// Theta forecasts. Seasonality is expected to have been removed upstream,
/// so `period` is accepted only for interface symmetry.
pub fn theta_forecast(train: &[f64], _period: usize, h: usize) -> Result<Vec<f64>> {
    Ok(theta_fit(train)?.forecast(h))
}

struct FittedTheta(ThetaFit);

impl FittedModel for FittedTheta {
    fn forecast(&self, h: usize) -> Vec<f64> {
        self.0.forecast(h)
    }

    fn describe(&self) -> String {
        format!("Theta alpha={:.4} slope={:.5}", self.0.alpha, self.0.slope)
    }
}

#[derive(Debug, Default, Clone)]
pub struct ThetaForecaster;

impl Forecaster for ThetaForecaster {
    fn id(&self) -> ModelId {
        ModelId::Theta
    }

    fn fit(&mut self, train: &[f64], _period: usize) -> Result<Box<dyn FittedModel>> {
        if train.len() < MIN_TRAIN {
            let last = super::naive::naive_forecast(train, 1)?;
            return Ok(Box::new(super::PathModel {
                path: last,
                description: "Theta fallback: naive".into(),
                fallback: true,
            }));
        }
        Ok(Box::new(FittedTheta(theta_fit(train)?)))
    }
}
