//! Statistical forecasters and the uniform forecasting contract.

pub mod arima;
pub mod ets;
pub mod naive;
pub mod theta;

pub use arima::{arima_forecast, fit_arima_auto, ArimaFit, ArimaForecaster, ArimaSpec};
pub use ets::{ets_forecast, fit_ets_auto, EtsForecaster, EtsKind, EtsSpec};
pub use naive::{naive_forecast, snaive_forecast, NaiveForecaster, SeasonalNaiveForecaster};
pub use theta::{theta_fit, theta_forecast, ThetaForecaster};

use crate::error::Result;
use crate::models::ModelId;

/// A fitted model able to produce point forecasts.
pub trait FittedModel: Send + Sync {
    /// Exactly `h` finite forecasts.
    fn forecast(&self, h: usize) -> Vec<f64>;

    /// Chosen orders / parameters, for diagnostics.
    fn describe(&self) -> String;

    /// True when the model degraded to a simpler fallback for this fit.
    fn is_fallback(&self) -> bool {
        false
    }
}

/// Fits a model to a training window.
///
/// Implementations may keep state across successive fits (the embedding
/// forecasters cache tuned hyper-parameters), so each evaluation task owns
/// its own instance.
pub trait Forecaster: Send {
    fn id(&self) -> ModelId;

    fn fit(&mut self, train: &[f64], period: usize) -> Result<Box<dyn FittedModel>>;
}

/// A fitted model whose forecast is a fixed path, repeated or truncated.
#[derive(Debug, Clone)]
pub(crate) struct PathModel {
    pub path: Vec<f64>,
    pub description: String,
    pub fallback: bool,
}

impl FittedModel for PathModel {
    fn forecast(&self, h: usize) -> Vec<f64> {
        (0..h)
            .map(|i| self.path[i.min(self.path.len() - 1)])
            .collect()
    }

    fn describe(&self) -> String {
        self.description.clone()
    }

    fn is_fallback(&self) -> bool {
        self.fallback
    }
}
