//! Model identifiers, families and the factory used by the evaluation runner.

use std::fmt;
use std::str::FromStr;

use crate::error::{ForecastError, Result};
use crate::exec::Execution;
use crate::ml::{GridSpec, LearnerId};
use crate::ml_forecast::{MlForecastConfig, MlForecaster};
use crate::series::PreprocessPlan;
use crate::stat::{
    ArimaForecaster, EtsForecaster, Forecaster, NaiveForecaster, SeasonalNaiveForecaster,
    ThetaForecaster,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelId {
    Naive,
    Naive2,
    Arima,
    Ets,
    Theta,
    Glm,
    Rf,
    Gp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelFamily {
    Statistical,
    MachineLearning,
}

impl ModelFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelFamily::Statistical => "statistical",
            ModelFamily::MachineLearning => "ml",
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelFamily {
    type Err = ForecastError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "statistical" => Ok(ModelFamily::Statistical),
            "ml" => Ok(ModelFamily::MachineLearning),
            other => Err(ForecastError::InvalidParameter(format!("unknown model type `{other}`"))),
        }
    }
}

impl ModelId {
    pub const ALL: [ModelId; 8] = [
        ModelId::Naive,
        ModelId::Naive2,
        ModelId::Arima,
        ModelId::Ets,
        ModelId::Theta,
        ModelId::Glm,
        ModelId::Rf,
        ModelId::Gp,
    ];

    /// The default benchmark set.
    pub const BENCHMARK: [ModelId; 7] = [
        ModelId::Naive2,
        ModelId::Arima,
        ModelId::Ets,
        ModelId::Theta,
        ModelId::Glm,
        ModelId::Rf,
        ModelId::Gp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::Naive => "Naive",
            ModelId::Naive2 => "Naive2",
            ModelId::Arima => "ARIMA",
            ModelId::Ets => "ETS",
            ModelId::Theta => "Theta",
            ModelId::Glm => "GLM",
            ModelId::Rf => "RF",
            ModelId::Gp => "GP",
        }
    }

    pub fn family(self) -> ModelFamily {
        match self {
            ModelId::Glm | ModelId::Rf | ModelId::Gp => ModelFamily::MachineLearning,
            _ => ModelFamily::Statistical,
        }
    }

    pub fn learner(self) -> Option<LearnerId> {
        match self {
            ModelId::Glm => Some(LearnerId::Glm),
            ModelId::Rf => Some(LearnerId::Rf),
            ModelId::Gp => Some(LearnerId::Gp),
            _ => None,
        }
    }

    /// Transforms applied before the model sees a training window.
    ///
    /// The naive benchmarks work on raw data. ARIMA chooses its own
    /// differencing order, so the shared pipeline stops before differencing.
    pub fn preprocess_plan(self) -> PreprocessPlan {
        match self {
            ModelId::Naive | ModelId::Naive2 => PreprocessPlan::NONE,
            ModelId::Arima => PreprocessPlan {
                difference: false,
                ..PreprocessPlan::FULL
            },
            _ => PreprocessPlan::FULL,
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = ForecastError;

    fn from_str(s: &str) -> Result<Self> {
        ModelId::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| ForecastError::InvalidParameter(format!("unknown model id `{s}`")))
    }
}

/// Settings shared by every model built for a run.
#[derive(Debug, Clone)]
pub struct ModelSettings {
    pub embed_p: usize,
    pub tune_every: usize,
    pub val_fraction: f64,
    pub min_val_rows: usize,
    pub grid: GridSpec,
    pub arima_max_p: usize,
    pub arima_max_q: usize,
    /// Policy inside a single fit (grid cells, forest trees).
    pub inner_exec: Execution,
}

impl Default for ModelSettings {
    fn default() -> Self {
        Self {
            embed_p: 10,
            tune_every: 50,
            val_fraction: 0.2,
            min_val_rows: 18,
            grid: GridSpec::default(),
            arima_max_p: 5,
            arima_max_q: 5,
            inner_exec: Execution::Sequential,
        }
    }
}

/// Builds a fresh forecaster. `seed` should already be specific to the
/// (series, model) task.
pub fn build(id: ModelId, settings: &ModelSettings, seed: u64) -> Box<dyn Forecaster> {
    match id {
        ModelId::Naive => Box::new(NaiveForecaster),
        ModelId::Naive2 => Box::new(SeasonalNaiveForecaster),
        ModelId::Arima => Box::new(ArimaForecaster {
            max_p: settings.arima_max_p,
            max_q: settings.arima_max_q,
        }),
        ModelId::Ets => Box::new(EtsForecaster),
        ModelId::Theta => Box::new(ThetaForecaster),
        ModelId::Glm | ModelId::Rf | ModelId::Gp => {
            let learner = id.learner().expect("ML model has a learner");
            let config = MlForecastConfig {
                learner,
                p: settings.embed_p,
                tune_every: settings.tune_every,
                val_fraction: settings.val_fraction,
                min_val_rows: settings.min_val_rows,
                grid: settings.grid.clone(),
                exec: settings.inner_exec,
            };
            Box::new(MlForecaster::new(config, seed))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_roundtrip_and_families() {
        for m in ModelId::ALL {
            assert_eq!(m.as_str().parse::<ModelId>().unwrap(), m);
            assert_eq!(build(m, &ModelSettings::default(), 0).id(), m);
        }
        assert!("Tbats".parse::<ModelId>().is_err());
        assert_eq!(ModelId::Rf.family(), ModelFamily::MachineLearning);
        assert_eq!(ModelId::Theta.family(), ModelFamily::Statistical);
    }
}
