//! Regression learners as forecasters: AR(p) embedding, periodic tuning and
//! recursive multi-step forecasting.

use crate::error::{ForecastError, Result};
use crate::exec::Execution;
use crate::ml::{default_config, grid_search, train, GridSpec, HyperConfig, LearnerId, RegressionModel};
use crate::models::ModelId;
use crate::rng::derive;
use crate::series::{embed, last_window};
use crate::stat::{FittedModel, Forecaster, PathModel};

#[derive(Debug, Clone)]
pub struct MlForecastConfig {
    pub learner: LearnerId,
    /// Embedding order.
    pub p: usize,
    /// Training-window growth between grid searches.
    pub tune_every: usize,
    /// Chronological share of embedded rows held out for validation.
    pub val_fraction: f64,
    /// Smallest validation (and training) partition for which tuning runs.
    pub min_val_rows: usize,
    pub grid: GridSpec,
    /// Policy for grid cells and forest trees inside one fit.
    pub exec: Execution,
}

impl MlForecastConfig {
    pub fn new(learner: LearnerId) -> Self {
        Self {
            learner,
            p: 10,
            tune_every: 50,
            val_fraction: 0.2,
            min_val_rows: 18,
            grid: GridSpec::default(),
            exec: Execution::Sequential,
        }
    }

    /// `(train rows, validation rows)` for `rows` embedded rows, or `None`
    /// when the window is too small to tune.
    pub fn split(&self, rows: usize) -> Option<(usize, usize)> {
        let val = ((rows as f64) * self.val_fraction).round() as usize;
        let val = val.max(self.min_val_rows);
        (rows >= val + self.min_val_rows).then(|| (rows - val, val))
    }
}

/// A regression model together with the configuration it was trained with.
pub struct MlFit {
    pub model: Box<dyn RegressionModel>,
    pub hyper: HyperConfig,
    /// True when `hyper` came from a grid search (now or cached).
    pub tuned: bool,
    pub p: usize,
}

/// Fits the learner on the embedded `train`.
///
/// With `cached` set, that configuration is refit directly. Otherwise a grid
/// search runs on a chronological split when the window allows one, and the
/// winner is refit on every embedded row; small windows use the learner's
/// default configuration and report `tuned = false`.
pub fn ml_fit(
    train_values: &[f64],
    config: &MlForecastConfig,
    cached: Option<&HyperConfig>,
    seed: u64,
) -> Result<MlFit> {
    let data = embed(train_values, config.p)?;
    let (hyper, tuned) = match cached {
        Some(h) => (*h, true),
        None => match config.split(data.rows()) {
            Some((n_train, _)) => {
                let cells = config.grid.cells(config.learner, &data.slice(0..n_train))?;
                if cells.is_empty() {
                    return Err(ForecastError::EmptyGrid(config.learner.to_string()));
                }
                let outcome = grid_search(
                    &cells,
                    &data.slice(0..n_train),
                    &data.slice(n_train..data.rows()),
                    seed,
                    config.exec,
                )?;
                (outcome.best, true)
            }
            None => (default_config(config.learner, &data)?, false),
        },
    };
    let model = train(&hyper, &data, seed, config.exec)?;
    Ok(MlFit {
        model,
        hyper,
        tuned,
        p: config.p,
    })
}

/// Iterates one-step predictions: each forecast enters the window as the
/// newest lag. `window` holds the last `p` values, newest first.
pub fn ml_forecast_recursive(model: &dyn RegressionModel, window: &[f64], h: usize) -> Vec<f64> {
    let mut w = window.to_vec();
    let mut out = Vec::with_capacity(h);
    for _ in 0..h {
        let y = model.predict(&w);
        out.push(y);
        w.rotate_right(1);
        w[0] = y;
    }
    out
}

struct FittedMl {
    fit: MlFit,
    window: Vec<f64>,
}

impl FittedModel for FittedMl {
    fn forecast(&self, h: usize) -> Vec<f64> {
        ml_forecast_recursive(self.fit.model.as_ref(), &self.window, h)
    }

    fn describe(&self) -> String {
        let tag = if self.fit.tuned { "tuned" } else { "default" };
        format!("{} p={} [{tag}]", self.fit.hyper, self.fit.p)
    }

    fn is_fallback(&self) -> bool {
        !self.fit.tuned
    }
}

/// Forecaster over one series' growing windows.
///
/// The tuned configuration is cached and reused until the window has grown
/// by `tune_every` observations. Each fit seeds its learner with
/// `derive(seed, window length)`, so results do not depend on which origins
/// were visited before.
pub struct MlForecaster {
    config: MlForecastConfig,
    seed: u64,
    cache: Option<(HyperConfig, usize)>,
}

impl MlForecaster {
    pub fn new(config: MlForecastConfig, seed: u64) -> Self {
        Self {
            config,
            seed,
            cache: None,
        }
    }

    pub fn config(&self) -> &MlForecastConfig {
        &self.config
    }

    fn cached_for(&self, len: usize) -> Option<HyperConfig> {
        let (hyper, tuned_at) = self.cache?;
        (len >= tuned_at && len - tuned_at < self.config.tune_every.max(1)).then_some(hyper)
    }
}

impl Forecaster for MlForecaster {
    fn id(&self) -> ModelId {
        match self.config.learner {
            LearnerId::Glm => ModelId::Glm,
            LearnerId::Rf => ModelId::Rf,
            LearnerId::Gp => ModelId::Gp,
        }
    }

    fn fit(&mut self, train_values: &[f64], _period: usize) -> Result<Box<dyn FittedModel>> {
        let p = self.config.p;
        if train_values.len() <= p {
            let last = *train_values
                .last()
                .ok_or(ForecastError::InsufficientData { needed: 1, got: 0 })?;
            return Ok(Box::new(PathModel {
                path: vec![last],
                description: format!("naive fallback (window {} <= p={p})", train_values.len()),
                fallback: true,
            }));
        }
        let len = train_values.len();
        let seed = derive(self.seed, len as u64);
        let cached = self.cached_for(len);
        let fit = ml_fit(train_values, &self.config, cached.as_ref(), seed)?;
        if cached.is_none() && fit.tuned {
            self.cache = Some((fit.hyper, len));
        }
        Ok(Box::new(FittedMl {
            window: last_window(train_values, p),
            fit,
        }))
    }
}
