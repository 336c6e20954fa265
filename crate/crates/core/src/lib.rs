//! Univariate forecasting toolkit with a prequential learning-curve harness.
//!
//! The crate is organised around five areas:
//!
//! * [`series`]: the time-series data model, corpus ingestion, preprocessing
//!   transforms, statistical tests and time-delay embedding.
//! * [`stat`]: statistical forecasters (naive, seasonal naive, ARIMA, ETS, Theta).
//! * [`ml`]: regression learners (elastic-net GLM, random forest, Gaussian
//!   process) and the validation grid search.
//! * [`ml_forecast`]: adapts any regression learner to the [`Forecaster`]
//!   contract through an autoregressive embedding and recursive multi-step
//!   forecasting.
//! * [`eval`]: growing-window prequential evaluation, MASE/SMAPE, per-origin
//!   ranks, learning curves and the computational-cost ratio.
//!
//! Data-parallel work (independent series/model tasks, forest trees, grid
//! cells) goes through [`exec`], which uses rayon when the `parallel` feature
//! is enabled and a plain sequential loop otherwise.

pub mod error;
pub mod eval;
pub mod exec;
pub mod ml;
pub mod ml_forecast;
pub mod models;
pub mod optim;
pub mod rng;
pub mod series;
pub mod stat;

pub use error::{ForecastError, Result};
pub use exec::Execution;
pub use models::{ModelFamily, ModelId};
pub use series::TimeSeries;
pub use stat::{FittedModel, Forecaster};
