//! Growing-window prequential evaluation.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use super::metrics::{mase, smape};
use crate::error::{ForecastError, Result};
use crate::exec::Execution;
use crate::models::{build, ModelId, ModelSettings};
use crate::rng::{derive, hash_str};
use crate::series::{Prepared, PreprocessPlan, TimeSeries};
use crate::stat::Forecaster;

/// When the preprocessing pipeline is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PreprocessMode {
    /// Once per series, on the full series.
    #[default]
    Global,
    /// At every origin, on the training window only.
    Strict,
}

impl PreprocessMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PreprocessMode::Global => "global",
            PreprocessMode::Strict => "strict",
        }
    }
}

impl fmt::Display for PreprocessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PreprocessMode {
    type Err = ForecastError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "global" => Ok(PreprocessMode::Global),
            "strict" => Ok(PreprocessMode::Strict),
            other => Err(ForecastError::InvalidParameter(format!(
                "preprocess_mode must be `global` or `strict`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrequentialConfig {
    pub horizon: usize,
    pub start: usize,
    pub mode: PreprocessMode,
}

impl Default for PrequentialConfig {
    fn default() -> Self {
        Self {
            horizon: 1,
            start: 18,
            mode: PreprocessMode::Global,
        }
    }
}

impl PrequentialConfig {
    /// Number of origins for a series of length `n`.
    pub fn origin_count(&self, n: usize) -> usize {
        (n + 1).saturating_sub(self.horizon + self.start)
    }
}

/// One evaluation at one origin.
#[derive(Debug, Clone, PartialEq)]
pub struct OriginRecord {
    pub series_id: String,
    pub model_id: ModelId,
    /// Observations available to the model.
    pub train_size: usize,
    pub horizon: usize,
    /// `None` when the scale is zero or the model failed.
    pub mase: Option<f64>,
    pub smape: Option<f64>,
    pub smape_undefined: usize,
    pub failed: bool,
    pub elapsed_ns: u64,
}

impl OriginRecord {
    /// Usable for ranking.
    pub fn is_valid(&self) -> bool {
        !self.failed && self.mase.is_some()
    }
}

/// Per-(series, model) bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSummary {
    pub series_id: String,
    pub model_id: ModelId,
    pub records: usize,
    pub failures: usize,
    pub fallbacks: usize,
    pub undefined_mase: usize,
    pub elapsed_ns: u64,
    pub diagnostics: Vec<String>,
}

fn prepare(values: &[f64], period: usize, plan: PreprocessPlan, diagnostics: &mut Vec<String>) -> Prepared {
    match Prepared::fit(values, period, plan) {
        Ok(p) => p,
        Err(e) => {
            diagnostics.push(format!("preprocessing failed ({e}); trying without seasonal adjustment"));
            let reduced = PreprocessPlan {
                deseasonalize: false,
                ..plan
            };
            Prepared::fit(values, period, reduced).unwrap_or_else(|e| {
                diagnostics.push(format!("preprocessing failed ({e}); using raw values"));
                Prepared::fit(values, period, PreprocessPlan::NONE).expect("identity pipeline")
            })
        }
    }
}

/// Runs one forecaster over every origin of `series`.
///
/// At origin `t` the model is fitted on the first `t` observations and its
/// `horizon` forecasts are scored against the next `horizon` observations on
/// the original scale. Model errors are recorded as failed origins.
pub fn prequential_run(
    series: &TimeSeries,
    forecaster: &mut dyn Forecaster,
    plan: PreprocessPlan,
    config: &PrequentialConfig,
) -> Result<(Vec<OriginRecord>, TaskSummary)> {
    let values = series.values();
    let n = values.len();
    let (h, start) = (config.horizon, config.start);
    if h == 0 || start == 0 {
        return Err(ForecastError::InvalidParameter("horizon and start must be positive".into()));
    }
    if n < start + h {
        return Err(ForecastError::InsufficientData {
            needed: start + h,
            got: n,
        });
    }
    let period = series.period();
    let model_id = forecaster.id();
    let mut summary = TaskSummary {
        series_id: series.id().to_string(),
        model_id,
        records: 0,
        failures: 0,
        fallbacks: 0,
        undefined_mase: 0,
        elapsed_ns: 0,
        diagnostics: Vec::new(),
    };
    let global = match config.mode {
        PreprocessMode::Global => Some(prepare(values, period, plan, &mut summary.diagnostics)),
        PreprocessMode::Strict => None,
    };

    let mut records = Vec::with_capacity(config.origin_count(n));
    for t in start..=n - h {
        let clock = Instant::now();
        let local;
        let prepared = match &global {
            Some(p) => p,
            None => {
                let mut sink = Vec::new();
                local = prepare(&values[..t], period, plan, &mut sink);
                &local
            }
        };
        let train = prepared.train_input(t);
        let outcome = forecaster.fit(&train, period).map(|fitted| {
            let fc = prepared.invert(&fitted.forecast(h), t);
            (fc, fitted.is_fallback())
        });
        let elapsed_ns = clock.elapsed().as_nanos() as u64;

        let actual = &values[t..t + h];
        let mut record = OriginRecord {
            series_id: series.id().to_string(),
            model_id,
            train_size: t,
            horizon: h,
            mase: None,
            smape: None,
            smape_undefined: 0,
            failed: false,
            elapsed_ns,
        };
        match outcome {
            Ok((fc, fallback)) if fc.len() == h && fc.iter().all(|v| v.is_finite()) => {
                record.mase = mase(actual, &fc, &values[..t], period);
                let (s, undefined) = smape(actual, &fc);
                record.smape = s;
                record.smape_undefined = undefined;
                summary.fallbacks += usize::from(fallback);
                summary.undefined_mase += usize::from(record.mase.is_none());
            }
            Ok(_) => {
                record.failed = true;
                if summary.diagnostics.len() < 10 {
                    summary.diagnostics.push(format!("t={t}: non-finite forecast"));
                }
            }
            Err(e) => {
                record.failed = true;
                if summary.diagnostics.len() < 10 {
                    summary.diagnostics.push(format!("t={t}: {e}"));
                }
            }
        }
        summary.failures += usize::from(record.failed);
        summary.elapsed_ns += elapsed_ns;
        records.push(record);
    }
    summary.records = records.len();
    Ok((records, summary))
}

/// Seed for the (series, model) task; keyed by identifiers so that adding or
/// removing other series or models does not change it.
pub fn task_seed(seed: u64, series_id: &str, model: ModelId) -> u64 {
    derive(derive(seed, hash_str(series_id)), hash_str(model.as_str()))
}

/// Output of a full experiment, in canonical order (series order of the
/// corpus, then model order of the request, then train size).
#[derive(Debug, Clone, Default)]
pub struct Experiment {
    pub records: Vec<OriginRecord>,
    pub tasks: Vec<TaskSummary>,
}

/// Evaluates every (series, model) pair. Tasks are independent and run
/// under `exec`; the merged output does not depend on scheduling.
pub fn run_experiment(
    corpus: &[TimeSeries],
    models: &[ModelId],
    settings: &ModelSettings,
    config: &PrequentialConfig,
    seed: u64,
    exec: Execution,
    progress: Option<&(dyn Fn(&TaskSummary) + Sync)>,
) -> Result<Experiment> {
    if let Some(short) = corpus.iter().find(|s| s.len() < config.start + config.horizon) {
        return Err(ForecastError::Corpus(format!(
            "series `{}` has {} observations; at least {} are needed",
            short.id(),
            short.len(),
            config.start + config.horizon
        )));
    }
    let tasks: Vec<(usize, ModelId)> = (0..corpus.len())
        .flat_map(|s| models.iter().map(move |&m| (s, m)))
        .collect();
    let outputs = exec.map(&tasks, |&(s, model)| {
        let series = &corpus[s];
        let mut forecaster = build(model, settings, task_seed(seed, series.id(), model));
        let out = prequential_run(series, forecaster.as_mut(), model.preprocess_plan(), config);
        if let (Some(report), Ok((_, summary))) = (progress, &out) {
            report(summary);
        }
        out
    });
    let mut experiment = Experiment::default();
    for out in outputs {
        let (records, summary) = out?;
        experiment.records.extend(records);
        experiment.tasks.push(summary);
    }
    Ok(experiment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stat::NaiveForecaster;

    fn series(n: usize) -> TimeSeries {
        let v: Vec<f64> = (0..n).map(|t| 10.0 + (t as f64 * 0.9).sin() + 0.01 * t as f64).collect();
        TimeSeries::new("s", v, 1, "test").unwrap()
    }

    #[test]
    fn origin_counts() {
        let c = PrequentialConfig::default();
        assert_eq!(c.origin_count(1000), 982);
        let c18 = PrequentialConfig {
            horizon: 18,
            ..c
        };
        assert_eq!(c18.origin_count(1000), 965);
        assert_eq!(c18.origin_count(36), 1);
    }

    #[test]
    fn single_origin_run_uses_first_18() {
        let s = series(36);
        let cfg = PrequentialConfig {
            horizon: 18,
            ..Default::default()
        };
        let (rec, summary) = prequential_run(&s, &mut NaiveForecaster, PreprocessPlan::NONE, &cfg).unwrap();
        assert_eq!(rec.len(), 1);
        assert_eq!(rec[0].train_size, 18);
        let fc = vec![s.values()[17]; 18];
        assert_eq!(rec[0].mase, mase(&s.values()[18..], &fc, &s.values()[..18], 1));
        assert_eq!(summary.records, 1);
    }

    #[test]
    fn too_short_is_an_error() {
        let s = series(20);
        let cfg = PrequentialConfig {
            horizon: 18,
            ..Default::default()
        };
        assert!(prequential_run(&s, &mut NaiveForecaster, PreprocessPlan::NONE, &cfg).is_err());
    }

    #[test]
    fn strict_and_global_agree_without_preprocessing() {
        let s = series(60);
        let g = PrequentialConfig::default();
        let st = PrequentialConfig {
            mode: PreprocessMode::Strict,
            ..g
        };
        let (a, _) = prequential_run(&s, &mut NaiveForecaster, PreprocessPlan::NONE, &g).unwrap();
        let (b, _) = prequential_run(&s, &mut NaiveForecaster, PreprocessPlan::NONE, &st).unwrap();
        assert_eq!(
            a.iter().map(|r| r.mase).collect::<Vec<_>>(),
            b.iter().map(|r| r.mase).collect::<Vec<_>>()
        );
    }
}
