//! Additive-error exponential smoothing without a seasonal component.
//!
//! Three members are fitted (level only, additive trend, damped additive
//! trend) by minimizing the in-sample one-step squared error with a
//! coordinate-wise golden-section search; the lowest AIC wins.

use std::fmt;

use super::{FittedModel, Forecaster};
use crate::error::{ForecastError, Result};
use crate::models::ModelId;
use crate::optim::golden_section;

pub const MIN_TRAIN: usize = 10;
const TOL: f64 = 1e-4;
const MAX_CYCLES: usize = 100;

pub const ALPHA_BOUNDS: (f64, f64) = (1e-4, 1.0 - 1e-4);
pub const BETA_BOUNDS: (f64, f64) = (1e-4, 1.0 - 1e-4);
pub const PHI_BOUNDS: (f64, f64) = (0.8, 0.98);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtsKind {
    /// Additive error, no trend.
    Ann,
    /// Additive error, additive trend.
    Aan,
    /// Additive error, damped additive trend.
    Aadn,
}

impl EtsKind {
    pub const ALL: [EtsKind; 3] = [EtsKind::Ann, EtsKind::Aan, EtsKind::Aadn];

    fn n_params(self) -> usize {
        match self {
            EtsKind::Ann => 1,
            EtsKind::Aan => 2,
            EtsKind::Aadn => 3,
        }
    }

    fn n_states(self) -> usize {
        match self {
            EtsKind::Ann => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for EtsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EtsKind::Ann => "ANN",
            EtsKind::Aan => "AAN",
            EtsKind::Aadn => "AAdN",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtsSpec {
    pub kind: EtsKind,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub phi_damp: Option<f64>,
    /// Final level.
    pub level: f64,
    /// Final trend (zero for [`EtsKind::Ann`]).
    pub trend: f64,
    pub sse: f64,
    pub aic: f64,
}

/// Final states and in-sample squared error of one smoothing pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtsPass {
    pub level: f64,
    pub trend: f64,
    pub sse: f64,
}

/// Initial trend: mean of the first four first differences.
fn initial_trend(y: &[f64]) -> f64 {
    let k = 4.min(y.len() - 1);
    if k == 0 {
        0.0
    } else {
        (y[k] - y[0]) / k as f64
    }
}

/// Runs the smoothing recursions with fixed parameters. The level starts at
/// the first observation; errors are one-step errors from the second one on.
pub fn ets_pass(kind: EtsKind, y: &[f64], alpha: f64, beta: f64, phi: f64) -> EtsPass {
    let mut level = y[0];
    let mut trend = if kind == EtsKind::Ann { 0.0 } else { initial_trend(y) };
    let phi = match kind {
        EtsKind::Ann => 0.0,
        EtsKind::Aan => 1.0,
        EtsKind::Aadn => phi,
    };
    let mut sse = 0.0;
    for &obs in &y[1..] {
        let fc = level + phi * trend;
        let e = obs - fc;
        sse += e * e;
        let new_level = alpha * obs + (1.0 - alpha) * fc;
        if kind != EtsKind::Ann {
            trend = beta * (new_level - level) + (1.0 - beta) * phi * trend;
        }
        level = new_level;
    }
    EtsPass { level, trend, sse }
}

fn fit_kind(kind: EtsKind, y: &[f64]) -> EtsSpec {
    let bounds = [ALPHA_BOUNDS, BETA_BOUNDS, PHI_BOUNDS];
    let mut params = [0.5, 0.1, 0.9];
    let k = kind.n_params();
    let objective = |p: &[f64; 3]| ets_pass(kind, y, p[0], p[1], p[2]).sse;
    let mut best = objective(&params);
    for _ in 0..MAX_CYCLES {
        let mut max_change = 0.0_f64;
        for i in 0..k {
            let mut trial = params;
            let (x, fx) = golden_section(
                |v| {
                    trial[i] = v;
                    objective(&trial)
                },
                bounds[i].0,
                bounds[i].1,
                TOL,
            );
            if fx <= best {
                max_change = max_change.max((x - params[i]).abs());
                params[i] = x;
                best = fx;
            }
        }
        if max_change < TOL {
            break;
        }
    }
    let pass = ets_pass(kind, y, params[0], params[1], params[2]);
    let n = (y.len() - 1) as f64;
    let aic = n * (pass.sse / n).max(1e-300).ln() + 2.0 * (k + kind.n_states()) as f64;
    EtsSpec {
        kind,
        alpha: params[0],
        beta: (kind != EtsKind::Ann).then_some(params[1]),
        phi_damp: (kind == EtsKind::Aadn).then_some(params[2]),
        level: pass.level,
        trend: pass.trend,
        sse: pass.sse,
        aic,
    }
}

/// Fits all three members and returns them with the AIC-best first.
pub fn fit_ets_candidates(train: &[f64]) -> Result<Vec<EtsSpec>> {
    if train.len() < MIN_TRAIN {
        return Err(ForecastError::InsufficientData {
            needed: MIN_TRAIN,
            got: train.len(),
        });
    }
    if train.iter().any(|v| !v.is_finite()) {
        return Err(ForecastError::NonFinite("ETS training data".into()));
    }
    let mut fits: Vec<EtsSpec> = EtsKind::ALL.iter().map(|&k| fit_kind(k, train)).collect();
    // Stable sort keeps the simpler model first on exact ties.
    fits.sort_by(|a, b| a.aic.total_cmp(&b.aic));
    Ok(fits)
}

pub fn fit_ets_auto(train: &[f64]) -> Result<EtsSpec> {
    Ok(fit_ets_candidates(train)?.swap_remove(0))
}

pub fn ets_forecast(spec: &EtsSpec, h: usize) -> Vec<f64> {
    let mut damp_sum = 0.0;
    let mut damp = 1.0;
    (1..=h)
        .map(|k| match spec.kind {
            EtsKind::Ann => spec.level,
            EtsKind::Aan => spec.level + k as f64 * spec.trend,
            EtsKind::Aadn => {
                damp *= spec.phi_damp.unwrap_or(1.0);
                damp_sum += damp;
                spec.level + damp_sum * spec.trend
            }
        })
        .collect()
}

struct FittedEts {
    spec: EtsSpec,
    fallback: bool,
}

impl FittedModel for FittedEts {
    fn forecast(&self, h: usize) -> Vec<f64> {
        ets_forecast(&self.spec, h)
    }

    fn describe(&self) -> String {
        let s = &self.spec;
        format!(
            "ETS({}) alpha={:.4} beta={:?} phi={:?} aic={:.3}",
            s.kind, s.alpha, s.beta, s.phi_damp, s.aic
        )
    }

    fn is_fallback(&self) -> bool {
        self.fallback
    }
}

/// ETS behind the [`Forecaster`] contract. Windows shorter than
/// [`MIN_TRAIN`] get the naive forecast.
#[derive(Debug, Default, Clone)]
pub struct EtsForecaster;

impl Forecaster for EtsForecaster {
    fn id(&self) -> ModelId {
        ModelId::Ets
    }

    fn fit(&mut self, train: &[f64], _period: usize) -> Result<Box<dyn FittedModel>> {
        let last = *train
            .last()
            .ok_or(ForecastError::InsufficientData { needed: 1, got: 0 })?;
        if train.len() < MIN_TRAIN {
            let spec = EtsSpec {
                kind: EtsKind::Ann,
                alpha: 1.0,
                beta: None,
                phi_damp: None,
                level: last,
                trend: 0.0,
                sse: 0.0,
                aic: f64::NAN,
            };
            return Ok(Box::new(FittedEts { spec, fallback: true }));
        }
        Ok(Box::new(FittedEts {
            spec: fit_ets_auto(train)?,
            fallback: false,
        }))
    }
}
