//! Variance, seasonal and trend transforms with exact inverses.
//!
//! The forward pipeline is always applied in the order
//! shift → Box-Cox → deseasonalize → difference, and inverted in reverse.

use super::tests::{cox_stuart_test, seasonality_test};
use crate::error::{ForecastError, Result};
use crate::optim::golden_section;

pub const LAMBDA_LO: f64 = -1.0;
pub const LAMBDA_HI: f64 = 2.0;

/// Box-Cox transform. `|lambda| < 1e-9` is treated as the log transform.
pub fn boxcox(values: &[f64], lambda: f64) -> Result<Vec<f64>> {
    values
        .iter()
        .enumerate()
        .map(|(index, &y)| {
            if y > 0.0 {
                Ok(boxcox_one(y, lambda))
            } else {
                Err(ForecastError::NonPositive { index, value: y })
            }
        })
        .collect()
}

fn boxcox_one(y: f64, lambda: f64) -> f64 {
    if lambda.abs() < 1e-9 {
        y.ln()
    } else {
        (y.powf(lambda) - 1.0) / lambda
    }
}

fn inv_boxcox_one(x: f64, lambda: f64) -> f64 {
    if lambda.abs() < 1e-9 {
        x.exp()
    } else {
        (lambda * x + 1.0).max(1e-12).powf(1.0 / lambda)
    }
}

pub fn inv_boxcox(values: &[f64], lambda: f64) -> Vec<f64> {
    values.iter().map(|&x| inv_boxcox_one(x, lambda)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuerreroLambda {
    pub lambda: f64,
    /// Set when fewer than two complete blocks exist (or every block is
    /// constant) and the identity transform was returned instead.
    pub degenerate: bool,
}

/// Coefficient of variation of `sd_g / mean_g^(1 - lambda)` over the trailing
/// complete blocks of length `max(period, 2)`.
fn guerrero_cv(blocks: &[(f64, f64)], lambda: f64) -> f64 {
    let ratios: Vec<f64> = blocks
        .iter()
        .map(|&(mean, sd)| sd / mean.powf(1.0 - lambda))
        .collect();
    let k = ratios.len() as f64;
    let mu = ratios.iter().sum::<f64>() / k;
    let var = ratios.iter().map(|r| (r - mu).powi(2)).sum::<f64>() / (k - 1.0);
    var.sqrt() / mu
}

/// Guerrero's choice of Box-Cox lambda on `[lo, hi]`, found by golden-section
/// search to tolerance 1e-4. Input must be strictly positive.
pub fn guerrero_lambda(values: &[f64], period: usize, lo: f64, hi: f64) -> Result<GuerreroLambda> {
    if !(lo < hi) {
        return Err(ForecastError::InvalidParameter(format!(
            "lambda bounds must satisfy lo < hi (got {lo}, {hi})"
        )));
    }
    if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| **v <= 0.0) {
        return Err(ForecastError::NonPositive { index, value });
    }
    let identity = GuerreroLambda {
        lambda: 1.0_f64.clamp(lo, hi),
        degenerate: true,
    };
    let block = period.max(2);
    let n_blocks = values.len() / block;
    if n_blocks < 2 {
        return Ok(identity);
    }
    let start = values.len() - n_blocks * block;
    let blocks: Vec<(f64, f64)> = values[start..]
        .chunks_exact(block)
        .map(|c| {
            let mean = c.iter().sum::<f64>() / block as f64;
            let var = c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (block as f64 - 1.0);
            (mean, var.sqrt())
        })
        .collect();
    if blocks.iter().all(|&(_, sd)| sd == 0.0) {
        return Ok(identity);
    }
    let (lambda, _) = golden_section(|l| guerrero_cv(&blocks, l), lo, hi, 1e-4);
    Ok(GuerreroLambda {
        lambda,
        degenerate: false,
    })
}

/// Classical multiplicative seasonal indices (normalized to mean 1), indexed
/// by `position mod period`.
pub fn seasonal_indices(values: &[f64], period: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if period < 2 || n < 2 * period {
        return Err(ForecastError::InsufficientData {
            needed: 2 * period.max(2),
            got: n,
        });
    }
    let half = period / 2;
    let mut sums = vec![0.0; period];
    let mut counts = vec![0usize; period];
    for t in half..n - half {
        let trend = if period.is_multiple_of(2) {
            let inner: f64 = values[t + 1 - half..t + half].iter().sum();
            (0.5 * values[t - half] + inner + 0.5 * values[t + half]) / period as f64
        } else {
            values[t - half..=t + half].iter().sum::<f64>() / period as f64
        };
        sums[t % period] += values[t] / trend;
        counts[t % period] += 1;
    }
    let mut idx: Vec<f64> = sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
    let mean = idx.iter().sum::<f64>() / period as f64;
    for v in &mut idx {
        *v /= mean;
    }
    if let Some((index, &value)) = idx
        .iter()
        .enumerate()
        .find(|(_, v)| !(**v > 0.0) || !v.is_finite())
    {
        return Err(ForecastError::NonPositiveSeasonalIndex { index, value });
    }
    Ok(idx)
}

/// Divides each value by the index of its season; `start` is the absolute
/// position of `values[0]`.
pub fn deseasonalize(values: &[f64], indices: &[f64], start: usize) -> Vec<f64> {
    let m = indices.len();
    values
        .iter()
        .enumerate()
        .map(|(i, v)| v / indices[(start + i) % m])
        .collect()
}

/// Multiplies each value by the index of the season it lands on;
/// `alignment` is the absolute position of `values[0]`.
pub fn reseasonalize(values: &[f64], indices: &[f64], alignment: usize) -> Vec<f64> {
    let m = indices.len();
    values
        .iter()
        .enumerate()
        .map(|(i, v)| v * indices[(alignment + i) % m])
        .collect()
}

/// First differences `y[t+1] - y[t]`.
pub fn difference(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Cumulative inverse of [`difference`] anchored at `last`.
pub fn integrate(diffs: &[f64], last: f64) -> Vec<f64> {
    diffs
        .iter()
        .scan(last, |acc, d| {
            *acc += d;
            Some(*acc)
        })
        .collect()
}

/// Which transforms a model receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreprocessPlan {
    pub boxcox: bool,
    pub deseasonalize: bool,
    pub difference: bool,
}

impl PreprocessPlan {
    pub const NONE: Self = Self {
        boxcox: false,
        deseasonalize: false,
        difference: false,
    };
    pub const FULL: Self = Self {
        boxcox: true,
        deseasonalize: true,
        difference: true,
    };

    pub fn without_boxcox(self) -> Self {
        Self {
            boxcox: false,
            ..self
        }
    }
}

/// Fitted preprocessing parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformState {
    pub period: usize,
    /// Added before Box-Cox so every value is strictly positive.
    pub shift: f64,
    pub lambda: Option<f64>,
    pub seasonal_indices: Option<Vec<f64>>,
    /// Added before the multiplicative decomposition when the Box-Cox scale
    /// is not strictly positive.
    pub seasonal_offset: f64,
    pub differenced: bool,
    /// Last pre-difference level of the fitted window; anchors integration.
    pub last_train_value: f64,
    pub diagnostics: Vec<String>,
}

impl TransformState {
    pub fn identity(period: usize) -> Self {
        Self {
            period,
            shift: 0.0,
            lambda: None,
            seasonal_indices: None,
            seasonal_offset: 0.0,
            differenced: false,
            last_train_value: 0.0,
            diagnostics: Vec::new(),
        }
    }

    /// Fits the pipeline on `values` and returns the state together with the
    /// pre-difference levels.
    pub fn fit(values: &[f64], period: usize, plan: PreprocessPlan) -> Result<(Self, Vec<f64>)> {
        let mut state = Self::identity(period);
        let mut levels = values.to_vec();

        if plan.boxcox && !values.is_empty() {
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            if min <= 0.0 {
                state.shift = 1.0 - min;
                for v in &mut levels {
                    *v += state.shift;
                }
            }
            let g = guerrero_lambda(&levels, period, LAMBDA_LO, LAMBDA_HI)?;
            if g.degenerate {
                state
                    .diagnostics
                    .push("guerrero: fewer than two usable blocks, lambda set to 1".into());
            }
            state.lambda = Some(g.lambda);
            levels = boxcox(&levels, g.lambda)?;
        }

        if plan.deseasonalize && period > 1 && seasonality_test(&levels, period) {
            let min = levels.iter().copied().fold(f64::INFINITY, f64::min);
            if min <= 0.0 {
                state.seasonal_offset = 1.0 - min;
                for v in &mut levels {
                    *v += state.seasonal_offset;
                }
            }
            let idx = seasonal_indices(&levels, period)?;
            levels = deseasonalize(&levels, &idx, 0);
            state.seasonal_indices = Some(idx);
        }

        if plan.difference && levels.len() >= 6 {
            let cs = cox_stuart_test(&levels, 0.05);
            if let Some(d) = &cs.diagnostic {
                state.diagnostics.push(format!("cox-stuart: {d}"));
            }
            state.differenced = cs.trend;
        }
        state.last_train_value = levels.last().copied().unwrap_or(0.0);
        Ok((state, levels))
    }

    /// Shift, Box-Cox and deseasonalize; `start` is the absolute position of
    /// `values[0]`.
    pub fn levels(&self, values: &[f64], start: usize) -> Result<Vec<f64>> {
        let mut out: Vec<f64> = values.iter().map(|v| v + self.shift).collect();
        if let Some(lambda) = self.lambda {
            out = boxcox(&out, lambda)?;
        }
        if let Some(idx) = &self.seasonal_indices {
            for v in &mut out {
                *v += self.seasonal_offset;
            }
            out = deseasonalize(&out, idx, start);
        }
        Ok(out)
    }

    /// Exact inverse of [`TransformState::levels`].
    pub fn inverse_levels(&self, levels: &[f64], start: usize) -> Vec<f64> {
        let mut out = levels.to_vec();
        if let Some(idx) = &self.seasonal_indices {
            out = reseasonalize(&out, idx, start);
            for v in &mut out {
                *v -= self.seasonal_offset;
            }
        }
        if let Some(lambda) = self.lambda {
            out = inv_boxcox(&out, lambda);
        }
        for v in &mut out {
            *v -= self.shift;
        }
        out
    }

    /// Full forward pipeline: levels, then first differences if fitted so.
    pub fn forward(&self, values: &[f64]) -> Result<Vec<f64>> {
        let levels = self.levels(values, 0)?;
        Ok(if self.differenced {
            difference(&levels)
        } else {
            levels
        })
    }

    /// Maps model-scale forecasts back to the original scale. `alignment` is
    /// the absolute position of the first forecast.
    pub fn invert_forecast(&self, forecasts: &[f64], alignment: usize) -> Vec<f64> {
        self.invert_with_anchor(forecasts, alignment, self.last_train_value)
    }

    fn invert_with_anchor(&self, forecasts: &[f64], alignment: usize, anchor: f64) -> Vec<f64> {
        let levels = if self.differenced {
            integrate(forecasts, anchor)
        } else {
            forecasts.to_vec()
        };
        self.inverse_levels(&levels, alignment)
    }
}

/// A series preprocessed once, from which growing training windows are cut.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub state: TransformState,
    pub levels: Vec<f64>,
}

impl Prepared {
    pub fn fit(values: &[f64], period: usize, plan: PreprocessPlan) -> Result<Self> {
        let (state, levels) = TransformState::fit(values, period, plan)?;
        Ok(Self { state, levels })
    }

    /// Model-scale training input for the first `t` observations.
    pub fn train_input(&self, t: usize) -> Vec<f64> {
        let t = t.min(self.levels.len());
        if self.state.differenced {
            difference(&self.levels[..t])
        } else {
            self.levels[..t].to_vec()
        }
    }

    /// Inverts forecasts produced from the first `t` observations.
    pub fn invert(&self, forecasts: &[f64], t: usize) -> Vec<f64> {
        let anchor = self.levels[t - 1];
        self.state.invert_with_anchor(forecasts, t, anchor)
    }
}
