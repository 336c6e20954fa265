//! Non-seasonal ARIMA with automatic order selection.
//!
//! The differencing order is chosen by repeated Cox-Stuart trend tests
//! (at most two differences). Every `(p, q)` cell of the order grid is then
//! fitted by conditional-sum-of-squares minimization and the cell with the
//! lowest AIC is kept.

use super::{FittedModel, Forecaster};
use crate::error::{ForecastError, Result};
use crate::models::ModelId;
use crate::optim::bfgs;
use crate::series::tests::cox_stuart_test;
use crate::series::transform::difference;

pub const MIN_TRAIN: usize = 20;
const STEP_TOL: f64 = 1e-6;
const MAX_ITER: usize = 500;
const STATIONARITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ArimaSpec {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    /// Intercept; only estimated when `d == 0`.
    pub c: f64,
    pub sigma2: f64,
    pub aic: f64,
    /// Residuals before this index are conditioned to zero and excluded from
    /// the sum of squares.
    pub cond_start: usize,
}

impl ArimaSpec {
    pub fn has_constant(&self) -> bool {
        self.d == 0
    }
}

/// Outcome of an automatic fit, including every evaluated candidate.
#[derive(Debug, Clone)]
pub struct ArimaFit {
    pub spec: ArimaSpec,
    /// `(p, q, aic)` for every cell that converged.
    pub candidates: Vec<(usize, usize, f64)>,
    pub diagnostics: Vec<String>,
}

/// Residuals of the ARMA recursion on the (differenced) series `w`.
///
/// Residuals before index `p` are zero.
pub fn css_residuals(w: &[f64], phi: &[f64], theta: &[f64], c: f64, out: &mut Vec<f64>) {
    css_pass(w, phi, theta, c, usize::MAX, out);
}

/// Fills `out` with residuals and returns the sum of squares from `from`.
fn css_pass(w: &[f64], phi: &[f64], theta: &[f64], c: f64, from: usize, out: &mut Vec<f64>) -> f64 {
    let (p, q) = (phi.len(), theta.len());
    out.clear();
    out.resize(w.len(), 0.0);
    let mut sum = 0.0;
    for t in p..w.len() {
        let mut pred = c;
        for (f, y) in phi.iter().zip(w[t - p..t].iter().rev()) {
            pred += f * y;
        }
        let m = q.min(t);
        for (th, e) in theta[..m].iter().zip(out[t - m..t].iter().rev()) {
            pred += th * e;
        }
        let e = w[t] - pred;
        out[t] = e;
        if t >= from {
            sum += e * e;
        }
    }
    sum
}

/// Conditional sum of squares for parameters packed as `[phi.., theta.., c?]`.
///
/// Terms before `max(cond_start, p)` are excluded.
pub fn css(w: &[f64], params: &[f64], p: usize, q: usize, cond_start: usize, buf: &mut Vec<f64>) -> f64 {
    let c = if params.len() > p + q { params[p + q] } else { 0.0 };
    let s = css_pass(w, &params[..p], &params[p..p + q], c, cond_start, buf);
    if s.is_finite() {
        s
    } else {
        f64::INFINITY
    }
}

/// Stationarity of `1 - phi_1 z - ... - phi_p z^p` via the step-down
/// recursion to partial autocorrelations.
pub fn is_stationary(phi: &[f64]) -> bool {
    let mut a = phi.to_vec();
    for k in (1..=a.len()).rev() {
        let r = a[k - 1];
        if !r.is_finite() || r.abs() >= 1.0 - STATIONARITY_TOL {
            return false;
        }
        let denom = 1.0 - r * r;
        let prev: Vec<f64> = (0..k - 1)
            .map(|j| (a[j] + r * a[k - 2 - j]) / denom)
            .collect();
        a = prev;
    }
    true
}

/// Invertibility of `1 + theta_1 z + ... + theta_q z^q`.
pub fn is_invertible(theta: &[f64]) -> bool {
    let neg: Vec<f64> = theta.iter().map(|t| -t).collect();
    is_stationary(&neg)
}

fn choose_d(train: &[f64]) -> (usize, Vec<f64>) {
    let mut w = train.to_vec();
    let mut d = 0;
    while d < 2 && w.len() >= 6 && cox_stuart_test(&w, 0.05).trend {
        w = difference(&w);
        d += 1;
    }
    (d, w)
}

fn aic(css: f64, n: usize, k: usize) -> f64 {
    let n = n as f64;
    n * (css / n).max(1e-300).ln() + 2.0 * k as f64
}

/// Fits ARIMA(p, d, q) over the grid `p <= max_p`, `q <= max_q`.
pub fn fit_arima_auto(train: &[f64], max_p: usize, max_q: usize) -> Result<ArimaFit> {
    if train.len() < MIN_TRAIN {
        return Err(ForecastError::InsufficientData {
            needed: MIN_TRAIN,
            got: train.len(),
        });
    }
    if train.iter().any(|v| !v.is_finite()) {
        return Err(ForecastError::NonFinite("ARIMA training data".into()));
    }
    let (d, w) = choose_d(train);
    let has_c = d == 0;
    let cond_start = max_p.min(w.len() / 4);
    let n_terms = w.len() - cond_start;
    let mut diagnostics = Vec::new();
    let mut candidates = Vec::new();
    let mut best: Option<ArimaSpec> = None;
    let mut buf = Vec::with_capacity(w.len());

    for p in 0..=max_p.min(cond_start) {
        for q in 0..=max_q {
            let k = p + q + usize::from(has_c);
            if n_terms <= k + 2 {
                diagnostics.push(format!("({p},{d},{q}) skipped: too few observations"));
                continue;
            }
            let x0 = vec![0.0; k];
            let m = bfgs(|x| css(&w, x, p, q, cond_start, &mut buf), &x0, STEP_TOL, MAX_ITER);
            if !m.converged || !m.value.is_finite() {
                diagnostics.push(format!("({p},{d},{q}) did not converge"));
                continue;
            }
            if !is_stationary(&m.x[..p]) {
                diagnostics.push(format!("({p},{d},{q}) non-stationary AR part"));
                continue;
            }
            if !is_invertible(&m.x[p..p + q]) {
                diagnostics.push(format!("({p},{d},{q}) non-invertible MA part"));
                continue;
            }
            let score = aic(m.value, n_terms, p + q + 1 + usize::from(has_c));
            candidates.push((p, q, score));
            if best.as_ref().is_none_or(|b| score < b.aic) {
                best = Some(ArimaSpec {
                    p,
                    d,
                    q,
                    phi: m.x[..p].to_vec(),
                    theta: m.x[p..p + q].to_vec(),
                    c: if has_c { m.x[p + q] } else { 0.0 },
                    sigma2: m.value / n_terms as f64,
                    aic: score,
                    cond_start,
                });
            }
        }
    }

    let spec = match best {
        Some(spec) => spec,
        None => {
            diagnostics.push(format!("all cells failed; falling back to (0,{d},0)"));
            random_walk_spec(&w, d, cond_start)
        }
    };
    Ok(ArimaFit {
        spec,
        candidates,
        diagnostics,
    })
}

fn random_walk_spec(w: &[f64], d: usize, cond_start: usize) -> ArimaSpec {
    let tail = &w[cond_start.min(w.len())..];
    let n = tail.len().max(1);
    let c = if d == 0 {
        tail.iter().sum::<f64>() / n as f64
    } else {
        0.0
    };
    let css: f64 = tail.iter().map(|v| (v - c).powi(2)).sum();
    ArimaSpec {
        p: 0,
        d,
        q: 0,
        phi: Vec::new(),
        theta: Vec::new(),
        c,
        sigma2: css / n as f64,
        aic: aic(css, n, 1 + usize::from(d == 0)),
        cond_start,
    }
}

/// ARMA recursion on the differenced scale: future innovations are zero,
/// past ones are the CSS residuals.
pub fn arma_forecast(w: &[f64], residuals: &[f64], spec: &ArimaSpec, h: usize) -> Vec<f64> {
    let n = w.len();
    let mut hist = w.to_vec();
    let mut out = Vec::with_capacity(h);
    for k in 0..h {
        let t = n + k;
        let mut pred = spec.c;
        for (i, f) in spec.phi.iter().enumerate() {
            if t > i {
                pred += f * hist[t - 1 - i];
            }
        }
        for (j, th) in spec.theta.iter().enumerate() {
            // Residual index t-1-j is in the past only while it is < n.
            if t > j && t - 1 - j < n {
                pred += th * residuals[t - 1 - j];
            }
        }
        hist.push(pred);
        out.push(pred);
    }
    out
}

/// `h`-step forecasts of `spec` from the end of `train` (original,
/// undifferenced scale).
pub fn arima_forecast(spec: &ArimaSpec, train: &[f64], h: usize) -> Vec<f64> {
    let mut levels = vec![train.to_vec()];
    for _ in 0..spec.d {
        let next = difference(levels.last().expect("non-empty"));
        levels.push(next);
    }
    let w = levels.last().expect("non-empty");
    let mut residuals = Vec::new();
    css_residuals(w, &spec.phi, &spec.theta, spec.c, &mut residuals);
    for e in residuals.iter_mut().take(spec.cond_start) {
        *e = 0.0;
    }
    let mut fc = arma_forecast(w, &residuals, spec, h);
    for level in levels[..spec.d].iter().rev() {
        let mut acc = *level.last().unwrap_or(&0.0);
        for v in fc.iter_mut() {
            acc += *v;
            *v = acc;
        }
    }
    fc
}

struct FittedArima {
    spec: ArimaSpec,
    train: Vec<f64>,
    fallback: bool,
}

impl FittedModel for FittedArima {
    fn forecast(&self, h: usize) -> Vec<f64> {
        arima_forecast(&self.spec, &self.train, h)
    }

    fn describe(&self) -> String {
        format!(
            "ARIMA({},{},{}) c={:.4} aic={:.3}",
            self.spec.p, self.spec.d, self.spec.q, self.spec.c, self.spec.aic
        )
    }

    fn is_fallback(&self) -> bool {
        self.fallback
    }
}

/// Automatic ARIMA behind the [`Forecaster`] contract.
///
/// Windows shorter than [`MIN_TRAIN`] get the random walk ARIMA(0,1,0).
#[derive(Debug, Clone)]
pub struct ArimaForecaster {
    pub max_p: usize,
    pub max_q: usize,
}

impl Default for ArimaForecaster {
    fn default() -> Self {
        Self { max_p: 5, max_q: 5 }
    }
}

impl Forecaster for ArimaForecaster {
    fn id(&self) -> ModelId {
        ModelId::Arima
    }

    fn fit(&mut self, train: &[f64], _period: usize) -> Result<Box<dyn FittedModel>> {
        if train.is_empty() {
            return Err(ForecastError::InsufficientData { needed: 1, got: 0 });
        }
        let (spec, fallback) = if train.len() < MIN_TRAIN {
            let w = difference(train);
            (random_walk_spec(&w, 1, 0), true)
        } else {
            (fit_arima_auto(train, self.max_p, self.max_q)?.spec, false)
        };
        Ok(Box::new(FittedArima {
            spec,
            train: train.to_vec(),
            fallback,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn spec(p: Vec<f64>, q: Vec<f64>, c: f64, d: usize) -> ArimaSpec {
        ArimaSpec {
            p: p.len(),
            d,
            q: q.len(),
            phi: p,
            theta: q,
            c,
            sigma2: 1.0,
            aic: 0.0,
            cond_start: 0,
        }
    }

    #[test]
    fn ar1_recursion() {
        let s = spec(vec![0.5], vec![], 0.0, 0);
        let fc = arima_forecast(&s, &[1.0, 3.0, 4.0], 3);
        assert_eq!(fc, vec![2.0, 1.0, 0.5]);
    }

    #[test]
    fn random_walk_equals_naive() {
        let s = spec(vec![], vec![], 0.0, 1);
        let train = [3.0, 1.0, 4.0, 1.5, 9.0];
        assert_eq!(arima_forecast(&s, &train, 4), vec![9.0; 4]);
    }

    #[test]
    fn ma1_uses_last_residual_then_zero() {
        let s = spec(vec![], vec![0.5], 0.0, 0);
        let w = [0.0, 0.0, 2.0];
        let residuals = [0.0, 0.0, 2.0];
        assert_eq!(arma_forecast(&w, &residuals, &s, 2), vec![1.0, 0.0]);
    }

    #[test]
    fn stationarity_check() {
        assert!(is_stationary(&[0.5]));
        assert!(!is_stationary(&[1.0]));
        assert!(is_stationary(&[0.5, 0.3]));
        assert!(!is_stationary(&[0.5, 0.6]));
        assert!(!is_stationary(&[1.2, -0.1]));
        assert!(is_stationary(&[]));
    }

    #[test]
    fn linear_trend_is_differenced() {
        let y: Vec<f64> = (1..=40).map(|t| 2.0 * t as f64).collect();
        let fit = fit_arima_auto(&y, 2, 2).unwrap();
        assert!(fit.spec.d >= 1);
    }

    #[test]
    fn selected_aic_is_minimal() {
        let mut r = rng(11);
        let mut y = vec![0.0f64];
        for _ in 0..200 {
            let prev = *y.last().unwrap();
            y.push(0.6 * prev + r.sample::<f64, _>(StandardNormal));
        }
        let fit = fit_arima_auto(&y, 3, 3).unwrap();
        assert!(fit.candidates.iter().all(|c| fit.spec.aic <= c.2));
    }

    #[test]
    fn short_window_falls_back_to_random_walk() {
        let mut f = ArimaForecaster::default();
        let m = f.fit(&[1.0, 2.0, 5.0], 1).unwrap();
        assert!(m.is_fallback());
        assert_eq!(m.forecast(3), vec![5.0; 3]);
    }
}
