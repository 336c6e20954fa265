//! Gaussian elastic-net regression by cyclic coordinate descent.
//!
//! Features are standardized internally (population variance); the
//! objective is
//! `(1/2n) * sum (y - b0 - x b)^2 + lambda * (a * |b|_1 + (1 - a)/(2 s_y) * |b|_2^2)`
//! on the standardized scale, where `s_y` is the population standard
//! deviation of the targets. Dividing the ridge term by `s_y` is the glmnet
//! convention and makes the fit equivariant to rescaling `y` (with `lambda`
//! scaled alike). Coordinate updates work on the Gram matrix, so
//! a sweep costs `O(p^2)` regardless of the number of rows.

use super::RegressionModel;
use crate::error::{ForecastError, Result};
use crate::series::EmbeddedDataset;

pub const TOL: f64 = 1e-7;
pub const MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GlmModel {
    pub intercept: f64,
    /// Coefficients on the original feature scale.
    pub coef: Vec<f64>,
    pub sweeps: usize,
}

impl RegressionModel for GlmModel {
    fn predict(&self, row: &[f64]) -> f64 {
        self.intercept + self.coef.iter().zip(row).map(|(b, x)| b * x).sum::<f64>()
    }
}

/// Standardized sufficient statistics of a regression problem.
struct Problem {
    p: usize,
    mean: Vec<f64>,
    sd: Vec<f64>,
    y_mean: f64,
    /// `(1/n) Z^T Z`, row-major.
    gram: Vec<f64>,
    /// `(1/n) Z^T (y - y_mean)`.
    zy: Vec<f64>,
    /// `(1/n) |y - y_mean|^2`.
    yy: f64,
}

impl Problem {
    fn new(data: &EmbeddedDataset) -> Result<Self> {
        let (n, p) = (data.rows(), data.p);
        if n == 0 {
            return Err(ForecastError::InsufficientData { needed: 1, got: 0 });
        }
        if data.features.iter().chain(&data.targets).any(|v| !v.is_finite()) {
            return Err(ForecastError::NonFinite("GLM training data".into()));
        }
        let nf = n as f64;
        let mut mean = vec![0.0; p];
        for i in 0..n {
            for (m, x) in mean.iter_mut().zip(data.row(i)) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= nf);
        let mut sd = vec![0.0; p];
        for i in 0..n {
            for ((s, x), m) in sd.iter_mut().zip(data.row(i)).zip(&mean) {
                *s += (x - m).powi(2);
            }
        }
        sd.iter_mut().for_each(|s| *s = (*s / nf).sqrt());
        let y_mean = data.targets.iter().sum::<f64>() / nf;

        let mut gram = vec![0.0; p * p];
        let mut zy = vec![0.0; p];
        let mut yy = 0.0;
        let mut z = vec![0.0; p];
        for i in 0..n {
            for j in 0..p {
                z[j] = if sd[j] > 0.0 {
                    (data.row(i)[j] - mean[j]) / sd[j]
                } else {
                    0.0
                };
            }
            let r = data.targets[i] - y_mean;
            yy += r * r;
            for j in 0..p {
                zy[j] += z[j] * r;
                for k in 0..=j {
                    gram[j * p + k] += z[j] * z[k];
                }
            }
        }
        for j in 0..p {
            zy[j] /= nf;
            for k in 0..=j {
                gram[j * p + k] /= nf;
                gram[k * p + j] = gram[j * p + k];
            }
        }
        Ok(Self {
            p,
            mean,
            sd,
            y_mean,
            gram,
            zy,
            yy: yy / nf,
        })
    }

    /// Population standard deviation of the targets (1 when constant).
    fn y_scale(&self) -> f64 {
        if self.yy > 0.0 {
            self.yy.sqrt()
        } else {
            1.0
        }
    }

    fn objective(&self, beta: &[f64], gb: &[f64], lambda: f64, alpha: f64) -> f64 {
        let p = self.p;
        let mut quad = self.yy;
        for j in 0..p {
            quad += -2.0 * beta[j] * self.zy[j] + beta[j] * gb[j];
        }
        let l1: f64 = beta.iter().map(|b| b.abs()).sum();
        let l2: f64 = beta.iter().map(|b| b * b).sum();
        0.5 * quad + lambda * (alpha * l1 + 0.5 * (1.0 - alpha) / self.y_scale() * l2)
    }
}

fn soft_threshold(z: f64, g: f64) -> f64 {
    if z > g {
        z - g
    } else if z < -g {
        z + g
    } else {
        0.0
    }
}

/// Smallest penalty (at `alpha = 1`) that zeroes every coefficient.
pub fn lambda_max(data: &EmbeddedDataset) -> Result<f64> {
    let prob = Problem::new(data)?;
    Ok(prob.zy.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

/// `len` log-spaced penalties from `lambda_max` down to `lambda_max * 1e-4`.
pub fn lambda_path(data: &EmbeddedDataset, len: usize) -> Result<Vec<f64>> {
    let top = lambda_max(data)?.max(1e-12);
    if len <= 1 {
        return Ok(vec![top]);
    }
    Ok((0..len)
        .map(|i| top * 1e-4f64.powf(i as f64 / (len - 1) as f64))
        .collect())
}

pub fn glm_train(data: &EmbeddedDataset, lambda: f64, alpha: f64) -> Result<GlmModel> {
    glm_train_traced(data, lambda, alpha, false).map(|(m, _)| m)
}

/// Trains the elastic net; with `trace` set, also returns the objective after
/// every sweep (the first entry is the objective at the zero start).
pub fn glm_train_traced(
    data: &EmbeddedDataset,
    lambda: f64,
    alpha: f64,
    trace: bool,
) -> Result<(GlmModel, Vec<f64>)> {
    if !(0.0..=1.0).contains(&alpha) || !(lambda >= 0.0) {
        return Err(ForecastError::InvalidParameter(format!(
            "GLM needs lambda >= 0 and alpha in [0, 1] (got {lambda}, {alpha})"
        )));
    }
    let prob = Problem::new(data)?;
    let p = prob.p;
    let mut beta = vec![0.0; p];
    let mut gb = vec![0.0; p];
    let mut objectives = Vec::new();
    let track = trace || cfg!(debug_assertions);
    let mut last_obj = if track {
        prob.objective(&beta, &gb, lambda, alpha)
    } else {
        0.0
    };
    if trace {
        objectives.push(last_obj);
    }
    let l1 = lambda * alpha;
    let l2 = lambda * (1.0 - alpha) / prob.y_scale();
    // Coefficient changes are measured in units of sd(y), which keeps the
    // stopping point scale-equivariant.
    let tol = TOL * prob.y_scale();
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut max_change = 0.0_f64;
        for j in 0..p {
            let gjj = prob.gram[j * p + j];
            if prob.sd[j] == 0.0 || gjj <= 0.0 {
                continue;
            }
            let rho = prob.zy[j] - (gb[j] - gjj * beta[j]);
            let new = soft_threshold(rho, l1) / (gjj + l2);
            let delta = new - beta[j];
            if delta != 0.0 {
                for (k, g) in gb.iter_mut().enumerate() {
                    *g += prob.gram[k * p + j] * delta;
                }
                beta[j] = new;
                max_change = max_change.max(delta.abs());
            }
        }
        if track {
            let obj = prob.objective(&beta, &gb, lambda, alpha);
            debug_assert!(
                obj <= last_obj + 1e-10 * last_obj.abs().max(1.0),
                "elastic-net objective increased: {last_obj} -> {obj}"
            );
            last_obj = obj;
            if trace {
                objectives.push(obj);
            }
        }
        if max_change < tol {
            break;
        }
    }

    let coef: Vec<f64> = beta
        .iter()
        .zip(&prob.sd)
        .map(|(b, s)| if *s > 0.0 { b / s } else { 0.0 })
        .collect();
    let intercept = prob.y_mean - coef.iter().zip(&prob.mean).map(|(c, m)| c * m).sum::<f64>();
    Ok((
        GlmModel {
            intercept,
            coef,
            sweeps,
        },
        objectives,
    ))
}
