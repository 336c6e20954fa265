//! Exact Gaussian-process regression (posterior mean only).

use std::fmt;
use std::str::FromStr;

use super::linalg::{cholesky_in_place, cholesky_solve, dot};
use super::RegressionModel;
use crate::error::{ForecastError, Result};
use crate::series::EmbeddedDataset;

pub const DEFAULT_MAX_ROWS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Linear,
    Rbf,
    Polynomial,
    Laplace,
}

impl Kernel {
    pub const ALL: [Kernel; 4] = [Kernel::Linear, Kernel::Rbf, Kernel::Polynomial, Kernel::Laplace];

    pub fn as_str(self) -> &'static str {
        match self {
            Kernel::Linear => "linear",
            Kernel::Rbf => "rbf",
            Kernel::Polynomial => "polynomial",
            Kernel::Laplace => "laplace",
        }
    }

    fn eval(self, a: &[f64], b: &[f64], scale: f64) -> f64 {
        match self {
            Kernel::Linear => dot(a, b),
            Kernel::Polynomial => (dot(a, b) + 1.0).powi(3),
            Kernel::Rbf => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-d2 / (2.0 * scale * scale)).exp()
            }
            Kernel::Laplace => {
                let d1: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
                (-d1 / scale).exp()
            }
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kernel {
    type Err = ForecastError;

    fn from_str(s: &str) -> Result<Self> {
        Kernel::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ForecastError::InvalidParameter(format!("unknown kernel `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpModel {
    pub kernel: Kernel,
    /// Length-scale for the stationary kernels (median pairwise distance).
    pub scale: f64,
    pub noise: f64,
    x: Vec<f64>,
    p: usize,
    weights: Vec<f64>,
}

impl RegressionModel for GpModel {
    fn predict(&self, row: &[f64]) -> f64 {
        self.x
            .chunks_exact(self.p)
            .zip(&self.weights)
            .map(|(xi, w)| w * self.kernel.eval(row, xi, self.scale))
            .sum()
    }
}

/// Median pairwise distance (L2 for RBF, L1 for Laplace).
fn median_distance(data: &EmbeddedDataset, l1: bool) -> f64 {
    let n = data.rows();
    if n < 2 {
        return 1.0;
    }
    let mut d = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        let a = data.row(i);
        for j in i + 1..n {
            let b = data.row(j);
            d.push(if l1 {
                a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
            } else {
                a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            });
        }
    }
    let mid = d.len() / 2;
    let (_, m, _) = d.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    if *m > 0.0 && m.is_finite() {
        *m
    } else {
        1.0
    }
}

/// Fits the posterior mean `k(x, X) (K + noise I)^-1 y`.
///
/// The factorization retries with jitter `1e-10 * trace / n`, growing ten-fold
/// up to three times, before giving up.
pub fn gp_train(data: &EmbeddedDataset, kernel: Kernel, noise: f64) -> Result<GpModel> {
    gp_train_capped(data, kernel, noise, DEFAULT_MAX_ROWS)
}

pub fn gp_train_capped(
    data: &EmbeddedDataset,
    kernel: Kernel,
    noise: f64,
    max_rows: usize,
) -> Result<GpModel> {
    let n = data.rows();
    if n == 0 {
        return Err(ForecastError::InsufficientData { needed: 1, got: 0 });
    }
    if n > max_rows {
        return Err(ForecastError::InvalidParameter(format!(
            "GP training set has {n} rows, above the cap of {max_rows}"
        )));
    }
    if !(noise >= 0.0) {
        return Err(ForecastError::InvalidParameter(format!("GP noise must be >= 0, got {noise}")));
    }
    if data.features.iter().chain(&data.targets).any(|v| !v.is_finite()) {
        return Err(ForecastError::NonFinite("GP training data".into()));
    }
    let scale = match kernel {
        Kernel::Rbf => median_distance(data, false),
        Kernel::Laplace => median_distance(data, true),
        _ => 1.0,
    };
    let mut gram = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let k = kernel.eval(data.row(i), data.row(j), scale);
            gram[i * n + j] = k;
            gram[j * n + i] = k;
        }
        gram[i * n + i] += noise;
    }
    let trace: f64 = (0..n).map(|i| gram[i * n + i]).sum();
    let base_jitter = 1e-10 * trace.abs() / n as f64;
    let mut factor = gram.clone();
    let mut ok = cholesky_in_place(&mut factor, n);
    let mut jitter = base_jitter;
    for _ in 0..3 {
        if ok {
            break;
        }
        factor.copy_from_slice(&gram);
        for i in 0..n {
            factor[i * n + i] += jitter;
        }
        ok = cholesky_in_place(&mut factor, n);
        jitter *= 10.0;
    }
    if !ok {
        return Err(ForecastError::Factorization {
            kernel: kernel.to_string(),
        });
    }
    let weights = cholesky_solve(&factor, n, &data.targets);
    Ok(GpModel {
        kernel,
        scale,
        noise,
        x: data.features.clone(),
        p: data.p,
        weights,
    })
}
