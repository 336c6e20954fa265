//! Regression learners used through the autoregressive embedding, and the
//! validation grid search that tunes them.

pub mod forest;
pub mod glm;
pub mod gp;
pub mod grid;
pub mod linalg;

use std::fmt;
use std::str::FromStr;

pub use forest::{rf_train, RandomForest, RfParams};
pub use glm::{glm_train, lambda_path, GlmModel};
pub use gp::{gp_train, GpModel, Kernel};
pub use grid::{grid_search, GridOutcome};

use crate::error::{ForecastError, Result};
use crate::exec::Execution;
use crate::series::EmbeddedDataset;

/// A trained regression function over lag vectors.
pub trait RegressionModel: Send + Sync {
    fn predict(&self, row: &[f64]) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LearnerId {
    Glm,
    Rf,
    Gp,
}

impl LearnerId {
    pub const ALL: [LearnerId; 3] = [LearnerId::Glm, LearnerId::Rf, LearnerId::Gp];

    pub fn as_str(self) -> &'static str {
        match self {
            LearnerId::Glm => "GLM",
            LearnerId::Rf => "RF",
            LearnerId::Gp => "GP",
        }
    }
}

impl fmt::Display for LearnerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LearnerId {
    type Err = ForecastError;

    fn from_str(s: &str) -> Result<Self> {
        LearnerId::ALL
            .into_iter()
            .find(|l| l.as_str() == s.trim())
            .ok_or_else(|| ForecastError::InvalidParameter(format!("unknown learner `{s}`")))
    }
}

/// One cell of a hyper-parameter grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HyperConfig {
    Glm { alpha_mix: f64, lambda_reg: f64 },
    Rf { n_trees: usize },
    Gp { kernel: Kernel, tolerance: f64 },
}

impl HyperConfig {
    pub fn learner(&self) -> LearnerId {
        match self {
            HyperConfig::Glm { .. } => LearnerId::Glm,
            HyperConfig::Rf { .. } => LearnerId::Rf,
            HyperConfig::Gp { .. } => LearnerId::Gp,
        }
    }
}

impl fmt::Display for HyperConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HyperConfig::Glm { alpha_mix, lambda_reg } => {
                write!(f, "GLM(alpha_mix={alpha_mix}, lambda={lambda_reg:.6e})")
            }
            HyperConfig::Rf { n_trees } => write!(f, "RF(n_trees={n_trees})"),
            HyperConfig::Gp { kernel, tolerance } => {
                write!(f, "GP(kernel={kernel}, tolerance={tolerance})")
            }
        }
    }
}

/// Declared grid values per learner.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub glm_alpha: Vec<f64>,
    /// Number of log-spaced penalties on the data-dependent path.
    pub glm_path_len: usize,
    pub rf_trees: Vec<usize>,
    pub gp_kernels: Vec<Kernel>,
    pub gp_tolerances: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            glm_alpha: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            glm_path_len: 20,
            rf_trees: vec![50, 100, 250, 500],
            gp_kernels: Kernel::ALL.to_vec(),
            gp_tolerances: vec![0.001, 0.01],
        }
    }
}

impl GridSpec {
    /// Grid cells for `learner`, in declaration order. GLM penalties are
    /// computed from `data`.
    pub fn cells(&self, learner: LearnerId, data: &EmbeddedDataset) -> Result<Vec<HyperConfig>> {
        Ok(match learner {
            LearnerId::Glm => {
                let path = lambda_path(data, self.glm_path_len)?;
                self.glm_alpha
                    .iter()
                    .flat_map(|&a| {
                        path.iter().map(move |&l| HyperConfig::Glm {
                            alpha_mix: a,
                            lambda_reg: l,
                        })
                    })
                    .collect()
            }
            LearnerId::Rf => self
                .rf_trees
                .iter()
                .map(|&n| HyperConfig::Rf { n_trees: n })
                .collect(),
            LearnerId::Gp => self
                .gp_kernels
                .iter()
                .flat_map(|&k| {
                    self.gp_tolerances.iter().map(move |&t| HyperConfig::Gp {
                        kernel: k,
                        tolerance: t,
                    })
                })
                .collect(),
        })
    }
}

/// Configuration used when a window is too small to tune.
pub fn default_config(learner: LearnerId, data: &EmbeddedDataset) -> Result<HyperConfig> {
    Ok(match learner {
        LearnerId::Glm => {
            let path = lambda_path(data, 20)?;
            HyperConfig::Glm {
                alpha_mix: 0.5,
                lambda_reg: path[path.len() / 2 - 1],
            }
        }
        LearnerId::Rf => HyperConfig::Rf { n_trees: 100 },
        LearnerId::Gp => HyperConfig::Gp {
            kernel: Kernel::Rbf,
            tolerance: 0.01,
        },
    })
}

/// Trains the learner named by `config`.
pub fn train(
    config: &HyperConfig,
    data: &EmbeddedDataset,
    seed: u64,
    exec: Execution,
) -> Result<Box<dyn RegressionModel>> {
    Ok(match *config {
        HyperConfig::Glm {
            alpha_mix,
            lambda_reg,
        } => Box::new(glm_train(data, lambda_reg, alpha_mix)?),
        HyperConfig::Rf { n_trees } => {
            if data.rows() == 0 {
                return Err(ForecastError::InsufficientData { needed: 1, got: 0 });
            }
            let mut params = RfParams::new(n_trees);
            params.exec = exec;
            Box::new(rf_train(data, &params, seed))
        }
        HyperConfig::Gp { kernel, tolerance } => Box::new(gp_train(data, kernel, tolerance)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_matches_declared_sets() {
        let data = EmbeddedDataset {
            features: (0..40).map(|i| (i as f64).sin()).collect(),
            targets: (0..20).map(|i| i as f64).collect(),
            p: 2,
        };
        let spec = GridSpec::default();
        assert_eq!(spec.cells(LearnerId::Glm, &data).unwrap().len(), 100);
        assert_eq!(spec.cells(LearnerId::Rf, &data).unwrap().len(), 4);
        let gp = spec.cells(LearnerId::Gp, &data).unwrap();
        assert_eq!(gp.len(), 8);
        for c in gp {
            let HyperConfig::Gp { tolerance, .. } = c else { panic!() };
            assert!(tolerance == 0.001 || tolerance == 0.01);
        }
        for c in spec.cells(LearnerId::Glm, &data).unwrap() {
            let HyperConfig::Glm { alpha_mix, .. } = c else { panic!() };
            assert!([0.0, 0.25, 0.5, 0.75, 1.0].contains(&alpha_mix));
        }
    }
}
