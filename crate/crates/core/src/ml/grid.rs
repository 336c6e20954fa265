//! Hyper-parameter selection on a chronological validation split.

use super::{train, HyperConfig, RegressionModel};
use crate::error::{ForecastError, Result};
use crate::exec::Execution;
use crate::rng::derive;
use crate::series::EmbeddedDataset;

#[derive(Debug, Clone)]
pub struct GridOutcome {
    pub best: HyperConfig,
    pub best_index: usize,
    /// Validation MAE per cell, in grid order; failed cells score infinity.
    pub scores: Vec<f64>,
}

pub fn mean_absolute_error(model: &dyn RegressionModel, data: &EmbeddedDataset) -> f64 {
    let n = data.rows();
    (0..n)
        .map(|i| (model.predict(data.row(i)) - data.targets[i]).abs())
        .sum::<f64>()
        / n as f64
}

/// Trains one model per cell on `train_set`, scores MAE on `validation`, and
/// returns the first cell with the lowest score.
///
/// Cell `i` trains with seed `derive(seed, i)`.
pub fn grid_search(
    grid: &[HyperConfig],
    train_set: &EmbeddedDataset,
    validation: &EmbeddedDataset,
    seed: u64,
    exec: Execution,
) -> Result<GridOutcome> {
    if grid.is_empty() {
        return Err(ForecastError::EmptyGrid("(unspecified)".into()));
    }
    if validation.rows() == 0 {
        return Err(ForecastError::InsufficientData { needed: 1, got: 0 });
    }
    let scores = exec.map_range(grid.len(), |i| {
        match train(&grid[i], train_set, derive(seed, i as u64), Execution::Sequential) {
            Ok(model) => {
                let mae = mean_absolute_error(model.as_ref(), validation);
                if mae.is_finite() {
                    mae
                } else {
                    f64::INFINITY
                }
            }
            Err(_) => f64::INFINITY,
        }
    });
    let (best_index, best_score) = scores
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bs), (i, &s)| if s < bs { (i, s) } else { (bi, bs) });
    if !best_score.is_finite() {
        return Err(ForecastError::Model {
            model: grid[0].learner().to_string(),
            reason: "every grid cell failed to train".into(),
        });
    }
    Ok(GridOutcome {
        best: grid[best_index],
        best_index,
        scores,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ml::{glm_train, Kernel};
    use crate::series::embed;

    fn linear_series(n: usize) -> Vec<f64> {
        let mut y = vec![1.0, 2.0];
        for t in 2..n {
            y.push(0.5 * y[t - 1] + 0.3 * y[t - 2] + 1.0 + ((t * 13) % 7) as f64 * 0.01);
        }
        y
    }

    #[test]
    fn single_cell_grid_returns_it() {
        let d = embed(&linear_series(60), 3).unwrap();
        let cell = HyperConfig::Rf { n_trees: 5 };
        let out = grid_search(&[cell], &d.slice(0..40), &d.slice(40..d.rows()), 1, Execution::Sequential).unwrap();
        assert_eq!(out.best, cell);
    }

    #[test]
    fn unpenalized_glm_wins_on_noiseless_linear_data() {
        // Exact linear recursion: the lambda = 0 fit has zero validation error.
        let mut y = vec![1.0, 2.0];
        for t in 2..80 {
            y.push(0.5 * y[t - 1] + 0.3 * y[t - 2] + 1.0);
        }
        let d = embed(&y, 2).unwrap();
        let grid = [
            HyperConfig::Glm { alpha_mix: 1.0, lambda_reg: 0.5 },
            HyperConfig::Glm { alpha_mix: 1.0, lambda_reg: 0.0 },
        ];
        let out = grid_search(&grid, &d.slice(0..60), &d.slice(60..d.rows()), 0, Execution::Sequential).unwrap();
        assert_eq!(out.best_index, 1);
        assert!(out.scores[1] < 1e-6);
    }

    #[test]
    fn scores_match_independent_rescoring_and_best_is_minimal() {
        let d = embed(&linear_series(90), 3).unwrap();
        let (tr, va) = (d.slice(0..70), d.slice(70..d.rows()));
        let grid = [
            HyperConfig::Glm { alpha_mix: 0.5, lambda_reg: 0.1 },
            HyperConfig::Glm { alpha_mix: 0.0, lambda_reg: 0.01 },
            HyperConfig::Gp { kernel: Kernel::Rbf, tolerance: 0.01 },
            HyperConfig::Gp { kernel: Kernel::Linear, tolerance: 0.001 },
        ];
        let out = grid_search(&grid, &tr, &va, 4, Execution::Parallel).unwrap();
        let m0 = glm_train(&tr, 0.1, 0.5).unwrap();
        assert!((mean_absolute_error(&m0, &va) - out.scores[0]).abs() < 1e-12);
        assert!(out.scores.iter().all(|s| out.scores[out.best_index] <= *s));
    }

    #[test]
    fn empty_grid_is_an_error() {
        let d = embed(&linear_series(30), 2).unwrap();
        assert!(grid_search(&[], &d, &d, 0, Execution::Sequential).is_err());
    }
}
