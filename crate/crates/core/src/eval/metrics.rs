//! Point-forecast accuracy measures.

/// Terms with `|a| + |f|` below this are undefined for SMAPE.
pub const SMAPE_EPS: f64 = 1e-12;

/// In-sample MAE of the seasonal naive method over `train`. Windows no longer
/// than `period` fall back to lag 1. `None` when the window has fewer than
/// two values.
pub fn mase_scale(train: &[f64], period: usize) -> Option<f64> {
    let m = if train.len() > period.max(1) { period.max(1) } else { 1 };
    if train.len() <= m {
        return None;
    }
    let n = train.len() - m;
    Some(
        train
            .windows(m + 1)
            .map(|w| (w[m] - w[0]).abs())
            .sum::<f64>()
            / n as f64,
    )
}

/// Mean absolute scaled error; `None` when the scale is zero or undefined.
pub fn mase(actual: &[f64], forecast: &[f64], train: &[f64], period: usize) -> Option<f64> {
    let q = mase_scale(train, period)?;
    if !(q > 0.0) || actual.is_empty() || actual.len() != forecast.len() {
        return None;
    }
    let mae = actual
        .iter()
        .zip(forecast)
        .map(|(a, f)| (a - f).abs())
        .sum::<f64>()
        / actual.len() as f64;
    mae.is_finite().then_some(mae / q)
}

/// Symmetric MAPE on the 0..2 scale together with the number of undefined
/// terms. The value is `None` when every term is undefined.
pub fn smape(actual: &[f64], forecast: &[f64]) -> (Option<f64>, usize) {
    let mut sum = 0.0;
    let mut used = 0usize;
    let mut undefined = 0usize;
    for (a, f) in actual.iter().zip(forecast) {
        let denom = a.abs() + f.abs();
        if denom < SMAPE_EPS {
            undefined += 1;
        } else {
            sum += 2.0 * (a - f).abs() / denom;
            used += 1;
        }
    }
    ((used > 0).then(|| sum / used as f64), undefined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_cases() {
        assert_eq!(mase(&[6.0], &[4.0], &[1.0, 2.0, 3.0, 4.0], 1), Some(2.0));
        assert_eq!(mase(&[3.0, 4.0], &[3.0, 4.0], &[1.0, 2.0, 5.0], 1), Some(0.0));
        assert_eq!(mase(&[1.0], &[2.0], &[5.0; 6], 1), None);
        assert_eq!(smape(&[1.0], &[3.0]), (Some(1.0), 0));
        assert_eq!(smape(&[0.0], &[0.0]), (None, 1));
        assert_eq!(smape(&[2.0, 0.0], &[2.0, 0.0]), (Some(0.0), 1));
    }

    #[test]
    fn seasonal_scale_uses_lag_m() {
        let train = [1.0, 5.0, 2.0, 7.0, 3.0, 9.0];
        // lag-2 differences: 1, 2, 1, 2
        assert_eq!(mase_scale(&train, 2), Some(1.5));
        assert_eq!(mase_scale(&train[..2], 2), Some(4.0));
    }

    proptest! {
        #[test]
        fn mase_is_linear_in_errors(c in 0.1f64..10.0, e in proptest::collection::vec(-5.0f64..5.0, 1..10)) {
            let train = [1.0, 3.0, 2.0, 5.0, 4.0];
            let actual = vec![0.0; e.len()];
            let scaled: Vec<f64> = e.iter().map(|v| v * c).collect();
            let a = mase(&actual, &e, &train, 1).unwrap();
            let b = mase(&actual, &scaled, &train, 1).unwrap();
            prop_assert!((b - c * a).abs() <= 1e-9 * (1.0 + b.abs()));
        }
    }
}
