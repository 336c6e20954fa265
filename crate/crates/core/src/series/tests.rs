//! Seasonality and trend tests used to drive preprocessing decisions.

/// Sample autocorrelations at lags `1..=max_lag`.
pub fn acf(values: &[f64], max_lag: usize) -> Vec<f64> {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let denom: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (1..=max_lag)
        .map(|k| {
            if k >= n || denom == 0.0 {
                return 0.0;
            }
            let num: f64 = (0..n - k)
                .map(|t| (values[t] - mean) * (values[t + k] - mean))
                .sum();
            num / denom
        })
        .collect()
}

/// Seasonality decision: the lag-`period` autocorrelation is significant at
/// the 90% level, with the lower-lag autocorrelations widening the band.
///
/// Returns `false` for nonseasonal periods, series shorter than three cycles,
/// and constant series.
pub fn seasonality_test(values: &[f64], period: usize) -> bool {
    let n = values.len();
    if period <= 1 || n < 3 * period {
        return false;
    }
    let r = acf(values, period);
    if r.iter().all(|v| *v == 0.0) {
        return false;
    }
    let lower: f64 = r[..period - 1].iter().map(|v| v * v).sum();
    let limit = 1.645 * ((1.0 + 2.0 * lower) / n as f64).sqrt();
    r[period - 1].abs() > limit
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoxStuart {
    pub trend: bool,
    pub p_value: f64,
    /// Pairs where the later value is larger.
    pub positives: usize,
    /// Untied pairs.
    pub pairs: usize,
    pub diagnostic: Option<String>,
}

/// Cox-Stuart sign test for monotone trend.
///
/// Pairs `y[i]` with `y[i + ceil(n/2)]`, drops ties and applies a two-sided
/// exact binomial test with success probability 1/2.
pub fn cox_stuart_test(values: &[f64], alpha: f64) -> CoxStuart {
    let n = values.len();
    if n < 6 {
        return CoxStuart {
            trend: false,
            p_value: 1.0,
            positives: 0,
            pairs: 0,
            diagnostic: Some(format!("series too short ({n} < 6)")),
        };
    }
    let offset = n.div_ceil(2);
    let (mut pos, mut neg) = (0usize, 0usize);
    for i in 0..n - offset {
        let d = values[i + offset] - values[i];
        if d > 0.0 {
            pos += 1;
        } else if d < 0.0 {
            neg += 1;
        }
    }
    let k = pos + neg;
    if k == 0 {
        return CoxStuart {
            trend: false,
            p_value: 1.0,
            positives: 0,
            pairs: 0,
            diagnostic: Some("all pairs tied".into()),
        };
    }
    let p_value = binomial_two_sided(pos, k);
    CoxStuart {
        trend: p_value < alpha,
        p_value,
        positives: pos,
        pairs: k,
        diagnostic: None,
    }
}

/// Two-sided exact p-value of `s` successes out of `k` fair trials.
fn binomial_two_sided(s: usize, k: usize) -> f64 {
    let ln_half_k = k as f64 * 0.5f64.ln();
    // ln C(k, i) accumulated incrementally.
    let mut ln_choose = 0.0;
    let mut pmf = Vec::with_capacity(k + 1);
    for i in 0..=k {
        if i > 0 {
            ln_choose += ((k - i + 1) as f64).ln() - (i as f64).ln();
        }
        pmf.push((ln_choose + ln_half_k).exp());
    }
    let lower: f64 = pmf[..=s].iter().sum();
    let upper: f64 = pmf[s..].iter().sum();
    (2.0 * lower.min(upper)).min(1.0)
}

#[cfg(test)]
mod unit {
    use super::*;

    #[test]
    fn nonseasonal_period_is_never_seasonal() {
        let y: Vec<f64> = (0..100).map(|t| (t as f64).sin()).collect();
        assert!(!seasonality_test(&y, 1));
    }

    #[test]
    fn sine_wave_is_seasonal() {
        let y: Vec<f64> = (1..=240)
            .map(|t| 10.0 + (std::f64::consts::TAU * t as f64 / 12.0).sin())
            .collect();
        assert!(seasonality_test(&y, 12));
        // Too short for a decision.
        assert!(!seasonality_test(&y[..35], 12));
    }

    #[test]
    fn increasing_series_has_trend() {
        let y: Vec<f64> = (1..=40).map(f64::from).collect();
        let cs = cox_stuart_test(&y, 0.05);
        assert!(cs.trend);
        assert_eq!(cs.positives, 20);
        assert!((cs.p_value - 2.0 * 0.5f64.powi(20)).abs() < 1e-18);
    }

    #[test]
    fn constant_and_alternating_have_no_trend() {
        let c = cox_stuart_test(&[3.0; 20], 0.05);
        assert!(!c.trend);
        assert!(c.diagnostic.is_some());
        let alt: Vec<f64> = (0..40).map(|t| (t % 2) as f64).collect();
        let a = cox_stuart_test(&alt, 0.05);
        assert!(!a.trend);
        assert_eq!(a.pairs, 0);
    }

    #[test]
    fn binomial_p_values() {
        // k = 4, s = 2: symmetric centre.
        assert!((binomial_two_sided(2, 4) - 1.0).abs() < 1e-12);
        // k = 5, s = 0: 2 * 1/32.
        assert!((binomial_two_sided(0, 5) - 2.0 / 32.0).abs() < 1e-12);
        // k = 10, s = 8: P(X >= 8) = 56/1024, doubled.
        assert!((binomial_two_sided(8, 10) - 112.0 / 1024.0).abs() < 1e-12);
    }
}
