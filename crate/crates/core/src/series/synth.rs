//! Synthetic corpus generator.
//!
//! Four families: a stationary linear AR(2), a trending multiplicative
//! seasonal series (period 12), a two-regime threshold autoregression with
//! regime-dependent noise, and a random walk. Series are assigned families by
//! cycling through a pattern (by default one of each, in that order).

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rand_distr::StandardNormal;

use super::TimeSeries;
use crate::error::{ForecastError, Result};
use crate::rng::{derive, rng, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Ar2,
    Seasonal,
    Tar,
    RandomWalk,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Ar2, Family::Seasonal, Family::Tar, Family::RandomWalk];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Ar2 => "ar2",
            Family::Seasonal => "seasonal",
            Family::Tar => "tar",
            Family::RandomWalk => "rw",
        }
    }

    pub fn period(self) -> usize {
        match self {
            Family::Seasonal => 12,
            _ => 1,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = ForecastError;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str() == s.trim())
            .ok_or_else(|| ForecastError::InvalidParameter(format!("unknown series family `{s}`")))
    }
}

#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub n_series: usize,
    pub length: usize,
    pub seed: u64,
    pub pattern: Vec<Family>,
}

impl SynthSpec {
    pub fn new(n_series: usize, length: usize, seed: u64) -> Self {
        Self {
            n_series,
            length,
            seed,
            pattern: Family::ALL.to_vec(),
        }
    }

    pub fn with_pattern(mut self, pattern: Vec<Family>) -> Self {
        self.pattern = pattern;
        self
    }
}

/// Generates the corpus described by `spec`. Identical specs produce
/// identical series.
pub fn generate(spec: &SynthSpec) -> Result<Vec<TimeSeries>> {
    if spec.length < 100 {
        return Err(ForecastError::InvalidParameter(format!(
            "synthetic series length must be at least 100 (got {})",
            spec.length
        )));
    }
    if spec.pattern.is_empty() {
        return Err(ForecastError::InvalidParameter("empty family pattern".into()));
    }
    (0..spec.n_series)
        .map(|i| {
            let family = spec.pattern[i % spec.pattern.len()];
            let mut r = rng(derive(spec.seed, i as u64));
            let values = match family {
                Family::Ar2 => ar2(&mut r, spec.length),
                Family::Seasonal => seasonal(&mut r, spec.length),
                Family::Tar => tar(&mut r, spec.length),
                Family::RandomWalk => random_walk(&mut r, spec.length),
            };
            TimeSeries::new(
                format!("syn{i:03}_{family}"),
                values,
                family.period(),
                format!("synthetic:{family}"),
            )
        })
        .collect()
}

fn normal(r: &mut Rng) -> f64 {
    r.sample(StandardNormal)
}

const BURN_IN: usize = 200;

fn ar2(r: &mut Rng, n: usize) -> Vec<f64> {
    let phi1 = r.random_range(0.3..0.6);
    let phi2 = r.random_range(0.1..0.3);
    let mu = r.random_range(10.0..30.0);
    let (mut y1, mut y2) = (0.0, 0.0);
    let mut out = Vec::with_capacity(n);
    for t in 0..n + BURN_IN {
        let y = phi1 * y1 + phi2 * y2 + normal(r);
        y2 = y1;
        y1 = y;
        if t >= BURN_IN {
            out.push(mu + y);
        }
    }
    out
}

fn seasonal(r: &mut Rng, n: usize) -> Vec<f64> {
    let level = r.random_range(50.0..150.0);
    let slope = r.random_range(0.02..0.1);
    let amplitude = r.random_range(0.15..0.3);
    let phase = r.random_range(0.0..std::f64::consts::TAU);
    (0..n)
        .map(|t| {
            let season = 1.0 + amplitude * (std::f64::consts::TAU * t as f64 / 12.0 + phase).sin();
            let noise = (1.0 + 0.03 * normal(r)).max(0.5);
            (level + slope * t as f64) * season * noise
        })
        .collect()
}

fn tar(r: &mut Rng, n: usize) -> Vec<f64> {
    let low_phi = r.random_range(0.5..0.7);
    let high_phi = r.random_range(-0.7..-0.5);
    let mut y_prev = 0.0;
    let mut out = Vec::with_capacity(n);
    for t in 0..n + BURN_IN {
        let y = if y_prev <= 0.0 {
            1.0 + low_phi * y_prev + 0.3 * normal(r)
        } else {
            -1.0 + high_phi * y_prev + 1.5 * normal(r)
        };
        y_prev = y;
        if t >= BURN_IN {
            out.push(10.0 + y);
        }
    }
    out
}

fn random_walk(r: &mut Rng, n: usize) -> Vec<f64> {
    let mut y = r.random_range(40.0..60.0);
    (0..n)
        .map(|_| {
            y += normal(r);
            y
        })
        .collect()
}

#[cfg(test)]
mod unit {
    use super::*;

    #[test]
    fn four_series_cover_each_family() {
        let s = generate(&SynthSpec::new(4, 120, 9)).unwrap();
        let ids: Vec<&str> = s.iter().map(|s| s.id()).collect();
        assert_eq!(ids, ["syn000_ar2", "syn001_seasonal", "syn002_tar", "syn003_rw"]);
        assert_eq!(s[1].period(), 12);
        assert!(s.iter().all(|s| s.len() == 120));
    }

    #[test]
    fn same_seed_same_corpus() {
        let a = generate(&SynthSpec::new(6, 150, 3)).unwrap();
        let b = generate(&SynthSpec::new(6, 150, 3)).unwrap();
        assert_eq!(a, b);
        let c = generate(&SynthSpec::new(6, 150, 4)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn short_length_rejected() {
        assert!(generate(&SynthSpec::new(1, 99, 1)).is_err());
    }

    #[test]
    fn seasonal_family_is_positive() {
        let s = generate(&SynthSpec::new(1, 600, 5).with_pattern(vec![Family::Seasonal])).unwrap();
        assert!(s[0].values().iter().all(|v| *v > 0.0));
    }
}
