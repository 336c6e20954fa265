//! Learning curves: cross-series averages by training size, trailing moving
//! averages and LOESS smoothing per model family.

use std::collections::{BTreeMap, BTreeSet};

use super::prequential::OriginRecord;
use super::rank::assign_ranks;
use crate::error::{ForecastError, Result};
use crate::models::{ModelFamily, ModelId};

pub const DEFAULT_WINDOW: usize = 50;
pub const LOESS_SPAN: f64 = 0.75;

/// Per-model learning curve.
#[derive(Debug, Clone, PartialEq)]
pub struct LearningCurve {
    pub model_id: ModelId,
    pub train_sizes: Vec<usize>,
    pub avg_rank: Vec<f64>,
    pub avg_rank_smoothed: Vec<f64>,
    /// Mean MASE over series with a defined value; NaN when there is none.
    pub avg_mase: Vec<f64>,
    pub avg_mase_smoothed: Vec<f64>,
}

/// LOESS of the pooled smoothed average ranks of one model family.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeCurve {
    pub family: ModelFamily,
    pub train_sizes: Vec<usize>,
    pub loess_avg_rank: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curves {
    pub models: Vec<LearningCurve>,
    pub types: Vec<TypeCurve>,
}

/// Trailing moving average: entry `i` is the mean of the finite values among
/// the last `min(i + 1, window)` raw entries.
pub fn trailing_mean(raw: &[f64], window: usize) -> Vec<f64> {
    let w = window.max(1);
    (0..raw.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(w);
            let (s, c) = raw[lo..=i]
                .iter()
                .filter(|v| v.is_finite())
                .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
            if c == 0 {
                f64::NAN
            } else {
                s / c as f64
            }
        })
        .collect()
}

/// Locally weighted linear regression with tricube weights, evaluated at
/// each of `at`. The neighbourhood holds `ceil(span * n)` points.
pub fn loess(x: &[f64], y: &[f64], at: &[f64], span: f64) -> Vec<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .map(|(&a, &b)| (a, b))
        .collect();
    let n = pts.len();
    if n == 0 {
        return vec![f64::NAN; at.len()];
    }
    let q = ((span * n as f64).ceil() as usize).clamp(1, n);
    let mut dist = vec![0.0; n];
    at.iter()
        .map(|&x0| {
            for (d, (xi, _)) in dist.iter_mut().zip(&pts) {
                *d = (xi - x0).abs();
            }
            let mut sorted = dist.clone();
            let (_, &mut dq, _) = sorted.select_nth_unstable_by(q - 1, |a, b| a.total_cmp(b));
            let mut dmax = dq;
            if span > 1.0 {
                dmax *= span;
            }
            let (mut sw, mut sx, mut sy) = (0.0, 0.0, 0.0);
            let mut weights = Vec::with_capacity(n);
            for (d, &(xi, yi)) in dist.iter().zip(&pts) {
                let w = if dmax > 0.0 {
                    let u = d / dmax;
                    if u < 1.0 {
                        (1.0 - u * u * u).powi(3)
                    } else {
                        0.0
                    }
                } else if *d == 0.0 {
                    1.0
                } else {
                    0.0
                };
                weights.push(w);
                sw += w;
                sx += w * xi;
                sy += w * yi;
            }
            if sw <= 0.0 {
                return f64::NAN;
            }
            let (mx, my) = (sx / sw, sy / sw);
            let (mut sxx, mut sxy) = (0.0, 0.0);
            for (w, &(xi, yi)) in weights.iter().zip(&pts) {
                sxx += w * (xi - mx) * (xi - mx);
                sxy += w * (xi - mx) * (yi - my);
            }
            if sxx <= 1e-12 * sw * (1.0 + mx * mx) {
                my
            } else {
                my + sxy / sxx * (x0 - mx)
            }
        })
        .collect()
}

/// Checks that, within each series, every model covers the same origins.
fn check_coverage(records: &[OriginRecord], models: &[ModelId]) -> Result<()> {
    let mut cover: BTreeMap<(&str, ModelId), BTreeSet<usize>> = BTreeMap::new();
    let mut series: BTreeSet<&str> = BTreeSet::new();
    for r in records {
        cover
            .entry((r.series_id.as_str(), r.model_id))
            .or_default()
            .insert(r.train_size);
        series.insert(&r.series_id);
    }
    let mut gaps = Vec::new();
    let empty = BTreeSet::new();
    for s in &series {
        let union: BTreeSet<usize> = models
            .iter()
            .flat_map(|m| cover.get(&(*s, *m)).unwrap_or(&empty).iter().copied())
            .collect();
        for m in models {
            let have = cover.get(&(*s, *m)).unwrap_or(&empty);
            let missing: Vec<usize> = union.difference(have).copied().collect();
            if !missing.is_empty() {
                gaps.push(format!(
                    "{s}/{m}: {} missing train sizes (first {})",
                    missing.len(),
                    missing[0]
                ));
            }
        }
    }
    if gaps.is_empty() {
        Ok(())
    } else {
        Err(ForecastError::Coverage(gaps.join("; ")))
    }
}

/// Models present in `records`, in canonical id order.
pub fn models_in(records: &[OriginRecord]) -> Vec<ModelId> {
    let set: BTreeSet<ModelId> = records.iter().map(|r| r.model_id).collect();
    set.into_iter().collect()
}

/// Builds per-model and per-family curves. Ranks are computed over the
/// models present in `records`.
pub fn build_learning_curves(records: &[OriginRecord], window: usize) -> Result<Curves> {
    let models = models_in(records);
    check_coverage(records, &models)?;
    let ranks = assign_ranks(records);

    // (model, train size) -> (rank sum, count, mase sum, mase count)
    let mut acc: BTreeMap<(ModelId, usize), (f64, usize, f64, usize)> = BTreeMap::new();
    for (r, rank) in records.iter().zip(&ranks) {
        let e = acc.entry((r.model_id, r.train_size)).or_default();
        e.0 += rank;
        e.1 += 1;
        if let (true, Some(m)) = (r.is_valid(), r.mase) {
            e.2 += m;
            e.3 += 1;
        }
    }
    let mut curves = Vec::with_capacity(models.len());
    for &model in &models {
        let mut c = LearningCurve {
            model_id: model,
            train_sizes: Vec::new(),
            avg_rank: Vec::new(),
            avg_rank_smoothed: Vec::new(),
            avg_mase: Vec::new(),
            avg_mase_smoothed: Vec::new(),
        };
        for (&(_, size), &(rs, rc, ms, mc)) in acc.range((model, 0)..=(model, usize::MAX)) {
            c.train_sizes.push(size);
            c.avg_rank.push(rs / rc as f64);
            c.avg_mase.push(if mc == 0 { f64::NAN } else { ms / mc as f64 });
        }
        c.avg_rank_smoothed = trailing_mean(&c.avg_rank, window);
        c.avg_mase_smoothed = trailing_mean(&c.avg_mase, window);
        curves.push(c);
    }

    let mut types = Vec::new();
    for family in [ModelFamily::Statistical, ModelFamily::MachineLearning] {
        let members: Vec<&LearningCurve> = curves.iter().filter(|c| c.model_id.family() == family).collect();
        if members.is_empty() {
            continue;
        }
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        let mut sizes = BTreeSet::new();
        for c in &members {
            for (s, v) in c.train_sizes.iter().zip(&c.avg_rank_smoothed) {
                xs.push(*s as f64);
                ys.push(*v);
                sizes.insert(*s);
            }
        }
        let sizes: Vec<usize> = sizes.into_iter().collect();
        let at: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
        types.push(TypeCurve {
            family,
            loess_avg_rank: loess(&xs, &ys, &at, LOESS_SPAN),
            train_sizes: sizes,
        });
    }
    Ok(Curves { models: curves, types })
}
