//! Report tables: average of average ranks, computational-cost ratios and
//! per-model diagnostics.

use std::collections::BTreeMap;

use super::curves::Curves;
use super::prequential::OriginRecord;
use crate::error::{ForecastError, Result};
use crate::models::ModelId;

/// Mean over train sizes of each model's cross-series average rank, sorted
/// ascending (best first).
pub fn summarize_avg_rank(curves: &Curves) -> Vec<(ModelId, f64)> {
    let mut rows: Vec<(ModelId, f64)> = curves
        .models
        .iter()
        .map(|c| (c.model_id, c.avg_rank.iter().sum::<f64>() / c.avg_rank.len().max(1) as f64))
        .collect();
    rows.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    rows
}

pub fn cc_ratio(model_total_ns: f64, naive2_total_ns: f64) -> f64 {
    model_total_ns / naive2_total_ns
}

/// Total elapsed time per model and its ratio to Naive2's total.
#[derive(Debug, Clone, PartialEq)]
pub struct CostRow {
    pub model_id: ModelId,
    pub total_ns: u64,
    pub ratio: f64,
}

pub fn cc_table(records: &[OriginRecord]) -> Result<Vec<CostRow>> {
    let mut totals: BTreeMap<ModelId, u64> = BTreeMap::new();
    for r in records {
        *totals.entry(r.model_id).or_default() += r.elapsed_ns;
    }
    let base = *totals.get(&ModelId::Naive2).ok_or_else(|| {
        ForecastError::InvalidParameter("cost ratios need Naive2 in the results".into())
    })?;
    if base == 0 {
        return Err(ForecastError::InvalidParameter("Naive2 total time is zero".into()));
    }
    Ok(totals
        .into_iter()
        .map(|(model_id, total_ns)| CostRow {
            model_id,
            total_ns,
            ratio: cc_ratio(total_ns as f64, base as f64),
        })
        .collect())
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelDiagnostics {
    pub records: usize,
    pub failed: usize,
    pub undefined_mase: usize,
    pub smape_undefined_terms: usize,
    pub smape_undefined_records: usize,
}

pub fn diagnostics(records: &[OriginRecord]) -> BTreeMap<ModelId, ModelDiagnostics> {
    let mut out: BTreeMap<ModelId, ModelDiagnostics> = BTreeMap::new();
    for r in records {
        let d = out.entry(r.model_id).or_default();
        d.records += 1;
        d.failed += usize::from(r.failed);
        d.undefined_mase += usize::from(!r.failed && r.mase.is_none());
        d.smape_undefined_terms += r.smape_undefined;
        d.smape_undefined_records += usize::from(!r.failed && r.smape.is_none());
    }
    out
}
