//! Plain-text report tables.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use prequel_core::eval::{build_learning_curves, cc_table, diagnostics, summarize_avg_rank, OriginRecord};

use crate::error::CliError;

/// Records grouped by horizon, ascending.
pub fn by_horizon(records: &[OriginRecord]) -> Vec<(usize, Vec<OriginRecord>)> {
    let horizons: BTreeSet<usize> = records.iter().map(|r| r.horizon).collect();
    horizons
        .into_iter()
        .map(|h| (h, records.iter().filter(|r| r.horizon == h).cloned().collect()))
        .collect()
}

fn experiment_name(h: usize) -> String {
    if h == 1 {
        "one-step-ahead".to_string()
    } else {
        format!("multi-step ({h} steps, recursive)")
    }
}

/// Average-of-average-rank table per horizon, cost ratios and diagnostics.
pub fn render(records: &[OriginRecord], window: usize) -> Result<String, CliError> {
    let mut out = String::new();
    for (h, recs) in by_horizon(records) {
        let curves = build_learning_curves(&recs, window)?;
        let series: BTreeSet<&str> = recs.iter().map(|r| r.series_id.as_str()).collect();
        let _ = writeln!(
            out,
            "Average of the average rank, {} experiment ({} series)",
            experiment_name(h),
            series.len()
        );
        let _ = writeln!(out, "{:<6}{:<10}{:>10}", "pos", "model", "avg_rank");
        for (i, (model, value)) in summarize_avg_rank(&curves).iter().enumerate() {
            let _ = writeln!(out, "{:<6}{:<10}{:>10.2}", i + 1, model.as_str(), value);
        }
        out.push('\n');

        match cc_table(&recs) {
            Ok(rows) => {
                let _ = writeln!(out, "Computational cost relative to Naive2");
                let _ = writeln!(out, "{:<10}{:>14}{:>12}", "model", "total_s", "ratio");
                for r in rows {
                    let _ = writeln!(
                        out,
                        "{:<10}{:>14.3}{:>12.2}",
                        r.model_id.as_str(),
                        r.total_ns as f64 / 1e9,
                        r.ratio
                    );
                }
            }
            Err(e) => {
                let _ = writeln!(out, "Computational cost: unavailable ({e})");
            }
        }
        out.push('\n');

        let _ = writeln!(out, "Diagnostics");
        let _ = writeln!(
            out,
            "{:<10}{:>9}{:>8}{:>16}{:>18}",
            "model", "records", "failed", "undefined_mase", "smape_undef_terms"
        );
        for (m, d) in diagnostics(&recs) {
            let _ = writeln!(
                out,
                "{:<10}{:>9}{:>8}{:>16}{:>18}",
                m.as_str(),
                d.records,
                d.failed,
                d.undefined_mase,
                d.smape_undefined_terms
            );
        }
        out.push('\n');
    }
    Ok(out)
}
