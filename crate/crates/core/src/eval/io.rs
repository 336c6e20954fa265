//! CSV persistence for results and curves.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::curves::Curves;
use super::prequential::OriginRecord;
use crate::error::{ForecastError, Result};

pub const RESULTS_HEADER: [&str; 9] = [
    "series_id",
    "model_id",
    "train_size",
    "horizon",
    "mase",
    "smape",
    "smape_undefined",
    "failed",
    "elapsed_ns",
];
pub const CURVES_HEADER: [&str; 6] = [
    "model_id",
    "train_size",
    "avg_rank",
    "avg_rank_smoothed",
    "avg_mase",
    "avg_mase_smoothed",
];
pub const TYPE_CURVES_HEADER: [&str; 3] = ["model_type", "train_size", "loess_avg_rank"];

/// Written for undefined or missing values.
pub const NA: &str = "NA";

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| NA.to_string(), fmt_f64)
}

fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        NA.to_string()
    }
}

fn parse_opt(field: &str, line: u64, name: &str) -> Result<Option<f64>> {
    if field == NA {
        return Ok(None);
    }
    field
        .parse::<f64>()
        .map(Some)
        .map_err(|_| ForecastError::Corpus(format!("results line {line}: bad {name} `{field}`")))
}

fn parse_num<T: std::str::FromStr>(field: &str, line: u64, name: &str) -> Result<T> {
    field
        .parse::<T>()
        .map_err(|_| ForecastError::Corpus(format!("results line {line}: bad {name} `{field}`")))
}

pub fn write_results(path: &Path, records: &[OriginRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(RESULTS_HEADER)?;
    for r in records {
        w.write_record([
            r.series_id.clone(),
            r.model_id.to_string(),
            r.train_size.to_string(),
            r.horizon.to_string(),
            fmt_opt(r.mase),
            fmt_opt(r.smape),
            r.smape_undefined.to_string(),
            u8::from(r.failed).to_string(),
            r.elapsed_ns.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<OriginRecord>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != RESULTS_HEADER {
        return Err(ForecastError::Corpus(format!(
            "{}: expected header `{}`",
            path.display(),
            RESULTS_HEADER.join(",")
        )));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let f = |i: usize| row.get(i).unwrap_or("");
        out.push(OriginRecord {
            series_id: f(0).to_string(),
            model_id: f(1)
                .parse()
                .map_err(|_| ForecastError::Corpus(format!("results line {line}: unknown model id `{}`", f(1))))?,
            train_size: parse_num(f(2), line, "train_size")?,
            horizon: parse_num(f(3), line, "horizon")?,
            mase: parse_opt(f(4), line, "mase")?,
            smape: parse_opt(f(5), line, "smape")?,
            smape_undefined: parse_num(f(6), line, "smape_undefined")?,
            failed: parse_num::<u8>(f(7), line, "failed")? != 0,
            elapsed_ns: parse_num(f(8), line, "elapsed_ns")?,
        });
    }
    Ok(out)
}

pub fn write_curves(path: &Path, curves: &Curves) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(CURVES_HEADER)?;
    for c in &curves.models {
        for i in 0..c.train_sizes.len() {
            w.write_record([
                c.model_id.to_string(),
                c.train_sizes[i].to_string(),
                fmt_f64(c.avg_rank[i]),
                fmt_f64(c.avg_rank_smoothed[i]),
                fmt_f64(c.avg_mase[i]),
                fmt_f64(c.avg_mase_smoothed[i]),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_type_curves(path: &Path, curves: &Curves) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", TYPE_CURVES_HEADER.join(","))?;
    for t in &curves.types {
        for (s, v) in t.train_sizes.iter().zip(&t.loess_avg_rank) {
            writeln!(w, "{},{s},{}", t.family, fmt_f64(*v))?;
        }
    }
    w.flush()?;
    Ok(())
}
