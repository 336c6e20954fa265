//! CSV corpus ingestion and emission.
//!
//! A corpus is a long-format observations file with header `series_id,t,value`
//! (rows of one series contiguous and sorted by a 0-based `t`) plus a sidecar
//! metadata file with header `series_id,period_m,source`.
//!
//! A corpus path may be a directory holding `series.csv` and `metadata.csv`,
//! or an observations file `name.csv` whose sidecar is `name.meta.csv`.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::TimeSeries;
use crate::error::{ForecastError, Result};

pub const SERIES_HEADER: [&str; 3] = ["series_id", "t", "value"];
pub const METADATA_HEADER: [&str; 3] = ["series_id", "period_m", "source"];

#[derive(Debug, Clone)]
pub struct CorpusOptions {
    /// Truncation cap on series length.
    pub cap: usize,
    /// Series shorter than this (after truncation) are rejected with a warning.
    pub min_len: usize,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        Self {
            cap: 1000,
            min_len: 2 * 18 + 18,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub series: Vec<TimeSeries>,
    /// Soft problems: rejected short series, missing sidecar, orphan metadata.
    pub warnings: Vec<String>,
}

/// Per-series outcome of scanning a corpus.
#[derive(Debug, Clone)]
pub struct ScannedSeries {
    pub id: String,
    pub values: Vec<f64>,
    pub period: usize,
    pub source: String,
    pub errors: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct CorpusScan {
    pub series: Vec<ScannedSeries>,
    /// Errors not attributable to a single series (header, empty file).
    pub file_errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl CorpusScan {
    pub fn hard_errors(&self) -> Vec<String> {
        let mut out = self.file_errors.clone();
        for s in &self.series {
            out.extend(s.errors.iter().cloned());
        }
        out
    }
}

/// Resolves `(observations, metadata)` file paths for a corpus path.
pub fn corpus_files(path: &Path) -> (PathBuf, PathBuf) {
    if path.is_dir() {
        (path.join("series.csv"), path.join("metadata.csv"))
    } else {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        (path.to_path_buf(), path.with_file_name(format!("{stem}.meta.csv")))
    }
}

/// Parses a corpus, collecting every schema violation instead of stopping at
/// the first one.
pub fn scan_corpus(path: &Path, opts: &CorpusOptions) -> Result<CorpusScan> {
    let (data_path, meta_path) = corpus_files(path);
    let mut scan = CorpusScan::default();

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(&data_path)?;
    let header = reader.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != SERIES_HEADER {
        scan.file_errors.push(format!(
            "{}: expected header `{}`, found `{}`",
            data_path.display(),
            SERIES_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        ));
        return Ok(scan);
    }

    let mut seen: HashSet<String> = HashSet::new();
    let mut expected_t = 0usize;
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let id = record.get(0).unwrap_or("").to_string();
        if id.is_empty() {
            scan.file_errors.push(format!("line {line}: empty series_id"));
            continue;
        }
        let is_current = scan.series.last().is_some_and(|s| s.id == id);
        if !is_current {
            if !seen.insert(id.clone()) {
                scan.file_errors.push(format!(
                    "line {line}: duplicate series id `{id}` (rows of a series must be contiguous)"
                ));
                continue;
            }
            scan.series.push(ScannedSeries {
                id: id.clone(),
                values: Vec::new(),
                period: 1,
                source: String::new(),
                errors: Vec::new(),
            });
            expected_t = 0;
        }
        let current = scan.series.last_mut().expect("pushed above");
        if record.len() != 3 {
            current
                .errors
                .push(format!("series `{id}` line {line}: expected 3 fields, found {}", record.len()));
            continue;
        }
        match record[1].parse::<usize>() {
            Ok(t) if t == expected_t => {}
            Ok(t) => {
                current.errors.push(format!(
                    "series `{id}` line {line}: expected t={expected_t}, found t={t} (gap or unsorted rows)"
                ));
                expected_t = t;
            }
            Err(_) => {
                current.errors.push(format!(
                    "series `{id}` line {line}: t `{}` is not a nonnegative integer",
                    &record[1]
                ));
            }
        }
        expected_t += 1;
        if current.values.len() >= opts.cap {
            continue;
        }
        let raw = &record[2];
        if raw.is_empty() {
            current
                .errors
                .push(format!("series `{id}` line {line}: missing value"));
            continue;
        }
        match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => current.values.push(v),
            Ok(_) => current
                .errors
                .push(format!("series `{id}` line {line}: non-finite value `{raw}`")),
            Err(_) => current
                .errors
                .push(format!("series `{id}` line {line}: non-numeric value `{raw}`")),
        }
    }
    if scan.series.is_empty() && scan.file_errors.is_empty() {
        scan.file_errors
            .push(format!("{}: corpus contains no observations", data_path.display()));
    }

    if meta_path.exists() {
        read_metadata(&meta_path, &mut scan)?;
    } else {
        scan.warnings.push(format!(
            "no metadata file at {}; every series treated as nonseasonal",
            meta_path.display()
        ));
    }
    Ok(scan)
}

fn read_metadata(path: &Path, scan: &mut CorpusScan) -> Result<()> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)?;
    let header = reader.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != METADATA_HEADER {
        scan.file_errors.push(format!(
            "{}: expected header `{}`",
            path.display(),
            METADATA_HEADER.join(",")
        ));
        return Ok(());
    }
    let index: HashMap<String, usize> = scan
        .series
        .iter()
        .enumerate()
        .map(|(i, s)| (s.id.clone(), i))
        .collect();
    let mut described = HashSet::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let id = record.get(0).unwrap_or("");
        let Some(&i) = index.get(id) else {
            scan.warnings
                .push(format!("metadata line {line}: unknown series `{id}`"));
            continue;
        };
        if !described.insert(id.to_string()) {
            scan.file_errors
                .push(format!("metadata line {line}: duplicate series id `{id}`"));
            continue;
        }
        match record.get(1).unwrap_or("").parse::<usize>() {
            Ok(m) if m > 0 => scan.series[i].period = m,
            _ => scan.series[i]
                .errors
                .push(format!("metadata line {line}: period_m must be a positive integer")),
        }
        scan.series[i].source = record.get(2).unwrap_or("").to_string();
    }
    for s in &mut scan.series {
        if !described.contains(&s.id) {
            s.errors
                .push(format!("series `{}` has no metadata row", s.id));
        }
    }
    Ok(())
}

/// Loads a corpus, truncating each series to `opts.cap` observations.
///
/// Any schema violation (missing or non-numeric value, gap in `t`, duplicate
/// id) is a hard error listing every offending series and line. Series
/// shorter than `opts.min_len` are dropped and reported in `warnings`.
pub fn load_corpus(path: &Path, opts: &CorpusOptions) -> Result<Corpus> {
    let scan = scan_corpus(path, opts)?;
    let errors = scan.hard_errors();
    if !errors.is_empty() {
        return Err(ForecastError::Corpus(errors.join("; ")));
    }
    let mut corpus = Corpus {
        series: Vec::with_capacity(scan.series.len()),
        warnings: scan.warnings,
    };
    for s in scan.series {
        if s.values.len() < opts.min_len {
            corpus.warnings.push(format!(
                "series `{}` rejected: length {} below minimum {}",
                s.id,
                s.values.len(),
                opts.min_len
            ));
            continue;
        }
        match TimeSeries::new(s.id.clone(), s.values, s.period, s.source) {
            Ok(ts) => corpus.series.push(ts),
            Err(e) => corpus
                .warnings
                .push(format!("series `{}` rejected: {e}", s.id)),
        }
    }
    Ok(corpus)
}

/// Writes `series` as a corpus directory (`series.csv` + `metadata.csv`).
pub fn write_corpus(dir: &Path, series: &[TimeSeries]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut data = std::io::BufWriter::new(File::create(dir.join("series.csv"))?);
    writeln!(data, "{}", SERIES_HEADER.join(","))?;
    for s in series {
        for (t, v) in s.values().iter().enumerate() {
            writeln!(data, "{},{},{}", s.id(), t, v)?;
        }
    }
    data.flush()?;
    let mut meta = std::io::BufWriter::new(File::create(dir.join("metadata.csv"))?);
    writeln!(meta, "{}", METADATA_HEADER.join(","))?;
    for s in series {
        writeln!(meta, "{},{},{}", s.id(), s.period(), s.source())?;
    }
    meta.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, data: &str, meta: Option<&str>) {
        std::fs::write(dir.join("series.csv"), data).unwrap();
        if let Some(m) = meta {
            std::fs::write(dir.join("metadata.csv"), m).unwrap();
        }
    }

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("prequel-corpus-{name}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    fn small() -> CorpusOptions {
        CorpusOptions { cap: 1000, min_len: 1 }
    }

    #[test]
    fn parses_three_rows() {
        let dir = tmp("three");
        write(
            &dir,
            "series_id,t,value\na,0,1.5\na,1,2\na,2,3\n",
            Some("series_id,period_m,source\na,1,test\n"),
        );
        let c = load_corpus(&dir, &small()).unwrap();
        assert_eq!(c.series.len(), 1);
        assert_eq!(c.series[0].values(), &[1.5, 2.0, 3.0]);
        assert_eq!(c.series[0].source(), "test");
    }

    #[test]
    fn truncates_at_cap() {
        let dir = tmp("cap");
        let mut data = String::from("series_id,t,value\n");
        for t in 0..1100 {
            data.push_str(&format!("s,{t},{}\n", t as f64 * 0.5));
        }
        write(&dir, &data, Some("series_id,period_m,source\ns,1,x\n"));
        let c = load_corpus(&dir, &CorpusOptions::default()).unwrap();
        assert_eq!(c.series[0].len(), 1000);
    }

    #[test]
    fn empty_value_names_series_and_line() {
        let dir = tmp("empty");
        write(
            &dir,
            "series_id,t,value\nabc,0,1\nabc,1,\nabc,2,3\n",
            Some("series_id,period_m,source\nabc,1,x\n"),
        );
        let err = load_corpus(&dir, &small()).unwrap_err().to_string();
        assert!(err.contains("abc") && err.contains("line 3"), "{err}");
    }

    #[test]
    fn rejects_non_numeric_gap_and_duplicate() {
        let dir = tmp("bad");
        write(
            &dir,
            "series_id,t,value\na,0,1\na,1,x\n",
            Some("series_id,period_m,source\na,1,x\n"),
        );
        assert!(load_corpus(&dir, &small()).unwrap_err().to_string().contains("non-numeric"));

        write(&dir, "series_id,t,value\na,0,1\na,2,2\n", None);
        assert!(load_corpus(&dir, &small()).unwrap_err().to_string().contains("gap"));

        write(&dir, "series_id,t,value\na,0,1\nb,0,2\na,1,3\n", None);
        assert!(load_corpus(&dir, &small()).unwrap_err().to_string().contains("duplicate"));
    }

    #[test]
    fn short_series_are_warned_not_fatal() {
        let dir = tmp("short");
        let mut data = String::from("series_id,t,value\n");
        for t in 0..60 {
            data.push_str(&format!("long,{t},{t}\n"));
        }
        data.push_str("short,0,1\nshort,1,2\n");
        write(&dir, &data, Some("series_id,period_m,source\nlong,1,x\nshort,1,x\n"));
        let c = load_corpus(&dir, &CorpusOptions::default()).unwrap();
        assert_eq!(c.series.len(), 1);
        assert!(c.warnings.iter().any(|w| w.contains("short")));
    }

    #[test]
    fn empty_file_is_an_error() {
        let dir = tmp("nothing");
        write(&dir, "", None);
        assert!(load_corpus(&dir, &small()).is_err());
    }

    #[test]
    fn write_then_load_roundtrips() {
        let dir = tmp("rt");
        let s = TimeSeries::new("z", vec![1.25, -2.0, 3.5, 4.0], 2, "gen").unwrap();
        write_corpus(&dir, std::slice::from_ref(&s)).unwrap();
        let c = load_corpus(&dir, &small()).unwrap();
        assert_eq!(c.series, vec![s]);
    }
}
