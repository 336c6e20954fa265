//! Subcommand implementations. Each writes human-readable output to `out`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use prequel_core::eval::{
    build_learning_curves, cc_table, read_results, run_experiment, write_curves, write_results,
    write_type_curves, OriginRecord, PrequentialConfig, TaskSummary,
};
use prequel_core::exec::with_workers;
use prequel_core::models::ModelId;
use prequel_core::series::corpus::{scan_corpus, write_corpus, CorpusOptions};
use prequel_core::series::load_corpus;
use prequel_core::series::synth::{generate, Family, SynthSpec};
use prequel_core::Execution;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::plot::{cc_bars_svg, curve_svg, CurveMetric};
use crate::report::{by_horizon, render};

pub const RESULTS_FILE: &str = "results.csv";
pub const CURVES_FILE: &str = "curves.csv";
pub const TYPE_CURVES_FILE: &str = "type_curves.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

fn data_err(context: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {e}", context.display()))
}

/// Checks a corpus and prints one line per series. Fails on any hard error.
pub fn validate(corpus: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let opts = CorpusOptions::default();
    let scan = scan_corpus(corpus, &opts).map_err(|e| data_err(corpus, e))?;
    for w in &scan.warnings {
        writeln!(out, "warning: {w}")?;
    }
    for e in &scan.file_errors {
        writeln!(out, "error: {e}")?;
    }
    for s in &scan.series {
        let status = if !s.errors.is_empty() {
            "FAIL"
        } else if s.values.len() < opts.min_len {
            "SHORT"
        } else {
            "ok"
        };
        writeln!(
            out,
            "{:<24} length={:<6} period={:<4} {status}",
            s.id,
            s.values.len(),
            s.period
        )?;
        for e in &s.errors {
            writeln!(out, "  {e}")?;
        }
    }
    let errors = scan.hard_errors();
    if errors.is_empty() {
        writeln!(out, "{} series, corpus valid", scan.series.len())?;
        Ok(())
    } else {
        Err(CliError::Data(format!("{} schema violation(s): {}", errors.len(), errors.join("; "))))
    }
}

/// Writes a synthetic corpus to `dir`.
pub fn synth(n: usize, len: usize, seed: u64, pattern: Option<&str>, dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    if len < 100 {
        return Err(CliError::Usage(format!("--len must be at least 100, got {len}")));
    }
    if n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    let mut spec = SynthSpec::new(n, len, seed);
    if let Some(p) = pattern {
        let fams = p
            .split(',')
            .map(|s| s.trim().parse::<Family>())
            .collect::<Result<Vec<_>, _>>()?;
        spec = spec.with_pattern(fams);
    }
    let series = generate(&spec)?;
    std::fs::create_dir_all(dir)?;
    write_corpus(dir, &series)?;
    writeln!(out, "wrote {} series of length {len} to {}", series.len(), dir.display())?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SeriesEntry {
    pub id: String,
    pub length: usize,
    pub period: usize,
    pub source: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TaskEntry {
    pub series_id: String,
    pub model_id: String,
    pub records: usize,
    pub failures: usize,
    pub fallbacks: usize,
    pub undefined_mase: usize,
    pub elapsed_ns: u64,
    pub diagnostics: Vec<String>,
}

impl From<&TaskSummary> for TaskEntry {
    fn from(t: &TaskSummary) -> Self {
        Self {
            series_id: t.series_id.clone(),
            model_id: t.model_id.to_string(),
            records: t.records,
            failures: t.failures,
            fallbacks: t.fallbacks,
            undefined_mase: t.undefined_mase,
            elapsed_ns: t.elapsed_ns,
            diagnostics: t.diagnostics.clone(),
        }
    }
}

/// Machine-readable record of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub config: serde_json::Value,
    pub execution: String,
    pub models: Vec<String>,
    pub series: Vec<SeriesEntry>,
    pub corpus_warnings: Vec<String>,
    pub records: usize,
    pub failures: usize,
    pub fallbacks: usize,
    pub wall_time_s: f64,
    pub tasks: Vec<TaskEntry>,
}

pub fn read_manifest(dir: &Path) -> Option<Manifest> {
    let text = std::fs::read_to_string(dir.join(MANIFEST_FILE)).ok()?;
    serde_json::from_str(&text).ok()
}

/// Runs the configured experiment and writes results, curves and manifest.
pub fn run(cfg: &RunConfig, out: &mut dyn Write, progress: bool) -> Result<(), CliError> {
    cfg.validate()?;
    let models = cfg.model_ids()?;
    let settings = cfg.settings()?;
    let preq = PrequentialConfig {
        horizon: cfg.horizon,
        start: cfg.start,
        mode: cfg.mode()?,
    };
    let opts = CorpusOptions {
        cap: cfg.cap,
        ..CorpusOptions::default()
    };
    let corpus = load_corpus(&cfg.corpus_path, &opts).map_err(|e| data_err(&cfg.corpus_path, e))?;
    if corpus.series.is_empty() {
        return Err(CliError::Data("corpus contains no usable series".into()));
    }
    for w in &corpus.warnings {
        writeln!(out, "warning: {w}")?;
    }

    let workers = cfg.workers.max(1);
    let exec = if workers > 1 && cfg!(feature = "parallel") {
        Execution::Parallel
    } else {
        Execution::Sequential
    };
    let total = corpus.series.len() * models.len();
    let done = AtomicUsize::new(0);
    let report = |t: &TaskSummary| {
        let k = done.fetch_add(1, Ordering::Relaxed) + 1;
        if progress {
            eprintln!(
                "[{k}/{total}] {} {} {:.2}s ({} failed origins)",
                t.series_id,
                t.model_id,
                t.elapsed_ns as f64 / 1e9,
                t.failures
            );
        }
    };
    let clock = Instant::now();
    let experiment = with_workers(workers, || {
        run_experiment(&corpus.series, &models, &settings, &preq, cfg.seed, exec, Some(&report))
    })?;
    let wall = clock.elapsed().as_secs_f64();

    std::fs::create_dir_all(&cfg.output_dir)?;
    write_results(&cfg.output_dir.join(RESULTS_FILE), &experiment.records)?;
    let curves = build_learning_curves(&experiment.records, cfg.smooth_window)?;
    write_curves(&cfg.output_dir.join(CURVES_FILE), &curves)?;
    write_type_curves(&cfg.output_dir.join(TYPE_CURVES_FILE), &curves)?;

    let manifest = Manifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: serde_json::to_value(cfg)?,
        execution: format!("{exec:?} ({workers} workers)"),
        models: models.iter().map(|m| m.to_string()).collect(),
        series: corpus
            .series
            .iter()
            .map(|s| SeriesEntry {
                id: s.id().to_string(),
                length: s.len(),
                period: s.period(),
                source: s.source().to_string(),
            })
            .collect(),
        corpus_warnings: corpus.warnings.clone(),
        records: experiment.records.len(),
        failures: experiment.tasks.iter().map(|t| t.failures).sum(),
        fallbacks: experiment.tasks.iter().map(|t| t.fallbacks).sum(),
        wall_time_s: wall,
        tasks: experiment.tasks.iter().map(TaskEntry::from).collect(),
    };
    std::fs::write(
        cfg.output_dir.join(MANIFEST_FILE),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    writeln!(
        out,
        "{} records ({} series x {} models) in {wall:.1}s, {} failed origins; wrote {}",
        experiment.records.len(),
        corpus.series.len(),
        models.len(),
        manifest.failures,
        cfg.output_dir.display()
    )?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    CurveRank,
    CurveRankNoNaive2,
    CurveMase,
    CcBars,
}

impl PlotKind {
    pub const ALL: [PlotKind; 4] = [
        PlotKind::CurveRank,
        PlotKind::CurveRankNoNaive2,
        PlotKind::CurveMase,
        PlotKind::CcBars,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PlotKind::CurveRank => "curve_rank",
            PlotKind::CurveRankNoNaive2 => "curve_rank_no_naive2",
            PlotKind::CurveMase => "curve_mase",
            PlotKind::CcBars => "cc_bars",
        }
    }
}

impl std::str::FromStr for PlotKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        PlotKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown plot kind `{s}`")))
    }
}

fn load_results(dir: &Path) -> Result<(Vec<OriginRecord>, usize), CliError> {
    let path = dir.join(RESULTS_FILE);
    if !path.exists() {
        return Err(CliError::Data(format!("{} not found", path.display())));
    }
    let records = read_results(&path).map_err(|e| data_err(&path, e))?;
    if records.is_empty() {
        return Err(CliError::Data(format!("{} has no records", path.display())));
    }
    let window = read_manifest(dir)
        .and_then(|m| m.config.get("smooth_window").and_then(|v| v.as_u64()))
        .map_or(50, |w| w as usize);
    Ok((records, window))
}

/// Renders one figure per horizon present in the results; returns the paths.
pub fn plot(kind: PlotKind, input: &Path, output: &Path, out: &mut dyn Write) -> Result<Vec<PathBuf>, CliError> {
    let (records, window) = load_results(input)?;
    std::fs::create_dir_all(output)?;
    let groups = by_horizon(&records);
    let mut written = Vec::new();
    for (h, recs) in &groups {
        let name = if groups.len() == 1 {
            format!("{}.svg", kind.as_str())
        } else {
            format!("{}_h{h}.svg", kind.as_str())
        };
        let svg = match kind {
            PlotKind::CurveRank => {
                let curves = build_learning_curves(recs, window)?;
                curve_svg(&curves, CurveMetric::AvgRank, &format!("Learning curve: average rank (h={h})"))
            }
            PlotKind::CurveRankNoNaive2 => {
                let kept: Vec<OriginRecord> = recs.iter().filter(|r| r.model_id != ModelId::Naive2).cloned().collect();
                if kept.is_empty() {
                    return Err(CliError::Data("no models left after excluding Naive2".into()));
                }
                let curves = build_learning_curves(&kept, window)?;
                curve_svg(
                    &curves,
                    CurveMetric::AvgRank,
                    &format!("Learning curve: average rank, Naive2 excluded (h={h})"),
                )
            }
            PlotKind::CurveMase => {
                let curves = build_learning_curves(recs, window)?;
                curve_svg(&curves, CurveMetric::Mase, &format!("Learning curve: average MASE (h={h})"))
            }
            PlotKind::CcBars => {
                let rows = cc_table(recs).map_err(|e| CliError::Data(e.to_string()))?;
                cc_bars_svg(&rows, &format!("Computational cost relative to Naive2 (h={h}, log scale)"))
            }
        };
        let path = output.join(name);
        std::fs::write(&path, svg)?;
        writeln!(out, "wrote {}", path.display())?;
        written.push(path);
    }
    Ok(written)
}

pub fn report(input: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let (records, window) = load_results(input)?;
    out.write_all(render(&records, window)?.as_bytes())?;
    Ok(())
}
