use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use prequel_cli::commands::{self, PlotKind};
use prequel_cli::{CliError, RunConfig};

#[derive(Parser)]
#[command(name = "prequel", version, about = "Prequential learning-curve benchmark for univariate forecasters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a corpus for schema violations.
    Validate { corpus: PathBuf },
    /// Generate a synthetic corpus.
    Synth {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        len: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Comma-separated family cycle (ar2, seasonal, tar, rw).
        #[arg(long)]
        pattern: Option<String>,
    },
    /// Run the prequential experiment.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Comma-separated model ids.
        #[arg(long)]
        models: Option<String>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        start: Option<usize>,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long)]
        embed_p: Option<usize>,
        #[arg(long)]
        smooth_window: Option<usize>,
        #[arg(long)]
        tune_every: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        preprocess_mode: Option<String>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Suppress per-task progress on stderr.
        #[arg(long)]
        quiet: bool,
    },
    /// Render SVG figures from a results directory.
    Plot {
        #[arg(long)]
        kind: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the average-rank, cost and diagnostics tables.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Validate { corpus } => commands::validate(&corpus, out),
        Command::Synth {
            n,
            len,
            seed,
            out: dir,
            pattern,
        } => commands::synth(n, len, seed, pattern.as_deref(), &dir, out),
        Command::Run {
            config,
            corpus,
            models,
            horizon,
            start,
            cap,
            embed_p,
            smooth_window,
            tune_every,
            seed,
            preprocess_mode,
            workers,
            out: dir,
            quiet,
        } => {
            let mut cfg = match &config {
                Some(path) => RunConfig::load(path)?,
                None => RunConfig::default(),
            };
            cfg.apply_env()?;
            let overrides: [(&str, Option<String>); 12] = [
                ("corpus_path", corpus.map(|p| p.display().to_string())),
                ("models", models),
                ("horizon", horizon.map(|v| v.to_string())),
                ("start", start.map(|v| v.to_string())),
                ("cap", cap.map(|v| v.to_string())),
                ("embed_p", embed_p.map(|v| v.to_string())),
                ("smooth_window", smooth_window.map(|v| v.to_string())),
                ("tune_every", tune_every.map(|v| v.to_string())),
                ("seed", seed.map(|v| v.to_string())),
                ("preprocess_mode", preprocess_mode),
                ("workers", workers.map(|v| v.to_string())),
                ("output_dir", dir.map(|p| p.display().to_string())),
            ];
            for (key, value) in overrides {
                if let Some(v) = value {
                    cfg.set(key, &v)?;
                }
            }
            commands::run(&cfg, out, !quiet)
        }
        Command::Plot { kind, input, out: dir } => {
            let kind: PlotKind = kind.parse()?;
            commands::plot(kind, &input, &dir, out).map(|_| ())
        }
        Command::Report { input } => commands::report(&input, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli.command, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
