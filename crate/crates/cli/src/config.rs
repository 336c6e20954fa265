//! Run configuration: a flat `key = value` file, overridable from the
//! command line and the `FC_WORKERS` environment variable.

use std::path::{Path, PathBuf};

use prequel_core::eval::PreprocessMode;
use prequel_core::ml::{GridSpec, Kernel};
use prequel_core::models::{ModelId, ModelSettings};
use serde::Serialize;

use crate::error::CliError;

pub const WORKERS_ENV: &str = "FC_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub corpus_path: PathBuf,
    pub models: Vec<String>,
    pub horizon: usize,
    pub start: usize,
    pub cap: usize,
    pub embed_p: usize,
    pub smooth_window: usize,
    pub tune_every: usize,
    pub seed: u64,
    pub preprocess_mode: String,
    pub workers: usize,
    pub output_dir: PathBuf,
    pub glm_alpha: Vec<f64>,
    pub glm_path_len: usize,
    pub rf_trees: Vec<usize>,
    pub gp_kernels: Vec<String>,
    pub gp_tolerances: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let grid = GridSpec::default();
        Self {
            corpus_path: PathBuf::from("corpus"),
            models: ModelId::BENCHMARK.iter().map(|m| m.to_string()).collect(),
            horizon: 1,
            start: 18,
            cap: 1000,
            embed_p: 10,
            smooth_window: 50,
            tune_every: 50,
            seed: 1,
            preprocess_mode: PreprocessMode::Global.to_string(),
            workers: 1,
            output_dir: PathBuf::from("results"),
            glm_alpha: grid.glm_alpha,
            glm_path_len: grid.glm_path_len,
            rf_trees: grid.rf_trees,
            gp_kernels: grid.gp_kernels.iter().map(|k| k.to_string()).collect(),
            gp_tolerances: grid.gp_tolerances,
        }
    }
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| CliError::Usage(format!("`{key}`: cannot parse `{s}`")))
        })
        .collect()
}

fn scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| CliError::Usage(format!("`{key}`: cannot parse `{value}`")))
}

impl RunConfig {
    /// Parses a config file body. Blank lines and `#` comments are ignored;
    /// keys not set keep their defaults.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", n + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| CliError::Usage(format!("config line {}: {}", n + 1, e.message())))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "corpus_path" => self.corpus_path = PathBuf::from(value),
            "models" => self.models = list(key, value)?,
            "horizon" => self.horizon = scalar(key, value)?,
            "start" => self.start = scalar(key, value)?,
            "cap" => self.cap = scalar(key, value)?,
            "embed_p" => self.embed_p = scalar(key, value)?,
            "smooth_window" => self.smooth_window = scalar(key, value)?,
            "tune_every" => self.tune_every = scalar(key, value)?,
            "seed" => self.seed = scalar(key, value)?,
            "preprocess_mode" => self.preprocess_mode = value.to_string(),
            "workers" => self.workers = scalar(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "glm_alpha" => self.glm_alpha = list(key, value)?,
            "glm_path_len" => self.glm_path_len = scalar(key, value)?,
            "rf_trees" => self.rf_trees = list(key, value)?,
            "gp_kernels" => self.gp_kernels = list(key, value)?,
            "gp_tolerances" => self.gp_tolerances = list(key, value)?,
            other => return Err(CliError::Usage(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Applies `FC_WORKERS` when set.
    pub fn apply_env(&mut self) -> Result<(), CliError> {
        if let Ok(v) = std::env::var(WORKERS_ENV) {
            self.workers = scalar(WORKERS_ENV, &v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if self.horizon != 1 && self.horizon != 18 {
            return bad(format!("horizon must be 1 or 18, got {}", self.horizon));
        }
        if self.start == 0 || self.cap == 0 || self.embed_p == 0 || self.smooth_window == 0 || self.tune_every == 0 {
            return bad("start, cap, embed_p, smooth_window and tune_every must be positive".into());
        }
        if self.models.is_empty() {
            return bad("no models configured".into());
        }
        self.model_ids()?;
        self.mode()?;
        self.grid()?;
        Ok(())
    }

    pub fn model_ids(&self) -> Result<Vec<ModelId>, CliError> {
        let mut ids = Vec::new();
        for m in &self.models {
            let id: ModelId = m.parse().map_err(|_| CliError::Usage(format!("unknown model id `{m}`")))?;
            if ids.contains(&id) {
                return Err(CliError::Usage(format!("model `{m}` listed twice")));
            }
            ids.push(id);
        }
        Ok(ids)
    }

    pub fn mode(&self) -> Result<PreprocessMode, CliError> {
        self.preprocess_mode
            .parse()
            .map_err(|e: prequel_core::ForecastError| CliError::Usage(e.to_string()))
    }

    pub fn grid(&self) -> Result<GridSpec, CliError> {
        let kernels = self
            .gp_kernels
            .iter()
            .map(|k| k.parse::<Kernel>().map_err(|e| CliError::Usage(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if self.glm_alpha.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(CliError::Usage("glm_alpha values must lie in [0, 1]".into()));
        }
        if self.gp_tolerances.iter().any(|t| !(*t >= 0.0)) {
            return Err(CliError::Usage("gp_tolerances must be non-negative".into()));
        }
        if self.glm_path_len < 2 {
            return Err(CliError::Usage("glm_path_len must be at least 2".into()));
        }
        Ok(GridSpec {
            glm_alpha: self.glm_alpha.clone(),
            glm_path_len: self.glm_path_len,
            rf_trees: self.rf_trees.clone(),
            gp_kernels: kernels,
            gp_tolerances: self.gp_tolerances.clone(),
        })
    }

    pub fn settings(&self) -> Result<ModelSettings, CliError> {
        Ok(ModelSettings {
            embed_p: self.embed_p,
            tune_every: self.tune_every,
            grid: self.grid()?,
            ..ModelSettings::default()
        })
    }
}
