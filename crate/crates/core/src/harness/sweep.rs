use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::run::{run_simulation_with, RunReport, Thresholds};
use crate::error::{Error, Result};

pub const DEFAULT_BETAS: [f64; 3] = [0.5, 1.0, 2.5];

/// Environment variable capping the number of concurrent sweep runs.
pub const THREADS_ENV: &str = "NSLAG_THREADS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub passed: bool,
    pub runs: Vec<SweepEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub beta: f64,
    pub report: RunReport,
}

/// `dir/stem_<tag>.ext` for an output path.
pub fn keyed_path(path: &Path, tag: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_{tag}.{}", ext.to_string_lossy()),
        None => format!("{stem}_{tag}"),
    };
    path.with_file_name(name)
}

/// Copy of `base` with conductivity exponent `beta` and outputs keyed by it.
pub fn config_for_beta(base: &RunConfig, beta: f64) -> RunConfig {
    let mut cfg = base.clone();
    cfg.params.beta = beta;
    let tag = format!("beta{beta}");
    let out = &mut cfg.outputs;
    out.series_path = out.series_path.as_deref().map(|p| keyed_path(p, &tag));
    out.report_path = out.report_path.as_deref().map(|p| keyed_path(p, &tag));
    out.snapshot_prefix = PathBuf::from(format!("{}_{tag}", out.snapshot_prefix.display()));
    cfg
}

pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs `configs` concurrently; results keep the input order.
pub fn run_many(configs: &[RunConfig], thresholds: &Thresholds) -> Result<Vec<RunReport>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        configs
            .par_iter()
            .map(|c| run_simulation_with(c, thresholds))
            .collect()
    })
}

pub fn sweep(base: &RunConfig, betas: &[f64], thresholds: &Thresholds) -> Result<SweepReport> {
    if betas.is_empty() {
        return Err(Error::Config("sweep needs at least one beta".into()));
    }
    let configs: Vec<RunConfig> = betas.iter().map(|&b| config_for_beta(base, b)).collect();
    for c in &configs {
        c.validate()?;
    }
    let reports = run_many(&configs, thresholds)?;
    let runs: Vec<SweepEntry> = betas
        .iter()
        .zip(reports)
        .map(|(&beta, report)| SweepEntry { beta, report })
        .collect();
    Ok(SweepReport {
        passed: runs.iter().all(|r| r.report.passed),
        runs,
    })
}
