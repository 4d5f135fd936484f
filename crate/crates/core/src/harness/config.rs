//! Flat `key = value` run configuration.
//!
//! ```text
//! # comments start with '#'
//! physics.beta = 1.0
//! grid.cells   = 2000
//! ```
//!
//! Every key is optional; missing keys take the defaults of
//! [`RunConfig::default`]. Unknown or repeated keys are errors.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::default_interval;
use crate::domain::{build_grid, Grid, IcSpec, Params};
use crate::error::{Error, Result};
use crate::stepper::StepControl;

pub const KEYS: &[&str] = &[
    "physics.beta",
    "physics.mu",
    "physics.kappa",
    "physics.R",
    "physics.cv",
    "grid.length",
    "grid.cells",
    "ic.kind",
    "ic.amp_v",
    "ic.amp_u",
    "ic.amp_theta",
    "ic.center",
    "ic.width",
    "ic.floor",
    "ic.wavenumber",
    "run.t_final",
    "run.sample_dt",
    "ctl.cfl_hyp",
    "ctl.cfl_parab",
    "ctl.dt_min",
    "ctl.positivity_floor",
    "ctl.max_retries",
    "probe.interval",
    "out.series",
    "out.report",
    "out.snapshots",
    "out.snapshot_prefix",
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub length: f64,
    pub n_cells: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    /// CSV time series; `None` disables it.
    pub series_path: Option<PathBuf>,
    /// JSON verdict report; `None` disables it.
    pub report_path: Option<PathBuf>,
    pub snapshot_times: Vec<f64>,
    pub snapshot_prefix: PathBuf,
}

impl Outputs {
    pub fn none() -> Self {
        Outputs {
            series_path: None,
            report_path: None,
            snapshot_times: Vec::new(),
            snapshot_prefix: PathBuf::from("snapshot"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub params: Params,
    pub grid: GridSpec,
    pub ic: IcSpec,
    pub t_final: f64,
    pub sample_dt: f64,
    pub ctl: StepControl,
    /// Base index of the representation probe; `None` means `floor(L / 4)`.
    pub probe_interval: Option<usize>,
    pub outputs: Outputs,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: Params::default(),
            grid: GridSpec {
                length: 50.0,
                n_cells: 2000,
            },
            ic: IcSpec::default(),
            t_final: 100.0,
            sample_dt: 0.25,
            ctl: StepControl::default(),
            probe_interval: None,
            outputs: Outputs {
                series_path: Some(PathBuf::from("series.csv")),
                report_path: Some(PathBuf::from("report.json")),
                snapshot_times: Vec::new(),
                snapshot_prefix: PathBuf::from("snapshot"),
            },
        }
    }
}

impl RunConfig {
    pub fn build_grid(&self) -> Result<Grid> {
        build_grid(self.grid.length, self.grid.n_cells)
    }

    pub fn probe_interval(&self, grid: &Grid) -> usize {
        self.probe_interval
            .unwrap_or_else(|| default_interval(grid))
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let grid = self.build_grid()?;
        if grid.cells_per_unit().is_none() {
            return Err(Error::Config(format!(
                "grid.cells: cell width {} = grid.length / grid.cells must divide 1",
                grid.h
            )));
        }
        if grid.length < 4.0 {
            return Err(Error::Config(format!(
                "grid.length must be at least 4, got {}",
                grid.length
            )));
        }
        self.ic.validate(&grid)?;
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::Config(format!(
                "run.t_final must be positive, got {}",
                self.t_final
            )));
        }
        if !(self.sample_dt.is_finite() && self.sample_dt > 0.0) {
            return Err(Error::Config(format!(
                "run.sample_dt must be positive, got {}",
                self.sample_dt
            )));
        }
        self.ctl.validate().map_err(Error::Config)?;
        let i = self.probe_interval(&grid);
        if i < 1 || (i + 2) as f64 > grid.length + 1e-9 {
            return Err(Error::Config(format!(
                "probe.interval = {i} must keep [i, i+1] one unit from both ends"
            )));
        }
        if let Some(t) = self
            .outputs
            .snapshot_times
            .iter()
            .find(|&&t| !(t >= 0.0 && t <= self.t_final))
        {
            return Err(Error::Config(format!(
                "out.snapshots: time {t} outside [0, run.t_final]"
            )));
        }
        Ok(())
    }

    /// Sample times `0, dt, 2 dt, ...` ending exactly at `t_final`.
    pub fn sample_times(&self) -> Vec<f64> {
        let n = (self.t_final / self.sample_dt).floor() as usize;
        let mut ts: Vec<f64> = (0..=n).map(|k| k as f64 * self.sample_dt).collect();
        ts.retain(|&t| t < self.t_final * (1.0 - 1e-12));
        ts.push(self.t_final);
        ts
    }
}

fn parse_f64(key: &str, val: &str) -> std::result::Result<f64, String> {
    val.parse::<f64>()
        .map_err(|_| format!("{key}: expected a number, got '{val}'"))
}

fn parse_path(val: &str) -> Option<PathBuf> {
    if val.is_empty() || val == "none" {
        None
    } else {
        Some(PathBuf::from(val))
    }
}

fn apply(cfg: &mut RunConfig, key: &str, val: &str) -> std::result::Result<(), String> {
    let num = || parse_f64(key, val);
    match key {
        "physics.beta" => cfg.params.beta = num()?,
        "physics.mu" => cfg.params.mu = num()?,
        "physics.kappa" => cfg.params.kappa = num()?,
        "physics.R" => {
            cfg.params.r = num()?;
            cfg.params.p_outer = cfg.params.r;
        }
        "physics.cv" => cfg.params.cv = num()?,
        "grid.length" => cfg.grid.length = num()?,
        "grid.cells" => {
            cfg.grid.n_cells = val
                .parse::<usize>()
                .map_err(|_| format!("{key}: expected a positive integer, got '{val}'"))?
        }
        "ic.kind" => cfg.ic.kind = val.parse().map_err(|e: Error| format!("{key}: {e}"))?,
        "ic.amp_v" => cfg.ic.amp_v = num()?,
        "ic.amp_u" => cfg.ic.amp_u = num()?,
        "ic.amp_theta" => cfg.ic.amp_theta = num()?,
        "ic.center" => cfg.ic.center = num()?,
        "ic.width" => cfg.ic.width = num()?,
        "ic.floor" => cfg.ic.floor = num()?,
        "ic.wavenumber" => cfg.ic.wavenumber = num()?,
        "run.t_final" => cfg.t_final = num()?,
        "run.sample_dt" => cfg.sample_dt = num()?,
        "ctl.cfl_hyp" => cfg.ctl.cfl_hyp = num()?,
        "ctl.cfl_parab" => cfg.ctl.cfl_parab = num()?,
        "ctl.dt_min" => cfg.ctl.dt_min = num()?,
        "ctl.positivity_floor" => cfg.ctl.positivity_floor = num()?,
        "ctl.max_retries" => {
            cfg.ctl.max_retries = val
                .parse()
                .map_err(|_| format!("{key}: expected a positive integer, got '{val}'"))?
        }
        "probe.interval" => {
            cfg.probe_interval = if val == "auto" {
                None
            } else {
                Some(val.parse().map_err(|_| {
                    format!("{key}: expected a non-negative integer or 'auto', got '{val}'")
                })?)
            }
        }
        "out.series" => cfg.outputs.series_path = parse_path(val),
        "out.report" => cfg.outputs.report_path = parse_path(val),
        "out.snapshots" => {
            cfg.outputs.snapshot_times = val
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| parse_f64(key, s))
                .collect::<std::result::Result<_, _>>()?
        }
        "out.snapshot_prefix" => cfg.outputs.snapshot_prefix = PathBuf::from(val),
        other => return Err(format!("unknown key '{other}'")),
    }
    Ok(())
}

/// Parses configuration text; `origin` only labels error messages.
pub fn parse_config(text: &str, origin: &Path) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: origin.to_path_buf(),
            line: idx + 1,
            msg,
        };
        let (key, val) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
        let (key, val) = (key.trim(), val.trim());
        if !seen.insert(key.to_string()) && KEYS.contains(&key) {
            return Err(err(format!("duplicate key '{key}'")));
        }
        apply(&mut cfg, key, val).map_err(err)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}

fn path_value(p: &Option<PathBuf>) -> String {
    p.as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_else(|| "none".into())
}

/// Renders every key; `parse_config(write_config(c))` reproduces `c`.
pub fn write_config(cfg: &RunConfig) -> String {
    let mut s = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    put("physics.beta", format!("{:?}", cfg.params.beta));
    put("physics.mu", format!("{:?}", cfg.params.mu));
    put("physics.kappa", format!("{:?}", cfg.params.kappa));
    put("physics.R", format!("{:?}", cfg.params.r));
    put("physics.cv", format!("{:?}", cfg.params.cv));
    put("grid.length", format!("{:?}", cfg.grid.length));
    put("grid.cells", cfg.grid.n_cells.to_string());
    put("ic.kind", cfg.ic.kind.to_string());
    put("ic.amp_v", format!("{:?}", cfg.ic.amp_v));
    put("ic.amp_u", format!("{:?}", cfg.ic.amp_u));
    put("ic.amp_theta", format!("{:?}", cfg.ic.amp_theta));
    put("ic.center", format!("{:?}", cfg.ic.center));
    put("ic.width", format!("{:?}", cfg.ic.width));
    put("ic.floor", format!("{:?}", cfg.ic.floor));
    put("ic.wavenumber", format!("{:?}", cfg.ic.wavenumber));
    put("run.t_final", format!("{:?}", cfg.t_final));
    put("run.sample_dt", format!("{:?}", cfg.sample_dt));
    put("ctl.cfl_hyp", format!("{:?}", cfg.ctl.cfl_hyp));
    put("ctl.cfl_parab", format!("{:?}", cfg.ctl.cfl_parab));
    put("ctl.dt_min", format!("{:?}", cfg.ctl.dt_min));
    put(
        "ctl.positivity_floor",
        format!("{:?}", cfg.ctl.positivity_floor),
    );
    put("ctl.max_retries", cfg.ctl.max_retries.to_string());
    put(
        "probe.interval",
        cfg.probe_interval
            .map(|i| i.to_string())
            .unwrap_or_else(|| "auto".into()),
    );
    put("out.series", path_value(&cfg.outputs.series_path));
    put("out.report", path_value(&cfg.outputs.report_path));
    put(
        "out.snapshots",
        cfg.outputs
            .snapshot_times
            .iter()
            .map(|t| format!("{t:?}"))
            .collect::<Vec<_>>()
            .join(","),
    );
    put(
        "out.snapshot_prefix",
        cfg.outputs.snapshot_prefix.display().to_string(),
    );
    s
}
