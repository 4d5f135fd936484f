//! Convergence studies against the manufactured solution.

use serde::{Deserialize, Serialize};

use crate::domain::{build_grid, Grid, Params, State};
use crate::error::{Error, Result};
use crate::model::Manufactured;
use crate::stepper::step_imex;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MmsSettings {
    pub params: Params,
    pub length: f64,
    pub amplitude: f64,
    pub t_end: f64,
    /// Spatial study uses `dt = spatial_dt_factor * h^2`.
    pub spatial_dt_factor: f64,
    /// Largest step of the temporal study; each level halves it.
    pub temporal_dt0: f64,
}

impl Default for MmsSettings {
    fn default() -> Self {
        MmsSettings {
            params: Params::default(),
            length: 1.0,
            amplitude: Manufactured::DEFAULT_AMPLITUDE,
            t_end: 0.5,
            spatial_dt_factor: 1.0,
            temporal_dt0: 4e-3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MmsLevel {
    pub cells: usize,
    pub dt: f64,
    pub steps: usize,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MmsStudy {
    pub levels: Vec<MmsLevel>,
    /// `log2(e_k / e_{k+1})` for consecutive levels.
    pub orders: Vec<f64>,
}

impl MmsStudy {
    fn from_levels(levels: Vec<MmsLevel>) -> Self {
        let orders = levels
            .windows(2)
            .map(|w| (w[0].error / w[1].error).log2())
            .collect();
        MmsStudy { levels, orders }
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.levels
            .windows(2)
            .map(|w| w[0].error / w[1].error)
            .collect()
    }

    pub fn is_exact(&self) -> bool {
        self.levels.iter().all(|l| l.error == 0.0)
    }

    pub fn orders_within(&self, lo: f64, hi: f64) -> bool {
        !self.orders.is_empty() && self.orders.iter().all(|&p| p >= lo && p <= hi)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MmsReport {
    pub settings: MmsSettings,
    pub spatial: MmsStudy,
    pub temporal: MmsStudy,
}

/// Discrete L2 distance of all three fields from the exact solution.
pub fn mms_error(s: &State, grid: &Grid, m: &Manufactured) -> f64 {
    let exact = m.state(grid, s.t);
    let sq = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    (grid.h * (sq(&s.v, &exact.v) + sq(&s.u, &exact.u) + sq(&s.theta, &exact.theta))).sqrt()
}

/// Integrates the forced problem on `cells` cells with `steps` equal steps.
pub fn mms_solve(settings: &MmsSettings, cells: usize, steps: usize) -> Result<MmsLevel> {
    let grid = build_grid(settings.length, cells)?;
    let m = Manufactured {
        amplitude: settings.amplitude,
        length: settings.length,
    };
    let dt = settings.t_end / steps as f64;
    let mut s = m.state(&grid, 0.0);
    for k in 0..steps {
        s = step_imex(&s, dt, &grid, &settings.params, Some(&m))?;
        s.t = (k + 1) as f64 * dt;
    }
    Ok(MmsLevel {
        cells,
        dt,
        steps,
        error: mms_error(&s, &grid, &m),
    })
}

pub fn mms_convergence(levels: usize, base_cells: usize) -> Result<MmsReport> {
    mms_convergence_with(levels, base_cells, &MmsSettings::default())
}

/// Spatial study on `base * 2^k` cells with `dt ~ h^2`, then a temporal study
/// at `base * 2^levels` cells halving `dt` from `temporal_dt0`.
pub fn mms_convergence_with(
    levels: usize,
    base_cells: usize,
    settings: &MmsSettings,
) -> Result<MmsReport> {
    if levels < 3 {
        return Err(Error::Config(format!(
            "MMS study needs at least 3 levels, got {levels}"
        )));
    }
    let spatial = (0..levels)
        .map(|k| {
            let cells = base_cells << k;
            let h = settings.length / cells as f64;
            let steps = (settings.t_end / (settings.spatial_dt_factor * h * h)).ceil() as usize;
            mms_solve(settings, cells, steps.max(1))
        })
        .collect::<Result<Vec<_>>>()?;
    let fine = base_cells << levels;
    let temporal = (0..levels)
        .map(|k| {
            let dt = settings.temporal_dt0 / (1u64 << k) as f64;
            let steps = (settings.t_end / dt).round() as usize;
            mms_solve(settings, fine, steps.max(1))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MmsReport {
        settings: *settings,
        spatial: MmsStudy::from_levels(spatial),
        temporal: MmsStudy::from_levels(temporal),
    })
}
