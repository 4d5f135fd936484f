//! Local representation of the specific volume on a unit mass interval
//! `[i, i + 1]`:
//!
//! ```text
//! v(x, t) = D(x, t) Y(t) (1 + (R / mu) I(x, t))
//! D(x, t) = v0(x) exp( (1/mu) * integral_i^x (u - u0) dy )
//! Y(t)    = exp( (1/mu) * integral_0^t sigma(i, s) ds )
//! I(x, t) = integral_0^t theta(x, s) / (D(x, s) Y(s)) ds
//! ```
//!
//! The probe tracks `ln Y` and the scaled integral `J = Y I`, which stays
//! bounded while `Y` decays.

use serde::{Deserialize, Serialize};

use crate::domain::{Grid, Params, State};
use crate::error::{Error, Result};

/// Number of probe points inside the interval.
pub const PROBE_POINTS: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReprProbe {
    pub interval: usize,
    /// Face index at mass coordinate `interval`.
    face_base: usize,
    /// Cell index of each probe point.
    pub cells: Vec<usize>,
    pub xs: Vec<f64>,
    v0: Vec<f64>,
    /// Initial face velocities from `face_base` up to the last probe cell.
    u0: Vec<f64>,
    pub d: Vec<f64>,
    pub log_y: f64,
    scaled_integral: Vec<f64>,
    pub log_y_series: Vec<(f64, f64)>,
}

/// Default probe interval `floor(L / 4)`.
pub fn default_interval(grid: &Grid) -> usize {
    (grid.length / 4.0).floor() as usize
}

impl ReprProbe {
    pub fn new(s0: &State, grid: &Grid, params: &Params, interval: usize) -> Result<Self> {
        let per = grid.cells_per_unit().ok_or_else(|| {
            Error::Config(format!(
                "cell width {} does not divide the unit interval",
                grid.h
            ))
        })?;
        if interval < 1 || (interval + 2) as f64 > grid.length + 1e-9 {
            return Err(Error::Config(format!(
                "probe interval [{interval}, {}] must stay one unit away from both ends of [0, {}]",
                interval + 1,
                grid.length
            )));
        }
        let face_base = interval * per;
        let cells: Vec<usize> = (0..PROBE_POINTS)
            .map(|k| face_base + ((k as f64 + 0.5) * per as f64 / PROBE_POINTS as f64) as usize)
            .collect();
        let last = *cells.last().expect("probe has points");
        let mut p = ReprProbe {
            interval,
            face_base,
            xs: cells.iter().map(|&c| grid.cell_x(c)).collect(),
            v0: cells.iter().map(|&c| s0.v[c]).collect(),
            u0: s0.u[face_base..=last + 1].to_vec(),
            d: Vec::new(),
            log_y: 0.0,
            scaled_integral: vec![0.0; cells.len()],
            log_y_series: vec![(s0.t, 0.0)],
            cells,
        };
        p.d = p.spatial_factor(s0, grid, params);
        Ok(p)
    }

    pub fn y(&self) -> f64 {
        self.log_y.exp()
    }

    /// `I(x, t)` at each probe point.
    pub fn integral(&self) -> Vec<f64> {
        let inv_y = (-self.log_y).exp();
        self.scaled_integral.iter().map(|j| j * inv_y).collect()
    }

    /// Total stress at the face `x = interval`.
    fn wall_stress(&self, s: &State, grid: &Grid, params: &Params) -> f64 {
        let cell = |j: usize| {
            (params.mu * (s.u[j + 1] - s.u[j]) / grid.h - params.r * s.theta[j]) / s.v[j]
        };
        0.5 * (cell(self.face_base - 1) + cell(self.face_base))
    }

    /// `D(x, t)` at each probe point, by the trapezoid rule on faces.
    pub fn spatial_factor(&self, s: &State, grid: &Grid, params: &Params) -> Vec<f64> {
        let h = grid.h;
        let w = |k: usize| s.u[k] - self.u0[k - self.face_base];
        self.cells
            .iter()
            .zip(&self.v0)
            .map(|(&c, &v0)| {
                let mut acc = 0.0;
                for k in self.face_base..c {
                    acc += 0.5 * h * (w(k) + w(k + 1));
                }
                let mid = 0.5 * (w(c) + w(c + 1));
                acc += 0.25 * h * (w(c) + mid);
                v0 * (acc / params.mu).exp()
            })
            .collect()
    }

    /// Advances the accumulators from `s_prev` to `s` over `dt`.
    ///
    /// The wall stress is taken at the midpoint in time; `theta / D` by the
    /// midpoint rule while `1 / Y` is integrated exactly across the step.
    pub fn update(&mut self, s: &State, s_prev: &State, dt: f64, grid: &Grid, params: &Params) {
        if dt == 0.0 {
            return;
        }
        let sigma =
            0.5 * (self.wall_stress(s_prev, grid, params) + self.wall_stress(s, grid, params));
        let delta = dt * sigma / params.mu;
        let grow = delta.exp();
        let weight = dt * expm1_over(delta);

        let d_prev = self.spatial_factor(s_prev, grid, params);
        let d_new = self.spatial_factor(s, grid, params);
        for (k, &c) in self.cells.iter().enumerate() {
            let g = 0.5 * (s_prev.theta[c] / d_prev[k] + s.theta[c] / d_new[k]);
            self.scaled_integral[k] = grow * self.scaled_integral[k] + g * weight;
        }
        self.d = d_new;
        self.log_y += delta;
        self.log_y_series.push((s.t, self.log_y));
    }

    pub fn reconstruct_v(&self, s: &State, params: &Params) -> Reconstruction {
        let y = self.y();
        let ratio = params.r / params.mu;
        let v_rec: Vec<f64> = self
            .d
            .iter()
            .zip(&self.scaled_integral)
            .map(|(&d, &j)| d * (y + ratio * j))
            .collect();
        let v_actual: Vec<f64> = self.cells.iter().map(|&c| s.v[c]).collect();
        let max_rel_err = v_rec
            .iter()
            .zip(&v_actual)
            .map(|(r, a)| ((r - a) / a).abs())
            .fold(0.0, f64::max);
        Reconstruction {
            v_rec,
            v_actual,
            max_rel_err,
        }
    }
}

/// `(e^x - 1) / x`, continuous at 0.
fn expm1_over(x: f64) -> f64 {
    if x.abs() < 1e-10 {
        1.0 + 0.5 * x
    } else {
        x.exp_m1() / x
    }
}

pub fn update_repr_probe(
    p: &ReprProbe,
    s: &State,
    s_prev: &State,
    dt: f64,
    grid: &Grid,
    params: &Params,
) -> ReprProbe {
    let mut next = p.clone();
    next.update(s, s_prev, dt, grid, params);
    next
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub v_rec: Vec<f64>,
    pub v_actual: Vec<f64>,
    pub max_rel_err: f64,
}
