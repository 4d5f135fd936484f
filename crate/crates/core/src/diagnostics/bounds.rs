use serde::{Deserialize, Serialize};

use crate::domain::{Grid, State};

/// Threshold of the positive-part functional `max_x (theta - 3/2)_+^2`.
pub const POSITIVE_PART_THRESHOLD: f64 = 1.5;

/// Share of the domain (from the right end) watched for far-field contamination.
pub const FAR_FIELD_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundsRecord {
    pub t: f64,
    pub vmin: f64,
    pub vmax: f64,
    pub thmin: f64,
    pub thmax: f64,
    pub n2_vm1: f64,
    pub n2_u: f64,
    pub n2_thm1: f64,
    pub ninf_vm1: f64,
    pub ninf_u: f64,
    pub ninf_thm1: f64,
    pub g2_vx: f64,
    pub g2_ux: f64,
    pub g2_thx: f64,
    pub pospart: f64,
    pub cum_ux2: f64,
    pub cum_pospart: f64,
    pub farfield_dev: f64,
}

impl BoundsRecord {
    /// `||(v_x, u_x, theta_x)||_2`.
    pub fn gradient_norm(&self) -> f64 {
        (self.g2_vx * self.g2_vx + self.g2_ux * self.g2_ux + self.g2_thx * self.g2_thx).sqrt()
    }
}

pub fn sample_bounds(s: &State, grid: &Grid, prev: Option<&BoundsRecord>) -> BoundsRecord {
    sample_bounds_with_threshold(s, grid, prev, POSITIVE_PART_THRESHOLD)
}

pub fn sample_bounds_with_threshold(
    s: &State,
    grid: &Grid,
    prev: Option<&BoundsRecord>,
    threshold: f64,
) -> BoundsRecord {
    let n = grid.n_cells;
    let h = grid.h;
    let mut r = BoundsRecord {
        t: s.t,
        vmin: f64::INFINITY,
        vmax: f64::NEG_INFINITY,
        thmin: f64::INFINITY,
        thmax: f64::NEG_INFINITY,
        ..BoundsRecord::default()
    };

    let (mut sv, mut st, mut sux) = (0.0, 0.0, 0.0);
    for j in 0..n {
        let (v, th) = (s.v[j], s.theta[j]);
        r.vmin = r.vmin.min(v);
        r.vmax = r.vmax.max(v);
        r.thmin = r.thmin.min(th);
        r.thmax = r.thmax.max(th);
        sv += (v - 1.0) * (v - 1.0);
        st += (th - 1.0) * (th - 1.0);
        r.ninf_vm1 = r.ninf_vm1.max((v - 1.0).abs());
        r.ninf_thm1 = r.ninf_thm1.max((th - 1.0).abs());
        let ux = (s.u[j + 1] - s.u[j]) / h;
        sux += ux * ux;
        let pp = (th - threshold).max(0.0);
        r.pospart = r.pospart.max(pp * pp);
    }
    r.n2_vm1 = (h * sv).sqrt();
    r.n2_thm1 = (h * st).sqrt();
    r.g2_ux = (h * sux).sqrt();

    let mut su = 0.5 * (s.u[0] * s.u[0] + s.u[n] * s.u[n]);
    for i in 1..n {
        su += s.u[i] * s.u[i];
    }
    r.n2_u = (h * su).sqrt();
    r.ninf_u = s.u.iter().fold(0.0, |m, x| m.max(x.abs()));

    let (mut svx, mut stx) = (0.0, 0.0);
    for i in 1..n {
        let dv = (s.v[i] - s.v[i - 1]) / h;
        let dt = (s.theta[i] - s.theta[i - 1]) / h;
        svx += dv * dv;
        stx += dt * dt;
    }
    r.g2_vx = (h * svx).sqrt();
    r.g2_thx = (h * stx).sqrt();

    let start = n - ((n as f64 * FAR_FIELD_FRACTION).ceil() as usize).clamp(1, n);
    let mut ff = 0.0f64;
    for j in start..n {
        ff = ff.max((s.v[j] - 1.0).abs()).max((s.theta[j] - 1.0).abs());
    }
    for i in start..=n {
        ff = ff.max(s.u[i].abs());
    }
    r.farfield_dev = ff;

    if let Some(p) = prev {
        let dt = s.t - p.t;
        r.cum_ux2 = p.cum_ux2 + 0.5 * dt * (p.g2_ux * p.g2_ux + r.g2_ux * r.g2_ux);
        r.cum_pospart = p.cum_pospart + 0.5 * dt * (p.pospart + r.pospart);
    }
    r
}
