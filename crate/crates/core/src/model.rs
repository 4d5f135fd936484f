//! Constitutive laws and the semi-discrete right-hand side of
//!
//! ```text
//! v_t = u_x
//! u_t = sigma_x,                 sigma = (mu u_x - R theta) / v
//! cv theta_t = -R theta u_x / v + mu u_x^2 / v + (kappa theta^beta theta_x / v)_x
//! ```
//!
//! on the staggered grid, with the outer-pressure stress `sigma(0, t) = -R`,
//! an adiabatic wall and the far-field state `(1, 0, 1)` at `x = L`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::domain::{Grid, Params, State};
use crate::error::{Error, Result};

pub fn pressure(v: f64, theta: f64, params: &Params) -> Result<f64> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("pressure needs v > 0, got {v}")));
    }
    Ok(params.r * theta / v)
}

pub fn conductivity(theta: f64, params: &Params) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::Domain(format!(
            "conductivity needs theta > 0, got {theta}"
        )));
    }
    Ok(params.kappa * pow_beta(theta, params.beta))
}

#[inline]
pub(crate) fn pow_beta(theta: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        1.0
    } else if beta == 1.0 {
        theta
    } else {
        theta.powf(beta)
    }
}

/// `theta^beta` for every cell.
pub(crate) fn theta_pow(theta: &[f64], beta: f64) -> Vec<f64> {
    theta.iter().map(|&t| pow_beta(t, beta)).collect()
}

/// Stress imposed at the wall by the outer pressure.
pub fn boundary_stress(_t: f64, params: &Params) -> f64 {
    -params.p_outer
}

/// Per-cell strain rate `u_x` and stress `sigma`.
pub fn cell_strain_and_stress(s: &State, grid: &Grid, params: &Params) -> (Vec<f64>, Vec<f64>) {
    let inv_h = 1.0 / grid.h;
    let ux: Vec<f64> = s.u.windows(2).map(|w| (w[1] - w[0]) * inv_h).collect();
    let sigma = ux
        .iter()
        .zip(s.v.iter().zip(&s.theta))
        .map(|(&ux, (&v, &th))| (params.mu * ux - params.r * th) / v)
        .collect();
    (ux, sigma)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaceFlux {
    /// `kappa(theta) theta_x / v` on every face; `q[0] == 0`.
    pub q: Vec<f64>,
}

/// Conduction coefficient `kappa_f / (h v_f)` of an interior or far-field
/// face, given `theta^beta` and `v` on both sides.
#[inline]
pub(crate) fn face_conductance(
    tb_l: f64,
    tb_r: f64,
    v_l: f64,
    v_r: f64,
    h: f64,
    kappa: f64,
) -> f64 {
    kappa * 0.5 * (tb_l + tb_r) / (h * 0.5 * (v_l + v_r))
}

pub fn face_heat_flux(s: &State, grid: &Grid, params: &Params) -> FaceFlux {
    let n = grid.n_cells;
    let tb = theta_pow(&s.theta, params.beta);
    let mut q = vec![0.0; n + 1];
    for i in 1..n {
        let a = face_conductance(tb[i - 1], tb[i], s.v[i - 1], s.v[i], grid.h, params.kappa);
        q[i] = a * (s.theta[i] - s.theta[i - 1]);
    }
    let a = face_conductance(tb[n - 1], 1.0, s.v[n - 1], 1.0, grid.h, params.kappa);
    q[n] = a * (1.0 - s.theta[n - 1]);
    FaceFlux { q }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rhs {
    pub dv: Vec<f64>,
    pub du: Vec<f64>,
    pub dtheta: Vec<f64>,
}

impl Rhs {
    pub fn max_abs(&self) -> f64 {
        self.dv
            .iter()
            .chain(&self.du)
            .chain(&self.dtheta)
            .fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Semi-discrete time derivative. With `mms` set, the manufactured sources are
/// added and the physical boundary closures are replaced by the exact traces.
pub fn rhs(s: &State, grid: &Grid, params: &Params, mms: Option<&Manufactured>) -> Rhs {
    let n = grid.n_cells;
    let h = grid.h;
    let (ux, sigma) = cell_strain_and_stress(s, grid, params);
    let mut q = face_heat_flux(s, grid, params).q;

    let dv = ux.clone();

    let mut du = vec![0.0; n + 1];
    for i in 1..n {
        du[i] = (sigma[i] - sigma[i - 1]) / h;
    }
    du[0] = match mms {
        None => (sigma[0] - boundary_stress(s.t, params)) / (0.5 * h),
        Some(m) => m.exact(0.0, s.t).u_t,
    };

    if let Some(m) = mms {
        q[0] = m.exact(0.0, s.t).flux(params);
        q[n] = m.exact(grid.length, s.t).flux(params);
    }

    let mut dtheta: Vec<f64> = (0..n)
        .map(|j| {
            let work = -params.r * s.theta[j] * ux[j] + params.mu * ux[j] * ux[j];
            work / (params.cv * s.v[j]) + (q[j + 1] - q[j]) / (params.cv * h)
        })
        .collect();

    let mut out = Rhs {
        dv,
        du,
        dtheta: Vec::new(),
    };
    if let Some(m) = mms {
        for j in 0..n {
            let src = m.source(grid.cell_x(j), s.t, params);
            out.dv[j] += src.v;
            dtheta[j] += src.theta;
        }
        for i in 1..n {
            out.du[i] += m.source(grid.face_x(i), s.t, params).u;
        }
    }
    out.dtheta = dtheta;
    out
}

/// Point values and first derivatives of a manufactured solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactFields {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
    pub v_t: f64,
    pub u_t: f64,
    pub theta_t: f64,
    pub v_x: f64,
    pub u_x: f64,
    pub theta_x: f64,
    pub u_xx: f64,
    pub theta_xx: f64,
}

impl ExactFields {
    pub fn flux(&self, params: &Params) -> f64 {
        params.kappa * pow_beta(self.theta, params.beta) * self.theta_x / self.v
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sources {
    pub v: f64,
    pub u: f64,
    pub theta: f64,
}

/// The manufactured solution
///
/// ```text
/// v = 1 + a e^-t cos(pi x / L)
/// u =     a e^-t sin(pi x / L)
/// theta = 1 + a e^-t cos(2 pi x / L)
/// ```
///
/// which has `u = 0` and `theta_x = 0` at both ends of `[0, L]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manufactured {
    pub amplitude: f64,
    pub length: f64,
}

impl Manufactured {
    pub const DEFAULT_AMPLITUDE: f64 = 0.1;

    pub fn new(length: f64) -> Self {
        Manufactured {
            amplitude: Self::DEFAULT_AMPLITUDE,
            length,
        }
    }

    pub fn exact(&self, x: f64, t: f64) -> ExactFields {
        let e = self.amplitude * (-t).exp();
        let k1 = PI / self.length;
        let k2 = 2.0 * PI / self.length;
        let (s1, c1) = (k1 * x).sin_cos();
        let (s2, c2) = (k2 * x).sin_cos();
        ExactFields {
            v: 1.0 + e * c1,
            u: e * s1,
            theta: 1.0 + e * c2,
            v_t: -e * c1,
            u_t: -e * s1,
            theta_t: -e * c2,
            v_x: -e * k1 * s1,
            u_x: e * k1 * c1,
            theta_x: -e * k2 * s2,
            u_xx: -e * k1 * k1 * s1,
            theta_xx: -e * k2 * k2 * c2,
        }
    }

    /// Residual sources `d/dt(exact) - RHS(exact)` in rate units.
    pub fn source(&self, x: f64, t: f64, params: &Params) -> Sources {
        let f = self.exact(x, t);
        let Params {
            mu,
            kappa,
            beta,
            r,
            cv,
            ..
        } = *params;

        let sigma_x =
            (mu * f.u_xx - r * f.theta_x) / f.v - (mu * f.u_x - r * f.theta) * f.v_x / (f.v * f.v);

        let tb = pow_beta(f.theta, beta);
        let dtb = if beta == 0.0 {
            0.0
        } else {
            beta * f.theta.powf(beta - 1.0)
        };
        let flux_x = kappa
            * (dtb * f.theta_x * f.theta_x / f.v + tb * f.theta_xx / f.v
                - tb * f.theta_x * f.v_x / (f.v * f.v));
        let heat = (-r * f.theta * f.u_x + mu * f.u_x * f.u_x) / f.v + flux_x;

        Sources {
            v: f.v_t - f.u_x,
            u: f.u_t - sigma_x,
            theta: f.theta_t - heat / cv,
        }
    }

    pub fn state(&self, grid: &Grid, t: f64) -> State {
        let n = grid.n_cells;
        let mut u: Vec<f64> = (0..=n).map(|i| self.exact(grid.face_x(i), t).u).collect();
        u[0] = 0.0;
        u[n] = 0.0;
        State {
            t,
            v: (0..n).map(|j| self.exact(grid.cell_x(j), t).v).collect(),
            theta: (0..n)
                .map(|j| self.exact(grid.cell_x(j), t).theta)
                .collect(),
            u,
        }
    }
}

pub fn mms_source(x: f64, t: f64, profile: &Manufactured, params: &Params) -> Sources {
    profile.source(x, t, params)
}
