use serde::{Deserialize, Serialize};

use crate::domain::{Grid, Params, State};
use crate::model::{face_heat_flux, theta_pow};

/// `y - ln y - 1`, nonnegative with its only zero at `y = 1`.
#[inline]
pub fn entropy_density(y: f64) -> f64 {
    let d = y - 1.0;
    if d.abs() < 0.5 {
        // ln_1p keeps the cancellation near y = 1 harmless
        d - d.ln_1p()
    } else {
        d - y.ln()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyRecord {
    pub t: f64,
    pub energy: f64,
    pub dissipation: f64,
    /// Trapezoidal running integral of `dissipation` from the first record.
    pub cum_dissipation: f64,
}

impl EnergyRecord {
    pub fn initial(s: &State, grid: &Grid, params: &Params) -> Self {
        EnergyRecord {
            t: s.t,
            energy: energy_functional(s, grid, params),
            dissipation: dissipation_functional(s, grid, params),
            cum_dissipation: 0.0,
        }
    }

    /// Record for `s`, accumulating from `self` by the trapezoid rule.
    pub fn next(&self, s: &State, grid: &Grid, params: &Params) -> Self {
        let dissipation = dissipation_functional(s, grid, params);
        EnergyRecord {
            t: s.t,
            energy: energy_functional(s, grid, params),
            dissipation,
            cum_dissipation: self.cum_dissipation
                + 0.5 * (s.t - self.t) * (self.dissipation + dissipation),
        }
    }

    /// `E(t) + cumV(t) - E0`; nonpositive when the energy inequality holds.
    pub fn excess_over(&self, e0: f64) -> f64 {
        self.energy + self.cum_dissipation - e0
    }
}

/// Entropy-energy `sum h [ubar^2/2 + R (v - ln v - 1) + cv (theta - ln theta - 1)]`
/// with `ubar` the cell average of the two face velocities.
pub fn energy_functional(s: &State, grid: &Grid, params: &Params) -> f64 {
    let sum: f64 = (0..grid.n_cells)
        .map(|j| {
            let ub = 0.5 * (s.u[j] + s.u[j + 1]);
            0.5 * ub * ub
                + params.r * entropy_density(s.v[j])
                + params.cv * entropy_density(s.theta[j])
        })
        .sum();
    grid.h * sum
}

/// Dissipation rate: viscous part on cells, conductive part on interior faces.
pub fn dissipation_functional(s: &State, grid: &Grid, params: &Params) -> f64 {
    let n = grid.n_cells;
    let h = grid.h;
    let viscous: f64 = (0..n)
        .map(|j| {
            let ux = (s.u[j + 1] - s.u[j]) / h;
            params.mu * ux * ux / (s.v[j] * s.theta[j])
        })
        .sum();
    let tb = theta_pow(&s.theta, params.beta);
    let thermal: f64 = (1..n)
        .map(|i| {
            let kf = params.kappa * 0.5 * (tb[i - 1] + tb[i]);
            let vf = 0.5 * (s.v[i - 1] + s.v[i]);
            let tf = 0.5 * (s.theta[i - 1] + s.theta[i]);
            let tx = (s.theta[i] - s.theta[i - 1]) / h;
            kf * tx * tx / (vf * tf * tf)
        })
        .sum();
    h * (viscous + thermal)
}

/// Total energy relative to the far-field state,
/// `sum h [ubar^2/2 + cv (theta - 1) + P (v - 1)]`. The outer-pressure work
/// enters through `P v`, so only heat crossing the far face changes it.
pub fn total_energy(s: &State, grid: &Grid, params: &Params) -> f64 {
    let sum: f64 = (0..grid.n_cells)
        .map(|j| {
            let ub = 0.5 * (s.u[j] + s.u[j + 1]);
            0.5 * ub * ub + params.cv * (s.theta[j] - 1.0) + params.p_outer * (s.v[j] - 1.0)
        })
        .sum();
    grid.h * sum
}

/// Running check of the total-energy balance. The scheme evolves the
/// temperature equation, so the balance holds only up to discretisation error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalanceRecord {
    pub t: f64,
    pub total: f64,
    /// Heat entering through the far face per unit time.
    pub inflow: f64,
    pub cum_inflow: f64,
    pub initial_total: f64,
}

impl BalanceRecord {
    pub fn initial(s: &State, grid: &Grid, params: &Params) -> Self {
        let total = total_energy(s, grid, params);
        BalanceRecord {
            t: s.t,
            total,
            inflow: face_heat_flux(s, grid, params).q[grid.n_cells],
            cum_inflow: 0.0,
            initial_total: total,
        }
    }

    pub fn next(&self, s: &State, grid: &Grid, params: &Params) -> Self {
        let inflow = face_heat_flux(s, grid, params).q[grid.n_cells];
        BalanceRecord {
            t: s.t,
            total: total_energy(s, grid, params),
            inflow,
            cum_inflow: self.cum_inflow + 0.5 * (s.t - self.t) * (self.inflow + inflow),
            initial_total: self.initial_total,
        }
    }

    /// `E_tot(t) - E_tot(0) - int_0^t inflow`.
    pub fn residual(&self) -> f64 {
        self.total - self.initial_total - self.cum_inflow
    }
}
