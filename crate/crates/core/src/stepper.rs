//! First-order IMEX stepping.
//!
//! Each step updates `v -> u -> theta`. The volume update is explicit. The
//! viscous part of the momentum equation and heat conduction are backward
//! Euler with coefficients frozen at the start of the step; pressure gradient,
//! compression work and viscous heating are explicit in the freshest fields.

use serde::{Deserialize, Serialize};

use crate::domain::{validate_state_with_floor, Grid, Params, State};
use crate::error::StepError;
use crate::model::{boundary_stress, face_conductance, theta_pow, Manufactured};
use crate::tridiag::{solve_tridiagonal, TriDiag};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub cfl_hyp: f64,
    /// Safety factor for explicitly treated diffusion. Both diffusion
    /// operators are implicit here, so it only bounds configuration input.
    pub cfl_parab: f64,
    pub dt_min: f64,
    pub positivity_floor: f64,
    pub max_retries: u32,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            cfl_hyp: 0.4,
            cfl_parab: 0.25,
            dt_min: 1e-10,
            positivity_floor: 1e-8,
            max_retries: 20,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<(), String> {
        for (name, x) in [
            ("ctl.cfl_hyp", self.cfl_hyp),
            ("ctl.cfl_parab", self.cfl_parab),
        ] {
            if !(x > 0.0 && x <= 1.0) {
                return Err(format!("{name} must lie in (0, 1], got {x}"));
            }
        }
        if !(self.dt_min > 0.0 && self.dt_min.is_finite()) {
            return Err(format!("ctl.dt_min must be positive, got {}", self.dt_min));
        }
        if !(self.positivity_floor > 0.0 && self.positivity_floor < 1.0) {
            return Err(format!(
                "ctl.positivity_floor must lie in (0, 1), got {}",
                self.positivity_floor
            ));
        }
        if self.max_retries == 0 {
            return Err("ctl.max_retries must be positive".into());
        }
        Ok(())
    }
}

/// Acoustic step limit `cfl * h * v / c` with `c = sqrt(gamma R theta)`.
pub fn stable_dt(s: &State, grid: &Grid, params: &Params, ctl: &StepControl) -> f64 {
    let gr = params.gamma() * params.r;
    let dt =
        s.v.iter()
            .zip(&s.theta)
            .map(|(&v, &th)| ctl.cfl_hyp * grid.h * v / (gr * th).sqrt())
            .fold(f64::INFINITY, f64::min);
    dt.max(ctl.dt_min)
}

pub fn step_imex(
    s: &State,
    dt: f64,
    grid: &Grid,
    params: &Params,
    mms: Option<&Manufactured>,
) -> Result<State, StepError> {
    step_imex_with_floor(s, dt, grid, params, mms, 0.0)
}

pub(crate) fn step_imex_with_floor(
    s: &State,
    dt: f64,
    grid: &Grid,
    params: &Params,
    mms: Option<&Manufactured>,
    floor: f64,
) -> Result<State, StepError> {
    let n = grid.n_cells;
    let h = grid.h;
    let t_new = s.t + dt;

    let mut v: Vec<f64> = (0..n)
        .map(|j| s.v[j] + dt * (s.u[j + 1] - s.u[j]) / h)
        .collect();
    if let Some(m) = mms {
        for (j, vj) in v.iter_mut().enumerate() {
            *vj += dt * m.source(grid.cell_x(j), s.t, params).v;
        }
    }
    if let Some((index, &value)) = v.iter().enumerate().find(|(_, &x)| !(x > floor)) {
        return Err(StepError::Positivity(crate::domain::Violation {
            field: crate::domain::Field::V,
            index,
            value,
            kind: if value.is_finite() {
                crate::domain::ViolationKind::NonPositive
            } else {
                crate::domain::ViolationKind::NonFinite
            },
        }));
    }

    let u = velocity_substep(&s.u, &v, &s.theta, dt, t_new, grid, params, mms)?;
    let theta = temperature_substep(&s.theta, &v, &u, dt, t_new, grid, params, mms)?;

    let next = State {
        t: t_new,
        v,
        theta,
        u,
    };
    validate_state_with_floor(&next, floor).map_err(StepError::Positivity)?;
    Ok(next)
}

/// Backward-Euler viscous solve for the face velocities, given the updated
/// volume and the old temperature.
#[allow(clippy::too_many_arguments)]
pub fn velocity_substep(
    u_old: &[f64],
    v: &[f64],
    theta: &[f64],
    dt: f64,
    t_new: f64,
    grid: &Grid,
    params: &Params,
    mms: Option<&Manufactured>,
) -> Result<Vec<f64>, StepError> {
    let n = grid.n_cells;
    let h = grid.h;
    let alpha = dt * params.mu / (h * h);
    let lam = dt / h;
    let pr: Vec<f64> = v
        .iter()
        .zip(theta)
        .map(|(&v, &th)| params.r * th / v)
        .collect();

    // solved for the increment so that a discrete steady state is kept exactly
    let mut sys = TriDiag::zeros(n + 1);
    for i in 1..n {
        let wl = alpha / v[i - 1];
        let wr = alpha / v[i];
        sys.lower[i] = -wl;
        sys.upper[i] = -wr;
        sys.diag[i] = 1.0 + wl + wr;
        sys.rhs[i] = wl * (u_old[i - 1] - u_old[i]) + wr * (u_old[i + 1] - u_old[i])
            - lam * (pr[i] - pr[i - 1]);
    }
    match mms {
        None => {
            // half-cell closure against the imposed wall stress
            let w = 2.0 * alpha / v[0];
            sys.diag[0] = 1.0 + w;
            sys.upper[0] = -w;
            sys.rhs[0] =
                w * (u_old[1] - u_old[0]) - 2.0 * lam * (pr[0] + boundary_stress(t_new, params));
        }
        Some(m) => {
            sys.diag[0] = 1.0;
            sys.rhs[0] = m.exact(0.0, t_new).u - u_old[0];
            for i in 1..n {
                sys.rhs[i] += dt * m.source(grid.face_x(i), t_new, params).u;
            }
        }
    }
    sys.diag[n] = 1.0;
    sys.rhs[n] = -u_old[n];
    debug_assert!(sys.is_strictly_dominant());

    let du = solve_tridiagonal(&sys)?;
    let mut u: Vec<f64> = u_old.iter().zip(&du).map(|(a, b)| a + b).collect();
    u[n] = 0.0;
    Ok(u)
}

/// Backward-Euler conduction solve with `theta^beta` frozen at `theta_old`.
/// Compression work and viscous heating use the end-of-step strain rate.
#[allow(clippy::too_many_arguments)]
pub fn temperature_substep(
    theta_old: &[f64],
    v: &[f64],
    u: &[f64],
    dt: f64,
    t_new: f64,
    grid: &Grid,
    params: &Params,
    mms: Option<&Manufactured>,
) -> Result<Vec<f64>, StepError> {
    let n = grid.n_cells;
    let h = grid.h;
    let tb = theta_pow(theta_old, params.beta);
    let c = params.cv / dt;

    // a[i] = conductance of face i; a[0] == 0 (adiabatic wall)
    let mut a = vec![0.0; n + 1];
    for i in 1..n {
        a[i] = face_conductance(tb[i - 1], tb[i], v[i - 1], v[i], h, params.kappa) / h;
    }
    if mms.is_none() {
        a[n] = face_conductance(tb[n - 1], 1.0, v[n - 1], 1.0, h, params.kappa) / h;
    }

    let mut sys = TriDiag::zeros(n);
    for j in 0..n {
        let ux = (u[j + 1] - u[j]) / h;
        let work = (-params.r * theta_old[j] * ux + params.mu * ux * ux) / v[j];
        let left = if j > 0 {
            a[j] * (theta_old[j - 1] - theta_old[j])
        } else {
            0.0
        };
        let right = if j + 1 < n {
            a[j + 1] * (theta_old[j + 1] - theta_old[j])
        } else {
            0.0
        };
        sys.diag[j] = c + a[j] + a[j + 1];
        sys.lower[j] = -a[j];
        sys.upper[j] = -a[j + 1];
        sys.rhs[j] = work + left + right;
    }
    match mms {
        None => sys.rhs[n - 1] += a[n] * (1.0 - theta_old[n - 1]),
        Some(m) => {
            sys.rhs[0] -= m.exact(0.0, t_new).flux(params) / h;
            sys.rhs[n - 1] += m.exact(grid.length, t_new).flux(params) / h;
            for j in 0..n {
                sys.rhs[j] += params.cv * m.source(grid.cell_x(j), t_new, params).theta;
            }
        }
    }
    debug_assert!(sys.is_strictly_dominant());
    let dtheta = solve_tridiagonal(&sys)?;
    Ok(theta_old.iter().zip(&dtheta).map(|(a, b)| a + b).collect())
}

/// Per-step hook invoked by [`advance`] after every accepted step.
pub trait StepObserver {
    fn on_step(&mut self, prev: &State, next: &State, dt: f64);
}

impl StepObserver for () {
    fn on_step(&mut self, _: &State, _: &State, _: f64) {}
}

impl<F: FnMut(&State, &State, f64)> StepObserver for F {
    fn on_step(&mut self, prev: &State, next: &State, dt: f64) {
        self(prev, next, dt)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdvanceStats {
    pub steps: u64,
    pub retries: u64,
}

impl std::ops::AddAssign for AdvanceStats {
    fn add_assign(&mut self, o: Self) {
        self.steps += o.steps;
        self.retries += o.retries;
    }
}

/// Advances to exactly `t_target`, halving the step on loss of positivity.
pub fn advance<O: StepObserver + ?Sized>(
    s: State,
    t_target: f64,
    grid: &Grid,
    params: &Params,
    ctl: &StepControl,
    observer: &mut O,
) -> Result<(State, AdvanceStats), StepError> {
    let mut stats = AdvanceStats::default();
    let mut cur = s;
    while cur.t < t_target {
        let mut dt = stable_dt(&cur, grid, params, ctl);
        let mut retries = 0;
        let next = loop {
            let landing = cur.t + dt >= t_target;
            let step_dt = if landing { t_target - cur.t } else { dt };
            match step_imex_with_floor(&cur, step_dt, grid, params, None, ctl.positivity_floor) {
                Ok(mut next) => {
                    if landing {
                        next.t = t_target;
                    }
                    break (next, step_dt);
                }
                Err(StepError::Positivity(_)) => {
                    retries += 1;
                    stats.retries += 1;
                    dt = step_dt * 0.5;
                    if retries > ctl.max_retries || dt < ctl.dt_min {
                        return Err(StepError::Underflow {
                            t: cur.t,
                            dt,
                            dt_min: ctl.dt_min,
                            snapshot: Box::new(cur),
                        });
                    }
                }
                Err(e) => return Err(e),
            }
        };
        let (next, dt) = next;
        observer.on_step(&cur, &next, dt);
        stats.steps += 1;
        cur = next;
    }
    Ok((cur, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_grid, equilibrium_state, make_initial_data, IcSpec};

    #[test]
    fn stable_dt_examples() {
        let g = build_grid(50.0, 2000).unwrap();
        let p = Params::default();
        let ctl = StepControl::default();
        let s = equilibrium_state(&g);
        let dt = stable_dt(&s, &g, &p, &ctl);
        assert!((dt - 0.4 * 0.025 / 2f64.sqrt()).abs() < 1e-15);

        let mut hot = s.clone();
        hot.theta.iter_mut().for_each(|x| *x = 2.0);
        assert!((stable_dt(&hot, &g, &p, &ctl) - dt / 2f64.sqrt()).abs() < 1e-15);

        let mut big = s.clone();
        big.v.iter_mut().for_each(|x| *x = 2.0);
        assert!((stable_dt(&big, &g, &p, &ctl) - 2.0 * dt).abs() < 1e-15);
    }

    #[test]
    fn equilibrium_step_is_exact() {
        let g = build_grid(10.0, 100).unwrap();
        let p = Params::new(1.0, 1.0, 2.5, 2.0, 0.7).unwrap();
        let s = equilibrium_state(&g);
        for dt in [1e-4, 0.1, 10.0] {
            let next = step_imex(&s, dt, &g, &p, None).unwrap();
            let mut want = s.clone();
            want.t = dt;
            assert!(next.max_deviation(&want) <= 1e-14);
        }
    }

    #[test]
    fn degenerate_interval_takes_no_steps() {
        let g = build_grid(50.0, 200).unwrap();
        let s = make_initial_data(&g, &IcSpec::default()).unwrap();
        let (out, stats) = advance(
            s.clone(),
            0.0,
            &g,
            &Params::default(),
            &StepControl::default(),
            &mut (),
        )
        .unwrap();
        assert_eq!(out, s);
        assert_eq!(stats.steps, 0);
    }

    #[test]
    fn lands_on_target_time() {
        let g = build_grid(50.0, 200).unwrap();
        let s = make_initial_data(&g, &IcSpec::default()).unwrap();
        let mut count = 0;
        let mut obs = |_: &State, _: &State, _: f64| count += 1;
        let (out, stats) = advance(
            s,
            0.337,
            &g,
            &Params::default(),
            &StepControl::default(),
            &mut obs,
        )
        .unwrap();
        assert_eq!(out.t, 0.337);
        assert_eq!(stats.steps, count);
    }

    #[test]
    fn volume_update_telescopes() {
        let g = build_grid(50.0, 400).unwrap();
        let s = make_initial_data(
            &g,
            &IcSpec {
                center: 2.5,
                width: 2.0,
                ..IcSpec::default()
            },
        )
        .unwrap();
        let dt = 5e-3;
        let next = step_imex(&s, dt, &g, &Params::default(), None).unwrap();
        let before: f64 = s.v.iter().sum::<f64>() * g.h;
        let after: f64 = next.v.iter().sum::<f64>() * g.h;
        let scale = before.abs() + 1.0;
        assert!((after - before + dt * s.u[0]).abs() <= 64.0 * f64::EPSILON * scale);
    }

    #[test]
    fn positivity_failure_is_signalled() {
        let g = build_grid(10.0, 40).unwrap();
        let mut s = equilibrium_state(&g);
        s.u[10] = -50.0;
        assert!(matches!(
            step_imex(&s, 0.1, &g, &Params::default(), None),
            Err(StepError::Positivity(_))
        ));
    }

    #[test]
    fn hard_failure_carries_snapshot() {
        let g = build_grid(10.0, 40).unwrap();
        let mut s = equilibrium_state(&g);
        s.u[10] = -1e6;
        let ctl = StepControl {
            max_retries: 3,
            ..StepControl::default()
        };
        match advance(s.clone(), 1.0, &g, &Params::default(), &ctl, &mut ()) {
            Err(StepError::Underflow { snapshot, .. }) => assert_eq!(*snapshot, s),
            other => panic!("expected underflow, got {other:?}"),
        }
    }
}
