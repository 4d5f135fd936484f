//! Physical constants, the staggered Lagrangian grid, the discrete state and
//! initial-data generation for the truncated half-line problem.
//!
//! Cells are stored 0-based: cell `j` sits between faces `j` and `j + 1`.
//! Face 0 is the outer-pressure wall at `x = 0`, face `N` is the far-field
//! boundary at `x = L`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constitutive constants of a polytropic gas with constant viscosity and
/// conductivity `kappa * theta^beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub mu: f64,
    pub kappa: f64,
    pub beta: f64,
    pub r: f64,
    pub cv: f64,
    /// Pressure applied at the wall. Always equal to `r`, the far-field pressure.
    pub p_outer: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params::new(1.0, 1.0, 1.0, 1.0, 1.0).expect("unit constants are valid")
    }
}

impl Params {
    pub fn new(mu: f64, kappa: f64, beta: f64, r: f64, cv: f64) -> Result<Self> {
        let p = Params {
            mu,
            kappa,
            beta,
            r,
            cv,
            p_outer: r,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, val) in [
            ("mu", self.mu),
            ("kappa", self.kappa),
            ("R", self.r),
            ("cv", self.cv),
        ] {
            if !(val.is_finite() && val > 0.0) {
                return Err(Error::Config(format!(
                    "physics.{name} must be positive, got {val}"
                )));
            }
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::Config(format!(
                "physics.beta must be non-negative, got {}",
                self.beta
            )));
        }
        if self.p_outer != self.r {
            return Err(Error::Config(format!(
                "outer pressure {} must equal R = {}",
                self.p_outer, self.r
            )));
        }
        Ok(())
    }

    /// Adiabatic exponent `1 + R / cv`.
    pub fn gamma(&self) -> f64 {
        1.0 + self.r / self.cv
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub length: f64,
    pub n_cells: usize,
    pub h: f64,
}

pub const MIN_CELLS: usize = 4;

pub fn build_grid(length: f64, n_cells: usize) -> Result<Grid> {
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::Config(format!(
            "grid length must be positive, got {length}"
        )));
    }
    if n_cells < MIN_CELLS {
        return Err(Error::Config(format!(
            "grid needs at least {MIN_CELLS} cells, got {n_cells}"
        )));
    }
    Ok(Grid {
        length,
        n_cells,
        h: length / n_cells as f64,
    })
}

impl Grid {
    #[inline]
    pub fn face_x(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    #[inline]
    pub fn cell_x(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.h
    }

    pub fn face_coords(&self) -> Vec<f64> {
        (0..=self.n_cells).map(|i| self.face_x(i)).collect()
    }

    pub fn cell_coords(&self) -> Vec<f64> {
        (0..self.n_cells).map(|j| self.cell_x(j)).collect()
    }

    /// Number of cells in one unit of mass, if `h` divides 1.
    pub fn cells_per_unit(&self) -> Option<usize> {
        let k = (1.0 / self.h).round();
        if k >= 1.0 && (k * self.h - 1.0).abs() <= 1e-9 {
            Some(k as usize)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub t: f64,
    /// Specific volume per cell.
    pub v: Vec<f64>,
    /// Temperature per cell.
    pub theta: Vec<f64>,
    /// Velocity per face, `u[N] == 0`.
    pub u: Vec<f64>,
}

impl State {
    pub fn n_cells(&self) -> usize {
        self.v.len()
    }

    /// Largest pointwise distance between two states of equal size.
    pub fn max_deviation(&self, other: &State) -> f64 {
        let pairs = self
            .v
            .iter()
            .zip(&other.v)
            .chain(self.theta.iter().zip(&other.theta))
            .chain(self.u.iter().zip(&other.u));
        pairs.map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

pub fn equilibrium_state(grid: &Grid) -> State {
    let n = grid.n_cells;
    State {
        t: 0.0,
        v: vec![1.0; n],
        theta: vec![1.0; n],
        u: vec![0.0; n + 1],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IcKind {
    Equilibrium,
    Bump,
    Packet,
}

impl std::str::FromStr for IcKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equilibrium" => Ok(IcKind::Equilibrium),
            "bump" => Ok(IcKind::Bump),
            "packet" => Ok(IcKind::Packet),
            other => Err(Error::Config(format!(
                "unknown ic.kind '{other}' (expected equilibrium, bump or packet)"
            ))),
        }
    }
}

impl fmt::Display for IcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IcKind::Equilibrium => "equilibrium",
            IcKind::Bump => "bump",
            IcKind::Packet => "packet",
        })
    }
}

/// Perturbation of the far-field state `(1, 0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IcSpec {
    pub kind: IcKind,
    pub amp_v: f64,
    pub amp_u: f64,
    pub amp_theta: f64,
    pub center: f64,
    pub width: f64,
    /// Lower bound required of `v0` and `theta0`.
    pub floor: f64,
    /// Carrier wavenumber of the `packet` profile.
    pub wavenumber: f64,
}

impl Default for IcSpec {
    fn default() -> Self {
        IcSpec {
            kind: IcKind::Bump,
            amp_v: 0.3,
            amp_u: 0.3,
            amp_theta: 0.3,
            center: 6.0,
            width: 3.0,
            floor: 0.1,
            wavenumber: 2.0 * PI,
        }
    }
}

impl IcSpec {
    pub fn equilibrium() -> Self {
        IcSpec {
            kind: IcKind::Equilibrium,
            amp_v: 0.0,
            amp_u: 0.0,
            amp_theta: 0.0,
            ..IcSpec::default()
        }
    }

    /// Shape function with peak magnitude 1.
    pub fn profile(&self, x: f64) -> f64 {
        match self.kind {
            IcKind::Equilibrium => 0.0,
            IcKind::Bump => {
                let s = (x - self.center) / self.width;
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    // squared raised cosine, C^3 at the edge of its support
                    let c = (0.5 * PI * s).cos();
                    c * c * c * c
                }
            }
            IcKind::Packet => {
                let s = (x - self.center) / self.width;
                (-s * s).exp() * (self.wavenumber * x).cos()
            }
        }
    }

    /// Right end of the region where the perturbation is non-negligible.
    fn extent(&self) -> f64 {
        match self.kind {
            IcKind::Equilibrium => 0.0,
            IcKind::Bump => self.center + self.width,
            IcKind::Packet => self.center + 6.0 * self.width,
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.floor.is_finite() && self.floor > 0.0) {
            return Err(Error::Config(format!(
                "ic.floor must be positive, got {}",
                self.floor
            )));
        }
        if self.kind == IcKind::Equilibrium {
            return Ok(());
        }
        for (name, a) in [("ic.amp_v", self.amp_v), ("ic.amp_theta", self.amp_theta)] {
            if !a.is_finite() || 1.0 - a.abs() < self.floor {
                return Err(Error::Config(format!(
                    "{name} = {a} leaves a minimum of {} below the floor {}",
                    1.0 - a.abs(),
                    self.floor
                )));
            }
        }
        if !self.amp_u.is_finite() {
            return Err(Error::Config("ic.amp_u must be finite".into()));
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::Config(format!(
                "ic.width must be positive, got {}",
                self.width
            )));
        }
        if self.kind == IcKind::Bump && self.center - self.width < 0.0 {
            return Err(Error::Config(
                "ic bump support must lie inside the domain".into(),
            ));
        }
        if self.extent() > 0.5 * grid.length {
            return Err(Error::Config(format!(
                "ic perturbation extends to x = {} beyond L/2 = {}",
                self.extent(),
                0.5 * grid.length
            )));
        }
        Ok(())
    }
}

pub fn make_initial_data(grid: &Grid, spec: &IcSpec) -> Result<State> {
    spec.validate(grid)?;
    if spec.kind == IcKind::Equilibrium {
        return Ok(equilibrium_state(grid));
    }
    let v = (0..grid.n_cells)
        .map(|j| 1.0 + spec.amp_v * spec.profile(grid.cell_x(j)))
        .collect();
    let theta = (0..grid.n_cells)
        .map(|j| 1.0 + spec.amp_theta * spec.profile(grid.cell_x(j)))
        .collect();
    let mut u: Vec<f64> = (0..=grid.n_cells)
        .map(|i| spec.amp_u * spec.profile(grid.face_x(i)))
        .collect();
    u[grid.n_cells] = 0.0;
    Ok(State {
        t: 0.0,
        v,
        theta,
        u,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    V,
    Theta,
    U,
    Time,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::V => "v",
            Field::Theta => "theta",
            Field::U => "u",
            Field::Time => "t",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    NonFinite,
    NonPositive,
    FarFieldVelocity,
    Shape,
}

/// First offending entry found by [`validate_state`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub field: Field,
    pub index: usize,
    pub value: f64,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            ViolationKind::NonFinite => "non-finite",
            ViolationKind::NonPositive => "non-positive",
            ViolationKind::FarFieldVelocity => "nonzero far-field velocity",
            ViolationKind::Shape => "wrong array length",
        };
        write!(f, "{what} {}[{}] = {}", self.field, self.index, self.value)
    }
}

impl std::error::Error for Violation {}

pub fn validate_state(s: &State, _params: &Params) -> Result<(), Violation> {
    validate_state_with_floor(s, 0.0)
}

/// Like [`validate_state`] but requires `v` and `theta` to exceed `floor`.
pub fn validate_state_with_floor(s: &State, floor: f64) -> Result<(), Violation> {
    let n = s.v.len();
    if s.theta.len() != n || s.u.len() != n + 1 {
        return Err(Violation {
            field: if s.theta.len() != n {
                Field::Theta
            } else {
                Field::U
            },
            index: 0,
            value: f64::NAN,
            kind: ViolationKind::Shape,
        });
    }
    if !(s.t.is_finite() && s.t >= 0.0) {
        return Err(Violation {
            field: Field::Time,
            index: 0,
            value: s.t,
            kind: ViolationKind::NonFinite,
        });
    }
    for (field, vals) in [(Field::V, &s.v), (Field::Theta, &s.theta)] {
        for (index, &value) in vals.iter().enumerate() {
            let kind = if !value.is_finite() {
                ViolationKind::NonFinite
            } else if value <= floor {
                ViolationKind::NonPositive
            } else {
                continue;
            };
            return Err(Violation {
                field,
                index,
                value,
                kind,
            });
        }
    }
    if let Some((index, &value)) = s.u.iter().enumerate().find(|(_, x)| !x.is_finite()) {
        return Err(Violation {
            field: Field::U,
            index,
            value,
            kind: ViolationKind::NonFinite,
        });
    }
    if s.u[n] != 0.0 {
        return Err(Violation {
            field: Field::U,
            index: n,
            value: s.u[n],
            kind: ViolationKind::FarFieldVelocity,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spacing() {
        let g = build_grid(50.0, 2000).unwrap();
        assert_eq!(g.h, 0.025);
        let g = build_grid(1.0, 4).unwrap();
        assert_eq!(g.face_coords(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = build_grid(10.0, 6).unwrap();
        let c = g.cell_coords();
        for (got, want) in c.iter().step_by(2).zip([5.0 / 6.0, 25.0 / 6.0, 45.0 / 6.0]) {
            assert!((got - want).abs() <= 4.0 * f64::EPSILON * want);
        }
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(build_grid(0.0, 10).is_err());
        assert!(build_grid(-1.0, 10).is_err());
        assert!(build_grid(1.0, 3).is_err());
        assert!(build_grid(f64::NAN, 10).is_err());
    }

    #[test]
    fn last_face_lands_on_length() {
        for (l, n) in [(50.0, 2000), (10.0, 6), (7.3, 17), (1e3, 999)] {
            let g = build_grid(l, n).unwrap();
            assert!((g.face_x(n) - l).abs() <= 4.0 * f64::EPSILON * l);
        }
    }

    #[test]
    fn equilibrium_is_valid() {
        let g = build_grid(5.0, 20).unwrap();
        let s = equilibrium_state(&g);
        assert!(s.v.iter().chain(&s.theta).all(|&x| x == 1.0));
        assert!(s.u.iter().all(|&x| x == 0.0));
        assert_eq!(s.t, 0.0);
        assert!(validate_state(&s, &Params::default()).is_ok());
    }

    #[test]
    fn initial_data_kinds() {
        let g = build_grid(50.0, 200).unwrap();
        let eq = make_initial_data(&g, &IcSpec::equilibrium()).unwrap();
        assert_eq!(eq, equilibrium_state(&g));

        let spec = IcSpec {
            amp_v: 0.3,
            floor: 0.5,
            ..IcSpec::default()
        };
        let s = make_initial_data(&g, &spec).unwrap();
        assert!(s.v.iter().all(|&v| v >= 0.7 - 1e-15));
        assert_eq!(s.u[200], 0.0);
        assert!(validate_state(&s, &Params::default()).is_ok());

        let bad = IcSpec {
            amp_theta: 0.95,
            floor: 0.1,
            ..IcSpec::default()
        };
        assert!(matches!(make_initial_data(&g, &bad), Err(Error::Config(_))));
    }

    #[test]
    fn negative_amplitudes_respect_floor() {
        let g = build_grid(50.0, 400).unwrap();
        for kind in [IcKind::Bump, IcKind::Packet] {
            let spec = IcSpec {
                kind,
                amp_v: -0.6,
                amp_theta: -0.6,
                floor: 0.4,
                center: 10.0,
                width: 2.0,
                ..IcSpec::default()
            };
            let s = make_initial_data(&g, &spec).unwrap();
            let vmin = s.v.iter().cloned().fold(f64::INFINITY, f64::min);
            let tmin = s.theta.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(vmin >= spec.floor && tmin >= spec.floor);
        }
    }

    #[test]
    fn perturbation_must_decay_before_half_length() {
        let g = build_grid(20.0, 80).unwrap();
        let spec = IcSpec {
            center: 9.0,
            width: 2.0,
            ..IcSpec::default()
        };
        assert!(make_initial_data(&g, &spec).is_err());
    }

    #[test]
    fn violations_are_reported() {
        let g = build_grid(5.0, 20).unwrap();
        let p = Params::default();
        let mut s = equilibrium_state(&g);
        s.v[7] = -0.1;
        let e = validate_state(&s, &p).unwrap_err();
        assert_eq!(
            (e.field, e.index, e.kind),
            (Field::V, 7, ViolationKind::NonPositive)
        );

        let mut s = equilibrium_state(&g);
        s.theta[3] = f64::NAN;
        let e = validate_state(&s, &p).unwrap_err();
        assert_eq!(
            (e.field, e.index, e.kind),
            (Field::Theta, 3, ViolationKind::NonFinite)
        );

        let mut s = equilibrium_state(&g);
        s.u[20] = 1e-3;
        let e = validate_state(&s, &p).unwrap_err();
        assert_eq!(e.kind, ViolationKind::FarFieldVelocity);
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(1.0, 1.0, 0.0, 1.0, 1.0).is_ok());
        assert!(Params::new(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(Params::new(1.0, 1.0, -0.5, 1.0, 1.0).is_err());
        assert!(Params::new(1.0, 1.0, 1.0, -2.0, 1.0).is_err());
        let p = Params::new(1.0, 1.0, 1.0, 2.0, 1.0).unwrap();
        assert_eq!(p.p_outer, 2.0);
    }
}
