//! Functionals of the solution that the a priori estimates control, and their
//! time behaviour along a trajectory.

mod bounds;
mod decay;
mod energy;
mod jensen;
mod probe;

pub use bounds::{
    sample_bounds, sample_bounds_with_threshold, BoundsRecord, FAR_FIELD_FRACTION,
    POSITIVE_PART_THRESHOLD,
};
pub use decay::{decay_report, least_squares_slope, DecayReport, ExtremumDrift, NormRatio, Ratio};
pub use energy::{
    dissipation_functional, energy_functional, entropy_density, total_energy, BalanceRecord,
    EnergyRecord,
};
pub use jensen::{entropy_roots, unit_interval_averages, JensenBand};
pub use probe::{default_interval, update_repr_probe, Reconstruction, ReprProbe, PROBE_POINTS};

use serde::{Deserialize, Serialize};

/// One row of the time-series file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub cum_dissipation: f64,
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
    pub y_probe: f64,
    pub repr_relerr: f64,
    pub farfield_dev: f64,
}

impl SeriesRow {
    pub const HEADER: &'static str = "t,E,V,cumV,vmin,vmax,thmin,thmax,n2_vm1,n2_u,n2_thm1,\
ninf_vm1,ninf_u,ninf_thm1,g2_vx,g2_ux,g2_thx,pospart,cum_ux2,cum_pospart,Y_probe,repr_relerr,farfield_dev";

    pub const COLUMNS: usize = 23;

    pub fn new(e: &EnergyRecord, b: &BoundsRecord, y_probe: f64, repr_relerr: f64) -> Self {
        SeriesRow {
            t: b.t,
            energy: e.energy,
            dissipation: e.dissipation,
            cum_dissipation: e.cum_dissipation,
            vmin: b.vmin,
            vmax: b.vmax,
            thmin: b.thmin,
            thmax: b.thmax,
            n2_vm1: b.n2_vm1,
            n2_u: b.n2_u,
            n2_thm1: b.n2_thm1,
            ninf_vm1: b.ninf_vm1,
            ninf_u: b.ninf_u,
            ninf_thm1: b.ninf_thm1,
            g2_vx: b.g2_vx,
            g2_ux: b.g2_ux,
            g2_thx: b.g2_thx,
            pospart: b.pospart,
            cum_ux2: b.cum_ux2,
            cum_pospart: b.cum_pospart,
            y_probe,
            repr_relerr,
            farfield_dev: b.farfield_dev,
        }
    }

    pub fn values(&self) -> [f64; Self::COLUMNS] {
        [
            self.t,
            self.energy,
            self.dissipation,
            self.cum_dissipation,
            self.vmin,
            self.vmax,
            self.thmin,
            self.thmax,
            self.n2_vm1,
            self.n2_u,
            self.n2_thm1,
            self.ninf_vm1,
            self.ninf_u,
            self.ninf_thm1,
            self.g2_vx,
            self.g2_ux,
            self.g2_thx,
            self.pospart,
            self.cum_ux2,
            self.cum_pospart,
            self.y_probe,
            self.repr_relerr,
            self.farfield_dev,
        ]
    }

    pub fn from_values(x: [f64; Self::COLUMNS]) -> Self {
        SeriesRow {
            t: x[0],
            energy: x[1],
            dissipation: x[2],
            cum_dissipation: x[3],
            vmin: x[4],
            vmax: x[5],
            thmin: x[6],
            thmax: x[7],
            n2_vm1: x[8],
            n2_u: x[9],
            n2_thm1: x[10],
            ninf_vm1: x[11],
            ninf_u: x[12],
            ninf_thm1: x[13],
            g2_vx: x[14],
            g2_ux: x[15],
            g2_thx: x[16],
            pospart: x[17],
            cum_ux2: x[18],
            cum_pospart: x[19],
            y_probe: x[20],
            repr_relerr: x[21],
            farfield_dev: x[22],
        }
    }

    pub fn gradient_norm(&self) -> f64 {
        (self.g2_vx * self.g2_vx + self.g2_ux * self.g2_ux + self.g2_thx * self.g2_thx).sqrt()
    }
}
