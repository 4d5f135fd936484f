use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::series::{write_snapshot, SeriesWriter};
use crate::diagnostics::{
    decay_report, entropy_roots, sample_bounds, unit_interval_averages, BalanceRecord,
    BoundsRecord, DecayReport, EnergyRecord, JensenBand, ReprProbe, SeriesRow,
};
use crate::domain::{make_initial_data, Grid, Params, State};
use crate::error::{Error, Result, StepError};
use crate::stepper::{advance, AdvanceStats, StepObserver};

/// Pass/fail thresholds for the per-run properties.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `max_t [E + cumV - E0] <= energy_rel * E0 + energy_abs`.
    pub energy_rel: f64,
    pub energy_abs: f64,
    pub extremum_drift: f64,
    pub u_inf_ratio: f64,
    pub gradient_ratio: f64,
    pub jensen_slack: f64,
    pub root_residual: f64,
    pub repr_rel_err: f64,
    pub plateau_fraction: f64,
    pub farfield_dev: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            energy_rel: 0.02,
            energy_abs: 1e-6,
            extremum_drift: 0.05,
            u_inf_ratio: 0.1,
            gradient_ratio: 0.2,
            jensen_slack: 0.05,
            root_residual: 1e-12,
            repr_rel_err: 0.05,
            plateau_fraction: 0.2,
            farfield_dev: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyVerdict {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl PropertyVerdict {
    fn at_most(name: &str, measured: f64, threshold: f64, detail: impl Into<String>) -> Self {
        PropertyVerdict {
            name: name.into(),
            pass: measured <= threshold,
            measured,
            threshold,
            detail: detail.into(),
        }
    }
}

/// Observables accumulated over the whole trajectory, not only at samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunExtremes {
    pub vmin: f64,
    pub thmin: f64,
    pub farfield_dev: f64,
    pub repr_rel_err: f64,
    pub jensen_min: f64,
    pub jensen_max: f64,
    /// Largest `|E_tot(t) - E_tot(0) - heat inflow|` over all steps.
    pub total_energy_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub passed: bool,
    pub properties: Vec<PropertyVerdict>,
    pub band: JensenBand,
    pub extremes: RunExtremes,
    pub decay: DecayReport,
    pub steps: u64,
    pub retries: u64,
    pub wall_seconds: f64,
}

impl RunReport {
    pub fn property(&self, name: &str) -> Option<&PropertyVerdict> {
        self.properties.iter().find(|p| p.name == name)
    }
}

struct Tracker {
    grid: Grid,
    params: Params,
    probe: ReprProbe,
    energy: EnergyRecord,
    bounds: BoundsRecord,
    balance: BalanceRecord,
    balance_residual: f64,
    vmin: f64,
    thmin: f64,
    farfield_dev: f64,
}

impl StepObserver for Tracker {
    fn on_step(&mut self, prev: &State, next: &State, dt: f64) {
        self.probe.update(next, prev, dt, &self.grid, &self.params);
        self.energy = self.energy.next(next, &self.grid, &self.params);
        self.balance = self.balance.next(next, &self.grid, &self.params);
        self.balance_residual = self.balance_residual.max(self.balance.residual().abs());
        self.bounds = sample_bounds(next, &self.grid, Some(&self.bounds));
        self.vmin = self.vmin.min(self.bounds.vmin);
        self.thmin = self.thmin.min(self.bounds.thmin);
        self.farfield_dev = self.farfield_dev.max(self.bounds.farfield_dev);
    }
}

/// A trajectory together with its running diagnostics.
///
/// Running integrals are advanced after every step; rows of the time series
/// are taken at the configured sample times.
pub struct Simulation {
    config: RunConfig,
    grid: Grid,
    state: State,
    tracker: Tracker,
    band: JensenBand,
    samples: Vec<SeriesRow>,
    stops: Vec<(f64, bool, bool)>,
    next_stop: usize,
    stats: AdvanceStats,
    repr_rel_err: f64,
    jensen_min: f64,
    jensen_max: f64,
    writer: Option<SeriesWriter>,
}

impl Simulation {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let grid = config.build_grid()?;
        let params = config.params;
        let state = make_initial_data(&grid, &config.ic)?;
        let probe = ReprProbe::new(&state, &grid, &params, config.probe_interval(&grid))?;
        let energy = EnergyRecord::initial(&state, &grid, &params);
        let bounds = sample_bounds(&state, &grid, None);
        let band = entropy_roots(energy.energy)?;

        // (time, is_sample, is_snapshot), merged and sorted
        let mut stops: Vec<(f64, bool, bool)> = config
            .sample_times()
            .into_iter()
            .map(|t| (t, true, false))
            .collect();
        for &t in &config.outputs.snapshot_times {
            match stops.iter_mut().find(|s| s.0 == t) {
                Some(s) => s.2 = true,
                None => stops.push((t, false, true)),
            }
        }
        stops.sort_by(|a, b| a.0.total_cmp(&b.0));

        let writer = config
            .outputs
            .series_path
            .as_ref()
            .map(SeriesWriter::create)
            .transpose()?;

        let mut sim = Simulation {
            tracker: Tracker {
                grid,
                params,
                probe,
                energy,
                balance: BalanceRecord::initial(&state, &grid, &params),
                balance_residual: 0.0,
                vmin: bounds.vmin,
                thmin: bounds.thmin,
                farfield_dev: bounds.farfield_dev,
                bounds,
            },
            config,
            grid,
            state,
            band,
            samples: Vec::new(),
            stops,
            next_stop: 0,
            stats: AdvanceStats::default(),
            repr_rel_err: 0.0,
            jensen_min: f64::INFINITY,
            jensen_max: f64::NEG_INFINITY,
            writer,
        };
        sim.visit_stops()?;
        Ok(sim)
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn samples(&self) -> &[SeriesRow] {
        &self.samples
    }

    pub fn energy(&self) -> &EnergyRecord {
        &self.tracker.energy
    }

    pub fn balance(&self) -> &BalanceRecord {
        &self.tracker.balance
    }

    pub fn bounds(&self) -> &BoundsRecord {
        &self.tracker.bounds
    }

    pub fn probe(&self) -> &ReprProbe {
        &self.tracker.probe
    }

    pub fn band(&self) -> &JensenBand {
        &self.band
    }

    pub fn stats(&self) -> AdvanceStats {
        self.stats
    }

    pub fn is_finished(&self) -> bool {
        self.state.t >= self.config.t_final
    }

    fn take_sample(&mut self) -> Result<()> {
        let rec = self
            .tracker
            .probe
            .reconstruct_v(&self.state, &self.tracker.params);
        self.repr_rel_err = self.repr_rel_err.max(rec.max_rel_err);
        for (v, th) in unit_interval_averages(&self.state, &self.grid)? {
            self.jensen_min = self.jensen_min.min(v.min(th));
            self.jensen_max = self.jensen_max.max(v.max(th));
        }
        let row = SeriesRow::new(
            &self.tracker.energy,
            &self.tracker.bounds,
            self.tracker.probe.y(),
            rec.max_rel_err,
        );
        if let Some(w) = self.writer.as_mut() {
            w.append(&row)?;
        }
        self.samples.push(row);
        Ok(())
    }

    fn snapshot_path(&self, tag: &str) -> PathBuf {
        let prefix = self.config.outputs.snapshot_prefix.display().to_string();
        PathBuf::from(format!("{prefix}_{tag}.txt"))
    }

    /// Handles every stop at or before the current time.
    fn visit_stops(&mut self) -> Result<()> {
        while let Some(&(t, sample, snap)) = self.stops.get(self.next_stop) {
            if t > self.state.t {
                break;
            }
            if sample {
                self.take_sample()?;
            }
            if snap {
                let path = self.snapshot_path(&format!("t{t}"));
                write_snapshot(&self.state, &self.grid, path)?;
            }
            self.next_stop += 1;
        }
        Ok(())
    }

    /// Advances to `min(t, t_final)`, sampling on the way.
    pub fn advance_to(&mut self, t: f64) -> Result<()> {
        let target = t.min(self.config.t_final);
        while self.state.t < target {
            let stop = self
                .stops
                .get(self.next_stop)
                .map(|s| s.0)
                .unwrap_or(self.config.t_final)
                .min(target);
            let state = std::mem::replace(
                &mut self.state,
                State {
                    t: 0.0,
                    v: Vec::new(),
                    theta: Vec::new(),
                    u: Vec::new(),
                },
            );
            let keep = state.clone();
            let params = self.tracker.params;
            match advance(
                state,
                stop,
                &self.grid,
                &params,
                &self.config.ctl,
                &mut self.tracker,
            ) {
                Ok((next, stats)) => {
                    self.state = next;
                    self.stats += stats;
                }
                Err(e) => {
                    self.state = match &e {
                        StepError::Underflow { snapshot, .. } => (**snapshot).clone(),
                        _ => keep,
                    };
                    return Err(self.fail(e));
                }
            }
            self.visit_stops()?;
        }
        Ok(())
    }

    fn fail(&self, e: StepError) -> Error {
        let path = self.snapshot_path("failure");
        match write_snapshot(&self.state, &self.grid, &path) {
            Ok(()) => Error::RunFailed {
                source: e,
                snapshot: path,
            },
            Err(_) => Error::Step(e),
        }
    }

    pub fn run_to_end(&mut self) -> Result<()> {
        self.advance_to(self.config.t_final)
    }

    pub fn extremes(&self) -> RunExtremes {
        RunExtremes {
            vmin: self.tracker.vmin,
            thmin: self.tracker.thmin,
            farfield_dev: self.tracker.farfield_dev,
            repr_rel_err: self.repr_rel_err,
            jensen_min: self.jensen_min,
            jensen_max: self.jensen_max,
            total_energy_residual: self.tracker.balance_residual,
        }
    }

    pub fn report(&self, thresholds: &Thresholds, wall_seconds: f64) -> Result<RunReport> {
        let decay = decay_report(&self.samples)?;
        let ex = self.extremes();
        let properties = evaluate(&decay, &self.band, &ex, thresholds);
        Ok(RunReport {
            config: self.config.clone(),
            passed: properties.iter().all(|p| p.pass),
            properties,
            band: self.band,
            extremes: ex,
            decay,
            steps: self.stats.steps,
            retries: self.stats.retries,
            wall_seconds,
        })
    }
}

/// Property names used in [`RunReport::properties`].
pub mod property {
    pub const ENERGY: &str = "energy_inequality";
    pub const POSITIVITY: &str = "positivity";
    pub const STABILIZATION: &str = "extremum_stabilization";
    pub const U_DECAY: &str = "u_sup_decay";
    pub const GRADIENT_DECAY: &str = "gradient_decay";
    pub const JENSEN: &str = "jensen_band";
    pub const JENSEN_ROOTS: &str = "jensen_roots";
    pub const REPRESENTATION: &str = "representation";
    pub const Y_DECAY: &str = "y_decay";
    pub const PLATEAU_V: &str = "plateau_cumV";
    pub const PLATEAU_UX2: &str = "plateau_cum_ux2";
    pub const PLATEAU_POSPART: &str = "plateau_cum_pospart";
    pub const FAR_FIELD: &str = "far_field";
}

fn evaluate(
    d: &DecayReport,
    band: &JensenBand,
    ex: &RunExtremes,
    th: &Thresholds,
) -> Vec<PropertyVerdict> {
    use property::*;
    let ratio = |name: &str| d.ratio(name).map(|r| r.ratio.value()).unwrap_or(f64::NAN);
    let jensen_excess = (band.alpha1 - ex.jensen_min).max(ex.jensen_max - band.alpha2);
    vec![
        PropertyVerdict::at_most(
            ENERGY,
            d.energy_margin,
            th.energy_rel * d.e0 + th.energy_abs,
            format!("E0 = {:e}", d.e0),
        ),
        PropertyVerdict {
            name: POSITIVITY.into(),
            pass: ex.vmin > 0.0 && ex.thmin > 0.0,
            measured: ex.vmin.min(ex.thmin),
            threshold: 0.0,
            detail: format!("min v = {:e}, min theta = {:e}", ex.vmin, ex.thmin),
        },
        PropertyVerdict::at_most(
            STABILIZATION,
            d.max_extremum_drift(),
            th.extremum_drift,
            "relative change of field extrema, [T/4,T/2] vs [T/2,T]",
        ),
        PropertyVerdict::at_most(
            U_DECAY,
            ratio("ninf_u"),
            th.u_inf_ratio,
            "||u(T)||_inf / ||u0||_inf",
        ),
        PropertyVerdict::at_most(
            GRADIENT_DECAY,
            ratio("g2_grad"),
            th.gradient_ratio,
            "||(v_x,u_x,theta_x)(T)||_2 / initial",
        ),
        PropertyVerdict::at_most(
            JENSEN,
            jensen_excess,
            th.jensen_slack,
            format!(
                "averages in [{:.6}, {:.6}], band [{:.6}, {:.6}]",
                ex.jensen_min, ex.jensen_max, band.alpha1, band.alpha2
            ),
        ),
        PropertyVerdict::at_most(
            JENSEN_ROOTS,
            band.max_residual(),
            th.root_residual,
            "|y - ln y - 1 - E0| at both roots",
        ),
        PropertyVerdict::at_most(
            REPRESENTATION,
            ex.repr_rel_err,
            th.repr_rel_err,
            "max relative error of the reconstructed v",
        ),
        PropertyVerdict {
            name: Y_DECAY.into(),
            pass: d.y_slope < 0.0,
            measured: d.y_slope,
            threshold: 0.0,
            detail: "slope of ln Y on [T/2, T] must be negative".into(),
        },
        PropertyVerdict::at_most(
            PLATEAU_V,
            d.plateau_cum_v.value(),
            th.plateau_fraction,
            "share of cumV after T/2",
        ),
        PropertyVerdict::at_most(
            PLATEAU_UX2,
            d.plateau_cum_ux2.value(),
            th.plateau_fraction,
            "share of cum_ux2 after T/2",
        ),
        PropertyVerdict::at_most(
            PLATEAU_POSPART,
            d.plateau_cum_pospart.value(),
            th.plateau_fraction,
            "share of cum_pospart after T/2",
        ),
        PropertyVerdict::at_most(
            FAR_FIELD,
            ex.farfield_dev,
            th.farfield_dev,
            "max deviation over the last 10% of cells",
        ),
    ]
}

/// Runs a configuration to completion and writes its declared outputs.
pub fn run_simulation(cfg: &RunConfig) -> Result<RunReport> {
    run_simulation_with(cfg, &Thresholds::default())
}

pub fn run_simulation_with(cfg: &RunConfig, thresholds: &Thresholds) -> Result<RunReport> {
    let start = Instant::now();
    let mut sim = Simulation::new(cfg.clone())?;
    sim.run_to_end()?;
    let report = sim.report(thresholds, start.elapsed().as_secs_f64())?;
    if let Some(path) = &cfg.outputs.report_path {
        write_json(&report, path)?;
    }
    Ok(report)
}

pub(crate) fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Diagnostic(format!("cannot serialize report: {e}")))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}
