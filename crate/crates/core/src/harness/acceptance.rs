//! The acceptance suite: equilibrium, manufactured-solution, beta-sweep and
//! oracle criteria, aggregated into a single verdict.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::config::{Outputs, RunConfig};
use super::mms::mms_convergence;
use super::oracles;
use super::run::{property, write_json, RunReport, Thresholds};
use super::sweep::{config_for_beta, run_many, DEFAULT_BETAS};
use crate::diagnostics::{
    dissipation_functional, energy_functional, sample_bounds, unit_interval_averages,
};
use crate::domain::{build_grid, equilibrium_state, IcSpec, Params};
use crate::error::Result;
use crate::stepper::step_imex;
use crate::tridiag::solve_tridiagonal;

/// Criterion identifiers in execution order.
pub const CRITERIA: [&str; 11] = [
    "c01_equilibrium",
    "c02_mms",
    "c03_energy",
    "c04_stabilization",
    "c05_decay",
    "c06_jensen",
    "c07_representation",
    "c08_y_decay",
    "c09_plateaus",
    "c10_oracles",
    "c11_far_field",
];

/// Limits of the suite-level criteria; per-run limits live in [`Thresholds`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteLimits {
    pub equilibrium_steps: usize,
    pub equilibrium_cells: usize,
    pub equilibrium_dev: f64,
    pub equilibrium_seconds: f64,
    pub mms_levels: usize,
    pub mms_cells: usize,
    pub spatial_order: (f64, f64),
    pub temporal_order: (f64, f64),
    pub mms_seconds: f64,
    pub run_seconds: f64,
    pub equilibrium_repr_err: f64,
    pub equilibrium_slope_tol: f64,
    pub solver_tol: f64,
    pub functional_tol: f64,
}

impl Default for SuiteLimits {
    fn default() -> Self {
        SuiteLimits {
            equilibrium_steps: 10_000,
            equilibrium_cells: 500,
            equilibrium_dev: 1e-10,
            equilibrium_seconds: 5.0,
            mms_levels: 3,
            mms_cells: 100,
            spatial_order: (1.8, 2.2),
            temporal_order: (0.8, 1.2),
            mms_seconds: 60.0,
            run_seconds: 120.0,
            equilibrium_repr_err: 1e-8,
            equilibrium_slope_tol: 1e-6,
            solver_tol: 1e-10,
            functional_tol: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AcceptanceOptions {
    /// Template for the sweep runs; its beta is overridden.
    pub root: RunConfig,
    pub thresholds: Thresholds,
    pub limits: SuiteLimits,
    pub betas: Vec<f64>,
    /// Criterion ids to execute; `None` runs all of them.
    pub criteria: Option<Vec<String>>,
    pub output: Option<PathBuf>,
}

impl Default for AcceptanceOptions {
    fn default() -> Self {
        AcceptanceOptions {
            root: RunConfig {
                outputs: Outputs::none(),
                ..RunConfig::default()
            },
            thresholds: Thresholds::default(),
            limits: SuiteLimits::default(),
            betas: DEFAULT_BETAS.to_vec(),
            criteria: None,
            output: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub pass: bool,
    pub measured: Value,
    pub threshold: Value,
    pub seconds: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceReport {
    pub passed: bool,
    pub criteria: BTreeMap<String, CriterionResult>,
    pub warnings: Vec<String>,
}

impl AcceptanceReport {
    pub fn failed(&self) -> Vec<&str> {
        self.criteria
            .iter()
            .filter(|(_, c)| !c.pass)
            .map(|(k, _)| k.as_str())
            .collect()
    }
}

struct SweepOutcome {
    betas: Vec<f64>,
    reports: Vec<RunReport>,
    seconds: f64,
}

impl SweepOutcome {
    fn per_beta<F: Fn(&RunReport) -> f64>(&self, f: F) -> Value {
        let map: serde_json::Map<String, Value> = self
            .betas
            .iter()
            .zip(&self.reports)
            .map(|(b, r)| (format!("beta={b}"), json!(f(r))))
            .collect();
        Value::Object(map)
    }

    fn all_pass(&self, names: &[&str]) -> bool {
        self.reports.iter().all(|r| {
            names
                .iter()
                .all(|n| r.property(n).map(|p| p.pass).unwrap_or(false))
        })
    }

    fn measured(&self, name: &str) -> Value {
        self.per_beta(|r| r.property(name).map(|p| p.measured).unwrap_or(f64::NAN))
    }

    fn thresholds(&self, name: &str) -> Value {
        self.per_beta(|r| r.property(name).map(|p| p.threshold).unwrap_or(f64::NAN))
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn equilibrium_criterion(lim: &SuiteLimits) -> Result<CriterionResult> {
    let (dev, seconds) = timed(|| -> Result<f64> {
        let grid = build_grid(lim.equilibrium_cells as f64 / 10.0, lim.equilibrium_cells)?;
        let params = Params::default();
        let start = equilibrium_state(&grid);
        let dt = 0.4 * grid.h / params.gamma().sqrt();
        let mut s = start.clone();
        for _ in 0..lim.equilibrium_steps {
            s = step_imex(&s, dt, &grid, &params, None)?;
        }
        Ok(s.max_deviation(&start))
    });
    let dev = dev?;
    Ok(CriterionResult {
        pass: dev <= lim.equilibrium_dev && seconds < lim.equilibrium_seconds,
        measured: json!({ "max_deviation": dev }),
        threshold: json!({ "max_deviation": lim.equilibrium_dev, "seconds": lim.equilibrium_seconds }),
        seconds,
        detail: format!(
            "{} steps on {} cells",
            lim.equilibrium_steps, lim.equilibrium_cells
        ),
    })
}

fn mms_criterion(lim: &SuiteLimits) -> Result<CriterionResult> {
    let (rep, seconds) = timed(|| mms_convergence(lim.mms_levels, lim.mms_cells));
    let rep = rep?;
    let (slo, shi) = lim.spatial_order;
    let (tlo, thi) = lim.temporal_order;
    let pass = rep.spatial.orders_within(slo, shi)
        && rep.temporal.orders_within(tlo, thi)
        && seconds < lim.mms_seconds;
    Ok(CriterionResult {
        pass,
        measured: json!({
            "spatial_orders": rep.spatial.orders,
            "temporal_orders": rep.temporal.orders,
            "spatial_errors": rep.spatial.levels.iter().map(|l| l.error).collect::<Vec<_>>(),
            "temporal_errors": rep.temporal.levels.iter().map(|l| l.error).collect::<Vec<_>>(),
        }),
        threshold: json!({
            "spatial_order": [slo, shi],
            "temporal_order": [tlo, thi],
            "seconds": lim.mms_seconds,
        }),
        seconds,
        detail: format!(
            "spatial N = {:?}, temporal N = {}",
            rep.spatial
                .levels
                .iter()
                .map(|l| l.cells)
                .collect::<Vec<_>>(),
            rep.temporal.levels.first().map(|l| l.cells).unwrap_or(0)
        ),
    })
}

fn oracle_criterion(lim: &SuiteLimits) -> Result<CriterionResult> {
    let (out, seconds) = timed(|| -> Result<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
        let mut solver_gap: f64 = 0.0;
        for _ in 0..20 {
            let sys = oracles::random_dominant_system(&mut rng, 50);
            let x = solve_tridiagonal(&sys)?;
            let y = oracles::dense_solve(&sys);
            for (a, b) in x.iter().zip(&y) {
                solver_gap = solver_gap.max(rel_gap(*a, *b));
            }
        }
        let mut fn_gap: f64 = 0.0;
        let grid = build_grid(8.0, 160)?;
        for beta in [0.0, 0.5, 1.0, 2.5] {
            let params = Params {
                beta,
                mu: 0.7,
                kappa: 1.3,
                r: 0.4,
                cv: 2.5,
                p_outer: 0.4,
            };
            let s = oracles::reference_state(&mut rng, &grid);
            fn_gap = fn_gap.max(rel_gap(
                energy_functional(&s, &grid, &params),
                oracles::energy(&s, &grid, &params),
            ));
            fn_gap = fn_gap.max(rel_gap(
                dissipation_functional(&s, &grid, &params),
                oracles::dissipation(&s, &grid, &params),
            ));
            let b = sample_bounds(&s, &grid, None);
            let norms = [b.n2_vm1, b.n2_u, b.n2_thm1, b.g2_vx, b.g2_ux, b.g2_thx];
            for (a, o) in norms.iter().zip(oracles::l2_norms(&s, &grid)) {
                fn_gap = fn_gap.max(rel_gap(*a, o));
            }
            let avg = unit_interval_averages(&s, &grid)?;
            for ((v, th), (ov, oth)) in avg.iter().zip(oracles::unit_averages(&s, &grid)) {
                fn_gap = fn_gap.max(rel_gap(*v, ov)).max(rel_gap(*th, oth));
            }
        }
        Ok((solver_gap, fn_gap))
    });
    let (solver_gap, fn_gap) = out?;
    Ok(CriterionResult {
        pass: solver_gap <= lim.solver_tol && fn_gap <= lim.functional_tol,
        measured: json!({ "tridiagonal": solver_gap, "functionals": fn_gap }),
        threshold: json!({ "tridiagonal": lim.solver_tol, "functionals": lim.functional_tol }),
        seconds,
        detail: "20 random 50x50 systems; energy, dissipation, norms and unit averages on 4 frozen states".into(),
    })
}

fn from_sweep(sw: &SweepOutcome, names: &[&str], detail: &str) -> CriterionResult {
    let measured: serde_json::Map<String, Value> = names
        .iter()
        .map(|n| (n.to_string(), sw.measured(n)))
        .collect();
    let threshold: serde_json::Map<String, Value> = names
        .iter()
        .map(|n| (n.to_string(), sw.thresholds(n)))
        .collect();
    CriterionResult {
        pass: sw.all_pass(names),
        measured: Value::Object(measured),
        threshold: Value::Object(threshold),
        seconds: sw.seconds,
        detail: detail.into(),
    }
}

fn equilibrium_run_config(root: &RunConfig) -> RunConfig {
    RunConfig {
        ic: IcSpec::equilibrium(),
        outputs: Outputs::none(),
        params: Params {
            beta: 1.0,
            ..root.params
        },
        ..root.clone()
    }
}

pub fn acceptance_suite(opts: &AcceptanceOptions) -> Result<AcceptanceReport> {
    let mut warnings = Vec::new();
    let selected: Vec<&str> = match &opts.criteria {
        None => CRITERIA.to_vec(),
        Some(list) => {
            for c in list {
                if !CRITERIA.contains(&c.as_str()) {
                    warnings.push(format!("unknown criterion '{c}' ignored"));
                }
            }
            CRITERIA
                .iter()
                .copied()
                .filter(|c| list.iter().any(|l| l == c))
                .collect()
        }
    };
    if selected.is_empty() {
        warnings.push("no criteria selected; vacuous pass".into());
    }
    let wants = |ids: &[&str]| ids.iter().any(|id| selected.contains(id));
    let lim = &opts.limits;
    let th = &opts.thresholds;

    let sweep_ids = [
        "c03_energy",
        "c04_stabilization",
        "c05_decay",
        "c06_jensen",
        "c07_representation",
        "c08_y_decay",
        "c09_plateaus",
        "c11_far_field",
    ];
    let sweep = if wants(&sweep_ids) {
        let mut configs: Vec<RunConfig> = opts
            .betas
            .iter()
            .map(|&b| config_for_beta(&opts.root, b))
            .collect();
        let eq = wants(&["c07_representation", "c08_y_decay"])
            .then(|| equilibrium_run_config(&opts.root));
        configs.extend(eq.clone());
        let (reports, seconds) = timed(|| run_many(&configs, th));
        let mut reports = reports?;
        let eq_report = eq.map(|_| reports.pop().expect("equilibrium report"));
        Some((
            SweepOutcome {
                betas: opts.betas.clone(),
                reports,
                seconds,
            },
            eq_report,
        ))
    } else {
        None
    };

    let mut criteria = BTreeMap::new();
    for &id in &selected {
        let result = match id {
            "c01_equilibrium" => equilibrium_criterion(lim)?,
            "c02_mms" => mms_criterion(lim)?,
            "c10_oracles" => oracle_criterion(lim)?,
            _ => {
                let (sw, eq) = sweep.as_ref().expect("sweep executed for sweep criteria");
                sweep_criterion(id, sw, eq.as_ref(), lim)
            }
        };
        criteria.insert(id.to_string(), result);
    }
    let report = AcceptanceReport {
        passed: criteria.values().all(|c| c.pass),
        criteria,
        warnings,
    };
    if let Some(path) = &opts.output {
        write_json(&report, path)?;
    }
    Ok(report)
}

fn sweep_criterion(
    id: &str,
    sw: &SweepOutcome,
    eq: Option<&RunReport>,
    lim: &SuiteLimits,
) -> CriterionResult {
    use property::*;
    match id {
        "c03_energy" => {
            let mut c = from_sweep(sw, &[ENERGY], "max_t [E + cumV - E0] against rel*E0 + abs");
            let slow: Vec<f64> = sw.reports.iter().map(|r| r.wall_seconds).collect();
            let timely = slow.iter().all(|&s| s <= lim.run_seconds);
            c.pass &= timely;
            c.measured["wall_seconds"] = json!(slow);
            c.threshold["wall_seconds"] = json!(lim.run_seconds);
            c
        }
        "c04_stabilization" => from_sweep(
            sw,
            &[POSITIVITY, STABILIZATION],
            "positivity and extremum drift",
        ),
        "c05_decay" => from_sweep(sw, &[U_DECAY, GRADIENT_DECAY], "final over initial norms"),
        "c06_jensen" => from_sweep(
            sw,
            &[JENSEN, JENSEN_ROOTS],
            "unit averages inside the entropy band",
        ),
        "c07_representation" => {
            let mut c = from_sweep(sw, &[REPRESENTATION], "probe reconstruction error");
            if let Some(eq) = eq {
                let err = eq.extremes.repr_rel_err;
                c.pass &= err <= lim.equilibrium_repr_err;
                c.measured["equilibrium"] = json!(err);
                c.threshold["equilibrium"] = json!(lim.equilibrium_repr_err);
            }
            c
        }
        "c08_y_decay" => {
            let mut c = from_sweep(sw, &[Y_DECAY], "late-time slope of ln Y");
            if let Some(eq) = eq {
                let r = eq.config.params.r;
                let gap = (eq.decay.y_slope + r).abs();
                c.pass &= gap <= lim.equilibrium_slope_tol;
                c.measured["equilibrium_slope"] = json!(eq.decay.y_slope);
                c.threshold["equilibrium_slope"] =
                    json!({ "target": -r, "tol": lim.equilibrium_slope_tol });
            }
            c
        }
        "c09_plateaus" => from_sweep(
            sw,
            &[PLATEAU_V, PLATEAU_UX2, PLATEAU_POSPART],
            "share of each running integral gained after T/2",
        ),
        "c11_far_field" => from_sweep(sw, &[FAR_FIELD], "max deviation over the last 10% of cells"),
        other => unreachable!("not a sweep criterion: {other}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_selection_is_vacuous() {
        let opts = AcceptanceOptions {
            criteria: Some(Vec::new()),
            ..AcceptanceOptions::default()
        };
        let rep = acceptance_suite(&opts).unwrap();
        assert!(rep.passed && rep.criteria.is_empty());
        assert_eq!(rep.warnings.len(), 1);
    }

    #[test]
    fn unknown_ids_warn() {
        let opts = AcceptanceOptions {
            criteria: Some(vec!["c10_oracles".into(), "bogus".into()]),
            ..AcceptanceOptions::default()
        };
        let rep = acceptance_suite(&opts).unwrap();
        assert!(rep.criteria.contains_key("c10_oracles"));
        assert!(rep.warnings.iter().any(|w| w.contains("bogus")));
    }
}
