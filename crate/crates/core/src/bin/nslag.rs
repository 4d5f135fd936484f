use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nslag_core::harness::{
    acceptance_suite, mms_convergence, run_simulation, sweep, AcceptanceOptions, RunConfig,
    RunReport, SuiteLimits, Thresholds, DEFAULT_BETAS,
};
use nslag_core::Error;

#[derive(Parser)]
#[command(
    name = "nslag",
    version,
    about = "Lagrangian compressible Navier-Stokes simulator and diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and report its property verdicts.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the configuration once per conductivity exponent.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_BETAS.to_vec())]
        beta: Vec<f64>,
        /// Aggregate JSON report.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Convergence study against the manufactured solution.
    Mms {
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = 100)]
        cells: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Validate a configuration without running it.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
    /// Execute the acceptance criteria.
    Accept {
        /// Criterion ids to run; all when omitted.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<String>>,
        #[arg(long, default_value = "acceptance.json")]
        output: PathBuf,
    },
}

enum Outcome {
    Pass,
    Fail,
}

fn print_report(tag: &str, r: &RunReport) {
    println!(
        "{tag}: {} ({} steps, {} retries, {:.2} s)",
        if r.passed { "pass" } else { "FAIL" },
        r.steps,
        r.retries,
        r.wall_seconds
    );
    for p in &r.properties {
        println!(
            "  {:<5} {:<24} measured {:<14.6e} threshold {:.6e}",
            if p.pass { "ok" } else { "FAIL" },
            p.name,
            p.measured,
            p.threshold
        );
    }
}

fn to_json<T: serde::Serialize>(value: &T, path: &PathBuf) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Diagnostic(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::Io {
        path: path.clone(),
        source: e,
    })
}

/// Loads a configuration; an unreadable file counts as a configuration error.
fn load_config(path: &PathBuf) -> Result<RunConfig, Error> {
    nslag_core::harness::load_config(path).map_err(|e| match e {
        Error::Io { .. } => Error::Config(e.to_string()),
        other => other,
    })
}

fn execute(cmd: Command) -> Result<Outcome, Error> {
    let verdict = |ok: bool| if ok { Outcome::Pass } else { Outcome::Fail };
    match cmd {
        Command::Run { config } => {
            let cfg = load_config(&config)?;
            let report = run_simulation(&cfg)?;
            print_report(&config.display().to_string(), &report);
            Ok(verdict(report.passed))
        }
        Command::Sweep {
            config,
            beta,
            output,
        } => {
            let cfg = load_config(&config)?;
            let rep = sweep(&cfg, &beta, &Thresholds::default())?;
            for entry in &rep.runs {
                print_report(&format!("beta = {}", entry.beta), &entry.report);
            }
            if let Some(path) = output {
                to_json(&rep, &path)?;
            }
            Ok(verdict(rep.passed))
        }
        Command::Mms {
            levels,
            cells,
            output,
        } => {
            let rep = mms_convergence(levels, cells)?;
            for (name, study) in [("spatial", &rep.spatial), ("temporal", &rep.temporal)] {
                println!("{name}:");
                for l in &study.levels {
                    println!(
                        "  N = {:<6} dt = {:<10.3e} error = {:.6e}",
                        l.cells, l.dt, l.error
                    );
                }
                println!("  orders {:?}", study.orders);
            }
            if let Some(path) = output {
                to_json(&rep, &path)?;
            }
            let lim = SuiteLimits::default();
            let (slo, shi) = lim.spatial_order;
            let (tlo, thi) = lim.temporal_order;
            Ok(verdict(
                rep.spatial.orders_within(slo, shi) && rep.temporal.orders_within(tlo, thi),
            ))
        }
        Command::Check { config } => {
            let cfg = load_config(&config)?;
            let grid = cfg.build_grid()?;
            println!(
                "{}: ok (N = {}, h = {}, T = {}, {} samples)",
                config.display(),
                grid.n_cells,
                grid.h,
                cfg.t_final,
                cfg.sample_times().len()
            );
            Ok(Outcome::Pass)
        }
        Command::Accept { criteria, output } => {
            let opts = AcceptanceOptions {
                criteria,
                output: Some(output),
                ..AcceptanceOptions::default()
            };
            let rep = acceptance_suite(&opts)?;
            for w in &rep.warnings {
                println!("warning: {w}");
            }
            for (id, c) in &rep.criteria {
                println!(
                    "{} {id} ({:.2} s)",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.seconds
                );
            }
            Ok(verdict(rep.passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("nslag: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
