use std::path::PathBuf;

use nslag_core::diagnostics::SeriesRow;
use nslag_core::domain::{build_grid, make_initial_data, IcKind, IcSpec};
use nslag_core::harness::{
    acceptance_suite, config_for_beta, load_config, mms_convergence, parse_config, read_series,
    read_snapshot, run_many, run_simulation, run_simulation_with, write_config, write_series,
    write_snapshot, AcceptanceOptions, Outputs, RunConfig, Thresholds,
};
use nslag_core::Error;
use proptest::prelude::*;

fn small(ic: IcSpec, t_final: f64, dir: &std::path::Path) -> RunConfig {
    RunConfig {
        grid: nslag_core::harness::GridSpec {
            length: 20.0,
            n_cells: 400,
        },
        ic,
        t_final,
        sample_dt: t_final / 20.0,
        outputs: Outputs {
            series_path: Some(dir.join("series.csv")),
            report_path: Some(dir.join("report.json")),
            snapshot_times: vec![t_final / 2.0],
            snapshot_prefix: dir.join("snap"),
        },
        ..RunConfig::default()
    }
}

#[test]
fn minimal_file_takes_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("run.cfg");
    std::fs::write(&p, "# only the exponent\nphysics.beta = 1\n").unwrap();
    let cfg = load_config(&p).unwrap();
    let want = RunConfig {
        params: nslag_core::Params {
            beta: 1.0,
            ..RunConfig::default().params
        },
        ..RunConfig::default()
    };
    assert_eq!(cfg, want);
}

#[test]
fn bad_values_name_the_key_and_line() {
    let e = parse_config("physics.beta = 1\ngrid.cells = -5\n", "x.cfg".as_ref()).unwrap_err();
    assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
    assert!(e.to_string().contains("grid.cells"));
    assert!(e.is_config());

    let e = parse_config("physics.gamma = 1.4\n", "x.cfg".as_ref()).unwrap_err();
    assert!(e.to_string().contains("unknown key 'physics.gamma'"));

    let e = parse_config("run.t_final = 0\n", "x.cfg".as_ref()).unwrap_err();
    assert!(e.is_config());
    let e = parse_config("grid.cells = 1999\n", "x.cfg".as_ref()).unwrap_err();
    assert!(e.to_string().contains("grid.cells"), "{e}");
    assert!(parse_config("physics.beta = 1\nphysics.beta = 2\n", "x.cfg".as_ref()).is_err());
    assert!(parse_config("grid.cells 100\n", "x.cfg".as_ref()).is_err());
}

fn arb_config() -> impl Strategy<Value = RunConfig> {
    (
        (
            0.0f64..3.0,
            0.1f64..3.0,
            0.1f64..3.0,
            0.1f64..3.0,
            0.1f64..3.0,
        ),
        (8usize..60, 1usize..4),
        (
            0usize..3,
            -0.5f64..0.5,
            -0.5f64..0.5,
            -0.5f64..0.5,
            0.2f64..1.5,
        ),
        (1.0f64..200.0, 0.01f64..1.0),
        prop::option::of(1usize..3),
        any::<bool>(),
    )
        .prop_map(
            |(ph, (len, per), (kind, av, au, at, w), (tf, sdt), probe, outs)| {
                let mut cfg = RunConfig::default();
                cfg.params.beta = ph.0;
                cfg.params.mu = ph.1;
                cfg.params.kappa = ph.2;
                cfg.params.r = ph.3;
                cfg.params.p_outer = ph.3;
                cfg.params.cv = ph.4;
                cfg.grid.length = len as f64;
                cfg.grid.n_cells = len * per * 4;
                cfg.ic.kind = [IcKind::Equilibrium, IcKind::Bump, IcKind::Packet][kind];
                cfg.ic.amp_v = av;
                cfg.ic.amp_u = au;
                cfg.ic.amp_theta = at;
                cfg.ic.width = w;
                cfg.ic.center = 2.0;
                cfg.t_final = tf;
                cfg.sample_dt = sdt;
                cfg.probe_interval = probe;
                if outs {
                    cfg.outputs = Outputs::none();
                    cfg.outputs.snapshot_times = vec![0.5, tf / 3.0];
                }
                cfg
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips(cfg in arb_config()) {
        prop_assume!(cfg.validate().is_ok());
        let text = write_config(&cfg);
        let back = parse_config(&text, "<round trip>".as_ref()).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(write_config(&back), text);
    }

    #[test]
    fn series_round_trips(vals in prop::collection::vec(prop::array::uniform23(-1e6f64..1e6), 1..6), tiny in -1e-300f64..1e-300) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let mut rows: Vec<SeriesRow> = vals.into_iter().map(SeriesRow::from_values).collect();
        rows[0].energy = tiny;
        rows[0].vmin = 1.0 / 3.0;
        write_series(&rows, &p).unwrap();
        let back = read_series(&p).unwrap();
        prop_assert_eq!(back.len(), rows.len());
        for (a, b) in back.iter().zip(&rows) {
            let bits = |r: &SeriesRow| r.values().map(f64::to_bits);
            prop_assert_eq!(bits(a), bits(b));
        }
    }

    #[test]
    fn initial_data_respects_the_floor(
        kind in 0usize..3, av in -0.9f64..0.9, at in -0.9f64..0.9, au in -1.0f64..1.0,
        center in 3.0f64..6.0, width in 0.3f64..2.5, floor in 0.05f64..0.5,
    ) {
        let g = build_grid(24.0, 480).unwrap();
        let spec = IcSpec {
            kind: [IcKind::Equilibrium, IcKind::Bump, IcKind::Packet][kind],
            amp_v: av, amp_u: au, amp_theta: at, center, width, floor, ..IcSpec::default()
        };
        match make_initial_data(&g, &spec) {
            Ok(s) => {
                prop_assert!(s.v.iter().chain(&s.theta).all(|&x| x >= floor));
                prop_assert_eq!(s.u[g.n_cells], 0.0);
            }
            Err(e) => prop_assert!(1.0 - av.abs() < floor || 1.0 - at.abs() < floor || e.is_config()),
        }
    }
}

#[test]
fn equilibrium_run_passes_with_zero_norms() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(IcSpec::equilibrium(), 10.0, dir.path());
    cfg.sample_dt = 1.0;
    let rep = run_simulation(&cfg).unwrap();
    assert!(rep.passed, "{:#?}", rep.properties);
    assert!((rep.decay.y_slope + 1.0).abs() <= 1e-9);
    assert_eq!(rep.decay.energy_margin, 0.0);
    let rows = read_series(dir.path().join("series.csv")).unwrap();
    assert_eq!(rows.len(), 11);
    for r in &rows {
        assert_eq!(
            [r.n2_vm1, r.n2_u, r.n2_thm1, r.ninf_u, r.g2_vx, r.g2_ux, r.g2_thx],
            [0.0; 7]
        );
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["passed"], serde_json::Value::Bool(true));
    assert!(report["properties"]
        .as_array()
        .unwrap()
        .iter()
        .all(|p| p.get("measured").is_some() && p.get("threshold").is_some()));
}

#[test]
fn three_sample_series() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("eq.csv");
    let rows: Vec<SeriesRow> = (0..3)
        .map(|k| SeriesRow {
            t: k as f64,
            vmin: 1.0,
            vmax: 1.0,
            thmin: 1.0,
            thmax: 1.0,
            y_probe: (-(k as f64)).exp(),
            ..SeriesRow::default()
        })
        .collect();
    write_series(&rows, &p).unwrap();
    let text = std::fs::read_to_string(&p).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("t,E,V,cumV,vmin,vmax,thmin,thmax,n2_vm1,n2_u,n2_thm1,ninf_vm1,ninf_u,ninf_thm1,g2_vx,g2_ux,g2_thx,pospart,cum_ux2,cum_pospart,Y_probe,repr_relerr,farfield_dev\n"));
    assert_eq!(read_series(&p).unwrap(), rows);
}

#[test]
fn bump_run_writes_outputs_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(
        IcSpec {
            center: 5.0,
            width: 2.0,
            ..IcSpec::default()
        },
        4.0,
        dir.path(),
    );
    let rep = run_simulation(&cfg).unwrap();
    assert!(rep.steps > 0);
    assert!(rep.property("positivity").unwrap().pass);
    assert!(rep.property("energy_inequality").unwrap().pass);
    let snap = read_snapshot(dir.path().join("snap_t2.txt")).unwrap();
    assert_eq!(snap.t, 2.0);
    assert_eq!(
        (snap.v.len(), snap.u.len(), snap.theta.len()),
        (400, 401, 400)
    );
    let rows = read_series(dir.path().join("series.csv")).unwrap();
    assert_eq!(rows.len(), 21);
    assert_eq!(rows.last().unwrap().t, 4.0);
    assert!(rows
        .windows(2)
        .all(|w| w[1].cum_dissipation >= w[0].cum_dissipation));
}

#[test]
fn snapshot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = build_grid(10.0, 40).unwrap();
    let mut s = make_initial_data(
        &g,
        &IcSpec {
            center: 3.0,
            width: 1.0,
            ..IcSpec::default()
        },
    )
    .unwrap();
    s.t = 1.0 / 7.0;
    let p = dir.path().join("nested/s.txt");
    write_snapshot(&s, &g, &p).unwrap();
    assert_eq!(read_snapshot(&p).unwrap(), s);
}

#[test]
fn zero_final_time_is_rejected() {
    let cfg = RunConfig {
        t_final: 0.0,
        outputs: Outputs::none(),
        ..RunConfig::default()
    };
    assert!(run_simulation(&cfg).unwrap_err().is_config());
}

#[test]
fn sweep_is_order_independent() {
    let dir = tempfile::tempdir().unwrap();
    let mut base = small(
        IcSpec {
            center: 5.0,
            width: 2.0,
            ..IcSpec::default()
        },
        3.0,
        dir.path(),
    );
    base.outputs = Outputs::none();
    let betas = [0.5, 2.5, 1.0];
    let fwd: Vec<RunConfig> = betas.iter().map(|&b| config_for_beta(&base, b)).collect();
    let rev: Vec<RunConfig> = fwd.iter().rev().cloned().collect();
    let a = run_many(&fwd, &Thresholds::default()).unwrap();
    let mut b = run_many(&rev, &Thresholds::default()).unwrap();
    b.reverse();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.properties, y.properties);
        assert_eq!(x.decay, y.decay);
        assert_eq!(x.steps, y.steps);
    }
    let serial = run_simulation_with(&fwd[1], &Thresholds::default()).unwrap();
    assert_eq!(serial.decay, a[1].decay);
}

#[test]
fn mms_study_converges_at_the_design_orders() {
    let rep = mms_convergence(3, 100).unwrap();
    for r in rep.spatial.ratios() {
        assert!((3.5..=4.5).contains(&r), "spatial ratio {r}");
    }
    assert_eq!(rep.temporal.levels[0].cells, 800);
    let dts: Vec<f64> = rep.temporal.levels.iter().map(|l| l.dt).collect();
    assert_eq!(dts, vec![4e-3, 2e-3, 1e-3]);
    for r in rep.temporal.ratios() {
        assert!((1.8..=2.2).contains(&r), "temporal ratio {r}");
    }
    assert!(matches!(mms_convergence(2, 100), Err(Error::Config(_))));
}

#[test]
fn zeroed_thresholds_fail_the_energy_criterion() {
    let dir = tempfile::tempdir().unwrap();
    let mut root = small(
        IcSpec {
            center: 5.0,
            width: 2.0,
            ..IcSpec::default()
        },
        10.0,
        dir.path(),
    );
    root.outputs = Outputs::none();
    let out: PathBuf = dir.path().join("acc.json");
    let opts = AcceptanceOptions {
        root,
        thresholds: Thresholds {
            energy_rel: 0.0,
            energy_abs: 0.0,
            ..Thresholds::default()
        },
        betas: vec![1.0],
        criteria: Some(vec!["c03_energy".into()]),
        output: Some(out.clone()),
        ..AcceptanceOptions::default()
    };
    let rep = acceptance_suite(&opts).unwrap();
    assert!(!rep.passed);
    assert_eq!(rep.failed(), vec!["c03_energy"]);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    let c = &json["criteria"]["c03_energy"];
    assert_eq!(c["pass"], serde_json::Value::Bool(false));
    assert!(c["measured"].is_object() && c["threshold"].is_object() && c["seconds"].is_number());
}

#[test]
fn empty_criterion_list_passes_vacuously() {
    let rep = acceptance_suite(&AcceptanceOptions {
        criteria: Some(Vec::new()),
        ..AcceptanceOptions::default()
    })
    .unwrap();
    assert!(rep.passed && rep.criteria.is_empty() && !rep.warnings.is_empty());
}
