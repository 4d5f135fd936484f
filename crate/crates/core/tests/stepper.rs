use nslag_core::domain::{
    build_grid, equilibrium_state, make_initial_data, validate_state, IcSpec, Params,
};
use nslag_core::error::StepError;
use nslag_core::stepper::{advance, stable_dt, step_imex, temperature_substep, StepControl};

#[test]
fn equilibrium_survives_ten_thousand_steps() {
    let g = build_grid(50.0, 500).unwrap();
    for p in [
        Params::default(),
        Params::new(0.5, 2.0, 2.5, 2.0, 0.7).unwrap(),
    ] {
        let start = equilibrium_state(&g);
        let dt = stable_dt(&start, &g, &p, &StepControl::default());
        let mut s = start.clone();
        for _ in 0..10_000 {
            s = step_imex(&s, dt, &g, &p, None).unwrap();
        }
        assert!(s.max_deviation(&start) <= 1e-10);
    }
}

#[test]
fn equilibrium_advance_reaches_target() {
    let g = build_grid(10.0, 200).unwrap();
    let p = Params::default();
    let (s, stats) = advance(
        equilibrium_state(&g),
        10.0,
        &g,
        &p,
        &StepControl::default(),
        &mut (),
    )
    .unwrap();
    assert_eq!(s.t, 10.0);
    assert!(stats.steps > 0 && stats.retries == 0);
    let mut want = equilibrium_state(&g);
    want.t = 10.0;
    assert!(s.max_deviation(&want) <= 1e-10);
}

#[test]
fn conduction_obeys_maximum_principle() {
    let g = build_grid(8.0, 160).unwrap();
    let p = Params::new(1.0, 1.5, 0.0, 1.0, 1.0).unwrap();
    let v = vec![1.0; g.n_cells];
    let u = vec![0.0; g.n_cells + 1];
    let mut theta: Vec<f64> = (0..g.n_cells)
        .map(|j| {
            let x = g.cell_x(j);
            1.0 + 0.8 * (1.3 * x).sin() * (-(x - 3.0) * (x - 3.0) / 4.0).exp()
        })
        .collect();
    for dt in [1e-3, 0.05, 1.0, 20.0] {
        for _ in 0..20 {
            let hi = theta.iter().cloned().fold(1.0f64, f64::max);
            let lo = theta.iter().cloned().fold(1.0f64, f64::min);
            let next = temperature_substep(&theta, &v, &u, dt, 0.0, &g, &p, None).unwrap();
            for &th in &next {
                assert!(
                    th <= hi + 1e-13 && th >= lo - 1e-13,
                    "dt = {dt}: {th} outside [{lo}, {hi}]"
                );
            }
            theta = next;
        }
    }
}

#[test]
fn bump_run_completes_positive() {
    let g = build_grid(50.0, 2000).unwrap();
    let p = Params::default();
    let s0 = make_initial_data(&g, &IcSpec::default()).unwrap();
    let (s, stats) = advance(s0, 20.0, &g, &p, &StepControl::default(), &mut ()).unwrap();
    assert_eq!(s.t, 20.0);
    assert!(validate_state(&s, &p).is_ok());
    assert!(stats.steps > 100);
}

#[test]
fn trajectories_are_deterministic() {
    let g = build_grid(20.0, 400).unwrap();
    let p = Params::new(1.0, 1.0, 2.5, 1.0, 1.0).unwrap();
    let run = || {
        let s0 = make_initial_data(&g, &IcSpec::default()).unwrap();
        advance(s0, 5.0, &g, &p, &StepControl::default(), &mut ())
            .unwrap()
            .0
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    let bits = |x: &[f64]| x.iter().map(|y| y.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.v), bits(&b.v));
    assert_eq!(bits(&a.theta), bits(&b.theta));
}

#[test]
fn observer_sees_every_step_and_mass_telescopes() {
    let g = build_grid(20.0, 400).unwrap();
    let p = Params::default();
    let s0 = make_initial_data(&g, &IcSpec::default()).unwrap();
    let mut count = 0u64;
    let mut worst: f64 = 0.0;
    let mut obs = |prev: &nslag_core::State, next: &nslag_core::State, dt: f64| {
        count += 1;
        let dm: f64 = next.v.iter().zip(&prev.v).map(|(a, b)| g.h * (a - b)).sum();
        worst = worst.max((dm + dt * prev.u[0]).abs());
    };
    let (_, stats) = advance(s0, 2.0, &g, &p, &StepControl::default(), &mut obs).unwrap();
    assert_eq!(count, stats.steps);
    assert!(worst <= 1e-13, "{worst}");
}

#[test]
fn unrecoverable_collapse_reports_underflow_with_snapshot() {
    let g = build_grid(8.0, 160).unwrap();
    let p = Params::default();
    let mut s = equilibrium_state(&g);
    // a violent converging flow that no positive step can follow
    for (i, u) in s.u.iter_mut().enumerate().take(g.n_cells) {
        *u = if g.face_x(i) < 4.0 { 400.0 } else { -400.0 };
    }
    let ctl = StepControl {
        positivity_floor: 0.9,
        max_retries: 3,
        ..StepControl::default()
    };
    match advance(s.clone(), 1.0, &g, &p, &ctl, &mut ()) {
        Err(StepError::Underflow { snapshot, .. }) => assert_eq!(*snapshot, s),
        other => panic!("expected underflow, got {other:?}"),
    }
}
