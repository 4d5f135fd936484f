// reference values are quoted at the precision they were computed to
#![allow(clippy::excessive_precision)]

use nslag_core::domain::{build_grid, equilibrium_state, Params};
use nslag_core::model::{face_heat_flux, mms_source, rhs, Manufactured};
use proptest::prelude::*;

/// Max interior residual `rhs(exact) - d/dt exact` over all three fields.
fn mms_residual(cells: usize, params: &Params) -> f64 {
    let grid = build_grid(1.0, cells).unwrap();
    let m = Manufactured::new(1.0);
    let t = 0.2;
    let s = m.state(&grid, t);
    let r = rhs(&s, &grid, params, Some(&m));
    let mut worst: f64 = 0.0;
    for j in 1..cells - 1 {
        let e = m.exact(grid.cell_x(j), t);
        worst = worst
            .max((r.dv[j] - e.v_t).abs())
            .max((r.dtheta[j] - e.theta_t).abs());
    }
    for i in 1..cells {
        let e = m.exact(grid.face_x(i), t);
        worst = worst.max((r.du[i] - e.u_t).abs());
    }
    worst
}

#[test]
fn mms_residual_is_second_order() {
    for params in [
        Params::default(),
        Params::new(0.7, 1.3, 2.5, 0.4, 2.5).unwrap(),
        Params::new(1.0, 1.0, 0.5, 1.0, 1.0).unwrap(),
    ] {
        let e: Vec<f64> = [100, 200, 400]
            .iter()
            .map(|&n| mms_residual(n, &params))
            .collect();
        for w in e.windows(2) {
            let ratio = w[0] / w[1];
            assert!(
                (3.5..=4.5).contains(&ratio),
                "{params:?}: ratio {ratio}, errors {e:?}"
            );
        }
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

#[test]
fn source_spot_values_match_symbolic_differentiation() {
    // reference values from exact symbolic differentiation at 25 digits
    let m = Manufactured::new(1.0);
    let cases = [
        (
            Params::default(),
            0.5,
            0.0,
            [0.0, 1.169703778932017253345087, -3.453057584392169102780417],
        ),
        (
            Params::new(0.7, 1.3, 2.5, 0.4, 2.5).unwrap(),
            0.5,
            0.0,
            [
                0.0,
                0.7039696436054876599030695,
                -1.477499949267891622337075,
            ],
        ),
        (
            Params::new(0.7, 1.3, 2.5, 0.4, 2.5).unwrap(),
            0.3,
            0.25,
            [
                -0.1895886990354597275396323,
                0.2276610745876588976561869,
                -0.6228715605363278662365474,
            ],
        ),
    ];
    for (p, x, t, want) in cases {
        let s = mms_source(x, t, &m, &p);
        assert!(
            s.v.abs() <= 1e-15 || close(s.v, want[0]),
            "Sv {} vs {}",
            s.v,
            want[0]
        );
        assert!(close(s.u, want[1]), "Su {} vs {}", s.u, want[1]);
        assert!(close(s.theta, want[2]), "Stheta {} vs {}", s.theta, want[2]);
    }
}

#[test]
fn sources_vanish_for_zero_amplitude_and_late_times() {
    let p = Params::new(0.7, 1.3, 2.5, 0.4, 2.5).unwrap();
    let flat = Manufactured {
        amplitude: 0.0,
        length: 1.0,
    };
    let m = Manufactured::new(1.0);
    for k in 0..=20 {
        let x = k as f64 / 20.0;
        let s = mms_source(x, 0.3, &flat, &p);
        assert_eq!((s.v, s.u, s.theta), (0.0, 0.0, 0.0));
        let late = mms_source(x, 60.0, &m, &p);
        assert!(late.v.abs().max(late.u.abs()).max(late.theta.abs()) < 1e-25);
    }
}

#[test]
fn equilibrium_rates_vanish() {
    let g = build_grid(20.0, 80).unwrap();
    for p in [
        Params::default(),
        Params::new(2.0, 0.5, 2.5, 2.0, 0.7).unwrap(),
    ] {
        let r = rhs(&equilibrium_state(&g), &g, &p, None);
        assert!(r.max_abs() <= 1e-14);
        assert_eq!(r.du[g.n_cells], 0.0);
    }
}

#[test]
fn mass_identity_telescopes() {
    let g = build_grid(10.0, 200).unwrap();
    let p = Params::default();
    let mut s = equilibrium_state(&g);
    for (i, u) in s.u.iter_mut().enumerate().take(g.n_cells) {
        let x = g.face_x(i);
        *u = 0.2 * (-(x - 2.0) * (x - 2.0)).exp() + 0.05;
    }
    let r = rhs(&s, &g, &p, None);
    let total: f64 = r.dv.iter().map(|d| g.h * d).sum();
    assert!((total + s.u[0]).abs() <= 1e-14);
}

proptest! {
    #[test]
    fn flux_is_antisymmetric_under_reflection(
        tl in 0.05f64..5.0, tr in 0.05f64..5.0, vl in 0.1f64..4.0, vr in 0.1f64..4.0, beta in 0.0f64..3.0,
    ) {
        let g = build_grid(4.0, 4).unwrap();
        let p = Params::new(1.0, 1.3, beta, 1.0, 1.0).unwrap();
        let mut s = equilibrium_state(&g);
        s.theta[1] = tl;
        s.theta[2] = tr;
        s.v[1] = vl;
        s.v[2] = vr;
        let q = face_heat_flux(&s, &g, &p).q[2];
        s.theta.swap(1, 2);
        s.v.swap(1, 2);
        let q_swapped = face_heat_flux(&s, &g, &p).q[2];
        prop_assert!((q + q_swapped).abs() <= 1e-12 * q.abs().max(1.0));
        prop_assert_eq!(face_heat_flux(&s, &g, &p).q[0], 0.0);
    }
}
