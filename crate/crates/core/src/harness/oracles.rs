//! Reference computations used to cross-check the production evaluators.
//!
//! Each routine is written independently of the code it checks: dense
//! elimination instead of the Thomas sweep, reversed loops with compensated
//! summation instead of straight sums, and direct formulas instead of the
//! shared helpers.

use rand::Rng;

use crate::domain::{Grid, Params, State};
use crate::tridiag::TriDiag;

/// Kahan-compensated accumulator.
#[derive(Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Gaussian elimination with partial pivoting on a dense copy.
pub fn dense_solve(sys: &TriDiag) -> Vec<f64> {
    let n = sys.len();
    let mut a = vec![vec![0.0; n + 1]; n];
    for k in 0..n {
        if k > 0 {
            a[k][k - 1] = sys.lower[k];
        }
        a[k][k] = sys.diag[k];
        if k + 1 < n {
            a[k][k + 1] = sys.upper[k];
        }
        a[k][n] = sys.rhs[k];
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty column");
        a.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                let (top, bottom) = a.split_at_mut(row);
                for (x, &p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                    *x -= f * p;
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = a[row][n];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    x
}

/// Random strictly diagonally dominant tridiagonal system.
pub fn random_dominant_system<R: Rng>(rng: &mut R, n: usize) -> TriDiag {
    let mut sys = TriDiag::zeros(n);
    for k in 0..n {
        let lo = if k > 0 { rng.gen_range(-1.0..1.0) } else { 0.0 };
        let up = if k + 1 < n {
            rng.gen_range(-1.0..1.0)
        } else {
            0.0
        };
        let margin = rng.gen_range(0.05..2.0);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        sys.lower[k] = lo;
        sys.upper[k] = up;
        sys.diag[k] = sign * (f64::abs(lo) + f64::abs(up) + margin);
        sys.rhs[k] = rng.gen_range(-10.0..10.0);
    }
    sys
}

/// Smooth positive state built from a few random Fourier modes.
pub fn reference_state<R: Rng>(rng: &mut R, grid: &Grid) -> State {
    let modes: Vec<(f64, f64, f64)> = (0..6)
        .map(|_| {
            (
                rng.gen_range(-0.05..0.05),
                rng.gen_range(0.1..3.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let field = |x: f64, shift: f64| {
        modes
            .iter()
            .map(|&(a, k, ph)| a * (k * x + ph + shift).sin())
            .sum::<f64>()
    };
    let n = grid.n_cells;
    let mut u: Vec<f64> = (0..=n).map(|i| field(grid.face_x(i), 2.0)).collect();
    u[n] = 0.0;
    State {
        t: rng.gen_range(0.0..10.0),
        v: (0..n).map(|j| 1.0 + field(grid.cell_x(j), 0.0)).collect(),
        theta: (0..n)
            .map(|j| 1.0 + 2.0 * field(grid.cell_x(j), 1.0))
            .collect(),
        u,
    }
}

pub fn energy(s: &State, grid: &Grid, p: &Params) -> f64 {
    let mut acc = Kahan::default();
    for j in (0..s.v.len()).rev() {
        let ubar = (s.u[j + 1] + s.u[j]) / 2.0;
        let v_part = s.v[j] - s.v[j].ln() - 1.0;
        let t_part = s.theta[j] - s.theta[j].ln() - 1.0;
        acc.add(grid.h * (ubar * ubar / 2.0 + p.r * v_part + p.cv * t_part));
    }
    acc.sum
}

pub fn dissipation(s: &State, grid: &Grid, p: &Params) -> f64 {
    let n = s.v.len();
    let mut acc = Kahan::default();
    for j in (0..n).rev() {
        let ux = (s.u[j + 1] - s.u[j]) / grid.h;
        acc.add(grid.h * p.mu * ux.powi(2) / (s.v[j] * s.theta[j]));
    }
    for i in (1..n).rev() {
        let (tl, tr) = (s.theta[i - 1], s.theta[i]);
        let k_face = p.kappa * (tl.powf(p.beta) + tr.powf(p.beta)) / 2.0;
        let v_face = (s.v[i - 1] + s.v[i]) / 2.0;
        let t_face = (tl + tr) / 2.0;
        let grad = (tr - tl) / grid.h;
        acc.add(grid.h * k_face * grad.powi(2) / (v_face * t_face.powi(2)));
    }
    acc.sum
}

/// `(||v-1||_2, ||u||_2, ||theta-1||_2, ||v_x||_2, ||u_x||_2, ||theta_x||_2)`.
pub fn l2_norms(s: &State, grid: &Grid) -> [f64; 6] {
    let n = s.v.len();
    let h = grid.h;
    let mut acc: [Kahan; 6] = Default::default();
    for j in (0..n).rev() {
        acc[0].add(h * (s.v[j] - 1.0).powi(2));
        acc[2].add(h * (s.theta[j] - 1.0).powi(2));
        acc[4].add(((s.u[j + 1] - s.u[j]) / h).powi(2) * h);
    }
    for i in (0..=n).rev() {
        let w = if i == 0 || i == n { 0.5 } else { 1.0 };
        acc[1].add(w * h * s.u[i].powi(2));
    }
    for i in (1..n).rev() {
        acc[3].add(((s.v[i] - s.v[i - 1]) / h).powi(2) * h);
        acc[5].add(((s.theta[i] - s.theta[i - 1]) / h).powi(2) * h);
    }
    acc.map(|k| k.sum.sqrt())
}

/// Unit-interval averages by explicit index arithmetic.
pub fn unit_averages(s: &State, grid: &Grid) -> Vec<(f64, f64)> {
    let per = (1.0 / grid.h).round() as usize;
    let units = s.v.len() / per;
    (0..units)
        .map(|i| {
            let (mut sv, mut st) = (Kahan::default(), Kahan::default());
            for j in (i * per..(i + 1) * per).rev() {
                sv.add(s.v[j] * grid.h);
                st.add(s.theta[j] * grid.h);
            }
            (sv.sum, st.sum)
        })
        .collect()
}
