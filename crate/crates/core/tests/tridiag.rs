use nslag_core::tridiag::{solve_tridiagonal, TriDiag};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense Gaussian elimination with partial pivoting.
fn dense(sys: &TriDiag) -> Vec<f64> {
    let n = sys.len();
    let mut a = vec![vec![0.0; n]; n];
    let mut b = sys.rhs.clone();
    for k in 0..n {
        a[k][k] = sys.diag[k];
        if k > 0 {
            a[k][k - 1] = sys.lower[k];
        }
        if k + 1 < n {
            a[k][k + 1] = sys.upper[k];
        }
    }
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            let pivot_row = a[c].clone();
            for (x, p) in a[r][c..].iter_mut().zip(&pivot_row[c..]) {
                *x -= f * p;
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

fn random_system(rng: &mut ChaCha8Rng, n: usize) -> TriDiag {
    let mut sys = TriDiag::zeros(n);
    for k in 0..n {
        if k > 0 {
            sys.lower[k] = rng.gen_range(-2.0..2.0);
        }
        if k + 1 < n {
            sys.upper[k] = rng.gen_range(-2.0..2.0);
        }
        let m = sys.lower[k].abs() + sys.upper[k].abs() + rng.gen_range(0.01..1.0);
        sys.diag[k] = if rng.gen_bool(0.5) { m } else { -m };
        sys.rhs[k] = rng.gen_range(-5.0..5.0);
    }
    sys
}

#[test]
fn matches_dense_elimination() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let sys = random_system(&mut rng, 50);
        assert!(sys.is_strictly_dominant());
        let x = solve_tridiagonal(&sys).unwrap();
        for (a, b) in x.iter().zip(dense(&sys)) {
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
        }
    }
}

proptest! {
    #[test]
    fn residual_is_small(seed in any::<u64>(), n in 1usize..120) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = random_system(&mut rng, n);
        let x = solve_tridiagonal(&sys).unwrap();
        let ax = sys.apply(&x);
        let norm = |v: &[f64]| v.iter().fold(0.0f64, |m, y| m.max(y.abs()));
        let res: Vec<f64> = ax.iter().zip(&sys.rhs).map(|(a, b)| a - b).collect();
        prop_assert!(norm(&res) <= 1e-12 * (norm(&sys.rhs) + norm(&x)));
    }
}
