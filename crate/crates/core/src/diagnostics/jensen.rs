use serde::{Deserialize, Serialize};

use super::energy::entropy_density;
use crate::domain::{Grid, State};
use crate::error::{Error, Result};

/// The two roots `alpha1 <= 1 <= alpha2` of `y - ln y - 1 = e0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JensenBand {
    pub e0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl JensenBand {
    pub fn contains(&self, y: f64, slack: f64) -> bool {
        y >= self.alpha1 - slack && y <= self.alpha2 + slack
    }

    pub fn max_residual(&self) -> f64 {
        let r1 = entropy_density(self.alpha1) - self.e0;
        let r2 = entropy_density(self.alpha2) - self.e0;
        r1.abs().max(r2.abs())
    }
}

/// Bisects `f(y) = y - ln y - 1 - e0` on `[lo, hi]` given `f(lo) > 0 > f(hi)`
/// or the reverse, until the bracket cannot shrink further.
fn bisect(e0: f64, mut lo: f64, mut hi: f64) -> f64 {
    let f = |y: f64| entropy_density(y) - e0;
    let lo_positive = f(lo) > 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

pub fn entropy_roots(e0: f64) -> Result<JensenBand> {
    if !(e0 >= 0.0) || !e0.is_finite() {
        return Err(Error::Domain(format!(
            "entropy roots need e0 >= 0, got {e0}"
        )));
    }
    if e0 == 0.0 {
        return Ok(JensenBand {
            e0,
            alpha1: 1.0,
            alpha2: 1.0,
        });
    }
    // f(exp(-e0 - 2)) > 1 and f(2 e0 + 4) > 0 bracket the roots
    let alpha1 = bisect(e0, (-e0 - 2.0).exp(), 1.0);
    let alpha2 = bisect(e0, 1.0, 2.0 * e0 + 4.0);
    Ok(JensenBand { e0, alpha1, alpha2 })
}

/// Cell averages of `v` and `theta` over each unit mass interval `[i, i + 1)`.
pub fn unit_interval_averages(s: &State, grid: &Grid) -> Result<Vec<(f64, f64)>> {
    let per = grid.cells_per_unit().ok_or_else(|| {
        Error::Config(format!(
            "cell width {} does not divide the unit interval",
            grid.h
        ))
    })?;
    if grid.length < 2.0 {
        return Err(Error::Config(format!(
            "unit-interval averages need L >= 2, got {}",
            grid.length
        )));
    }
    let k = per as f64;
    Ok(s.v
        .chunks_exact(per)
        .zip(s.theta.chunks_exact(per))
        .map(|(v, th)| (v.iter().sum::<f64>() / k, th.iter().sum::<f64>() / k))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_grid, equilibrium_state};

    #[test]
    fn zero_energy_band_is_degenerate() {
        let b = entropy_roots(0.0).unwrap();
        assert_eq!((b.alpha1, b.alpha2), (1.0, 1.0));
    }

    #[test]
    fn negative_energy_is_rejected() {
        assert!(entropy_roots(-1e-3).is_err());
        assert!(entropy_roots(f64::NAN).is_err());
    }

    #[test]
    fn roots_for_a_range_of_energies() {
        for e0 in [1e-10, 1e-4, 0.1, 0.5, 1.0, 3.0, 40.0] {
            let b = entropy_roots(e0).unwrap();
            assert!(b.alpha1 < 1.0 && b.alpha2 > 1.0);
            assert!(b.max_residual() <= 1e-12, "e0 = {e0}: {}", b.max_residual());
        }
    }

    #[test]
    fn averages() {
        let g = build_grid(4.0, 16).unwrap();
        let mut s = equilibrium_state(&g);
        assert!(unit_interval_averages(&s, &g)
            .unwrap()
            .iter()
            .all(|&(v, t)| v == 1.0 && t == 1.0));
        for (j, v) in s.v.iter_mut().enumerate() {
            *v = if j % 2 == 0 { 0.5 } else { 1.5 };
        }
        let avg = unit_interval_averages(&s, &g).unwrap();
        assert_eq!(avg.len(), 4);
        assert!(avg.iter().all(|&(v, _)| v == 1.0));

        let bad = build_grid(4.0, 10).unwrap();
        assert!(unit_interval_averages(&equilibrium_state(&bad), &bad).is_err());
        let short = build_grid(1.0, 8).unwrap();
        assert!(unit_interval_averages(&equilibrium_state(&short), &short).is_err());
    }
}
