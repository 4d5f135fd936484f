//! Thomas algorithm for the implicit diffusion solves.

use crate::error::StepError;

/// `lower[k] x[k-1] + diag[k] x[k] + upper[k] x[k+1] = rhs[k]`.
///
/// All four arrays have the system length; `lower[0]` and `upper[n-1]` are ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct TriDiag {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TriDiag {
    pub fn zeros(n: usize) -> Self {
        TriDiag {
            lower: vec![0.0; n],
            diag: vec![0.0; n],
            upper: vec![0.0; n],
            rhs: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `|diag| > |lower| + |upper|` on every row.
    pub fn is_strictly_dominant(&self) -> bool {
        let n = self.len();
        (0..n).all(|k| {
            let lo = if k > 0 { self.lower[k].abs() } else { 0.0 };
            let up = if k + 1 < n { self.upper[k].abs() } else { 0.0 };
            self.diag[k].abs() > lo + up
        })
    }

    /// Matrix-vector product, used for residual checks.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|k| {
                let mut y = self.diag[k] * x[k];
                if k > 0 {
                    y += self.lower[k] * x[k - 1];
                }
                if k + 1 < n {
                    y += self.upper[k] * x[k + 1];
                }
                y
            })
            .collect()
    }
}

pub fn solve_tridiagonal(sys: &TriDiag) -> Result<Vec<f64>, StepError> {
    let n = sys.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];

    let mut pivot = sys.diag[0];
    if pivot == 0.0 {
        return Err(StepError::ZeroPivot { row: 0 });
    }
    c[0] = if n > 1 { sys.upper[0] / pivot } else { 0.0 };
    x[0] = sys.rhs[0] / pivot;
    for k in 1..n {
        pivot = sys.diag[k] - sys.lower[k] * c[k - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(StepError::ZeroPivot { row: k });
        }
        if k + 1 < n {
            c[k] = sys.upper[k] / pivot;
        }
        x[k] = (sys.rhs[k] - sys.lower[k] * x[k - 1]) / pivot;
    }
    for k in (0..n - 1).rev() {
        x[k] -= c[k] * x[k + 1];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_rhs() {
        let mut sys = TriDiag::zeros(5);
        sys.diag.fill(1.0);
        sys.rhs = vec![1.0, -2.0, 3.5, 0.0, 7.0];
        assert_eq!(solve_tridiagonal(&sys).unwrap(), sys.rhs);
    }

    #[test]
    fn two_by_two() {
        let sys = TriDiag {
            lower: vec![0.0, 1.0],
            diag: vec![2.0, 2.0],
            upper: vec![1.0, 0.0],
            rhs: vec![3.0, 3.0],
        };
        assert_eq!(solve_tridiagonal(&sys).unwrap(), vec![1.0, 1.0]);
    }

    #[test]
    fn zero_pivot_is_reported() {
        let sys = TriDiag {
            lower: vec![0.0, 1.0],
            diag: vec![1.0, 1.0],
            upper: vec![1.0, 0.0],
            rhs: vec![1.0, 1.0],
        };
        assert!(matches!(
            solve_tridiagonal(&sys),
            Err(StepError::ZeroPivot { row: 1 })
        ));
    }

    #[test]
    fn single_row_and_empty() {
        let sys = TriDiag {
            lower: vec![9.0],
            diag: vec![4.0],
            upper: vec![9.0],
            rhs: vec![2.0],
        };
        assert_eq!(solve_tridiagonal(&sys).unwrap(), vec![0.5]);
        assert!(solve_tridiagonal(&TriDiag::zeros(0)).unwrap().is_empty());
    }
}
