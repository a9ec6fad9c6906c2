//! Tridiagonal systems: the per-step implicit operator and a Thomas solver.

use crate::error::SolverError;
use crate::model::{Grid1D, Physics, TimeGrid};

/// Tridiagonal matrix in band storage.
///
/// `lower[k]` couples row `k + 1` to column `k`; `upper[k]` couples row `k`
/// to column `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self, SolverError> {
        let n = diag.len();
        if n == 0 {
            return Err(SolverError::Dimension { expected: 1, got: 0 });
        }
        for off in [&lower, &upper] {
            if off.len() != n - 1 {
                return Err(SolverError::Dimension {
                    expected: n - 1,
                    got: off.len(),
                });
            }
        }
        Ok(Self { lower, diag, upper })
    }

    /// Constant-coefficient matrix.
    pub fn constant(n: usize, lower: f64, diag: f64, upper: f64) -> Self {
        assert!(n >= 1, "empty tridiagonal matrix");
        Self {
            lower: vec![lower; n - 1],
            diag: vec![diag; n],
            upper: vec![upper; n - 1],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|k| {
                let mut s = self.diag[k] * x[k];
                if k > 0 {
                    s += self.lower[k - 1] * x[k - 1];
                }
                if k + 1 < n {
                    s += self.upper[k] * x[k + 1];
                }
                s
            })
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|k| {
                let mut s = self.diag[k].abs();
                if k > 0 {
                    s += self.lower[k - 1].abs();
                }
                if k + 1 < n {
                    s += self.upper[k].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// Smallest ratio `|diag| / (|lower| + |upper|)` over the rows; infinite
    /// for a diagonal matrix.
    pub fn dominance_ratio(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|k| {
                let mut off = 0.0;
                if k > 0 {
                    off += self.lower[k - 1].abs();
                }
                if k + 1 < n {
                    off += self.upper[k].abs();
                }
                self.diag[k].abs() / off
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn factor(&self) -> Result<ThomasFactor, SolverError> {
        ThomasFactor::new(self)
    }
}

/// The implicit operator `(1/dt^2) I - (alpha/dt + 1) L` over interior nodes
/// `1..N-1`, with `L` the second difference divided by `dx^2`. Dirichlet rows
/// are left out; the stepper folds boundary values into the right-hand side.
pub fn assemble_step_matrix(grid: &Grid1D, time: &TimeGrid, physics: &Physics) -> Tridiagonal {
    let dt = time.dt();
    let coupling = (physics.alpha() / dt + 1.0) / (grid.dx() * grid.dx());
    let diag = 1.0 / (dt * dt) + 2.0 * coupling;
    Tridiagonal::constant(grid.cells() - 1, -coupling, diag, -coupling)
}

/// LU factors of a tridiagonal matrix from the forward sweep of the Thomas
/// algorithm. Immutable once built; solves can share it across threads.
#[derive(Debug, Clone)]
pub struct ThomasFactor {
    lower: Vec<f64>,
    /// modified super-diagonal `c'_k = upper_k / pivot_k`
    c_prime: Vec<f64>,
    inv_pivot: Vec<f64>,
}

impl ThomasFactor {
    pub fn new(m: &Tridiagonal) -> Result<Self, SolverError> {
        let n = m.len();
        let mut c_prime = vec![0.0; n.saturating_sub(1)];
        let mut inv_pivot = vec![0.0; n];
        let mut prev_c = 0.0;
        for k in 0..n {
            let pivot = if k == 0 {
                m.diag[0]
            } else {
                m.diag[k] - m.lower[k - 1] * prev_c
            };
            let scale = m.diag[k].abs().max(f64::MIN_POSITIVE);
            if !pivot.is_finite() || pivot.abs() <= f64::EPSILON * scale {
                return Err(SolverError::ZeroPivot { index: k });
            }
            inv_pivot[k] = 1.0 / pivot;
            if k + 1 < n {
                prev_c = m.upper[k] * inv_pivot[k];
                c_prime[k] = prev_c;
            }
        }
        Ok(Self {
            lower: m.lower.clone(),
            c_prime,
            inv_pivot,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Solve in place: `x` holds the right-hand side on entry.
    pub fn solve_in_place(&self, x: &mut [f64]) -> Result<(), SolverError> {
        let n = self.len();
        if x.len() != n {
            return Err(SolverError::Dimension {
                expected: n,
                got: x.len(),
            });
        }
        x[0] *= self.inv_pivot[0];
        for k in 1..n {
            x[k] = (x[k] - self.lower[k - 1] * x[k - 1]) * self.inv_pivot[k];
        }
        for k in (0..n - 1).rev() {
            x[k] -= self.c_prime[k] * x[k + 1];
        }
        Ok(())
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, SolverError> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }
}

/// One-shot Thomas solve; `rhs` is left untouched.
pub fn thomas_solve(m: &Tridiagonal, rhs: &[f64]) -> Result<Vec<f64>, SolverError> {
    if rhs.len() != m.len() {
        return Err(SolverError::Dimension {
            expected: m.len(),
            got: rhs.len(),
        });
    }
    m.factor()?.solve(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual_ok(m: &Tridiagonal, x: &[f64], rhs: &[f64]) -> bool {
        let r = m.mul_vec(x);
        let res = r.iter().zip(rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let xn = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let bn = rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
        res <= 1e-12 * (m.norm_inf() * xn + bn)
    }

    #[test]
    fn unit_spacing_matrix() {
        let g = Grid1D::new(6.0, 6).unwrap();
        let t = TimeGrid::new(3.0, 3).unwrap();
        let m = assemble_step_matrix(&g, &t, &Physics::new(0.0, 1.0).unwrap());
        assert_eq!(m.len(), 5);
        assert!(m.diag.iter().all(|&d| d == 3.0));
        assert!(m.lower.iter().chain(&m.upper).all(|&o| o == -1.0));
    }

    #[test]
    fn paper_resolution_entries() {
        let g = Grid1D::new(1.0, 5000).unwrap();
        let t = TimeGrid::new(0.3, 1500).unwrap();
        let m = assemble_step_matrix(&g, &t, &Physics::new(0.01, 0.0005).unwrap());
        // 25e6 + 2 (0.01 * 5000 + 1) 25e6 = 2.575e9, off-diagonal -(51)(25e6)
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(m.diag[10], 2.575e9) < 1e-12);
        assert!(rel(m.upper[10], -1.275e9) < 1e-12);
        assert!(m.dominance_ratio() > 1.0);
    }

    #[test]
    fn dominance_margin_is_inverse_dt_squared() {
        let g = Grid1D::new(1.0, 100).unwrap();
        let t = TimeGrid::new(1.0, 100).unwrap();
        for alpha in [0.0, 0.1, 1.0, 10.0, 100.0] {
            let m = assemble_step_matrix(&g, &t, &Physics::new(alpha, 1.0).unwrap());
            let margin = m.diag[50] - m.lower[49].abs() - m.upper[50].abs();
            assert!((margin - 1e4).abs() <= 1e-9 * m.diag[50]);
            assert!(m.dominance_ratio() > 1.0);
        }
    }

    #[test]
    fn identity_returns_rhs() {
        let m = Tridiagonal::constant(7, 0.0, 1.0, 0.0);
        let rhs = vec![1.0, -2.0, 3.5, 0.0, 7.0, 1e-3, -9.0];
        assert_eq!(thomas_solve(&m, &rhs).unwrap(), rhs);
    }

    #[test]
    fn three_by_three() {
        let m = Tridiagonal::constant(3, -1.0, 2.0, -1.0);
        let x = thomas_solve(&m, &[1.0, 0.0, 1.0]).unwrap();
        for v in &x {
            assert!((v - 1.0).abs() < 1e-15);
        }
        assert!(residual_ok(&m, &x, &[1.0, 0.0, 1.0]));
    }

    #[test]
    fn single_unknown() {
        let m = Tridiagonal::new(vec![], vec![4.0], vec![]).unwrap();
        assert_eq!(thomas_solve(&m, &[2.0]).unwrap(), vec![0.5]);
    }

    #[test]
    fn zero_pivot_reports_index() {
        // second pivot: 1 - 1 * 1 = 0
        let m = Tridiagonal::new(vec![1.0, 0.0], vec![1.0, 1.0, 1.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(thomas_solve(&m, &[1.0, 1.0, 1.0]), Err(SolverError::ZeroPivot { index: 1 }));
    }

    #[test]
    fn length_mismatch() {
        let m = Tridiagonal::constant(3, -1.0, 2.0, -1.0);
        assert!(matches!(thomas_solve(&m, &[1.0]), Err(SolverError::Dimension { .. })));
        assert!(Tridiagonal::new(vec![1.0], vec![1.0, 1.0, 1.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn symmetric_rhs_gives_symmetric_solution() {
        let g = Grid1D::new(1.0, 400).unwrap();
        let t = TimeGrid::new(0.1, 40).unwrap();
        let m = assemble_step_matrix(&g, &t, &Physics::new(0.01, 1.0).unwrap());
        let n = m.len();
        let rhs: Vec<f64> = (0..n)
            .map(|k| {
                let d = k.min(n - 1 - k) as f64;
                (0.37 * d).sin() * 1e6 + d
            })
            .collect();
        let x = thomas_solve(&m, &rhs).unwrap();
        let scale = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for k in 0..n {
            assert!((x[k] - x[n - 1 - k]).abs() <= 1e-12 * scale);
        }
        assert!(residual_ok(&m, &x, &rhs));
    }
}
