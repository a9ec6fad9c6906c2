//! Closed-form contact-free solutions.
//!
//! Without contact, each sine mode `q_k(t) sin(k pi x / l)` obeys
//! `q'' + alpha lambda q' + lambda q = 0` with `lambda = (k pi / l)^2`.

use std::f64::consts::PI;

use crate::error::SolverError;
use crate::model::{Grid1D, InitialData, Physics};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Damping {
    Over { slow: f64, fast: f64 },
    Critical { rate: f64 },
    Under { decay: f64, freq: f64 },
}

/// `q'' + alpha lambda q' + lambda q = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedMode {
    pub lambda: f64,
    pub alpha: f64,
}

impl DampedMode {
    pub fn new(mode: usize, length: f64, alpha: f64) -> Self {
        let w = mode as f64 * PI / length;
        Self { lambda: w * w, alpha }
    }

    pub fn damping(&self) -> Damping {
        let b = self.alpha * self.lambda;
        let disc = b * b - 4.0 * self.lambda;
        let tol = 1e-12 * (b * b).max(4.0 * self.lambda);
        if disc > tol {
            let root = disc.sqrt();
            // q = A e^{r+ t} + B e^{r- t}; the slow root avoids cancellation via r+ r- = lambda.
            let fast = -0.5 * (b + root);
            Damping::Over {
                slow: self.lambda / fast,
                fast,
            }
        } else if disc < -tol {
            Damping::Under {
                decay: -0.5 * b,
                freq: 0.5 * (-disc).sqrt(),
            }
        } else {
            Damping::Critical { rate: -0.5 * b }
        }
    }

    /// `(q(t), q'(t))` from `q(0) = q0`, `q'(0) = p0`.
    pub fn eval(&self, t: f64, q0: f64, p0: f64) -> (f64, f64) {
        match self.damping() {
            Damping::Over { slow, fast } => {
                let a = (p0 - fast * q0) / (slow - fast);
                let b = q0 - a;
                let (es, ef) = ((slow * t).exp(), (fast * t).exp());
                (a * es + b * ef, a * slow * es + b * fast * ef)
            }
            Damping::Critical { rate } => {
                let c = p0 - rate * q0;
                let e = (rate * t).exp();
                ((q0 + c * t) * e, (c + rate * (q0 + c * t)) * e)
            }
            Damping::Under { decay, freq } => {
                let c = (p0 - decay * q0) / freq;
                let (s, co) = (freq * t).sin_cos();
                let e = (decay * t).exp();
                let q = e * (q0 * co + c * s);
                let dq = decay * q + e * freq * (c * co - q0 * s);
                (q, dq)
            }
        }
    }
}

/// Exact displacement of `SingleMode` data on `grid` at time `t`, valid while
/// the string stays off the obstacle.
pub fn single_mode_field(init: &InitialData, grid: &Grid1D, physics: &Physics, t: f64) -> Result<Vec<f64>, SolverError> {
    let InitialData::SingleMode {
        amplitude,
        mode,
        offset,
        v0,
    } = init
    else {
        return Err(SolverError::Unsupported(format!(
            "closed form needs single_mode data, got {}",
            init.name()
        )));
    };
    let l = grid.length();
    let (q, _) = DampedMode::new(*mode, l, physics.alpha()).eval(t, *amplitude, *v0);
    let k = *mode as f64 * PI / l;
    Ok((0..grid.nodes())
        .map(|j| {
            let x = grid.x(j);
            // endpoints are exactly the offset
            if j == 0 || j == grid.cells() {
                *offset
            } else {
                offset + q * (k * x).sin()
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overdamped_unit_alpha_first_mode() {
        let m = DampedMode::new(1, 1.0, 1.0);
        let Damping::Over { slow, fast } = m.damping() else {
            panic!("expected overdamped")
        };
        assert!((slow + 1.129_192_084_228_078_7).abs() < 1e-13);
        assert!((fast + 8.740_412_316_861_28).abs() < 1e-12);
        let (q, _) = m.eval(0.3, 0.5, 0.0);
        assert!((q - 0.403_802_919_547_261_56).abs() < 1e-14);
    }

    #[test]
    fn initial_values_reproduced() {
        for alpha in [0.0, 0.01, 2.0 / (PI * PI), 1.0, 5.0] {
            let m = DampedMode::new(1, 1.0, alpha);
            let (q, p) = m.eval(0.0, 0.7, -1.3);
            assert!((q - 0.7).abs() < 1e-13, "alpha {alpha}");
            assert!((p + 1.3).abs() < 1e-12, "alpha {alpha}");
        }
    }

    #[test]
    fn critical_branch_selected() {
        // alpha^2 lambda = 4
        let m = DampedMode::new(1, 1.0, 2.0 / PI);
        assert!(matches!(m.damping(), Damping::Critical { .. }));
    }

    #[test]
    fn satisfies_ode_by_finite_differences() {
        for alpha in [0.01, 0.5, 1.0] {
            let m = DampedMode::new(2, 1.0, alpha);
            let h = 1e-4;
            let t = 0.17;
            let (qm, _) = m.eval(t - h, 1.0, 0.3);
            let (q, p) = m.eval(t, 1.0, 0.3);
            let (qp, _) = m.eval(t + h, 1.0, 0.3);
            let acc = (qp - 2.0 * q + qm) / (h * h);
            let res = acc + m.alpha * m.lambda * p + m.lambda * q;
            assert!(res.abs() < 1e-3 * m.lambda, "alpha {alpha}: {res}");
        }
    }

    #[test]
    fn field_requires_single_mode() {
        let g = Grid1D::new(1.0, 10).unwrap();
        let p = Physics::new(1.0, 1.0).unwrap();
        assert!(single_mode_field(&InitialData::Example1, &g, &p, 0.1).is_err());
    }
}
