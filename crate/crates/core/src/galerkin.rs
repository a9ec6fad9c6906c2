//! Sine-mode Galerkin solver with smoothed contact cutoffs.
//!
//! `eta = h + sum_k q_k sin(k pi x / l)` and
//!
//! ```text
//! q_k'' = -alpha lambda_k q_k' - lambda_k q_k + f_k,
//! f_k   = -(2/l)(1/eps) int chi_eps(eta) chi_delta(eta_t) eta_t sin(k pi x / l) dx
//! ```
//!
//! with `lambda_k = (k pi / l)^2` and smooth cutoffs `chi_a` that equal 1 below
//! `-a` and 0 above 0. The force integral uses the midpoint rule on the cells of
//! the quadrature grid. Time stepping is classical RK4.

use std::f64::consts::PI;

use crate::error::SolverError;
use crate::model::{Grid1D, InitialData, Physics, TimeGrid};
use crate::series::FieldSeries;

/// Smooth non-increasing cutoff: 1 for `x <= -a`, 0 for `x >= 0`, quintic
/// smoothstep in between (C2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothCutoff {
    pub a: f64,
}

impl SmoothCutoff {
    pub fn new(a: f64) -> Self {
        assert!(a > 0.0, "cutoff width must be positive");
        Self { a }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x >= 0.0 {
            0.0
        } else if x <= -self.a {
            1.0
        } else {
            let s = -x / self.a;
            s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalState {
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
    pub offset: f64,
}

impl ModalState {
    pub fn n_modes(&self) -> usize {
        self.q.len()
    }

    /// `(eta, eta_t)` at `x`.
    pub fn reconstruct(&self, x: f64, length: f64) -> (f64, f64) {
        let mut eta = self.offset;
        let mut v = 0.0;
        for (k, (q, p)) in self.q.iter().zip(&self.qdot).enumerate() {
            let s = ((k + 1) as f64 * PI * x / length).sin();
            eta += q * s;
            v += p * s;
        }
        (eta, v)
    }

    /// `1/2 sum (q_k'^2 + lambda_k q_k^2) l/2`.
    pub fn energy(&self, length: f64) -> f64 {
        let e: f64 = self
            .q
            .iter()
            .zip(&self.qdot)
            .enumerate()
            .map(|(k, (q, p))| {
                let w = (k + 1) as f64 * PI / length;
                p * p + w * w * q * q
            })
            .sum();
        0.25 * length * e
    }

    /// Lower bound on `eta` over the string: `h - sum |q_k|`.
    pub fn lower_bound(&self) -> f64 {
        self.offset - self.q.iter().map(|q| q.abs()).sum::<f64>()
    }
}

/// `sin(k pi x_m / l)` for `k = 1..=modes` at the given points, row per point.
fn sine_table(points: &[f64], length: f64, modes: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(points.len() * modes);
    for &x in points {
        for k in 1..=modes {
            t.push((k as f64 * PI * x / length).sin());
        }
    }
    t
}

/// Midpoint quadrature on `cells` uniform cells; exact projection for
/// trigonometric content below mode `cells`.
#[derive(Debug, Clone)]
pub struct ModalBasis {
    length: f64,
    modes: usize,
    midpoints: Vec<f64>,
    table: Vec<f64>,
}

impl ModalBasis {
    pub fn new(length: f64, cells: usize, modes: usize) -> Self {
        let h = length / cells as f64;
        let midpoints: Vec<f64> = (0..cells).map(|m| (m as f64 + 0.5) * h).collect();
        let table = sine_table(&midpoints, length, modes);
        Self {
            length,
            modes,
            midpoints,
            table,
        }
    }

    pub fn midpoints(&self) -> &[f64] {
        &self.midpoints
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    fn row(&self, m: usize) -> &[f64] {
        &self.table[m * self.modes..(m + 1) * self.modes]
    }

    /// `(2/l) int u sin(k pi x / l) dx` by the midpoint rule.
    pub fn project(&self, values: &[f64]) -> Vec<f64> {
        let h = self.length / self.midpoints.len() as f64;
        let mut c = vec![0.0; self.modes];
        for (m, &u) in values.iter().enumerate() {
            for (ck, s) in c.iter_mut().zip(self.row(m)) {
                *ck += u * s;
            }
        }
        c.iter_mut().for_each(|ck| *ck *= 2.0 / self.length * h);
        c
    }

    /// `sum_k c_k sin(k pi x_m / l)` at every midpoint.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        (0..self.midpoints.len())
            .map(|m| self.row(m).iter().zip(coeffs).map(|(s, c)| s * c).sum())
            .collect()
    }
}

/// Parameters of the modal right-hand side.
#[derive(Debug, Clone, Copy)]
pub struct ModalProblem<'a> {
    pub basis: &'a ModalBasis,
    pub physics: Physics,
    pub cutoff_eta: SmoothCutoff,
    pub cutoff_vel: SmoothCutoff,
}

impl ModalProblem<'_> {
    /// Projected contact force `f_k`; exactly zero when `eta > 0` everywhere.
    pub fn contact_force(&self, state: &ModalState) -> Vec<f64> {
        let rate = self.physics.penalty_rate();
        let modes = state.n_modes();
        if rate == 0.0 || state.lower_bound() > 0.0 {
            return vec![0.0; modes];
        }
        let eta = self.basis.synthesize(&state.q);
        let vel = self.basis.synthesize(&state.qdot);
        let density: Vec<f64> = eta
            .iter()
            .zip(&vel)
            .map(|(&e, &v)| {
                let active = self.cutoff_eta.eval(state.offset + e) * self.cutoff_vel.eval(v);
                -rate * active * v
            })
            .collect();
        self.basis.project(&density)
    }

    /// Time derivative `(q', q'')`.
    pub fn rhs(&self, state: &ModalState) -> (Vec<f64>, Vec<f64>) {
        let alpha = self.physics.alpha();
        let f = self.contact_force(state);
        let l = self.basis.length;
        let acc = (0..state.n_modes())
            .map(|k| {
                let w = (k + 1) as f64 * PI / l;
                let lambda = w * w;
                -alpha * lambda * state.qdot[k] - lambda * state.q[k] + f[k]
            })
            .collect();
        (state.qdot.clone(), acc)
    }

    pub fn rk4_step(&self, s: &ModalState, h: f64) -> ModalState {
        let shifted = |base: &ModalState, dq: &[f64], dp: &[f64], c: f64| ModalState {
            q: base.q.iter().zip(dq).map(|(a, b)| a + c * b).collect(),
            qdot: base.qdot.iter().zip(dp).map(|(a, b)| a + c * b).collect(),
            offset: base.offset,
        };
        let (k1q, k1p) = self.rhs(s);
        let (k2q, k2p) = self.rhs(&shifted(s, &k1q, &k1p, 0.5 * h));
        let (k3q, k3p) = self.rhs(&shifted(s, &k2q, &k2p, 0.5 * h));
        let (k4q, k4p) = self.rhs(&shifted(s, &k3q, &k3p, h));
        let comb = |y: &[f64], a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
            (0..y.len())
                .map(|k| y[k] + h / 6.0 * (a[k] + 2.0 * b[k] + 2.0 * c[k] + d[k]))
                .collect()
        };
        ModalState {
            q: comb(&s.q, &k1q, &k2q, &k3q, &k4q),
            qdot: comb(&s.qdot, &k1p, &k2p, &k3p, &k4p),
            offset: s.offset,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GalerkinOptions {
    pub n_modes: usize,
    /// Velocity cutoff width; `None` means `1 / n_modes`.
    pub delta_vel: Option<f64>,
    pub output_stride: usize,
}

impl GalerkinOptions {
    pub fn new(n_modes: usize) -> Self {
        Self {
            n_modes,
            delta_vel: None,
            output_stride: 1,
        }
    }
}

/// RK4 substep: the largest `dt / k` below `min(dt, eps/10, 0.1/lambda_max)`.
pub fn substep(dt: f64, epsilon: f64, length: f64, n_modes: usize) -> (f64, usize) {
    let w = n_modes as f64 * PI / length;
    let cap = dt.min(epsilon / 10.0).min(0.1 / (w * w));
    let k = (dt / cap).ceil().max(1.0) as usize;
    (dt / k as f64, k)
}

/// Project initial data onto the first `n_modes` sines about the common end value.
pub fn initial_state(init: &InitialData, basis: &ModalBasis, length: f64) -> Result<ModalState, SolverError> {
    let (h_left, _) = init.eval_at(0.0, length);
    let (h_right, _) = init.eval_at(length, length);
    if (h_left - h_right).abs() > 1e-12 * h_left.abs().max(h_right.abs()).max(1.0) {
        return Err(SolverError::Unsupported(format!(
            "galerkin oracle needs equal end values, got {h_left} and {h_right}"
        )));
    }
    let (eta, vel): (Vec<f64>, Vec<f64>) = basis
        .midpoints()
        .iter()
        .map(|&x| {
            let (e, v) = init.eval_at(x, length);
            (e - h_left, v)
        })
        .unzip();
    Ok(ModalState {
        q: basis.project(&eta),
        qdot: basis.project(&vel),
        offset: h_left,
    })
}

/// Integrate the modal system and sample it on the nodes of `grid`, which is
/// also the quadrature grid (`grid.cells() >= 4 n_modes`).
pub fn integrate(
    init: &InitialData,
    grid: &Grid1D,
    time: &TimeGrid,
    physics: &Physics,
    opts: GalerkinOptions,
) -> Result<FieldSeries, SolverError> {
    let k = opts.n_modes;
    if k == 0 {
        return Err(SolverError::Unsupported("need at least one mode".into()));
    }
    if grid.cells() < 4 * k {
        return Err(SolverError::Unsupported(format!(
            "quadrature grid of {} cells cannot resolve {k} modes (need {})",
            grid.cells(),
            4 * k
        )));
    }
    if opts.output_stride == 0 {
        return Err(SolverError::Unsupported("output stride must be >= 1".into()));
    }
    let l = grid.length();
    let basis = ModalBasis::new(l, grid.cells(), k);
    let problem = ModalProblem {
        basis: &basis,
        physics: *physics,
        cutoff_eta: SmoothCutoff::new(physics.epsilon().min(f64::MAX)),
        cutoff_vel: SmoothCutoff::new(opts.delta_vel.unwrap_or(1.0 / k as f64)),
    };
    let mut state = initial_state(init, &basis, l)?;

    let nodes = grid.coordinates();
    let node_table = sine_table(&nodes, l, k);
    let sample = |s: &ModalState| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut eta = Vec::with_capacity(nodes.len());
        let mut vel = Vec::with_capacity(nodes.len());
        let mut force = Vec::with_capacity(nodes.len());
        for j in 0..nodes.len() {
            if j == 0 || j == nodes.len() - 1 {
                eta.push(s.offset);
                vel.push(0.0);
                force.push(0.0);
                continue;
            }
            let row = &node_table[j * k..(j + 1) * k];
            let e = s.offset + row.iter().zip(&s.q).map(|(a, b)| a * b).sum::<f64>();
            let v: f64 = row.iter().zip(&s.qdot).map(|(a, b)| a * b).sum();
            let f = -physics.penalty_rate() * problem.cutoff_eta.eval(e) * problem.cutoff_vel.eval(v) * v;
            eta.push(e);
            vel.push(v);
            force.push(f.max(0.0));
        }
        (eta, vel, force)
    };

    let mut series = FieldSeries::new(*grid, *physics, time.dt());
    let (e, v, f) = sample(&state);
    series.push(0, 0.0, &e, &v, &f);

    let (h, substeps) = substep(time.dt(), physics.epsilon(), l, k);
    let m = time.steps();
    for i in 1..=m {
        for _ in 0..substeps {
            state = problem.rk4_step(&state, h);
        }
        if !state.q.iter().chain(&state.qdot).all(|x| x.is_finite()) {
            return Err(SolverError::Blowup { step: i });
        }
        if i % opts.output_stride == 0 || i == m {
            let (e, v, f) = sample(&state);
            series.push(i, time.t(i), &e, &v, &f);
        }
    }
    Ok(series)
}
