//! Discrete state and strided space-time storage.

use crate::model::{Grid1D, Physics};

/// Two consecutive displacement levels `eta^{i-1}`, `eta^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StringState {
    pub step_index: usize,
    pub eta_prev: Vec<f64>,
    pub eta_curr: Vec<f64>,
}

impl StringState {
    /// Backward-difference velocity `(eta^i - eta^{i-1}) / dt`.
    pub fn velocity(&self, dt: f64) -> Vec<f64> {
        self.eta_curr
            .iter()
            .zip(&self.eta_prev)
            .map(|(c, p)| (c - p) / dt)
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.eta_curr.iter().chain(&self.eta_prev).all(|v| v.is_finite())
    }
}

/// Row-major matrix: one row per stored time level, one column per node.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpaceTime {
    cols: usize,
    data: Vec<f64>,
}

impl SpaceTime {
    pub fn new(cols: usize) -> Self {
        Self { cols, data: Vec::new() }
    }

    pub fn from_rows(cols: usize, rows: &[Vec<f64>]) -> Self {
        let mut m = Self::new(cols);
        for r in rows {
            m.push_row(r);
        }
        m
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        if self.cols == 0 {
            0
        } else {
            self.data.len() / self.cols
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.cols, "row length mismatch");
        self.data.extend_from_slice(row);
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.cols.max(1))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Eta,
    Velocity,
    PenaltyForce,
}

impl FieldKind {
    pub const ALL: [FieldKind; 3] = [FieldKind::Eta, FieldKind::Velocity, FieldKind::PenaltyForce];

    pub fn name(&self) -> &'static str {
        match self {
            FieldKind::Eta => "eta",
            FieldKind::Velocity => "velocity",
            FieldKind::PenaltyForce => "penalty_force",
        }
    }
}

/// Stored displacement, velocity and penalty fields.
///
/// Row `r` holds solver level `steps[r]` at time `times[r]`. Velocity is the
/// backward difference ending at that level; the penalty row is the force
/// computed from that level and the one before it.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSeries {
    grid: Grid1D,
    physics: Physics,
    dt: f64,
    times: Vec<f64>,
    steps: Vec<usize>,
    eta: SpaceTime,
    velocity: SpaceTime,
    penalty: SpaceTime,
}

impl FieldSeries {
    pub fn new(grid: Grid1D, physics: Physics, dt: f64) -> Self {
        let n = grid.nodes();
        Self {
            grid,
            physics,
            dt,
            times: Vec::new(),
            steps: Vec::new(),
            eta: SpaceTime::new(n),
            velocity: SpaceTime::new(n),
            penalty: SpaceTime::new(n),
        }
    }

    /// Append one level. Panics if `t` does not increase or a row has the wrong length.
    pub fn push(&mut self, step: usize, t: f64, eta: &[f64], velocity: &[f64], penalty: &[f64]) {
        if let Some(&last) = self.times.last() {
            assert!(t > last, "stored times must increase ({t} after {last})");
        }
        self.times.push(t);
        self.steps.push(step);
        self.eta.push_row(eta);
        self.velocity.push_row(velocity);
        self.penalty.push_row(penalty);
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn physics(&self) -> &Physics {
        &self.physics
    }

    /// Solver time step (not the stored spacing).
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn field(&self, kind: FieldKind) -> &SpaceTime {
        match kind {
            FieldKind::Eta => &self.eta,
            FieldKind::Velocity => &self.velocity,
            FieldKind::PenaltyForce => &self.penalty,
        }
    }

    pub fn eta(&self) -> &SpaceTime {
        &self.eta
    }

    pub fn velocity(&self) -> &SpaceTime {
        &self.velocity
    }

    pub fn penalty(&self) -> &SpaceTime {
        &self.penalty
    }

    /// True when every stored level is consecutive (stride 1).
    pub fn is_dense(&self) -> bool {
        self.steps.windows(2).all(|w| w[1] == w[0] + 1)
    }

    /// Quadrature weight of stored row `r`: the time span it represents,
    /// `t_r - t_{r-1}` (zero for the first row).
    pub fn time_weight(&self, r: usize) -> f64 {
        if r == 0 {
            0.0
        } else {
            self.times[r] - self.times[r - 1]
        }
    }

    /// Common spacing of the stored times, if uniform to rounding.
    pub fn uniform_spacing(&self) -> Option<f64> {
        if self.times.len() < 2 {
            return None;
        }
        let h = (self.times[self.times.len() - 1] - self.times[0]) / (self.times.len() - 1) as f64;
        let uniform = self
            .times
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
        uniform.then_some(h)
    }

    /// Row whose time is nearest to `t`.
    pub fn nearest_row(&self, t: f64) -> usize {
        let mut best = 0;
        for (r, &tr) in self.times.iter().enumerate() {
            if (tr - t).abs() < (self.times[best] - t).abs() {
                best = r;
            }
        }
        best
    }
}
