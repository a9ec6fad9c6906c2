//! Grids, physical parameters, initial data and the validated run configuration.

use std::f64::consts::PI;

use crate::error::ConfigError;

/// Uniform grid on `[0, l]` with `cells` intervals and `cells + 1` nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    length: f64,
    cells: usize,
    dx: f64,
}

impl Grid1D {
    pub fn new(length: f64, cells: usize) -> Result<Self, ConfigError> {
        if !(length.is_finite() && length > 0.0) {
            return Err(ConfigError::new("grid.l", format!("must be finite and > 0, got {length}")));
        }
        if cells < 2 {
            return Err(ConfigError::new("grid.n", format!("need at least 2 cells, got {cells}")));
        }
        Ok(Self {
            length,
            cells,
            dx: length / cells as f64,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn nodes(&self) -> usize {
        self.cells + 1
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Node coordinate. `x(cells)` is exactly `length`.
    pub fn x(&self, j: usize) -> f64 {
        self.length * j as f64 / self.cells as f64
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.nodes()).map(|j| self.x(j)).collect()
    }

    /// Index of the node nearest to `x` (clamped to the grid).
    pub fn nearest_node(&self, x: f64) -> usize {
        let j = (x / self.dx).round();
        if j <= 0.0 {
            0
        } else {
            (j as usize).min(self.cells)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
    dt: f64,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self, ConfigError> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(ConfigError::new("time.T", format!("must be finite and > 0, got {horizon}")));
        }
        if steps < 1 {
            return Err(ConfigError::new("time.m", "need at least one step"));
        }
        Ok(Self {
            horizon,
            steps,
            dt: horizon / steps as f64,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t(&self, i: usize) -> f64 {
        self.horizon * i as f64 / self.steps as f64
    }
}

/// Viscoelastic coefficient and penalty parameter.
///
/// `epsilon = +inf` is accepted and switches the penalty off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physics {
    alpha: f64,
    epsilon: f64,
}

impl Physics {
    pub fn new(alpha: f64, epsilon: f64) -> Result<Self, ConfigError> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(ConfigError::new("physics.alpha", format!("must be finite and >= 0, got {alpha}")));
        }
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(ConfigError::new("physics.epsilon", format!("must be > 0, got {epsilon}")));
        }
        Ok(Self { alpha, epsilon })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `1/epsilon`, zero when the penalty is switched off.
    pub fn penalty_rate(&self) -> f64 {
        1.0 / self.epsilon
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    /// `eta0 = 1 + sin^2(10 pi x) / 2`, `v0 = -50`.
    Example1,
    /// Piecewise data with a ramp, a sine arch and a descending ramp; fast fall on `x < 0.6`.
    Example2,
    /// `eta0 = offset + amplitude sin(k pi x / l)`, `v0 = v0 sin(k pi x / l)`.
    SingleMode {
        amplitude: f64,
        mode: usize,
        offset: f64,
        v0: f64,
    },
    /// Node values on the run grid.
    Tabulated { eta0: Vec<f64>, v0: Vec<f64> },
}

impl InitialData {
    pub fn name(&self) -> &'static str {
        match self {
            InitialData::Example1 => "example1",
            InitialData::Example2 => "example2",
            InitialData::SingleMode { .. } => "single_mode",
            InitialData::Tabulated { .. } => "tabulated",
        }
    }

    /// Pointwise evaluation at an arbitrary `x` in `[0, l]`.
    ///
    /// Tabulated data is linearly interpolated on its own uniform grid.
    pub fn eval_at(&self, x: f64, length: f64) -> (f64, f64) {
        match self {
            InitialData::Example1 => example1(x),
            InitialData::Example2 => example2(x),
            InitialData::SingleMode {
                amplitude,
                mode,
                offset,
                v0,
            } => {
                let s = (*mode as f64 * PI * x / length).sin();
                (offset + amplitude * s, v0 * s)
            }
            InitialData::Tabulated { eta0, v0 } => {
                let cells = eta0.len().saturating_sub(1).max(1);
                let pos = (x / length * cells as f64).clamp(0.0, cells as f64);
                let j = (pos.floor() as usize).min(cells - 1);
                let w = pos - j as f64;
                let lerp = |v: &[f64]| v[j] * (1.0 - w) + v[(j + 1).min(v.len() - 1)] * w;
                (lerp(eta0), lerp(v0))
            }
        }
    }
}

fn example1(x: f64) -> (f64, f64) {
    let s = (10.0 * PI * x).sin();
    (1.0 + 0.5 * s * s, -50.0)
}

fn example2(x: f64) -> (f64, f64) {
    // The arch is sin(pi (x - 0.2) / 0.3) taken up to its first zero at x = 0.5;
    // its negative lobe on (0.5, 0.8) is clipped to the obstacle level.
    let eta = if x < 0.2 {
        x
    } else if x < 0.8 {
        (PI * (x - 0.2) / 0.3).sin().max(0.0)
    } else {
        2.0 - x
    };
    let v = if x < 0.6 { -50.0 } else { -0.5 };
    (eta, v)
}

/// Evaluate initial displacement and velocity at every grid node.
pub fn evaluate_initial(init: &InitialData, grid: &Grid1D) -> Result<(Vec<f64>, Vec<f64>), ConfigError> {
    let n = grid.cells();
    let (eta0, v0) = match init {
        InitialData::Tabulated { eta0, v0 } => {
            for (name, v) in [("init.eta0", eta0), ("init.v0", v0)] {
                if v.len() != grid.nodes() {
                    return Err(ConfigError::new(
                        name,
                        format!("expected {} values (n + 1), got {}", grid.nodes(), v.len()),
                    ));
                }
            }
            (eta0.clone(), v0.clone())
        }
        InitialData::Example1 => {
            // eta0 is reflection invariant; evaluating at the distance to the
            // nearer endpoint keeps the node vector exactly symmetric.
            (0..=n)
                .map(|j| example1(grid.x(j.min(n - j))))
                .unzip()
        }
        _ => (0..=n).map(|j| init.eval_at(grid.x(j), grid.length())).unzip(),
    };
    if let Some(j) = eta0.iter().chain(v0.iter()).position(|v| !v.is_finite()) {
        return Err(ConfigError::new("init", format!("non-finite initial value at entry {j}")));
    }
    if let Some(j) = eta0.iter().position(|&e| e < 0.0) {
        return Err(ConfigError::new(
            "init.eta0",
            format!("initial displacement below the obstacle at node {j} ({})", eta0[j]),
        ));
    }
    Ok((eta0, v0))
}

/// A validated experiment description.
///
/// Dirichlet values are pinned to the endpoint values of the evaluated
/// initial displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    grid: Grid1D,
    time: TimeGrid,
    physics: Physics,
    init: InitialData,
    boundary_left: f64,
    boundary_right: f64,
    output_stride: usize,
}

impl SimConfig {
    /// Validate and snap the boundary values. `output_stride = None` picks
    /// `max(1, m / 300)`.
    pub fn new(
        grid: Grid1D,
        time: TimeGrid,
        physics: Physics,
        init: InitialData,
        output_stride: Option<usize>,
    ) -> Result<Self, ConfigError> {
        let (eta0, _) = evaluate_initial(&init, &grid)?;
        let output_stride = match output_stride {
            Some(0) => return Err(ConfigError::new("output.stride", "must be >= 1")),
            Some(s) => s,
            None => (time.steps() / 300).max(1),
        };
        Ok(Self {
            grid,
            time,
            physics,
            init,
            boundary_left: eta0[0],
            boundary_right: eta0[grid.cells()],
            output_stride,
        })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn time(&self) -> &TimeGrid {
        &self.time
    }

    pub fn physics(&self) -> &Physics {
        &self.physics
    }

    pub fn init(&self) -> &InitialData {
        &self.init
    }

    pub fn boundary_left(&self) -> f64 {
        self.boundary_left
    }

    pub fn boundary_right(&self) -> f64 {
        self.boundary_right
    }

    pub fn output_stride(&self) -> usize {
        self.output_stride
    }

    pub fn with_output_stride(mut self, stride: usize) -> Result<Self, ConfigError> {
        if stride == 0 {
            return Err(ConfigError::new("output.stride", "must be >= 1"));
        }
        self.output_stride = stride;
        Ok(self)
    }

    pub fn with_physics(mut self, physics: Physics) -> Self {
        self.physics = physics;
        self
    }

    pub fn initial_fields(&self) -> (Vec<f64>, Vec<f64>) {
        // Validated at construction.
        evaluate_initial(&self.init, &self.grid).expect("initial data validated in SimConfig::new")
    }
}

/// Example presets: `l = 1`, `alpha = 0.01`, `epsilon = 0.0005`, `dt = dx = 1/5000`.
pub mod presets {
    use super::*;

    pub const PAPER_CELLS: usize = 5000;
    pub const ALPHA: f64 = 0.01;
    pub const EPSILON: f64 = 0.0005;

    /// Example 1 with `dt = dx = 1/cells`, horizon 0.3.
    pub fn example1(cells: usize, epsilon: f64) -> Result<SimConfig, ConfigError> {
        build(InitialData::Example1, 0.3, cells, epsilon)
    }

    /// Example 2 with `dt = dx = 1/cells`, horizon 0.5.
    pub fn example2(cells: usize, epsilon: f64) -> Result<SimConfig, ConfigError> {
        build(InitialData::Example2, 0.5, cells, epsilon)
    }

    fn build(init: InitialData, horizon: f64, cells: usize, epsilon: f64) -> Result<SimConfig, ConfigError> {
        let steps = (horizon * cells as f64).round() as usize;
        SimConfig::new(
            Grid1D::new(1.0, cells)?,
            TimeGrid::new(horizon, steps)?,
            Physics::new(ALPHA, epsilon)?,
            init,
            None,
        )
    }

    pub fn snapshot_times_example1() -> Vec<f64> {
        vec![0.0, 0.02, 0.04, 0.06, 0.2, 0.3]
    }

    pub fn snapshot_times_example2() -> Vec<f64> {
        vec![0.0, 0.04, 0.08, 0.16, 0.28, 0.32]
    }
}
