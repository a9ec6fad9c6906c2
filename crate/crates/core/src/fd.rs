//! Finite-difference time stepping.
//!
//! At interior nodes the scheme reads
//!
//! ```text
//! (eta^{i+1} - 2 eta^i + eta^{i-1}) / dt^2 - (alpha/dt) L (eta^{i+1} - eta^i) - L eta^{i+1} = F^i
//! ```
//!
//! with `L` the second difference over `dx^2` and the penalty `F^i` taken
//! explicitly from levels `i` and `i-1`. The left-hand operator is constant,
//! so it is factored once per run.

use crate::diagnostics::energy::EnergyLedger;
use crate::error::SolverError;
use crate::model::SimConfig;
use crate::series::{FieldSeries, StringState};
use crate::trisolve::{assemble_step_matrix, ThomasFactor};

/// `F_j = (1/eps) [eta_j < 0] max(0, -(eta_j - eta_prev_j)/dt)`, zero at the end nodes.
pub fn penalty_force(eta_curr: &[f64], eta_prev: &[f64], dt: f64, epsilon: f64) -> Vec<f64> {
    let n = eta_curr.len();
    let rate = 1.0 / epsilon;
    let mut f = vec![0.0; n];
    for j in 1..n.saturating_sub(1) {
        if eta_curr[j] < 0.0 {
            let down = -(eta_curr[j] - eta_prev[j]) / dt;
            if down > 0.0 {
                f[j] = rate * down;
            }
        }
    }
    f
}

/// First-order start: `eta^1 = eta^0 + dt v^0`, end nodes kept at `eta^0`.
pub fn first_step(eta0: &[f64], v0: &[f64], dt: f64) -> StringState {
    let n = eta0.len();
    let mut eta1: Vec<f64> = eta0.iter().zip(v0).map(|(e, v)| e + dt * v).collect();
    eta1[0] = eta0[0];
    eta1[n - 1] = eta0[n - 1];
    StringState {
        step_index: 1,
        eta_prev: eta0.to_vec(),
        eta_curr: eta1,
    }
}

/// Advance one step. Returns the new state and the force `F^i` that drove it.
pub fn step(
    state: &StringState,
    factor: &ThomasFactor,
    cfg: &SimConfig,
) -> Result<(StringState, Vec<f64>), SolverError> {
    let n = state.eta_curr.len();
    let dt = cfg.time().dt();
    let dx2 = cfg.grid().dx() * cfg.grid().dx();
    let alpha = cfg.physics().alpha();
    let coupling = (alpha / dt + 1.0) / dx2;
    let (bl, br) = (cfg.boundary_left(), cfg.boundary_right());

    let force = penalty_force(&state.eta_curr, &state.eta_prev, dt, cfg.physics().epsilon());
    let eta = &state.eta_curr;
    let prev = &state.eta_prev;

    let mut rhs: Vec<f64> = (1..n - 1)
        .map(|j| {
            let lap = (eta[j - 1] - 2.0 * eta[j] + eta[j + 1]) / dx2;
            force[j] + (2.0 * eta[j] - prev[j]) / (dt * dt) - alpha / dt * lap
        })
        .collect();
    rhs[0] += coupling * bl;
    let last = rhs.len() - 1;
    rhs[last] += coupling * br;
    factor.solve_in_place(&mut rhs)?;

    let mut next = Vec::with_capacity(n);
    next.push(bl);
    next.extend_from_slice(&rhs);
    next.push(br);
    Ok((
        StringState {
            step_index: state.step_index + 1,
            eta_prev: state.eta_curr.clone(),
            eta_curr: next,
        },
        force,
    ))
}

/// Max interior residual of the scheme for the triple `(eta^{i-1}, eta^i, eta^{i+1})`
/// with force `F^i`.
pub fn scheme_residual(
    eta_prev: &[f64],
    eta_curr: &[f64],
    eta_next: &[f64],
    force: &[f64],
    cfg: &SimConfig,
) -> f64 {
    let dt = cfg.time().dt();
    let dx2 = cfg.grid().dx() * cfg.grid().dx();
    let alpha = cfg.physics().alpha();
    let lap = |u: &[f64], j: usize| (u[j - 1] - 2.0 * u[j] + u[j + 1]) / dx2;
    (1..eta_curr.len() - 1)
        .map(|j| {
            let accel = (eta_next[j] - 2.0 * eta_curr[j] + eta_prev[j]) / (dt * dt);
            let visc = alpha / dt * (lap(eta_next, j) - lap(eta_curr, j));
            (accel - visc - lap(eta_next, j) - force[j]).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub series: FieldSeries,
    pub ledger: EnergyLedger,
    /// Earliest level with an interior node at or below zero or under force,
    /// tracked at every solver step.
    pub first_contact_time: Option<f64>,
}

fn in_contact(eta: &[f64], force: &[f64]) -> bool {
    let n = eta.len();
    (1..n - 1).any(|j| eta[j] <= 0.0 || force[j] > 0.0)
}

/// Run the full simulation.
pub fn run(cfg: &SimConfig) -> Result<RunOutput, SolverError> {
    let grid = cfg.grid();
    let time = cfg.time();
    let dt = time.dt();
    let m = time.steps();
    let stride = cfg.output_stride();
    let factor = assemble_step_matrix(grid, time, cfg.physics()).factor()?;

    let (eta0, v0) = cfg.initial_fields();
    let n = eta0.len();
    let mut series = FieldSeries::new(*grid, *cfg.physics(), dt);
    let zeros = vec![0.0; n];
    let mut v_stored = v0.clone();
    v_stored[0] = 0.0;
    v_stored[n - 1] = 0.0;
    series.push(0, 0.0, &eta0, &v_stored, &zeros);

    let mut first_contact = in_contact(&eta0, &zeros).then_some(0.0);

    let mut state = first_step(&eta0, &v0, dt);
    if !state.is_finite() {
        return Err(SolverError::Blowup { step: 1 });
    }
    let mut ledger = EnergyLedger::start(&eta0, &v0, &state, cfg);
    // F^1 is only known once the second step is taken; levels are stored as
    // they complete together with their own force.
    let mut pending_store = stride == 1 || m == 1;
    if m == 1 {
        let f1 = penalty_force(&state.eta_curr, &state.eta_prev, dt, cfg.physics().epsilon());
        if first_contact.is_none() && in_contact(&state.eta_curr, &f1) {
            first_contact = Some(time.t(1));
        }
        series.push(1, time.t(1), &state.eta_curr, &state.velocity(dt), &f1);
        pending_store = false;
    }

    for i in 1..m {
        let (next, force) = step(&state, &factor, cfg)?;
        if !next.is_finite() {
            return Err(SolverError::Blowup { step: i + 1 });
        }
        if first_contact.is_none() && in_contact(&state.eta_curr, &force) {
            first_contact = Some(time.t(i));
        }
        if pending_store {
            series.push(i, time.t(i), &state.eta_curr, &state.velocity(dt), &force);
        }
        ledger.energy_step(&state, &next, &force, cfg);
        state = next;
        let level = i + 1;
        pending_store = level % stride == 0 || level == m;
    }

    if m > 1 {
        let f_last = penalty_force(&state.eta_curr, &state.eta_prev, dt, cfg.physics().epsilon());
        if first_contact.is_none() && in_contact(&state.eta_curr, &f_last) {
            first_contact = Some(time.t(m));
        }
        series.push(m, time.t(m), &state.eta_curr, &state.velocity(dt), &f_last);
    }

    Ok(RunOutput {
        series,
        ledger,
        first_contact_time: first_contact,
    })
}

/// Largest scheme residual over consecutive stored triples, each normalized by
/// `(1/dt^2) max|eta^{i+1}|`. Only meaningful for stride-1 series.
pub fn stored_scheme_residual(series: &FieldSeries, cfg: &SimConfig) -> f64 {
    let eta = series.eta();
    let force = series.penalty();
    let steps = series.steps();
    let dt = cfg.time().dt();
    let mut worst: f64 = 0.0;
    for r in 1..series.len().saturating_sub(1) {
        if steps[r - 1] + 1 != steps[r] || steps[r] + 1 != steps[r + 1] {
            continue;
        }
        let res = scheme_residual(eta.row(r - 1), eta.row(r), eta.row(r + 1), force.row(r), cfg);
        let scale = eta.row(r + 1).iter().map(|v| v.abs()).fold(0.0, f64::max) / (dt * dt);
        worst = worst.max(res / scale.max(f64::MIN_POSITIVE));
    }
    worst
}
