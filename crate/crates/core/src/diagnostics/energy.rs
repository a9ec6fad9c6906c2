//! Discrete energy ledger.
//!
//! Testing the scheme with `eta^{i+1} - eta^i` gives the exact balance
//!
//! ```text
//! E^{i+1} - E^i + alpha dt |D v^{i+1}|^2 + numdiss^{i+1} = dt <F^i, v^{i+1}>
//! ```
//!
//! where `E = 1/2 |v|^2 + 1/2 |D eta|^2`, `D` is the cell difference, and
//! `numdiss = 1/2 |v^{i+1} - v^i|^2 + 1/2 |D(eta^{i+1} - eta^i)|^2` is the
//! dissipation of the backward-Euler-type time discretization. All norms are
//! grid-weighted by `dx`.

use crate::model::SimConfig;
use crate::series::StringState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRow {
    pub step: usize,
    pub t: f64,
    pub kinetic: f64,
    pub elastic: f64,
    pub visc_dissip_cum: f64,
    pub contact_work_cum: f64,
    pub num_dissip_cum: f64,
    pub residual: f64,
}

impl EnergyRow {
    pub fn total(&self) -> f64 {
        self.kinetic + self.elastic
    }
}

/// One row per time level from level 1 (the first with a backward velocity).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnergyLedger {
    /// Energy of the initial data `(eta0, v0)` itself.
    pub initial_energy: f64,
    pub rows: Vec<EnergyRow>,
}

/// `1/2 sum v^2 dx`.
pub fn kinetic_energy(v: &[f64], dx: f64) -> f64 {
    0.5 * v.iter().map(|x| x * x).sum::<f64>() * dx
}

/// `1/2 sum ((eta_{j+1} - eta_j)/dx)^2 dx` over cells.
pub fn elastic_energy(eta: &[f64], dx: f64) -> f64 {
    0.5 * cell_gradient_sq(eta, dx) * dx
}

fn cell_gradient_sq(u: &[f64], dx: f64) -> f64 {
    u.windows(2)
        .map(|w| {
            let d = (w[1] - w[0]) / dx;
            d * d
        })
        .sum()
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

impl EnergyLedger {
    /// Open the ledger at the first level from the start-up state `(eta^0, eta^1)`.
    pub fn start(eta0: &[f64], v0: &[f64], first: &StringState, cfg: &SimConfig) -> Self {
        let dx = cfg.grid().dx();
        let dt = cfg.time().dt();
        let v1 = first.velocity(dt);
        let kinetic = kinetic_energy(&v1, dx);
        let elastic = elastic_energy(&first.eta_curr, dx);
        Self {
            initial_energy: kinetic_energy(v0, dx) + elastic_energy(eta0, dx),
            rows: vec![EnergyRow {
                step: first.step_index,
                t: cfg.time().t(first.step_index),
                kinetic,
                elastic,
                visc_dissip_cum: 0.0,
                contact_work_cum: 0.0,
                num_dissip_cum: 0.0,
                residual: 0.0,
            }],
        }
    }

    /// Append the row for `next = (eta^i, eta^{i+1})` given `prev = (eta^{i-1}, eta^i)`
    /// and the explicit force `F^i`.
    pub fn energy_step(&mut self, prev: &StringState, next: &StringState, penalty: &[f64], cfg: &SimConfig) {
        let dx = cfg.grid().dx();
        let dt = cfg.time().dt();
        let alpha = cfg.physics().alpha();
        let last = *self.rows.last().expect("ledger opened with start()");

        let v_old = prev.velocity(dt);
        let v_new = next.velocity(dt);
        let visc = alpha * dt * cell_gradient_sq(&v_new, dx) * dx;
        let work = dt * penalty.iter().zip(&v_new).map(|(f, v)| f * v).sum::<f64>() * dx;
        let numdiss = kinetic_energy(&diff(&v_new, &v_old), dx)
            + elastic_energy(&diff(&next.eta_curr, &prev.eta_curr), dx);

        let mut row = EnergyRow {
            step: next.step_index,
            t: cfg.time().t(next.step_index),
            kinetic: kinetic_energy(&v_new, dx),
            elastic: elastic_energy(&next.eta_curr, dx),
            visc_dissip_cum: last.visc_dissip_cum + visc,
            contact_work_cum: last.contact_work_cum + work,
            num_dissip_cum: last.num_dissip_cum + numdiss,
            residual: 0.0,
        };
        row.residual = self.residual_of(&row);
        self.rows.push(row);
    }

    /// `E(t) - E(first) + visc - work`; equals `-num_dissip_cum` up to the solve residual.
    pub fn residual_of(&self, row: &EnergyRow) -> f64 {
        let e0 = self.rows.first().map_or(row.total(), EnergyRow::total);
        row.total() - e0 + row.visc_dissip_cum - row.contact_work_cum
    }

    /// Reference energy for tolerances: the larger of the data energy and the first row.
    pub fn reference_energy(&self) -> f64 {
        self.rows
            .first()
            .map_or(self.initial_energy, |r| r.total().max(self.initial_energy))
    }

    /// Count steps where `kinetic + elastic` rises by more than `tol_rel * E(0)`.
    pub fn monotonicity_violations(&self, tol_rel: f64) -> usize {
        let tol = tol_rel * self.reference_energy();
        self.rows
            .windows(2)
            .filter(|w| w[1].total() - w[0].total() > tol)
            .count()
    }

    /// Largest violation of `residual + num_dissip_cum = 0`.
    pub fn balance_defect(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.residual + r.num_dissip_cum).abs())
            .fold(0.0, f64::max)
    }

    pub fn final_contact_work(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.contact_work_cum)
    }
}
