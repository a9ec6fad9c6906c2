//! Diagnostics over a finished run directory.

use std::fmt::Write as _;
use std::path::Path;

use obstring_core::diagnostics::contact::Side;
use obstring_core::diagnostics::{
    builtin_family, dissipation_estimate, extract_contact, local_energy_residual, renormalized_residual,
    stress_jump_probe, velocity_jump_probe, weak_momentum_residual, MollifierKernel, Renormalization, TraceSide,
    WeakResidual, zero_trace_residual,
};
use obstring_core::{FieldSeries, ProbeError};

use crate::config::{ProbeKind, ProbeSection};
use crate::csv_io::num;
use crate::error::CliError;
use crate::runner::load_run;

pub const PROBE_FILE: &str = "probes.csv";

/// Boundary curves shorter than this are not considered resolved.
const MIN_CURVE_POINTS: usize = 10;
/// Allowed relative disagreement between stress jump and penalty mass.
const STRESS_AGREEMENT: f64 = 0.25;
/// Allowed ratio of post- to pre-contact velocity at the shortest window.
const VELOCITY_DECAY: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub probe: ProbeKind,
    pub item: String,
    pub value: f64,
    /// reference magnitude for `value`
    pub scale: f64,
    pub ok: bool,
}

impl ProbeRow {
    fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.value / self.scale
        }
    }
}

fn weak_row(probe: ProbeKind, item: String, r: WeakResidual, ok: bool) -> ProbeRow {
    ProbeRow {
        probe,
        item,
        value: r.value,
        scale: r.scale,
        ok,
    }
}

/// Run `kinds` over `series` with the given settings.
pub fn probe_series(series: &FieldSeries, kinds: &[ProbeKind], cfg: &ProbeSection) -> Result<Vec<ProbeRow>, ProbeError> {
    let l = series.grid().length();
    let horizon = *series.times().last().ok_or_else(|| ProbeError::new("empty series"))?;
    let family = builtin_family(l, horizon);
    let dx = series.grid().dx();
    let tol = cfg.tolerance;
    let mut rows = Vec::new();
    let report = extract_contact(series);
    let curves: Vec<_> = report
        .boundary_graphs
        .iter()
        .filter(|g| g.len() >= MIN_CURVE_POINTS)
        .collect();

    for &kind in kinds {
        match kind {
            ProbeKind::Momentum | ProbeKind::Energy | ProbeKind::Renormalized => {
                for (k, phi) in family.iter().enumerate() {
                    let r = match kind {
                        ProbeKind::Momentum => weak_momentum_residual(series, phi)?,
                        ProbeKind::Energy => local_energy_residual(series, phi)?,
                        _ => renormalized_residual(series, phi, Renormalization::Square)?,
                    };
                    let ok = match kind {
                        ProbeKind::Renormalized => r.value >= -tol * r.scale,
                        _ => r.value.abs() <= tol * r.scale,
                    };
                    rows.push(weak_row(kind, format!("phi{k}"), r, ok));
                }
            }
            ProbeKind::Dissipation => {
                let mut last = f64::INFINITY;
                for &w in &cfg.omega {
                    let est = dissipation_estimate(series, &MollifierKernel::new(w * dx)?)?;
                    rows.push(ProbeRow {
                        probe: kind,
                        item: format!("omega={w}dx"),
                        value: est.negative_fraction,
                        scale: 1.0,
                        ok: est.negative_fraction <= last,
                    });
                    last = est.negative_fraction;
                }
            }
            ProbeKind::StressJump => {
                for (k, g) in curves.iter().enumerate() {
                    let sj = stress_jump_probe(series, g, cfg.tube * dx)?;
                    let big = sj.jump.abs().max(sj.penalty_mass.abs());
                    let (t0, t1) = g.t_range();
                    rows.push(ProbeRow {
                        probe: kind,
                        item: format!("curve{k}[t={t0:.4}..{t1:.4}] penalty_mass={}", num(sj.penalty_mass)),
                        value: sj.jump,
                        scale: sj.penalty_mass,
                        ok: (sj.jump - sj.penalty_mass).abs() <= STRESS_AGREEMENT * big
                            && sj.jump >= 0.0
                            && sj.penalty_mass >= 0.0,
                    });
                }
            }
            ProbeKind::VelocityJump => {
                let [x0, x1] = cfg.segment;
                let g = series.grid();
                let nodes: Vec<usize> = (0..g.nodes())
                    .filter(|&j| g.x(j) >= x0 - 1e-12 && g.x(j) <= x1 + 1e-12)
                    .collect();
                let Some(row) = (0..report.rows()).find(|&r| nodes.iter().all(|&j| report.mask_row(r)[j])) else {
                    return Err(ProbeError::new(format!("segment [{x0}, {x1}] is never fully in contact")));
                };
                let t1 = series.times()[row];
                let deltas: Vec<f64> = cfg.windows.iter().map(|k| k * series.dt()).collect();
                let jumps = velocity_jump_probe(series, t1, x0, x1, &deltas, &|_| 1.0)?;
                let mut last = f64::INFINITY;
                for (j, k) in jumps.iter().zip(&cfg.windows) {
                    let post = j.post_mean.abs();
                    rows.push(ProbeRow {
                        probe: kind,
                        item: format!("t1={t1:.5} delta={k}dt"),
                        value: j.post_mean,
                        scale: j.pre_mean,
                        ok: post <= last && post <= VELOCITY_DECAY * j.pre_mean.abs(),
                    });
                    last = post;
                }
            }
            ProbeKind::ZeroTrace => {
                for (k, g) in curves.iter().enumerate().filter(|(_, g)| g.is_monotone()) {
                    // the region on the contact side of the curve
                    let side = match g.side {
                        Side::Right => TraceSide::Right,
                        Side::Left => TraceSide::Left,
                    };
                    for (p, phi) in family.iter().enumerate() {
                        let r = zero_trace_residual(series, g, phi, side)?;
                        rows.push(weak_row(kind, format!("curve{k}/phi{p}"), r, r.value.abs() <= tol * r.scale));
                    }
                }
            }
        }
    }
    Ok(rows)
}

pub fn rows_text(rows: &[ProbeRow]) -> String {
    let mut out = String::from("probe,item,value,scale,relative,status\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.probe.name(),
            r.item,
            num(r.value),
            num(r.scale),
            num(r.relative()),
            if r.ok { "ok" } else { "violated" }
        );
    }
    out
}

/// Probe a run directory, write `probes.csv` and list it in the manifest.
/// An empty `kinds` means the configured set, or all probes.
pub fn probe_dir(dir: &Path, kinds: &[ProbeKind]) -> Result<Vec<ProbeRow>, CliError> {
    let (mut manifest, exp, series) = load_run(dir)?;
    let cfg = exp.probes();
    let kinds = if kinds.is_empty() { cfg.enabled.clone() } else { kinds.to_vec() };
    let rows = manifest.phase("probe", |_| probe_series(&series, &kinds, &cfg))?;
    let path = dir.join(PROBE_FILE);
    std::fs::write(&path, rows_text(&rows)).map_err(|e| CliError::io(&path, e))?;
    manifest.add_file(dir, PROBE_FILE)?;
    manifest.write(dir)?;
    Ok(rows)
}
