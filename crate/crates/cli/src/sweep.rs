//! Parameter sweeps: one run per value, compared on the coarsest grid.

use std::fmt::Write as _;
use std::path::Path;

use obstring_core::analytic::single_mode_field;
use obstring_core::diagnostics::contact::penetration_metrics;
use obstring_core::{FieldSeries, InitialData};
use rayon::prelude::*;

use crate::config::{self, ConfigFile, GalerkinSection};
use crate::csv_io::num;
use crate::error::{CliError, ConfigError};
use crate::runner::{self, RunResult};

pub const SWEEP_FILE: &str = "sweep.csv";
pub const THREADS_VAR: &str = "OBSTRING_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    /// penalty parameter
    Epsilon,
    /// `dt = dx = value`
    #[value(name = "dt_dx")]
    DtDx,
    /// Galerkin mode count
    Modes,
}

/// Per-run results of a sweep. Comparison columns refer to the previous run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    /// `ok` or the error message
    pub status: String,
    pub cells: usize,
    pub steps: usize,
    pub max_pointwise: f64,
    pub max_l1: f64,
    pub linf_diff_prev: f64,
    pub l2_diff_prev: f64,
    pub slope_diff: f64,
    pub analytic_linf: f64,
    pub slope_analytic: f64,
    pub slope_penetration: f64,
}

/// Comma-separated values; `a/b` fractions are accepted.
pub fn parse_values(text: &str) -> Result<Vec<f64>, ConfigError> {
    let bad = |reason: String| ConfigError {
        line: None,
        field: "--values".into(),
        reason,
    };
    let values = text
        .split(',')
        .map(|s| {
            let s = s.trim();
            let v = match s.split_once('/') {
                Some((a, b)) => a.trim().parse::<f64>().ok().zip(b.trim().parse::<f64>().ok()).map(|(a, b)| a / b),
                None => s.parse().ok(),
            };
            v.filter(|v: &f64| v.is_finite() && *v > 0.0)
                .ok_or_else(|| bad(format!("not a positive number: {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() < 2 {
        return Err(bad("a sweep needs at least two values".into()));
    }
    let up = values.windows(2).all(|w| w[1] > w[0]);
    let down = values.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(bad("values must be strictly sorted".into()));
    }
    Ok(values)
}

fn variant(base: &ConfigFile, axis: Axis, value: f64) -> Result<ConfigFile, ConfigError> {
    let mut f = base.clone();
    match axis {
        Axis::Epsilon => f.physics.epsilon = value,
        Axis::DtDx => {
            f.grid.n = (f.grid.l / value).round() as usize;
            f.time.m = (f.time.horizon / value).round() as usize;
            if (f.grid.l / f.grid.n as f64 - value).abs() > 1e-9 * value {
                return Err(ConfigError {
                    line: None,
                    field: "--values".into(),
                    reason: format!("dt = dx = {value} does not divide l = {}", f.grid.l),
                });
            }
        }
        Axis::Modes => {
            if value.fract() != 0.0 {
                return Err(ConfigError {
                    line: None,
                    field: "--values".into(),
                    reason: format!("mode count must be an integer, got {value}"),
                });
            }
            let delta_vel = f.galerkin.as_ref().and_then(|g| g.delta_vel);
            f.galerkin = Some(GalerkinSection {
                modes: value as usize,
                delta_vel,
            });
        }
    }
    Ok(f)
}

fn thread_count() -> Result<usize, ConfigError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(0),
        Ok(s) => s.trim().parse::<usize>().ok().filter(|&n| n >= 1).ok_or(ConfigError {
            line: None,
            field: THREADS_VAR.into(),
            reason: format!("must be a positive integer, got {s:?}"),
        }),
    }
}

/// Final displacement linearly interpolated at `x`.
fn final_at(series: &FieldSeries, x: f64) -> f64 {
    let g = series.grid();
    let row = series.eta().row(series.len() - 1);
    let pos = (x / g.dx()).clamp(0.0, g.cells() as f64);
    let j = (pos.floor() as usize).min(g.cells() - 1);
    let w = pos - j as f64;
    row[j] * (1.0 - w) + row[j + 1] * w
}

fn slope(a: f64, b: f64, va: f64, vb: f64) -> f64 {
    if a > 0.0 && b > 0.0 {
        (b / a).ln() / (vb / va).ln()
    } else {
        f64::NAN
    }
}

/// Run every value of `axis` in a worker pool. Each run writes into
/// `out/run_<k>`; failures are recorded and the sweep continues.
pub fn sweep(base: &ConfigFile, axis: Axis, values: &[f64], out: &Path) -> Result<Vec<SweepRow>, CliError> {
    if values.len() < 2 {
        return Err(ConfigError {
            line: None,
            field: "--values".into(),
            reason: "a sweep needs at least two values".into(),
        }
        .into());
    }
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count()?)
        .build()
        .map_err(|e| CliError::Data(format!("worker pool: {e}")))?;

    let runs: Vec<Result<(FieldSeries, Option<f64>), String>> = pool.install(|| {
        values
            .par_iter()
            .enumerate()
            .map(|(k, &v)| {
                let file = variant(base, axis, v).map_err(|e| e.to_string())?;
                let text = config::emit(&file);
                let exp = config::build(file, &text, Path::new("")).map_err(|e| e.to_string())?;
                let RunResult { fd, galerkin, .. } =
                    runner::execute(&exp, &out.join(format!("run_{k}"))).map_err(|e| e.to_string())?;
                let series = match axis {
                    Axis::Modes => galerkin.ok_or("galerkin oracle unavailable for this initial data")?,
                    _ => fd.series,
                };
                let analytic = match exp.sim.init() {
                    InitialData::SingleMode { .. } => {
                        let t = *series.times().last().expect("non-empty series");
                        let exact = single_mode_field(exp.sim.init(), exp.sim.grid(), exp.sim.physics(), t)
                            .map_err(|e| e.to_string())?;
                        let last = series.eta().row(series.len() - 1);
                        Some(last.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                    }
                    _ => None,
                };
                Ok((series, analytic))
            })
            .collect()
    });

    let coarse = runs
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .map(|(s, _)| *s.grid())
        .min_by_key(|g| g.cells());
    let mut rows: Vec<SweepRow> = Vec::with_capacity(values.len());
    let mut prev: Option<(usize, &FieldSeries)> = None;
    for (k, (run, &v)) in runs.iter().zip(values).enumerate() {
        let mut row = SweepRow {
            value: v,
            status: "ok".into(),
            cells: 0,
            steps: 0,
            max_pointwise: f64::NAN,
            max_l1: f64::NAN,
            linf_diff_prev: f64::NAN,
            l2_diff_prev: f64::NAN,
            slope_diff: f64::NAN,
            analytic_linf: f64::NAN,
            slope_analytic: f64::NAN,
            slope_penetration: f64::NAN,
        };
        match run {
            Err(e) => row.status = format!("error: {e}"),
            Ok((series, analytic)) => {
                row.cells = series.grid().cells();
                row.steps = *series.steps().last().expect("non-empty series");
                (row.max_pointwise, row.max_l1) = penetration_metrics(series);
                row.analytic_linf = analytic.unwrap_or(f64::NAN);
                if let (Some((p, ps)), Some(g)) = (prev, coarse) {
                    let (mut linf, mut l2): (f64, f64) = (0.0, 0.0);
                    for j in 0..=g.cells() {
                        let d = final_at(series, g.x(j)) - final_at(ps, g.x(j));
                        linf = linf.max(d.abs());
                        l2 += d * d * g.dx();
                    }
                    row.linf_diff_prev = linf;
                    row.l2_diff_prev = l2.sqrt();
                    let before = &rows[p];
                    row.slope_penetration = slope(before.max_l1, row.max_l1, before.value, v);
                    row.slope_analytic = slope(before.analytic_linf, row.analytic_linf, before.value, v);
                    row.slope_diff = slope(before.linf_diff_prev, row.linf_diff_prev, before.value, v);
                }
                prev = Some((k, series));
            }
        }
        rows.push(row);
    }

    let path = out.join(SWEEP_FILE);
    std::fs::write(&path, sweep_text(axis, &rows)).map_err(|e| CliError::io(&path, e))?;
    Ok(rows)
}

fn cell(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        num(v)
    }
}

pub fn sweep_text(axis: Axis, rows: &[SweepRow]) -> String {
    let name = match axis {
        Axis::Epsilon => "epsilon",
        Axis::DtDx => "dt_dx",
        Axis::Modes => "modes",
    };
    let mut out = format!(
        "index,{name},status,n,m,max_pointwise_penetration,max_l1_penetration,linf_diff_prev,l2_diff_prev,\
         slope_diff,analytic_linf,slope_analytic,slope_penetration\n"
    );
    for (k, r) in rows.iter().enumerate() {
        let _ = writeln!(
            out,
            "{k},{},{},{},{},{},{},{},{},{},{},{},{}",
            num(r.value),
            r.status.replace(',', ";"),
            r.cells,
            r.steps,
            cell(r.max_pointwise),
            cell(r.max_l1),
            cell(r.linf_diff_prev),
            cell(r.l2_diff_prev),
            cell(r.slope_diff),
            cell(r.analytic_linf),
            cell(r.slope_analytic),
            cell(r.slope_penetration)
        );
    }
    out
}
