//! Executing an experiment and writing its artifacts.

use std::path::Path;

use obstring_core::diagnostics::{extract_contact, ContactReport};
use obstring_core::galerkin::integrate;
use obstring_core::{run, FieldKind, FieldSeries, RunOutput, SolverError, SpaceTime};

use crate::config::{self, Experiment, Format};
use crate::csv_io;
use crate::error::CliError;
use crate::heatmap::{render_heatmap, Figure, Palette};
use crate::manifest::{RunManifest, SolverKind, Snapshot};

pub const ENERGY_FILE: &str = "energy.csv";
pub const CONTACT_FILE: &str = "contact.csv";
pub const SNAPSHOT_FILE: &str = "snapshots.csv";
pub const GALERKIN_FILE: &str = "galerkin_eta.csv";

/// File stem for a stored field: `eta`, `velocity` or `penalty`.
pub fn stem(kind: FieldKind) -> &'static str {
    match kind {
        FieldKind::Eta => "eta",
        FieldKind::Velocity => "velocity",
        FieldKind::PenaltyForce => "penalty",
    }
}

pub fn field_file(kind: FieldKind) -> String {
    format!("{}.csv", stem(kind))
}

fn palette(kind: FieldKind) -> Palette {
    match kind {
        FieldKind::Velocity => Palette::Diverging,
        _ => Palette::Sequential,
    }
}

fn mask_matrix(report: &ContactReport) -> SpaceTime {
    let rows: Vec<Vec<f64>> = (0..report.rows())
        .map(|r| report.mask_row(r).iter().map(|&m| if m { 1.0 } else { 0.0 }).collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    SpaceTime::from_rows(cols, &rows)
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Everything a run produced.
#[derive(Debug)]
pub struct RunResult {
    pub manifest: RunManifest,
    pub fd: RunOutput,
    pub galerkin: Option<FieldSeries>,
}

/// Run the finite-difference solver (and the Galerkin oracle when configured)
/// and write every requested artifact into `out`.
pub fn execute(exp: &Experiment, out: &Path) -> Result<RunResult, CliError> {
    create_dir(out)?;
    let mut manifest = RunManifest::new(config::emit(&exp.file), out);
    let fd = manifest.phase("solve_fd", |_| run(&exp.sim))?;
    manifest.solvers.push(SolverKind::Fd);
    manifest.first_contact_time = fd.first_contact_time;

    let galerkin = match exp.galerkin {
        None => None,
        Some(opts) => {
            let sim = &exp.sim;
            match manifest.phase("solve_galerkin", |_| {
                integrate(sim.init(), sim.grid(), sim.time(), sim.physics(), opts)
            }) {
                Ok(s) => {
                    manifest.solvers.push(SolverKind::Galerkin);
                    Some(s)
                }
                Err(SolverError::Unsupported(why)) => {
                    manifest.notes.push(format!("galerkin skipped: {why}"));
                    None
                }
                Err(e) => return Err(e.into()),
            }
        }
    };

    let series = &fd.series;
    for &t in &exp.file.output.snapshots {
        let r = series.nearest_row(t);
        manifest.snapshots.push(Snapshot {
            requested: t,
            actual: series.times()[r],
        });
    }

    manifest.phase("write", |m| -> Result<(), CliError> {
        csv_io::write_energy(&out.join(ENERGY_FILE), &fd.ledger)?;
        m.add_file(out, ENERGY_FILE)?;
        let formats = &exp.file.output.formats;
        let xs = series.grid().coordinates();
        let report = extract_contact(series);
        if formats.contains(&Format::Csv) {
            for kind in FieldKind::ALL {
                let name = field_file(kind);
                csv_io::write_field(&out.join(&name), series.times(), &xs, series.field(kind))?;
                m.add_file(out, &name)?;
            }
            csv_io::write_mask(&out.join(CONTACT_FILE), series.times(), &xs, &report)?;
            m.add_file(out, CONTACT_FILE)?;
            if !m.snapshots.is_empty() {
                let rows: Vec<(f64, f64, &[f64])> = m
                    .snapshots
                    .iter()
                    .map(|s| (s.requested, s.actual, series.eta().row(series.nearest_row(s.requested))))
                    .collect();
                csv_io::write_snapshots(&out.join(SNAPSHOT_FILE), &xs, &rows)?;
                m.add_file(out, SNAPSHOT_FILE)?;
            }
            if let Some(g) = &galerkin {
                csv_io::write_field(&out.join(GALERKIN_FILE), g.times(), &xs, g.eta())?;
                m.add_file(out, GALERKIN_FILE)?;
            }
        }
        let (ppm, svg) = (formats.contains(&Format::Ppm), formats.contains(&Format::Svg));
        if ppm || svg {
            for name in write_heatmaps(series, &report, out, ppm, svg)? {
                m.add_file(out, &name)?;
            }
        }
        Ok(())
    })?;
    manifest.write(out)?;
    Ok(RunResult { manifest, fd, galerkin })
}

fn figure<'a>(title: &'a str, times: &[f64], length: f64, palette: Palette) -> Figure<'a> {
    Figure {
        title,
        t_range: (times[0], *times.last().expect("non-empty series")),
        x_range: (0.0, length),
        palette,
    }
}

fn write_heatmaps(
    series: &FieldSeries,
    report: &ContactReport,
    out: &Path,
    ppm: bool,
    svg: bool,
) -> Result<Vec<String>, CliError> {
    let l = series.grid().length();
    let mut names = Vec::new();
    for kind in FieldKind::ALL {
        let fig = figure(stem(kind), series.times(), l, palette(kind));
        names.extend(render_heatmap(series.field(kind), &fig, out, stem(kind), ppm, svg)?);
    }
    let fig = figure("contact", series.times(), l, Palette::Binary);
    names.extend(render_heatmap(&mask_matrix(report), &fig, out, "contact", ppm, svg)?);
    Ok(names
        .into_iter()
        .map(|p| p.file_name().expect("file path").to_string_lossy().into_owned())
        .collect())
}

/// Reload the configuration and stored fields of a finished run.
pub fn load_run(dir: &Path) -> Result<(RunManifest, Experiment, FieldSeries), CliError> {
    let manifest = RunManifest::read(dir)?;
    let exp = config::parse_config(&manifest.config, dir)?;
    let tables: Vec<csv_io::FieldTable> = FieldKind::ALL
        .iter()
        .map(|&k| csv_io::read_field(&dir.join(field_file(k))))
        .collect::<Result<_, _>>()?;
    let grid = exp.sim.grid();
    let dt = exp.sim.time().dt();
    if tables.iter().any(|t| t.xs.len() != grid.nodes() || t.times != tables[0].times) {
        return Err(CliError::Data(format!(
            "{}: field files do not match the configured grid",
            dir.display()
        )));
    }
    let mut series = FieldSeries::new(*grid, *exp.sim.physics(), dt);
    for (r, &t) in tables[0].times.iter().enumerate() {
        let step = (t / dt).round() as usize;
        series.push(step, t, tables[0].values.row(r), tables[1].values.row(r), tables[2].values.row(r));
    }
    Ok((manifest, exp, series))
}

/// Re-render heatmaps from the CSV files of a run directory.
pub fn render_dir(dir: &Path) -> Result<Vec<String>, CliError> {
    let (mut manifest, _, series) = load_run(dir)?;
    let report = extract_contact(&series);
    let names = manifest.phase("render", |_| write_heatmaps(&series, &report, dir, true, true))?;
    for n in &names {
        manifest.add_file(dir, n)?;
    }
    manifest.write(dir)?;
    Ok(names)
}
