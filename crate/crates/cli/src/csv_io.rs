//! Plain CSV with a header row. Numbers carry 17 significant digits, enough to
//! read every `f64` back bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use obstring_core::diagnostics::{ContactReport, EnergyLedger};
use obstring_core::SpaceTime;

use crate::error::CliError;

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Header `t,<x_0>,...,<x_N>`, then one row per stored time.
pub fn field_text(times: &[f64], xs: &[f64], field: &SpaceTime) -> String {
    let mut out = String::with_capacity(field.rows() * (field.cols() + 1) * 24);
    out.push('t');
    for &x in xs {
        out.push(',');
        out.push_str(&num(x));
    }
    out.push('\n');
    for (r, &t) in times.iter().enumerate() {
        out.push_str(&num(t));
        for &v in field.row(r) {
            out.push(',');
            out.push_str(&num(v));
        }
        out.push('\n');
    }
    out
}

pub fn write_field(path: &Path, times: &[f64], xs: &[f64], field: &SpaceTime) -> Result<(), CliError> {
    write(path, &field_text(times, xs, field))
}

/// Stored times, node coordinates and values of a field file.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldTable {
    pub times: Vec<f64>,
    pub xs: Vec<f64>,
    pub values: SpaceTime,
}

pub fn parse_field(text: &str) -> Result<FieldTable, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or("empty file")?;
    let mut cells = header.split(',');
    if cells.next().map(str::trim) != Some("t") {
        return Err("header must start with `t`".into());
    }
    let xs = cells.map(parse_num).collect::<Result<Vec<_>, _>>()?;
    let mut times = Vec::new();
    let mut values = SpaceTime::new(xs.len());
    for (i, line) in lines.enumerate() {
        let row = line.split(',').map(parse_num).collect::<Result<Vec<_>, _>>()?;
        if row.len() != xs.len() + 1 {
            return Err(format!("row {} has {} values, expected {}", i + 2, row.len(), xs.len() + 1));
        }
        times.push(row[0]);
        values.push_row(&row[1..]);
    }
    Ok(FieldTable { times, xs, values })
}

pub fn read_field(path: &Path) -> Result<FieldTable, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_field(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn parse_num(s: &str) -> Result<f64, String> {
    s.trim().parse().map_err(|_| format!("not a number: {s:?}"))
}

pub const ENERGY_HEADER: &str =
    "step,t,kinetic,elastic,total,visc_dissip_cum,contact_work_cum,num_dissip_cum,residual";

pub fn write_energy(path: &Path, ledger: &EnergyLedger) -> Result<(), CliError> {
    let mut out = String::from(ENERGY_HEADER);
    out.push('\n');
    for r in &ledger.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.step,
            num(r.t),
            num(r.kinetic),
            num(r.elastic),
            num(r.total()),
            num(r.visc_dissip_cum),
            num(r.contact_work_cum),
            num(r.num_dissip_cum),
            num(r.residual)
        );
    }
    write(path, &out)
}

/// Contact mask as 0/1 with the same layout as the field files.
pub fn write_mask(path: &Path, times: &[f64], xs: &[f64], report: &ContactReport) -> Result<(), CliError> {
    let mut out = String::from("t");
    for &x in xs {
        out.push(',');
        out.push_str(&num(x));
    }
    out.push('\n');
    for (r, &t) in times.iter().enumerate() {
        out.push_str(&num(t));
        for &m in report.mask_row(r) {
            out.push_str(if m { ",1" } else { ",0" });
        }
        out.push('\n');
    }
    write(path, &out)
}

/// One row per snapshot: requested time, stored time used, then the displacement.
pub fn write_snapshots(path: &Path, xs: &[f64], rows: &[(f64, f64, &[f64])]) -> Result<(), CliError> {
    let mut out = String::from("t_requested,t_actual");
    for &x in xs {
        out.push(',');
        out.push_str(&num(x));
    }
    out.push('\n');
    for (req, actual, eta) in rows {
        out.push_str(&num(*req));
        out.push(',');
        out.push_str(&num(*actual));
        for &v in *eta {
            out.push(',');
            out.push_str(&num(v));
        }
        out.push('\n');
    }
    write(path, &out)
}

/// Tabulated initial data: a header naming `eta0` and `v0` columns, one row per node.
pub fn read_initial(path: &Path) -> Result<(Vec<f64>, Vec<f64>), String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or("empty file")?.split(',').map(str::trim).collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| format!("missing column `{name}`"))
    };
    let (ce, cv) = (col("eta0")?, col("v0")?);
    let (mut eta0, mut v0) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate() {
        let row: Vec<&str> = line.split(',').collect();
        if row.len() != header.len() {
            return Err(format!("row {} has {} values, expected {}", i + 2, row.len(), header.len()));
        }
        eta0.push(parse_num(row[ce])?);
        v0.push(parse_num(row[cv])?);
    }
    Ok((eta0, v0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip_bitwise() {
        let vals = [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0, -0.0];
        for v in vals {
            let back: f64 = num(v).parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v}");
        }
        assert_eq!(num(0.1).split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
    }

    #[test]
    fn field_text_parses_back() {
        let f = SpaceTime::from_rows(3, &[vec![0.1, 0.2, 0.3], vec![-1.0 / 7.0, 2.0, 1e-17]]);
        let text = field_text(&[0.0, 0.01], &[0.0, 0.5, 1.0], &f);
        let table = parse_field(&text).unwrap();
        assert_eq!(table.values, f);
        assert_eq!(table.times, vec![0.0, 0.01]);
        assert_eq!(table.xs, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(parse_field("t,0,1\n0,1\n").is_err());
        assert!(parse_field("x,0,1\n0,1,2\n").is_err());
    }
}
