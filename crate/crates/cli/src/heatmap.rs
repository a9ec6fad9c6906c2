//! Space-time heatmaps as binary PPM rasters and SVG figures.
//!
//! Time runs left to right and `x` bottom to top.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use obstring_core::SpaceTime;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Palette {
    /// blue - white - red, centred at zero
    Diverging,
    /// dark to light over the value range
    Sequential,
    /// white for zero, black otherwise
    Binary,
}

const DIVERGING: [[f64; 3]; 3] = [[59.0, 76.0, 192.0], [247.0, 247.0, 247.0], [180.0, 4.0, 38.0]];
const SEQUENTIAL: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

fn ramp(stops: &[[f64; 3]], s: f64) -> [u8; 3] {
    let s = s.clamp(0.0, 1.0) * (stops.len() - 1) as f64;
    let k = (s.floor() as usize).min(stops.len() - 2);
    let w = s - k as f64;
    let mut c = [0u8; 3];
    for i in 0..3 {
        c[i] = (stops[k][i] * (1.0 - w) + stops[k + 1][i] * w).round() as u8;
    }
    c
}

/// Maps values to colours for one matrix.
#[derive(Debug, Clone, Copy)]
pub struct ColorScale {
    palette: Palette,
    lo: f64,
    hi: f64,
}

impl ColorScale {
    pub fn fit(palette: Palette, values: &[f64]) -> Self {
        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        Self { palette, lo, hi }
    }

    pub fn color(&self, v: f64) -> [u8; 3] {
        match self.palette {
            Palette::Diverging => {
                let m = self.lo.abs().max(self.hi.abs());
                let s = if m > 0.0 { 0.5 + 0.5 * v / m } else { 0.5 };
                ramp(&DIVERGING, s)
            }
            Palette::Sequential => {
                let s = if self.hi > self.lo {
                    (v - self.lo) / (self.hi - self.lo)
                } else {
                    0.5
                };
                ramp(&SEQUENTIAL, s)
            }
            Palette::Binary => {
                if v != 0.0 {
                    [0, 0, 0]
                } else {
                    [255, 255, 255]
                }
            }
        }
    }
}

/// Sample `field` (rows = time, columns = nodes) onto a `width x height`
/// raster, top row first. Each pixel takes the nearest stored value.
fn raster(field: &SpaceTime, width: usize, height: usize, scale: &ColorScale) -> Vec<[u8; 3]> {
    let (rows, cols) = (field.rows(), field.cols());
    let mut px = Vec::with_capacity(width * height);
    for py in 0..height {
        // top of the image is x = l
        let j = ((height - 1 - py) * cols) / height;
        for pxi in 0..width {
            let r = (pxi * rows) / width;
            px.push(scale.color(field.get(r, j)));
        }
    }
    px
}

fn fitted(n: usize, cap: usize) -> usize {
    n.clamp(1, cap)
}

/// Title, axis extents and palette of one heatmap.
#[derive(Debug, Clone)]
pub struct Figure<'a> {
    pub title: &'a str,
    pub t_range: (f64, f64),
    pub x_range: (f64, f64),
    pub palette: Palette,
}

fn check_finite(field: &SpaceTime) -> Result<(), CliError> {
    if field.rows() == 0 || field.cols() == 0 {
        return Err(CliError::Render("empty matrix".into()));
    }
    if let Some(k) = field.data().iter().position(|v| !v.is_finite()) {
        return Err(CliError::Render(format!(
            "non-finite value at row {}, column {}",
            k / field.cols(),
            k % field.cols()
        )));
    }
    Ok(())
}

/// Binary PPM, at most 1200 x 800 pixels.
pub fn ppm_bytes(field: &SpaceTime, palette: Palette) -> Result<Vec<u8>, CliError> {
    check_finite(field)?;
    let (w, h) = (fitted(field.rows(), 1200), fitted(field.cols(), 800));
    let scale = ColorScale::fit(palette, field.data());
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    for c in raster(field, w, h, &scale) {
        out.extend_from_slice(&c);
    }
    Ok(out)
}

/// SVG with a coarse raster of rectangles, axes and labels.
pub fn svg_text(field: &SpaceTime, fig: &Figure) -> Result<String, CliError> {
    check_finite(field)?;
    let (w, h) = (fitted(field.rows(), 240), fitted(field.cols(), 160));
    let scale = ColorScale::fit(fig.palette, field.data());
    let px = raster(field, w, h, &scale);
    let (cell_w, cell_h) = (600.0 / w as f64, 400.0 / h as f64);
    let (left, top) = (60.0, 30.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="700" height="490" viewBox="0 0 700 490" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, left + 300.0, escape(fig.title));
    let _ = writeln!(s, r#"<g shape-rendering="crispEdges">"#);
    for py in 0..h {
        // merge runs of equal colour along t
        let mut start = 0;
        while start < w {
            let c = px[py * w + start];
            let mut end = start + 1;
            while end < w && px[py * w + end] == c {
                end += 1;
            }
            let _ = writeln!(
                s,
                r##"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="#{:02x}{:02x}{:02x}"/>"##,
                left + start as f64 * cell_w,
                top + py as f64 * cell_h,
                (end - start) as f64 * cell_w,
                cell_h,
                c[0],
                c[1],
                c[2]
            );
            start = end;
        }
    }
    let _ = writeln!(s, "</g>");
    let (bottom, right) = (top + 400.0, left + 600.0);
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="600" height="400" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(s, r#"<text x="{left}" y="{}" text-anchor="middle">{}</text>"#, bottom + 18.0, fig.t_range.0);
    let _ = writeln!(s, r#"<text x="{right}" y="{}" text-anchor="middle">{}</text>"#, bottom + 18.0, fig.t_range.1);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#, left + 300.0, bottom + 40.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 6.0, bottom, fig.x_range.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 6.0, top + 10.0, fig.x_range.1);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">x</text>"#, left - 30.0, top + 200.0);
    let _ = writeln!(
        s,
        r#"<text x="{right}" y="{}" text-anchor="end" font-size="11">range [{:.4e}, {:.4e}]</text>"#,
        bottom + 40.0,
        scale.lo,
        scale.hi
    );
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Write `<stem>.ppm` and/or `<stem>.svg` into `dir`; returns the files written.
pub fn render_heatmap(
    field: &SpaceTime,
    fig: &Figure,
    dir: &Path,
    stem: &str,
    ppm: bool,
    svg: bool,
) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    if ppm {
        let path = dir.join(format!("{stem}.ppm"));
        std::fs::write(&path, ppm_bytes(field, fig.palette)?).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    if svg {
        let path = dir.join(format!("{stem}.svg"));
        std::fs::write(&path, svg_text(field, fig)?).map_err(|e| CliError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
