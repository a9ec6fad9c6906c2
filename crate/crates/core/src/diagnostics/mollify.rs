//! Space-time mollification and the contact dissipation estimate.

use crate::error::ProbeError;
use crate::series::{FieldSeries, SpaceTime};

/// `int_{-1}^{1} exp(-1/(1-s^2)) ds`.
pub const BUMP_MASS_1D: f64 = 0.443_993_816_168_079_4;

/// Unnormalized one-dimensional profile `exp(-1/(1-s^2))` on `|s| < 1`.
pub fn bump_profile(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// Product kernel `zeta(tau/omega) zeta(xi/omega) / omega^2` with unit mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierKernel {
    pub omega: f64,
}

impl MollifierKernel {
    pub fn new(omega: f64) -> Result<Self, ProbeError> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(ProbeError::new(format!("mollifier width must be positive, got {omega}")));
        }
        Ok(Self { omega })
    }

    /// Continuous kernel density.
    pub fn density(&self, tau: f64, xi: f64) -> f64 {
        let norm = BUMP_MASS_1D * self.omega;
        bump_profile(tau / self.omega) * bump_profile(xi / self.omega) / (norm * norm)
    }

    /// Midpoint quadrature of the density on a `points x points` grid over its support.
    pub fn mass(&self, points: usize) -> f64 {
        let h = 2.0 * self.omega / points as f64;
        let nodes: Vec<f64> = (0..points).map(|k| -self.omega + (k as f64 + 0.5) * h).collect();
        let mut m = 0.0;
        for &a in &nodes {
            for &b in &nodes {
                m += self.density(a, b);
            }
        }
        m * h * h
    }

    /// Discrete weights at offsets `k h` for `|k h| < omega`, summing to one.
    fn weights(&self, h: f64) -> (usize, Vec<f64>) {
        let reach = (self.omega / h).ceil() as usize;
        let raw: Vec<f64> = (0..=2 * reach)
            .map(|k| bump_profile((k as f64 - reach as f64) * h / self.omega))
            .collect();
        let total: f64 = raw.iter().sum();
        (reach, raw.into_iter().map(|w| w / total).collect())
    }
}

/// Stored-grid spacings `(dt, dx)`, requiring uniform time storage and `omega >= 2 max`.
fn checked_spacing(series: &FieldSeries, kernel: &MollifierKernel) -> Result<(f64, f64), ProbeError> {
    let dt = series
        .uniform_spacing()
        .ok_or_else(|| ProbeError::new("mollification needs uniformly spaced stored times"))?;
    let dx = series.grid().dx();
    let need = 2.0 * dt.max(dx);
    if kernel.omega < need * (1.0 - 1e-12) {
        return Err(ProbeError::new(format!(
            "mollifier width {} below 2 max(dt, dx) = {need}",
            kernel.omega
        )));
    }
    Ok((dt, dx))
}

/// Separable discrete convolution with zero extension outside the stored window.
pub fn mollify(series: &FieldSeries, field: &SpaceTime, kernel: &MollifierKernel) -> Result<SpaceTime, ProbeError> {
    let (dt, dx) = checked_spacing(series, kernel)?;
    let rows = field.rows();
    let cols = field.cols();
    let (rt, wt) = kernel.weights(dt);
    let (rx, wx) = kernel.weights(dx);

    let mut in_time = SpaceTime::zeros(rows, cols);
    for r in 0..rows {
        let out = in_time.row_mut(r);
        for (k, w) in wt.iter().enumerate() {
            let Some(src) = (r + k).checked_sub(rt).filter(|&s| s < rows) else {
                continue;
            };
            for (o, v) in out.iter_mut().zip(field.row(src)) {
                *o += w * v;
            }
        }
    }
    let mut result = SpaceTime::zeros(rows, cols);
    for r in 0..rows {
        let src = in_time.row(r);
        let out = result.row_mut(r);
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, w) in wx.iter().enumerate() {
                if let Some(c) = (j + k).checked_sub(rx).filter(|&c| c < cols) {
                    acc += w * src[c];
                }
            }
            *o = acc;
        }
    }
    Ok(result)
}

/// Mollified value at a single stored point.
fn mollify_point(field: &SpaceTime, r: usize, j: usize, rt: usize, wt: &[f64], rx: usize, wx: &[f64]) -> f64 {
    let (rows, cols) = (field.rows(), field.cols());
    let mut acc = 0.0;
    for (a, wa) in wt.iter().enumerate() {
        let Some(src) = (r + a).checked_sub(rt).filter(|&s| s < rows) else {
            continue;
        };
        let row = field.row(src);
        for (b, wb) in wx.iter().enumerate() {
            if let Some(c) = (j + b).checked_sub(rx).filter(|&c| c < cols) {
                acc += wa * wb * row[c];
            }
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct DissipationEstimate {
    /// `sum sum F (-v^omega) dx dt`
    pub total: f64,
    /// `F (-v^omega)` at every stored point
    pub density: SpaceTime,
    /// Share of `sum |density|` carried by negative values.
    pub negative_fraction: f64,
}

/// `F (-v^omega)`, the mollified dissipation proxy. Only points where `F > 0`
/// are mollified.
pub fn dissipation_estimate(series: &FieldSeries, kernel: &MollifierKernel) -> Result<DissipationEstimate, ProbeError> {
    let (dt, dx) = checked_spacing(series, kernel)?;
    let force = series.penalty();
    let vel = series.velocity();
    let (rt, wt) = kernel.weights(dt);
    let (rx, wx) = kernel.weights(dx);
    let mut density = SpaceTime::zeros(force.rows(), force.cols());
    let (mut total, mut pos, mut neg) = (0.0, 0.0, 0.0);
    for r in 0..force.rows() {
        for j in 0..force.cols() {
            let f = force.get(r, j);
            if f > 0.0 {
                let d = -f * mollify_point(vel, r, j, rt, &wt, rx, &wx);
                density.set(r, j, d);
                total += d * dx * dt;
                if d < 0.0 {
                    neg += -d;
                } else {
                    pos += d;
                }
            }
        }
    }
    let negative_fraction = if pos + neg > 0.0 { neg / (pos + neg) } else { 0.0 };
    Ok(DissipationEstimate {
        total,
        density,
        negative_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Grid1D, Physics};

    fn series_from(rows: usize, cells: usize, f: impl Fn(usize, usize) -> f64) -> FieldSeries {
        let g = Grid1D::new(1.0, cells).unwrap();
        let dt = 1.0 / cells as f64;
        let mut s = FieldSeries::new(g, Physics::new(0.0, 1.0).unwrap(), dt);
        for r in 0..rows {
            let row: Vec<f64> = (0..=cells).map(|j| f(r, j)).collect();
            s.push(r, r as f64 * dt, &row, &row, &row);
        }
        s
    }

    #[test]
    fn bump_mass_constant() {
        // composite midpoint on a smooth compactly supported integrand converges fast
        let n = 20000;
        let h = 2.0 / n as f64;
        let m: f64 = (0..n).map(|k| bump_profile(-1.0 + (k as f64 + 0.5) * h)).sum::<f64>() * h;
        assert!((m - BUMP_MASS_1D).abs() < 1e-12);
    }

    #[test]
    fn kernel_has_unit_mass() {
        for omega in [0.01, 0.3, 2.0] {
            let k = MollifierKernel::new(omega).unwrap();
            assert!((k.mass(400) - 1.0).abs() < 1e-8);
            assert!(k.density(0.0, 0.0) > 0.0);
            assert_eq!(k.density(omega, 0.0), 0.0);
        }
    }

    #[test]
    fn constant_field_preserved_in_interior() {
        let s = series_from(60, 60, |_, _| 3.5);
        let k = MollifierKernel::new(5.0 / 60.0).unwrap();
        let m = mollify(&s, s.eta(), &k).unwrap();
        for r in 6..54 {
            for j in 6..55 {
                assert!((m.get(r, j) - 3.5).abs() < 1e-13);
            }
        }
        // zero extension shows at the edge
        assert!(m.get(0, 30) < 3.5);
    }

    #[test]
    fn stripe_spreads_over_two_omega() {
        let s = series_from(40, 100, |_, j| if j >= 50 { 1.0 } else { 0.0 });
        let omega = 4.0 / 100.0;
        let m = mollify(&s, s.eta(), &MollifierKernel::new(omega).unwrap()).unwrap();
        let row = m.row(20);
        // offsets |k| <= 3 carry weight: the ramp covers nodes 47..=52
        assert_eq!(row[46], 0.0);
        assert!(row[47] > 0.0 && row[52] < 1.0);
        assert!((row[53] - 1.0).abs() < 1e-14);
        for j in 40..60 {
            assert!(row[j + 1] >= row[j]);
        }
    }

    #[test]
    fn narrow_kernel_rejected() {
        let s = series_from(10, 10, |_, _| 0.0);
        assert!(mollify(&s, s.eta(), &MollifierKernel::new(0.15).unwrap()).is_err());
        assert!(MollifierKernel::new(0.0).is_err());
    }

    #[test]
    fn converges_to_field_as_omega_shrinks() {
        let s = series_from(200, 200, |r, j| ((r as f64) * 0.02).sin() * ((j as f64) * 0.03).cos());
        let err = |w: f64| {
            let m = mollify(&s, s.eta(), &MollifierKernel::new(w).unwrap()).unwrap();
            let mut e = 0.0;
            for r in 30..170 {
                for j in 30..170 {
                    e += (m.get(r, j) - s.eta().get(r, j)).powi(2);
                }
            }
            e.sqrt()
        };
        let (a, b, c) = (err(0.08), err(0.04), err(0.02));
        assert!(b < a && c < b);
    }

    #[test]
    fn no_contact_no_dissipation() {
        let s = series_from(20, 20, |_, _| 0.0);
        let d = dissipation_estimate(&s, &MollifierKernel::new(0.1).unwrap()).unwrap();
        assert_eq!(d.total, 0.0);
        assert_eq!(d.negative_fraction, 0.0);
    }
}
