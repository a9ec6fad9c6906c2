//! Discrete weak-form residuals: momentum, local energy and the renormalized
//! inequality for the positive part of the velocity.
//!
//! All three use the same quadrature. Stored rows split time into intervals
//! `[t_r, t_{r+1}]`. On each interval the velocity is the difference quotient
//! of the stored displacement, the displacement and force are taken at the
//! interval's end and start respectively (as in the scheme), and the test
//! function at its start. Space derivatives are cell differences; the test
//! function's `x`-derivative is the cell difference of its node values, so
//! summation by parts holds exactly. On a stride-1 series the momentum residual
//! reduces to the first interval's contribution, `O(dt)` times the test function.

use crate::diagnostics::testfn::TestFunction;
use crate::error::ProbeError;
use crate::series::FieldSeries;

/// Signed residual together with the sum of the absolute values of its terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakResidual {
    pub value: f64,
    pub scale: f64,
}

impl WeakResidual {
    fn from_terms(terms: &[f64]) -> Self {
        Self {
            value: terms.iter().sum(),
            scale: terms.iter().map(|t| t.abs()).sum(),
        }
    }

    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.value / self.scale
        }
    }
}

pub(crate) fn check_support(series: &FieldSeries, phi: &dyn TestFunction) -> Result<(), ProbeError> {
    let s = phi.support();
    let l = series.grid().length();
    let horizon = *series.times().last().ok_or_else(|| ProbeError::new("empty series"))?;
    if s.x0 < 0.0 || s.x1 > l {
        return Err(ProbeError::new(format!(
            "test function must vanish at x = 0 and x = {l}; support is [{}, {}]",
            s.x0, s.x1
        )));
    }
    if s.t1 > horizon * (1.0 + 1e-12) {
        return Err(ProbeError::new(format!(
            "test function must vanish by t = {horizon}; support ends at {}",
            s.t1
        )));
    }
    if series.len() < 2 {
        return Err(ProbeError::new("need at least two stored levels"));
    }
    Ok(())
}

/// Node values of the test function at time `t`.
fn phi_row(phi: &dyn TestFunction, series: &FieldSeries, t: f64) -> Vec<f64> {
    let g = series.grid();
    let s = phi.support();
    if t < s.t0 || t > s.t1 {
        return vec![0.0; g.nodes()];
    }
    (0..g.nodes()).map(|j| phi.value(t, g.x(j))).collect()
}

/// Per-interval data shared by all probes.
struct Interval<'a> {
    width: f64,
    /// velocity on the interval, at nodes
    vel: Vec<f64>,
    /// displacement at the interval end
    eta_end: &'a [f64],
    /// force at the interval start
    force: &'a [f64],
    phi_start: &'a [f64],
    phi_end: &'a [f64],
}

fn for_each_interval(
    series: &FieldSeries,
    phi: &dyn TestFunction,
    mut visit: impl FnMut(&Interval<'_>),
) {
    let times = series.times();
    let eta = series.eta();
    let s = phi.support();
    let mut phi_a = phi_row(phi, series, times[0]);
    for r in 0..series.len() - 1 {
        let phi_b = phi_row(phi, series, times[r + 1]);
        if times[r + 1] >= s.t0 && times[r] <= s.t1 {
            let width = times[r + 1] - times[r];
            let vel = eta
                .row(r + 1)
                .iter()
                .zip(eta.row(r))
                .map(|(b, a)| (b - a) / width)
                .collect();
            visit(&Interval {
                width,
                vel,
                eta_end: eta.row(r + 1),
                force: series.penalty().row(r),
                phi_start: &phi_a,
                phi_end: &phi_b,
            });
        }
        phi_a = phi_b;
    }
}

#[inline]
fn cell_diff(u: &[f64], c: usize, dx: f64) -> f64 {
    (u[c + 1] - u[c]) / dx
}

#[inline]
fn cell_mean(u: &[f64], c: usize) -> f64 {
    0.5 * (u[c] + u[c + 1])
}

/// `int int v phi_t - alpha int int v_x phi_x - int int eta_x phi_x + int v0 phi(0) + int int F phi`.
pub fn weak_momentum_residual(series: &FieldSeries, phi: &dyn TestFunction) -> Result<WeakResidual, ProbeError> {
    check_support(series, phi)?;
    let dx = series.grid().dx();
    let alpha = series.physics().alpha();
    let cells = series.grid().cells();

    let phi0 = phi_row(phi, series, series.times()[0]);
    let v0 = series.velocity().row(0);
    let initial: f64 = v0.iter().zip(&phi0).map(|(v, p)| v * p).sum::<f64>() * dx;

    let (mut inertia, mut visc, mut elastic, mut force) = (0.0, 0.0, 0.0, 0.0);
    for_each_interval(series, phi, |iv| {
        for j in 0..=cells {
            inertia += iv.vel[j] * (iv.phi_end[j] - iv.phi_start[j]) * dx;
            force += iv.width * iv.force[j] * iv.phi_start[j] * dx;
        }
        for c in 0..cells {
            let dphi = cell_diff(iv.phi_start, c, dx);
            visc -= alpha * iv.width * cell_diff(&iv.vel, c, dx) * dphi * dx;
            elastic -= iv.width * cell_diff(iv.eta_end, c, dx) * dphi * dx;
        }
    });
    Ok(WeakResidual::from_terms(&[inertia, visc, elastic, initial, force]))
}

/// Local energy identity with the contact dissipation density `F (-v)^+`:
///
/// ```text
/// -1/2 int int (v^2 + eta_x^2) phi_t + alpha int int v_x^2 phi + int int D phi
///   + alpha int int v_x v phi_x + int int eta_x v phi_x
///   - 1/2 int (v0^2 + eta0_x^2) phi(0)
/// ```
pub fn local_energy_residual(series: &FieldSeries, phi: &dyn TestFunction) -> Result<WeakResidual, ProbeError> {
    check_support(series, phi)?;
    let dx = series.grid().dx();
    let alpha = series.physics().alpha();
    let cells = series.grid().cells();

    let phi0 = phi_row(phi, series, series.times()[0]);
    let v0 = series.velocity().row(0);
    let eta0 = series.eta().row(0);
    let mut initial: f64 = v0.iter().zip(&phi0).map(|(v, p)| 0.5 * v * v * p).sum::<f64>() * dx;
    for c in 0..cells {
        let d = cell_diff(eta0, c, dx);
        initial += 0.5 * d * d * cell_mean(&phi0, c) * dx;
    }

    let (mut kin_t, mut ela_t, mut visc, mut contact, mut flux_v, mut flux_e) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for_each_interval(series, phi, |iv| {
        let w = iv.width;
        for j in 0..=cells {
            let v = iv.vel[j];
            kin_t -= 0.5 * v * v * (iv.phi_end[j] - iv.phi_start[j]) * dx;
            contact += w * iv.force[j] * (-v).max(0.0) * iv.phi_start[j] * dx;
        }
        for c in 0..cells {
            let de = cell_diff(iv.eta_end, c, dx);
            let dv = cell_diff(&iv.vel, c, dx);
            let vc = cell_mean(&iv.vel, c);
            let dphi = cell_diff(iv.phi_start, c, dx);
            ela_t -= 0.5 * de * de * (cell_mean(iv.phi_end, c) - cell_mean(iv.phi_start, c)) * dx;
            visc += alpha * w * dv * dv * cell_mean(iv.phi_start, c) * dx;
            flux_v += alpha * w * dv * vc * dphi * dx;
            flux_e += w * de * vc * dphi * dx;
        }
    });
    Ok(WeakResidual::from_terms(&[
        kin_t, ela_t, visc, contact, flux_v, flux_e, -initial,
    ]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Renormalization {
    /// `b(x) = x^2`
    Square,
}

impl Renormalization {
    fn b(&self, x: f64) -> f64 {
        match self {
            Renormalization::Square => x * x,
        }
    }

    fn db(&self, x: f64) -> f64 {
        match self {
            Renormalization::Square => 2.0 * x,
        }
    }

    fn d2b(&self, _x: f64) -> f64 {
        match self {
            Renormalization::Square => 2.0,
        }
    }
}

/// Slack of the renormalized inequality for `w = v^+`:
///
/// ```text
/// int int b(w) phi_t - alpha int int v_x b'(w) phi_x - alpha int int |w_x|^2 b''(w) phi
///   - int int eta_x b'(w) phi_x - int int eta_x (b'(w))_x phi + int b(v0^+) phi(0)  >=  0
/// ```
///
/// The returned value is the left-hand side; its `scale` is the sum of the
/// absolute values of the six terms.
pub fn renormalized_residual(
    series: &FieldSeries,
    phi: &dyn TestFunction,
    b: Renormalization,
) -> Result<WeakResidual, ProbeError> {
    check_support(series, phi)?;
    if !phi.is_nonnegative() {
        return Err(ProbeError::new("renormalized inequality needs a nonnegative test function"));
    }
    let dx = series.grid().dx();
    let alpha = series.physics().alpha();
    let cells = series.grid().cells();

    let phi0 = phi_row(phi, series, series.times()[0]);
    let v0 = series.velocity().row(0);
    let initial: f64 = v0.iter().zip(&phi0).map(|(v, p)| b.b(v.max(0.0)) * p).sum::<f64>() * dx;

    let (mut time_term, mut visc_flux, mut visc_diss, mut elastic_flux, mut elastic_cross) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for_each_interval(series, phi, |iv| {
        let w = iv.width;
        let pos: Vec<f64> = iv.vel.iter().map(|v| v.max(0.0)).collect();
        for j in 0..=cells {
            time_term += b.b(pos[j]) * (iv.phi_end[j] - iv.phi_start[j]) * dx;
        }
        for c in 0..cells {
            let dphi = cell_diff(iv.phi_start, c, dx);
            let phic = cell_mean(iv.phi_start, c);
            let wc = cell_mean(&pos, c);
            let dw = cell_diff(&pos, c, dx);
            let d_db = (b.db(pos[c + 1]) - b.db(pos[c])) / dx;
            let de = cell_diff(iv.eta_end, c, dx);
            visc_flux -= alpha * w * cell_diff(&iv.vel, c, dx) * b.db(wc) * dphi * dx;
            visc_diss -= alpha * w * dw * dw * b.d2b(wc) * phic * dx;
            elastic_flux -= w * de * b.db(wc) * dphi * dx;
            elastic_cross -= w * de * d_db * phic * dx;
        }
    });
    Ok(WeakResidual::from_terms(&[
        time_term,
        visc_flux,
        visc_diss,
        elastic_flux,
        elastic_cross,
        initial,
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::testfn::BumpTestFn;
    use crate::fd::run;
    use crate::model::{Grid1D, InitialData, Physics, SimConfig, TimeGrid};

    fn mode_run(cells: usize, steps: usize) -> FieldSeries {
        let cfg = SimConfig::new(
            Grid1D::new(1.0, cells).unwrap(),
            TimeGrid::new(0.2, steps).unwrap(),
            Physics::new(0.05, 0.001).unwrap(),
            InitialData::SingleMode {
                amplitude: 0.3,
                mode: 2,
                offset: 1.0,
                v0: 0.5,
            },
            Some(1),
        )
        .unwrap();
        run(&cfg).unwrap().series
    }

    #[test]
    fn zero_test_function_gives_zero() {
        let s = mode_run(50, 20);
        let zero = BumpTestFn::new(0.0, 0.1, 0.05, 0.5, 0.2);
        assert_eq!(weak_momentum_residual(&s, &zero).unwrap().value, 0.0);
        assert_eq!(local_energy_residual(&s, &zero).unwrap().value, 0.0);
        assert_eq!(renormalized_residual(&s, &zero, Renormalization::Square).unwrap().value, 0.0);
    }

    #[test]
    fn interior_momentum_residual_is_rounding() {
        // support away from t = 0: only the scheme itself is tested. The bump is
        // off-centre so the odd mode does not cancel by symmetry.
        let s = mode_run(100, 100);
        let phi = BumpTestFn::new(1.0, 0.1, 0.05, 0.35, 0.25);
        let r = weak_momentum_residual(&s, &phi).unwrap();
        assert!(r.scale > 0.1);
        assert!(r.value.abs() <= 1e-10 * r.scale, "{r:?}");
    }

    #[test]
    fn contract_violations() {
        let s = mode_run(50, 20);
        let outside = BumpTestFn::new(1.0, 0.1, 0.05, 0.1, 0.2);
        assert!(weak_momentum_residual(&s, &outside).is_err());
        let late = BumpTestFn::new(1.0, 0.19, 0.05, 0.5, 0.2);
        assert!(local_energy_residual(&s, &late).is_err());
        let negative = BumpTestFn::new(-1.0, 0.1, 0.05, 0.5, 0.2);
        assert!(renormalized_residual(&s, &negative, Renormalization::Square).is_err());
        assert!(weak_momentum_residual(&s, &negative).is_ok());
    }

    #[test]
    fn residuals_are_linear_in_the_test_function() {
        let s = mode_run(80, 40);
        let phi = BumpTestFn::new(1.0, 0.0, 0.15, 0.35, 0.25);
        for c in [2.0, 0.37, 10.0] {
            let a = weak_momentum_residual(&s, &phi).unwrap().value;
            let b = weak_momentum_residual(&s, &phi.scaled(c)).unwrap().value;
            assert!((b - c * a).abs() <= 1e-12 * (c * a).abs().max(1e-300));
            let a = local_energy_residual(&s, &phi).unwrap().value;
            let b = local_energy_residual(&s, &phi.scaled(c)).unwrap().value;
            assert!((b - c * a).abs() <= 1e-12 * (c * a).abs().max(1e-300));
            let a = renormalized_residual(&s, &phi, Renormalization::Square).unwrap().value;
            let b = renormalized_residual(&s, &phi.scaled(c), Renormalization::Square).unwrap().value;
            assert!((b - c * a).abs() <= 1e-12 * (c * a).abs().max(1e-300));
        }
    }

    #[test]
    fn momentum_residual_shrinks_under_refinement() {
        let phi = BumpTestFn::new(1.0, 0.0, 0.15, 0.35, 0.25);
        let coarse = weak_momentum_residual(&mode_run(50, 50), &phi).unwrap().value.abs();
        let fine = weak_momentum_residual(&mode_run(100, 100), &phi).unwrap().value.abs();
        assert!(fine < 0.6 * coarse, "coarse {coarse} fine {fine}");
    }

    #[test]
    fn energy_residual_shrinks_under_refinement() {
        let phi = BumpTestFn::new(1.0, 0.0, 0.15, 0.35, 0.25);
        let coarse = local_energy_residual(&mode_run(50, 50), &phi).unwrap().value.abs();
        let fine = local_energy_residual(&mode_run(100, 100), &phi).unwrap().value.abs();
        assert!(fine < 0.6 * coarse, "coarse {coarse} fine {fine}");
    }
}
