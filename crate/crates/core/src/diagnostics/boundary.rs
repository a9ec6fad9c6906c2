//! Probes attached to contact boundaries: stress jump across a moving front,
//! velocity jump across a flat contact segment, and the zero-trace identity.

use crate::diagnostics::contact::Polyline;
use crate::diagnostics::probes::WeakResidual;
use crate::diagnostics::testfn::TestFunction;
use crate::error::ProbeError;
use crate::series::FieldSeries;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressJump {
    /// `-(1/delta) [int int_{f}^{f+delta} sigma - int int_{f-delta}^{f} sigma]`
    pub jump: f64,
    /// `sum sum F dx dt` over `|x - f(t)| <= delta`
    pub penalty_mass: f64,
}

/// Integral of a cellwise-constant function over `[a, b]`.
fn integrate_cells(values: &[f64], dx: f64, a: f64, b: f64) -> f64 {
    let c0 = ((a / dx).floor().max(0.0)) as usize;
    let c1 = (((b / dx).ceil()) as usize).min(values.len());
    (c0..c1)
        .map(|c| {
            let lo = (c as f64 * dx).max(a);
            let hi = ((c + 1) as f64 * dx).min(b);
            values[c] * (hi - lo).max(0.0)
        })
        .sum()
}

fn check_graph(series: &FieldSeries, graph: &Polyline) -> Result<(), ProbeError> {
    if graph.is_empty() {
        return Err(ProbeError::new("empty graph"));
    }
    if graph.rows.iter().any(|&r| r >= series.len()) {
        return Err(ProbeError::new("graph refers to rows outside the series"));
    }
    let l = series.grid().length();
    if graph.xs.iter().any(|&x| !(0.0..=l).contains(&x)) {
        return Err(ProbeError::new("graph leaves the domain"));
    }
    Ok(())
}

/// Stress `eta_x + alpha v_x` on cells, with `v` the stored backward velocity.
fn cell_stress(series: &FieldSeries, r: usize) -> Vec<f64> {
    let dx = series.grid().dx();
    let alpha = series.physics().alpha();
    let eta = series.eta().row(r);
    let v = series.velocity().row(r);
    (0..eta.len() - 1)
        .map(|c| (eta[c + 1] - eta[c]) / dx + alpha * (v[c + 1] - v[c]) / dx)
        .collect()
}

/// Jump of the viscoelastic stress across `graph` and the penalty mass in a
/// `delta` tube around it. Each graph point is weighted by the time span of its
/// stored row.
pub fn stress_jump_probe(series: &FieldSeries, graph: &Polyline, delta: f64) -> Result<StressJump, ProbeError> {
    check_graph(series, graph)?;
    let dx = series.grid().dx();
    let l = series.grid().length();
    if delta < 2.0 * dx * (1.0 - 1e-12) {
        return Err(ProbeError::new(format!("delta {delta} below 2 dx = {}", 2.0 * dx)));
    }
    if graph.xs.iter().any(|&f| f - delta < 0.0 || f + delta > l) {
        return Err(ProbeError::new("delta tube around the graph is clipped by the domain"));
    }
    let mut jump = 0.0;
    let mut mass = 0.0;
    for (&r, &f) in graph.rows.iter().zip(&graph.xs) {
        let w = series.time_weight(r);
        if w == 0.0 {
            continue;
        }
        let sigma = cell_stress(series, r);
        let right = integrate_cells(&sigma, dx, f, f + delta);
        let left = integrate_cells(&sigma, dx, f - delta, f);
        jump -= (right - left) / delta * w;
        let force = series.penalty().row(r);
        let j0 = ((f - delta) / dx).ceil().max(0.0) as usize;
        let j1 = (((f + delta) / dx).floor() as usize).min(force.len() - 1);
        for (j, fj) in force.iter().enumerate().take(j1 + 1).skip(j0) {
            if (j as f64 * dx - f).abs() <= delta * (1.0 + 1e-12) {
                mass += fj * dx * w;
            }
        }
    }
    Ok(StressJump {
        jump,
        penalty_mass: mass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityJump {
    pub delta: f64,
    /// `(1/delta) int_{t1}^{t1+delta} int_{x0}^{x1} v dx dt`
    pub post_mean: f64,
    /// `(1/delta) int_{t1-delta}^{t1} int_{x0}^{x1} v dx dt`
    pub pre_mean: f64,
    /// as `post_mean` with the weight `phi(x)`
    pub post_weighted: f64,
    pub pre_weighted: f64,
}

impl VelocityJump {
    /// Estimate of `int f_con` over the segment.
    pub fn jump(&self) -> f64 {
        self.post_mean - self.pre_mean
    }
}

/// Time averages of `int v` over `[t1, t1 + delta]` and `[t1 - delta, t1]`.
///
/// Stored row `r` carries the velocity of `(t_{r-1}, t_r]`; each window must be
/// an exact union of such intervals.
pub fn velocity_jump_probe(
    series: &FieldSeries,
    t1: f64,
    x0: f64,
    x1: f64,
    deltas: &[f64],
    phi: &dyn Fn(f64) -> f64,
) -> Result<Vec<VelocityJump>, ProbeError> {
    let g = series.grid();
    let times = series.times();
    let (t_start, t_end) = (times[0], *times.last().ok_or_else(|| ProbeError::new("empty series"))?);
    if !(0.0 <= x0 && x0 < x1 && x1 <= g.length()) {
        return Err(ProbeError::new(format!("segment [{x0}, {x1}] not inside the domain")));
    }
    let dx = g.dx();
    let span = t_end - t_start;
    let tol = 1e-9 * span.max(1.0);
    let nodes: Vec<usize> = (0..g.nodes())
        .filter(|&j| g.x(j) >= x0 - 1e-12 * g.length() && g.x(j) <= x1 + 1e-12 * g.length())
        .collect();

    let window = |a: f64, b: f64| -> Result<(f64, f64), ProbeError> {
        let mut covered = 0.0;
        let (mut plain, mut weighted) = (0.0, 0.0);
        for r in 1..series.len() {
            if times[r - 1] >= a - tol && times[r] <= b + tol {
                let w = times[r] - times[r - 1];
                covered += w;
                let v = series.velocity().row(r);
                for &j in &nodes {
                    plain += v[j] * dx * w;
                    weighted += v[j] * phi(g.x(j)) * dx * w;
                }
            }
        }
        if (covered - (b - a)).abs() > tol + 1e-9 * (b - a) {
            return Err(ProbeError::new(format!(
                "window [{a}, {b}] is not resolved by the stored rows"
            )));
        }
        Ok((plain, weighted))
    };

    deltas
        .iter()
        .map(|&delta| {
            if !(delta > 0.0) {
                return Err(ProbeError::new("window lengths must be positive"));
            }
            if t1 - delta < t_start - tol || t1 + delta > t_end + tol {
                return Err(ProbeError::new(format!(
                    "window {t1} +- {delta} leaves the stored time range"
                )));
            }
            let (post, post_w) = window(t1, t1 + delta)?;
            let (pre, pre_w) = window(t1 - delta, t1)?;
            Ok(VelocityJump {
                delta,
                post_mean: post / delta,
                pre_mean: pre / delta,
                post_weighted: post_w / delta,
                pre_weighted: pre_w / delta,
            })
        })
        .collect()
}

/// Region on which the zero-trace identity is checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSide {
    /// `f(t) <= x <= l`
    Right,
    /// `0 <= x <= f(t)`
    Left,
}

/// `int int v_x phi + int int v phi_x` over the region beside a monotone graph.
///
/// The discrete sums telescope, so the value is minus (right side) or plus
/// (left side) the time integral of `v phi` at the first node inside the region.
pub fn zero_trace_residual(
    series: &FieldSeries,
    graph: &Polyline,
    phi: &dyn TestFunction,
    side: TraceSide,
) -> Result<WeakResidual, ProbeError> {
    check_graph(series, graph)?;
    if !graph.is_monotone() {
        return Err(ProbeError::new("graph must be monotone in time"));
    }
    let g = series.grid();
    let s = phi.support();
    if s.x0 < 0.0 || s.x1 > g.length() {
        return Err(ProbeError::new("test function must vanish at both ends of the string"));
    }
    let dx = g.dx();
    let n = g.cells();
    let (mut vx_phi, mut v_phix) = (0.0, 0.0);
    for (k, (&r, &f)) in graph.rows.iter().zip(&graph.xs).enumerate() {
        let w = series.time_weight(r);
        if w == 0.0 {
            continue;
        }
        let t = graph.times[k];
        let v = series.velocity().row(r);
        let p: Vec<f64> = (0..=n).map(|j| phi.value(t, g.x(j))).collect();
        let cells = match side {
            TraceSide::Right => {
                let j0 = ((f / dx).floor() as usize + 1).min(n);
                j0..n
            }
            TraceSide::Left => {
                let j1 = ((f / dx).ceil() as usize).saturating_sub(1);
                0..j1
            }
        };
        for c in cells {
            vx_phi += (v[c + 1] - v[c]) / dx * 0.5 * (p[c] + p[c + 1]) * dx * w;
            v_phix += 0.5 * (v[c] + v[c + 1]) * (p[c + 1] - p[c]) / dx * dx * w;
        }
    }
    Ok(WeakResidual {
        value: vx_phi + v_phix,
        scale: vx_phi.abs() + v_phix.abs(),
    })
}
