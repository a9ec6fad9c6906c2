//! Penetration metrics and contact-set geometry.

use crate::series::FieldSeries;

/// `(max_t max_j (eta_j)^-, max_t sum_j (eta_j)^- dx)` over stored levels.
pub fn penetration_metrics(series: &FieldSeries) -> (f64, f64) {
    let dx = series.grid().dx();
    let mut pointwise: f64 = 0.0;
    let mut l1: f64 = 0.0;
    for row in series.eta().iter_rows() {
        let mut sum = 0.0;
        for &e in row {
            let neg = (-e).max(0.0);
            pointwise = pointwise.max(neg);
            sum += neg;
        }
        l1 = l1.max(sum * dx);
    }
    (pointwise, l1)
}

/// Which side of a crossing the contact set lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// contact to the right: the left edge of a component
    Right,
    /// contact to the left: the right edge of a component
    Left,
}

/// A mask sign change between nodes `j` and `j + 1`, located at `(j + 1/2) dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub cell: usize,
    pub x: f64,
    pub side: Side,
}

/// Contact-boundary curve: one point per consecutive stored row.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub side: Side,
    pub rows: Vec<usize>,
    pub times: Vec<f64>,
    pub xs: Vec<f64>,
}

impl Polyline {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn t_range(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().expect("non-empty polyline"))
    }

    /// Non-decreasing or non-increasing in `x` along the curve.
    pub fn is_monotone(&self) -> bool {
        let up = self.xs.windows(2).all(|w| w[1] >= w[0]);
        let down = self.xs.windows(2).all(|w| w[1] <= w[0]);
        up || down
    }

    /// Sub-curve on the given index range.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Polyline {
        Polyline {
            side: self.side,
            rows: self.rows[range.clone()].to_vec(),
            times: self.times[range.clone()].to_vec(),
            xs: self.xs[range].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactReport {
    /// row-major `stored levels x nodes`
    mask: Vec<bool>,
    nodes: usize,
    pub boundary_graphs: Vec<Polyline>,
    pub first_contact_time: Option<f64>,
    /// `sum sum F dx dt`, each stored force row weighted by the time to the next row
    pub total_penalty_impulse: f64,
}

impl ContactReport {
    pub fn mask_row(&self, r: usize) -> &[bool] {
        &self.mask[r * self.nodes..(r + 1) * self.nodes]
    }

    pub fn rows(&self) -> usize {
        self.mask.len() / self.nodes
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    /// Maximal runs of contact nodes in row `r`, as inclusive node ranges.
    pub fn components(&self, r: usize) -> Vec<(usize, usize)> {
        let row = self.mask_row(r);
        let mut out = Vec::new();
        let mut start = None;
        for (j, &m) in row.iter().enumerate() {
            match (m, start) {
                (true, None) => start = Some(j),
                (false, Some(s)) => {
                    out.push((s, j - 1));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            out.push((s, row.len() - 1));
        }
        out
    }

    pub fn max_components(&self) -> (usize, usize) {
        (0..self.rows())
            .map(|r| (self.components(r).len(), r))
            .max_by_key(|&(c, r)| (c, std::cmp::Reverse(r)))
            .unwrap_or((0, 0))
    }

    /// Penalty impulse outside the mask; zero by construction of the mask.
    pub fn impulse_outside_mask(&self, series: &FieldSeries) -> f64 {
        let dx = series.grid().dx();
        let mut total = 0.0;
        for r in 0..self.rows() {
            let w = next_interval(series, r);
            for (j, &m) in self.mask_row(r).iter().enumerate() {
                if !m {
                    total += series.penalty().get(r, j) * dx * w;
                }
            }
        }
        total
    }
}

fn next_interval(series: &FieldSeries, r: usize) -> f64 {
    let t = series.times();
    if r + 1 < t.len() {
        t[r + 1] - t[r]
    } else {
        0.0
    }
}

/// Contact mask `eta <= 0 or F > 0`, end nodes excluded.
pub fn contact_mask_row(eta: &[f64], force: &[f64]) -> Vec<bool> {
    let n = eta.len();
    (0..n)
        .map(|j| j > 0 && j + 1 < n && (eta[j] <= 0.0 || force[j] > 0.0))
        .collect()
}

pub fn crossings(mask: &[bool], dx: f64) -> Vec<Crossing> {
    mask.windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] != w[1])
        .map(|(j, w)| Crossing {
            cell: j,
            x: (j as f64 + 0.5) * dx,
            side: if w[1] { Side::Right } else { Side::Left },
        })
        .collect()
}

/// Link crossings of consecutive rows into curves. A curve continues only when
/// it and a crossing of the same side are each other's unique candidate within
/// `tol`; otherwise curves end and new ones start.
pub fn link_crossings(per_row: &[Vec<Crossing>], times: &[f64], tol: f64) -> Vec<Polyline> {
    let mut done = Vec::new();
    let mut active: Vec<Polyline> = Vec::new();
    for (r, row) in per_row.iter().enumerate() {
        let candidates: Vec<Vec<usize>> = active
            .iter()
            .map(|line| {
                let last = *line.xs.last().expect("non-empty polyline");
                (0..row.len())
                    .filter(|&k| row[k].side == line.side && (row[k].x - last).abs() <= tol)
                    .collect()
            })
            .collect();
        let mut claims = vec![0usize; row.len()];
        for c in &candidates {
            for &k in c {
                claims[k] += 1;
            }
        }
        let mut taken = vec![false; row.len()];
        let mut next = Vec::new();
        for (mut line, cands) in active.drain(..).zip(candidates) {
            match cands.as_slice() {
                &[k] if claims[k] == 1 => {
                    taken[k] = true;
                    line.rows.push(r);
                    line.times.push(times[r]);
                    line.xs.push(row[k].x);
                    next.push(line);
                }
                _ => done.push(line),
            }
        }
        for (_, c) in row.iter().enumerate().filter(|(k, _)| !taken[*k]) {
            next.push(Polyline {
                side: c.side,
                rows: vec![r],
                times: vec![times[r]],
                xs: vec![c.x],
            });
        }
        active = next;
    }
    done.extend(active);
    done.sort_by(|a, b| a.times[0].total_cmp(&b.times[0]).then(a.xs[0].total_cmp(&b.xs[0])));
    done
}

/// Mask, boundary curves, first stored contact time and penalty impulse.
/// Curves are linked with a tolerance of `3 dx`.
pub fn extract_contact(series: &FieldSeries) -> ContactReport {
    extract_contact_with(series, 3.0 * series.grid().dx())
}

pub fn extract_contact_with(series: &FieldSeries, link_tol: f64) -> ContactReport {
    let nodes = series.grid().nodes();
    let dx = series.grid().dx();
    let mut mask = Vec::with_capacity(series.len() * nodes);
    let mut per_row = Vec::with_capacity(series.len());
    let mut first = None;
    let mut impulse = 0.0;
    for r in 0..series.len() {
        let row = contact_mask_row(series.eta().row(r), series.penalty().row(r));
        if first.is_none() && row.iter().any(|&m| m) {
            first = Some(series.times()[r]);
        }
        impulse += series.penalty().row(r).iter().sum::<f64>() * dx * next_interval(series, r);
        per_row.push(crossings(&row, dx));
        mask.extend(row);
    }
    ContactReport {
        mask,
        nodes,
        boundary_graphs: link_crossings(&per_row, series.times(), link_tol),
        first_contact_time: first,
        total_penalty_impulse: impulse,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Grid1D, Physics};

    fn series(rows: &[Vec<f64>], force: Option<&[Vec<f64>]>) -> FieldSeries {
        let n = rows[0].len() - 1;
        let g = Grid1D::new(1.0, n).unwrap();
        let mut s = FieldSeries::new(g, Physics::new(0.0, 1.0).unwrap(), 0.1);
        for (r, row) in rows.iter().enumerate() {
            let f = force.map_or(vec![0.0; n + 1], |f| f[r].clone());
            s.push(r, r as f64 * 0.1, row, &vec![0.0; n + 1], &f);
        }
        s
    }

    #[test]
    fn penetration_examples() {
        let mut row = vec![1.0; 101];
        assert_eq!(penetration_metrics(&series(&[row.clone()], None)), (0.0, 0.0));
        row[40] = -0.001;
        let (p, l1) = penetration_metrics(&series(&[vec![1.0; 101], row], None));
        assert_eq!(p, 0.001);
        assert!((l1 - 1e-5).abs() < 1e-18);
    }

    #[test]
    fn no_contact_report() {
        let r = extract_contact(&series(&[vec![1.0; 11], vec![0.5; 11]], None));
        assert!(r.is_empty());
        assert_eq!(r.first_contact_time, None);
        assert!(r.boundary_graphs.is_empty());
        assert_eq!(r.total_penalty_impulse, 0.0);
    }

    #[test]
    fn end_nodes_never_in_contact() {
        let mut row = vec![1.0; 11];
        row[0] = 0.0;
        let r = extract_contact(&series(&[row], None));
        assert!(r.is_empty());
    }

    #[test]
    fn force_marks_contact_above_zero() {
        let rows = vec![vec![1.0; 11]];
        let mut f = vec![0.0; 11];
        f[5] = 2.0;
        let r = extract_contact(&series(&rows, Some(&[f])));
        assert_eq!(r.components(0), vec![(5, 5)]);
    }

    #[test]
    fn two_components_and_growing_front() {
        // contact [5, 6] and [14, 14], then [4, 7] and [14, 15]
        let mut a = vec![1.0; 21];
        for j in [5, 6, 14] {
            a[j] = 0.0;
        }
        let mut b = vec![1.0; 21];
        for j in [4, 5, 6, 7, 14, 15] {
            b[j] = -0.01;
        }
        let r = extract_contact(&series(&[a, b], None));
        assert_eq!(r.components(0).len(), 2);
        assert_eq!(r.max_components(), (2, 0));
        assert_eq!(r.first_contact_time, Some(0.0));
        // four edges, each linked across both rows
        assert_eq!(r.boundary_graphs.len(), 4);
        assert!(r.boundary_graphs.iter().all(|g| g.len() == 2 && g.is_monotone()));
    }

    #[test]
    fn ambiguous_link_splits() {
        let dx = 0.1;
        let mk = |x: f64, side| Crossing { cell: 0, x, side };
        let rows = vec![
            vec![mk(0.45, Side::Right)],
            vec![mk(0.35, Side::Right), mk(0.55, Side::Right)],
        ];
        let lines = link_crossings(&rows, &[0.0, 0.1], 3.0 * dx);
        assert_eq!(lines.len(), 3);
        assert!(lines.iter().all(|l| l.len() == 1));
    }

    #[test]
    fn impulse_stays_inside_mask() {
        let mut f = vec![0.0; 11];
        f[4] = 3.0;
        let rows = vec![vec![1.0; 11], vec![1.0; 11]];
        let s = series(&rows, Some(&[f, vec![0.0; 11]]));
        let r = extract_contact(&s);
        assert!((r.total_penalty_impulse - 3.0 * 0.1 * 0.1).abs() < 1e-15);
        assert_eq!(r.impulse_outside_mask(&s), 0.0);
    }
}
