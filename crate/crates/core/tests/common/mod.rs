//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

/// Dense Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let m = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= m * a[k][j];
            }
            b[i] -= m * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// Dense matrix from the three diagonals.
pub fn dense_from_bands(lower: &[f64], diag: &[f64], upper: &[f64]) -> Vec<Vec<f64>> {
    let n = diag.len();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = diag[i];
        if i > 0 {
            a[i][i - 1] = lower[i - 1];
        }
        if i + 1 < n {
            a[i][i + 1] = upper[i];
        }
    }
    a
}

/// RK4 for `q'' + alpha lambda q' + lambda q = 0` from `(q0, p0)`.
pub fn mode_rk4(alpha: f64, lambda: f64, q0: f64, p0: f64, t: f64, steps: usize) -> (f64, f64) {
    let h = t / steps as f64;
    let f = |q: f64, p: f64| (p, -alpha * lambda * p - lambda * q);
    let (mut q, mut p) = (q0, p0);
    for _ in 0..steps {
        let (a1, b1) = f(q, p);
        let (a2, b2) = f(q + 0.5 * h * a1, p + 0.5 * h * b1);
        let (a3, b3) = f(q + 0.5 * h * a2, p + 0.5 * h * b2);
        let (a4, b4) = f(q + h * a3, p + h * b3);
        q += h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        p += h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    }
    (q, p)
}

/// Closed-form overdamped amplitude for `alpha = 1`, `lambda = pi^2`, `q(0) = 0.5`,
/// `q'(0) = 0`, from high-precision evaluation.
pub const OVERDAMPED_PI2: [(f64, f64); 4] = [
    (0.1, 0.481917926004092378),
    (0.2, 0.445192152878712934),
    (0.3, 0.403802919547261556),
    (1.0, 0.185617097934767545),
];

/// Characteristic roots of `r^2 + pi^2 r + pi^2 = 0`.
pub const OVERDAMPED_ROOTS: (f64, f64) = (-1.12919208422807866, -8.74041231686127995);

/// Underdamped amplitude for `alpha = 0.01`, `lambda = pi^2`, `q(0) = 1`, `q'(0) = 0`.
pub const UNDERDAMPED_PI2: [(f64, f64); 2] = [(0.3, 0.59176197047652164), (1.0, -0.95184393986942291)];

/// Strictly diagonally dominant tridiagonal system `(lower, diag, upper, rhs)`
/// of size `n`, with random signs and magnitudes.
pub fn dominant_system(rng: &mut impl rand::Rng, n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let lower: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let upper: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let diag = (0..n)
        .map(|i| {
            let off = if i > 0 { lower[i - 1].abs() } else { 0.0 } + if i + 1 < n { upper[i].abs() } else { 0.0 };
            let d = off + rng.gen_range(0.1..2.0);
            if rng.gen_bool(0.5) {
                d
            } else {
                -d
            }
        })
        .collect();
    let rhs = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
    (lower, diag, upper, rhs)
}

/// `max |a - b| / max |b|`.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let den = b.iter().map(|y| y.abs()).fold(0.0, f64::max);
    num / den.max(f64::MIN_POSITIVE)
}
