//! Space-time test functions for the weak-form probes.

/// Closed rectangle `[t0, t1] x [x0, x1]` outside of which a test function vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub t0: f64,
    pub t1: f64,
    pub x0: f64,
    pub x1: f64,
}

pub trait TestFunction {
    fn value(&self, t: f64, x: f64) -> f64;
    fn support(&self) -> Support;
    fn is_nonnegative(&self) -> bool;
}

/// `B(s) = (1 - s^2)^3` on `|s| < 1`: C2 with compact support.
pub fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let u = 1.0 - s * s;
        u * u * u
    }
}

/// `A B((t - tc)/tw) B((x - xc)/xw)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpTestFn {
    pub amplitude: f64,
    pub t_center: f64,
    pub t_width: f64,
    pub x_center: f64,
    pub x_width: f64,
}

impl BumpTestFn {
    pub fn new(amplitude: f64, t_center: f64, t_width: f64, x_center: f64, x_width: f64) -> Self {
        assert!(t_width > 0.0 && x_width > 0.0, "bump widths must be positive");
        Self {
            amplitude,
            t_center,
            t_width,
            x_center,
            x_width,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            amplitude: self.amplitude * c,
            ..*self
        }
    }
}

impl TestFunction for BumpTestFn {
    fn value(&self, t: f64, x: f64) -> f64 {
        self.amplitude * bump((t - self.t_center) / self.t_width) * bump((x - self.x_center) / self.x_width)
    }

    fn support(&self) -> Support {
        Support {
            t0: self.t_center - self.t_width,
            t1: self.t_center + self.t_width,
            x0: self.x_center - self.x_width,
            x1: self.x_center + self.x_width,
        }
    }

    fn is_nonnegative(&self) -> bool {
        self.amplitude >= 0.0
    }
}

/// Nonnegative bumps tiling `(0, T) x (0, l)`: wide and narrow, early and late,
/// including ones that reach back across `t = 0`.
pub fn builtin_family(length: f64, horizon: f64) -> Vec<BumpTestFn> {
    let mut fns = Vec::new();
    for &(tc, tw) in &[
        (0.0, 0.4),
        (0.25, 0.2),
        (0.5, 0.3),
        (0.7, 0.25),
        (0.5, 0.45),
    ] {
        for &(xc, xw) in &[(0.5, 0.45), (0.3, 0.15), (0.5, 0.08), (0.75, 0.2)] {
            fns.push(BumpTestFn::new(1.0, tc * horizon, tw * horizon, xc * length, xw * length));
        }
    }
    fns
}
