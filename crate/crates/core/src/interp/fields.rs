//! Test fields used by the experiments.

use super::{ScalarField, VectorField};

/// `sum amp * sin(kx x + ky y + phase)` per component.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigField {
    /// `[amp, kx, ky, phase]` terms of the first component.
    pub first: Vec<[f64; 4]>,
    pub second: Vec<[f64; 4]>,
}

fn wave(t: &[f64; 4], x: f64, y: f64) -> f64 {
    t[0] * (t[1] * x + t[2] * y + t[3]).sin()
}

fn wave_d(t: &[f64; 4], x: f64, y: f64) -> [f64; 2] {
    let c = t[0] * (t[1] * x + t[2] * y + t[3]).cos();
    [t[1] * c, t[2] * c]
}

impl VectorField for TrigField {
    fn value(&self, x: f64, y: f64) -> [f64; 2] {
        [
            self.first.iter().map(|t| wave(t, x, y)).sum(),
            self.second.iter().map(|t| wave(t, x, y)).sum(),
        ]
    }

    fn divergence(&self, x: f64, y: f64) -> f64 {
        self.first.iter().map(|t| wave_d(t, x, y)[0]).sum::<f64>()
            + self.second.iter().map(|t| wave_d(t, x, y)[1]).sum::<f64>()
    }
}

/// Scalar `sum amp * sin(kx x + ky y + phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigScalar {
    pub terms: Vec<[f64; 4]>,
}

impl ScalarField for TrigScalar {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().map(|t| wave(t, x, y)).sum()
    }

    fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        self.terms.iter().fold([0.0, 0.0], |acc, t| {
            let d = wave_d(t, x, y);
            [acc[0] + d[0], acc[1] + d[1]]
        })
    }
}

/// `grad r^alpha` with `r` measured from `(-delta, -delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerGradient {
    pub delta: f64,
    pub alpha: f64,
}

impl VectorField for CornerGradient {
    fn value(&self, x: f64, y: f64) -> [f64; 2] {
        let (a, b) = (x + self.delta, y + self.delta);
        let s = self.alpha * (a * a + b * b).powf(0.5 * self.alpha - 1.0);
        [s * a, s * b]
    }

    fn divergence(&self, x: f64, y: f64) -> f64 {
        let (a, b) = (x + self.delta, y + self.delta);
        self.alpha * self.alpha * (a * a + b * b).powf(0.5 * self.alpha - 1.0)
    }
}

/// `grad (r^{2/3} sin(2 theta / 3))`, polar coordinates about
/// `(-delta, -delta)`. Divergence free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerHarmonic {
    pub delta: f64,
}

impl VectorField for CornerHarmonic {
    fn value(&self, x: f64, y: f64) -> [f64; 2] {
        let (a, b) = (x + self.delta, y + self.delta);
        let r = a.hypot(b);
        let th = b.atan2(a);
        let s = 2.0 / 3.0 * r.powf(-1.0 / 3.0);
        [-s * (th / 3.0).sin(), s * (th / 3.0).cos()]
    }

    fn divergence(&self, _x: f64, _y: f64) -> f64 {
        0.0
    }
}
