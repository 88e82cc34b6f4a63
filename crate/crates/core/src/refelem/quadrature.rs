use std::f64::consts::PI;

/// Gauss-Legendre rule mapped to `[0,1]`.
///
/// An `n`-point rule integrates polynomials of degree `2n - 1` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// `n`-point Gauss-Legendre rule on `[0,1]` (`n >= 1`).
    pub fn gauss(n: usize) -> Self {
        let n = n.max(1);
        let mut points = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess followed by Newton on P_n.
            let theta = PI * (i as f64 + 0.75) / (nf + 0.5);
            let mut t = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, t);
                dp = d;
                let step = p / d;
                t -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, t);
            dp = if d.is_finite() { d } else { dp };
            let w = 2.0 / ((1.0 - t * t) * dp * dp);
            // t is the i-th largest root; mirror it.
            points[n - 1 - i] = 0.5 * (1.0 + t);
            points[i] = 0.5 * (1.0 - t);
            weights[n - 1 - i] = 0.5 * w;
            weights[i] = 0.5 * w;
        }
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exactness(&self) -> usize {
        2 * self.points.len() - 1
    }

    /// Tensor rule on `K`: `((x, y), w)` with `x` varying slowest.
    pub fn tensor(&self) -> Vec<([f64; 2], f64)> {
        let mut out = Vec::with_capacity(self.len() * self.len());
        for (&x, &wx) in self.points.iter().zip(&self.weights) {
            for (&y, &wy) in self.points.iter().zip(&self.weights) {
                out.push(([x, y], wx * wy));
            }
        }
        out
    }

    /// `int_0^1 f`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// `int_a^b f` by the affinely mapped rule.
    pub fn integrate_on(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let len = b - a;
        len * self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(a + len * x))
            .sum::<f64>()
    }

    /// `int_K f`.
    pub fn integrate_2d(&self, mut f: impl FnMut(f64, f64) -> f64) -> f64 {
        let mut s = 0.0;
        for (&x, &wx) in self.points.iter().zip(&self.weights) {
            for (&y, &wy) in self.points.iter().zip(&self.weights) {
                s += wx * wy * f(x, y);
            }
        }
        s
    }
}

/// `P_n(t)` and `P_n'(t)` on `[-1,1]`.
fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * t * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}
