use super::legendre;
use super::QuadratureRule;
use crate::{Error, Result};

/// Bivariate polynomial of degree `<= degree_1` in `x` and `<= degree_2` in
/// `y`, stored as coefficients of `phi_i(x) phi_j(y)` (row-major in `i`).
#[derive(Debug, Clone, PartialEq)]
pub struct TensorPolynomial {
    degree_1: usize,
    degree_2: usize,
    coefficients: Vec<f64>,
}

impl TensorPolynomial {
    pub fn new(degree_1: usize, degree_2: usize, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != (degree_1 + 1) * (degree_2 + 1) {
            return Err(Error::KindMismatch(format!(
                "{} coefficients for degrees ({degree_1},{degree_2})",
                coefficients.len()
            )));
        }
        Ok(Self {
            degree_1,
            degree_2,
            coefficients,
        })
    }

    pub fn zeros(degree_1: usize, degree_2: usize) -> Self {
        Self {
            degree_1,
            degree_2,
            coefficients: vec![0.0; (degree_1 + 1) * (degree_2 + 1)],
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            degree_1: 0,
            degree_2: 0,
            coefficients: vec![c],
        }
    }

    /// Tensor product `a(x) b(y)` of two 1D series.
    pub fn outer(a: &[f64], b: &[f64]) -> Self {
        let d1 = a.len().max(1) - 1;
        let d2 = b.len().max(1) - 1;
        let mut out = Self::zeros(d1, d2);
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                out.coefficients[i * (d2 + 1) + j] = ai * bj;
            }
        }
        out
    }

    /// L2(K) projection of `f` onto degrees `(d1, d2)` using an `n`-point
    /// Gauss rule per direction. Exact for polynomial `f` once
    /// `2n - 1 >= deg f + max(d1, d2)`.
    pub fn project(d1: usize, d2: usize, n: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let rule = QuadratureRule::gauss(n);
        let vx: Vec<Vec<f64>> = rule
            .points()
            .iter()
            .map(|&x| legendre::values(d1, x))
            .collect();
        let vy: Vec<Vec<f64>> = rule
            .points()
            .iter()
            .map(|&y| legendre::values(d2, y))
            .collect();
        let mut out = Self::zeros(d1, d2);
        for (a, (&x, &wx)) in rule.points().iter().zip(rule.weights()).enumerate() {
            for (b, (&y, &wy)) in rule.points().iter().zip(rule.weights()).enumerate() {
                let fw = wx * wy * f(x, y);
                for i in 0..=d1 {
                    let fi = fw * vx[a][i];
                    for j in 0..=d2 {
                        out.coefficients[i * (d2 + 1) + j] += fi * vy[b][j];
                    }
                }
            }
        }
        out
    }

    pub fn degree_1(&self) -> usize {
        self.degree_1
    }

    pub fn degree_2(&self) -> usize {
        self.degree_2
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.degree_1, self.degree_2)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coefficients
    }

    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        if i > self.degree_1 || j > self.degree_2 {
            0.0
        } else {
            self.coefficients[i * (self.degree_2 + 1) + j]
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let vx = legendre::values(self.degree_1, x);
        let vy = legendre::values(self.degree_2, y);
        self.eval_with(&vx, &vy)
    }

    /// Evaluation from precomputed 1D basis values (at least as long as the
    /// degrees require).
    pub fn eval_with(&self, vx: &[f64], vy: &[f64]) -> f64 {
        let n2 = self.degree_2 + 1;
        let mut s = 0.0;
        for i in 0..=self.degree_1 {
            let row = &self.coefficients[i * n2..(i + 1) * n2];
            let r: f64 = row.iter().zip(vy).map(|(c, v)| c * v).sum();
            s += vx[i] * r;
        }
        s
    }

    /// Value and gradient at `(x, y)`.
    pub fn eval_with_gradient(&self, x: f64, y: f64) -> (f64, [f64; 2]) {
        let (vx, dx) = legendre::values_and_derivatives(self.degree_1, x);
        let (vy, dy) = legendre::values_and_derivatives(self.degree_2, y);
        let n2 = self.degree_2 + 1;
        let (mut v, mut gx, mut gy) = (0.0, 0.0, 0.0);
        for i in 0..=self.degree_1 {
            for j in 0..=self.degree_2 {
                let c = self.coefficients[i * n2 + j];
                v += c * vx[i] * vy[j];
                gx += c * dx[i] * vy[j];
                gy += c * vx[i] * dy[j];
            }
        }
        (v, [gx, gy])
    }

    /// `d/dx`, of degrees `(max(d1-1, 0), d2)`.
    pub fn partial_1(&self) -> Self {
        let d1 = self.degree_1.saturating_sub(1);
        let n2 = self.degree_2 + 1;
        let mut out = Self::zeros(d1, self.degree_2);
        for j in 0..n2 {
            let col: Vec<f64> = (0..=self.degree_1)
                .map(|i| self.coefficients[i * n2 + j])
                .collect();
            let d = legendre::differentiate(&col);
            for (i, v) in d.iter().enumerate().take(d1 + 1) {
                out.coefficients[i * n2 + j] = *v;
            }
        }
        out
    }

    /// `d/dy`, of degrees `(d1, max(d2-1, 0))`.
    pub fn partial_2(&self) -> Self {
        let d2 = self.degree_2.saturating_sub(1);
        let n2 = self.degree_2 + 1;
        let mut out = Self::zeros(self.degree_1, d2);
        for i in 0..=self.degree_1 {
            let d = legendre::differentiate(&self.coefficients[i * n2..(i + 1) * n2]);
            for (j, v) in d.iter().enumerate().take(d2 + 1) {
                out.coefficients[i * (d2 + 1) + j] = *v;
            }
        }
        out
    }

    /// Re-expresses the polynomial with degrees `(d1, d2)`. Fails if a
    /// nonzero coefficient would be dropped.
    pub fn with_degrees(&self, d1: usize, d2: usize) -> Result<Self> {
        let mut out = Self::zeros(d1, d2);
        for i in 0..=self.degree_1 {
            for j in 0..=self.degree_2 {
                let c = self.coefficients[i * (self.degree_2 + 1) + j];
                if i > d1 || j > d2 {
                    if c != 0.0 {
                        return Err(Error::InvalidDegree {
                            degree: i.max(j),
                            reason: "nonzero coefficient outside the target degrees",
                        });
                    }
                } else {
                    out.coefficients[i * (d2 + 1) + j] = c;
                }
            }
        }
        Ok(out)
    }

    /// Pads to degrees at least `(d1, d2)`.
    pub fn raised(&self, d1: usize, d2: usize) -> Self {
        self.with_degrees(d1.max(self.degree_1), d2.max(self.degree_2))
            .expect("raising never drops coefficients")
    }

    pub fn add(&self, other: &Self) -> Self {
        let d1 = self.degree_1.max(other.degree_1);
        let d2 = self.degree_2.max(other.degree_2);
        let mut out = self.raised(d1, d2);
        let o = other.raised(d1, d2);
        for (a, b) in out.coefficients.iter_mut().zip(&o.coefficients) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            degree_1: self.degree_1,
            degree_2: self.degree_2,
            coefficients: self.coefficients.iter().map(|c| c * s).collect(),
        }
    }

    /// L2(K) inner product.
    pub fn dot(&self, other: &Self) -> f64 {
        let d1 = self.degree_1.min(other.degree_1);
        let d2 = self.degree_2.min(other.degree_2);
        let mut s = 0.0;
        for i in 0..=d1 {
            for j in 0..=d2 {
                s += self.coefficient(i, j) * other.coefficient(i, j);
            }
        }
        s
    }

    pub fn l2_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `int_K f`; only the `(0,0)` mode has nonzero mean.
    pub fn integral(&self) -> f64 {
        self.coefficients[0]
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_reproduces_polynomials() {
        let f = |x: f64, y: f64| 1.0 + 2.0 * x - x * y + 3.0 * x * x * y * y * y;
        let p = TensorPolynomial::project(2, 3, 6, f);
        for &(x, y) in &[(0.0, 0.0), (0.3, 0.9), (1.0, 1.0), (0.5, 0.25)] {
            assert!((p.eval(x, y) - f(x, y)).abs() < 1e-13);
        }
        assert!((p.integral() - (1.0 + 1.0 - 0.25 + 3.0 / 12.0)).abs() < 1e-14);
    }

    #[test]
    fn partials_match_analytic() {
        let f = |x: f64, y: f64| x.powi(3) * y * y - 2.0 * x * y + y;
        let p = TensorPolynomial::project(3, 2, 5, f);
        let p1 = p.partial_1();
        let p2 = p.partial_2();
        assert_eq!(p1.degrees(), (2, 2));
        assert_eq!(p2.degrees(), (3, 1));
        for &(x, y) in &[(0.1, 0.2), (0.7, 0.4), (1.0, 0.0)] {
            assert!((p1.eval(x, y) - (3.0 * x * x * y * y - 2.0 * y)).abs() < 1e-12);
            assert!((p2.eval(x, y) - (2.0 * x.powi(3) * y - 2.0 * x + 1.0)).abs() < 1e-12);
            let (v, g) = p.eval_with_gradient(x, y);
            assert!((v - f(x, y)).abs() < 1e-13);
            assert!((g[0] - p1.eval(x, y)).abs() < 1e-12);
            assert!((g[1] - p2.eval(x, y)).abs() < 1e-12);
        }
    }

    #[test]
    fn dot_is_l2_product() {
        let a = TensorPolynomial::project(2, 2, 4, |x, y| x * y);
        let b = TensorPolynomial::project(1, 3, 4, |x, y| x + y * y * y);
        // int x*y*(x + y^3) = 1/3*1/2 + 1/2*1/5
        assert!((a.dot(&b) - (1.0 / 6.0 + 0.1)).abs() < 1e-14);
    }

    #[test]
    fn degree_bookkeeping() {
        assert!(TensorPolynomial::new(1, 1, vec![0.0; 3]).is_err());
        let p = TensorPolynomial::project(2, 2, 4, |x, _| x * x);
        assert!(p.with_degrees(1, 2).is_err());
        let r = p.raised(4, 3);
        assert_eq!(r.degrees(), (4, 3));
        assert!((r.eval(0.3, 0.6) - 0.09).abs() < 1e-14);
    }
}
