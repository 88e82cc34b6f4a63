use super::VectorField;
use crate::fracform::{
    cosine_transform_matrix, expand, FracKind, ModeKind, ModeSpectrum, DEFAULT_TRUNCATION,
};
use crate::linalg::checked_cholesky;
use crate::refelem::{legendre, QuadratureRule, RTFunction, TensorPolynomial};
use crate::Result;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

/// Gram matrices beyond this condition number are rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

/// L2(K) projection onto `P_p(K)` with `2p + 16` Gauss points per direction.
pub fn proj_l2(f: impl Fn(f64, f64) -> f64, p: usize) -> TensorPolynomial {
    proj_l2_with_points(f, p, 2 * p + 16)
}

pub fn proj_l2_with_points(
    f: impl Fn(f64, f64) -> f64,
    p: usize,
    points: usize,
) -> TensorPolynomial {
    TensorPolynomial::project(p, p, points, f)
}

/// Componentwise L2 projection of `u` onto `P_{p,p-1} x P_{p-1,p}`.
pub fn rt_projection(u: &dyn VectorField, p: usize, points: usize) -> RTFunction {
    let rule = QuadratureRule::gauss(points);
    let n = rule.len();
    let mut phi = DMatrix::zeros(n, p + 1);
    for (a, (&x, &w)) in rule.points().iter().zip(rule.weights()).enumerate() {
        for (k, v) in legendre::values(p, x).into_iter().enumerate() {
            phi[(a, k)] = w * v;
        }
    }
    let mut v1 = DMatrix::zeros(n, n);
    let mut v2 = DMatrix::zeros(n, n);
    for (a, &x) in rule.points().iter().enumerate() {
        for (b, &y) in rule.points().iter().enumerate() {
            let v = u.value(x, y);
            v1[(a, b)] = v[0];
            v2[(a, b)] = v[1];
        }
    }
    let lo = phi.columns(0, p).into_owned();
    let c1 = phi.transpose() * v1 * &lo;
    let c2 = lo.transpose() * v2 * &phi;
    let t1 =
        TensorPolynomial::new(p, p - 1, c1.transpose().as_slice().to_vec()).expect("sizes match");
    let t2 =
        TensorPolynomial::new(p - 1, p, c2.transpose().as_slice().to_vec()).expect("sizes match");
    RTFunction::new(p, t1, t2).expect("degrees match")
}

/// tilde H^{-1/2}(K) projector onto `P_d(K)` through truncated cosine
/// spectra.
#[derive(Debug, Clone)]
pub struct TildeHm12Projector {
    degree: usize,
    truncation: usize,
    spectra: DMatrix<f64>,
    weights: DVector<f64>,
    gram: DMatrix<f64>,
    cholesky: Cholesky<f64, Dyn>,
}

impl TildeHm12Projector {
    pub fn new(degree: usize, truncation: usize) -> Result<Self> {
        let t = cosine_transform_matrix(truncation, degree);
        let spectra = t.kronecker(&t);
        let c = truncation + 1;
        let weights = DVector::from_fn(c * c, |i, _| FracKind::TildeHm12K.weight(i / c, i % c));
        let weighted = DMatrix::from_fn(spectra.nrows(), spectra.ncols(), |r, k| {
            weights[r] * spectra[(r, k)]
        });
        let gram = spectra.transpose() * weighted;
        let cholesky = checked_cholesky(&gram, CONDITION_LIMIT)?;
        Ok(Self {
            degree,
            truncation,
            spectra,
            weights,
            gram,
            cholesky,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Gram matrix of the tensor Legendre basis of `P_d(K)`.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// `<f, phi_k>` for every basis member, `f` given by its cosine spectrum.
    pub fn moments(&self, f: &ModeSpectrum) -> DVector<f64> {
        let w = DVector::from_fn(self.weights.len(), |i, _| {
            self.weights[i] * f.coefficients()[i]
        });
        self.spectra.transpose() * w
    }

    pub fn moments_of(&self, f: impl Fn(f64, f64) -> f64) -> Result<DVector<f64>> {
        Ok(self.moments(&expand(f, ModeKind::Cosine, self.truncation)?))
    }

    pub fn solve(&self, moments: &DVector<f64>) -> TensorPolynomial {
        let c = self.cholesky.solve(moments);
        TensorPolynomial::new(self.degree, self.degree, c.as_slice().to_vec())
            .expect("size matches")
    }

    pub fn project(&self, f: impl Fn(f64, f64) -> f64) -> Result<TensorPolynomial> {
        Ok(self.solve(&self.moments_of(f)?))
    }

    /// `<a, b>` for polynomials of degree at most `d`.
    pub fn inner(&self, a: &TensorPolynomial, b: &TensorPolynomial) -> f64 {
        let d = self.degree;
        let va = DVector::from_row_slice(a.raised(d, d).coefficients());
        let vb = DVector::from_row_slice(b.raised(d, d).coefficients());
        va.dot(&(&self.gram * vb))
    }

    pub fn norm(&self, a: &TensorPolynomial) -> f64 {
        self.inner(a, a).max(0.0).sqrt()
    }
}

/// tilde H^{-1/2}(K) projection onto `P_p(K)` at the default truncation.
pub fn proj_tilde_hm12(f: impl Fn(f64, f64) -> f64, p: usize) -> Result<TensorPolynomial> {
    proj_tilde_hm12_with(f, p, DEFAULT_TRUNCATION)
}

pub fn proj_tilde_hm12_with(
    f: impl Fn(f64, f64) -> f64,
    p: usize,
    truncation: usize,
) -> Result<TensorPolynomial> {
    TildeHm12Projector::new(p, truncation)?.project(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn l2_projection_reproduces_and_fits() {
        let q = TensorPolynomial::project(3, 3, 6, |x, y| x * x * y - y.powi(3) + 0.25);
        let r = proj_l2(|x, y| q.eval(x, y), 3);
        assert!(r.sub(&q).max_abs_coefficient() < 1e-13);
        // x^2 onto P_1: 1D normal equations give x - 1/6
        let r = proj_l2(|x, _| x * x, 1);
        for &(x, y) in &[(0.1, 0.4), (0.7, 0.2)] {
            assert!((r.eval(x, y) - (x - 1.0 / 6.0)).abs() < 1e-13);
        }
        // residuals from an independent 60-point numpy computation
        let rule = QuadratureRule::gauss(30);
        for (p, want) in [(5, 3.690256042299648e-4), (6, 4.155264277213478e-6)] {
            let r = proj_l2(|x, _| (PI * x).sin(), p);
            let res = rule
                .integrate_2d(|x, y| ((PI * x).sin() - r.eval(x, y)).powi(2))
                .sqrt();
            assert!((res - want).abs() < 1e-9 * want.max(1e-3), "{res}");
        }
    }

    #[test]
    fn rt_projection_reproduces_rt_functions() {
        let p = 3;
        let b = crate::refelem::rt_basis(p).unwrap();
        let v = b
            .iter()
            .enumerate()
            .fold(RTFunction::zero(p).unwrap(), |acc, (i, f)| {
                acc.add(&f.scaled(0.1 * i as f64 - 1.0))
            });
        let r = rt_projection(&v, p, 12);
        assert!(r.sub(&v).max_abs_coefficient() < 1e-13);
    }

    #[test]
    fn tilde_hm12_projection_properties() {
        let proj = TildeHm12Projector::new(2, 64).unwrap();
        let q = TensorPolynomial::project(2, 2, 4, |x, y| 1.0 + x - 3.0 * x * y * y);
        let r = proj.project(|x, y| q.eval(x, y)).unwrap();
        assert!(r.sub(&q).max_abs_coefficient() < 1e-10);
        // mean preservation and orthogonality of the residual for x^3
        let f = |x: f64, _: f64| x.powi(3);
        let r = proj.project(f).unwrap();
        assert!((r.integral() - 0.25).abs() < 1e-12);
        let m = proj.moments_of(f).unwrap();
        let defect = &m - proj.gram() * DVector::from_row_slice(r.coefficients());
        assert!(defect.amax() <= 1e-9);
        let one = TensorPolynomial::constant(1.0);
        assert!((proj.inner(&one, &one) - 1.0).abs() < 1e-13);
    }
}
