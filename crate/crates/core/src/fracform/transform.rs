use super::{EdgeModeSpectrum, ModeKind, ModeSpectrum};
use crate::refelem::{legendre, Edge, QuadratureRule, TensorPolynomial};
use crate::{Error, Result};
use nalgebra::DMatrix;

fn check_truncation(m: usize) -> Result<()> {
    if m < 1 {
        return Err(Error::Configuration("truncation must be at least 1".into()));
    }
    Ok(())
}

/// Weighted mode samples `S[k][a] = w_a mode_k(x_a)`.
fn sampled_modes(kind: ModeKind, m: usize, rule: &QuadratureRule) -> DMatrix<f64> {
    let first = if kind == ModeKind::Sine { 1 } else { 0 };
    DMatrix::from_fn(kind.count(m), rule.len(), |k, a| {
        rule.weights()[a] * kind.eval(k + first, rule.points()[a])
    })
}

/// Expansion of `f` with an explicit number of Gauss points per direction.
pub fn expand_with_points(
    f: impl Fn(f64, f64) -> f64,
    kind: ModeKind,
    m: usize,
    points: usize,
) -> Result<ModeSpectrum> {
    check_truncation(m)?;
    if points < 2 * m {
        return Err(Error::Resolution(format!(
            "{points} quadrature points cannot resolve {m} modes (need at least {})",
            2 * m
        )));
    }
    let rule = QuadratureRule::gauss(points);
    let x = rule.points();
    let values = DMatrix::from_fn(points, points, |a, b| f(x[a], x[b]));
    let s = sampled_modes(kind, m, &rule);
    let c = &s * values * s.transpose();
    // row-major (m, n) storage
    let coefficients = c.transpose().as_slice().to_vec();
    ModeSpectrum::new(kind, m, coefficients)
}

/// Expansion of `f` on `K` with `2M + 8` Gauss points per direction.
pub fn expand(f: impl Fn(f64, f64) -> f64, kind: ModeKind, m: usize) -> Result<ModeSpectrum> {
    expand_with_points(f, kind, m, 2 * m + 8)
}

fn transform_matrix(kind: ModeKind, m: usize, degree: usize) -> DMatrix<f64> {
    let rule = QuadratureRule::gauss(2 * m + 8 + degree);
    let s = sampled_modes(kind, m, &rule);
    let mut phi = DMatrix::zeros(rule.len(), degree + 1);
    for (a, &x) in rule.points().iter().enumerate() {
        let v = legendre::values(degree, x);
        for (k, val) in v.into_iter().enumerate() {
            phi[(a, k)] = val;
        }
    }
    s * phi
}

/// `T[k][i] = int_0^1 s_{k+1} phi_i`, shape `M x (degree+1)`.
pub fn sine_transform_matrix(m: usize, degree: usize) -> DMatrix<f64> {
    transform_matrix(ModeKind::Sine, m, degree)
}

/// `T[k][i] = int_0^1 c_k phi_i`, shape `(M+1) x (degree+1)`.
pub fn cosine_transform_matrix(m: usize, degree: usize) -> DMatrix<f64> {
    transform_matrix(ModeKind::Cosine, m, degree)
}

/// Expansion of a polynomial through 1D transform matrices.
pub fn expand_polynomial(p: &TensorPolynomial, kind: ModeKind, m: usize) -> Result<ModeSpectrum> {
    check_truncation(m)?;
    let (d1, d2) = p.degrees();
    let t1 = transform_matrix(kind, m, d1);
    let t2 = transform_matrix(kind, m, d2);
    let coef = DMatrix::from_row_slice(d1 + 1, d2 + 1, p.coefficients());
    let c = t1 * coef * t2.transpose();
    ModeSpectrum::new(kind, m, c.transpose().as_slice().to_vec())
}

/// Sine expansion of `g(s)` on `edge`, `2M + 8` Gauss points.
pub fn expand_edge(g: impl Fn(f64) -> f64, edge: Edge, m: usize) -> Result<EdgeModeSpectrum> {
    check_truncation(m)?;
    let rule = QuadratureRule::gauss(2 * m + 8);
    let vals: Vec<f64> = rule.points().iter().map(|&s| g(s)).collect();
    let coefficients = (1..=m)
        .map(|k| {
            rule.points()
                .iter()
                .zip(rule.weights())
                .zip(&vals)
                .map(|((&s, &w), &v)| w * v * ModeKind::Sine.eval(k, s))
                .sum()
        })
        .collect();
    EdgeModeSpectrum::new(edge, coefficients)
}
