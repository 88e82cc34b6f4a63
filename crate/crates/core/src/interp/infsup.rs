use crate::linalg::min_singular_value;
use crate::refelem::{
    legendre, rt_bubble_basis, scalar_bubble_basis, scalar_curl, RTFunction, TensorPolynomial,
};
use crate::{Error, Result};
use nalgebra::DMatrix;

/// Discrete inf-sup constant between the RT bubbles and
/// `curl P0_p + grad div RT0_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfSupReport {
    pub p: usize,
    pub computed: f64,
    pub closed_form: f64,
    pub dim_a: usize,
    pub dim_b: usize,
}

impl InfSupReport {
    pub fn abs_err(&self) -> f64 {
        (self.computed - self.closed_form).abs()
    }
}

/// `sqrt(2(2p+1) / ((p+1)(p+2)))`.
pub fn infsup_closed_form(p: usize) -> f64 {
    let p = p as f64;
    (2.0 * (2.0 * p + 1.0) / ((p + 1.0) * (p + 2.0))).sqrt()
}

fn gradient(i: usize, j: usize, p: usize) -> Result<RTFunction> {
    let mut ei = vec![0.0; i + 1];
    ei[i] = 1.0;
    let mut ej = vec![0.0; j + 1];
    ej[j] = 1.0;
    let c1 = TensorPolynomial::outer(&legendre::differentiate(&ei), &ej).raised(p, p - 1);
    let c2 = TensorPolynomial::outer(&ei, &legendre::differentiate(&ej)).raised(p - 1, p);
    RTFunction::new(p, c1, c2)
}

fn gram(a: &[RTFunction], b: &[RTFunction]) -> DMatrix<f64> {
    DMatrix::from_fn(a.len(), b.len(), |i, j| a[i].dot(&b[j]))
}

pub fn infsup_constant(p: usize) -> Result<InfSupReport> {
    if p < 1 {
        return Err(Error::InvalidDegree {
            degree: p,
            reason: "order must be at least 1",
        });
    }
    if p == 1 {
        return Err(Error::TrivialBubbleSpace);
    }
    let a = rt_bubble_basis(p)?;
    let mut b: Vec<RTFunction> = scalar_bubble_basis(p).iter().map(scalar_curl).collect();
    for i in 0..p {
        for j in 0..p {
            if i + j > 0 {
                b.push(gradient(i, j, p)?);
            }
        }
    }
    let la = gram(&a, &a)
        .cholesky()
        .ok_or_else(|| Error::Degeneracy("bubble Gram".into()))?;
    let lb = gram(&b, &b)
        .cholesky()
        .ok_or_else(|| Error::Degeneracy("test-space Gram".into()))?;
    let c = gram(&a, &b);
    let x = la
        .l()
        .solve_lower_triangular(&c)
        .ok_or_else(|| Error::Degeneracy("triangular solve".into()))?;
    let y = lb
        .l()
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(|| Error::Degeneracy("triangular solve".into()))?;
    Ok(InfSupReport {
        p,
        computed: min_singular_value(&y),
        closed_form: infsup_closed_form(p),
        dim_a: a.len(),
        dim_b: b.len(),
    })
}
