//! Projections and projection-based interpolation on the reference square.
//!
//! The H(div) interpolant of a field `u` is assembled in three stages:
//!
//! 1. `u1`, the lowest-order RT function with the four edge fluxes of `u`;
//! 2. `u2p`, the curl of a polynomial extension of the edge primitives
//!    `psi(s) = int_0^s (u - u1).n`, each projected onto the edge bubbles in
//!    the tilde H^{1/2} edge product;
//! 3. `u3p`, an RT bubble fixing the divergence (in L2 or tilde H^{-1/2})
//!    and the discrete curl part (in L2).

mod div;
mod edge;
pub mod fields;
mod h1;
mod infsup;
mod projection;
mod stability;

pub use div::{
    interp_div_l2, interp_div_m12, BoundaryPrimitive, DivInterpolator, DivNorm,
    InterpolantBreakdown,
};
pub use h1::interp_h1;
pub use infsup::{infsup_closed_form, infsup_constant, InfSupReport};
pub use projection::{
    proj_l2, proj_l2_with_points, proj_tilde_hm12, proj_tilde_hm12_with, rt_projection,
    TildeHm12Projector,
};
pub use stability::{loglog_slope, stability_scan, StabilityRow};

use crate::fracform::DEFAULT_TRUNCATION;
use crate::refelem::{legendre, RTFunction, TensorPolynomial};

/// Scalar field on `K` with its gradient.
pub trait ScalarField: Sync {
    fn value(&self, x: f64, y: f64) -> f64;
    fn gradient(&self, x: f64, y: f64) -> [f64; 2];
}

/// Vector field on `K` with its divergence.
pub trait VectorField: Sync {
    fn value(&self, x: f64, y: f64) -> [f64; 2];
    fn divergence(&self, x: f64, y: f64) -> f64;
}

impl ScalarField for TensorPolynomial {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.eval(x, y)
    }

    fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        self.eval_with_gradient(x, y).1
    }
}

impl VectorField for RTFunction {
    fn value(&self, x: f64, y: f64) -> [f64; 2] {
        self.eval(x, y)
    }

    fn divergence(&self, x: f64, y: f64) -> f64 {
        let p = self.order();
        let (vx, dx) = legendre::values_and_derivatives(p, x);
        let (vy, dy) = legendre::values_and_derivatives(p, y);
        let (c1, c2) = (self.component_1(), self.component_2());
        let mut s = 0.0;
        for i in 0..=p {
            for j in 0..p {
                s += c1.coefficient(i, j) * dx[i] * vy[j];
            }
        }
        for i in 0..p {
            for j in 0..=p {
                s += c2.coefficient(i, j) * vx[i] * dy[j];
            }
        }
        s
    }
}

/// `curl f = (d2 f, -d1 f)`.
pub struct Curl<'a, S: ?Sized>(pub &'a S);

impl<S: ScalarField + ?Sized> VectorField for Curl<'_, S> {
    fn value(&self, x: f64, y: f64) -> [f64; 2] {
        let g = self.0.gradient(x, y);
        [g[1], -g[0]]
    }

    fn divergence(&self, _x: f64, _y: f64) -> f64 {
        0.0
    }
}

/// Scalar field from closures.
pub struct FnScalar<F, G> {
    pub value: F,
    pub gradient: G,
}

impl<F, G> ScalarField for FnScalar<F, G>
where
    F: Fn(f64, f64) -> f64 + Sync,
    G: Fn(f64, f64) -> [f64; 2] + Sync,
{
    fn value(&self, x: f64, y: f64) -> f64 {
        (self.value)(x, y)
    }

    fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        (self.gradient)(x, y)
    }
}

/// Vector field from closures.
pub struct FnVector<F, G> {
    pub value: F,
    pub divergence: G,
}

impl<F, G> VectorField for FnVector<F, G>
where
    F: Fn(f64, f64) -> [f64; 2] + Sync,
    G: Fn(f64, f64) -> f64 + Sync,
{
    fn value(&self, x: f64, y: f64) -> [f64; 2] {
        (self.value)(x, y)
    }

    fn divergence(&self, x: f64, y: f64) -> f64 {
        (self.divergence)(x, y)
    }
}

/// Transverse profile of the edge extension `psi(s) b(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Blend {
    /// `b(t) = 1 - t`
    #[default]
    Linear,
    /// `b(t) = (1 - t)^2`
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpOptions {
    /// Modes per direction for the spectral products.
    pub truncation: usize,
    pub blend: Blend,
    /// Gauss points per direction for fluxes and L2 moments; `2p + 16` when
    /// unset.
    pub quadrature_points: Option<usize>,
}

impl Default for InterpOptions {
    fn default() -> Self {
        Self {
            truncation: DEFAULT_TRUNCATION,
            blend: Blend::Linear,
            quadrature_points: None,
        }
    }
}

impl InterpOptions {
    pub fn points(&self, p: usize) -> usize {
        self.quadrature_points.unwrap_or(2 * p + 16)
    }
}
