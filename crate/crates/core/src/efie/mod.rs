//! Galerkin discretization of the electric field integral equation in
//! Rumsey's form on `X_hp`:
//!
//! `a(u, v) = <Psi_k div u, div v> - k^2 <Psi_k u, v>`, with the
//! single-layer kernel `exp(ik|x-y|) / (4 pi |x-y|)` and no conjugation, so
//! the matrix of a real basis is complex symmetric.

mod assembly;
mod convergence;
mod quadrature;

pub use assembly::{assemble_blocks, AssemblyOptions, PairCounts, SingleLayerBlocks};
pub use convergence::{convergence_study, differences_decrease, ConvergenceRow};
pub use quadrature::{common_edge, common_vertex, corner_map, identical, side_map, PairPoint};

use crate::interp::{DivNorm, InterpOptions};
use crate::refelem::QuadratureRule;
use crate::surface::{
    dot, global_interpolate_with, norm, scale, DiscreteField, GlobalRTSpace, Vec3,
};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Wave number and incident plane wave `E(x) = a exp(ik d.x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveContext {
    k: f64,
    direction: Vec3,
    polarization: Vec3,
}

impl WaveContext {
    /// `direction` is normalized; `polarization` must be orthogonal to it.
    pub fn new(k: f64, direction: Vec3, polarization: Vec3) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Configuration(format!(
                "wave number {k} must be positive"
            )));
        }
        let dn = norm(direction);
        if !(dn > 0.0 && dn.is_finite()) || polarization.iter().any(|c| !c.is_finite()) {
            return Err(Error::Configuration(
                "direction must be a finite non-zero vector".into(),
            ));
        }
        let d = scale(direction, 1.0 / dn);
        if dot(d, polarization).abs() > 1e-12 * norm(polarization).max(1.0) {
            return Err(Error::Configuration(
                "polarization is not orthogonal to the direction".into(),
            ));
        }
        Ok(Self {
            k,
            direction: d,
            polarization,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    pub fn polarization(&self) -> Vec3 {
        self.polarization
    }

    pub fn incident(&self, x: Vec3) -> [Complex64; 3] {
        let phase = Complex64::from_polar(1.0, self.k * dot(self.direction, x));
        self.polarization.map(|a| phase * a)
    }
}

/// Dense Galerkin matrix and right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinSystem {
    pub matrix: DMatrix<Complex64>,
    pub rhs: DVector<Complex64>,
    pub quad_order: usize,
    pub counts: PairCounts,
}

impl GalerkinSystem {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// `max |A - A^T| / max |A|`.
    pub fn symmetry_defect(&self) -> f64 {
        let a = &self.matrix;
        let n = a.nrows();
        let mut d = 0.0f64;
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                d = d.max((a[(i, j)] - a[(j, i)]).norm());
                m = m.max(a[(i, j)].norm());
            }
        }
        d / m
    }
}

/// Matrix of `a(.,.)` and the plane-wave load.
pub fn assemble(
    space: &GlobalRTSpace,
    wave: &WaveContext,
    options: AssemblyOptions,
) -> Result<GalerkinSystem> {
    let blocks = assemble_blocks(space, wave.k, options)?;
    let k2 = wave.k * wave.k;
    let matrix = &blocks.div - blocks.field.map(|v| v * k2);
    Ok(GalerkinSystem {
        matrix,
        rhs: rhs_plane_wave(space, wave),
        quad_order: blocks.quad_order,
        counts: blocks.counts,
    })
}

/// `b_m = <pi_t E, phi_m>`: on each element `int E(T) . DT v_hat`, which
/// only sees the tangential part of `E`.
pub fn rhs_plane_wave(space: &GlobalRTSpace, wave: &WaveContext) -> DVector<Complex64> {
    let p = space.order();
    let mesh = space.mesh();
    let h = mesh.h();
    let q = p + 4 + (wave.k * h).ceil() as usize;
    let rule = QuadratureRule::gauss(q).tensor();
    let mut b = DVector::from_element(space.dim(), Complex64::new(0.0, 0.0));
    for (j, el) in mesh.elements().iter().enumerate() {
        let dofs = space.local_dofs(j);
        for (f, d) in space.local_basis().iter().zip(dofs) {
            let Some(g) = d.global else { continue };
            let mut s = Complex64::new(0.0, 0.0);
            for &(xi, w) in &rule {
                let (d1, d2) = el.chart.jacobian(xi);
                let v = f.eval(xi[0], xi[1]);
                let t = [0, 1, 2].map(|c| d1[c] * v[0] + d2[c] * v[1]);
                let e = wave.incident(el.chart.map(xi));
                s += (e[0] * t[0] + e[1] * t[1] + e[2] * t[2]) * w;
            }
            b[g] += s * d.sign;
        }
    }
    b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Solved,
    /// The factorization broke down or the residual missed the tolerance.
    Singular,
    /// Above the dense limit; nothing was attempted.
    TooLarge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub solution: Option<DVector<Complex64>>,
    /// `|A u - b| / |b|`.
    pub relative_residual: f64,
}

pub const DEFAULT_DENSE_LIMIT: usize = 4000;

/// Partially pivoted LU solve. A singular matrix is reported in the status,
/// not raised.
pub fn solve(system: &GalerkinSystem) -> SolveReport {
    solve_with_limit(system, DEFAULT_DENSE_LIMIT)
}

pub fn solve_with_limit(system: &GalerkinSystem, dense_limit: usize) -> SolveReport {
    solve_matrix(&system.matrix, &system.rhs, dense_limit)
}

pub fn solve_matrix(
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    dense_limit: usize,
) -> SolveReport {
    if a.nrows() > dense_limit {
        return SolveReport {
            status: SolveStatus::TooLarge,
            solution: None,
            relative_residual: f64::NAN,
        };
    }
    let bn = b.norm();
    let singular = SolveReport {
        status: SolveStatus::Singular,
        solution: None,
        relative_residual: f64::NAN,
    };
    let lu = a.clone().lu();
    let u = lu.u();
    let pivots: Vec<f64> = (0..u.nrows()).map(|i| u[(i, i)].norm()).collect();
    let big = pivots.iter().fold(0.0f64, |m, &v| m.max(v));
    if big == 0.0 || pivots.iter().any(|&v| v <= 1e-14 * big) {
        return singular;
    }
    let Some(x) = lu.solve(b) else {
        return singular;
    };
    if !x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        return singular;
    }
    let r = (a * &x - b).norm() / if bn > 0.0 { bn } else { 1.0 };
    SolveReport {
        status: if r <= 1e-10 {
            SolveStatus::Solved
        } else {
            SolveStatus::Singular
        },
        solution: Some(x),
        relative_residual: r,
    }
}

/// `G = Re(<Psi_0 div ., div .> + <Psi_0 ., .>)`, the k = 0 single-layer
/// energy on `X_hp`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGram {
    pub matrix: DMatrix<f64>,
}

impl EnergyGram {
    pub fn new(space: &GlobalRTSpace, options: AssemblyOptions) -> Result<Self> {
        let b = assemble_blocks(space, 0.0, options)?;
        let g = (&b.div + &b.field).map(|v| v.re);
        // symmetrize the quadrature round-off
        let matrix = (&g + g.transpose()) * 0.5;
        Ok(Self { matrix })
    }

    pub fn from_blocks(blocks: &SingleLayerBlocks) -> Self {
        let g = (&blocks.div + &blocks.field).map(|v| v.re);
        Self {
            matrix: (&g + g.transpose()) * 0.5,
        }
    }
}

/// `sqrt(e^H G e)`, clamped at zero.
pub fn energy_surrogate(e: &DVector<Complex64>, gram: &EnergyGram) -> f64 {
    let (re, im) = (e.map(|v| v.re), e.map(|v| v.im));
    let g = &gram.matrix;
    let v = re.dot(&(g * &re)) + im.dot(&(g * &im));
    v.max(0.0).sqrt()
}

/// Re-expresses a member of a coarser nested space in `fine` by
/// element-wise interpolation (exact for nested spaces).
pub fn prolong(
    coarse: &GlobalRTSpace,
    coefficients: &DVector<Complex64>,
    fine: &GlobalRTSpace,
) -> Result<DVector<Complex64>> {
    let part = |f: fn(&Complex64) -> f64| -> Result<Vec<f64>> {
        let c: Vec<f64> = coefficients.iter().map(f).collect();
        let field = DiscreteField::new(coarse, &c);
        global_interpolate_with(&field, fine, DivNorm::TildeHm12, InterpOptions::default())
    };
    let re = part(|v| v.re)?;
    let im = part(|v| v.im)?;
    Ok(DVector::from_iterator(
        re.len(),
        re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)),
    ))
}
