use super::edge::{extension, EdgeProjector};
use super::projection::{rt_projection, TildeHm12Projector, CONDITION_LIMIT};
use super::{InterpOptions, VectorField};
use crate::fracform::EdgeModeSpectrum;
use crate::linalg::{checked_cholesky, condition, orthonormal_range, project_out};
use crate::refelem::{
    rt_bubble_basis, rt_dim, rt_edge_function, scalar_bubble_basis, scalar_curl, Edge,
    LegendreSeries, QuadratureRule, RTFunction, TensorPolynomial,
};
use crate::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn, LU};

/// Inner product used for the divergence equation of the interior stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivNorm {
    L2,
    TildeHm12,
}

/// The three parts of an interpolant and their sum.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolantBreakdown {
    pub u1: RTFunction,
    pub u2p: RTFunction,
    pub u3p: RTFunction,
    pub total: RTFunction,
}

/// Edge data of the second stage.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPrimitive {
    /// Fluxes of `u` through the four edges.
    pub fluxes: [f64; 4],
    /// `psi(1)` per edge, computed with an independent composite rule.
    pub vertex_defects: [f64; 4],
    /// Sine spectra of `psi` per edge.
    pub spectra: Vec<EdgeModeSpectrum>,
    /// Edge projections `psi_2` per edge, degree `p`.
    pub projected: Vec<LegendreSeries>,
}

enum DivProduct {
    L2,
    Spectral(TildeHm12Projector),
}

/// H(div) projection-based interpolation onto `RT_p(K)`; the setup is
/// shared between calls.
pub struct DivInterpolator {
    order: usize,
    options: InterpOptions,
    product: DivProduct,
    lowest: Vec<RTFunction>,
    /// Bubble basis: `q_count` divergence carriers then the curls.
    bubbles: Vec<RTFunction>,
    q_count: usize,
    curls: Vec<RTFunction>,
    div_coefficients: DMatrix<f64>,
    gram: DMatrix<f64>,
    gram_cholesky: Cholesky<f64, Dyn>,
    system: Option<LU<f64, Dyn, Dyn>>,
    condition: f64,
    edges: EdgeProjector,
}

impl std::fmt::Debug for DivInterpolator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DivInterpolator")
            .field("order", &self.order)
            .field("options", &self.options)
            .field("condition", &self.condition)
            .finish_non_exhaustive()
    }
}

fn to_matrix(fam: &[RTFunction], p: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rt_dim(p), fam.len());
    for (j, f) in fam.iter().enumerate() {
        m.column_mut(j).copy_from_slice(&f.to_vector());
    }
    m
}

impl DivInterpolator {
    pub fn new(order: usize, norm: DivNorm, options: InterpOptions) -> Result<Self> {
        let p = order;
        let lowest = Edge::ALL
            .iter()
            .map(|&e| rt_edge_function(e, 0, p))
            .collect::<Result<Vec<_>>>()?;
        let product = match norm {
            DivNorm::L2 => DivProduct::L2,
            DivNorm::TildeHm12 => {
                DivProduct::Spectral(TildeHm12Projector::new(p - 1, options.truncation)?)
            }
        };
        let gram = match &product {
            DivProduct::L2 => DMatrix::identity(p * p, p * p),
            DivProduct::Spectral(s) => s.gram().clone(),
        };
        let gram_cholesky = checked_cholesky(&gram, CONDITION_LIMIT)?;

        let curls: Vec<RTFunction> = scalar_bubble_basis(p).iter().map(scalar_curl).collect();
        let bubble = to_matrix(&rt_bubble_basis(p)?, p);
        let cm = orthonormal_range(&to_matrix(&curls, p), 1e-12);
        let q = orthonormal_range(&project_out(&bubble, &cm), 1e-10);
        if q.ncols() != p * p - 1 || cm.ncols() != (p - 1) * (p - 1) {
            return Err(Error::Degeneracy(format!(
                "bubble splitting has ranks {} + {} at order {p}",
                q.ncols(),
                cm.ncols()
            )));
        }
        let mut bubbles = Vec::with_capacity(2 * p * (p - 1));
        for c in q.column_iter() {
            bubbles.push(RTFunction::from_vector(p, c.as_slice())?);
        }
        let q_count = bubbles.len();
        bubbles.extend(curls.iter().cloned());

        let n = bubbles.len();
        let mut div_coefficients = DMatrix::zeros(p * p, n);
        for (j, b) in bubbles.iter().enumerate() {
            div_coefficients
                .column_mut(j)
                .copy_from_slice(b.divergence().coefficients());
        }
        let mut a = DMatrix::zeros(n, n);
        if n > 0 {
            let gd = &gram * &div_coefficients;
            for r in 0..q_count {
                for j in 0..n {
                    a[(r, j)] = div_coefficients.column(r).dot(&gd.column(j));
                }
            }
            for (c, curl) in curls.iter().enumerate() {
                for (j, b) in bubbles.iter().enumerate() {
                    a[(q_count + c, j)] = b.dot(curl);
                }
            }
        }
        let condition = condition(&a);
        log::debug!("interior system at order {p}: size {n}, condition {condition:.3e}");
        let system = if n > 0 {
            if !(condition <= CONDITION_LIMIT) {
                return Err(Error::Degeneracy(format!(
                    "interior system condition {condition:.3e}"
                )));
            }
            Some(a.lu())
        } else {
            None
        };
        Ok(Self {
            order,
            options,
            product,
            lowest,
            bubbles,
            q_count,
            curls,
            div_coefficients,
            gram,
            gram_cholesky,
            system,
            condition,
            edges: EdgeProjector::new(p, options.truncation)?,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Condition number of the interior system.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Moments `<f, phi_k>_X` over the basis of `P_{p-1}(K)`.
    fn moments(&self, f: &dyn Fn(f64, f64) -> f64) -> Result<DVector<f64>> {
        let d = self.order - 1;
        match &self.product {
            DivProduct::L2 => {
                let c = TensorPolynomial::project(d, d, self.options.points(self.order), f);
                Ok(DVector::from_row_slice(c.coefficients()))
            }
            DivProduct::Spectral(s) => s.moments_of(f),
        }
    }

    /// Projection of `f` onto `P_{p-1}(K)` in the divergence inner product.
    pub fn div_projection(&self, f: &dyn Fn(f64, f64) -> f64) -> Result<TensorPolynomial> {
        let d = self.order - 1;
        let c = self.gram_cholesky.solve(&self.moments(f)?);
        TensorPolynomial::new(d, d, c.as_slice().to_vec())
    }

    /// Norm of `q` in `P_{p-1}(K)` for the divergence inner product.
    pub fn div_norm(&self, q: &TensorPolynomial) -> f64 {
        let d = self.order - 1;
        let v = DVector::from_row_slice(q.raised(d, d).coefficients());
        v.dot(&(&self.gram * &v)).max(0.0).sqrt()
    }

    pub fn interpolate(&self, u: &dyn VectorField) -> Result<InterpolantBreakdown> {
        Ok(self.interpolate_with_primitive(u)?.0)
    }

    pub fn interpolate_with_primitive(
        &self,
        u: &dyn VectorField,
    ) -> Result<(InterpolantBreakdown, BoundaryPrimitive)> {
        let p = self.order;
        let rule = QuadratureRule::gauss(self.options.points(p));
        let normal_flux = |e: Edge, s: f64| {
            let x = e.point(s);
            let v = u.value(x[0], x[1]);
            let n = e.normal();
            v[0] * n[0] + v[1] * n[1]
        };

        let mut fluxes = [0.0; 4];
        for e in Edge::ALL {
            fluxes[e.index()] = rule.integrate(|s| normal_flux(e, s));
        }
        let u1 = self
            .lowest
            .iter()
            .zip(fluxes)
            .fold(RTFunction::zero(p)?, |acc, (f, c)| acc.add(&f.scaled(c)));

        let mut vertex_defects = [0.0; 4];
        let mut spectra = Vec::with_capacity(4);
        let mut projected = Vec::with_capacity(4);
        let mut potential = TensorPolynomial::zeros(p, p);
        for e in Edge::ALL {
            let f = fluxes[e.index()];
            let g = |s: f64| normal_flux(e, s) - f;
            let mut scale = 1.0f64;
            let mut tracked = |s: f64| {
                let v = g(s);
                scale = scale.max(v.abs());
                v
            };
            let first = rule.integrate_on(0.0, 0.5, &mut tracked);
            let end = first + rule.integrate_on(0.5, 1.0, &mut tracked);
            vertex_defects[e.index()] = end;
            if end.abs() > 1e-10 * scale {
                return Err(Error::Resolution(format!(
                    "edge primitive misses the end vertex of {e:?} by {end:.3e}; raise the quadrature points"
                )));
            }
            let (spec, psi2) = self.edges.project(e, |s| rule.integrate_on(0.0, s, &g))?;
            potential = potential.add(&extension(e, &psi2, self.options.blend, p)?);
            spectra.push(spec);
            projected.push(psi2);
        }
        let u2p = scalar_curl(&potential).raised(p);

        let u3p = match &self.system {
            None => RTFunction::zero(p)?,
            Some(lu) => {
                let n = self.bubbles.len();
                let mut rhs = DVector::zeros(n);
                let du1 =
                    DVector::from_row_slice(u1.divergence().raised(p - 1, p - 1).coefficients());
                let r = self.moments(&|x, y| u.divergence(x, y))? - &self.gram * du1;
                for a in 0..self.q_count {
                    rhs[a] = r.dot(&self.div_coefficients.column(a));
                }
                let rest = rt_projection(u, p, self.options.points(p))
                    .sub(&u1)
                    .sub(&u2p);
                for (c, curl) in self.curls.iter().enumerate() {
                    rhs[self.q_count + c] = rest.dot(curl);
                }
                let x = lu
                    .solve(&rhs)
                    .ok_or_else(|| Error::Degeneracy("singular interior system".into()))?;
                self.bubbles
                    .iter()
                    .zip(x.iter())
                    .fold(RTFunction::zero(p)?, |acc, (b, c)| acc.add(&b.scaled(*c)))
            }
        };
        let total = u1.add(&u2p).add(&u3p);
        Ok((
            InterpolantBreakdown {
                u1,
                u2p,
                u3p,
                total,
            },
            BoundaryPrimitive {
                fluxes,
                vertex_defects,
                spectra,
                projected,
            },
        ))
    }
}

/// `Pi^{div,0}_p u`: interior divergence equation in L2(K).
pub fn interp_div_l2(u: &dyn VectorField, p: usize) -> Result<InterpolantBreakdown> {
    DivInterpolator::new(p, DivNorm::L2, InterpOptions::default())?.interpolate(u)
}

/// `Pi^{div,-1/2}_p u`: interior divergence equation in tilde H^{-1/2}(K).
pub fn interp_div_m12(u: &dyn VectorField, p: usize) -> Result<InterpolantBreakdown> {
    DivInterpolator::new(p, DivNorm::TildeHm12, InterpOptions::default())?.interpolate(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{FnVector, TildeHm12Projector};
    use crate::refelem::rt_basis;
    use std::f64::consts::PI;

    fn combo(p: usize, seed: f64) -> RTFunction {
        rt_basis(p)
            .unwrap()
            .iter()
            .enumerate()
            .fold(RTFunction::zero(p).unwrap(), |acc, (i, f)| {
                acc.add(&f.scaled((seed * (i as f64 + 1.0)).sin()))
            })
    }

    #[test]
    fn lowest_order_field_is_its_own_u1() {
        let u = FnVector {
            value: |x: f64, _| [x, 0.0],
            divergence: |_, _| 1.0,
        };
        let r = interp_div_m12(&u, 1).unwrap();
        let v = r.u1.eval(0.3, 0.6);
        assert!((v[0] - 0.3).abs() < 1e-14 && v[1].abs() < 1e-14);
        assert_eq!(r.u2p.max_abs_coefficient(), 0.0);
        assert_eq!(r.u3p.max_abs_coefficient(), 0.0);
    }

    #[test]
    fn reproduces_rt_functions() {
        for p in 1..=4 {
            let v = combo(p, 0.7);
            for norm in [DivNorm::L2, DivNorm::TildeHm12] {
                let it = DivInterpolator::new(p, norm, InterpOptions::default()).unwrap();
                let r = it.interpolate(&v).unwrap();
                assert!(
                    r.total.sub(&v).max_abs_coefficient() < 1e-10,
                    "p={p} {norm:?}"
                );
            }
        }
    }

    #[test]
    fn breakdown_invariants() {
        let u = FnVector {
            value: |x: f64, y: f64| [(PI * x).sin() * (PI * y).sin(), x * y * y],
            divergence: |x: f64, y: f64| PI * (PI * x).cos() * (PI * y).sin() + 2.0 * x * y,
        };
        let p = 4;
        let it = DivInterpolator::new(p, DivNorm::TildeHm12, InterpOptions::default()).unwrap();
        let (r, prim) = it.interpolate_with_primitive(&u).unwrap();
        assert!(
            r.total
                .sub(&r.u1.add(&r.u2p).add(&r.u3p))
                .max_abs_coefficient()
                < 1e-15
        );
        assert!(r.u2p.divergence().max_abs_coefficient() < 1e-12);
        for e in Edge::ALL {
            assert!(r.u3p.normal_trace(e).series().scale() < 1e-12);
            assert!(prim.vertex_defects[e.index()].abs() < 1e-10);
        }
        let want = TildeHm12Projector::new(p - 1, 64)
            .unwrap()
            .project(|x, y| u.divergence(x, y))
            .unwrap();
        let got = r.total.divergence();
        assert!(got.sub(&want).max_abs_coefficient() < 1e-8 * want.max_abs_coefficient());
    }

    #[test]
    fn resolution_error_on_underresolved_flux() {
        let u = FnVector {
            value: |x: f64, y: f64| {
                let r2 = (x + 0.002).powi(2) + (y + 0.002).powi(2);
                [(x + 0.002) / r2, (y + 0.002) / r2]
            },
            divergence: |_, _| 0.0,
        };
        let opts = InterpOptions {
            quadrature_points: Some(6),
            ..InterpOptions::default()
        };
        let it = DivInterpolator::new(2, DivNorm::L2, opts).unwrap();
        assert!(matches!(it.interpolate(&u), Err(Error::Resolution(_))));
    }
}
