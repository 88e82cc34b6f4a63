//! The global conforming space `X_hp` of pushed-forward RT functions.

use super::geometry::{piola_divergence, piola_push, Vec3};
use super::mesh::QuadMesh;
use crate::refelem::{rt_basis, rt_dim, Edge, RTFunction};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector, Dyn, LU};

/// Treatment of normal-trace dofs on the boundary of a screen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryTreatment {
    /// Zero normal trace on the boundary (the space `X^0`).
    #[default]
    Eliminate,
    /// Keep boundary dofs (a conforming subspace of `H(div)`).
    Keep,
}

/// Global index and sign of a local basis function; `global` is `None` for
/// eliminated boundary dofs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalDof {
    pub global: Option<usize>,
    pub sign: f64,
}

/// `X_hp`: the local basis of [`rt_basis`] pushed forward on every element
/// and glued along shared sides.
///
/// Edge dofs come first (global edge order, mode minor), then the bubbles
/// of each element. A shared side belongs to the element with the lower
/// index; mode `k` of the other element enters with sign
/// `-(-1)^k` when it runs against the global side direction (smaller vertex
/// index to larger) and `-1` otherwise.
pub struct GlobalRTSpace {
    order: usize,
    mesh: QuadMesh,
    treatment: BoundaryTreatment,
    local: Vec<Vec<LocalDof>>,
    edge_dofs: Vec<Option<usize>>,
    dim: usize,
    basis: Vec<RTFunction>,
    basis_lu: LU<f64, Dyn, Dyn>,
}

impl std::fmt::Debug for GlobalRTSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GlobalRTSpace")
            .field("order", &self.order)
            .field("elements", &self.mesh.elements().len())
            .field("dim", &self.dim)
            .field("treatment", &self.treatment)
            .finish_non_exhaustive()
    }
}

impl Clone for GlobalRTSpace {
    fn clone(&self) -> Self {
        Self::new(self.mesh.clone(), self.order, self.treatment).expect("valid space")
    }
}

impl GlobalRTSpace {
    pub fn new(mesh: QuadMesh, p: usize, treatment: BoundaryTreatment) -> Result<Self> {
        let basis = rt_basis(p)?;
        let n = rt_dim(p);
        let mut m = DMatrix::zeros(n, n);
        for (j, f) in basis.iter().enumerate() {
            m.column_mut(j).copy_from_slice(&f.to_vector());
        }
        let basis_lu = m.lu();
        let mut dim = 0;
        let mut edge_dofs = Vec::with_capacity(mesh.edges().len());
        for e in mesh.edges() {
            if e.is_boundary() && treatment == BoundaryTreatment::Eliminate {
                edge_dofs.push(None);
            } else {
                edge_dofs.push(Some(dim));
                dim += p;
            }
        }
        let nb = 2 * p * (p - 1);
        let mut local = Vec::with_capacity(mesh.elements().len());
        for (j, el) in mesh.elements().iter().enumerate() {
            let ids = mesh.element_edges(j);
            let mut dofs = Vec::with_capacity(n);
            for e in Edge::ALL {
                let g = ids[e.index()];
                let edge = &mesh.edges()[g];
                let owner = edge.uses[0].0 == j;
                let same = el.vertices[e.start_vertex()] == edge.vertices[0];
                for k in 0..p {
                    let orient = if same || k % 2 == 0 { 1.0 } else { -1.0 };
                    let sign = if owner { orient } else { -orient };
                    dofs.push(LocalDof {
                        global: edge_dofs[g].map(|d| d + k),
                        sign,
                    });
                }
            }
            for b in 0..nb {
                dofs.push(LocalDof {
                    global: Some(dim + b),
                    sign: 1.0,
                });
            }
            dim += nb;
            local.push(dofs);
        }
        Ok(Self {
            order: p,
            mesh,
            treatment,
            local,
            edge_dofs,
            dim,
            basis,
            basis_lu,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mesh(&self) -> &QuadMesh {
        &self.mesh
    }

    pub fn treatment(&self) -> BoundaryTreatment {
        self.treatment
    }

    pub fn local_dofs(&self, element: usize) -> &[LocalDof] {
        &self.local[element]
    }

    /// First global dof of a mesh edge, `None` if eliminated.
    pub fn edge_dof(&self, edge: usize) -> Option<usize> {
        self.edge_dofs[edge]
    }

    /// The reference basis shared by all elements.
    pub fn local_basis(&self) -> &[RTFunction] {
        &self.basis
    }

    /// Coordinates of `v` (order at most `p`) in the local basis.
    pub fn local_coordinates(&self, v: &RTFunction) -> Vec<f64> {
        debug_assert!(v.order() <= self.order);
        let x = DVector::from_vec(v.raised(self.order).to_vector());
        self.basis_lu
            .solve(&x)
            .expect("the local basis is invertible")
            .as_slice()
            .to_vec()
    }

    /// Local coordinates of a global coefficient vector on `element`.
    pub fn local_coefficients(&self, element: usize, global: &[f64]) -> Vec<f64> {
        self.local[element]
            .iter()
            .map(|d| d.global.map_or(0.0, |g| d.sign * global[g]))
            .collect()
    }

    /// Reference representative of a global member on `element`.
    pub fn element_function(&self, element: usize, global: &[f64]) -> RTFunction {
        let c = self.local_coefficients(element, global);
        let mut v = vec![0.0; rt_dim(self.order)];
        for (a, f) in c.iter().zip(&self.basis) {
            if *a != 0.0 {
                for (s, x) in v.iter_mut().zip(f.to_vector()) {
                    *s += a * x;
                }
            }
        }
        RTFunction::from_vector(self.order, &v).expect("length matches")
    }

    /// Value of the pushed-forward member at `xi` on `element`.
    pub fn evaluate(&self, global: &[f64], element: usize, xi: [f64; 2]) -> Vec3 {
        let f = self.element_function(element, global);
        piola_push(&self.mesh.elements()[element].chart, &f, xi)
    }

    pub fn surface_divergence(&self, global: &[f64], element: usize, xi: [f64; 2]) -> f64 {
        let f = self.element_function(element, global);
        piola_divergence(&self.mesh.elements()[element].chart, &f, xi)
    }

    /// Glues per-element local coordinates into a global vector. Dofs seen
    /// from two elements must agree to `tol` relative to the largest
    /// coefficient; eliminated dofs are dropped.
    pub fn assemble_local(&self, local: &[Vec<f64>], tol: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        let mut seen = vec![false; self.dim];
        let scale = local
            .iter()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        for (j, coeffs) in local.iter().enumerate() {
            for (d, c) in self.local[j].iter().zip(coeffs) {
                let Some(g) = d.global else { continue };
                let v = d.sign * c;
                if seen[g] {
                    if (out[g] - v).abs() > tol * scale {
                        return Err(Error::Conformity(format!(
                            "dof {g} differs between elements by {:.3e}",
                            (out[g] - v).abs()
                        )));
                    }
                } else {
                    out[g] = v;
                    seen[g] = true;
                }
            }
        }
        Ok(out)
    }
}

/// Refines `surface` and builds `X_hp` with boundary elimination.
pub fn build_mesh(
    surface: &super::PiecewisePlaneSurface,
    level: usize,
    p: usize,
) -> Result<(QuadMesh, GlobalRTSpace)> {
    build_mesh_with(surface, level, p, BoundaryTreatment::Eliminate)
}

pub fn build_mesh_with(
    surface: &super::PiecewisePlaneSurface,
    level: usize,
    p: usize,
    treatment: BoundaryTreatment,
) -> Result<(QuadMesh, GlobalRTSpace)> {
    if p == 0 {
        return Err(Error::InvalidDegree {
            degree: p,
            reason: "RT order must be at least 1",
        });
    }
    let mesh = QuadMesh::refine(surface, level)?;
    let space = GlobalRTSpace::new(mesh.clone(), p, treatment)?;
    Ok((mesh, space))
}
