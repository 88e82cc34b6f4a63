//! Discrete Helmholtz splitting `X_hp = W_hp + V_hp`.

use super::geometry::{add, cross, dot, norm, scale};
use super::space::GlobalRTSpace;
use crate::refelem::{legendre, rt_dim, scalar_curl, Edge, QuadratureRule, TensorPolynomial};
use crate::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;

/// L2(Gamma) Gram matrix of the global basis.
pub fn l2_gram(space: &GlobalRTSpace) -> DMatrix<f64> {
    let p = space.order();
    let n = rt_dim(p);
    let rule = QuadratureRule::gauss(p + 3);
    let basis = space.local_basis();
    let mesh = space.mesh();
    let locals: Vec<DMatrix<f64>> = mesh
        .elements()
        .par_iter()
        .map(|el| {
            let mut m = DMatrix::zeros(n, n);
            for (&x, &wx) in rule.points().iter().zip(rule.weights()) {
                for (&y, &wy) in rule.points().iter().zip(rule.weights()) {
                    let (d1, d2) = el.chart.jacobian([x, y]);
                    let jac = norm(cross(d1, d2));
                    let vals: Vec<[f64; 3]> = basis
                        .iter()
                        .map(|f| {
                            let v = f.eval(x, y);
                            add(scale(d1, v[0]), scale(d2, v[1]))
                        })
                        .collect();
                    let w = wx * wy / jac;
                    for a in 0..n {
                        for b in a..n {
                            let g = w * dot(vals[a], vals[b]);
                            m[(a, b)] += g;
                            if a != b {
                                m[(b, a)] += g;
                            }
                        }
                    }
                }
            }
            m
        })
        .collect();
    let mut g = DMatrix::zeros(space.dim(), space.dim());
    for (j, m) in locals.iter().enumerate() {
        let dofs = space.local_dofs(j);
        for (a, da) in dofs.iter().enumerate() {
            let Some(ga) = da.global else { continue };
            for (b, db) in dofs.iter().enumerate() {
                let Some(gb) = db.global else { continue };
                g[(ga, gb)] += da.sign * db.sign * m[(a, b)];
            }
        }
    }
    g
}

/// Continuous piecewise `Q_p` scalars: vertex hats, edge and interior
/// Lobatto functions. Screens drop all boundary dofs, closed surfaces the
/// hat of vertex 0.
struct ScalarSpace {
    dim: usize,
    /// Per element: `(scalar dof, local polynomial)`.
    local: Vec<Vec<(usize, TensorPolynomial)>>,
}

fn hat(corner: usize, p: usize) -> TensorPolynomial {
    let (l, r) = (legendre::one_minus_x(), legendre::x_linear());
    let (a, b) = match corner {
        0 => (&l, &l),
        1 => (&r, &l),
        2 => (&r, &r),
        _ => (&l, &r),
    };
    TensorPolynomial::outer(a, b).raised(p, p)
}

fn edge_bubble(edge: Edge, k: usize, p: usize) -> TensorPolynomial {
    let lk = legendre::lobatto(k);
    let (l, r) = (legendre::one_minus_x(), legendre::x_linear());
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let poly = match edge {
        Edge::Bottom => TensorPolynomial::outer(&lk, &l),
        Edge::Right => TensorPolynomial::outer(&r, &lk),
        Edge::Top => TensorPolynomial::outer(&lk, &r).scaled(sign),
        Edge::Left => TensorPolynomial::outer(&l, &lk).scaled(sign),
    };
    poly.raised(p, p)
}

impl ScalarSpace {
    fn new(space: &GlobalRTSpace) -> Self {
        let mesh = space.mesh();
        let p = space.order();
        let closed = mesh.is_closed();
        let mut on_boundary = vec![false; mesh.vertices().len()];
        for e in mesh.edges().iter().filter(|e| e.is_boundary()) {
            on_boundary[e.vertices[0]] = true;
            on_boundary[e.vertices[1]] = true;
        }
        let mut dim = 0;
        let vertex_dof: Vec<Option<usize>> = (0..mesh.vertices().len())
            .map(|v| {
                if on_boundary[v] || (closed && v == 0) {
                    None
                } else {
                    dim += 1;
                    Some(dim - 1)
                }
            })
            .collect();
        let edge_dof: Vec<Option<usize>> = mesh
            .edges()
            .iter()
            .map(|e| {
                if e.is_boundary() || p < 2 {
                    None
                } else {
                    dim += p - 1;
                    Some(dim - (p - 1))
                }
            })
            .collect();
        let mut local = Vec::with_capacity(mesh.elements().len());
        for (j, el) in mesh.elements().iter().enumerate() {
            let mut list = Vec::new();
            for c in 0..4 {
                if let Some(d) = vertex_dof[el.vertices[c]] {
                    list.push((d, hat(c, p)));
                }
            }
            let ids = mesh.element_edges(j);
            for e in Edge::ALL {
                let g = ids[e.index()];
                let Some(d0) = edge_dof[g] else { continue };
                let same = el.vertices[e.start_vertex()] == mesh.edges()[g].vertices[0];
                for k in 2..=p {
                    let s = if same || k % 2 == 0 { 1.0 } else { -1.0 };
                    list.push((d0 + k - 2, edge_bubble(e, k, p).scaled(s)));
                }
            }
            for i in 2..=p {
                for k in 2..=p {
                    let poly =
                        TensorPolynomial::outer(&legendre::lobatto(i), &legendre::lobatto(k))
                            .raised(p, p);
                    list.push((dim, poly));
                    dim += 1;
                }
            }
            local.push(list);
        }
        Self { dim, local }
    }
}

/// `W_hp = curl_G S_hp` and its L2 complement `V_hp` in `X_hp`.
pub struct DiscreteHelmholtz {
    w_basis: DMatrix<f64>,
    gram: DMatrix<f64>,
    w_gram: Cholesky<f64, Dyn>,
}

impl std::fmt::Debug for DiscreteHelmholtz {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiscreteHelmholtz")
            .field("dim_w", &self.dim_w())
            .field("dim_v", &self.dim_v())
            .finish_non_exhaustive()
    }
}

/// Builds the splitting for screens and genus-0 closed surfaces; other
/// topologies are rejected.
pub fn helmholtz_split(space: &GlobalRTSpace) -> Result<DiscreteHelmholtz> {
    let mesh = space.mesh();
    let chi = mesh.euler_characteristic();
    let expected = if mesh.is_closed() { 2 } else { 1 };
    if chi != expected {
        return Err(Error::UnsupportedTopology(format!(
            "Euler characteristic {chi}, expected {expected} for a {} surface",
            if mesh.is_closed() {
                "genus-0 closed"
            } else {
                "simply connected open"
            }
        )));
    }
    let scalars = ScalarSpace::new(space);
    let n_el = mesh.elements().len();
    let dim = space.dim();
    // element-local curl coordinates, grouped by scalar dof
    let mut by_dof: Vec<Vec<(usize, Vec<f64>)>> = vec![Vec::new(); scalars.dim];
    for (j, list) in scalars.local.iter().enumerate() {
        for (d, poly) in list {
            by_dof[*d].push((j, space.local_coordinates(&scalar_curl(poly))));
        }
    }
    let columns: Vec<Vec<f64>> = by_dof
        .into_par_iter()
        .map(|support| {
            let mut local = vec![vec![0.0; rt_dim(space.order())]; n_el];
            for (j, c) in support {
                local[j] = c;
            }
            space.assemble_local(&local, 1e-9)
        })
        .collect::<Result<_>>()?;
    let mut w_basis = DMatrix::zeros(dim, columns.len());
    for (k, c) in columns.iter().enumerate() {
        w_basis.column_mut(k).copy_from_slice(c);
    }
    let gram = l2_gram(space);
    let wgw = w_basis.transpose() * &gram * &w_basis;
    let w_gram = Cholesky::new(wgw)
        .ok_or_else(|| Error::Degeneracy("surface curls are linearly dependent".into()))?;
    Ok(DiscreteHelmholtz {
        w_basis,
        gram,
        w_gram,
    })
}

impl DiscreteHelmholtz {
    pub fn dim_w(&self) -> usize {
        self.w_basis.ncols()
    }

    pub fn dim_v(&self) -> usize {
        self.w_basis.nrows() - self.w_basis.ncols()
    }

    /// Columns: global coefficients of the curl basis of `W_hp`.
    pub fn w_basis(&self) -> &DMatrix<f64> {
        &self.w_basis
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// L2-orthogonal projection onto `W_hp`.
    pub fn project_w(&self, c: &DVector<f64>) -> DVector<f64> {
        let rhs = self.w_basis.transpose() * (&self.gram * c);
        &self.w_basis * self.w_gram.solve(&rhs)
    }

    /// Projection onto `V_hp`, the L2 complement of `W_hp`.
    pub fn project_v(&self, c: &DVector<f64>) -> DVector<f64> {
        c - self.project_w(c)
    }

    /// Orthonormal (Euclidean) basis of `V_hp` coefficient vectors: the
    /// complement of the range of `G W`.
    pub fn v_basis(&self) -> DMatrix<f64> {
        let n = self.w_basis.nrows();
        let q = (&self.gram * &self.w_basis).qr().q();
        let p = DMatrix::identity(n, n) - &q * q.transpose();
        let eig = p.symmetric_eigen();
        let keep: Vec<usize> = (0..n).filter(|&k| eig.eigenvalues[k] > 0.5).collect();
        DMatrix::from_fn(n, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refelem::legendre::eval_series;

    #[test]
    fn lobatto_reflection_parity() {
        for k in 2..=8 {
            let l = legendre::lobatto(k);
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            for x in [0.1, 0.37, 0.8] {
                assert!((eval_series(&l, 1.0 - x) - s * eval_series(&l, x)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn edge_bubbles_trace_the_lobatto_function() {
        let p = 5;
        for e in Edge::ALL {
            for k in 2..=p {
                let b = edge_bubble(e, k, p);
                for s in [0.2, 0.55, 0.9] {
                    let [x, y] = e.point(s);
                    let want = eval_series(&legendre::lobatto(k), s);
                    assert!((b.eval(x, y) - want).abs() < 1e-12, "{e:?} k={k}");
                    for other in Edge::ALL.into_iter().filter(|o| *o != e) {
                        let [x, y] = other.point(s);
                        assert!(b.eval(x, y).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
