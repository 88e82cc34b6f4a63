//! Pair-by-pair assembly of the single-layer blocks.

use super::quadrature::{common_edge, common_vertex, corner_map, identical, side_map, PairPoint};
use crate::refelem::{legendre, rt_dim, Edge, QuadratureRule};
use crate::surface::{add, dot, norm, scale, sub, ChartMap, GlobalRTSpace, Vec3};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Pair classes and how many ordered pairs fell in each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PairCounts {
    pub identical: usize,
    pub common_edge: usize,
    pub common_vertex: usize,
    pub near: usize,
    pub far: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    /// Gauss order of the pair rules; `p + 3` when unset.
    pub quad_order: Option<usize>,
    /// Disjoint pairs whose centroids are closer than this multiple of the
    /// larger diameter use twice the order.
    pub near_factor: f64,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            quad_order: None,
            near_factor: 1.5,
        }
    }
}

impl AssemblyOptions {
    pub fn order(&self, p: usize) -> Result<usize> {
        let q = self.quad_order.unwrap_or(p + 3);
        if q < p + 1 {
            return Err(Error::Configuration(format!(
                "quadrature order {q} is below p + 1 = {}",
                p + 1
            )));
        }
        if q > 40 {
            return Err(Error::Configuration(format!(
                "quadrature order {q} exceeds 40"
            )));
        }
        if !(self.near_factor >= 0.0 && self.near_factor.is_finite()) {
            return Err(Error::Configuration(
                "near factor must be finite and non-negative".into(),
            ));
        }
        Ok(q)
    }
}

/// The divergence block `<Psi_k div u, div v>` and the field block
/// `<Psi_k u, v>` over the global basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleLayerBlocks {
    pub wavenumber: f64,
    pub div: DMatrix<Complex64>,
    pub field: DMatrix<Complex64>,
    pub quad_order: usize,
    pub counts: PairCounts,
}

/// Values of all local basis functions at one point: divergences and
/// `DT v` (the push-forward times `J`).
struct BasisEvaluator {
    p: usize,
    /// Per basis function: component coefficients `c1[i][j]`, `c2[i][j]`.
    c1: Vec<Vec<f64>>,
    c2: Vec<Vec<f64>>,
}

impl BasisEvaluator {
    fn new(space: &GlobalRTSpace) -> Self {
        let p = space.order();
        let mut c1 = Vec::new();
        let mut c2 = Vec::new();
        for f in space.local_basis() {
            let mut a = Vec::with_capacity((p + 1) * p);
            for i in 0..=p {
                for j in 0..p {
                    a.push(f.component_1().coefficient(i, j));
                }
            }
            let mut b = Vec::with_capacity(p * (p + 1));
            for i in 0..p {
                for j in 0..=p {
                    b.push(f.component_2().coefficient(i, j));
                }
            }
            c1.push(a);
            c2.push(b);
        }
        Self { p, c1, c2 }
    }

    fn eval(&self, chart: &ChartMap, xi: [f64; 2], div: &mut [f64], field: &mut [Vec3]) {
        let p = self.p;
        let (vx, dx) = legendre::values_and_derivatives(p, xi[0]);
        let (vy, dy) = legendre::values_and_derivatives(p, xi[1]);
        let (d1, d2) = chart.jacobian(xi);
        for (b, (a1, a2)) in self.c1.iter().zip(&self.c2).enumerate() {
            let (mut v1, mut v2, mut dv) = (0.0, 0.0, 0.0);
            let mut k = 0;
            for i in 0..=p {
                for j in 0..p {
                    let c = a1[k];
                    k += 1;
                    if c != 0.0 {
                        v1 += c * vx[i] * vy[j];
                        dv += c * dx[i] * vy[j];
                    }
                }
            }
            k = 0;
            for i in 0..p {
                for j in 0..=p {
                    let c = a2[k];
                    k += 1;
                    if c != 0.0 {
                        v2 += c * vx[i] * vy[j];
                        dv += c * vx[i] * dy[j];
                    }
                }
            }
            div[b] = dv;
            field[b] = add(scale(d1, v1), scale(d2, v2));
        }
    }
}

/// Basis data at the points of a tensor Gauss rule on one element.
struct Sample {
    x: Vec<Vec3>,
    w: Vec<f64>,
    div: Vec<Vec<f64>>,
    field: Vec<Vec<Vec3>>,
}

fn sample(eval: &BasisEvaluator, chart: &ChartMap, rule: &[([f64; 2], f64)], nb: usize) -> Sample {
    let mut s = Sample {
        x: Vec::with_capacity(rule.len()),
        w: Vec::with_capacity(rule.len()),
        div: Vec::with_capacity(rule.len()),
        field: Vec::with_capacity(rule.len()),
    };
    for &(xi, w) in rule {
        let mut d = vec![0.0; nb];
        let mut f = vec![[0.0; 3]; nb];
        eval.eval(chart, xi, &mut d, &mut f);
        s.x.push(chart.map(xi));
        s.w.push(w);
        s.div.push(d);
        s.field.push(f);
    }
    s
}

fn kernel(k: f64, r: f64) -> Complex64 {
    Complex64::from_polar(1.0 / (4.0 * PI * r), k * r)
}

enum PairClass {
    Identical,
    Edge(Edge, Edge, bool),
    Vertex(usize, usize),
    Disjoint,
}

fn classify(a: &[usize; 4], b: &[usize; 4], same: bool) -> PairClass {
    if same {
        return PairClass::Identical;
    }
    let shared: Vec<(usize, usize)> = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .filter(|&(i, j)| a[i] == b[j])
        .collect();
    match shared.len() {
        0 => PairClass::Disjoint,
        1 => PairClass::Vertex(shared[0].0, shared[0].1),
        _ => {
            let side = |v: &[usize; 4], x: usize, y: usize| {
                Edge::ALL
                    .into_iter()
                    .find(|e| {
                        let (s, t) = (v[e.start_vertex()], v[e.end_vertex()]);
                        (s == x && t == y) || (s == y && t == x)
                    })
                    .expect("shared vertices of conforming elements span a side")
            };
            let (x, y) = (a[shared[0].0], a[shared[1].0]);
            let (ea, eb) = (side(a, x, y), side(b, x, y));
            let aligned = a[ea.start_vertex()] == b[eb.start_vertex()];
            PairClass::Edge(ea, eb, aligned)
        }
    }
}

type LocalPair = (Vec<Complex64>, Vec<Complex64>);

fn singular_pair(
    eval: &BasisEvaluator,
    ca: &ChartMap,
    cb: &ChartMap,
    rule: &[PairPoint],
    map: impl Fn([f64; 2], [f64; 2]) -> ([f64; 2], [f64; 2]),
    k: f64,
    nb: usize,
) -> LocalPair {
    let mut md = vec![Complex64::new(0.0, 0.0); nb * nb];
    let mut mf = vec![Complex64::new(0.0, 0.0); nb * nb];
    let (mut da, mut db) = (vec![0.0; nb], vec![0.0; nb]);
    let (mut fa, mut fb) = (vec![[0.0; 3]; nb], vec![[0.0; 3]; nb]);
    for &(x, y, w) in rule {
        let (xi, eta) = map(x, y);
        let r = norm(sub(ca.map(xi), cb.map(eta)));
        let g = kernel(k, r) * w;
        eval.eval(ca, xi, &mut da, &mut fa);
        eval.eval(cb, eta, &mut db, &mut fb);
        for a in 0..nb {
            let (ga, gf) = (g * da[a], g);
            for b in 0..nb {
                md[a * nb + b] += ga * db[b];
                mf[a * nb + b] += gf * dot(fa[a], fb[b]);
            }
        }
    }
    (md, mf)
}

fn tensor_pair(sa: &Sample, sb: &Sample, k: f64, nb: usize) -> LocalPair {
    let (na, nbp) = (sa.x.len(), sb.x.len());
    let mut md = vec![Complex64::new(0.0, 0.0); nb * nb];
    let mut mf = vec![Complex64::new(0.0, 0.0); nb * nb];
    let mut td = vec![Complex64::new(0.0, 0.0); nb];
    let mut tf = vec![[Complex64::new(0.0, 0.0); 3]; nb];
    for i in 0..na {
        td.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        tf.iter_mut()
            .for_each(|v| *v = [Complex64::new(0.0, 0.0); 3]);
        for j in 0..nbp {
            let g = kernel(k, norm(sub(sa.x[i], sb.x[j]))) * sb.w[j];
            for b in 0..nb {
                td[b] += g * sb.div[j][b];
                let f = sb.field[j][b];
                tf[b][0] += g * f[0];
                tf[b][1] += g * f[1];
                tf[b][2] += g * f[2];
            }
        }
        let wi = sa.w[i];
        for a in 0..nb {
            let da = wi * sa.div[i][a];
            let fa = scale(sa.field[i][a], wi);
            for b in 0..nb {
                md[a * nb + b] += td[b] * da;
                mf[a * nb + b] += tf[b][0] * fa[0] + tf[b][1] * fa[1] + tf[b][2] * fa[2];
            }
        }
    }
    (md, mf)
}

/// Both single-layer blocks at wave number `k >= 0`. Every ordered element
/// pair is integrated on its own; pairs are scattered in a fixed order.
pub fn assemble_blocks(
    space: &GlobalRTSpace,
    k: f64,
    options: AssemblyOptions,
) -> Result<SingleLayerBlocks> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::Configuration(format!(
            "wave number {k} must be finite and non-negative"
        )));
    }
    let p = space.order();
    let q = options.order(p)?;
    let nb = rt_dim(p);
    let mesh = space.mesh();
    let elements = mesh.elements();
    let eval = BasisEvaluator::new(space);
    let rules = (identical(q), common_edge(q), common_vertex(q));
    let far_rule = QuadratureRule::gauss(q).tensor();
    let near_rule = QuadratureRule::gauss(2 * q).tensor();
    let far: Vec<Sample> = elements
        .par_iter()
        .map(|e| sample(&eval, &e.chart, &far_rule, nb))
        .collect();
    let near: Vec<Sample> = elements
        .par_iter()
        .map(|e| sample(&eval, &e.chart, &near_rule, nb))
        .collect();

    let rows: Vec<(Vec<LocalPair>, PairCounts)> = (0..elements.len())
        .into_par_iter()
        .map(|i| {
            let mut counts = PairCounts::default();
            let (a, ca) = (&elements[i].vertices, &elements[i].chart);
            let row = (0..elements.len())
                .map(|j| {
                    let (b, cb) = (&elements[j].vertices, &elements[j].chart);
                    match classify(a, b, i == j) {
                        PairClass::Identical => {
                            counts.identical += 1;
                            singular_pair(&eval, ca, cb, &rules.0, |x, y| (x, y), k, nb)
                        }
                        PairClass::Edge(ea, eb, aligned) => {
                            counts.common_edge += 1;
                            let map = |x: [f64; 2], y: [f64; 2]| {
                                let s = if aligned { y[1] } else { 1.0 - y[1] };
                                (side_map(ea, x[0], x[1]), side_map(eb, y[0], s))
                            };
                            singular_pair(&eval, ca, cb, &rules.1, map, k, nb)
                        }
                        PairClass::Vertex(va, vb) => {
                            counts.common_vertex += 1;
                            let map =
                                |x: [f64; 2], y: [f64; 2]| (corner_map(va, x), corner_map(vb, y));
                            singular_pair(&eval, ca, cb, &rules.2, map, k, nb)
                        }
                        PairClass::Disjoint => {
                            let d = norm(sub(ca.centroid(), cb.centroid()));
                            if d < options.near_factor * ca.diameter().max(cb.diameter()) {
                                counts.near += 1;
                                tensor_pair(&near[i], &near[j], k, nb)
                            } else {
                                counts.far += 1;
                                tensor_pair(&far[i], &far[j], k, nb)
                            }
                        }
                    }
                })
                .collect();
            (row, counts)
        })
        .collect();

    let n = space.dim();
    let mut div = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    let mut field = div.clone();
    let mut counts = PairCounts::default();
    for (i, (row, c)) in rows.iter().enumerate() {
        counts.identical += c.identical;
        counts.common_edge += c.common_edge;
        counts.common_vertex += c.common_vertex;
        counts.near += c.near;
        counts.far += c.far;
        let da = space.local_dofs(i);
        for (j, (md, mf)) in row.iter().enumerate() {
            let db = space.local_dofs(j);
            for (a, la) in da.iter().enumerate() {
                let Some(ga) = la.global else { continue };
                for (b, lb) in db.iter().enumerate() {
                    let Some(gb) = lb.global else { continue };
                    let s = la.sign * lb.sign;
                    div[(ga, gb)] += md[a * nb + b] * s;
                    field[(ga, gb)] += mf[a * nb + b] * s;
                }
            }
        }
    }
    Ok(SingleLayerBlocks {
        wavenumber: k,
        div,
        field,
        quad_order: q,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_mesh, PiecewisePlaneSurface};

    #[test]
    fn pair_classes_on_a_two_by_two_screen() {
        let (_, space) = build_mesh(&PiecewisePlaneSurface::unit_square_screen(), 1, 1).unwrap();
        let b = assemble_blocks(&space, 1.0, AssemblyOptions::default()).unwrap();
        // 4 identical, 8 ordered side neighbours, 4 ordered diagonal pairs
        assert_eq!(
            b.counts,
            PairCounts {
                identical: 4,
                common_edge: 8,
                common_vertex: 4,
                near: 0,
                far: 0
            }
        );
    }

    #[test]
    fn cube_faces_are_classified() {
        let (_, space) = build_mesh(&PiecewisePlaneSurface::unit_cube(), 0, 1).unwrap();
        let b = assemble_blocks(&space, 0.5, AssemblyOptions::default()).unwrap();
        assert_eq!((b.counts.identical, b.counts.common_edge), (6, 24));
        assert_eq!(b.counts.near + b.counts.far, 6);
    }

    #[test]
    fn quadrature_order_is_validated() {
        let (_, space) = build_mesh(&PiecewisePlaneSurface::unit_square_screen(), 1, 2).unwrap();
        let opts = AssemblyOptions {
            quad_order: Some(2),
            ..Default::default()
        };
        assert!(matches!(
            assemble_blocks(&space, 1.0, opts),
            Err(Error::Configuration(_))
        ));
        assert!(assemble_blocks(&space, -1.0, AssemblyOptions::default()).is_err());
    }
}
