use super::legendre;
use super::{Edge, EdgePolynomial, LegendreSeries, TensorPolynomial};
use crate::{Error, Result};

/// Dimension of the Raviart-Thomas space of order `p` on `K`.
pub fn rt_dim(p: usize) -> usize {
    2 * p * (p + 1)
}

/// Member of `P_{p,p-1}(K) x P_{p-1,p}(K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RTFunction {
    order: usize,
    component_1: TensorPolynomial,
    component_2: TensorPolynomial,
}

fn check_order(p: usize) -> Result<()> {
    if p < 1 {
        return Err(Error::InvalidDegree {
            degree: p,
            reason: "Raviart-Thomas order must be at least 1",
        });
    }
    Ok(())
}

impl RTFunction {
    /// Builds from components, which are padded to the exact degree pattern.
    pub fn new(
        order: usize,
        component_1: TensorPolynomial,
        component_2: TensorPolynomial,
    ) -> Result<Self> {
        check_order(order)?;
        let p = order;
        Ok(Self {
            order,
            component_1: component_1.with_degrees(p, p - 1)?,
            component_2: component_2.with_degrees(p - 1, p)?,
        })
    }

    pub fn zero(order: usize) -> Result<Self> {
        check_order(order)?;
        Ok(Self {
            order,
            component_1: TensorPolynomial::zeros(order, order - 1),
            component_2: TensorPolynomial::zeros(order - 1, order),
        })
    }

    /// From the flat coefficient vector (component 1 then component 2).
    pub fn from_vector(order: usize, v: &[f64]) -> Result<Self> {
        check_order(order)?;
        if v.len() != rt_dim(order) {
            return Err(Error::KindMismatch(format!(
                "{} coefficients for RT order {order}",
                v.len()
            )));
        }
        let half = order * (order + 1);
        Ok(Self {
            order,
            component_1: TensorPolynomial::new(order, order - 1, v[..half].to_vec())?,
            component_2: TensorPolynomial::new(order - 1, order, v[half..].to_vec())?,
        })
    }

    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = self.component_1.coefficients().to_vec();
        v.extend_from_slice(self.component_2.coefficients());
        v
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn component_1(&self) -> &TensorPolynomial {
        &self.component_1
    }

    pub fn component_2(&self) -> &TensorPolynomial {
        &self.component_2
    }

    pub fn eval(&self, x: f64, y: f64) -> [f64; 2] {
        let vx = legendre::values(self.order, x);
        let vy = legendre::values(self.order, y);
        [
            self.component_1.eval_with(&vx, &vy),
            self.component_2.eval_with(&vx, &vy),
        ]
    }

    pub fn divergence(&self) -> TensorPolynomial {
        divergence(self)
    }

    pub fn normal_trace(&self, edge: Edge) -> EdgePolynomial {
        normal_trace(self, edge)
    }

    /// Same function expressed in the order-`q` space, `q >= order`.
    pub fn raised(&self, q: usize) -> Self {
        let q = q.max(self.order);
        Self {
            order: q,
            component_1: self.component_1.raised(q, q - 1),
            component_2: self.component_2.raised(q - 1, q),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let q = self.order.max(other.order);
        let (a, b) = (self.raised(q), other.raised(q));
        Self {
            order: q,
            component_1: a.component_1.add(&b.component_1),
            component_2: a.component_2.add(&b.component_2),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            order: self.order,
            component_1: self.component_1.scaled(s),
            component_2: self.component_2.scaled(s),
        }
    }

    /// L2(K) inner product.
    pub fn dot(&self, other: &Self) -> f64 {
        self.component_1.dot(&other.component_1) + self.component_2.dot(&other.component_2)
    }

    pub fn l2_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.component_1
            .max_abs_coefficient()
            .max(self.component_2.max_abs_coefficient())
    }
}

/// `d1 v1 + d2 v2`, of degrees `(p-1, p-1)`.
pub fn divergence(v: &RTFunction) -> TensorPolynomial {
    let p = v.order;
    let a = v.component_1.partial_1().raised(p - 1, p - 1);
    let b = v.component_2.partial_2().raised(p - 1, p - 1);
    a.add(&b)
}

/// `curl phi = (d2 phi, -d1 phi)` as an RT function of order
/// `max(deg phi, 1)`.
pub fn scalar_curl(phi: &TensorPolynomial) -> RTFunction {
    let p = phi.degree_1().max(phi.degree_2()).max(1);
    let phi = phi.raised(p, p);
    let c1 = phi.partial_2();
    let c2 = phi.partial_1().scaled(-1.0);
    RTFunction::new(p, c1, c2).expect("curl of P_p lies in RT_p")
}

/// Outward normal component on `edge`, as a polynomial of degree `p-1` in
/// the edge parameter.
pub fn normal_trace(v: &RTFunction, edge: Edge) -> EdgePolynomial {
    let p = v.order;
    let (c1, c2) = (&v.component_1, &v.component_2);
    let mut coeffs = vec![0.0; p];
    match edge {
        Edge::Bottom => {
            for (i, slot) in coeffs.iter_mut().enumerate() {
                *slot = -(0..=p)
                    .map(|j| c2.coefficient(i, j) * legendre::at_zero(j))
                    .sum::<f64>();
            }
        }
        Edge::Right => {
            for (j, slot) in coeffs.iter_mut().enumerate() {
                *slot = (0..=p)
                    .map(|i| c1.coefficient(i, j) * legendre::at_one(i))
                    .sum();
            }
        }
        Edge::Top => {
            for (i, slot) in coeffs.iter_mut().enumerate() {
                *slot = (0..=p)
                    .map(|j| c2.coefficient(i, j) * legendre::at_one(j))
                    .sum();
            }
            coeffs = legendre::reflect(&coeffs);
        }
        Edge::Left => {
            for (j, slot) in coeffs.iter_mut().enumerate() {
                *slot = -(0..=p)
                    .map(|i| c1.coefficient(i, j) * legendre::at_zero(i))
                    .sum::<f64>();
            }
            coeffs = legendre::reflect(&coeffs);
        }
    }
    EdgePolynomial::from_series(edge, LegendreSeries::new(coeffs))
}

fn unit(k: usize) -> Vec<f64> {
    let mut e = vec![0.0; k + 1];
    e[k] = 1.0;
    e
}

/// Order-`p` RT function whose normal trace is `phi_k(s)` on `edge` and zero
/// on the other three edges (`k < p`).
pub fn rt_edge_function(edge: Edge, k: usize, p: usize) -> Result<RTFunction> {
    check_order(p)?;
    if k >= p {
        return Err(Error::InvalidDegree {
            degree: k,
            reason: "edge mode must be below the RT order",
        });
    }
    let e = unit(k);
    let zero1 = TensorPolynomial::zeros(0, 0);
    let (c1, c2) = match edge {
        Edge::Bottom => {
            let om: Vec<f64> = legendre::one_minus_x().iter().map(|c| -c).collect();
            (zero1, TensorPolynomial::outer(&e, &om))
        }
        Edge::Right => (TensorPolynomial::outer(&legendre::x_linear(), &e), zero1),
        Edge::Top => (
            zero1,
            TensorPolynomial::outer(&legendre::reflect(&e), &legendre::x_linear()),
        ),
        Edge::Left => {
            let om: Vec<f64> = legendre::one_minus_x().iter().map(|c| -c).collect();
            (TensorPolynomial::outer(&om, &legendre::reflect(&e)), zero1)
        }
    };
    RTFunction::new(p, c1.raised(p, p - 1), c2.raised(p - 1, p))
}

/// Basis of the RT bubbles (vanishing normal trace), `2p(p-1)` members:
/// first `(l_i(x) phi_j(y), 0)`, then `(0, phi_i(x) l_j(y))`.
pub fn rt_bubble_basis(p: usize) -> Result<Vec<RTFunction>> {
    check_order(p)?;
    let mut out = Vec::with_capacity(2 * p * (p - 1));
    for i in 2..=p {
        for j in 0..p {
            let c1 = TensorPolynomial::outer(&legendre::lobatto(i), &unit(j));
            out.push(RTFunction::new(
                p,
                c1.raised(p, p - 1),
                TensorPolynomial::zeros(p - 1, p),
            )?);
        }
    }
    for i in 0..p {
        for j in 2..=p {
            let c2 = TensorPolynomial::outer(&unit(i), &legendre::lobatto(j));
            out.push(RTFunction::new(
                p,
                TensorPolynomial::zeros(p, p - 1),
                c2.raised(p - 1, p),
            )?);
        }
    }
    Ok(out)
}

/// Hierarchical basis of `RT_p(K)`: the `4p` edge functions (edge-major,
/// mode-minor, see [`rt_edge_function`]) followed by the bubbles of
/// [`rt_bubble_basis`]. The first function of each edge is the lowest-order
/// function with unit flux through that edge.
pub fn rt_basis(p: usize) -> Result<Vec<RTFunction>> {
    check_order(p)?;
    let mut out = Vec::with_capacity(rt_dim(p));
    for edge in Edge::ALL {
        for k in 0..p {
            out.push(rt_edge_function(edge, k, p)?);
        }
    }
    out.extend(rt_bubble_basis(p)?);
    Ok(out)
}

/// Scalar bubbles `l_i(x) l_j(y)`, `2 <= i, j <= p`, as degree-`(p,p)`
/// polynomials. Empty for `p = 1`.
pub fn scalar_bubble_basis(p: usize) -> Vec<TensorPolynomial> {
    let mut out = Vec::new();
    for i in 2..=p {
        for j in 2..=p {
            out.push(
                TensorPolynomial::outer(&legendre::lobatto(i), &legendre::lobatto(j)).raised(p, p),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refelem::QuadratureRule;

    fn gram_rank(fam: &[RTFunction]) -> usize {
        let n = fam.len();
        if n == 0 {
            return 0;
        }
        let g = nalgebra::DMatrix::from_fn(n, n, |i, j| fam[i].dot(&fam[j]));
        let ev = g.symmetric_eigenvalues();
        let max = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        ev.iter().filter(|v| v.abs() > 1e-12 * max).count()
    }

    #[test]
    fn basis_dimensions_by_gram_rank() {
        for p in 1..=8 {
            let b = rt_basis(p).unwrap();
            assert_eq!(b.len(), rt_dim(p));
            assert_eq!(gram_rank(&b), 2 * p * (p + 1), "p={p}");
            let bb = rt_bubble_basis(p).unwrap();
            assert_eq!(bb.len(), 2 * p * (p - 1));
            assert_eq!(gram_rank(&bb), 2 * p * (p - 1), "p={p}");
        }
        assert_eq!(rt_basis(2).unwrap().len(), 12);
        assert_eq!(rt_basis(3).unwrap().len(), 24);
        assert!(rt_bubble_basis(1).unwrap().is_empty());
        assert_eq!(rt_bubble_basis(2).unwrap().len(), 4);
    }

    #[test]
    fn invalid_order_rejected() {
        assert!(matches!(rt_basis(0), Err(Error::InvalidDegree { .. })));
        assert!(rt_bubble_basis(0).is_err());
    }

    #[test]
    fn lowest_order_traces_span_constants() {
        let b = rt_basis(1).unwrap();
        for (i, v) in b.iter().enumerate() {
            for e in Edge::ALL {
                let tr = v.normal_trace(e);
                assert_eq!(tr.degree(), 0);
                let expect = if e.index() == i { 1.0 } else { 0.0 };
                assert!((tr.coefficients()[0] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bubbles_have_zero_normal_trace_pointwise() {
        let rule = QuadratureRule::gauss(9);
        for p in 1..=6 {
            for v in rt_bubble_basis(p).unwrap() {
                for e in Edge::ALL {
                    let n = e.normal();
                    for &s in rule.points() {
                        let x = e.point(s);
                        let val = v.eval(x[0], x[1]);
                        assert!((val[0] * n[0] + val[1] * n[1]).abs() <= 1e-12);
                    }
                }
                let d = v.divergence();
                assert!(d.integral().abs() < 1e-13);
            }
        }
    }

    #[test]
    fn normal_trace_matches_pointwise_evaluation() {
        for p in 1..=5 {
            for v in rt_basis(p).unwrap() {
                let w = v.scaled(1.7);
                for e in Edge::ALL {
                    let tr = w.normal_trace(e);
                    let n = e.normal();
                    for &s in &[0.0, 0.21, 0.5, 0.93, 1.0] {
                        let x = e.point(s);
                        let val = w.eval(x[0], x[1]);
                        assert!((tr.eval(s) - (val[0] * n[0] + val[1] * n[1])).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn edge_functions_carry_one_mode() {
        let p = 4;
        for e in Edge::ALL {
            for k in 0..p {
                let v = rt_edge_function(e, k, p).unwrap();
                for f in Edge::ALL {
                    let tr = v.normal_trace(f);
                    for (m, c) in tr.coefficients().iter().enumerate() {
                        let expect = if f == e && m == k { 1.0 } else { 0.0 };
                        assert!((c - expect).abs() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn divergence_examples() {
        // v = (x, 0)
        let x = TensorPolynomial::outer(&legendre::x_linear(), &[1.0]);
        let v = RTFunction::new(1, x, TensorPolynomial::zeros(0, 1)).unwrap();
        let d = v.divergence();
        assert!((d.eval(0.3, 0.8) - 1.0).abs() < 1e-15);
        // v = (x^2, 0), p = 2
        let x2 = TensorPolynomial::project(2, 0, 3, |x, _| x * x);
        let v = RTFunction::new(2, x2, TensorPolynomial::zeros(1, 2)).unwrap();
        let d = v.divergence();
        assert_eq!(d.degrees(), (1, 1));
        for &(a, b) in &[(0.2, 0.1), (0.9, 0.5)] {
            assert!((d.eval(a, b) - 2.0 * a).abs() < 1e-13);
        }
        // flux of (x, 0) through the right edge is 1, through the bottom 0
        let v = RTFunction::new(
            1,
            TensorPolynomial::outer(&legendre::x_linear(), &[1.0]),
            TensorPolynomial::zeros(0, 1),
        )
        .unwrap();
        assert!((v.normal_trace(Edge::Right).eval(0.4) - 1.0).abs() < 1e-15);
        assert!(v.normal_trace(Edge::Bottom).eval(0.4).abs() < 1e-15);
        assert!((v.normal_trace(Edge::Right).integral() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn divergence_is_onto_lower_degree() {
        for p in 1..=6 {
            let b = rt_basis(p).unwrap();
            let rows = p * p;
            let m = nalgebra::DMatrix::from_fn(rows, b.len(), |r, c| {
                b[c].divergence().coefficients()[r]
            });
            let sv = m.singular_values();
            let max = sv.max();
            let rank = sv.iter().filter(|s| **s > 1e-12 * max).count();
            assert_eq!(rank, p * p, "p={p}");
        }
    }

    #[test]
    fn curl_examples_and_exactness() {
        // phi = x y -> (x, -y)
        let phi = TensorPolynomial::project(1, 1, 2, |x, y| x * y);
        let c = scalar_curl(&phi);
        let v = c.eval(0.3, 0.7);
        assert!((v[0] - 0.3).abs() < 1e-14 && (v[1] + 0.7).abs() < 1e-14);
        assert!(c.divergence().max_abs_coefficient() < 1e-14);
        let c0 = scalar_curl(&TensorPolynomial::constant(3.0));
        assert_eq!(c0.max_abs_coefficient(), 0.0);
        for p in 2..=6 {
            for phi in scalar_bubble_basis(p) {
                let c = scalar_curl(&phi);
                assert_eq!(c.order(), p);
                assert!(c.divergence().max_abs_coefficient() < 1e-13);
                for e in Edge::ALL {
                    assert!(c.normal_trace(e).series().scale() < 1e-13);
                }
            }
        }
    }
}
