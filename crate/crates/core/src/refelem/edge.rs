use super::legendre;
use crate::{Error, Result};

/// Sides of the reference square, numbered counterclockwise from `(0,0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Edge {
    Bottom,
    Right,
    Top,
    Left,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::Bottom, Edge::Right, Edge::Top, Edge::Left];

    /// 1-based id.
    pub fn id(self) -> usize {
        self.index() + 1
    }

    /// 0-based index.
    pub fn index(self) -> usize {
        match self {
            Edge::Bottom => 0,
            Edge::Right => 1,
            Edge::Top => 2,
            Edge::Left => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Edge> {
        Edge::ALL.get(i).copied()
    }

    /// Point of `K` at parameter `s`.
    pub fn point(self, s: f64) -> [f64; 2] {
        match self {
            Edge::Bottom => [s, 0.0],
            Edge::Right => [1.0, s],
            Edge::Top => [1.0 - s, 1.0],
            Edge::Left => [0.0, 1.0 - s],
        }
    }

    pub fn normal(self) -> [f64; 2] {
        match self {
            Edge::Bottom => [0.0, -1.0],
            Edge::Right => [1.0, 0.0],
            Edge::Top => [0.0, 1.0],
            Edge::Left => [-1.0, 0.0],
        }
    }

    /// Unit tangent in the direction of increasing `s`.
    pub fn tangent(self) -> [f64; 2] {
        let n = self.normal();
        [-n[1], n[0]]
    }

    /// Local vertex index (0..4, counterclockwise from the origin) at `s = 0`.
    pub fn start_vertex(self) -> usize {
        self.index()
    }

    /// Local vertex index at `s = 1`.
    pub fn end_vertex(self) -> usize {
        (self.index() + 1) % 4
    }

    /// `(s, t)` coordinates of `xi`: `s` along the edge, `t` the distance
    /// from the edge.
    pub fn edge_coordinates(self, xi: [f64; 2]) -> (f64, f64) {
        match self {
            Edge::Bottom => (xi[0], xi[1]),
            Edge::Right => (xi[1], 1.0 - xi[0]),
            Edge::Top => (1.0 - xi[0], 1.0 - xi[1]),
            Edge::Left => (1.0 - xi[1], xi[0]),
        }
    }
}

/// Polynomial in one variable on `[0,1]` in the orthonormal Legendre basis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LegendreSeries {
    coefficients: Vec<f64>,
}

impl LegendreSeries {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self { coefficients }
    }

    pub fn zero() -> Self {
        Self {
            coefficients: vec![0.0],
        }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().max(1) - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eval(&self, s: f64) -> f64 {
        legendre::eval_series(&self.coefficients, s)
    }

    pub fn derivative(&self) -> Self {
        Self::new(legendre::differentiate(&self.coefficients))
    }

    /// The series of `s -> f(1 - s)`.
    pub fn reflected(&self) -> Self {
        Self::new(legendre::reflect(&self.coefficients))
    }

    pub fn integral(&self) -> f64 {
        self.coefficients.first().copied().unwrap_or(0.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coefficients.len().max(other.coefficients.len());
        let mut c = vec![0.0; n];
        for (i, v) in self.coefficients.iter().enumerate() {
            c[i] += v;
        }
        for (i, v) in other.coefficients.iter().enumerate() {
            c[i] += v;
        }
        Self::new(c)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.coefficients.iter().map(|c| c * s).collect())
    }

    /// Coefficient scale used for relative tolerances.
    pub fn scale(&self) -> f64 {
        self.coefficients
            .iter()
            .fold(0.0, |m: f64, c| m.max(c.abs()))
    }
}

/// Polynomial living on one edge of `K`, in the edge parameter `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePolynomial {
    edge: Edge,
    series: LegendreSeries,
}

impl EdgePolynomial {
    pub fn new(edge: Edge, degree: usize, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != degree + 1 {
            return Err(Error::KindMismatch(format!(
                "{} coefficients for edge degree {degree}",
                coefficients.len()
            )));
        }
        Ok(Self {
            edge,
            series: LegendreSeries::new(coefficients),
        })
    }

    pub fn from_series(edge: Edge, series: LegendreSeries) -> Self {
        Self { edge, series }
    }

    pub fn edge(&self) -> Edge {
        self.edge
    }

    pub fn degree(&self) -> usize {
        self.series.degree()
    }

    pub fn coefficients(&self) -> &[f64] {
        self.series.coefficients()
    }

    pub fn series(&self) -> &LegendreSeries {
        &self.series
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.series.eval(s)
    }

    /// `int_edge f ds`.
    pub fn integral(&self) -> f64 {
        self.series.integral()
    }

    /// Membership in the endpoint-vanishing subspace.
    pub fn vanishes_at_endpoints(&self) -> bool {
        let tol = 1e-12 * self.series.scale().max(1.0);
        self.eval(0.0).abs() <= tol && self.eval(1.0).abs() <= tol
    }
}
