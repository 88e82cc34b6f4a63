//! Small 3-vector helpers and bilinear charts.

use crate::refelem::RTFunction;
use crate::{Error, Result};

pub type Vec3 = [f64; 3];

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn distance(a: Vec3, b: Vec3) -> f64 {
    norm(sub(a, b))
}

/// Bilinear map `T` of `[0,1]^2` onto a plane quadrilateral with corners
/// listed counterclockwise about the outward normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartMap {
    corners: [Vec3; 4],
}

impl ChartMap {
    /// Rejects charts whose Jacobian degenerates on the closed square.
    pub fn new(corners: [Vec3; 4]) -> Result<Self> {
        let c = Self { corners };
        let scale = (0..4)
            .map(|i| distance(corners[i], corners[(i + 1) % 4]))
            .fold(0.0f64, f64::max);
        if scale == 0.0 {
            return Err(Error::Chart("all corners coincide".into()));
        }
        let n0 = c.normal([0.5, 0.5]);
        for xi in [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]] {
            let (d1, d2) = c.jacobian(xi);
            let j = cross(d1, d2);
            if norm(j) <= 1e-12 * scale * scale || dot(j, n0) <= 0.0 {
                return Err(Error::Chart(format!("degenerate Jacobian at {xi:?}")));
            }
        }
        Ok(c)
    }

    pub fn corners(&self) -> &[Vec3; 4] {
        &self.corners
    }

    pub fn map(&self, xi: [f64; 2]) -> Vec3 {
        let [x, y] = xi;
        let w = [(1.0 - x) * (1.0 - y), x * (1.0 - y), x * y, (1.0 - x) * y];
        (0..4).fold([0.0; 3], |acc, i| add(acc, scale(self.corners[i], w[i])))
    }

    /// `(d1 T, d2 T)` at `xi`.
    pub fn jacobian(&self, xi: [f64; 2]) -> (Vec3, Vec3) {
        let [x, y] = xi;
        let c = &self.corners;
        let d1 = add(scale(sub(c[1], c[0]), 1.0 - y), scale(sub(c[2], c[3]), y));
        let d2 = add(scale(sub(c[3], c[0]), 1.0 - x), scale(sub(c[2], c[1]), x));
        (d1, d2)
    }

    /// Area element `|d1 T x d2 T|`.
    pub fn area_element(&self, xi: [f64; 2]) -> f64 {
        let (d1, d2) = self.jacobian(xi);
        norm(cross(d1, d2))
    }

    pub fn normal(&self, xi: [f64; 2]) -> Vec3 {
        let (d1, d2) = self.jacobian(xi);
        let n = cross(d1, d2);
        scale(n, 1.0 / norm(n))
    }

    /// Diameter: the longest distance between two corners.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..4 {
            for j in i + 1..4 {
                d = d.max(distance(self.corners[i], self.corners[j]));
            }
        }
        d
    }

    /// Area by the 2x2 Gauss rule (exact for bilinear charts).
    pub fn area(&self) -> f64 {
        let g = 0.5 / 3f64.sqrt();
        let pts = [0.5 - g, 0.5 + g];
        let mut a = 0.0;
        for &x in &pts {
            for &y in &pts {
                a += 0.25 * self.area_element([x, y]);
            }
        }
        a
    }

    pub fn centroid(&self) -> Vec3 {
        self.map([0.5, 0.5])
    }

    /// Affine if opposite sides are parallel and equal.
    pub fn is_affine(&self) -> bool {
        let c = &self.corners;
        norm(sub(add(c[0], c[2]), add(c[1], c[3]))) <= 1e-12 * self.diameter()
    }
}

/// Covariant Piola push of a reference vector at `xi`:
/// `(v1 d1T + v2 d2T) / J`.
pub fn push_vector(chart: &ChartMap, xi: [f64; 2], v: [f64; 2]) -> Vec3 {
    let (d1, d2) = chart.jacobian(xi);
    let j = norm(cross(d1, d2));
    scale(add(scale(d1, v[0]), scale(d2, v[1])), 1.0 / j)
}

/// Inverse of [`push_vector`] on tangential vectors:
/// `J (DT^T DT)^{-1} DT^T v`.
pub fn pull_vector(chart: &ChartMap, xi: [f64; 2], v: Vec3) -> [f64; 2] {
    let (d1, d2) = chart.jacobian(xi);
    let (g11, g12, g22) = (dot(d1, d1), dot(d1, d2), dot(d2, d2));
    let det = g11 * g22 - g12 * g12;
    let (r1, r2) = (dot(d1, v), dot(d2, v));
    let j = det.sqrt();
    [
        j * (g22 * r1 - g12 * r2) / det,
        j * (g11 * r2 - g12 * r1) / det,
    ]
}

/// Push of an RT function evaluated at `xi`.
pub fn piola_push(chart: &ChartMap, v: &RTFunction, xi: [f64; 2]) -> Vec3 {
    push_vector(chart, xi, v.eval(xi[0], xi[1]))
}

/// Surface divergence of the push of `v` at `xi`: `div v / J`.
pub fn piola_divergence(chart: &ChartMap, v: &RTFunction, xi: [f64; 2]) -> f64 {
    crate::interp::VectorField::divergence(v, xi[0], xi[1]) / chart.area_element(xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn distorted() -> ChartMap {
        ChartMap::new([
            [0.0, 0.0, 0.0],
            [1.2, 0.1, 0.0],
            [1.0, 0.9, 0.0],
            [-0.1, 1.1, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn push_pull_round_trip() {
        let c = distorted();
        for xi in [[0.2, 0.3], [0.9, 0.1], [0.5, 0.5]] {
            let v = [0.7, -1.3];
            let w = pull_vector(&c, xi, push_vector(&c, xi, v));
            assert!((w[0] - v[0]).abs() < 1e-13 && (w[1] - v[1]).abs() < 1e-13);
        }
    }

    #[test]
    fn degenerate_chart_rejected() {
        let r = ChartMap::new([[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [3.0, 0.0, 0.0]]);
        assert!(matches!(r, Err(Error::Chart(_))));
        let bow = ChartMap::new([[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]);
        assert!(bow.is_err());
    }

    #[test]
    fn geometry_of_unit_square() {
        let c =
            ChartMap::new([[0.0; 3], [2.0, 0.0, 0.0], [2.0, 2.0, 0.0], [0.0, 2.0, 0.0]]).unwrap();
        assert!((c.area() - 4.0).abs() < 1e-14);
        assert!((c.diameter() - 8f64.sqrt()).abs() < 1e-14);
        assert!(c.is_affine());
        assert!(!distorted().is_affine());
        assert_eq!(c.normal([0.3, 0.3]), [0.0, 0.0, 1.0]);
    }
}
