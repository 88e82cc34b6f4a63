//! Uniform refinement of piecewise-plane surfaces into quadrilateral meshes.

use super::geometry::{cross, distance, norm, ChartMap, Vec3};
use super::patch::PiecewisePlaneSurface;
use crate::refelem::Edge;
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Element `Gamma_j` with its bilinear chart.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshElement {
    /// Global vertex indices, counterclockwise about the outward normal.
    pub vertices: [usize; 4],
    pub chart: ChartMap,
    pub patch: usize,
    /// Cell position `(a, b)` in the `n x n` split of the patch.
    pub cell: [usize; 2],
}

/// Mesh edge with the elements (and their local edges) that contain it.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshEdge {
    /// Endpoints, smaller index first.
    pub vertices: [usize; 2],
    pub uses: Vec<(usize, Edge)>,
}

impl MeshEdge {
    pub fn is_boundary(&self) -> bool {
        self.uses.len() == 1
    }
}

/// Shape and regularity metrics of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshQuality {
    pub elements: usize,
    pub h_max: f64,
    pub h_min: f64,
    /// `max_j h_j / rho_j`, with `rho_j` the area over the longest side.
    pub shape_ratio: f64,
    /// `max_j h_j / min_j h_j`.
    pub quasi_uniformity: f64,
    /// Bounds of `J / h_j^2` over corners and centre.
    pub jacobian_min: f64,
    pub jacobian_max: f64,
    /// `max |d_i T_j| / h_j`.
    pub derivative_max: f64,
    /// Largest mismatch of the two parametrizations of a shared side.
    pub parametrization_defect: f64,
}

impl MeshQuality {
    pub const CSV_HEADER: &'static str =
        "elements,h_max,h_min,shape_ratio,quasi_uniformity,jacobian_min,jacobian_max,derivative_max,parametrization_defect";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e}",
            self.elements,
            self.h_max,
            self.h_min,
            self.shape_ratio,
            self.quasi_uniformity,
            self.jacobian_min,
            self.jacobian_max,
            self.derivative_max,
            self.parametrization_defect
        )
    }
}

/// Quadrilateral mesh from a uniform `2^L x 2^L` split of every patch.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadMesh {
    level: usize,
    vertices: Vec<Vec3>,
    elements: Vec<MeshElement>,
    edges: Vec<MeshEdge>,
    element_edges: Vec<[usize; 4]>,
    closed: bool,
    patch_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum VertexKey {
    Corner(usize),
    OnEdge(usize, usize, usize),
    Interior(usize, usize, usize),
}

const MAX_LEVEL: usize = 10;

impl QuadMesh {
    pub fn refine(surface: &PiecewisePlaneSurface, level: usize) -> Result<Self> {
        if level > MAX_LEVEL {
            return Err(Error::Configuration(format!(
                "refinement level {level} exceeds {MAX_LEVEL}"
            )));
        }
        let n = 1usize << level;
        let mut ids: BTreeMap<VertexKey, usize> = BTreeMap::new();
        let mut vertices = Vec::new();
        let mut elements = Vec::new();
        for (pi, patch) in surface.patches().iter().enumerate() {
            let chart = surface.patch_chart(pi);
            let c = patch.vertices;
            let key = |a: usize, b: usize| -> VertexKey {
                let on_edge = |i: usize, j: usize, t: usize| {
                    let (lo, hi) = (c[i].min(c[j]), c[i].max(c[j]));
                    VertexKey::OnEdge(lo, hi, if c[i] < c[j] { t } else { n - t })
                };
                match (a, b) {
                    (0, 0) => VertexKey::Corner(c[0]),
                    (a, 0) if a == n => VertexKey::Corner(c[1]),
                    (a, b) if a == n && b == n => VertexKey::Corner(c[2]),
                    (0, b) if b == n => VertexKey::Corner(c[3]),
                    (a, 0) => on_edge(0, 1, a),
                    (a, b) if a == n => on_edge(1, 2, b),
                    (a, b) if b == n => on_edge(3, 2, a),
                    (0, b) => on_edge(0, 3, b),
                    (a, b) => VertexKey::Interior(pi, a, b),
                }
            };
            let mut grid = vec![0usize; (n + 1) * (n + 1)];
            for b in 0..=n {
                for a in 0..=n {
                    let k = key(a, b);
                    let id = *ids.entry(k).or_insert_with(|| {
                        vertices.push(chart.map([a as f64 / n as f64, b as f64 / n as f64]));
                        vertices.len() - 1
                    });
                    grid[b * (n + 1) + a] = id;
                }
            }
            for b in 0..n {
                for a in 0..n {
                    let g = |a: usize, b: usize| grid[b * (n + 1) + a];
                    let vs = [g(a, b), g(a + 1, b), g(a + 1, b + 1), g(a, b + 1)];
                    let corners = vs.map(|v| vertices[v]);
                    let el_chart = ChartMap::new(corners)
                        .map_err(|e| Error::Chart(format!("patch {pi} cell ({a},{b}): {e}")))?;
                    elements.push(MeshElement {
                        vertices: vs,
                        chart: el_chart,
                        patch: pi,
                        cell: [a, b],
                    });
                }
            }
        }
        let mut edge_ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut edges: Vec<MeshEdge> = Vec::new();
        let mut element_edges = Vec::with_capacity(elements.len());
        for (j, el) in elements.iter().enumerate() {
            let mut local = [0usize; 4];
            for e in Edge::ALL {
                let (a, b) = (el.vertices[e.start_vertex()], el.vertices[e.end_vertex()]);
                let k = (a.min(b), a.max(b));
                let id = *edge_ids.entry(k).or_insert_with(|| {
                    edges.push(MeshEdge {
                        vertices: [k.0, k.1],
                        uses: Vec::new(),
                    });
                    edges.len() - 1
                });
                edges[id].uses.push((j, e));
                local[e.index()] = id;
            }
            element_edges.push(local);
        }
        let mesh = Self {
            level,
            vertices,
            elements,
            edges,
            element_edges,
            closed: surface.is_closed(),
            patch_count: surface.patches().len(),
        };
        mesh.check_conformity()?;
        Ok(mesh)
    }

    fn check_conformity(&self) -> Result<()> {
        for (i, e) in self.edges.iter().enumerate() {
            match e.uses.len() {
                1 if self.closed => {
                    return Err(Error::Conformity(format!(
                        "edge {i} of a closed mesh has one element"
                    )))
                }
                1 => {}
                2 => {
                    let [(a, ea), (b, eb)] = [e.uses[0], e.uses[1]];
                    let start_a = self.elements[a].vertices[ea.start_vertex()];
                    let start_b = self.elements[b].vertices[eb.start_vertex()];
                    if start_a == start_b {
                        return Err(Error::Conformity(format!(
                            "elements {a} and {b} traverse edge {i} in the same direction"
                        )));
                    }
                }
                n => {
                    return Err(Error::Conformity(format!(
                        "edge {i} shared by {n} elements"
                    )))
                }
            }
        }
        let defect = self.parametrization_defect();
        let h = self
            .elements
            .iter()
            .map(|e| e.chart.diameter())
            .fold(0.0f64, f64::max);
        if defect > 1e-10 * h {
            return Err(Error::Conformity(format!(
                "side parametrizations disagree by {defect:.3e}"
            )));
        }
        Ok(())
    }

    fn parametrization_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for e in self.edges.iter().filter(|e| e.uses.len() == 2) {
            let [(a, ea), (b, eb)] = [e.uses[0], e.uses[1]];
            for s in [0.0, 0.21, 0.5, 0.87, 1.0] {
                let pa = self.elements[a].chart.map(ea.point(s));
                let pb = self.elements[b].chart.map(eb.point(1.0 - s));
                worst = worst.max(distance(pa, pb));
            }
        }
        worst
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn cells_per_side(&self) -> usize {
        1 << self.level
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn elements(&self) -> &[MeshElement] {
        &self.elements
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    /// Global edge index of each local edge, in [`Edge::ALL`] order.
    pub fn element_edges(&self, element: usize) -> [usize; 4] {
        self.element_edges[element]
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn patch_count(&self) -> usize {
        self.patch_count
    }

    /// Global mesh size `max_j h_j`.
    pub fn h(&self) -> f64 {
        self.elements
            .iter()
            .map(|e| e.chart.diameter())
            .fold(0.0f64, f64::max)
    }

    /// Element of `patch` containing the patch point `patch_xi` and the local
    /// coordinates there. Points on cell sides go to the lower cell.
    pub fn locate(&self, patch: usize, patch_xi: [f64; 2]) -> (usize, [f64; 2]) {
        let n = self.cells_per_side();
        let split = |t: f64| {
            let s = t.clamp(0.0, 1.0) * n as f64;
            let c = (s.floor() as usize).min(n - 1);
            (c, s - c as f64)
        };
        let (a, x) = split(patch_xi[0]);
        let (b, y) = split(patch_xi[1]);
        (patch * n * n + b * n + a, [x, y])
    }

    /// Patch coordinates of the element point `xi`.
    pub fn patch_coordinates(&self, element: usize, xi: [f64; 2]) -> [f64; 2] {
        let n = self.cells_per_side() as f64;
        let [a, b] = self.elements[element].cell;
        [(a as f64 + xi[0]) / n, (b as f64 + xi[1]) / n]
    }

    /// Euler characteristic `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.elements.len() as i64
    }

    pub fn quality(&self) -> MeshQuality {
        let mut q = MeshQuality {
            elements: self.elements.len(),
            h_max: 0.0,
            h_min: f64::INFINITY,
            shape_ratio: 0.0,
            quasi_uniformity: 0.0,
            jacobian_min: f64::INFINITY,
            jacobian_max: 0.0,
            derivative_max: 0.0,
            parametrization_defect: self.parametrization_defect(),
        };
        for el in &self.elements {
            let c = &el.chart;
            let h = c.diameter();
            let longest = (0..4)
                .map(|i| distance(c.corners()[i], c.corners()[(i + 1) % 4]))
                .fold(0.0f64, f64::max);
            let rho = c.area() / longest;
            q.h_max = q.h_max.max(h);
            q.h_min = q.h_min.min(h);
            q.shape_ratio = q.shape_ratio.max(h / rho);
            for xi in [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]] {
                let (d1, d2) = c.jacobian(xi);
                let j = norm(cross(d1, d2)) / (h * h);
                q.jacobian_min = q.jacobian_min.min(j);
                q.jacobian_max = q.jacobian_max.max(j);
                q.derivative_max = q.derivative_max.max(norm(d1).max(norm(d2)) / h);
            }
        }
        q.quasi_uniformity = q.h_max / q.h_min;
        q
    }

    /// One CSV row per element: index, patch, h, rho, min and max Jacobian.
    pub fn element_metrics_csv(&self) -> String {
        let mut s = String::from("element,patch,h,rho,jacobian_min,jacobian_max\n");
        for (j, el) in self.elements.iter().enumerate() {
            let c = &el.chart;
            let longest = (0..4)
                .map(|i| distance(c.corners()[i], c.corners()[(i + 1) % 4]))
                .fold(0.0f64, f64::max);
            let js: Vec<f64> = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
                .iter()
                .map(|&xi| c.area_element(xi))
                .collect();
            let (lo, hi) = js
                .iter()
                .fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
            let _ = writeln!(
                s,
                "{j},{},{:.12e},{:.12e},{lo:.12e},{hi:.12e}",
                el.patch,
                c.diameter(),
                c.area() / longest
            );
        }
        s
    }
}
