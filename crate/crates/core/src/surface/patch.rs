//! Piecewise-plane surfaces and their text format.

use super::geometry::{cross, dot, norm, scale, sub, ChartMap, Vec3};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Plane quadrilateral patch, corners counterclockwise about the outward
/// normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub vertices: [usize; 4],
    pub face_id: i64,
    pub normal: Vec3,
}

/// Union of plane quadrilateral patches, open (screen) or closed.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePlaneSurface {
    vertices: Vec<Vec3>,
    patches: Vec<Patch>,
    closed: bool,
    boundary_edges: Vec<(usize, usize)>,
}

const PLANARITY: f64 = 1e-12;

pub const UNIT_SQUARE_SCREEN: &str = "\
# unit square screen in the plane z = 0
surface open
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
q 0 1 2 3 0
";

pub const UNIT_CUBE: &str = "\
# boundary of the unit cube, outward orientation
surface closed
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
q 0 3 2 1 0
q 4 5 6 7 1
q 0 1 5 4 2
q 3 7 6 2 3
q 0 4 7 3 4
q 1 2 6 5 5
";

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

impl PiecewisePlaneSurface {
    /// Validates and builds a surface. `closed` surfaces need every patch
    /// edge shared by exactly two patches, open ones at most two.
    pub fn new(vertices: Vec<Vec3>, quads: Vec<([usize; 4], i64)>, closed: bool) -> Result<Self> {
        if quads.is_empty() {
            return Err(Error::Conformity("surface has no patches".into()));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Conformity("non-finite vertex coordinate".into()));
        }
        let mut patches = Vec::with_capacity(quads.len());
        for (idx, (vs, face_id)) in quads.into_iter().enumerate() {
            for &v in &vs {
                if v >= vertices.len() {
                    return Err(Error::Conformity(format!(
                        "patch {idx} references missing vertex {v}"
                    )));
                }
            }
            for a in 0..4 {
                for b in a + 1..4 {
                    if vs[a] == vs[b] {
                        return Err(Error::Conformity(format!(
                            "patch {idx} repeats vertex {}",
                            vs[a]
                        )));
                    }
                }
            }
            let c = vs.map(|v| vertices[v]);
            let n = cross(sub(c[2], c[0]), sub(c[3], c[1]));
            let nn = norm(n);
            let size = (0..4).map(|i| norm(sub(c[i], c[0]))).fold(0.0f64, f64::max);
            if nn <= PLANARITY * size * size {
                return Err(Error::Chart(format!("patch {idx} is degenerate")));
            }
            let n = scale(n, 1.0 / nn);
            for corner in &c {
                if dot(sub(*corner, c[0]), n).abs() > PLANARITY * size.max(1.0) {
                    return Err(Error::Conformity(format!("patch {idx} is not planar")));
                }
            }
            ChartMap::new(c).map_err(|e| Error::Chart(format!("patch {idx}: {e}")))?;
            patches.push(Patch {
                vertices: vs,
                face_id,
                normal: n,
            });
        }
        // directed edge uses per undirected edge
        let mut uses: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
        for (idx, p) in patches.iter().enumerate() {
            for k in 0..4 {
                let (a, b) = (p.vertices[k], p.vertices[(k + 1) % 4]);
                uses.entry((a.min(b), a.max(b)))
                    .or_default()
                    .push((idx, a < b));
            }
        }
        let mut boundary_edges = Vec::new();
        for (&(a, b), list) in &uses {
            match list.len() {
                1 if closed => {
                    return Err(Error::Conformity(format!(
                        "edge ({a},{b}) of a closed surface belongs to one patch"
                    )))
                }
                1 => {
                    let (_, forward) = list[0];
                    boundary_edges.push(if forward { (a, b) } else { (b, a) });
                }
                2 => {
                    if list[0].1 == list[1].1 {
                        return Err(Error::Conformity(format!(
                            "patches {} and {} are inconsistently oriented along ({a},{b})",
                            list[0].0, list[1].0
                        )));
                    }
                }
                n => {
                    return Err(Error::Conformity(format!(
                        "edge ({a},{b}) is shared by {n} patches"
                    )))
                }
            }
        }
        for &(a, b) in &boundary_edges {
            let (pa, pb) = (vertices[a], vertices[b]);
            let d = sub(pb, pa);
            let len2 = dot(d, d);
            for (v, pv) in vertices.iter().enumerate() {
                if v == a || v == b {
                    continue;
                }
                let t = dot(sub(*pv, pa), d) / len2;
                let off = norm(sub(sub(*pv, pa), scale(d, t)));
                if t > 0.0 && t < 1.0 && off <= 1e-12 * len2.sqrt() {
                    return Err(Error::Conformity(format!(
                        "vertex {v} hangs on edge ({a},{b})"
                    )));
                }
            }
        }
        if !closed && boundary_edges.is_empty() {
            return Err(Error::Conformity(
                "open surface without boundary edges".into(),
            ));
        }
        // a vertex must be incident to some patch
        let mut used = vec![false; vertices.len()];
        patches
            .iter()
            .flat_map(|p| p.vertices)
            .for_each(|v| used[v] = true);
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::Conformity(format!("vertex {v} belongs to no patch")));
        }
        Ok(Self {
            vertices,
            patches,
            closed,
            boundary_edges,
        })
    }

    /// Parses the text format: a `surface <open|closed>` header, `v x y z`
    /// lines and `q i1 i2 i3 i4 face_id` lines. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut closed = None;
        let mut vertices = Vec::new();
        let mut quads = Vec::new();
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            last_line = line_no;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tok = line.split_whitespace();
            let head = tok.next().unwrap_or_default();
            let rest: Vec<&str> = tok.collect();
            match head {
                "surface" => {
                    if closed.is_some() {
                        return Err(parse_err(line_no, "duplicate surface header"));
                    }
                    closed = Some(match rest.as_slice() {
                        ["open"] => false,
                        ["closed"] => true,
                        _ => {
                            return Err(parse_err(
                                line_no,
                                "expected `surface open` or `surface closed`",
                            ))
                        }
                    });
                }
                _ if closed.is_none() => {
                    return Err(parse_err(line_no, "missing `surface` header"))
                }
                "v" => {
                    if !quads.is_empty() {
                        return Err(parse_err(line_no, "vertex after the first quad"));
                    }
                    if rest.len() != 3 {
                        return Err(parse_err(line_no, "vertex needs three coordinates"));
                    }
                    let mut c = [0.0; 3];
                    for (slot, t) in c.iter_mut().zip(&rest) {
                        *slot = t
                            .parse::<f64>()
                            .map_err(|_| parse_err(line_no, format!("bad coordinate `{t}`")))?;
                        if !slot.is_finite() {
                            return Err(parse_err(line_no, "non-finite coordinate"));
                        }
                    }
                    vertices.push(c);
                }
                "q" => {
                    if rest.len() != 5 {
                        return Err(parse_err(
                            line_no,
                            "quad needs four vertex indices and a face id",
                        ));
                    }
                    let mut vs = [0usize; 4];
                    for (slot, t) in vs.iter_mut().zip(&rest[..4]) {
                        *slot = t
                            .parse::<usize>()
                            .map_err(|_| parse_err(line_no, format!("bad vertex index `{t}`")))?;
                        if *slot >= vertices.len() {
                            return Err(parse_err(
                                line_no,
                                format!("vertex index {slot} out of range"),
                            ));
                        }
                    }
                    let face = rest[4]
                        .parse::<i64>()
                        .map_err(|_| parse_err(line_no, format!("bad face id `{}`", rest[4])))?;
                    quads.push((vs, face));
                }
                other => return Err(parse_err(line_no, format!("unknown record `{other}`"))),
            }
        }
        let Some(closed) = closed else {
            return Err(parse_err(last_line.max(1), "missing `surface` header"));
        };
        if quads.is_empty() {
            return Err(parse_err(last_line.max(1), "no quads"));
        }
        Self::new(vertices, quads, closed)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("surface {}\n", if self.closed { "closed" } else { "open" });
        for v in &self.vertices {
            let _ = writeln!(s, "v {:?} {:?} {:?}", v[0], v[1], v[2]);
        }
        for p in &self.patches {
            let [a, b, c, d] = p.vertices;
            let _ = writeln!(s, "q {a} {b} {c} {d} {}", p.face_id);
        }
        s
    }

    pub fn unit_square_screen() -> Self {
        Self::parse(UNIT_SQUARE_SCREEN).expect("built-in screen")
    }

    pub fn unit_cube() -> Self {
        Self::parse(UNIT_CUBE).expect("built-in cube")
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn patches(&self) -> &[Patch] {
        &self.patches
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Boundary edges, directed as traversed by their patch.
    pub fn boundary_edges(&self) -> &[(usize, usize)] {
        &self.boundary_edges
    }

    pub fn patch_chart(&self, patch: usize) -> ChartMap {
        let c = self.patches[patch].vertices.map(|v| self.vertices[v]);
        ChartMap::new(c).expect("validated at construction")
    }
}
