//! Vertex-centred finite differences for the extension problems.
//!
//! The grid has `n` cells per direction. Edge weights are finite-volume
//! fluxes (halved for each boundary plane the edge lies in), so the matrix
//! is the standard 7-point (5-point in 2D) Laplacian with natural Neumann
//! boundaries wherever no Dirichlet value is imposed.

use super::FracKind;
use crate::{Error, Result};
use rayon::prelude::*;

const TOLERANCE: f64 = 1e-10;

struct Grid {
    dim: usize,
    n: usize,
    fixed: Vec<bool>,
}

impl Grid {
    fn side(&self) -> usize {
        self.n + 1
    }

    fn len(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    fn coords(&self, idx: usize) -> [usize; 3] {
        let s = self.side();
        [
            idx % s,
            (idx / s) % s,
            if self.dim == 3 { idx / (s * s) } else { 0 },
        ]
    }

    fn stride(&self, d: usize) -> usize {
        self.side().pow(d as u32)
    }

    fn on_boundary(&self, c: usize) -> bool {
        c == 0 || c == self.n
    }

    /// Neighbours of `idx` with their edge weights.
    fn neighbours(&self, idx: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        let c = self.coords(idx);
        let h = 1.0 / self.n as f64;
        let scale = if self.dim == 3 { h } else { 1.0 };
        for d in 0..self.dim {
            let mut w = scale;
            for e in 0..self.dim {
                if e != d && self.on_boundary(c[e]) {
                    w *= 0.5;
                }
            }
            if c[d] > 0 {
                out.push((idx - self.stride(d), w));
            }
            if c[d] < self.n {
                out.push((idx + self.stride(d), w));
            }
        }
    }

    /// `y = A x` on the free nodes; fixed nodes of `x` are read as given.
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.par_chunks_mut(4096).enumerate().for_each(|(chunk, ys)| {
            let mut nb = Vec::with_capacity(6);
            for (o, slot) in ys.iter_mut().enumerate() {
                let idx = chunk * 4096 + o;
                if self.fixed[idx] {
                    *slot = 0.0;
                    continue;
                }
                self.neighbours(idx, &mut nb);
                *slot = nb.iter().map(|&(j, w)| w * (x[idx] - x[j])).sum();
            }
        });
    }

    fn diagonal(&self) -> Vec<f64> {
        let mut nb = Vec::with_capacity(6);
        (0..self.len())
            .map(|idx| {
                self.neighbours(idx, &mut nb);
                nb.iter().map(|e| e.1).sum()
            })
            .collect()
    }

    /// Solves for the free values of `u` given the fixed ones and the
    /// source `b` (ignored at fixed nodes).
    fn solve(&self, u: &mut [f64], b: &[f64]) -> Result<()> {
        let len = self.len();
        let diag = self.diagonal();
        let mut ax = vec![0.0; len];
        self.apply(u, &mut ax);
        let mut r: Vec<f64> = (0..len)
            .map(|i| if self.fixed[i] { 0.0 } else { b[i] - ax[i] })
            .collect();
        let norm0 = dot(&r, &r).sqrt().max(dot(b, b).sqrt());
        if norm0 == 0.0 {
            return Ok(());
        }
        let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut q = vec![0.0; len];
        let max_iter = 40 * self.n * self.n + 1000;
        for _ in 0..max_iter {
            // A on free directions only: fixed entries of p are zero.
            self.apply(&p, &mut q);
            let alpha = rz / dot(&p, &q);
            for i in 0..len {
                u[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            if dot(&r, &r).sqrt() <= TOLERANCE * norm0 {
                return Ok(());
            }
            for i in 0..len {
                z[i] = r[i] / diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..len {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(Error::OracleFailure(format!(
            "conjugate gradients did not converge in {max_iter} iterations"
        )))
    }

    fn energy(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut nb = Vec::with_capacity(6);
        let mut e = 0.0;
        for idx in 0..self.len() {
            self.neighbours(idx, &mut nb);
            for &(j, w) in &nb {
                if j > idx {
                    e += w * (u[idx] - u[j]) * (v[idx] - v[j]);
                }
            }
        }
        e
    }

    fn x(&self, c: usize) -> f64 {
        c as f64 / self.n as f64
    }

    /// Trapezoid weight of a bottom-plane node.
    fn surface_weight(&self, c: [usize; 3]) -> f64 {
        let h = 1.0 / self.n as f64;
        let mut w = h * h;
        for &ci in &c[..2] {
            if self.on_boundary(ci) {
                w *= 0.5;
            }
        }
        w
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Neumann data on `z = 0`, returns `<U|_K, u>`.
fn neumann_pairing(
    n: usize,
    dirichlet_sides: bool,
    u: &dyn Fn(f64, f64) -> f64,
    v: &dyn Fn(f64, f64) -> f64,
) -> Result<f64> {
    let mut g = Grid {
        dim: 3,
        n,
        fixed: Vec::new(),
    };
    g.fixed = (0..g.len())
        .map(|idx| {
            let c = g.coords(idx);
            c[2] == n || (dirichlet_sides && (g.on_boundary(c[0]) || g.on_boundary(c[1])))
        })
        .collect();
    let mut b = vec![0.0; g.len()];
    for i in 0..=n {
        for j in 0..=n {
            let c = [i, j, 0];
            b[i + (n + 1) * j] = g.surface_weight(c) * v(g.x(i), g.x(j));
        }
    }
    let mut sol = vec![0.0; g.len()];
    g.solve(&mut sol, &b)?;
    let mut s = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            s += g.surface_weight([i, j, 0]) * sol[i + (n + 1) * j] * u(g.x(i), g.x(j));
        }
    }
    Ok(s)
}

/// Dirichlet data on the bottom face (or bottom edge in 2D), zero on the
/// rest of the boundary; returns the discrete energy pairing.
fn dirichlet_energy(
    dim: usize,
    n: usize,
    u: &dyn Fn(f64, f64) -> f64,
    v: &dyn Fn(f64, f64) -> f64,
) -> Result<f64> {
    let mut g = Grid {
        dim,
        n,
        fixed: Vec::new(),
    };
    g.fixed = (0..g.len())
        .map(|idx| {
            let c = g.coords(idx);
            (0..dim).any(|d| g.on_boundary(c[d]))
        })
        .collect();
    let bottom = |c: [usize; 3]| if dim == 3 { c[2] == 0 } else { c[1] == 0 };
    let lift = |f: &dyn Fn(f64, f64) -> f64| -> Result<Vec<f64>> {
        let mut sol = vec![0.0; g.len()];
        for (idx, slot) in sol.iter_mut().enumerate() {
            let c = g.coords(idx);
            if bottom(c) {
                *slot = if dim == 3 {
                    f(g.x(c[0]), g.x(c[1]))
                } else {
                    f(g.x(c[0]), 0.0)
                };
            }
        }
        let b = vec![0.0; g.len()];
        g.solve(&mut sol, &b)?;
        Ok(sol)
    };
    let su = lift(u)?;
    let sv = lift(v)?;
    Ok(g.energy(&su, &sv))
}

/// Finite-difference value of the inner product `kind` of `u` and `v` on a
/// grid with `n` cells per direction.
///
/// For [`FracKind::TildeH12Edge`] the edge functions are read as
/// `s -> u(s, 0)`.
pub fn fd_oracle(
    kind: FracKind,
    u: &dyn Fn(f64, f64) -> f64,
    v: &dyn Fn(f64, f64) -> f64,
    n: usize,
) -> Result<f64> {
    if n < 8 {
        return Err(Error::Configuration(format!(
            "oracle grid n = {n} is below 8"
        )));
    }
    match kind {
        FracKind::Hm12K => neumann_pairing(n, true, u, v),
        FracKind::TildeHm12K => neumann_pairing(n, false, u, v),
        FracKind::TildeH12K => dirichlet_energy(3, n, u, v),
        FracKind::TildeH12Edge => dirichlet_energy(2, n, u, v),
    }
}
