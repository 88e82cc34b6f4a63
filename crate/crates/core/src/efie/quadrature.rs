//! Regularizing pair rules on `K x K` for kernels singular at coincident
//! points.
//!
//! All rules work in canonical coordinates: identical elements need no
//! relabelling; a shared side is `{t = 0}` in both elements, parametrized by
//! `s` so that `(0, s)` is the same physical point; a shared vertex is the
//! origin of both.

use crate::refelem::{Edge, QuadratureRule};

/// `(xi, eta, weight)` on `[0,1]^2 x [0,1]^2`.
pub type PairPoint = ([f64; 2], [f64; 2], f64);

/// Tensor rule on `[0,1]^4`; the dimensions flagged in `split` use the
/// two-panel composite rule (they carry the angular variables of the Duffy
/// maps, whose integrands have complex singularities close to `[0,1]`).
fn gauss4(q: usize, split: [bool; 4]) -> Vec<([f64; 4], f64)> {
    let g = QuadratureRule::gauss(q);
    let plain: Vec<(f64, f64)> = g
        .points()
        .iter()
        .copied()
        .zip(g.weights().iter().copied())
        .collect();
    let composite: Vec<(f64, f64)> = [0.0, 0.5]
        .iter()
        .flat_map(|&a| plain.iter().map(move |&(x, w)| (a + 0.5 * x, 0.5 * w)))
        .collect();
    let dims: Vec<&Vec<(f64, f64)>> = split
        .iter()
        .map(|&s| if s { &composite } else { &plain })
        .collect();
    let mut out = Vec::with_capacity(dims.iter().map(|d| d.len()).product());
    for &(a, wa) in dims[0] {
        for &(b, wb) in dims[1] {
            for &(c, wc) in dims[2] {
                for &(d, wd) in dims[3] {
                    out.push(([a, b, c, d], wa * wb * wc * wd));
                }
            }
        }
    }
    out
}

/// Identical elements: relative coordinates `z = eta - xi`, split by the
/// signs of `z` and the order of `|z_1|, |z_2|` into eight Duffy regions.
pub fn identical(q: usize) -> Vec<PairPoint> {
    let base = gauss4(q, [false, true, false, false]);
    let mut out = Vec::with_capacity(8 * base.len());
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for swap in [false, true] {
                for &([w, u, t1, t2], wt) in &base {
                    let (a, b) = if swap { (w * u, w) } else { (w, w * u) };
                    let z = [sx * a, sy * b];
                    let lo = [(-z[0]).max(0.0), (-z[1]).max(0.0)];
                    let xi = [lo[0] + (1.0 - a) * t1, lo[1] + (1.0 - b) * t2];
                    let eta = [xi[0] + z[0], xi[1] + z[1]];
                    out.push((xi, eta, wt * w * (1.0 - a) * (1.0 - b)));
                }
            }
        }
    }
    out
}

/// Shared side: points `(t1, s1)`, `(t2, s2)` with `z = s2 - s1`; the
/// triple `(t1, t2, |z|)` is split by its largest entry, times two signs.
pub fn common_edge(q: usize) -> Vec<PairPoint> {
    let base = gauss4(q, [false, true, true, false]);
    let mut out = Vec::with_capacity(6 * base.len());
    for sign in [1.0, -1.0] {
        for largest in 0..3 {
            for &([w, u1, u2, v], wt) in &base {
                let (t1, t2, a) = match largest {
                    0 => (w, w * u1, w * u2),
                    1 => (w * u1, w, w * u2),
                    _ => (w * u1, w * u2, w),
                };
                let z = sign * a;
                let lo = (-z).max(0.0);
                let s1 = lo + (1.0 - a) * v;
                out.push(([t1, s1], [t2, s1 + z], wt * w * w * (1.0 - a)));
            }
        }
    }
    out
}

/// Shared vertex at the origin: four regions by the largest coordinate.
pub fn common_vertex(q: usize) -> Vec<PairPoint> {
    let base = gauss4(q, [false; 4]);
    let mut out = Vec::with_capacity(4 * base.len());
    for largest in 0..4 {
        for &([w, u1, u2, u3], wt) in &base {
            let rest = [w * u1, w * u2, w * u3];
            let mut all = [0.0; 4];
            let mut k = 0;
            for (i, slot) in all.iter_mut().enumerate() {
                if i == largest {
                    *slot = w;
                } else {
                    *slot = rest[k];
                    k += 1;
                }
            }
            out.push(([all[0], all[1]], [all[2], all[3]], wt * w * w * w));
        }
    }
    out
}

/// Map of canonical shared-side coordinates `(t, s)` into the element.
pub fn side_map(edge: Edge, t: f64, s: f64) -> [f64; 2] {
    match edge {
        Edge::Bottom => [s, t],
        Edge::Right => [1.0 - t, s],
        Edge::Top => [1.0 - s, 1.0 - t],
        Edge::Left => [t, 1.0 - s],
    }
}

/// Rotation taking the origin to local corner `corner`.
pub fn corner_map(corner: usize, x: [f64; 2]) -> [f64; 2] {
    match corner {
        0 => x,
        1 => [1.0 - x[1], x[0]],
        2 => [1.0 - x[0], 1.0 - x[1]],
        _ => [x[1], 1.0 - x[0]],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total(rule: &[PairPoint]) -> f64 {
        rule.iter().map(|r| r.2).sum()
    }

    fn integrate(rule: &[PairPoint], f: impl Fn([f64; 2], [f64; 2]) -> f64) -> f64 {
        rule.iter().map(|&(x, y, w)| w * f(x, y)).sum()
    }

    #[test]
    fn rules_cover_the_unit_hypercube() {
        for q in [3, 5] {
            assert!((total(&identical(q)) - 1.0).abs() < 1e-13);
            assert!((total(&common_edge(q)) - 1.0).abs() < 1e-13);
            assert!((total(&common_vertex(q)) - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn polynomials_integrate_exactly() {
        let f = |x: [f64; 2], y: [f64; 2]| x[0] * x[0] * y[1] + 3.0 * x[1] * y[0] * y[0] * y[1];
        // int x1^2 y2 = 1/6; int 3 x2 y1^2 y2 = 3 * 1/2 * 1/3 * 1/2 = 1/4
        let exact = 1.0 / 6.0 + 0.25;
        for rule in [identical(4), common_edge(4), common_vertex(4)] {
            assert!((integrate(&rule, f) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_kernels_converge() {
        // coplanar unit squares: identical, side-adjacent (x2 = -t2),
        // vertex-adjacent (reflected through the origin)
        let cases: [(fn(usize) -> Vec<PairPoint>, fn([f64; 2], [f64; 2]) -> f64); 3] = [
            (identical, |x, y| {
                1.0 / ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt()
            }),
            (common_edge, |x, y| {
                1.0 / ((x[0] + y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt()
            }),
            (common_vertex, |x, y| {
                1.0 / ((x[0] + y[0]).powi(2) + (x[1] + y[1]).powi(2)).sqrt()
            }),
        ];
        for (rule, f) in cases {
            let a = integrate(&rule(6), f);
            let b = integrate(&rule(12), f);
            assert!((a - b).abs() < 1e-8 * b.abs(), "{a} {b}");
        }
        // identical: 4 (ln(1 + sqrt 2) - (sqrt 2 - 1)/3)
        let exact = 4.0 * ((1.0 + 2f64.sqrt()).ln() - (2f64.sqrt() - 1.0) / 3.0);
        let got = integrate(&identical(8), cases[0].1);
        assert!((got - exact).abs() < 1e-10, "{got} {exact}");
    }

    #[test]
    fn canonical_maps_hit_the_right_places() {
        for e in Edge::ALL {
            for s in [0.0, 0.3, 1.0] {
                assert_eq!(side_map(e, 0.0, s), e.point(s));
            }
            let inner = side_map(e, 1.0, 0.5);
            let n = e.normal();
            let mid = e.point(0.5);
            assert!((mid[0] - inner[0]) * n[0] + (mid[1] - inner[1]) * n[1] > 0.99);
        }
        let corners = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        for (c, want) in corners.iter().enumerate() {
            assert_eq!(corner_map(c, [0.0, 0.0]), *want);
        }
    }
}
