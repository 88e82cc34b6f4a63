use super::edge::{extension, EdgeProjector};
use super::projection::{rt_projection, CONDITION_LIMIT};
use super::{Curl, InterpOptions, ScalarField};
use crate::linalg::checked_cholesky;
use crate::refelem::{legendre, scalar_bubble_basis, scalar_curl, Edge, TensorPolynomial};
use crate::Result;
use nalgebra::{DMatrix, DVector};

/// H1-conforming interpolation onto `P_p(K)`: bilinear vertex interpolant,
/// tilde H^{1/2} edge projection of the remainder, then the H1-seminorm
/// projection of what is left onto the interior bubbles.
pub fn interp_h1(
    f: &dyn ScalarField,
    p: usize,
    options: InterpOptions,
) -> Result<TensorPolynomial> {
    let p = p.max(1);
    let om = legendre::one_minus_x();
    let xl = legendre::x_linear();
    let v = [
        f.value(0.0, 0.0),
        f.value(1.0, 0.0),
        f.value(1.0, 1.0),
        f.value(0.0, 1.0),
    ];
    let hats = [
        TensorPolynomial::outer(&om, &om),
        TensorPolynomial::outer(&xl, &om),
        TensorPolynomial::outer(&xl, &xl),
        TensorPolynomial::outer(&om, &xl),
    ];
    let vertex = hats
        .iter()
        .zip(v)
        .fold(TensorPolynomial::zeros(1, 1), |acc, (h, c)| {
            acc.add(&h.scaled(c))
        });

    let edges = EdgeProjector::new(p, options.truncation)?;
    let mut result = vertex.raised(p, p);
    for e in Edge::ALL {
        let g = |s: f64| {
            let x = e.point(s);
            f.value(x[0], x[1]) - vertex.eval(x[0], x[1])
        };
        let (_, psi2) = edges.project(e, g)?;
        result = result.add(&extension(e, &psi2, options.blend, p)?);
    }

    let bubbles = scalar_bubble_basis(p);
    if bubbles.is_empty() {
        return Ok(result);
    }
    let curls: Vec<_> = bubbles.iter().map(scalar_curl).collect();
    let n = curls.len();
    let k = DMatrix::from_fn(n, n, |a, b| curls[a].dot(&curls[b]));
    let rest = rt_projection(&Curl(f), p, options.points(p)).sub(&scalar_curl(&result));
    let rhs = DVector::from_fn(n, |a, _| rest.dot(&curls[a]));
    let c = checked_cholesky(&k, CONDITION_LIMIT)?.solve(&rhs);
    for (b, w) in bubbles.iter().zip(c.iter()) {
        result = result.add(&b.scaled(*w));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::fields::TrigScalar;
    use crate::interp::{interp_div_l2, FnScalar};

    #[test]
    fn reproduces_polynomials() {
        let bil = FnScalar {
            value: |x: f64, y: f64| x * y,
            gradient: |x: f64, y: f64| [y, x],
        };
        let r = interp_h1(&bil, 1, InterpOptions::default()).unwrap();
        assert!((r.eval(0.3, 0.8) - 0.24).abs() < 1e-14);
        for p in 1..=6 {
            let q = TensorPolynomial::project(p, p, p + 2, |x, y| {
                (1.0 + x * y).powi(p as i32) - y.powi(p as i32)
            });
            let r = interp_h1(&q, p, InterpOptions::default()).unwrap();
            assert!(r.sub(&q).max_abs_coefficient() < 1e-10, "p={p}");
        }
    }

    #[test]
    fn matches_vertex_values() {
        let f = TrigScalar {
            terms: vec![[1.0, 2.0, 1.0, 0.3]],
        };
        let r = interp_h1(&f, 3, InterpOptions::default()).unwrap();
        for v in [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]] {
            assert!((r.eval(v[0], v[1]) - f.value(v[0], v[1])).abs() < 1e-13);
        }
    }

    #[test]
    fn left_square_commutes() {
        let f = TrigScalar {
            terms: vec![[1.0, 2.0, 1.0, 0.3], [0.4, -1.0, 3.0, 1.1]],
        };
        for p in 1..=5 {
            let a = interp_div_l2(&Curl(&f), p).unwrap().total;
            let b = scalar_curl(&interp_h1(&f, p, InterpOptions::default()).unwrap()).raised(p);
            assert!(
                a.sub(&b).max_abs_coefficient() < 1e-9 * b.max_abs_coefficient(),
                "p={p}"
            );
        }
    }
}
