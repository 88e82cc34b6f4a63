use super::Blend;
use crate::fracform::{expand_edge, EdgeModeSpectrum, FracKind, FracWeightTable};
use crate::linalg::checked_cholesky;
use crate::refelem::{legendre, Edge, LegendreSeries, TensorPolynomial};
use crate::Result;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::projection::CONDITION_LIMIT;

/// tilde H^{1/2} edge projection onto `span{l_2, .., l_p}`.
#[derive(Debug, Clone)]
pub(crate) struct EdgeProjector {
    order: usize,
    truncation: usize,
    /// Sine coefficients of the edge bubbles, one column each.
    spectra: DMatrix<f64>,
    weights: DVector<f64>,
    cholesky: Option<Cholesky<f64, Dyn>>,
}

impl EdgeProjector {
    pub(crate) fn new(order: usize, truncation: usize) -> Result<Self> {
        let nb = order.saturating_sub(1);
        let mut spectra = DMatrix::zeros(truncation, nb);
        for k in 0..nb {
            let l = legendre::lobatto(k + 2);
            let s = expand_edge(|x| legendre::eval_series(&l, x), Edge::Bottom, truncation)?;
            spectra.column_mut(k).copy_from_slice(s.coefficients());
        }
        let table = FracWeightTable::new(FracKind::TildeH12Edge, truncation);
        let weights = DVector::from_row_slice(table.weights());
        let cholesky = if nb > 0 {
            let weighted = DMatrix::from_fn(truncation, nb, |r, k| weights[r] * spectra[(r, k)]);
            Some(checked_cholesky(
                &(spectra.transpose() * weighted),
                CONDITION_LIMIT,
            )?)
        } else {
            None
        };
        Ok(Self {
            order,
            truncation,
            spectra,
            weights,
            cholesky,
        })
    }

    /// Projection of `g` (vanishing at both ends) as a degree-`p` series.
    pub(crate) fn project(
        &self,
        edge: Edge,
        g: impl Fn(f64) -> f64,
    ) -> Result<(EdgeModeSpectrum, LegendreSeries)> {
        let spec = expand_edge(g, edge, self.truncation)?;
        let mut coeffs = vec![0.0; self.order + 1];
        if let Some(ch) = &self.cholesky {
            let w = DVector::from_fn(self.truncation, |i, _| {
                self.weights[i] * spec.coefficients()[i]
            });
            let alpha = ch.solve(&(self.spectra.transpose() * w));
            for (k, a) in alpha.iter().enumerate() {
                for (i, c) in legendre::lobatto(k + 2).into_iter().enumerate() {
                    coeffs[i] += a * c;
                }
            }
        }
        Ok((spec, LegendreSeries::new(coeffs)))
    }
}

fn blend_series(blend: Blend) -> Vec<f64> {
    match blend {
        Blend::Linear => legendre::one_minus_x(),
        Blend::Quadratic => {
            let r3 = 3f64.sqrt();
            vec![1.0 / 3.0, -1.0 / (2.0 * r3), 1.0 / (6.0 * 5f64.sqrt())]
        }
    }
}

/// `psi(s) b(t)` in the edge coordinates of `edge`, as a polynomial of
/// degrees at most `(p, p)`.
pub(crate) fn extension(
    edge: Edge,
    psi: &LegendreSeries,
    blend: Blend,
    p: usize,
) -> Result<TensorPolynomial> {
    let b = blend_series(blend);
    let s = psi.coefficients();
    let poly = match edge {
        Edge::Bottom => TensorPolynomial::outer(s, &b),
        Edge::Right => TensorPolynomial::outer(&legendre::reflect(&b), s),
        Edge::Top => TensorPolynomial::outer(&legendre::reflect(s), &legendre::reflect(&b)),
        Edge::Left => TensorPolynomial::outer(&b, &legendre::reflect(s)),
    };
    poly.with_degrees(p, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_blend_series() {
        for &x in &[0.0, 0.3, 1.0] {
            assert!(
                (legendre::eval_series(&blend_series(Blend::Quadratic), x) - (1.0 - x).powi(2))
                    .abs()
                    < 1e-14
            );
        }
    }

    #[test]
    fn extension_matches_edge_and_vanishes_elsewhere() {
        let psi = LegendreSeries::new({
            let mut c = legendre::lobatto(2);
            for (i, v) in legendre::lobatto(3).into_iter().enumerate() {
                if i < c.len() {
                    c[i] += 0.5 * v;
                } else {
                    c.push(0.5 * v);
                }
            }
            c
        });
        for blend in [Blend::Linear, Blend::Quadratic] {
            for e in Edge::ALL {
                let ext = extension(e, &psi, blend, 4).unwrap();
                for f in Edge::ALL {
                    for &s in &[0.0, 0.2, 0.5, 0.9, 1.0] {
                        let x = f.point(s);
                        let expect = if f == e { psi.eval(s) } else { 0.0 };
                        assert!((ext.eval(x[0], x[1]) - expect).abs() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn projector_is_identity_on_bubbles() {
        let pr = EdgeProjector::new(4, 64).unwrap();
        let l3 = legendre::lobatto(3);
        let (_, s) = pr
            .project(Edge::Left, |x| legendre::eval_series(&l3, x))
            .unwrap();
        for &x in &[0.1, 0.6] {
            assert!((s.eval(x) - legendre::eval_series(&l3, x)).abs() < 1e-12);
        }
        let pr1 = EdgeProjector::new(1, 16).unwrap();
        let (_, s) = pr1.project(Edge::Top, |x| x * (1.0 - x)).unwrap();
        assert_eq!(s.scale(), 0.0);
    }
}
