use super::{DivInterpolator, DivNorm, InterpOptions, VectorField};
use crate::Result;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityRow {
    pub p: usize,
    /// `||Pi u||_{L2(K)}`
    pub l2_norm: f64,
    /// `||div Pi u||_{tilde H^{-1/2}(K)}`
    pub div_norm: f64,
    pub total: f64,
}

/// Norms of `Pi^{div,-1/2}_p u` for each `p`.
pub fn stability_scan(
    u: &dyn VectorField,
    ps: &[usize],
    options: InterpOptions,
) -> Result<Vec<StabilityRow>> {
    ps.par_iter()
        .map(|&p| {
            let it = DivInterpolator::new(p, DivNorm::TildeHm12, options)?;
            let r = it.interpolate(u)?;
            let l2_norm = r.total.l2_norm();
            let div_norm = it.div_norm(&r.total.divergence());
            Ok(StabilityRow {
                p,
                l2_norm,
                div_norm,
                total: l2_norm + div_norm,
            })
        })
        .collect()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refelem::rt_basis;

    #[test]
    fn slope_of_power_law() {
        let xs = [2.0, 3.0, 5.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(1.5)).collect();
        assert!((loglog_slope(&xs, &ys) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn polynomial_field_gives_constant_table() {
        let v = rt_basis(2).unwrap()[5].add(&rt_basis(2).unwrap()[9].scaled(0.5));
        let rows = stability_scan(&v, &[2, 3, 5], InterpOptions::default()).unwrap();
        for r in &rows {
            assert!((r.total - rows[0].total).abs() < 1e-9);
        }
    }
}
