//! Piecewise-plane surfaces, quadrilateral meshes with bilinear charts, the
//! Piola transform and the global space `X_hp`.
//!
//! Reference vectors are pushed forward covariantly,
//! `v = (1/J) DT v_hat`, with `J = |d1 T x d2 T|`; this keeps normal fluxes
//! across sides and gives `div_G v = (div v_hat) / J`.

mod field;
mod geometry;
mod helmholtz;
mod interpolate;
mod mesh;
mod patch;
mod space;

pub use field::{
    DiscreteField, ElementPoint, FnSurfaceField, Pullback, SurfaceField, TangentialConstant,
};
pub use geometry::{
    add, cross, distance, dot, norm, piola_divergence, piola_push, pull_vector, push_vector, scale,
    sub, ChartMap, Vec3,
};
pub use helmholtz::{helmholtz_split, l2_gram, DiscreteHelmholtz};
pub use interpolate::{global_interpolate, global_interpolate_with};
pub use mesh::{MeshEdge, MeshElement, MeshQuality, QuadMesh};
pub use patch::{Patch, PiecewisePlaneSurface, UNIT_CUBE, UNIT_SQUARE_SCREEN};
pub use space::{build_mesh, build_mesh_with, BoundaryTreatment, GlobalRTSpace, LocalDof};

use crate::interp::{rt_projection, VectorField};
use crate::refelem::RTFunction;
use crate::Result;

/// Pullback of a physical tangential field on one chart, projected onto
/// `RT_p(K)` in L2(K); exact when the pulled field lies in `RT_p`.
pub fn piola_pull(
    chart: &ChartMap,
    v: &(dyn Fn(Vec3) -> Vec3 + Sync),
    p: usize,
) -> Result<RTFunction> {
    struct Pulled<'a> {
        chart: &'a ChartMap,
        v: &'a (dyn Fn(Vec3) -> Vec3 + Sync),
    }
    impl VectorField for Pulled<'_> {
        fn value(&self, x: f64, y: f64) -> [f64; 2] {
            pull_vector(self.chart, [x, y], (self.v)(self.chart.map([x, y])))
        }
        fn divergence(&self, _x: f64, _y: f64) -> f64 {
            0.0
        }
    }
    if p == 0 {
        return Err(crate::Error::InvalidDegree {
            degree: 0,
            reason: "RT order must be at least 1",
        });
    }
    Ok(rt_projection(&Pulled { chart, v }, p, 2 * p + 8))
}
