use super::field::{Pullback, SurfaceField};
use super::space::GlobalRTSpace;
use crate::interp::{DivInterpolator, DivNorm, InterpOptions};
use crate::Result;
use rayon::prelude::*;

/// Element-wise projection-based interpolation into `X_hp`: pull back,
/// interpolate on `K`, glue. Shared dofs that disagree by more than `1e-9`
/// signal a chart or orientation fault and raise a conformity error.
pub fn global_interpolate(u: &dyn SurfaceField, space: &GlobalRTSpace) -> Result<Vec<f64>> {
    global_interpolate_with(u, space, DivNorm::TildeHm12, InterpOptions::default())
}

pub fn global_interpolate_with(
    u: &dyn SurfaceField,
    space: &GlobalRTSpace,
    norm: DivNorm,
    options: InterpOptions,
) -> Result<Vec<f64>> {
    let interp = DivInterpolator::new(space.order(), norm, options)?;
    let mesh = space.mesh();
    let local: Vec<Vec<f64>> = (0..mesh.elements().len())
        .into_par_iter()
        .map(|j| {
            let pulled = Pullback {
                field: u,
                mesh,
                element: j,
            };
            let v = interp.interpolate(&pulled)?;
            Ok(space.local_coordinates(&v.total))
        })
        .collect::<Result<_>>()?;
    space.assemble_local(&local, 1e-9)
}
