//! Tangential fields on a meshed surface.

use super::geometry::{dot, piola_divergence, piola_push, pull_vector, scale, sub, Vec3};
use super::mesh::QuadMesh;
use super::space::GlobalRTSpace;
use crate::interp::VectorField;
use crate::refelem::RTFunction;

/// A point of element `element` given by its local coordinates, with the
/// derived physical data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementPoint {
    pub element: usize,
    pub xi: [f64; 2],
    pub patch: usize,
    pub patch_xi: [f64; 2],
    pub x: Vec3,
    pub normal: Vec3,
}

impl ElementPoint {
    pub fn new(mesh: &QuadMesh, element: usize, xi: [f64; 2]) -> Self {
        let el = &mesh.elements()[element];
        Self {
            element,
            xi,
            patch: el.patch,
            patch_xi: mesh.patch_coordinates(element, xi),
            x: el.chart.map(xi),
            normal: el.chart.normal(xi),
        }
    }
}

/// Tangential vector field on the surface with its surface divergence.
pub trait SurfaceField: Sync {
    fn value(&self, pt: &ElementPoint) -> Vec3;
    fn surface_divergence(&self, pt: &ElementPoint) -> f64;
}

/// Tangential part `c - (c.n) n` of a constant vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentialConstant(pub Vec3);

impl SurfaceField for TangentialConstant {
    fn value(&self, pt: &ElementPoint) -> Vec3 {
        sub(self.0, scale(pt.normal, dot(self.0, pt.normal)))
    }

    fn surface_divergence(&self, _pt: &ElementPoint) -> f64 {
        0.0
    }
}

/// Surface field from closures of the physical point and unit normal.
pub struct FnSurfaceField<F, G> {
    pub value: F,
    pub divergence: G,
}

impl<F, G> SurfaceField for FnSurfaceField<F, G>
where
    F: Fn(Vec3, Vec3) -> Vec3 + Sync,
    G: Fn(Vec3, Vec3) -> f64 + Sync,
{
    fn value(&self, pt: &ElementPoint) -> Vec3 {
        (self.value)(pt.x, pt.normal)
    }

    fn surface_divergence(&self, pt: &ElementPoint) -> f64 {
        (self.divergence)(pt.x, pt.normal)
    }
}

/// A member of `X_hp`, evaluable at points of any mesh of the same surface.
pub struct DiscreteField<'a> {
    space: &'a GlobalRTSpace,
    elements: Vec<RTFunction>,
}

impl<'a> DiscreteField<'a> {
    pub fn new(space: &'a GlobalRTSpace, coefficients: &[f64]) -> Self {
        assert_eq!(coefficients.len(), space.dim(), "coefficient vector length");
        let elements = (0..space.mesh().elements().len())
            .map(|j| space.element_function(j, coefficients))
            .collect();
        Self { space, elements }
    }

    fn find(&self, pt: &ElementPoint) -> (usize, [f64; 2]) {
        self.space.mesh().locate(pt.patch, pt.patch_xi)
    }
}

impl SurfaceField for DiscreteField<'_> {
    fn value(&self, pt: &ElementPoint) -> Vec3 {
        let (j, xi) = self.find(pt);
        piola_push(
            &self.space.mesh().elements()[j].chart,
            &self.elements[j],
            xi,
        )
    }

    fn surface_divergence(&self, pt: &ElementPoint) -> f64 {
        let (j, xi) = self.find(pt);
        piola_divergence(
            &self.space.mesh().elements()[j].chart,
            &self.elements[j],
            xi,
        )
    }
}

/// Pullback of a surface field to the reference square of one element:
/// `v(xi) = J DT^+ u(T(xi))`, `div v = J div_G u`.
pub struct Pullback<'a> {
    pub field: &'a dyn SurfaceField,
    pub mesh: &'a QuadMesh,
    pub element: usize,
}

impl VectorField for Pullback<'_> {
    fn value(&self, x: f64, y: f64) -> [f64; 2] {
        let pt = ElementPoint::new(self.mesh, self.element, [x, y]);
        pull_vector(
            &self.mesh.elements()[self.element].chart,
            [x, y],
            self.field.value(&pt),
        )
    }

    fn divergence(&self, x: f64, y: f64) -> f64 {
        let pt = ElementPoint::new(self.mesh, self.element, [x, y]);
        self.mesh.elements()[self.element]
            .chart
            .area_element([x, y])
            * self.field.surface_divergence(&pt)
    }
}
