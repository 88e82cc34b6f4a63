//! hp-version Galerkin boundary elements for the electric field integral
//! equation on piecewise-plane surfaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`refelem`]: tensor Legendre polynomials, Raviart-Thomas spaces and
//!   quadrature on the reference square `K = (0,1)^2`.
//! * [`fracform`]: fractional Sobolev inner products on `K` and its edges,
//!   realised as diagonal forms on sine/cosine mode expansions, plus a
//!   finite-difference oracle solving the defining extension problems.
//! * [`interp`]: L2 and tilde-H^{-1/2} projections, the H1 and H(div)
//!   projection-based interpolants and the discrete inf-sup constant.
//! * [`surface`]: piecewise-plane surfaces, quadrilateral meshes, Piola
//!   transforms, the global RT space and its discrete Helmholtz splitting.
//! * [`efie`]: Galerkin assembly and dense solution of the EFIE.

pub mod efie;
mod error;
pub mod fracform;
pub mod interp;
pub mod linalg;
pub mod refelem;
pub mod surface;

pub use error::{Error, Result};
