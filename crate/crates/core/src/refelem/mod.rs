//! Polynomial spaces, differential operators, traces and quadrature on the
//! reference square `K = (0,1)^2`.
//!
//! All polynomials are stored in the tensor-product basis of orthonormal
//! shifted Legendre polynomials `phi_k(x) = sqrt(2k+1) P_k(2x-1)`, so the
//! L2(K) inner product of two polynomials is the Euclidean product of their
//! coefficient arrays.
//!
//! Edge table (counterclockwise, parameter `s` in `[0,1]`):
//!
//! | edge   | id | start  | end    | point at `s`  | outward normal |
//! |--------|----|--------|--------|---------------|----------------|
//! | Bottom | 1  | (0,0)  | (1,0)  | (s, 0)        | (0, -1)        |
//! | Right  | 2  | (1,0)  | (1,1)  | (1, s)        | (1, 0)         |
//! | Top    | 3  | (1,1)  | (0,1)  | (1-s, 1)      | (0, 1)         |
//! | Left   | 4  | (0,1)  | (0,0)  | (0, 1-s)      | (-1, 0)        |

mod edge;
pub mod legendre;
mod polynomial;
mod quadrature;
mod rt;

pub use edge::{Edge, EdgePolynomial, LegendreSeries};
pub use polynomial::TensorPolynomial;
pub use quadrature::QuadratureRule;
pub use rt::{
    divergence, normal_trace, rt_basis, rt_bubble_basis, rt_dim, rt_edge_function,
    scalar_bubble_basis, scalar_curl, RTFunction,
};
