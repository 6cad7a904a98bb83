//! Numeric primitives: Jacobi elliptic functions, adaptive quadrature,
//! bracketed scalar root finding.

mod jacobi;
mod quad;
mod roots;

pub use jacobi::{elliptic_f, jacobi, JacobiTriple};
pub use quad::{quad_adaptive, MAX_DEPTH};
pub use roots::find_root;
