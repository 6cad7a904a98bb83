//! Order reduction of four classes of second-order nonlinear ODEs by
//! variation of parameters, with closed-form first-order solvers and an
//! independent numeric verifier.

pub mod classes;
pub mod error;
pub mod expr;
pub mod reduction;
pub mod solvers;
pub mod special;
pub mod verify;
