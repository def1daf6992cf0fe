//! Symbolic Lie-symmetry machinery for second-order evolution equations
//! `u_t = f(x,u) u_x^2 + g(x,u) u_xx` and related classes.

pub mod classify;
pub mod expr;
pub mod fields;
pub mod jet;
pub mod verify;

pub use expr::{parse, Env, Expr, FunctionSignature};
