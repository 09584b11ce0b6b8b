//! Exact matrix calculus for commutative nil graded algebras.
//!
//! A strictly lower triangular matrix `T` over a field encodes the algebra
//! generated by `X_1, ..., X_n` subject to `X_1^2 = 0` and
//! `X_i^2 = Σ_{j<i} t_ij X_j X_i`. Elementary triangular operations act on
//! such matrices without changing the isomorphism class of the algebra.

pub mod field;
pub mod tmatrix;

pub use field::{Field, FieldError, Scalar};
pub use tmatrix::{Interval, MatrixError, Slt, Wall};
pub mod eto;
pub mod classify4;
pub mod algebra;
