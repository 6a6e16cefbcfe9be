//! Exact decision procedures for null ideals of 3x3 matrix sets over finite
//! fields.
//!
//! The crate answers one question, whether a finite set `S` of matrices is
//! *core* (its null ideal under right evaluation is two-sided), and provides
//! the machinery around it: conjugacy classes `C(m)` of an irreducible cubic,
//! the derived sets used to classify block Vandermonde matrices, and the
//! invertible-difference graph on `C(m)`.

pub mod classes;
pub mod cli;
pub mod error;
pub mod field;
pub mod graph;
pub mod linalg;
pub mod matpoly;
pub mod vandermonde;

pub use error::{Error, Result};
