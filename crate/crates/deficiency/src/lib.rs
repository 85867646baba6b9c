//! Deficiency indices of powers, products and polynomials of closed symmetric
//! operators, checked against concrete Sturm–Liouville expressions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod expr;
pub mod index;
pub mod jet;
pub mod lg;
pub mod params;
pub mod pde;
pub mod poly;
pub mod stirling;
pub mod symbolic;
pub mod verify;
pub mod weyl;

pub use index::{DefectPair, ExtendedCount, ExtendedIndex, FredholmClass, FredholmKind};
pub use poly::RealPolynomial;
