//! Desk-scale numerical and exact checks for integrable structures: the
//! trigonometric Ruijsenaars-Schneider model, XXZ transfer matrices and qKZ
//! operators, SL(2) QQ-systems, elliptic RS coefficients, compact ADHM Bethe
//! equations and Dwork congruences.

pub mod algebra;
pub mod dwork;
pub mod elliptic;
pub mod error;
pub mod qq;
pub mod spin_chain;
pub mod trs;

pub use error::{Error, Result};
pub use num_complex::Complex64;
