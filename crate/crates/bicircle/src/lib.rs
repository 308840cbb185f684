//! Positive linear functionals on the bicircle.
//!
//! The crate builds doubly Toeplitz moment matrices, the two families of bivariate
//! orthonormal polynomials (lexicographic and reverse lexicographic), their recurrence
//! coefficients, the level-by-level parameter synthesis of a positive definite functional,
//! and the two-variable Fejér–Riesz factorization of positive trigonometric polynomials.

pub mod error;
pub mod matrix;
pub mod moments;
pub mod poly;
pub mod orthopoly;
pub mod synthesis;
pub mod closed_forms;
pub mod opuc;
pub mod fejer_riesz;
pub mod io;
