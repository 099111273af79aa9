//! Dense complex linear algebra for small systems (dimension ≤ 64).
//!
//! Tensor factors follow the row-major convention: in `A ⊗ B` the leftmost
//! factor carries the slowest-varying index. Every module in the crate
//! inherits this ordering, including partial traces and Kraus/Stinespring
//! layouts.

mod eigen;
mod matrix;
pub mod random;
mod state;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, EigenDecomposition, Spectrum};
pub use matrix::{tensor, ComplexMatrix};
pub use num_complex::Complex64;
pub use state::{
    partial_trace, partial_trace_matrix, purify, schmidt_coefficients, DensityMatrix, StateVector,
};

/// Maximum entrywise deviation `|M − M†|` accepted for a density matrix.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Maximum deviation of a density matrix trace from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in `[−PSD_TOL, 0)` are floating-point drift and clamp to zero;
/// anything more negative is rejected.
pub const PSD_TOL: f64 = 1e-10;
/// Hermiticity tolerance for eigensolver input.
pub const EIGEN_INPUT_TOL: f64 = 1e-10;

pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
