//! Coherent and reverse coherent information of small quantum channels.
//!
//! The crate is layered bottom-up:
//!
//! - [`linalg`]: dense complex matrices, a cyclic Jacobi Hermitian eigensolver,
//!   tensor products, partial traces and purification.
//! - [`channels`]: Kraus channels, Stinespring isometries, Choi matrices and the
//!   amplitude damping, generalized amplitude damping and erasure families.
//! - [`qinfo`]: entropies and the diagonalization-based ("generic") evaluation of
//!   coherent and reverse coherent information.
//! - [`closedform`]: analytic eigenvalues, entropies and θ-derivatives for the
//!   amplitude damping families, checked against the generic path.
//! - [`capacity`]: single-letter optimizers, curve and threshold sweeps,
//!   (anti)degradability witnesses and additivity / data-processing probes.
//! - [`verify`] and [`cli`]: verification suites and the `revcap` command line.

pub mod capacity;
pub mod channels;
pub mod cli;
pub mod closedform;
mod error;
pub mod linalg;
pub mod output;
pub mod qinfo;
pub mod verify;

pub use error::{Error, Result};
