//! Seeded random matrices and states for sampling-based checks.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{c, ComplexMatrix, DensityMatrix, StateVector};

/// Standard complex Gaussian sample (independent N(0, 1) real and imaginary parts).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(i, i)] = c(rng.sample(StandardNormal));
        for j in (i + 1)..dim {
            let z = complex_gaussian(rng);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StateVector {
    let amps = (0..dim).map(|_| complex_gaussian(rng)).collect();
    StateVector::normalized(amps).expect("Gaussian vector is non-zero")
}

/// Random mixed state `G G† / Tr(G G†)` from a `dim × rank` Ginibre matrix.
pub fn random_density_matrix<R: Rng + ?Sized>(
    dim: usize,
    rank: usize,
    rng: &mut R,
) -> DensityMatrix {
    let g = ComplexMatrix::from_vec(
        dim,
        rank.max(1),
        (0..dim * rank.max(1))
            .map(|_| complex_gaussian(rng))
            .collect(),
    )
    .expect("shape is consistent");
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    DensityMatrix::from_trusted(gg.scale(c(1.0 / tr)))
}
