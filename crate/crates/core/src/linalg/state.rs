use num_complex::Complex64;

use super::{
    c, hermitian_eigen, hermitian_eigenvalues, ComplexMatrix, Spectrum, HERMITIAN_TOL, PSD_TOL,
    TRACE_TOL, ZERO,
};
use crate::{Error, Result};

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity (see the tolerances in
    /// [`crate::linalg`]).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "{}x{} matrix is not square",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "Hermiticity defect {defect:e} exceeds {HERMITIAN_TOL:e}"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace {tr} differs from 1 by more than {TRACE_TOL:e}"
            )));
        }
        let matrix = matrix.hermitian_part();
        let min = hermitian_eigenvalues(&matrix)?.min();
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "smallest eigenvalue {min:e} is below -{PSD_TOL:e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn from_diagonal(probabilities: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_diagonal(probabilities))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(c(1.0 / dim as f64)),
        }
    }

    /// Internal constructor for results that are valid by construction.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self {
            matrix: matrix.hermitian_part(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self {
            matrix: self.matrix.kron(&other.matrix),
        }
    }
}

/// Unit-norm pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Dimension("state vector must be non-empty".into()));
        }
        let norm2: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "squared norm {norm2} differs from 1 by more than {TRACE_TOL:e}"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales an arbitrary non-zero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = c(1.0);
        Self { amplitudes }
    }

    pub(crate) fn from_trusted(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(ComplexMatrix::outer(&self.amplitudes, &self.amplitudes))
    }

    /// `Tr_{not keep} |ψ⟩⟨ψ|` evaluated directly from the amplitudes.
    pub fn reduced(&self, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
        let layout = Layout::new(dims, keep, self.dim())?;
        let k = layout.kept_offsets.len();
        let mut out = ComplexMatrix::zeros(k, k);
        for (r, &or) in layout.kept_offsets.iter().enumerate() {
            for (s, &os) in layout.kept_offsets.iter().enumerate().skip(r) {
                let mut acc = ZERO;
                for &ot in &layout.traced_offsets {
                    acc += self.amplitudes[or + ot] * self.amplitudes[os + ot].conj();
                }
                out[(r, s)] = acc;
                out[(s, r)] = acc.conj();
            }
        }
        Ok(DensityMatrix::from_trusted(out))
    }
}

/// Index bookkeeping for reductions over a row-major tensor layout.
struct Layout {
    kept_offsets: Vec<usize>,
    traced_offsets: Vec<usize>,
}

impl Layout {
    fn new(dims: &[usize], keep: &[usize], total: usize) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Dimension(format!("invalid subsystem dims {dims:?}")));
        }
        let product: usize = dims.iter().product();
        if product != total {
            return Err(Error::Dimension(format!(
                "subsystem dims {dims:?} multiply to {product}, state has dimension {total}"
            )));
        }
        if keep.is_empty() {
            return Err(Error::Precondition("keep set must be non-empty".into()));
        }
        let mut kept = vec![false; dims.len()];
        for &k in keep {
            if k >= dims.len() {
                return Err(Error::Dimension(format!(
                    "subsystem index {k} out of range for {} subsystems",
                    dims.len()
                )));
            }
            if kept[k] {
                return Err(Error::Precondition(format!("subsystem {k} listed twice")));
            }
            kept[k] = true;
        }

        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let offsets = |select: bool| {
            let mut acc = vec![0usize];
            for (i, &d) in dims.iter().enumerate() {
                if kept[i] != select {
                    continue;
                }
                let stride = strides[i];
                acc = acc
                    .iter()
                    .flat_map(|&base| (0..d).map(move |x| base + x * stride))
                    .collect();
            }
            acc
        };
        Ok(Self {
            kept_offsets: offsets(true),
            traced_offsets: offsets(false),
        })
    }
}

/// Partial trace of an arbitrary square matrix; kept subsystems stay in
/// ascending index order.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension(
            "partial trace needs a square matrix".into(),
        ));
    }
    let layout = Layout::new(dims, keep, m.rows())?;
    let k = layout.kept_offsets.len();
    let mut out = ComplexMatrix::zeros(k, k);
    for (r, &or) in layout.kept_offsets.iter().enumerate() {
        for (s, &os) in layout.kept_offsets.iter().enumerate() {
            out[(r, s)] = layout
                .traced_offsets
                .iter()
                .map(|&ot| m[(or + ot, os + ot)])
                .sum();
        }
    }
    Ok(out)
}

pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    partial_trace_matrix(rho.matrix(), dims, keep).map(DensityMatrix::from_trusted)
}

/// Purification on `reference ⊗ system` (reference first, same dimension as
/// `rho`): `|ψ⟩ = Σ_i √λ_i |i⟩ ⊗ |v_i⟩` from the eigendecomposition, with
/// Schmidt coefficients in descending order.
pub fn purify(rho: &DensityMatrix) -> Result<StateVector> {
    let d = rho.dim();
    let eig = hermitian_eigen(rho.matrix())?;
    let mut amplitudes = vec![ZERO; d * d];
    for (i, &lambda) in eig.values.values().iter().enumerate() {
        let weight = lambda.max(0.0).sqrt();
        if weight == 0.0 {
            continue;
        }
        for j in 0..d {
            amplitudes[i * d + j] = eig.vectors[(j, i)] * weight;
        }
    }
    StateVector::normalized(amplitudes)
}

/// Schmidt coefficients of a bipartite pure state, descending.
pub fn schmidt_coefficients(psi: &StateVector, dims: (usize, usize)) -> Result<Vec<f64>> {
    let first = psi.reduced(&[dims.0, dims.1], &[0])?;
    Ok(first
        .spectrum()?
        .values()
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::new(vec![c(h), ZERO, ZERO, c(h)]).unwrap()
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::from_diagonal(&[0.5, 0.5]).is_ok());
        assert!(matches!(
            DensityMatrix::from_diagonal(&[0.5, 0.6]),
            Err(Error::InvalidState(_))
        ));
        assert!(matches!(
            DensityMatrix::from_diagonal(&[1.5, -0.5]),
            Err(Error::InvalidState(msg)) if msg.contains("eigenvalue")
        ));
        let skew = ComplexMatrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
        assert!(DensityMatrix::new(skew).is_err());
        // drift within tolerance is accepted
        assert!(DensityMatrix::from_diagonal(&[1.0 + 1e-11, -1e-11]).is_ok());
    }

    #[test]
    fn trace_of_product_state() {
        let rho = DensityMatrix::from_diagonal(&[0.2, 0.8]).unwrap();
        let sigma = DensityMatrix::maximally_mixed(3);
        let joint = rho.tensor(&sigma);
        let back = partial_trace(&joint, &[2, 3], &[0]).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()).unwrap() < 1e-14);
        let other = partial_trace(&joint, &[2, 3], &[1]).unwrap();
        assert!(other.matrix().max_abs_diff(sigma.matrix()).unwrap() < 1e-14);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = bell().density();
        let half = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        let target = DensityMatrix::maximally_mixed(2);
        assert!(half.matrix().max_abs_diff(target.matrix()).unwrap() < 1e-15);
        let direct = bell().reduced(&[2, 2], &[1]).unwrap();
        assert!(direct.matrix().max_abs_diff(target.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn partial_trace_dimension_errors() {
        let rho = DensityMatrix::maximally_mixed(4);
        assert!(matches!(
            partial_trace(&rho, &[2, 3], &[0]),
            Err(Error::Dimension(_))
        ));
        assert!(partial_trace(&rho, &[2, 2], &[]).is_err());
        assert!(partial_trace(&rho, &[2, 2], &[2]).is_err());
        assert!(partial_trace(&rho, &[2, 2], &[0, 0]).is_err());
    }

    #[test]
    fn keep_order_is_ascending_subsystem_order() {
        // |0><0| (x) I/2 (x) |1><1| keeping {2, 0} gives |0><0| (x) |1><1|
        let a = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let b = DensityMatrix::maximally_mixed(2);
        let d = DensityMatrix::from_diagonal(&[0.0, 1.0]).unwrap();
        let joint = a.tensor(&b).tensor(&d);
        let out = partial_trace(&joint, &[2, 2, 2], &[2, 0]).unwrap();
        assert_eq!(out.matrix().diagonal_real(), vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn purify_pure_state() {
        let rho = DensityMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let psi = purify(&rho).unwrap();
        assert_eq!(psi.amplitudes(), &[c(1.0), ZERO, ZERO, ZERO]);
    }

    #[test]
    fn purify_maximally_mixed() {
        let psi = purify(&DensityMatrix::maximally_mixed(2)).unwrap();
        let s = schmidt_coefficients(&psi, (2, 2)).unwrap();
        for x in s {
            assert!((x - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(psi.amplitudes()[0].re - h < 1e-15 && psi.amplitudes()[3].re - h < 1e-15);
    }

    #[test]
    fn purify_schmidt_coefficients() {
        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        let psi = purify(&rho).unwrap();
        let s = schmidt_coefficients(&psi, (2, 2)).unwrap();
        assert!((s[0] - 0.75f64.sqrt()).abs() < 1e-12);
        assert!((s[1] - 0.5).abs() < 1e-12);
        let back = psi.reduced(&[2, 2], &[1]).unwrap();
        assert!(back.matrix().max_abs_diff(rho.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn state_vector_validation() {
        assert!(StateVector::new(vec![c(1.0), c(1.0)]).is_err());
        assert!(StateVector::normalized(vec![ZERO, ZERO]).is_err());
        let s = StateVector::normalized(vec![c(3.0), c(4.0)]).unwrap();
        assert!((s.amplitudes()[0].re - 0.6).abs() < 1e-15);
    }
}
