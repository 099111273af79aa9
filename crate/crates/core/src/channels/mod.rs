//! Quantum channels in Kraus form, with Stinespring dilations, Choi matrices
//! and the parametric families used throughout the crate.
//!
//! Channel equality is decided by the largest entrywise distance between Choi
//! matrices ([`choi_distance`]), with [`CHANNEL_EQ_TOL`] as threshold.

mod families;
mod stinespring;

pub use families::{
    gad_env_qubit_channel, gad_env_qubit_trace_out, gad_mixture_fit, make_ad, make_erasure,
    make_gad, random_channel, relaxation_unitary, thermal_environment, ChannelSpec, Family,
    MixtureFit,
};
pub use stinespring::StinespringIsometry;

use crate::linalg::{c, ComplexMatrix, DensityMatrix, ZERO};
use crate::{Error, Result};

/// Entrywise tolerance on `Σ E_k† E_k = I`.
pub const COMPLETENESS_TOL: f64 = 1e-12;
/// Choi distance below which two channels are considered equal.
pub const CHANNEL_EQ_TOL: f64 = 1e-10;

/// Completely positive trace-preserving map `ρ ↦ Σ_k E_k ρ E_k†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Takes dimensions from the first operator and checks that all operators
    /// share them and satisfy completeness within [`COMPLETENESS_TOL`].
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| {
            Error::Precondition("a channel needs at least one Kraus operator".into())
        })?;
        let (out_dim, in_dim) = (first.rows(), first.cols());
        if let Some(k) = kraus
            .iter()
            .position(|e| e.rows() != out_dim || e.cols() != in_dim)
        {
            return Err(Error::Dimension(format!(
                "Kraus operator {k} is {}x{}, expected {out_dim}x{in_dim}",
                kraus[k].rows(),
                kraus[k].cols()
            )));
        }
        let ch = Self {
            in_dim,
            out_dim,
            kraus,
        };
        let residual = ch.completeness_residual();
        if residual > COMPLETENESS_TOL {
            return Err(Error::Precondition(format!(
                "Kraus completeness residual {residual:e} exceeds {COMPLETENESS_TOL:e}"
            )));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            in_dim: dim,
            out_dim: dim,
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `max |Σ E_k† E_k − I|`.
    pub fn completeness_residual(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.in_dim, self.in_dim);
        for e in &self.kraus {
            sum = sum.try_add(&(&e.adjoint() * e)).expect("shapes agree");
        }
        sum.max_abs_diff(&ComplexMatrix::identity(self.in_dim))
            .expect("shapes agree")
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        apply(self, rho)
    }
}

/// `Σ_k E_k ρ E_k†`.
pub fn apply(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != ch.in_dim {
        return Err(Error::Dimension(format!(
            "state of dimension {} fed to a channel with input dimension {}",
            rho.dim(),
            ch.in_dim
        )));
    }
    Ok(DensityMatrix::from_trusted(sandwich_sum(
        &ch.kraus,
        rho.matrix(),
    )))
}

/// `(I_R ⊗ Λ)(ρ_RA)` with the channel acting on the second factor.
pub fn apply_to_half(
    ch: &KrausChannel,
    rho_ra: &DensityMatrix,
    dims: (usize, usize),
) -> Result<DensityMatrix> {
    let (dim_r, dim_a) = dims;
    if dim_a != ch.in_dim || dim_r * dim_a != rho_ra.dim() {
        return Err(Error::Dimension(format!(
            "dims ({dim_r}, {dim_a}) do not match a state of dimension {} and channel input {}",
            rho_ra.dim(),
            ch.in_dim
        )));
    }
    if dim_r == 1 {
        return apply(ch, rho_ra);
    }
    let id = ComplexMatrix::identity(dim_r);
    let lifted: Vec<_> = ch.kraus.iter().map(|e| id.kron(e)).collect();
    Ok(DensityMatrix::from_trusted(sandwich_sum(
        &lifted,
        rho_ra.matrix(),
    )))
}

fn sandwich_sum(ops: &[ComplexMatrix], rho: &ComplexMatrix) -> ComplexMatrix {
    let dim = ops[0].rows();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for e in ops {
        let term = &(e * rho) * &e.adjoint();
        out = out.try_add(&term).expect("shapes agree");
    }
    out.hermitian_part()
}

/// `second ∘ first`, Kraus set `{F_j E_k}`.
pub fn compose(second: &KrausChannel, first: &KrausChannel) -> Result<KrausChannel> {
    if first.out_dim != second.in_dim {
        return Err(Error::Dimension(format!(
            "cannot feed output dimension {} into input dimension {}",
            first.out_dim, second.in_dim
        )));
    }
    let kraus = second
        .kraus
        .iter()
        .flat_map(|f| first.kraus.iter().map(move |e| f * e))
        .collect();
    Ok(KrausChannel {
        in_dim: first.in_dim,
        out_dim: second.out_dim,
        kraus,
    })
}

/// `a ⊗ b`, Kraus set `{A_i ⊗ B_j}`.
pub fn tensor_channels(a: &KrausChannel, b: &KrausChannel) -> KrausChannel {
    let kraus = a
        .kraus
        .iter()
        .flat_map(|x| b.kraus.iter().map(move |y| x.kron(y)))
        .collect();
    KrausChannel {
        in_dim: a.in_dim * b.in_dim,
        out_dim: a.out_dim * b.out_dim,
        kraus,
    }
}

/// Channel to the environment of the canonical isometry
/// `V|ψ⟩ = Σ_k E_k|ψ⟩ ⊗ |k⟩`; the Kraus index order fixes the environment basis.
pub fn complementary(ch: &KrausChannel) -> KrausChannel {
    StinespringIsometry::from_kraus(ch).complementary_channel()
}

/// Unnormalized Choi matrix `Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|)`, ordered (input, output).
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    pub in_dim: usize,
    pub out_dim: usize,
    pub matrix: ComplexMatrix,
}

impl ChoiMatrix {
    /// Returns `(min eigenvalue, max |Tr_out C − I|)`.
    pub fn invariant_residuals(&self) -> Result<(f64, f64)> {
        let min = crate::linalg::hermitian_eigenvalues(&self.matrix)?.min();
        let marginal =
            crate::linalg::partial_trace_matrix(&self.matrix, &[self.in_dim, self.out_dim], &[0])?;
        let dev = marginal.max_abs_diff(&ComplexMatrix::identity(self.in_dim))?;
        Ok((min, dev))
    }
}

pub fn choi(ch: &KrausChannel) -> ChoiMatrix {
    let (din, dout) = (ch.in_dim, ch.out_dim);
    let n = din * dout;
    let mut m = ComplexMatrix::zeros(n, n);
    for e in &ch.kraus {
        for i in 0..din {
            for a in 0..dout {
                let x = e[(a, i)];
                if x == ZERO {
                    continue;
                }
                for j in 0..din {
                    for b in 0..dout {
                        m[(i * dout + a, j * dout + b)] += x * e[(b, j)].conj();
                    }
                }
            }
        }
    }
    ChoiMatrix {
        in_dim: din,
        out_dim: dout,
        matrix: m,
    }
}

/// Largest entrywise distance between the Choi matrices of two channels.
pub fn choi_distance(a: &KrausChannel, b: &KrausChannel) -> Result<f64> {
    if a.in_dim != b.in_dim || a.out_dim != b.out_dim {
        return Err(Error::Dimension(format!(
            "channels {}->{} and {}->{} are not comparable",
            a.in_dim, a.out_dim, b.in_dim, b.out_dim
        )));
    }
    choi(a).matrix.max_abs_diff(&choi(b).matrix)
}

pub fn channels_equal(a: &KrausChannel, b: &KrausChannel) -> Result<bool> {
    Ok(choi_distance(a, b)? <= CHANNEL_EQ_TOL)
}

/// Convex combination of channels with equal dimensions.
pub fn mix(weight: f64, a: &KrausChannel, b: &KrausChannel) -> Result<KrausChannel> {
    crate::error::check_range("weight", weight, 0.0, 1.0)?;
    if a.in_dim != b.in_dim || a.out_dim != b.out_dim {
        return Err(Error::Dimension(
            "mixed channels must share dimensions".into(),
        ));
    }
    let wa = c(weight.sqrt());
    let wb = c((1.0 - weight).sqrt());
    let kraus = a
        .kraus
        .iter()
        .map(|e| e.scale(wa))
        .chain(b.kraus.iter().map(|e| e.scale(wb)))
        .collect();
    KrausChannel::new(kraus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::random_density_matrix;
    use crate::linalg::{hermitian_eigenvalues, StateVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(d: &[f64]) -> DensityMatrix {
        DensityMatrix::from_diagonal(d).unwrap()
    }

    fn assert_diag(rho: &DensityMatrix, expected: &[f64], tol: f64) {
        let m = rho.matrix();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let want = if i == j { expected[i] } else { 0.0 };
                assert!(
                    (m[(i, j)] - c(want)).norm() < tol,
                    "entry ({i},{j}) = {} expected {want}",
                    m[(i, j)]
                );
            }
        }
    }

    #[test]
    fn new_rejects_incomplete_and_mismatched() {
        let half = ComplexMatrix::identity(2).scale(c(0.5));
        assert!(matches!(
            KrausChannel::new(vec![half]),
            Err(Error::Precondition(_))
        ));
        assert!(KrausChannel::new(vec![]).is_err());
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::zeros(3, 2);
        assert!(matches!(
            KrausChannel::new(vec![a, b]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn identity_channel_leaves_input_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_density_matrix(3, 3, &mut rng);
        let id = KrausChannel::identity(3);
        assert_eq!(apply(&id, &rho).unwrap(), rho);
        let rho2 = random_density_matrix(6, 6, &mut rng);
        assert_eq!(apply_to_half(&id, &rho2, (2, 3)).unwrap(), rho2);
    }

    #[test]
    fn apply_dimension_mismatch() {
        let ch = make_ad(0.5).unwrap();
        assert!(matches!(
            apply(&ch, &DensityMatrix::maximally_mixed(3)),
            Err(Error::Dimension(_))
        ));
        assert!(apply_to_half(&ch, &DensityMatrix::maximally_mixed(6), (2, 3)).is_err());
        assert!(apply_to_half(&ch, &DensityMatrix::maximally_mixed(6), (2, 2)).is_err());
    }

    #[test]
    fn amplitude_damping_on_maximally_mixed() {
        let out = apply(&make_ad(0.8).unwrap(), &diag(&[0.5, 0.5])).unwrap();
        assert_diag(&out, &[0.6, 0.4], 1e-15);
    }

    #[test]
    fn gad_on_ground_state() {
        let (ch, _) = make_gad(0.6, 0.3).unwrap();
        let out = apply(&ch, &diag(&[1.0, 0.0])).unwrap();
        assert_diag(&out, &[0.88, 0.12], 1e-15);
    }

    #[test]
    fn apply_to_half_on_bell_state() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(vec![c(h), ZERO, ZERO, c(h)])
            .unwrap()
            .density();
        let out = apply_to_half(&make_ad(1.0).unwrap(), &bell, (2, 2)).unwrap();
        assert!(out.matrix().max_abs_diff(bell.matrix()).unwrap() < 1e-15);
        let spec = out.spectrum().unwrap();
        assert!((spec.values()[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn apply_to_half_purified_ad_spectrum() {
        // purification of diag(0.5, 0.5) through AD(0.8): {0.9, 0.1, 0, 0}
        let psi = crate::linalg::purify(&diag(&[0.5, 0.5])).unwrap();
        let out = apply_to_half(&make_ad(0.8).unwrap(), &psi.density(), (2, 2)).unwrap();
        let spec = out.spectrum().unwrap();
        let expect = [0.9, 0.1, 0.0, 0.0];
        for (a, b) in spec.values().iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{:?}", spec);
        }
    }

    #[test]
    fn apply_to_half_factorizes_on_product_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = random_channel(2, 3, 2, 17).unwrap();
        for _ in 0..20 {
            let rho = random_density_matrix(2, 2, &mut rng);
            let sigma = random_density_matrix(2, 2, &mut rng);
            let lhs = apply_to_half(&ch, &rho.tensor(&sigma), (2, 2)).unwrap();
            let rhs = rho.tensor(&apply(&ch, &sigma).unwrap());
            assert!(lhs.matrix().max_abs_diff(rhs.matrix()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn compose_with_identity() {
        let ch = make_gad(0.3, 0.6).unwrap().0;
        let composed = compose(&KrausChannel::identity(2), &ch).unwrap();
        assert!(choi_distance(&composed, &ch).unwrap() <= 1e-14);
        assert!(compose(&make_erasure(0.1).unwrap(), &make_erasure(0.1).unwrap()).is_err());
    }

    #[test]
    fn amplitude_damping_concatenation() {
        let composed = compose(&make_ad(0.8).unwrap(), &make_ad(0.5).unwrap()).unwrap();
        assert!(choi_distance(&composed, &make_ad(0.4).unwrap()).unwrap() <= 1e-12);
        // degrading map at eta = 0.75
        let eta = 0.75;
        let degrade =
            compose(&make_ad((1.0 - eta) / eta).unwrap(), &make_ad(eta).unwrap()).unwrap();
        assert!(choi_distance(&degrade, &make_ad(0.25).unwrap()).unwrap() <= 1e-12);
    }

    #[test]
    fn tensor_channels_structure() {
        let id = tensor_channels(&KrausChannel::identity(2), &KrausChannel::identity(2));
        assert!(choi_distance(&id, &KrausChannel::identity(4)).unwrap() < 1e-15);
        let a = make_gad(0.4, 0.2).unwrap().0;
        let b = make_erasure(0.3).unwrap();
        let ab = tensor_channels(&a, &b);
        assert_eq!(ab.kraus().len(), a.kraus().len() * b.kraus().len());
        assert_eq!((ab.in_dim(), ab.out_dim()), (4, 6));

        let ad = make_ad(0.7).unwrap();
        let both = tensor_channels(&ad, &ad);
        let r1 = diag(&[0.3, 0.7]);
        let r2 = DensityMatrix::maximally_mixed(2);
        let lhs = apply(&both, &r1.tensor(&r2)).unwrap();
        let rhs = apply(&ad, &r1).unwrap().tensor(&apply(&ad, &r2).unwrap());
        assert!(lhs.matrix().max_abs_diff(rhs.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn complementary_of_amplitude_damping() {
        for eta in [0.0, 0.2, 0.5, 0.7, 1.0] {
            let comp = complementary(&make_ad(eta).unwrap());
            assert!(choi_distance(&comp, &make_ad(1.0 - eta).unwrap()).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn complementary_of_identity_is_constant_pure() {
        let comp = complementary(&KrausChannel::identity(2));
        assert_eq!(comp.out_dim(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let out = apply(&comp, &random_density_matrix(2, 2, &mut rng)).unwrap();
        assert!((out.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn double_complement_preserves_output_spectra() {
        let ad = make_ad(0.7).unwrap();
        let back = complementary(&complementary(&ad));
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let rho = random_density_matrix(2, 2, &mut rng);
            let s1 = apply(&ad, &rho).unwrap().spectrum().unwrap();
            let s2 = apply(&back, &rho).unwrap().spectrum().unwrap();
            let mut v2 = s2.into_vec();
            v2.truncate(s1.len());
            for (a, b) in s1.values().iter().zip(&v2) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn choi_of_identity_and_full_damping() {
        let ci = choi(&KrausChannel::identity(2));
        let spec = hermitian_eigenvalues(&ci.matrix).unwrap();
        assert!((spec.values()[0] - 2.0).abs() < 1e-14);
        assert!(spec.values()[1..].iter().all(|v| v.abs() < 1e-14));
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_eq!(ci.matrix[(i, j)], c(1.0));
        }

        let c0 = choi(&make_ad(0.0).unwrap());
        assert_eq!(c0.matrix.diagonal_real(), vec![1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn choi_invariants_for_all_families() {
        let chans = [
            KrausChannel::identity(2),
            make_ad(0.3).unwrap(),
            make_gad(0.6, 0.2).unwrap().0,
            make_erasure(0.4).unwrap(),
            random_channel(2, 3, 3, 9).unwrap(),
        ];
        for ch in &chans {
            let cm = choi(ch);
            assert!((cm.matrix.trace().re - ch.in_dim() as f64).abs() < 1e-12);
            let (min, dev) = cm.invariant_residuals().unwrap();
            assert!(min >= -1e-10 && dev <= 1e-10);
        }
    }

    #[test]
    fn mixing_channels() {
        let a = make_ad(0.4).unwrap();
        let m = mix(1.0, &a, &KrausChannel::identity(2)).unwrap();
        assert!(choi_distance(&m, &a).unwrap() < 1e-15);
        assert!(mix(1.5, &a, &a).is_err());
    }
}
