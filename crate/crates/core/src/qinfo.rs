//! Entropies and the generic evaluation of coherent and reverse coherent
//! information: purify the input, send the second factor through the channel,
//! diagonalize. Logarithms are base 2 throughout.

use std::fmt;

use crate::channels::{apply_to_half, KrausChannel, StinespringIsometry};
use crate::error::check_range;
use crate::linalg::{
    hermitian_eigenvalues, partial_trace, purify, DensityMatrix, StateVector, PSD_TOL, ZERO,
};
use crate::{Error, Result};

/// Probabilities below this contribute nothing to an entropy.
const ZERO_PROB: f64 = 1e-15;
const NORMALIZATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    /// Coherent information `S(B) − S(RB)`.
    Ci,
    /// Reverse coherent information `S(R) − S(RB)`.
    Rci,
}

impl Measure {
    pub const BOTH: [Measure; 2] = [Measure::Ci, Measure::Rci];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Ci => "ci",
            Measure::Rci => "rci",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Generic,
    ClosedForm,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Generic => "generic",
            Method::ClosedForm => "closed",
        }
    }
}

/// An information quantity in bits, tagged with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfoValue {
    pub value: f64,
    pub method: Method,
}

fn xlog2x(x: f64) -> f64 {
    if x < ZERO_PROB {
        0.0
    } else {
        x * x.log2()
    }
}

pub fn binary_entropy(x: f64) -> Result<f64> {
    check_range("x", x, 0.0, 1.0)?;
    Ok(-xlog2x(x) - xlog2x(1.0 - x))
}

/// Entries in `[−1e-10, 0)` are treated as zero.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    if let Some(bad) = p.iter().find(|&&x| !(x >= -PSD_TOL)) {
        return Err(Error::InvalidState(format!(
            "probability {bad:e} below -{PSD_TOL:e}"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidState(format!(
            "probabilities sum to {sum}, not 1"
        )));
    }
    Ok(-p.iter().map(|&x| xlog2x(x.max(0.0))).sum::<f64>())
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    shannon_entropy(rho.spectrum()?.values())
}

/// A state on a two-party system, first factor slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    state: DensityMatrix,
    dims: (usize, usize),
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, dims: (usize, usize)) -> Result<Self> {
        if dims.0 * dims.1 != state.dim() {
            return Err(Error::Dimension(format!(
                "dims {dims:?} do not multiply to {}",
                state.dim()
            )));
        }
        Ok(Self { state, dims })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn first(&self) -> Result<DensityMatrix> {
        partial_trace(&self.state, &[self.dims.0, self.dims.1], &[0])
    }

    pub fn second(&self) -> Result<DensityMatrix> {
        partial_trace(&self.state, &[self.dims.0, self.dims.1], &[1])
    }

    /// `(S(first), S(second), S(joint))`.
    pub fn entropies(&self) -> Result<Entropies> {
        Ok(Entropies {
            first: von_neumann_entropy(&self.first()?)?,
            second: von_neumann_entropy(&self.second()?)?,
            joint: von_neumann_entropy(&self.state)?,
        })
    }
}

/// Marginal and joint entropies of a [`BipartiteState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entropies {
    pub first: f64,
    pub second: f64,
    pub joint: f64,
}

impl Entropies {
    pub fn coherent(&self) -> f64 {
        self.second - self.joint
    }

    pub fn reverse_coherent(&self) -> f64 {
        self.first - self.joint
    }

    pub fn measure(&self, m: Measure) -> f64 {
        match m {
            Measure::Ci => self.coherent(),
            Measure::Rci => self.reverse_coherent(),
        }
    }
}

pub fn mutual_information(rho: &BipartiteState) -> Result<f64> {
    let s = rho.entropies()?;
    Ok(s.first + s.second - s.joint)
}

/// `ρ_RB = (I ⊗ Λ)(|ψ⟩⟨ψ|_RA)` with `|ψ⟩ = purify(ρ_A)`.
pub fn joint_state(ch: &KrausChannel, rho_a: &DensityMatrix) -> Result<BipartiteState> {
    check_input(ch, rho_a)?;
    let psi = purify(rho_a)?;
    joint_state_from_purification(ch, &psi, rho_a.dim())
}

/// Same as [`joint_state`] for a caller-supplied purification with
/// reference dimension `dim_r`.
pub fn joint_state_from_purification(
    ch: &KrausChannel,
    psi: &StateVector,
    dim_r: usize,
) -> Result<BipartiteState> {
    let dims = (dim_r, ch.in_dim());
    if dim_r * ch.in_dim() != psi.dim() {
        return Err(Error::Dimension(format!(
            "purification of dimension {} does not split as {dim_r} x {}",
            psi.dim(),
            ch.in_dim()
        )));
    }
    let out = apply_to_half(ch, &psi.density(), dims)?;
    BipartiteState::new(out, (dim_r, ch.out_dim()))
}

fn check_input(ch: &KrausChannel, rho_a: &DensityMatrix) -> Result<()> {
    if rho_a.dim() != ch.in_dim() {
        return Err(Error::Dimension(format!(
            "input of dimension {} for a channel with input dimension {}",
            rho_a.dim(),
            ch.in_dim()
        )));
    }
    Ok(())
}

/// Entropies `S(R), S(B), S(RB)` of the joint output, from one purification.
pub fn output_entropies(ch: &KrausChannel, rho_a: &DensityMatrix) -> Result<Entropies> {
    joint_state(ch, rho_a)?.entropies()
}

pub fn information(ch: &KrausChannel, rho_a: &DensityMatrix, m: Measure) -> Result<InfoValue> {
    Ok(InfoValue {
        value: output_entropies(ch, rho_a)?.measure(m),
        method: Method::Generic,
    })
}

/// `I = S(B) − S(RB)`.
pub fn coherent_information(ch: &KrausChannel, rho_a: &DensityMatrix) -> Result<InfoValue> {
    information(ch, rho_a, Measure::Ci)
}

/// `I_R = S(R) − S(RB)`.
pub fn reverse_coherent_information(ch: &KrausChannel, rho_a: &DensityMatrix) -> Result<InfoValue> {
    information(ch, rho_a, Measure::Rci)
}

/// `I_R = S(BE) − S(E)` on the pure state `(I ⊗ V)|ψ⟩_RA` built from the
/// canonical isometry.
pub fn rci_via_environment(ch: &KrausChannel, rho_a: &DensityMatrix) -> Result<InfoValue> {
    check_input(ch, rho_a)?;
    let psi = purify(rho_a)?;
    let iso = StinespringIsometry::from_kraus(ch);
    let phi = dilate(&iso, &psi, rho_a.dim());
    let dims = [rho_a.dim(), iso.out_dim(), iso.env_dim()];
    let s_be = von_neumann_entropy(&phi.reduced(&dims, &[1, 2])?)?;
    let s_e = von_neumann_entropy(&phi.reduced(&dims, &[2])?)?;
    Ok(InfoValue {
        value: s_be - s_e,
        method: Method::Generic,
    })
}

/// `(I_R ⊗ V)|ψ⟩` on R ⊗ B ⊗ E.
fn dilate(iso: &StinespringIsometry, psi: &StateVector, dim_r: usize) -> StateVector {
    let v = iso.matrix();
    let (din, rows) = (iso.in_dim(), v.rows());
    let amps = psi.amplitudes();
    let mut out = vec![ZERO; dim_r * rows];
    for r in 0..dim_r {
        for row in 0..rows {
            out[r * rows + row] = (0..din).map(|i| v[(row, i)] * amps[r * din + i]).sum();
        }
    }
    StateVector::from_trusted(out)
}

/// Entropy of the spectrum of a Hermitian operator that is already known to
/// be a density matrix, e.g. one assembled from closed-form blocks.
pub fn entropy_of_matrix(m: &crate::linalg::ComplexMatrix) -> Result<f64> {
    shannon_entropy(hermitian_eigenvalues(m)?.values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{make_ad, make_erasure, make_gad, random_channel};
    use crate::linalg::random::random_density_matrix;
    use crate::linalg::{c, ComplexMatrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(d: &[f64]) -> DensityMatrix {
        DensityMatrix::from_diagonal(d).unwrap()
    }

    fn h(x: f64) -> f64 {
        binary_entropy(x).unwrap()
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(h(0.0), 0.0);
        assert_eq!(h(1.0), 0.0);
        assert!((h(0.5) - 1.0).abs() < 1e-15);
        let direct = -0.3 * 0.3f64.log2() - 0.7 * 0.7f64.log2();
        assert!((h(0.3) - direct).abs() < 1e-15);
        assert!((h(0.3) - 0.881291).abs() < 1e-6);
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn shannon_entropy_values() {
        assert_eq!(shannon_entropy(&[1.0, 0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!((shannon_entropy(&[0.25; 4]).unwrap() - 2.0).abs() < 1e-15);
        assert!((shannon_entropy(&[0.5, 0.25, 0.125, 0.125]).unwrap() - 1.75).abs() < 1e-15);
        assert_eq!(shannon_entropy(&[1.0, -5e-11]).unwrap(), 0.0);
        assert!(shannon_entropy(&[1.1, -0.1]).is_err());
        assert!(shannon_entropy(&[0.5, 0.4]).is_err());
    }

    #[test]
    fn von_neumann_values() {
        assert!(von_neumann_entropy(&diag(&[1.0, 0.0])).unwrap().abs() < 1e-15);
        assert!(
            (von_neumann_entropy(&DensityMatrix::maximally_mixed(2)).unwrap() - 1.0).abs() < 1e-14
        );
        assert!((von_neumann_entropy(&diag(&[0.25, 0.75])).unwrap() - h(0.25)).abs() < 1e-14);
        let plus = DensityMatrix::new(ComplexMatrix::from_real(2, 2, &[0.5; 4]).unwrap()).unwrap();
        assert!(von_neumann_entropy(&plus).unwrap().abs() < 1e-12);
    }

    #[test]
    fn mutual_information_values() {
        let prod =
            BipartiteState::new(diag(&[0.3, 0.7]).tensor(&diag(&[0.6, 0.4])), (2, 2)).unwrap();
        assert!(mutual_information(&prod).unwrap().abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::new(vec![c(s), ZERO, ZERO, c(s)])
            .unwrap()
            .density();
        let bell = BipartiteState::new(bell, (2, 2)).unwrap();
        assert!((mutual_information(&bell).unwrap() - 2.0).abs() < 1e-12);

        let rb = joint_state(&make_ad(0.8).unwrap(), &diag(&[0.5, 0.5])).unwrap();
        let expected = 1.0 + h(0.4) - h(0.1);
        assert!((mutual_information(&rb).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 1.501955).abs() < 1e-6);
        assert!(BipartiteState::new(diag(&[0.5, 0.5]), (2, 2)).is_err());
    }

    #[test]
    fn joint_state_examples() {
        let pure = diag(&[0.0, 1.0]);
        let st = joint_state(&KrausChannel::identity(2), &pure).unwrap();
        assert!(von_neumann_entropy(st.state()).unwrap().abs() < 1e-12);

        let (eta, p) = (0.7, 0.35);
        let st = joint_state(&make_ad(eta).unwrap(), &diag(&[1.0 - p, p])).unwrap();
        let spec = st.state().spectrum().unwrap();
        let a = (1.0 - 2.0 * (1.0 - eta) * p).powi(2);
        let expect = [(1.0 + a.sqrt()) / 2.0, (1.0 - a.sqrt()) / 2.0, 0.0, 0.0];
        for (x, y) in spec.values().iter().zip(expect) {
            assert!((x - y).abs() < 1e-12);
        }

        let eps = 0.3;
        let st = joint_state(
            &make_erasure(eps).unwrap(),
            &DensityMatrix::maximally_mixed(2),
        )
        .unwrap();
        assert_eq!(st.dims(), (2, 3));
        let s_rb = von_neumann_entropy(st.state()).unwrap();
        assert!((s_rb - (h(eps) + eps)).abs() < 1e-12);
        assert!(joint_state(
            &make_erasure(eps).unwrap(),
            &DensityMatrix::maximally_mixed(3)
        )
        .is_err());
    }

    #[test]
    fn coherent_information_examples() {
        let ci = coherent_information(
            &KrausChannel::identity(2),
            &DensityMatrix::maximally_mixed(2),
        )
        .unwrap();
        assert!((ci.value - 1.0).abs() < 1e-12);
        assert_eq!(ci.method, Method::Generic);
        let ci = coherent_information(&make_ad(0.8).unwrap(), &diag(&[0.5, 0.5])).unwrap();
        assert!((ci.value - (h(0.4) - h(0.1))).abs() < 1e-12);
        for p in [0.1, 0.4, 0.9] {
            let ci = coherent_information(&make_ad(0.5).unwrap(), &diag(&[1.0 - p, p])).unwrap();
            assert!(ci.value.abs() < 1e-12);
        }
    }

    #[test]
    fn reverse_coherent_information_examples() {
        let r = reverse_coherent_information(
            &KrausChannel::identity(2),
            &DensityMatrix::maximally_mixed(2),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = reverse_coherent_information(&make_ad(0.5).unwrap(), &diag(&[0.5, 0.5])).unwrap();
        assert!((r.value - (1.0 - h(0.25))).abs() < 1e-12);
        assert!((r.value - 0.188722).abs() < 1e-6);
        for p in [0.2, 0.5, 0.8] {
            let r =
                reverse_coherent_information(&make_ad(0.0).unwrap(), &diag(&[1.0 - p, p])).unwrap();
            assert!(r.value.abs() < 1e-12);
        }
    }

    #[test]
    fn environment_form_examples() {
        let r = rci_via_environment(
            &KrausChannel::identity(2),
            &DensityMatrix::maximally_mixed(2),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = rci_via_environment(&make_ad(0.5).unwrap(), &diag(&[0.5, 0.5])).unwrap();
        assert!((r.value - 0.188722).abs() < 1e-6);

        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for seed in 0..100u64 {
            let din = 2 + (seed % 2) as usize;
            let ch = random_channel(din, 2 + (seed % 3) as usize, 1 + (seed % 4) as usize, seed)
                .unwrap_or_else(|_| random_channel(din, 3, 2, seed).unwrap());
            let rho = random_density_matrix(din, din, &mut rng);
            let a = rci_via_environment(&ch, &rho).unwrap().value;
            let b = reverse_coherent_information(&ch, &rho).unwrap().value;
            assert!((a - b).abs() <= 1e-10, "seed {seed}: {a} vs {b}");
        }
    }

    #[test]
    fn gad_joint_reduction_population() {
        let (ch, _) = make_gad(0.7, 0.2).unwrap();
        let st = joint_state(&ch, &diag(&[0.7, 0.3])).unwrap();
        let b = st.second().unwrap();
        assert!((b.matrix()[(1, 1)].re - 0.27).abs() < 1e-12);
        assert!(b.matrix()[(0, 1)].norm() < 1e-14);
        assert!((st.entropies().unwrap().first - h(0.3)).abs() < 1e-12);
    }
}
