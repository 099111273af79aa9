use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{choi, KrausChannel, StinespringIsometry};
use crate::error::check_range;
use crate::linalg::random::complex_gaussian;
use crate::linalg::{c, Complex64, ComplexMatrix, StateVector, ZERO};
use crate::{Error, Result};

/// Amplitude damping: `E_0 = diag(1, √η)`, `E_1 = √(1−η)|0⟩⟨1|`.
pub fn make_ad(eta: f64) -> Result<KrausChannel> {
    check_range("eta", eta, 0.0, 1.0)?;
    let e0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, eta.sqrt()])?;
    let e1 = ComplexMatrix::from_real(2, 2, &[0.0, (1.0 - eta).sqrt(), 0.0, 0.0])?;
    Ok(KrausChannel {
        in_dim: 2,
        out_dim: 2,
        kraus: vec![e0, e1],
    })
}

/// Two-qubit relaxation unitary on (system, environment qubit): a rotation
/// by `γ` with `cos²(γ/2) = η` inside `span{|01⟩, |10⟩}`.
pub fn relaxation_unitary(eta: f64) -> Result<ComplexMatrix> {
    check_range("eta", eta, 0.0, 1.0)?;
    let (s, r) = (eta.sqrt(), (1.0 - eta).sqrt());
    #[rustfmt::skip]
    let u = [
        1.0, 0.0, 0.0, 0.0,
        0.0, s,   r,   0.0,
        0.0, -r,  s,   0.0,
        0.0, 0.0, 0.0, 1.0,
    ];
    ComplexMatrix::from_real(4, 4, &u)
}

/// `√(1−α)|00⟩ + √α|11⟩` on (environment qubit, purifier).
pub fn thermal_environment(alpha: f64) -> Result<StateVector> {
    check_range("alpha", alpha, 0.0, 1.0)?;
    StateVector::new(vec![c((1.0 - alpha).sqrt()), ZERO, ZERO, c(alpha.sqrt())])
}

/// Generalized amplitude damping built from its dilation
/// `V|ψ⟩ = (U ⊗ I)(|ψ⟩ ⊗ |Ψ_α⟩)`, output ordered (B, E1, E2).
pub fn make_gad(eta: f64, alpha: f64) -> Result<(KrausChannel, StinespringIsometry)> {
    let u = relaxation_unitary(eta)?;
    let env = thermal_environment(alpha)?;
    let full = u.kron(&ComplexMatrix::identity(2));
    let mut v = ComplexMatrix::zeros(8, 2);
    for i in 0..2 {
        let mut input = vec![ZERO; 8];
        for (k, amp) in env.amplitudes().iter().enumerate() {
            input[i * 4 + k] = *amp;
        }
        let out = full.mul_vec(&input)?;
        for (row, x) in out.into_iter().enumerate() {
            v[(row, i)] = x;
        }
    }
    let iso = StinespringIsometry::new(v, 2, 4)?;
    Ok((iso.channel(), iso))
}

/// Map from the input to the first environment qubit of the GAD dilation.
///
/// A controlled-Z between the purifier and that qubit is applied before the
/// purifier is discarded. It acts on the environment alone, so the pair of
/// environment qubits carries the same information, and the resulting map is
/// exactly `make_gad(1 − η, α)`.
pub fn gad_env_qubit_channel(eta: f64, alpha: f64) -> Result<KrausChannel> {
    env_qubit(eta, alpha, true)
}

/// The same map with the purifier traced out directly. Its off-diagonal
/// contraction is `(1 − 2α)√(1−η)`, so it is not a GAD channel unless α ∈ {0, 1}.
pub fn gad_env_qubit_trace_out(eta: f64, alpha: f64) -> Result<KrausChannel> {
    env_qubit(eta, alpha, false)
}

fn env_qubit(eta: f64, alpha: f64, controlled_z: bool) -> Result<KrausChannel> {
    let (_, iso) = make_gad(eta, alpha)?;
    let v = iso.matrix();
    let mut kraus = Vec::with_capacity(4);
    for b in 0..2 {
        for e2 in 0..2 {
            let mut k = ComplexMatrix::zeros(2, 2);
            for e1 in 0..2 {
                let sign = if controlled_z && e1 == 1 && e2 == 1 {
                    -1.0
                } else {
                    1.0
                };
                for i in 0..2 {
                    k[(e1, i)] = v[((b * 2 + e1) * 2 + e2, i)] * sign;
                }
            }
            kraus.push(k);
        }
    }
    KrausChannel::new(kraus)
}

/// Qubit erasure into a qutrit with flag `|2⟩`.
pub fn make_erasure(epsilon: f64) -> Result<KrausChannel> {
    check_range("epsilon", epsilon, 0.0, 1.0)?;
    let keep = (1.0 - epsilon).sqrt();
    let lose = epsilon.sqrt();
    let embed = ComplexMatrix::from_real(3, 2, &[keep, 0.0, 0.0, keep, 0.0, 0.0])?;
    let flag0 = ComplexMatrix::from_real(3, 2, &[0.0, 0.0, 0.0, 0.0, lose, 0.0])?;
    let flag1 = ComplexMatrix::from_real(3, 2, &[0.0, 0.0, 0.0, 0.0, 0.0, lose])?;
    Ok(KrausChannel {
        in_dim: 2,
        out_dim: 3,
        kraus: vec![embed, flag0, flag1],
    })
}

/// Seeded random channel: standard complex Gaussian columns of height
/// `out_dim·env_dim`, orthonormalized by two passes of modified Gram-Schmidt,
/// then sliced into Kraus operators.
pub fn random_channel(
    in_dim: usize,
    out_dim: usize,
    env_dim: usize,
    seed: u64,
) -> Result<KrausChannel> {
    if in_dim == 0 || out_dim == 0 || env_dim == 0 {
        return Err(Error::Dimension(
            "channel dimensions must be positive".into(),
        ));
    }
    let rows = out_dim * env_dim;
    if rows < in_dim {
        return Err(Error::Dimension(format!(
            "out_dim*env_dim = {rows} is smaller than in_dim = {in_dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<Complex64>> = (0..in_dim)
        .map(|_| (0..rows).map(|_| complex_gaussian(&mut rng)).collect())
        .collect();
    for _pass in 0..2 {
        for k in 0..in_dim {
            let (done, rest) = cols.split_at_mut(k);
            let col = &mut rest[0];
            for q in done.iter() {
                let overlap: Complex64 = q.iter().zip(col.iter()).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in col.iter_mut().zip(q) {
                    *x -= overlap * y;
                }
            }
            let norm = col.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            for x in col.iter_mut() {
                *x /= norm;
            }
        }
    }
    let mut v = ComplexMatrix::zeros(rows, in_dim);
    for (i, col) in cols.iter().enumerate() {
        for (r, x) in col.iter().enumerate() {
            v[(r, i)] = *x;
        }
    }
    Ok(StinespringIsometry::new(v, out_dim, env_dim)?.channel())
}

/// Least-squares fit of `Choi(GAD(η,α)) ≈ w·Choi(GAD(η,0)) + (1−w)·Choi(GAD(η,1))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureFit {
    /// `None` when the two endpoint channels coincide (η = 1).
    pub weight_on_ground: Option<f64>,
    /// Largest entrywise residual of the fit.
    pub residual: f64,
}

pub fn gad_mixture_fit(eta: f64, alpha: f64) -> Result<MixtureFit> {
    let x = choi(&make_gad(eta, 0.0)?.0).matrix;
    let y = choi(&make_gad(eta, 1.0)?.0).matrix;
    let z = choi(&make_gad(eta, alpha)?.0).matrix;
    let diff: Vec<Complex64> = x
        .as_slice()
        .iter()
        .zip(y.as_slice())
        .map(|(a, b)| a - b)
        .collect();
    let norm: f64 = diff.iter().map(|d| d.norm_sqr()).sum();
    if norm < 1e-24 {
        return Ok(MixtureFit {
            weight_on_ground: None,
            residual: z.max_abs_diff(&x)?,
        });
    }
    let proj: f64 = diff
        .iter()
        .zip(z.as_slice().iter().zip(y.as_slice()))
        .map(|(d, (zz, yy))| (d.conj() * (zz - yy)).re)
        .sum();
    let w = proj / norm;
    let residual = x
        .as_slice()
        .iter()
        .zip(y.as_slice())
        .zip(z.as_slice())
        .map(|((a, b), zz)| (a * w + b * (1.0 - w) - zz).norm())
        .fold(0.0, f64::max);
    Ok(MixtureFit {
        weight_on_ground: Some(w),
        residual,
    })
}

/// Parametric channel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Identity,
    Ad,
    Gad,
    Erasure,
    Random,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Identity => "identity",
            Family::Ad => "ad",
            Family::Gad => "gad",
            Family::Erasure => "erasure",
            Family::Random => "random",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelSpec {
    Identity {
        dim: usize,
    },
    AmplitudeDamping {
        eta: f64,
    },
    GeneralizedAmplitudeDamping {
        eta: f64,
        alpha: f64,
    },
    Erasure {
        epsilon: f64,
    },
    Random {
        in_dim: usize,
        out_dim: usize,
        env_dim: usize,
        seed: u64,
    },
}

impl ChannelSpec {
    pub fn family(&self) -> Family {
        match self {
            ChannelSpec::Identity { .. } => Family::Identity,
            ChannelSpec::AmplitudeDamping { .. } => Family::Ad,
            ChannelSpec::GeneralizedAmplitudeDamping { .. } => Family::Gad,
            ChannelSpec::Erasure { .. } => Family::Erasure,
            ChannelSpec::Random { .. } => Family::Random,
        }
    }

    /// `(eta, alpha)` for the damping families, with α = 0 for plain AD.
    pub fn damping_params(&self) -> Option<(f64, f64)> {
        match *self {
            ChannelSpec::AmplitudeDamping { eta } => Some((eta, 0.0)),
            ChannelSpec::GeneralizedAmplitudeDamping { eta, alpha } => Some((eta, alpha)),
            _ => None,
        }
    }

    pub fn build(&self) -> Result<KrausChannel> {
        match *self {
            ChannelSpec::Identity { dim } => {
                if dim == 0 {
                    return Err(Error::Dimension("identity channel needs dim >= 1".into()));
                }
                Ok(KrausChannel::identity(dim))
            }
            ChannelSpec::AmplitudeDamping { eta } => make_ad(eta),
            ChannelSpec::GeneralizedAmplitudeDamping { eta, alpha } => Ok(make_gad(eta, alpha)?.0),
            ChannelSpec::Erasure { epsilon } => make_erasure(epsilon),
            ChannelSpec::Random {
                in_dim,
                out_dim,
                env_dim,
                seed,
            } => random_channel(in_dim, out_dim, env_dim, seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{apply, choi_distance, complementary, compose, CHANNEL_EQ_TOL};
    use crate::linalg::DensityMatrix;

    #[test]
    fn ad_endpoints_and_range() {
        let id = KrausChannel::identity(2);
        assert!(choi_distance(&make_ad(1.0).unwrap(), &id).unwrap() <= 1e-14);
        let zero = make_ad(0.0).unwrap();
        let out = apply(&zero, &DensityMatrix::from_diagonal(&[0.2, 0.8]).unwrap()).unwrap();
        assert_eq!(out.matrix().diagonal_real(), vec![1.0, 0.0]);
        assert!(matches!(
            make_ad(1.2),
            Err(Error::Range { name: "eta", .. })
        ));
        assert!(make_ad(f64::NAN).is_err());
    }

    #[test]
    fn gad_reduces_to_ad() {
        let gad = make_gad(0.64, 0.0).unwrap().0;
        assert!(choi_distance(&gad, &make_ad(0.64).unwrap()).unwrap() <= 1e-12);
    }

    #[test]
    fn gad_identity_and_fixed_point() {
        for alpha in [0.0, 0.3, 1.0] {
            let gad = make_gad(1.0, alpha).unwrap().0;
            assert!(choi_distance(&gad, &KrausChannel::identity(2)).unwrap() <= 1e-14);
        }
        let gad = make_gad(0.7, 0.5).unwrap().0;
        let mixed = DensityMatrix::maximally_mixed(2);
        let out = apply(&gad, &mixed).unwrap();
        assert!(out.matrix().max_abs_diff(mixed.matrix()).unwrap() < 1e-15);
        assert!(make_gad(0.5, -0.1).is_err());
    }

    #[test]
    fn gad_isometry_shape() {
        let (ch, iso) = make_gad(0.4, 0.3).unwrap();
        assert_eq!((iso.in_dim(), iso.out_dim(), iso.env_dim()), (2, 2, 4));
        assert_eq!(ch.kraus().len(), 4);
        assert!(ch.completeness_residual() <= 1e-15);
    }

    #[test]
    fn gad_concatenation_law() {
        for (a, b) in [(0.8, 0.5), (0.3, 0.9), (0.0, 0.4)] {
            let chained =
                compose(&make_gad(a, 0.3).unwrap().0, &make_gad(b, 0.3).unwrap().0).unwrap();
            let direct = make_gad(a * b, 0.3).unwrap().0;
            assert!(choi_distance(&chained, &direct).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn gad_mixture_weight_is_ground_population() {
        for (eta, alpha) in [(0.6, 0.2), (0.3, 0.7), (0.0, 0.45)] {
            let fit = gad_mixture_fit(eta, alpha).unwrap();
            let w = fit.weight_on_ground.unwrap();
            assert!((w - (1.0 - alpha)).abs() < 1e-12, "w = {w}");
            assert!(fit.residual < 1e-12);
        }
        assert!(gad_mixture_fit(1.0, 0.3)
            .unwrap()
            .weight_on_ground
            .is_none());
    }

    #[test]
    fn env_qubit_channel_is_complementary_gad() {
        let env = gad_env_qubit_channel(0.3, 0.2).unwrap();
        assert!(choi_distance(&env, &make_gad(0.7, 0.2).unwrap().0).unwrap() <= 1e-10);
        let sym = gad_env_qubit_channel(0.5, 0.35).unwrap();
        assert!(choi_distance(&sym, &make_gad(0.5, 0.35).unwrap().0).unwrap() <= CHANNEL_EQ_TOL);

        let (eta, alpha) = (0.3, 0.2);
        let witness = compose(
            &make_gad(eta / (1.0 - eta), alpha).unwrap().0,
            &gad_env_qubit_channel(eta, alpha).unwrap(),
        )
        .unwrap();
        assert!(choi_distance(&witness, &make_gad(eta, alpha).unwrap().0).unwrap() <= 1e-10);
    }

    #[test]
    fn env_qubit_trace_out_loses_coherence() {
        let (eta, alpha) = (0.3, 0.2);
        let ch = gad_env_qubit_trace_out(eta, alpha).unwrap();
        let plus = DensityMatrix::new(ComplexMatrix::from_real(2, 2, &[0.5; 4]).unwrap()).unwrap();
        let out = apply(&ch, &plus).unwrap();
        let expected = 0.5 * (1.0 - 2.0 * alpha) * (1.0 - eta).sqrt();
        assert!((out.matrix()[(0, 1)].re - expected).abs() < 1e-14);
        let gad_out = apply(&make_gad(1.0 - eta, alpha).unwrap().0, &plus).unwrap();
        assert!((gad_out.matrix()[(0, 1)].re - 0.5 * (1.0 - eta).sqrt()).abs() < 1e-14);
        assert!((out.matrix()[(0, 0)] - gad_out.matrix()[(0, 0)]).norm() < 1e-14);
    }

    #[test]
    fn gad_complement_has_four_dim_environment() {
        let (ch, _) = make_gad(0.6, 0.3).unwrap();
        let env = complementary(&ch);
        assert_eq!(env.out_dim(), 4);
        let out = apply(&env, &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn erasure_examples() {
        let e = make_erasure(0.3).unwrap();
        let out = apply(&e, &DensityMatrix::maximally_mixed(2)).unwrap();
        for (a, b) in out.matrix().diagonal_real().iter().zip([0.35, 0.35, 0.3]) {
            assert!((a - b).abs() < 1e-15);
        }
        let rho = DensityMatrix::from_diagonal(&[0.9, 0.1]).unwrap();
        let out1 = apply(&make_erasure(1.0).unwrap(), &rho).unwrap();
        assert!((out1.matrix()[(2, 2)].re - 1.0).abs() < 1e-15);
        let out0 = apply(&make_erasure(0.0).unwrap(), &rho).unwrap();
        assert_eq!(out0.matrix()[(2, 2)].re, 0.0);
    }

    #[test]
    fn random_channel_determinism_and_completeness() {
        let a = random_channel(2, 2, 3, 42).unwrap();
        assert_eq!(a, random_channel(2, 2, 3, 42).unwrap());
        assert_ne!(a, random_channel(2, 2, 3, 43).unwrap());
        for seed in 0..100 {
            assert!(
                random_channel(2, 3, 2, seed)
                    .unwrap()
                    .completeness_residual()
                    <= 1e-12
            );
        }
        assert!(random_channel(4, 1, 2, 0).is_err());
        assert!(random_channel(2, 2, 0, 0).is_err());
    }

    #[test]
    fn spec_build_matches_constructors() {
        let spec = ChannelSpec::GeneralizedAmplitudeDamping {
            eta: 0.4,
            alpha: 0.1,
        };
        assert_eq!(spec.family(), Family::Gad);
        assert_eq!(spec.damping_params(), Some((0.4, 0.1)));
        assert_eq!(spec.build().unwrap(), make_gad(0.4, 0.1).unwrap().0);
        assert_eq!(
            ChannelSpec::Identity { dim: 3 }.build().unwrap().in_dim(),
            3
        );
        assert!(ChannelSpec::Erasure { epsilon: 2.0 }.build().is_err());
        assert_eq!(ChannelSpec::Erasure { epsilon: 0.0 }.damping_params(), None);
    }
}
