//! Closed-form spectra, entropies and θ-derivatives for the amplitude damping
//! families, evaluated on the general qubit input
//!
//! ```text
//! ρ_A' = [ 1−p                     √((1−p)p) e^{−iφ} cosθ ]
//!        [ √((1−p)p) e^{iφ} cosθ    p                     ]
//! ```
//!
//! Every formula here has a generic counterpart in [`generic_value`], which
//! builds the channel, pushes the purification through it and diagonalizes.
//! The generic path is the reference; see [`errata`] for the places where the
//! analytic expressions needed reconciling.

mod derivative;
pub mod errata;
mod scan;

pub use derivative::{derivative_dtheta, f_term, finite_difference_dtheta, DerivativeBreakdown};
pub use scan::{
    extremum_scan, theta_profile, Extremum, ExtremumKind, ScanResult, ThetaPoint, MIN_GRID,
};

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::channels::{make_ad, make_gad, Family, KrausChannel};
use crate::error::check_range;
use crate::linalg::{Complex64, ComplexMatrix, DensityMatrix, Spectrum, StateVector, ZERO};
use crate::qinfo::{
    joint_state_from_purification, shannon_entropy, Entropies, InfoValue, Measure, Method,
};
use crate::{Error, Result};

/// Input population `p` and angles `θ`, `φ` of the general qubit input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputParams {
    p: f64,
    theta: f64,
    phi: f64,
}

impl InputParams {
    pub fn new(p: f64, theta: f64, phi: f64) -> Result<Self> {
        check_range("p", p, 0.0, 1.0)?;
        check_range("theta", theta, 0.0, PI)?;
        if !(0.0..2.0 * PI).contains(&phi) {
            return Err(Error::Range {
                name: "phi",
                value: phi,
                lo: 0.0,
                hi: 2.0 * PI,
            });
        }
        Ok(Self { p, theta, phi })
    }

    /// `diag(1−p, p)`: θ = π/2, φ = 0.
    pub fn diagonal(p: f64) -> Result<Self> {
        Self::new(p, FRAC_PI_2, 0.0)
    }

    /// No range checks; finite differences step slightly past θ ∈ [0, π].
    pub(crate) fn unchecked(p: f64, theta: f64, phi: f64) -> Self {
        Self { p, theta, phi }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self { theta, ..self }
    }

    pub fn with_phi(self, phi: f64) -> Self {
        Self { phi, ..self }
    }

    /// `t = p(1−p)cos²θ`, the only way θ enters the spectra.
    pub fn t(&self) -> f64 {
        self.p * (1.0 - self.p) * self.theta.cos().powi(2)
    }
}

/// `ρ_A'` and its purification `|ψ⟩_AA'`, reference `A` first:
/// `√(1−p)|0⟩_A|0⟩_A' + √p e^{iφ}|1⟩_A'(cosθ|0⟩ + sinθ|1⟩)_A`.
pub fn general_input(params: &InputParams) -> Result<(DensityMatrix, StateVector)> {
    let InputParams { p, theta, phi } = *params;
    let q = p.sqrt();
    let phase = Complex64::from_polar(1.0, phi);
    let amps = vec![
        Complex64::new((1.0 - p).sqrt(), 0.0),
        phase * (q * theta.cos()),
        ZERO,
        phase * (q * theta.sin()),
    ];
    let psi = StateVector::normalized(amps)?;
    let off = Complex64::from_polar(((1.0 - p) * p).sqrt() * theta.cos(), -phi);
    let rho = ComplexMatrix::from_vec(
        2,
        2,
        vec![
            Complex64::new(1.0 - p, 0.0),
            off,
            off.conj(),
            Complex64::new(p, 0.0),
        ],
    )?;
    Ok((DensityMatrix::new(rho)?, psi))
}

/// Damping channel for the closed-form families; α is ignored for AD.
pub fn damping_channel(family: Family, eta: f64, alpha: f64) -> Result<KrausChannel> {
    match family {
        Family::Ad => make_ad(eta),
        Family::Gad => Ok(make_gad(eta, alpha)?.0),
        other => Err(Error::Precondition(format!(
            "closed forms exist only for ad and gad, not {}",
            other.name()
        ))),
    }
}

/// Entropies `S(A), S(B), S(AB)` from the generic path with the printed
/// purification.
pub fn generic_entropies(
    family: Family,
    eta: f64,
    alpha: f64,
    params: &InputParams,
) -> Result<Entropies> {
    let ch = damping_channel(family, eta, alpha)?;
    let (_, psi) = general_input(params)?;
    joint_state_from_purification(&ch, &psi, 2)?.entropies()
}

pub fn generic_value(
    family: Family,
    measure: Measure,
    eta: f64,
    alpha: f64,
    params: &InputParams,
) -> Result<InfoValue> {
    Ok(InfoValue {
        value: generic_entropies(family, eta, alpha, params)?.measure(measure),
        method: Method::Generic,
    })
}

/// Largest change of `S(A), S(B), S(AB)` between phase `φ` and `φ = 0`,
/// for amplitude damping evaluated on the generic path.
pub fn phase_invariance_check(params: &InputParams, eta: f64) -> Result<f64> {
    phase_deviation(Family::Ad, eta, 0.0, params)
}

pub fn phase_deviation(family: Family, eta: f64, alpha: f64, params: &InputParams) -> Result<f64> {
    let at = generic_entropies(family, eta, alpha, params)?;
    let base = generic_entropies(family, eta, alpha, &params.with_phi(0.0))?;
    Ok([
        (at.first - base.first).abs(),
        (at.second - base.second).abs(),
        (at.joint - base.joint).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

/// `a(x) = (1−2xp)² + 4x(1−p)p cos²θ`, clamped to `[0, 1]`.
pub fn lambda_radicand(x: f64, p: f64, theta: f64) -> f64 {
    let a = (1.0 - 2.0 * x * p).powi(2) + 4.0 * x * (1.0 - p) * p * theta.cos().powi(2);
    a.clamp(0.0, 1.0)
}

/// `λ±(x) = [1 ± √a(x)]/2`. `λ−` is taken from `λ+λ− = (1−a)/4` with
/// `1 − a = 4xp[(1−p)sin²θ + p(1−x)]`, which has no cancellation.
pub fn lambda_pm(x: f64, p: f64, theta: f64) -> (f64, f64) {
    let plus = (1.0 + lambda_radicand(x, p, theta).sqrt()) / 2.0;
    let one_minus_a = 4.0 * x * p * ((1.0 - p) * theta.sin().powi(2) + p * (1.0 - x));
    (plus, (one_minus_a / (4.0 * plus)).clamp(0.0, 0.5))
}

fn h2(pair: (f64, f64)) -> Result<f64> {
    shannon_entropy(&[pair.0, pair.1])
}

/// Closed-form entropies of amplitude damping: `S_A` from `λ±(1)`,
/// `S_B` from `λ±(η)`, `S_AB` from `λ±(1−η)`.
pub fn ad_entropies(eta: f64, params: &InputParams) -> Result<Entropies> {
    check_range("eta", eta, 0.0, 1.0)?;
    let (p, th) = (params.p, params.theta);
    Ok(Entropies {
        first: h2(lambda_pm(1.0, p, th))?,
        second: h2(lambda_pm(eta, p, th))?,
        joint: h2(lambda_pm(1.0 - eta, p, th))?,
    })
}

pub fn ad_closed_form(eta: f64, params: &InputParams, measure: Measure) -> Result<InfoValue> {
    Ok(InfoValue {
        value: ad_entropies(eta, params)?.measure(measure),
        method: Method::ClosedForm,
    })
}

/// Diagonal-input spectrum of the GAD joint state:
/// `λ₁ = α(1−η)(1−p)`, `λ₂ = (1−α)(1−η)p`, `λ₃,₄ = [1−λ₁−λ₂ ± √(1−2(λ₁+λ₂)+(λ₂−λ₁)²)]/2`.
pub fn gad_diag_eigenvalues(eta: f64, alpha: f64, p: f64) -> Result<Spectrum> {
    check_range("eta", eta, 0.0, 1.0)?;
    check_range("alpha", alpha, 0.0, 1.0)?;
    check_range("p", p, 0.0, 1.0)?;
    let l1 = alpha * (1.0 - eta) * (1.0 - p);
    let l2 = (1.0 - alpha) * (1.0 - eta) * p;
    let s = l1 + l2;
    let r = (1.0 - 2.0 * s + (l2 - l1).powi(2)).max(0.0).sqrt();
    let l3 = (1.0 - s + r) / 2.0;
    // λ₃λ₄ = λ₁λ₂
    let l4 = if l3 > 0.0 { l1 * l2 / l3 } else { 0.0 };
    Ok(Spectrum::from_unsorted(vec![l1, l2, l3, l4]))
}

/// Coefficients of the GAD spectra: `a, b, c, d` for the joint state,
/// `e, f` for Bob and `e', f'` for Alice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GadCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub e_prime: f64,
    pub f_prime: f64,
    /// `(1−η)(α + p − 2αp)`, enters `1 − A` without cancellation.
    damped_mixing: f64,
    /// `2(p−α)²(1−η)²`
    c_excess: f64,
    /// `α(1−α)(1−η)²`
    pair_scale: f64,
    /// `p(1−p)`
    pq: f64,
}

impl GadCoefficients {
    pub fn new(eta: f64, alpha: f64, p: f64) -> Self {
        let g = 1.0 - eta;
        let m = alpha + p - 2.0 * alpha * p;
        Self {
            a: (1.0 - 2.0 * g * m).powi(2),
            b: 4.0 * g * (1.0 - 4.0 * (1.0 - alpha) * alpha * g),
            c: 1.0 - 2.0 * g * m + 2.0 * (p - alpha).powi(2) * g * g,
            d: 2.0 * g,
            e: (1.0 - 2.0 * (p * eta + alpha * g)).powi(2),
            f: 4.0 * eta,
            e_prime: (1.0 - 2.0 * p).powi(2),
            f_prime: 4.0,
            damped_mixing: g * m,
            c_excess: 2.0 * (p - alpha).powi(2) * g * g,
            pair_scale: alpha * (1.0 - alpha) * g * g,
            pq: p * (1.0 - p),
        }
    }

    /// `1 − (−1)^i √A`, with `1 − A = 4gm(1−gm) − b·t` for the minus branch.
    fn one_minus_signed_root(&self, i: usize, t: f64) -> f64 {
        let ra = self.root_a(t);
        if i % 2 == 0 {
            let gm = self.damped_mixing;
            ((4.0 * gm * (1.0 - gm) - self.b * t) / (1.0 + ra)).max(0.0)
        } else {
            1.0 + ra
        }
    }

    /// `Q_i`, the `i = 0` branch as `[(c+dt)² − A] / (c + dt + √A)`.
    fn q_stable(&self, i: usize, t: f64) -> f64 {
        if i % 2 == 1 {
            return self.q(i, t);
        }
        let u = 1.0 - 2.0 * self.damped_mixing;
        let w = self.c_excess + self.d * t;
        let num = 2.0 * u * w + w * w - self.b * t;
        let den = self.c + self.d * t + self.root_a(t);
        if den > 0.0 {
            num / den
        } else {
            self.q(i, t)
        }
    }

    /// `μ_i0 μ_i1 = α(1−α)(1−η)² (p(1−p) − t)`, the same for both `i`.
    fn pair_product(&self, t: f64) -> f64 {
        (self.pair_scale * (self.pq - t)).max(0.0)
    }

    /// `(e, f)` for ci, `(e', f')` for rci.
    pub fn marginal(&self, measure: Measure) -> (f64, f64) {
        match measure {
            Measure::Ci => (self.e, self.f),
            Measure::Rci => (self.e_prime, self.f_prime),
        }
    }

    /// `√A` with `A = a + b·t`.
    pub fn root_a(&self, t: f64) -> f64 {
        (self.a + self.b * t).max(0.0).sqrt()
    }

    /// `Q_i = c + d·t − (−1)^i √A`.
    pub fn q(&self, i: usize, t: f64) -> f64 {
        self.c + self.d * t - sign(i) * self.root_a(t)
    }
}

pub(crate) fn sign(i: usize) -> f64 {
    if i % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `μ_ij = ¼[1 − (−1)^i √A + (−1)^j √2 √Q_i]`, indexed `[i][j]`.
///
/// The `j = 1` member of each pair is taken as the pair product over the
/// `j = 0` member, which keeps small eigenvalues accurate.
pub fn gad_joint_eigenvalue_grid(coeffs: &GadCoefficients, t: f64) -> [[f64; 2]; 2] {
    let product = coeffs.pair_product(t);
    let mut out = [[0.0; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        let rq = coeffs.q_stable(i, t).max(0.0).sqrt();
        let big = 0.25 * (coeffs.one_minus_signed_root(i, t) + SQRT_2 * rq);
        row[0] = big;
        row[1] = if big > 0.0 { product / big } else { 0.0 };
    }
    out
}

pub fn gad_joint_eigenvalues(eta: f64, alpha: f64, params: &InputParams) -> Result<Spectrum> {
    check_damping(eta, alpha)?;
    let grid = gad_joint_eigenvalue_grid(&GadCoefficients::new(eta, alpha, params.p), params.t());
    Ok(Spectrum::from_unsorted(
        grid.iter().flatten().copied().collect(),
    ))
}

/// `½[1 ± √(e + f·t)]`, or the primed coefficients for Alice.
pub fn gad_marginal_eigenvalues(
    eta: f64,
    alpha: f64,
    params: &InputParams,
    measure: Measure,
) -> Result<(f64, f64)> {
    check_damping(eta, alpha)?;
    let (e, f) = GadCoefficients::new(eta, alpha, params.p).marginal(measure);
    let r = (e + f * params.t()).clamp(0.0, 1.0).sqrt();
    Ok(((1.0 + r) / 2.0, (1.0 - r) / 2.0))
}

fn check_damping(eta: f64, alpha: f64) -> Result<()> {
    check_range("eta", eta, 0.0, 1.0)?;
    check_range("alpha", alpha, 0.0, 1.0)
}

pub fn gad_entropies(eta: f64, alpha: f64, params: &InputParams) -> Result<Entropies> {
    let joint = gad_joint_eigenvalues(eta, alpha, params)?;
    Ok(Entropies {
        first: h2(gad_marginal_eigenvalues(eta, alpha, params, Measure::Rci)?)?,
        second: h2(gad_marginal_eigenvalues(eta, alpha, params, Measure::Ci)?)?,
        joint: shannon_entropy(joint.values())?,
    })
}

pub fn gad_closed_form(
    eta: f64,
    alpha: f64,
    params: &InputParams,
    measure: Measure,
) -> Result<InfoValue> {
    Ok(InfoValue {
        value: gad_entropies(eta, alpha, params)?.measure(measure),
        method: Method::ClosedForm,
    })
}

pub fn closed_form_entropies(
    family: Family,
    eta: f64,
    alpha: f64,
    params: &InputParams,
) -> Result<Entropies> {
    match family {
        Family::Ad => ad_entropies(eta, params),
        Family::Gad => gad_entropies(eta, alpha, params),
        other => Err(Error::Precondition(format!(
            "closed forms exist only for ad and gad, not {}",
            other.name()
        ))),
    }
}

pub fn closed_form_value(
    family: Family,
    measure: Measure,
    eta: f64,
    alpha: f64,
    params: &InputParams,
) -> Result<InfoValue> {
    Ok(InfoValue {
        value: closed_form_entropies(family, eta, alpha, params)?.measure(measure),
        method: Method::ClosedForm,
    })
}

/// The joint GAD output in block form `[[Z, C], [Cᵀ, W]]` at φ = 0, written
/// with the channel output as the slow index.
pub fn gad_joint_matrix(eta: f64, alpha: f64, params: &InputParams) -> Result<ComplexMatrix> {
    check_damping(eta, alpha)?;
    let (p, th) = (params.p, params.theta);
    let (co, si) = (th.cos(), th.sin());
    let g = 1.0 - eta;
    let up = alpha + (1.0 - alpha) * eta;
    let z00 = (1.0 - p) * alpha * eta + (1.0 - alpha) * (1.0 - p + p * g * co * co);
    let z01 = p * (1.0 - alpha) * g * co * si;
    let z11 = p * (1.0 - alpha) * g * si * si;
    let w00 = alpha * (1.0 - p) * g + p * up * co * co;
    let w01 = p * up * co * si;
    let w11 = p * up * si * si;
    let k = (eta * (1.0 - p) * p).sqrt();
    #[rustfmt::skip]
    let m = [
        z00,    z01, k * co, k * si,
        z01,    z11, 0.0,    0.0,
        k * co, 0.0, w00,    w01,
        k * si, 0.0, w01,    w11,
    ];
    ComplexMatrix::from_real(4, 4, &m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, partial_trace};
    use crate::qinfo::binary_entropy;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn h(x: f64) -> f64 {
        binary_entropy(x).unwrap()
    }

    fn params(p: f64, theta: f64) -> InputParams {
        InputParams::new(p, theta, 0.0).unwrap()
    }

    #[test]
    fn input_params_ranges() {
        assert!(InputParams::new(1.1, 0.0, 0.0).is_err());
        assert!(InputParams::new(0.5, 4.0, 0.0).is_err());
        assert!(InputParams::new(0.5, 1.0, 2.0 * PI).is_err());
        assert!(InputParams::new(0.5, PI, 6.0).is_ok());
    }

    #[test]
    fn general_input_examples() {
        let (rho, psi) = general_input(&InputParams::diagonal(0.3).unwrap()).unwrap();
        assert!((rho.matrix()[(0, 0)].re - 0.7).abs() < 1e-15);
        assert!(rho.matrix()[(0, 1)].norm() < 1e-16);
        let reduced = psi.reduced(&[2, 2], &[1]).unwrap();
        assert!(reduced.matrix().max_abs_diff(rho.matrix()).unwrap() < 1e-12);

        let (rho, _) = general_input(&params(0.0, 1.0)).unwrap();
        assert_eq!(rho.matrix().diagonal_real(), vec![1.0, 0.0]);

        let (rho, _) = general_input(&params(0.5, 0.0)).unwrap();
        assert!((rho.matrix()[(0, 1)].re - 0.5).abs() < 1e-15);
        let s = rho.spectrum().unwrap();
        assert!((s.values()[0] - 1.0).abs() < 1e-12 && s.values()[1].abs() < 1e-12);

        let p = InputParams::new(0.4, 0.7, 2.3).unwrap();
        let (rho, psi) = general_input(&p).unwrap();
        let reduced = psi.reduced(&[2, 2], &[1]).unwrap();
        assert!(reduced.matrix().max_abs_diff(rho.matrix()).unwrap() < 1e-12);
        let expected = Complex64::from_polar((0.24f64).sqrt() * 0.7f64.cos(), -2.3);
        assert!((rho.matrix()[(0, 1)] - expected).norm() < 1e-15);
    }

    #[test]
    fn phase_invariance() {
        assert_eq!(phase_invariance_check(&params(0.3, 1.0), 0.7).unwrap(), 0.0);
        let p = InputParams::new(0.3, PI / 3.0, 1.1).unwrap();
        assert!(phase_invariance_check(&p, 0.7).unwrap() <= 1e-10);
        let p = InputParams::new(0.45, 0.4, 4.0).unwrap();
        assert!(phase_deviation(Family::Gad, 0.6, 0.3, &p).unwrap() <= 1e-10);
    }

    #[test]
    fn lambda_examples() {
        let (a, b) = lambda_pm(1.0, 0.3, FRAC_PI_2);
        assert!((a - 0.7).abs() < 1e-15 && (b - 0.3).abs() < 1e-15);
        let (a, b) = lambda_pm(0.2, 0.5, FRAC_PI_2);
        assert!((a - 0.9).abs() < 1e-15 && (b - 0.1).abs() < 1e-15);
        let (a, b) = lambda_pm(0.8, 0.5, PI / 4.0);
        assert!((a - 0.831662).abs() < 1e-6 && (b - 0.168338).abs() < 1e-6);
        assert!((a + b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ad_closed_form_examples() {
        let v = ad_closed_form(0.8, &InputParams::diagonal(0.5).unwrap(), Measure::Ci).unwrap();
        assert!((v.value - (h(0.4) - h(0.1))).abs() < 1e-14);
        assert_eq!(v.method, Method::ClosedForm);
        let v = ad_closed_form(0.5, &InputParams::diagonal(0.5).unwrap(), Measure::Rci).unwrap();
        assert!((v.value - (1.0 - h(0.25))).abs() < 1e-14);
        let v = ad_closed_form(0.7, &params(0.3, 0.0), Measure::Ci).unwrap();
        assert!(v.value.abs() < 1e-12);
        let s = ad_entropies(0.7, &params(0.3, 0.0)).unwrap();
        assert!(s.first.abs() < 1e-12);
    }

    #[test]
    fn ad_closed_form_matches_generic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let eta = rng.random::<f64>();
            let p = InputParams::new(rng.random(), rng.random::<f64>() * PI, 0.0).unwrap();
            for m in Measure::BOTH {
                let cf = ad_closed_form(eta, &p, m).unwrap().value;
                let g = generic_value(Family::Ad, m, eta, 0.0, &p).unwrap().value;
                assert!((cf - g).abs() < 1e-10, "eta {eta} {p:?} {m}: {cf} vs {g}");
            }
        }
    }

    #[test]
    fn gad_diag_examples() {
        let s = gad_diag_eigenvalues(1.0, 0.3, 0.4).unwrap();
        assert!((s.values()[0] - 1.0).abs() < 1e-15);
        let s = gad_diag_eigenvalues(0.8, 0.0, 0.5).unwrap();
        for (x, y) in s.values().iter().zip([0.9, 0.1, 0.0, 0.0]) {
            assert!((x - y).abs() < 1e-15);
        }
        let s = gad_diag_eigenvalues(0.7, 0.2, 0.3).unwrap();
        assert!((s.sum() - 1.0).abs() < 1e-12);
        let ch = make_gad(0.7, 0.2).unwrap().0;
        let (_, psi) = general_input(&InputParams::diagonal(0.3).unwrap()).unwrap();
        let joint = joint_state_from_purification(&ch, &psi, 2).unwrap();
        let g = joint.state().spectrum().unwrap();
        assert!(s.max_abs_diff(&g) < 1e-10);
    }

    #[test]
    fn gad_joint_spectrum_matches_diagonalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let (eta, alpha) = (rng.random::<f64>(), rng.random::<f64>());
            let p = InputParams::new(rng.random(), rng.random::<f64>() * PI, 0.0).unwrap();
            let cf = gad_joint_eigenvalues(eta, alpha, &p).unwrap();
            assert!((cf.sum() - 1.0).abs() < 1e-12);
            let ch = make_gad(eta, alpha).unwrap().0;
            let (_, psi) = general_input(&p).unwrap();
            let g = joint_state_from_purification(&ch, &psi, 2)
                .unwrap()
                .state()
                .spectrum()
                .unwrap();
            assert!(cf.max_abs_diff(&g) < 1e-9, "{cf:?} vs {g:?}");
        }
    }

    #[test]
    fn main_text_spectrum_agrees_with_general_formula() {
        for (eta, alpha, p) in [(0.7, 0.2, 0.3), (0.3, 0.45, 0.8), (0.95, 0.1, 0.5)] {
            let diag = gad_diag_eigenvalues(eta, alpha, p).unwrap();
            let gen =
                gad_joint_eigenvalues(eta, alpha, &InputParams::diagonal(p).unwrap()).unwrap();
            assert!(diag.max_abs_diff(&gen) < 1e-12);
        }
    }

    #[test]
    fn gad_closed_form_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let eta = rng.random::<f64>();
            let p = InputParams::new(rng.random(), rng.random::<f64>() * PI, 0.0).unwrap();
            for m in Measure::BOTH {
                let g = gad_closed_form(eta, 0.0, &p, m).unwrap().value;
                let a = ad_closed_form(eta, &p, m).unwrap().value;
                assert!((g - a).abs() < 1e-10);
            }
        }
        let d = InputParams::diagonal(0.3).unwrap();
        let s = gad_entropies(0.7, 0.2, &d).unwrap();
        assert!((s.second - h(0.27)).abs() < 1e-14);
        let spec = gad_diag_eigenvalues(0.7, 0.2, 0.3).unwrap();
        assert!((s.joint - shannon_entropy(spec.values()).unwrap()).abs() < 1e-12);
        for alpha in [0.0, 0.4, 1.0] {
            let v = gad_closed_form(
                1.0,
                alpha,
                &InputParams::diagonal(0.5).unwrap(),
                Measure::Ci,
            )
            .unwrap();
            assert!((v.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn separable_inputs() {
        for (family, alpha) in [(Family::Ad, 0.0), (Family::Gad, 0.3)] {
            for theta in [0.0, PI] {
                let p = params(0.35, theta);
                let s = closed_form_entropies(family, 0.6, alpha, &p).unwrap();
                assert!(s.coherent().abs() < 1e-10);
                assert!((s.reverse_coherent() + s.second).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn printed_block_matrix_is_swapped_joint_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let (eta, alpha) = (rng.random::<f64>(), rng.random::<f64>());
            let p = InputParams::new(rng.random(), rng.random::<f64>() * PI, 0.0).unwrap();
            let printed = gad_joint_matrix(eta, alpha, &p).unwrap();
            let ch = make_gad(eta, alpha).unwrap().0;
            let (_, psi) = general_input(&p).unwrap();
            let joint = joint_state_from_purification(&ch, &psi, 2).unwrap();
            let rb = joint.state().matrix();
            let mut swapped = ComplexMatrix::zeros(4, 4);
            for (r, b, r2, b2) in (0..16).map(|k| (k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1)) {
                swapped[(b * 2 + r, b2 * 2 + r2)] = rb[(r * 2 + b, r2 * 2 + b2)];
            }
            assert!(printed.max_abs_diff(&swapped).unwrap() < 1e-12);
            let ps = hermitian_eigenvalues(&printed).unwrap();
            assert!(ps.max_abs_diff(&joint.state().spectrum().unwrap()) < 1e-10);
            let rho = DensityMatrix::new(printed).unwrap();
            let bob = partial_trace(&rho, &[2, 2], &[0]).unwrap();
            let pop = eta * p.p() + (1.0 - eta) * alpha;
            assert!((bob.matrix()[(1, 1)].re - pop).abs() < 1e-12);
        }
    }

    #[test]
    fn non_damping_family_rejected() {
        let p = InputParams::diagonal(0.5).unwrap();
        assert!(closed_form_value(Family::Erasure, Measure::Ci, 0.5, 0.0, &p).is_err());
        assert!(damping_channel(Family::Identity, 0.5, 0.0).is_err());
    }

    #[test]
    fn small_eigenvalues_keep_relative_accuracy() {
        // The diagonal-input spectrum has λ₁, λ₂ as plain products.
        for (eta, alpha) in [(0.5, 0.3), (0.9, 0.01), (0.51, 0.5)] {
            for p in [1e-6, 1e-9, 1.0 - 1e-6] {
                let d = InputParams::diagonal(p).unwrap();
                let general = gad_joint_eigenvalues(eta, alpha, &d).unwrap();
                let diag = gad_diag_eigenvalues(eta, alpha, p).unwrap();
                for (g, r) in general.values().iter().zip(diag.values()) {
                    assert!(*g >= 0.0);
                    assert!((g - r).abs() <= 1e-12 * r.max(1e-300) + 1e-300, "{g} {r}");
                }
            }
        }
        let (_, minus) = lambda_pm(0.3, 1e-7, FRAC_PI_2);
        assert!((minus - 0.3e-7).abs() < 1e-20);
    }
}
