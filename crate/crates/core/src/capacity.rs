//! Single-letter optimization over the input population and the experiments
//! built on it: capacity curves, thermal-noise thresholds, (anti)degradability
//! witnesses, and additivity / data-processing probes.
//!
//! Capacities are optimized over diagonal inputs `diag(1−p, p)`. Reported
//! values are clamped at zero; the raw optimum is kept alongside.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::{
    choi_distance, compose, gad_env_qubit_channel, make_ad, make_gad, random_channel,
    tensor_channels, ChannelSpec, Family, KrausChannel,
};
use crate::closedform::{closed_form_value, generic_value, InputParams};
use crate::error::check_range;
use crate::linalg::random::random_density_matrix;
use crate::linalg::{partial_trace, DensityMatrix};
use crate::qinfo::{binary_entropy, reverse_coherent_information, Measure, Method};
use crate::{Error, Result};

pub const COARSE_POINTS: usize = 1024;
pub const DENSE_POINTS: usize = 1 << 15;
pub const P_MIN: f64 = 1e-6;
pub const P_MAX: f64 = 1.0 - 1e-6;
/// Default golden-section bracket width.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Capacities at or below this many bits count as zero.
pub const ZERO_CAPACITY: f64 = 1e-7;
/// Choi distance above which an identity between channels is violated.
pub const CHOI_TOL: f64 = 1e-10;
/// Entropic inequalities may fail by this much before counting as violated.
pub const INEQUALITY_TOL: f64 = 1e-9;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizationResult {
    pub argmax_p: f64,
    /// `max(raw_value, 0)`.
    pub value: f64,
    pub raw_value: f64,
    pub evaluations: usize,
    /// Whether golden-section refinement ran after the coarse grid.
    pub refined: bool,
}

impl OptimizationResult {
    fn new(argmax_p: f64, raw_value: f64, evaluations: usize, refined: bool) -> Self {
        Self {
            argmax_p,
            value: raw_value.max(0.0),
            raw_value,
            evaluations,
            refined,
        }
    }
}

fn damping(spec: &ChannelSpec) -> Result<(Family, f64, f64)> {
    match spec.damping_params() {
        Some((eta, alpha)) => Ok((spec.family(), eta, alpha)),
        None => Err(Error::Precondition(format!(
            "population optimization needs ad or gad, not {}",
            spec.family().name()
        ))),
    }
}

fn objective(
    spec: &ChannelSpec,
    measure: Measure,
    method: Method,
) -> Result<impl Fn(f64) -> Result<f64>> {
    let (family, eta, alpha) = damping(spec)?;
    check_range("eta", eta, 0.0, 1.0)?;
    check_range("alpha", alpha, 0.0, 1.0)?;
    Ok(move |p: f64| {
        let params = InputParams::diagonal(p)?;
        let v = match method {
            Method::ClosedForm => closed_form_value(family, measure, eta, alpha, &params)?,
            Method::Generic => generic_value(family, measure, eta, alpha, &params)?,
        };
        Ok(v.value)
    })
}

fn grid_point(k: usize, n: usize) -> f64 {
    P_MIN + (P_MAX - P_MIN) * k as f64 / (n - 1) as f64
}

/// Maximizes the information over `p` at θ = π/2 with the closed forms:
/// a 1024-point grid on `[1e-6, 1−1e-6]`, then golden-section search around
/// the best grid point until the bracket is narrower than `tol`.
pub fn optimize_population(
    spec: &ChannelSpec,
    measure: Measure,
    tol: f64,
) -> Result<OptimizationResult> {
    optimize_population_with(spec, measure, tol, Method::ClosedForm)
}

pub fn optimize_population_with(
    spec: &ChannelSpec,
    measure: Measure,
    tol: f64,
    method: Method,
) -> Result<OptimizationResult> {
    if !(tol >= 1e-10) {
        return Err(Error::Precondition(format!(
            "tol must be at least 1e-10, got {tol}"
        )));
    }
    let f = objective(spec, measure, method)?;
    let mut best = (0usize, f64::NEG_INFINITY);
    for k in 0..COARSE_POINTS {
        let v = f(grid_point(k, COARSE_POINTS))?;
        if v > best.1 {
            best = (k, v);
        }
    }
    let lo = grid_point(best.0.saturating_sub(1), COARSE_POINTS);
    let hi = grid_point((best.0 + 1).min(COARSE_POINTS - 1), COARSE_POINTS);
    let (p, v, evals) = golden_section(&f, lo, hi, tol)?;
    let evaluations = COARSE_POINTS + evals;
    if v >= best.1 {
        Ok(OptimizationResult::new(p, v, evaluations, true))
    } else {
        Ok(OptimizationResult::new(
            grid_point(best.0, COARSE_POINTS),
            best.1,
            evaluations,
            true,
        ))
    }
}

/// Golden-section maximization on `[a, b]`; returns `(argmax, max, evaluations)`.
fn golden_section(
    f: &impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64, usize)> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut evals = 2;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
        evals += 1;
        // Once the bracket collapses below float resolution the points stop moving.
        if c >= d {
            break;
        }
    }
    Ok(if fc >= fd {
        (c, fc, evals)
    } else {
        (d, fd, evals)
    })
}

/// Plain grid maximum over `n` points; the cross-check for [`optimize_population`].
pub fn dense_grid_optimum(
    spec: &ChannelSpec,
    measure: Measure,
    n: usize,
) -> Result<OptimizationResult> {
    if n < 2 {
        return Err(Error::Precondition(
            "dense grid needs at least 2 points".into(),
        ));
    }
    let f = objective(spec, measure, Method::ClosedForm)?;
    let values: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| f(grid_point(k, n)))
        .collect::<Result<_>>()?;
    let (k, v) = values
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc },
        );
    Ok(OptimizationResult::new(grid_point(k, n), v, n, false))
}

/// One η grid point of a capacity curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub eta: f64,
    /// `None` for amplitude damping.
    pub alpha: Option<f64>,
    pub value_ci: f64,
    pub p_ci: f64,
    pub value_rci: f64,
    pub p_rci: f64,
    pub raw_ci: f64,
    pub raw_rci: f64,
}

/// Uniform grid with `steps + 1` points from `from` to `to`.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|k| {
            if k == steps {
                to
            } else {
                from + (to - from) * k as f64 / steps as f64
            }
        })
        .collect()
}

fn check_sweep(from: f64, to: f64, steps: usize) -> Result<()> {
    check_range("eta_from", from, 0.0, 1.0)?;
    check_range("eta_to", to, 0.0, 1.0)?;
    if from >= to {
        return Err(Error::Precondition(format!(
            "eta_from ({from}) must be below eta_to ({to})"
        )));
    }
    if steps < 2 {
        return Err(Error::Precondition(format!(
            "steps must be at least 2, got {steps}"
        )));
    }
    Ok(())
}

fn family_spec(family: Family, eta: f64, alpha: Option<f64>) -> Result<ChannelSpec> {
    match (family, alpha) {
        (Family::Ad, _) => Ok(ChannelSpec::AmplitudeDamping { eta }),
        (Family::Gad, Some(alpha)) => Ok(ChannelSpec::GeneralizedAmplitudeDamping { eta, alpha }),
        (Family::Gad, None) => Err(Error::Precondition("alpha required for gad".into())),
        (other, _) => Err(Error::Precondition(format!(
            "capacity curves need ad or gad, not {}",
            other.name()
        ))),
    }
}

/// Both single-letter capacities on a uniform η grid. Points are computed in
/// parallel on the current rayon pool; rows come back in grid order.
pub fn capacity_curve(
    family: Family,
    sweep: (f64, f64, usize),
    alpha: Option<f64>,
    tol: f64,
) -> Result<Vec<CurveRow>> {
    let (from, to, steps) = sweep;
    check_sweep(from, to, steps)?;
    if let Some(a) = alpha {
        check_range("alpha", a, 0.0, 1.0)?;
    }
    family_spec(family, from, alpha)?;
    let alpha = if family == Family::Gad { alpha } else { None };
    linspace(from, to, steps)
        .into_par_iter()
        .map(|eta| {
            let spec = family_spec(family, eta, alpha)?;
            let ci = optimize_population(&spec, Measure::Ci, tol)?;
            let rci = optimize_population(&spec, Measure::Rci, tol)?;
            Ok(CurveRow {
                eta,
                alpha,
                value_ci: ci.value,
                p_ci: ci.argmax_p,
                value_rci: rci.value,
                p_rci: rci.argmax_p,
                raw_ci: ci.raw_value,
                raw_rci: rci.raw_value,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseThreshold {
    pub eta: f64,
    pub measure: Measure,
    /// Smallest α in `[0, 1/2]` at which the capacity reaches zero.
    pub alpha_star: f64,
    /// Optimal population at the largest α still known to carry capacity;
    /// `None` when α* = 0.
    pub p_at_threshold: Option<f64>,
    pub bisection_steps: usize,
}

/// Bisection in α on the optimized GAD capacity with a `1e-7` bit zero
/// threshold. Returns 0 when the channel has no capacity even at α = 0 and
/// 1/2 when the capacity survives the whole range.
pub fn noise_threshold(measure: Measure, eta: f64, tol: f64) -> Result<NoiseThreshold> {
    check_range("eta", eta, 0.0, 1.0)?;
    if !(tol > 0.0) {
        return Err(Error::Precondition(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let optimum = |alpha: f64| {
        let spec = ChannelSpec::GeneralizedAmplitudeDamping { eta, alpha };
        optimize_population(&spec, measure, DEFAULT_TOL)
    };
    let done = |alpha_star, p_at_threshold, bisection_steps| NoiseThreshold {
        eta,
        measure,
        alpha_star,
        p_at_threshold,
        bisection_steps,
    };
    let at_zero = optimum(0.0)?;
    if at_zero.raw_value <= ZERO_CAPACITY {
        return Ok(done(0.0, None, 0));
    }
    let at_half = optimum(0.5)?;
    if at_half.raw_value > ZERO_CAPACITY {
        return Ok(done(0.5, Some(at_half.argmax_p), 0));
    }
    let (mut lo, mut hi) = (0.0, 0.5);
    let mut p_lo = at_zero.argmax_p;
    let mut steps = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let r = optimum(mid)?;
        if r.raw_value > ZERO_CAPACITY {
            lo = mid;
            p_lo = r.argmax_p;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    Ok(done(0.5 * (lo + hi), Some(p_lo), steps))
}

/// Thresholds for both measures on an η grid, computed in parallel.
pub fn noise_threshold_curve(
    measures: &[Measure],
    sweep: (f64, f64, usize),
    tol: f64,
) -> Result<Vec<Vec<NoiseThreshold>>> {
    let (from, to, steps) = sweep;
    check_sweep(from, to, steps)?;
    linspace(from, to, steps)
        .into_par_iter()
        .map(|eta| {
            measures
                .iter()
                .map(|&m| noise_threshold(m, eta, tol))
                .collect()
        })
        .collect()
}

/// Outcome of checking an inequality `lhs ≤ rhs` or a channel identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub margin: f64,
    pub tolerance: f64,
    pub witness: Vec<(&'static str, f64)>,
    pub violated: bool,
    /// Set when the requested check has no valid construction at these parameters.
    pub out_of_domain: bool,
}

impl ViolationReport {
    fn inequality(lhs: f64, rhs: f64, tolerance: f64, witness: Vec<(&'static str, f64)>) -> Self {
        let margin = rhs - lhs;
        Self {
            lhs,
            rhs,
            margin,
            tolerance,
            witness,
            violated: margin < -tolerance,
            out_of_domain: false,
        }
    }

    /// `lhs` is a Choi distance, `rhs` is 0.
    fn identity(distance: f64, witness: Vec<(&'static str, f64)>) -> Self {
        Self::inequality(distance, 0.0, CHOI_TOL, witness)
    }
}

/// Degradability of amplitude damping: the degrading map is
/// `D_{(1−η)/η}`, which exists only for η ≥ 1/2.
pub fn check_degradable_ad(eta: f64) -> Result<ViolationReport> {
    check_range("eta", eta, 0.0, 1.0)?;
    if eta == 0.0 {
        return Err(Error::Precondition(
            "degradability check needs eta > 0".into(),
        ));
    }
    let param = (1.0 - eta) / eta;
    let witness = vec![("eta", eta), ("degrading_eta", param)];
    if param > 1.0 {
        return Ok(ViolationReport {
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            tolerance: CHOI_TOL,
            witness,
            violated: false,
            out_of_domain: true,
        });
    }
    let degraded = compose(&make_ad(param)?, &make_ad(eta)?)?;
    let d = choi_distance(&degraded, &make_ad(1.0 - eta)?)?;
    Ok(ViolationReport::identity(d, witness))
}

/// Antidegradability of GAD for η ≤ 1/2: `GAD(η/(1−η), α)` applied to the
/// environment qubit reproduces `GAD(η, α)`.
pub fn check_antidegradable_gad(eta: f64, alpha: f64) -> Result<ViolationReport> {
    check_range("eta", eta, 0.0, 1.0)?;
    check_range("alpha", alpha, 0.0, 1.0)?;
    if eta > 0.5 {
        return Err(Error::Domain {
            term: "eta/(1-eta)",
            detail: format!("eta = {eta} > 1/2 gives an antidegrading parameter above 1"),
        });
    }
    let param = eta / (1.0 - eta);
    let witness = compose(
        &make_gad(param, alpha)?.0,
        &gad_env_qubit_channel(eta, alpha)?,
    )?;
    let d = choi_distance(&witness, &make_gad(eta, alpha)?.0)?;
    Ok(ViolationReport::identity(
        d,
        vec![("eta", eta), ("alpha", alpha), ("antidegrading_eta", param)],
    ))
}

/// `I_R(a ⊗ b, ρ₁₂) ≤ I_R(a, ρ₁) + I_R(b, ρ₂)`.
pub fn additivity_check_pair(
    a: &KrausChannel,
    b: &KrausChannel,
    joint_input: &DensityMatrix,
) -> Result<ViolationReport> {
    let (d1, d2) = (a.in_dim(), b.in_dim());
    if joint_input.dim() != d1 * d2 {
        return Err(Error::Dimension(format!(
            "joint input of dimension {} for channels with inputs {d1} and {d2}",
            joint_input.dim()
        )));
    }
    let both = tensor_channels(a, b);
    let lhs = reverse_coherent_information(&both, joint_input)?.value;
    let r1 = partial_trace(joint_input, &[d1, d2], &[0])?;
    let r2 = partial_trace(joint_input, &[d1, d2], &[1])?;
    let rhs =
        reverse_coherent_information(a, &r1)?.value + reverse_coherent_information(b, &r2)?.value;
    Ok(ViolationReport::inequality(
        lhs,
        rhs,
        INEQUALITY_TOL,
        Vec::new(),
    ))
}

pub fn additivity_check(
    spec: &ChannelSpec,
    joint_input: &DensityMatrix,
) -> Result<ViolationReport> {
    let ch = spec.build()?;
    additivity_check_pair(&ch, &ch, joint_input)
}

/// Channel pair used by the seeded additivity sampler, by draw index.
pub fn additivity_sample(seed: u64) -> Result<(KrausChannel, KrausChannel, DensityMatrix)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |rng: &mut ChaCha8Rng| -> Result<KrausChannel> {
        match rng.random_range(0..3) {
            0 => make_ad(rng.random()),
            1 => Ok(make_gad(rng.random(), rng.random())?.0),
            _ => random_channel(2, 2, rng.random_range(1..=4), rng.random()),
        }
    };
    let a = pick(&mut rng)?;
    let b = pick(&mut rng)?;
    let rank = rng.random_range(1..=4);
    let rho = random_density_matrix(4, rank, &mut rng);
    Ok((a, b, rho))
}

/// Compares `I_R(first, ρ)` (lhs) with `I_R(post ∘ first, ρ)` (rhs). A
/// violation of data processing is flagged when rhs exceeds lhs by more than
/// `1e-9`, i.e. when `margin > 1e-9`.
pub fn dpi_probe(
    first: &KrausChannel,
    post: &KrausChannel,
    rho_a: &DensityMatrix,
) -> Result<ViolationReport> {
    let composed = compose(post, first)?;
    let lhs = reverse_coherent_information(first, rho_a)?.value;
    let rhs = reverse_coherent_information(&composed, rho_a)?.value;
    let margin = rhs - lhs;
    Ok(ViolationReport {
        lhs,
        rhs,
        margin,
        tolerance: INEQUALITY_TOL,
        witness: Vec::new(),
        violated: margin > INEQUALITY_TOL,
        out_of_domain: false,
    })
}

/// Seeded random search for data-processing violations of `I_R`.
/// Exploratory: finding none is not an error.
pub fn dpi_search(draws: usize, seed: u64) -> Result<Vec<ViolationReport>> {
    (0..draws)
        .into_par_iter()
        .map(|k| {
            let draw_seed = seed
                .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                .wrapping_add(k as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(draw_seed);
            let first = random_channel(2, 2, rng.random_range(1..=3), rng.random())?;
            let post = random_channel(2, 2, rng.random_range(1..=3), rng.random())?;
            let rho = random_density_matrix(2, 2, &mut rng);
            let mut report = dpi_probe(&first, &post, &rho)?;
            report.witness = vec![("draw", k as f64), ("seed", draw_seed as f64)];
            Ok(report)
        })
        .filter(|r: &Result<ViolationReport>| r.as_ref().map_or(true, |r| r.violated))
        .collect()
}

/// Erasure channel at input `diag(1−p, p)`: `(ci, rci) = ((1−2ε)H(p), (1−ε)H(p) − H(ε))`.
pub fn erasure_reference(epsilon: f64, p: f64) -> Result<(f64, f64)> {
    check_range("epsilon", epsilon, 0.0, 1.0)?;
    let hp = binary_entropy(p)?;
    Ok((
        (1.0 - 2.0 * epsilon) * hp,
        (1.0 - epsilon) * hp - binary_entropy(epsilon)?,
    ))
}
