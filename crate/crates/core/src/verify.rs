//! Verification suites. Every case is deterministic: random cases draw from
//! a ChaCha stream seeded per case, and cases are collected in index order
//! whatever the thread count.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::capacity::{
    additivity_check_pair, additivity_sample, capacity_curve, check_antidegradable_gad,
    check_degradable_ad, erasure_reference, linspace, DEFAULT_TOL,
};
use crate::channels::{
    choi_distance, complementary, compose, gad_env_qubit_channel, make_ad, make_erasure, make_gad,
    random_channel, Family,
};
use crate::closedform::errata::{self, Erratum};
use crate::closedform::{
    closed_form_value, derivative_dtheta, extremum_scan, finite_difference_dtheta,
    generic_entropies, generic_value, phase_deviation, ExtremumKind, InputParams,
};
use crate::linalg::random::random_density_matrix;
use crate::output::{read_csv, Cell, Table};
use crate::qinfo::{
    coherent_information, information, output_entropies, rci_via_environment, von_neumann_entropy,
    Measure,
};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 1;
pub const FD_STEP: f64 = 1e-5;
pub const DERIVATIVE_POINTS: usize = 500;
pub const ADDITIVITY_DRAWS: usize = 1000;
pub const PHASE_DRAWS: usize = 50;
pub const IDENTITY_DRAWS: usize = 200;
const SCAN_GRID: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    ClosedForm,
    Derivatives,
    Additivity,
    Degradability,
    Phase,
    Scans,
    Identities,
    RoundTrip,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::ClosedForm,
        Suite::Derivatives,
        Suite::Additivity,
        Suite::Degradability,
        Suite::Phase,
        Suite::Scans,
        Suite::Identities,
        Suite::RoundTrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ClosedForm => "closed-form",
            Suite::Derivatives => "derivatives",
            Suite::Additivity => "additivity",
            Suite::Degradability => "degradability",
            Suite::Phase => "phase",
            Suite::Scans => "scans",
            Suite::Identities => "identities",
            Suite::RoundTrip => "roundtrip",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::ClosedForm | Suite::Additivity => 1e-9,
            Suite::Derivatives | Suite::Scans => 1e-6,
            Suite::Degradability | Suite::Phase | Suite::Identities => 1e-10,
            Suite::RoundTrip => 1e-11,
        }
    }

    fn tag(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).expect("listed") as u64 + 1
    }

    /// Errata entries whose reconciliation this suite exercises.
    fn owns_erratum(self, id: &str) -> bool {
        match self {
            Suite::Derivatives => id.starts_with("gad-derivative"),
            Suite::Degradability => matches!(id, "gad-mixture-weights" | "gad-env-qubit"),
            Suite::ClosedForm => {
                !id.starts_with("gad-derivative")
                    && !matches!(id, "gad-mixture-weights" | "gad-env-qubit")
            }
            _ => false,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown suite {s}")))
    }
}

/// One case: a deviation compared against the suite tolerance and a
/// structural condition that does not depend on it.
#[derive(Debug, Clone, Copy)]
struct Outcome {
    deviation: f64,
    structure_ok: bool,
}

impl Outcome {
    fn dev(deviation: f64) -> Self {
        Self {
            deviation,
            structure_ok: true,
        }
    }

    fn check(structure_ok: bool, deviation: f64) -> Self {
        Self {
            deviation,
            structure_ok,
        }
    }

    fn passes(&self, tol: f64) -> bool {
        self.structure_ok && self.deviation <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub cases: usize,
    pub failures: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub errata: Vec<&'static str>,
    /// Reported on the error stream only, so reports stay byte-identical.
    pub wall_time: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub suites: Vec<SuiteReport>,
    pub errata: Vec<Erratum>,
}

impl VerifyReport {
    pub fn failures(&self) -> usize {
        self.suites.iter().map(|s| s.failures).sum()
    }

    pub fn table(&self) -> Result<Table> {
        let mut t = Table::new([
            "suite",
            "cases",
            "failures",
            "max_deviation",
            "tolerance",
            "status",
            "errata",
        ]);
        for s in &self.suites {
            t.push(vec![
                s.suite.name().into(),
                s.cases.into(),
                s.failures.into(),
                s.max_deviation.into(),
                s.tolerance.into(),
                (if s.passed() { "pass" } else { "fail" }).into(),
                s.errata.join(";").into(),
            ])?;
        }
        Ok(t)
    }

    pub fn errata_table(&self) -> Result<Table> {
        errata_table(&self.errata)
    }
}

pub fn errata_table(entries: &[Erratum]) -> Result<Table> {
    let mut t = Table::new([
        "id",
        "subject",
        "printed",
        "reconciled",
        "changed",
        "printed_deviation",
        "reconciled_deviation",
    ]);
    for e in entries {
        t.push(vec![
            e.id.into(),
            e.subject.into(),
            e.printed.into(),
            e.reconciled.into(),
            e.changed.into(),
            e.printed_deviation.into(),
            e.reconciled_deviation.into(),
        ])?;
    }
    Ok(t)
}

/// Runs `suites` in order. `tolerance` overrides every suite's default.
pub fn run(suites: &[Suite], tolerance: Option<f64>, seed: u64) -> Result<VerifyReport> {
    if let Some(t) = tolerance {
        if !(t >= 0.0) {
            return Err(Error::Precondition(format!(
                "tolerance must be nonnegative, got {t}"
            )));
        }
    }
    let errata = errata::report()?;
    let suites = suites
        .iter()
        .map(|&s| run_suite(s, tolerance, seed, &errata))
        .collect::<Result<_>>()?;
    Ok(VerifyReport { suites, errata })
}

fn run_suite(
    suite: Suite,
    tolerance: Option<f64>,
    seed: u64,
    errata: &[Erratum],
) -> Result<SuiteReport> {
    let start = Instant::now();
    let tol = tolerance.unwrap_or(suite.default_tolerance());
    let outcomes = match suite {
        Suite::ClosedForm => closed_form_cases()?,
        Suite::Derivatives => derivative_cases(seed)?,
        Suite::Additivity => additivity_cases(seed)?,
        Suite::Degradability => degradability_cases()?,
        Suite::Phase => phase_cases(seed)?,
        Suite::Scans => scan_cases()?,
        Suite::Identities => identity_cases(seed)?,
        Suite::RoundTrip => round_trip_cases()?,
    };
    let failures = outcomes.iter().filter(|o| !o.passes(tol)).count();
    let max_deviation =
        outcomes
            .iter()
            .map(|o| o.deviation)
            .fold(0.0, |m, d| if d.is_nan() || d > m { d } else { m });
    let errata = errata
        .iter()
        .filter(|e| suite.owns_erratum(e.id))
        .map(|e| e.id)
        .collect();
    Ok(SuiteReport {
        suite,
        cases: outcomes.len(),
        failures,
        max_deviation,
        tolerance: tol,
        errata,
        wall_time: start.elapsed(),
    })
}

fn case_rng(seed: u64, suite: Suite, index: usize) -> ChaCha8Rng {
    let mixed = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(suite.tag() << 40)
        .wrapping_add(index as u64);
    ChaCha8Rng::seed_from_u64(mixed)
}

fn par_cases(n: usize, f: impl Fn(usize) -> Result<Outcome> + Sync + Send) -> Result<Vec<Outcome>> {
    (0..n).into_par_iter().map(f).collect()
}

/// Interior grid `{0.1, …, 0.9}`.
fn grid9() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

fn closed_form_cases() -> Result<Vec<Outcome>> {
    let g = grid9();
    let mut points = Vec::new();
    for family in [Family::Ad, Family::Gad] {
        for &eta in &g {
            for &alpha in &g {
                if family == Family::Ad && alpha != g[0] {
                    continue;
                }
                for &p in &g {
                    for &t in &g {
                        for m in Measure::BOTH {
                            points.push((family, m, eta, alpha, p, t * PI));
                        }
                    }
                }
            }
        }
    }
    par_cases(points.len(), |k| {
        let (family, m, eta, alpha, p, theta) = points[k];
        let params = InputParams::new(p, theta, 0.0)?;
        let cf = closed_form_value(family, m, eta, alpha, &params)?.value;
        let gen = generic_value(family, m, eta, alpha, &params)?.value;
        Ok(Outcome::dev((cf - gen).abs()))
    })
}

fn derivative_cases(seed: u64) -> Result<Vec<Outcome>> {
    let combos: Vec<(Family, Measure)> = [Family::Ad, Family::Gad]
        .into_iter()
        .flat_map(|f| Measure::BOTH.into_iter().map(move |m| (f, m)))
        .collect();
    par_cases(combos.len() * DERIVATIVE_POINTS, |k| {
        let (family, m) = combos[k / DERIVATIVE_POINTS];
        let mut rng = case_rng(seed, Suite::Derivatives, k);
        // Redraw the rare points where the analytic form is singular.
        for _ in 0..64 {
            let eta = rng.random_range(0.02..0.98);
            let alpha = rng.random_range(0.02..0.98);
            let p = rng.random_range(0.02..0.98);
            let theta = rng.random_range(0.05..PI - 0.05);
            let params = InputParams::new(p, theta, 0.0)?;
            let analytic = match derivative_dtheta(family, m, eta, alpha, &params) {
                Ok(d) => d.total,
                Err(Error::Domain { .. }) => continue,
                Err(e) => return Err(e),
            };
            let fd = finite_difference_dtheta(family, m, eta, alpha, &params, FD_STEP)?;
            return Ok(Outcome::dev((analytic - fd).abs()));
        }
        Ok(Outcome::check(false, f64::NAN))
    })
}

fn additivity_cases(seed: u64) -> Result<Vec<Outcome>> {
    par_cases(ADDITIVITY_DRAWS, |k| {
        let draw_seed = case_rng(seed, Suite::Additivity, k).random();
        let (a, b, rho) = additivity_sample(draw_seed)?;
        let r = additivity_check_pair(&a, &b, &rho)?;
        Ok(Outcome::dev((-r.margin).max(0.0)))
    })
}

fn degradability_cases() -> Result<Vec<Outcome>> {
    let mut out = Vec::new();
    for eta in linspace(0.5, 1.0, 19) {
        out.push(Outcome::dev(check_degradable_ad(eta)?.lhs));
    }
    for i in 1..=10 {
        for j in 0..10 {
            let (eta, alpha) = (0.05 * i as f64, j as f64 / 9.0);
            out.push(Outcome::dev(check_antidegradable_gad(eta, alpha)?.lhs));
        }
    }
    // D_a ∘ D_b = D_ab
    for (a, b) in linspace(0.05, 1.0, 19)
        .into_iter()
        .zip(linspace(1.0, 0.3, 19))
    {
        let d = choi_distance(&compose(&make_ad(a)?, &make_ad(b)?)?, &make_ad(a * b)?)?;
        out.push(Outcome::dev(d));
    }
    for eta in linspace(0.0, 1.0, 19) {
        let d = choi_distance(&complementary(&make_ad(eta)?), &make_ad(1.0 - eta)?)?;
        out.push(Outcome::dev(d));
    }
    for (eta, alpha) in [(0.2, 0.1), (0.5, 0.5), (0.7, 0.3), (0.9, 0.8), (0.35, 1.0)] {
        let d = choi_distance(
            &gad_env_qubit_channel(eta, alpha)?,
            &make_gad(1.0 - eta, alpha)?.0,
        )?;
        out.push(Outcome::dev(d));
    }
    Ok(out)
}

fn phase_cases(seed: u64) -> Result<Vec<Outcome>> {
    par_cases(PHASE_DRAWS, |k| {
        let mut rng = case_rng(seed, Suite::Phase, k);
        let family = if k % 2 == 0 { Family::Ad } else { Family::Gad };
        let eta = rng.random_range(0.0..=1.0);
        let alpha = rng.random_range(0.0..=1.0);
        let params = InputParams::new(
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..=PI),
            rng.random_range(0.0..2.0 * PI),
        )?;
        Ok(Outcome::dev(phase_deviation(family, eta, alpha, &params)?))
    })
}

fn scan_cases() -> Result<Vec<Outcome>> {
    let mut out = Vec::new();

    // Coherent information at η = 0.62, α = 1/2: a minima pair around a
    // maximum at π/2 for p = 1/4, and a maximum at π/2 for p = 1/2.
    let r = extremum_scan(Family::Gad, Measure::Ci, 0.62, 0.5, 0.25, SCAN_GRID)?;
    let interior: Vec<_> = r.interior().collect();
    let shape = interior.len() == 3
        && interior[0].kind == ExtremumKind::Min
        && interior[1].kind == ExtremumKind::Max
        && interior[2].kind == ExtremumKind::Min;
    let symmetry = if shape {
        (interior[0].theta + interior[2].theta - PI)
            .abs()
            .max((interior[1].theta - FRAC_PI_2).abs())
    } else {
        f64::NAN
    };
    out.push(Outcome::check(shape, symmetry));
    out.push(half_pi_maximum(Family::Gad, Measure::Ci, 0.62, 0.5, 0.5)?);

    // Reverse coherent information at η = 0.75, α = 0.4: no interior minima.
    for p in [0.25, 0.5] {
        let r = extremum_scan(Family::Gad, Measure::Rci, 0.75, 0.4, p, SCAN_GRID)?;
        let no_min = r.interior().all(|e| e.kind != ExtremumKind::Min);
        out.push(Outcome::check(no_min, 0.0));
        out.push(half_pi_maximum(Family::Gad, Measure::Rci, 0.75, 0.4, p)?);
    }

    // Amplitude damping: π/2 is the only interior extremum, a maximum above η = 1/2.
    for eta in [0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9] {
        for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
            for m in Measure::BOTH {
                let r = extremum_scan(Family::Ad, m, eta, 0.0, p, SCAN_GRID)?;
                let interior: Vec<_> = r.interior().collect();
                let unique = interior.len() == 1;
                let max_ok = eta < 0.5 || (unique && interior[0].kind == ExtremumKind::Max);
                let dev = if unique {
                    (interior[0].theta - FRAC_PI_2).abs()
                } else {
                    f64::NAN
                };
                out.push(Outcome::check(unique && max_ok, dev));
            }
        }
    }

    // A separable input (θ = 0) carries I = 0 and I_R = −S(B).
    for (family, eta, alpha, p) in [
        (Family::Ad, 0.7, 0.0, 0.3),
        (Family::Gad, 0.62, 0.5, 0.25),
        (Family::Gad, 0.75, 0.4, 0.5),
    ] {
        let s = generic_entropies(family, eta, alpha, &InputParams::new(p, 0.0, 0.0)?)?;
        out.push(Outcome::dev(
            s.coherent()
                .abs()
                .max((s.reverse_coherent() + s.second).abs()),
        ));
    }
    Ok(out)
}

/// π/2 is a local maximum and no other θ-extremum exceeds it.
fn half_pi_maximum(family: Family, m: Measure, eta: f64, alpha: f64, p: f64) -> Result<Outcome> {
    let r = extremum_scan(family, m, eta, alpha, p, SCAN_GRID)?;
    let Some(mid) = r
        .extrema
        .iter()
        .find(|e| (e.theta - FRAC_PI_2).abs() < 1e-6)
    else {
        return Ok(Outcome::check(false, f64::NAN));
    };
    let global = r.extrema.iter().all(|e| e.value <= mid.value + 1e-12);
    Ok(Outcome::check(
        mid.kind == ExtremumKind::Max && global,
        (mid.theta - FRAC_PI_2).abs(),
    ))
}

fn identity_cases(seed: u64) -> Result<Vec<Outcome>> {
    let mut out = par_cases(IDENTITY_DRAWS, |k| {
        let mut rng = case_rng(seed, Suite::Identities, k);
        let env = rng.random_range(1..=4);
        let ch = random_channel(2, 2, env, rng.random())?;
        let rank = rng.random_range(1..=2);
        let rho = random_density_matrix(2, rank, &mut rng);
        let rci = information(&ch, &rho, Measure::Rci)?.value;
        let via_env = rci_via_environment(&ch, &rho)?.value;
        let ci = coherent_information(&ch, &rho)?.value;
        let s_r = von_neumann_entropy(&rho)?;
        let s_b = von_neumann_entropy(&ch.apply(&rho)?)?;
        Ok(Outcome::dev(
            (via_env - rci)
                .abs()
                .max(((via_env - ci) - (s_r - s_b)).abs()),
        ))
    })?;
    for eps in [0.0, 0.2, 0.5, 0.7, 1.0] {
        for p in [0.1, 0.5, 0.8] {
            let ch = make_erasure(eps)?;
            let rho = crate::linalg::DensityMatrix::from_diagonal(&[1.0 - p, p])?;
            let e = output_entropies(&ch, &rho)?;
            let (ci, rci) = erasure_reference(eps, p)?;
            out.push(Outcome::dev(
                (e.coherent() - ci)
                    .abs()
                    .max((e.reverse_coherent() - rci).abs()),
            ));
        }
    }
    Ok(out)
}

fn round_trip_cases() -> Result<Vec<Outcome>> {
    let mut tables = Vec::new();
    let ad = capacity_curve(Family::Ad, (0.0, 1.0, 20), None, DEFAULT_TOL)?;
    tables.push(crate::cli::curve_table(&ad, &Measure::BOTH, false)?);
    let gad = capacity_curve(Family::Gad, (0.5, 1.0, 10), Some(0.2), DEFAULT_TOL)?;
    tables.push(crate::cli::curve_table(&gad, &Measure::BOTH, true)?);
    let mut out = Vec::new();
    for t in tables {
        let back = read_csv(&t.to_csv()?)?;
        let same_shape = back.header() == t.header() && back.rows().len() == t.rows().len();
        let mut worst = 0.0f64;
        let mut cells_ok = true;
        for (row, brow) in t.rows().iter().zip(back.rows()) {
            for (c, b) in row.iter().zip(brow) {
                match (c.as_f64(), b.as_f64()) {
                    (Some(x), Some(y)) => worst = worst.max((x - y).abs() / x.abs().max(1.0)),
                    _ => cells_ok &= matches!((c, b), (Cell::Missing, Cell::Missing)) || c == b,
                }
            }
        }
        out.push(Outcome::check(same_shape && cells_ok, worst));
    }
    Ok(out)
}
