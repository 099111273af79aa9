use std::f64::consts::PI;

use super::{closed_form_value, derivative_dtheta, InputParams};
use crate::channels::Family;
use crate::qinfo::Measure;
use crate::{Error, Result};

const BISECTION_WIDTH: f64 = 1e-8;
const ZERO_SLOPE: f64 = 1e-12;
const FLAT_CURVATURE: f64 = 1e-12;
pub const MIN_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtremumKind {
    Max,
    Min,
    /// Second difference below `1e-12` in magnitude.
    Degenerate,
}

impl ExtremumKind {
    pub fn name(self) -> &'static str {
        match self {
            ExtremumKind::Max => "max",
            ExtremumKind::Min => "min",
            ExtremumKind::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub theta: f64,
    pub kind: ExtremumKind,
    /// Closed-form information at `theta`.
    pub value: f64,
    /// `I(θ+h) − 2I(θ) + I(θ−h)` with `h` the grid spacing.
    pub second_difference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// Sorted by θ; the endpoints 0 and π are always present.
    pub extrema: Vec<Extremum>,
    /// Grid points where the analytic derivative hit a domain error.
    pub gaps: Vec<f64>,
}

impl ScanResult {
    /// Extrema strictly inside `(0, π)`.
    pub fn interior(&self) -> impl Iterator<Item = &Extremum> {
        self.extrema
            .iter()
            .filter(|e| e.theta > 1e-9 && e.theta < PI - 1e-9)
    }
}

/// Locates the θ-extrema of the information on `[0, π]` at fixed `p`.
///
/// The analytic derivative is sampled on `grid_n + 1` uniform points; sign
/// changes are refined by bisection and grid points with `|∂I/∂θ| ≤ 1e-12`
/// count as extrema directly (a run of them collapses to its midpoint). Each
/// candidate is classified by the second difference of the closed-form value.
pub fn extremum_scan(
    family: Family,
    measure: Measure,
    eta: f64,
    alpha: f64,
    p: f64,
    grid_n: usize,
) -> Result<ScanResult> {
    if grid_n < MIN_GRID {
        return Err(Error::Precondition(format!(
            "grid_n must be at least {MIN_GRID}, got {grid_n}"
        )));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Range {
            name: "p",
            value: p,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let h = PI / grid_n as f64;
    let slope = |theta: f64| {
        derivative_dtheta(
            family,
            measure,
            eta,
            alpha,
            &InputParams::unchecked(p, theta, 0.0),
        )
        .map(|d| d.total)
    };
    let value = |theta: f64| {
        closed_form_value(
            family,
            measure,
            eta,
            alpha,
            &InputParams::unchecked(p, theta, 0.0),
        )
        .map(|v| v.value)
    };

    let mut gaps = Vec::new();
    let mut samples: Vec<Option<f64>> = Vec::with_capacity(grid_n + 1);
    samples.push(None);
    for k in 1..grid_n {
        let theta = k as f64 * h;
        match slope(theta) {
            Ok(d) => samples.push(Some(d)),
            Err(Error::Domain { .. }) => {
                gaps.push(theta);
                samples.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    samples.push(None);

    // Walk the valid samples in order. Gaps are stepped over, so a sign
    // change across a singular grid point is still bracketed.
    let mut candidates = vec![0.0, PI];
    let mut prev: Option<(usize, f64)> = None;
    let mut run: Option<(usize, usize)> = None;
    for (k, sample) in samples.iter().enumerate().take(grid_n).skip(1) {
        let Some(d) = *sample else { continue };
        if d.abs() <= ZERO_SLOPE {
            run = Some(match run {
                Some((start, _)) => (start, k),
                None => (k, k),
            });
            continue;
        }
        if let Some((start, end)) = run.take() {
            candidates.push((start + end) as f64 / 2.0 * h);
        } else if let Some((kp, dp)) = prev {
            if dp.signum() != d.signum() {
                candidates.push(bisect(&slope, kp as f64 * h, k as f64 * h, dp)?);
            }
        }
        prev = Some((k, d));
    }
    if let Some((start, end)) = run {
        candidates.push((start + end) as f64 / 2.0 * h);
    }

    let mut extrema = Vec::with_capacity(candidates.len());
    for theta in candidates {
        let v = value(theta)?;
        let d2 = value(theta + h)? - 2.0 * v + value(theta - h)?;
        let kind = if d2.abs() < FLAT_CURVATURE {
            ExtremumKind::Degenerate
        } else if d2 < 0.0 {
            ExtremumKind::Max
        } else {
            ExtremumKind::Min
        };
        extrema.push(Extremum {
            theta,
            kind,
            value: v,
            second_difference: d2,
        });
    }
    extrema.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    Ok(ScanResult { extrema, gaps })
}

fn bisect(slope: &impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, d_lo: f64) -> Result<f64> {
    let sign_lo = d_lo.signum();
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        let d = match slope(mid) {
            Ok(d) => d,
            Err(Error::Domain { .. }) => return Ok(mid),
            Err(e) => return Err(e),
        };
        if d == 0.0 {
            return Ok(mid);
        }
        if d.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed-form information and analytic slope on `n + 1` uniform θ points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaPoint {
    pub theta: f64,
    pub value: f64,
    /// `None` where the analytic derivative is outside its domain.
    pub slope: Option<f64>,
}

pub fn theta_profile(
    family: Family,
    measure: Measure,
    eta: f64,
    alpha: f64,
    p: f64,
    n: usize,
) -> Result<Vec<ThetaPoint>> {
    if n < 1 {
        return Err(Error::Precondition(
            "theta profile needs at least 2 points".into(),
        ));
    }
    (0..=n)
        .map(|k| {
            let theta = PI * k as f64 / n as f64;
            let params = InputParams::new(p, theta.min(PI), 0.0)?;
            let value = closed_form_value(family, measure, eta, alpha, &params)?.value;
            let slope = match derivative_dtheta(family, measure, eta, alpha, &params) {
                Ok(d) => Some(d.total),
                Err(Error::Domain { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(ThetaPoint {
                theta,
                value,
                slope,
            })
        })
        .collect()
}
