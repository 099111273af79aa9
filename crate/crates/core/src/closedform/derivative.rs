use super::{generic_value, lambda_radicand, sign, GadCoefficients, InputParams};
use crate::channels::Family;
use crate::qinfo::Measure;
use crate::{Error, Result};

/// Radicands closer to 1 than this make `log[(1−√a)/(1+√a)]` blow up.
const RADICAND_EDGE: f64 = 1e-12;
/// Radicands below this make `1/√a` blow up.
const RADICAND_FLOOR: f64 = 1e-24;

/// Analytic `∂I/∂θ` together with the pieces it is assembled from.
///
/// Amplitude damping fills `f_terms`; the generalized channel fills the
/// remaining optional fields.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeBreakdown {
    pub total: f64,
    /// `(x, F(x))` pairs.
    pub f_terms: Vec<(f64, f64)>,
    pub z_term: Option<f64>,
    /// `Y(i, j)` indexed `[i][j]`.
    pub y_terms: Option<[[f64; 2]; 2]>,
    /// `J(i, j) = log₂ μ_ij` indexed `[i][j]`.
    pub j_terms: Option<[[f64; 2]; 2]>,
    pub coeffs: Option<GadCoefficients>,
}

/// `−2·atanh(r)/r` in bits, i.e. `log₂[(1−r)/(1+r)] / r` for `r = √radicand`.
fn log_ratio_over_root(radicand: f64, term: &'static str) -> Result<f64> {
    if radicand >= 1.0 - RADICAND_EDGE {
        return Err(Error::Domain {
            term,
            detail: format!("radicand {radicand} too close to 1, log diverges"),
        });
    }
    if radicand <= RADICAND_FLOOR {
        return Err(Error::Domain {
            term,
            detail: format!("radicand {radicand:e} vanishes in the denominator"),
        });
    }
    let r = radicand.sqrt();
    Ok(-2.0 * r.atanh() / (r * std::f64::consts::LN_2))
}

/// `F(x) = x/√a · log₂[(1−√a)/(1+√a)]` with `a = (1−2xp)² + 4x(1−p)p cos²θ`.
pub fn f_term(x: f64, p: f64, theta: f64) -> Result<f64> {
    Ok(x * log_ratio_over_root(lambda_radicand(x, p, theta), "F(x)")?)
}

/// Which printed-or-reconciled form of the GAD bracket to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct GadForm {
    /// Use `t = p(1−p)cos²θ` inside `Y(i, j)`; the printed form has `cos²θ`.
    pub y_uses_t: bool,
    /// Weight of `Z` in the bracket; the printed form has 1.
    pub z_weight: f64,
}

impl GadForm {
    pub const RECONCILED: GadForm = GadForm {
        y_uses_t: true,
        z_weight: 2.0,
    };
    pub const PRINTED: GadForm = GadForm {
        y_uses_t: false,
        z_weight: 1.0,
    };
}

/// Analytic θ-derivative of the coherent (`Ci`) or reverse coherent (`Rci`)
/// information. `alpha` is ignored for amplitude damping.
///
/// Points where a square root in a denominator vanishes, or a logarithm
/// argument reaches zero, return [`Error::Domain`] naming the term.
pub fn derivative_dtheta(
    family: Family,
    measure: Measure,
    eta: f64,
    alpha: f64,
    params: &InputParams,
) -> Result<DerivativeBreakdown> {
    match family {
        Family::Ad => ad_derivative(measure, eta, params),
        Family::Gad => gad_derivative(measure, eta, alpha, params, GadForm::RECONCILED),
        other => Err(Error::Precondition(format!(
            "no analytic derivative for {}",
            other.name()
        ))),
    }
}

fn ad_derivative(measure: Measure, eta: f64, params: &InputParams) -> Result<DerivativeBreakdown> {
    crate::error::check_range("eta", eta, 0.0, 1.0)?;
    let (p, th) = (params.p(), params.theta());
    let x_plus = match measure {
        Measure::Ci => eta,
        Measure::Rci => 1.0,
    };
    let f_plus = f_term(x_plus, p, th)?;
    let f_joint = f_term(1.0 - eta, p, th)?;
    let total = -p * (1.0 - p) * (2.0 * th).sin() * (f_plus - f_joint);
    Ok(DerivativeBreakdown {
        total,
        f_terms: vec![(x_plus, f_plus), (1.0 - eta, f_joint)],
        z_term: None,
        y_terms: None,
        j_terms: None,
        coeffs: None,
    })
}

pub(crate) fn gad_derivative(
    measure: Measure,
    eta: f64,
    alpha: f64,
    params: &InputParams,
    form: GadForm,
) -> Result<DerivativeBreakdown> {
    crate::error::check_range("eta", eta, 0.0, 1.0)?;
    crate::error::check_range("alpha", alpha, 0.0, 1.0)?;
    let (p, th) = (params.p(), params.theta());
    let k = GadCoefficients::new(eta, alpha, p);
    let t = params.t();

    let (e, f) = k.marginal(measure);
    let z = -f * log_ratio_over_root(e + f * t, "Z")?;

    let ty = if form.y_uses_t { t } else { th.cos().powi(2) };
    let big_a = k.a + k.b * ty;
    if big_a <= RADICAND_FLOOR {
        return Err(Error::Domain {
            term: "Y(i,j)",
            detail: format!("a + b·t = {big_a:e} vanishes"),
        });
    }
    let ra = big_a.sqrt();
    let mut y = [[0.0; 2]; 2];
    for (i, row) in y.iter_mut().enumerate() {
        let s = sign(i);
        let q = k.c + k.d * ty - s * ra;
        if q <= RADICAND_FLOOR {
            return Err(Error::Domain {
                term: "Y(i,j)",
                detail: format!("c + d·t ∓ √A = {q:e} vanishes for i = {i}"),
            });
        }
        let rq = std::f64::consts::SQRT_2 * q.sqrt();
        for (j, v) in row.iter_mut().enumerate() {
            *v = s * (k.b / ra + sign(j) * (k.b / ra - s * 2.0 * k.d) / rq);
        }
    }

    let mu = super::gad_joint_eigenvalue_grid(&k, t);
    let mut jt = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            if mu[i][j] <= 0.0 {
                return Err(Error::Domain {
                    term: "J(i,j)",
                    detail: format!("eigenvalue μ_{i}{j} = {:e} is not positive", mu[i][j]),
                });
            }
            jt[i][j] = mu[i][j].log2();
        }
    }

    let sum: f64 = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| y[i][j] * (1.0 + jt[i][j]))
        .sum();
    let total = p * (1.0 - p) / 8.0 * (2.0 * th).sin() * (form.z_weight * z + sum);
    Ok(DerivativeBreakdown {
        total,
        f_terms: Vec::new(),
        z_term: Some(z),
        y_terms: Some(y),
        j_terms: Some(jt),
        coeffs: Some(k),
    })
}

/// Central difference `[I(θ+h) − I(θ−h)]/2h` of the generic-path value.
pub fn finite_difference_dtheta(
    family: Family,
    measure: Measure,
    eta: f64,
    alpha: f64,
    params: &InputParams,
    step: f64,
) -> Result<f64> {
    let at = |theta: f64| {
        let q = InputParams::unchecked(params.p(), theta, params.phi());
        generic_value(family, measure, eta, alpha, &q).map(|v| v.value)
    };
    Ok((at(params.theta() + step)? - at(params.theta() - step)?) / (2.0 * step))
}
