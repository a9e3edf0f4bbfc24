use serde::Serialize;

use super::ModelSpec;
use crate::error::{Error, Result};
use crate::su11::C64;

const CLASSIFY_TOL: f64 = 1e-12;
const ANOMALY_TOL: f64 = 1e-12;
/// `D` at or below this value leaves `λ` undefined.
const D_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DClassification {
    Positive,
    ZeroCaseI,
    ZeroCaseIi,
}

impl DClassification {
    pub fn as_str(&self) -> &'static str {
        match self {
            DClassification::Positive => "positive",
            DClassification::ZeroCaseI => "zero_case_i",
            DClassification::ZeroCaseIi => "zero_case_ii",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivedConstants {
    pub c: f64,
    pub d: f64,
    /// `2C/D`, so that `λ = lambda_per_unit_ratio · δ/ε²`.
    pub lambda_per_unit_ratio: Option<f64>,
    /// `λ` at the model's own `(ε, δ)`, when defined.
    pub lambda: Option<f64>,
    pub beta_mean: C64,
    pub beta_abs2_mean: f64,
    pub phase2_mean: C64,
    pub phase4_mean: C64,
    pub d_classification: DClassification,
}

impl DerivedConstants {
    /// `λ = 2(C/D)(δ/ε²)`.
    pub fn lambda_at(&self, epsilon: f64, delta: f64) -> Result<f64> {
        let ratio = self.lambda_per_unit_ratio.ok_or_else(|| {
            Error::LambdaUndefined(format!("D = {:e} is not positive", self.d))
        })?;
        if epsilon == 0.0 {
            return Err(Error::LambdaUndefined("epsilon = 0".into()));
        }
        Ok(ratio * delta / (epsilon * epsilon))
    }

    /// `Cδ + Dε²`.
    pub fn gamma_prediction(&self, epsilon: f64, delta: f64) -> f64 {
        self.c * delta + self.d * epsilon * epsilon
    }
}

/// Moments over atoms and the uniform laws, in closed form.
///
/// With `w ~ U` the first-order coefficient is affine in `w`, so `𝔼β`,
/// `𝔼|β|²` and `𝔼(e^{2iη} β̄)` need only `𝔼w` and `𝔼w²`.
pub fn constants(spec: &ModelSpec) -> Result<DerivedConstants> {
    let (ew, ew2) = spec.w_law().map_or((0.0, 0.0), |w| (w.mean(), w.second_moment()));
    let ed = spec.d_law().map_or(1.0, |d| d.mean());

    let mut c = 0.0;
    let mut beta_mean = C64::new(0.0, 0.0);
    let mut beta_abs2 = 0.0;
    let mut phase2 = C64::new(0.0, 0.0);
    let mut phase4 = C64::new(0.0, 0.0);
    let mut phase_beta_bar = C64::new(0.0, 0.0);
    for a in spec.atoms() {
        let wt = a.weight;
        let b0 = a.p.beta();
        let b1 = a.p_w.beta();
        let e2 = C64::from_polar(1.0, 2.0 * a.eta);
        let mean_b = b0 + b1 * ew;
        c += wt * a.q.p3 * a.d_factor * ed;
        beta_mean += mean_b * wt;
        beta_abs2 += wt * (b0.norm_sqr() + 2.0 * ew * (b0 * b1.conj()).re + ew2 * b1.norm_sqr());
        phase2 += e2 * wt;
        phase4 += C64::from_polar(1.0, 4.0 * a.eta) * wt;
        phase_beta_bar += e2 * mean_b.conj() * wt;
    }

    let one = C64::new(1.0, 0.0);
    if (one - phase2).norm() <= ANOMALY_TOL {
        return Err(Error::Anomaly);
    }
    let d = 0.5 * beta_abs2 + (beta_mean * phase_beta_bar / (one - phase2)).re;

    let d_classification = classify(spec, beta_mean, beta_abs2, phase2, ew);
    let lambda_per_unit_ratio = (d > D_FLOOR).then(|| 2.0 * c / d);
    let lambda = match lambda_per_unit_ratio {
        Some(r) if spec.epsilon != 0.0 => Some(r * spec.delta / (spec.epsilon * spec.epsilon)),
        _ => None,
    };
    Ok(DerivedConstants {
        c,
        d,
        lambda_per_unit_ratio,
        lambda,
        beta_mean,
        beta_abs2_mean: beta_abs2,
        phase2_mean: phase2,
        phase4_mean: phase4,
        d_classification,
    })
}

/// The two vanishing cases for `D`: (i) `e^{2iη}` and `β` almost surely
/// constant; (ii) `𝔼e^{2iη} = 0` and `β = c(1 − e^{2iη})` for some `c`.
fn classify(
    spec: &ModelSpec,
    beta_mean: C64,
    beta_abs2: f64,
    phase2: C64,
    ew: f64,
) -> DClassification {
    let beta_var = beta_abs2 - beta_mean.norm_sqr();
    let phase_var = 1.0 - phase2.norm_sqr();
    if beta_var.abs() <= CLASSIFY_TOL && phase_var.abs() <= CLASSIFY_TOL {
        return DClassification::ZeroCaseI;
    }
    if phase2.norm() <= CLASSIFY_TOL {
        // Least squares for c in 𝔼|β − c u|² with u = 1 − e^{2iη}.
        let mut u2 = 0.0;
        let mut beta_u_bar = C64::new(0.0, 0.0);
        for a in spec.atoms() {
            let u = C64::new(1.0, 0.0) - C64::from_polar(1.0, 2.0 * a.eta);
            u2 += a.weight * u.norm_sqr();
            beta_u_bar += (a.p.beta() + a.p_w.beta() * ew) * u.conj() * a.weight;
        }
        let residual = if u2 > 0.0 { beta_abs2 - beta_u_bar.norm_sqr() / u2 } else { beta_abs2 };
        if residual.abs() <= CLASSIFY_TOL {
            return DClassification::ZeroCaseIi;
        }
    }
    DClassification::Positive
}

/// `ess sup |ξ_σ|/q_{3,σ}` over the atoms.
///
/// `Q` does not depend on `w`, and a positive factor `d` cancels in the
/// ratio, so the supremum is a maximum over atoms. Any atom with a
/// nonpositive effective `q₃` is an error.
pub fn xi_q3_bound(spec: &ModelSpec) -> Result<f64> {
    let d_low = spec.d_law().map_or(1.0, |d| d.low);
    let mut bound: f64 = 0.0;
    for (i, a) in spec.atoms().iter().enumerate() {
        if a.weight == 0.0 {
            continue;
        }
        if !(a.q.p3 > 0.0) || !(a.d_factor * d_low > 0.0) {
            return Err(Error::InvalidModel(format!("atom {i} has q3 <= 0")));
        }
        bound = bound.max(a.xi().norm() / a.q.p3);
    }
    Ok(bound)
}
