//! Analytic predictions and their comparison with orbit statistics.

pub mod expansions;
pub mod radial;

pub use expansions::{
    delta_ratio, disc_grid, epsilon_ratio, expansion_defect_action, expansion_defect_lognorm, ActionDefect,
    Expansion, RatioOutcome,
};
pub use radial::{ks_compare, radial_cdf, rho, weak_identity_residual, weak_identity_residual_with, RadialLaw};

use crate::dynamics::{OrbitAccumulator, RadialFn};
use crate::error::Result;
use crate::models::DerivedConstants;

/// Which moment bound of the invariant measure applies, with its scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MomentRegime {
    /// `𝔼|z|² = O(max(δ, ε, ε²/δ))`, available when `C > 0`.
    Center { scale: f64 },
    /// `1 − 𝔼|z|² = O(max(ε^{1/2}, δ^{1/2}/ε))`, available when `D > 0`.
    Boundary { deficit_scale: f64 },
    Inapplicable,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentReport {
    pub mean_radius_sq: f64,
    pub regime: MomentRegime,
}

/// Empirical `𝔼|z|²` and the tighter of the two applicable bounds.
pub fn radial_moments(
    acc: &OrbitAccumulator,
    constants: &DerivedConstants,
    epsilon: f64,
    delta: f64,
) -> Result<MomentReport> {
    let mean_radius_sq = acc.mean_radius_sq()?;
    let center = (constants.c > 0.0 && delta > 0.0).then(|| delta.max(epsilon).max(epsilon * epsilon / delta));
    let boundary = (constants.d > 0.0 && epsilon > 0.0).then(|| epsilon.sqrt().max(delta.sqrt() / epsilon));
    let regime = match (center, boundary) {
        (Some(c), Some(b)) if b < c => MomentRegime::Boundary { deficit_scale: b },
        (Some(c), _) => MomentRegime::Center { scale: c },
        (None, Some(b)) => MomentRegime::Boundary { deficit_scale: b },
        (None, None) => MomentRegime::Inapplicable,
    };
    Ok(MomentReport { mean_radius_sq, regime })
}

/// `(Cδ + Dε², γ̂ − (Cδ + Dε²))`.
pub fn gamma_residual(constants: &DerivedConstants, epsilon: f64, delta: f64, gamma_hat: f64) -> (f64, f64) {
    let prediction = constants.gamma_prediction(epsilon, delta);
    (prediction, gamma_hat - prediction)
}

/// `(2Cδ·avg(s g′), Dε²·avg((1 − s)²(g′ + s g″)))` from the recorded sums.
pub fn second_order_balance(
    acc: &OrbitAccumulator,
    constants: &DerivedConstants,
    epsilon: f64,
    delta: f64,
    g: RadialFn,
) -> Result<(f64, f64)> {
    let (drift, diffusion) = acc.balance_averages(g)?;
    Ok((2.0 * constants.c * delta * drift, constants.d * epsilon * epsilon * diffusion))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupportStatus {
    Pass,
    Fail,
    /// Without drift the support is not confined.
    Inapplicable,
}

impl SupportStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SupportStatus::Pass => "pass",
            SupportStatus::Fail => "fail",
            SupportStatus::Inapplicable => "inapplicable",
        }
    }
}

pub const SUPPORT_SLACK_DEFAULT: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportReport {
    pub max_radius_sq: f64,
    pub bound: f64,
    /// `c·(ε/δ + δ)`.
    pub slack: f64,
    pub status: SupportStatus,
}

/// Compares the orbit's largest `|z|²` with `bound + c·(ε/δ + δ)`.
pub fn support_bound_check(acc: &OrbitAccumulator, bound: f64, epsilon: f64, delta: f64, c: f64) -> SupportReport {
    let max_radius_sq = acc.max_radius_sq;
    if delta <= 0.0 {
        return SupportReport { max_radius_sq, bound, slack: f64::INFINITY, status: SupportStatus::Inapplicable };
    }
    let slack = c * (epsilon / delta + delta);
    let status = if max_radius_sq <= bound + slack { SupportStatus::Pass } else { SupportStatus::Fail };
    SupportReport { max_radius_sq, bound, slack, status }
}

/// Theorem checks for one run, gathered for reporting.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComparisonReport {
    /// `None` when `λ` is undefined.
    pub ks_statistic: Option<f64>,
    pub mean_radius_sq: f64,
    pub predicted_gamma: f64,
    pub empirical_gamma: f64,
    pub residual: f64,
    /// Balance sides for the first recorded balance function, if any.
    pub balance: Option<(f64, f64)>,
}

pub fn compare(
    acc: &OrbitAccumulator,
    constants: &DerivedConstants,
    epsilon: f64,
    delta: f64,
) -> Result<ComparisonReport> {
    let ks_statistic = match constants.lambda_at(epsilon, delta).ok().filter(|l| *l > 0.0) {
        Some(lambda) => Some(ks_compare(acc, &RadialLaw::new(lambda)?)?),
        None => None,
    };
    let empirical_gamma = acc.gamma()?;
    let (predicted_gamma, residual) = gamma_residual(constants, epsilon, delta, empirical_gamma);
    let balance = match acc.layout.balance.first() {
        Some(&g) => Some(second_order_balance(acc, constants, epsilon, delta, g)?),
        None => None,
    };
    Ok(ComparisonReport {
        ks_statistic,
        mean_radius_sq: acc.mean_radius_sq()?,
        predicted_gamma,
        empirical_gamma,
        residual,
        balance,
    })
}
