use crate::dynamics::{OrbitAccumulator, RadialAxis, RadialFn};
use crate::error::{Error, Result};
use crate::quadrature::integrate;

/// Upper limit in `y = λ s/(1 − s)`; the neglected tail is `e^{−60}`.
const Y_MAX: f64 = 60.0;
const QUAD_TOL: f64 = 1e-13;

/// The approximate radial density `ρ_λ(s) = λ(1 − s)⁻² exp(−λs/(1 − s))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialLaw {
    lambda: f64,
}

impl RadialLaw {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Density at `s ∈ [0, 1)`, extended by its limit 0 at `s = 1`.
    pub fn rho(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidArgument(format!("rho needs s in [0, 1), got {s}")));
        }
        if s == 1.0 {
            return Ok(0.0);
        }
        let u = 1.0 - s;
        let x = s / u;
        Ok((self.lambda.ln() - 2.0 * u.ln() - self.lambda * x).exp())
    }

    /// `1 − exp(−λs/(1 − s))`, clamped to `[0, 1]` outside the interval.
    pub fn cdf(&self, s: f64) -> f64 {
        if s <= 0.0 {
            0.0
        } else if s >= 1.0 {
            1.0
        } else {
            -(-self.lambda * s / (1.0 - s)).exp_m1()
        }
    }

    /// `∫₀¹ ρ_λ(s) f(s) ds`, computed in `y = λs/(1 − s)` where the density
    /// becomes `e^{−y}` times a smooth factor.
    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        integrate(
            |y| {
                let x = y / self.lambda;
                let s = x / (1.0 + x);
                let ds_dy = 1.0 / (self.lambda * (1.0 + x) * (1.0 + x));
                self.rho(s).unwrap_or(0.0) * f(s) * ds_dy
            },
            0.0,
            Y_MAX,
            QUAD_TOL,
        )
        .value
    }

    /// `∫₀¹ ρ_λ ds`, evaluated from the density formula itself.
    pub fn normalization(&self) -> f64 {
        self.expectation(|_| 1.0)
    }

    /// `∫₀¹ ρ_λ(s) s ds`.
    pub fn mean(&self) -> f64 {
        self.expectation(|s| s)
    }
}

pub fn rho(law: &RadialLaw, s: f64) -> Result<f64> {
    law.rho(s)
}

pub fn radial_cdf(law: &RadialLaw, s: f64) -> f64 {
    law.cdf(s)
}

/// Value of `s = |z|²` at the right edge of histogram bin `k`.
pub fn bin_edge(axis: RadialAxis, bins: usize, k: usize) -> f64 {
    let t = (k + 1) as f64 / bins as f64;
    match axis {
        RadialAxis::Disc => t,
        RadialAxis::Sphere if k + 1 == bins => f64::INFINITY,
        RadialAxis::Sphere => (std::f64::consts::FRAC_PI_2 * t).tan(),
    }
}

/// Sup over bin edges of `|F̂(s) − F_λ(s)|`.
///
/// Meaningful once the accumulator holds at least 10⁴ samples. With `k`
/// bins the edge sampling can miss up to `1/k` of the true distance.
pub fn ks_compare(acc: &OrbitAccumulator, law: &RadialLaw) -> Result<f64> {
    let cdf = acc.empirical_cdf()?;
    let bins = acc.layout.bins;
    Ok(cdf
        .iter()
        .enumerate()
        .map(|(k, &f)| (f - law.cdf(bin_edge(acc.layout.axis, bins, k))).abs())
        .fold(0.0, f64::max))
}

/// `λ s g′(s) − (1 − s)²(g′(s) + s g″(s))`.
pub fn generator_image(lambda: f64, g: RadialFn, s: f64) -> f64 {
    lambda * s * g.d1(s) - (1.0 - s) * (1.0 - s) * (g.d1(s) + s * g.d2(s))
}

/// `∫₀¹ ρ_λ (L_λ g) ds`, which vanishes for the exact density.
pub fn weak_identity_residual(law: &RadialLaw, g: RadialFn) -> f64 {
    weak_identity_residual_with(law, law.lambda, g)
}

/// As [`weak_identity_residual`] with the operator built for `lambda_op`.
pub fn weak_identity_residual_with(law: &RadialLaw, lambda_op: f64, g: RadialFn) -> f64 {
    law.expectation(|s| generator_image(lambda_op, g, s))
}
