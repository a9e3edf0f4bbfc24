use super::{Atom, ModelSpec, Uniform};
use crate::error::{Error, Result};
use crate::su11::{cayley, Mat2C, Su11Coeffs, C64};

/// The single-site Anderson model at energy `E ∈ (−2, 2)` with potential
/// `εw`, `w ~ U[w_low, w_high]`, and optional random factor `d` on `Q`.
///
/// With `k = arccos(−E/2)`: `η = −k`, `P = w (B₂ + B₃)/(2 sin k)`, `P′ = 0`,
/// `Q = (B₂ + B₃)/(2 sin k)`.
pub fn anderson_model(
    energy: f64,
    epsilon: f64,
    delta: f64,
    w: Uniform,
    d: Option<Uniform>,
) -> Result<ModelSpec> {
    if !(energy.abs() < 2.0) {
        return Err(Error::InvalidModel(format!("Anderson energy {energy} is not in (-2, 2)")));
    }
    let k = (-energy / 2.0).acos();
    let s = 1.0 / (2.0 * k.sin());
    let atom = Atom {
        weight: 1.0,
        eta: -k,
        p: Su11Coeffs::ZERO,
        p_w: Su11Coeffs::new(0.0, s, s),
        p_prime: Su11Coeffs::ZERO,
        q: Su11Coeffs::new(0.0, s, s),
        d_factor: 1.0,
    };
    ModelSpec::exponential(vec![atom], Some(w), d, epsilon, delta)
}

/// `M [[εw − E + iδ, −1], [1, 0]] M⁻¹` with `M = C M′`, built directly from
/// the transfer matrix rather than from the exponential.
pub fn anderson_reference_matrix(energy: f64, epsilon: f64, delta: f64, w: f64) -> Mat2C {
    let k = (-energy / 2.0).acos();
    let r = 1.0 / k.sin().sqrt();
    let m_prime = Mat2C::real(k.sin() * r, 0.0, -k.cos() * r, r);
    let m = cayley() * m_prime;
    let s = Mat2C::new(
        C64::new(epsilon * w - energy, delta),
        C64::new(-1.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
    );
    m * s * m.inverse()
}
