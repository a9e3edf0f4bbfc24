//! Random families `T^{ε,δ}_σ = R_η exp(εP + ε²P′ + iδ d Q)` and their
//! derived constants.

mod anderson;
mod config;
mod constants;
mod polymer;

pub use anderson::{anderson_model, anderson_reference_matrix};
pub use config::{load_model, parse_model};
pub use constants::{constants, xi_q3_bound, DClassification, DerivedConstants};
pub use polymer::{
    critical_energy_check, elliptic_basis_change, extract_generators, polymer_transfer,
    transfer_step, Block, CriticalReport, PolymerModel, PolymerSpec,
};

use crate::error::{Error, Result};
use crate::su11::{exp_traceless, Mat2C, Su11Coeffs, C64, DEFECT_TOL};

/// Uniform distribution on `[low, high]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Uniform {
    pub low: f64,
    pub high: f64,
}

impl Uniform {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite() && low <= high) {
            return Err(Error::InvalidModel(format!("bad uniform interval [{low}, {high}]")));
        }
        Ok(Self { low, high })
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.low + self.high)
    }

    pub fn second_moment(&self) -> f64 {
        let (a, b) = (self.low, self.high);
        (a * a + a * b + b * b) / 3.0
    }

    /// Maps a uniform variate on `[0, 1)` into the interval.
    pub fn at(&self, u: f64) -> f64 {
        self.low + (self.high - self.low) * u
    }
}

/// One atom σ of the coefficient-driven family.
///
/// The first-order generator is affine in the continuous parameter `w`:
/// `P_σ(w) = p + w·p_w`. `P′` and `Q` do not depend on `w`; `Q` is scaled
/// by `d_factor` and by the sampled `d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub weight: f64,
    pub eta: f64,
    pub p: Su11Coeffs,
    pub p_w: Su11Coeffs,
    pub p_prime: Su11Coeffs,
    pub q: Su11Coeffs,
    pub d_factor: f64,
}

impl Atom {
    pub fn new(weight: f64, eta: f64, p: Su11Coeffs, q: Su11Coeffs) -> Self {
        Self {
            weight,
            eta,
            p,
            p_w: Su11Coeffs::ZERO,
            p_prime: Su11Coeffs::ZERO,
            q,
            d_factor: 1.0,
        }
    }

    pub fn p_at(&self, w: f64) -> Su11Coeffs {
        self.p.plus(&self.p_w.scaled(w))
    }

    /// `β_σ(w) = p₁ − i p₂` of `P_σ(w)`.
    pub fn beta_at(&self, w: f64) -> C64 {
        self.p_at(w).beta()
    }

    /// `ξ_σ = q₁ − i q₂`.
    pub fn xi(&self) -> C64 {
        self.q.beta()
    }
}

/// One sampled σ: atom index plus the continuous parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Draw {
    pub atom: usize,
    pub w: f64,
    pub d: f64,
}

impl Draw {
    pub fn atom(atom: usize) -> Self {
        Self { atom, w: 0.0, d: 1.0 }
    }
}

#[derive(Clone, Debug)]
pub enum Family {
    /// Exact exponentials of the atoms; `w ≡ 0` without `w`, `d ≡ 1`
    /// without `d`.
    Exponential { atoms: Vec<Atom>, w: Option<Uniform>, d: Option<Uniform> },
    Polymer(PolymerModel),
}

/// A random family together with the parameters `(ε, δ)`.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub family: Family,
    pub epsilon: f64,
    pub delta: f64,
}

impl ModelSpec {
    pub fn exponential(
        atoms: Vec<Atom>,
        w: Option<Uniform>,
        d: Option<Uniform>,
        epsilon: f64,
        delta: f64,
    ) -> Result<Self> {
        let spec = Self { family: Family::Exponential { atoms, w, d }, epsilon, delta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn polymer(model: PolymerModel, epsilon: f64, delta: f64) -> Result<Self> {
        let spec = Self { family: Family::Polymer(model), epsilon, delta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_params(&self, epsilon: f64, delta: f64) -> Self {
        Self { family: self.family.clone(), epsilon, delta }
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.delta.is_finite()) {
            return Err(Error::InvalidModel("epsilon and delta must be finite".into()));
        }
        let weights: Vec<f64> = match &self.family {
            Family::Exponential { atoms, .. } => {
                for a in atoms {
                    let ok = a.eta.is_finite()
                        && a.d_factor.is_finite()
                        && [a.p, a.p_w, a.p_prime, a.q].iter().all(Su11Coeffs::is_finite);
                    if !ok {
                        return Err(Error::InvalidModel("atom coefficients must be finite".into()));
                    }
                }
                atoms.iter().map(|a| a.weight).collect()
            }
            Family::Polymer(m) => m.spec.blocks.iter().map(|b| b.weight).collect(),
        };
        validate_weights(&weights)
    }

    /// The atoms whose moments define `C`, `D` and the support bound. For
    /// polymer models these are the generators extracted at `E_c`.
    pub fn atoms(&self) -> &[Atom] {
        match &self.family {
            Family::Exponential { atoms, .. } => atoms,
            Family::Polymer(m) => &m.atoms,
        }
    }

    pub fn w_law(&self) -> Option<Uniform> {
        match &self.family {
            Family::Exponential { w, .. } => *w,
            Family::Polymer(_) => None,
        }
    }

    pub fn d_law(&self) -> Option<Uniform> {
        match &self.family {
            Family::Exponential { d, .. } => *d,
            Family::Polymer(_) => None,
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        self.atoms().iter().map(|a| a.weight).collect()
    }

    /// True when every realizable `T` lies in SU_≤(1,1), so that the
    /// closed disc is invariant.
    pub fn monotone(&self) -> bool {
        if self.delta < 0.0 {
            return false;
        }
        match &self.family {
            Family::Exponential { atoms, d, .. } => {
                let d_nonneg = d.is_none_or(|d| d.low >= 0.0);
                d_nonneg && atoms.iter().all(|a| a.d_factor >= 0.0 && a.q.p3 >= a.xi().norm())
            }
            Family::Polymer(_) => true,
        }
    }

    /// `T^{ε,δ}_σ` for one draw.
    pub fn realize(&self, draw: &Draw) -> Mat2C {
        match &self.family {
            Family::Exponential { atoms, .. } => {
                realize_atom(&atoms[draw.atom], self.epsilon, self.delta, draw.w, draw.d)
            }
            Family::Polymer(m) => m.realize(draw.atom, self.epsilon, self.delta),
        }
    }
}

/// `R_η exp(εP(w) + ε²P′ + iδ·d·d_σ·Q)`.
pub fn realize_atom(atom: &Atom, epsilon: f64, delta: f64, w: f64, d: f64) -> Mat2C {
    let real = atom.p_at(w).scaled(epsilon).plus(&atom.p_prime.scaled(epsilon * epsilon));
    let imag = atom.q.scaled(delta * d * atom.d_factor);
    let generator = real.matrix() + imag.matrix() * C64::new(0.0, 1.0);
    Mat2C::rotation(atom.eta) * exp_traceless(&generator)
}

/// Checks that `T` is in the semigroup, returning the defect on failure.
pub fn check_semigroup(t: &Mat2C) -> Result<()> {
    let defect = crate::su11::su11_defect(t);
    if defect > DEFECT_TOL * t.frobenius_norm().powi(2).max(1.0) {
        return Err(Error::OutsideSemigroup(defect));
    }
    Ok(())
}

fn validate_weights(weights: &[f64]) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidModel("model has no atoms".into()));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidModel("atom weights must be nonnegative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidModel(format!("atom weights sum to {total}, expected 1")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su11::{is_su11, su11_defect};
    use proptest::prelude::*;

    fn atom(eta: f64, p: [f64; 3], q: [f64; 3]) -> Atom {
        Atom::new(1.0, eta, Su11Coeffs::new(p[0], p[1], p[2]), Su11Coeffs::new(q[0], q[1], q[2]))
    }

    #[test]
    fn unperturbed_is_rotation() {
        let a = atom(0.7, [0.3, -1.0, 0.2], [0.1, 0.2, 0.5]);
        let t = realize_atom(&a, 0.0, 0.0, 0.4, 1.0);
        assert!(t.max_abs_diff(&Mat2C::rotation(0.7)) < 1e-16);
    }

    #[test]
    fn real_parameters_stay_in_group() {
        let a = atom(0.7, [0.3, -1.0, 0.2], [0.1, 0.2, 0.5]);
        for eps in [0.01, 0.3, 2.0] {
            assert!(is_su11(&realize_atom(&a, eps, 0.0, 0.0, 1.0), 1e-10));
        }
        let t = realize_atom(&a, 0.1, 0.2, 0.0, 1.0);
        assert!(su11_defect(&t) <= 1e-12);
    }

    #[test]
    fn weights_must_sum_to_one() {
        let mut a = atom(0.0, [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]);
        a.weight = 0.6;
        assert!(ModelSpec::exponential(vec![a, a], None, None, 0.1, 0.0).is_err());
        a.weight = 0.5;
        assert!(ModelSpec::exponential(vec![a, a], None, None, 0.1, 0.0).is_ok());
        assert!(ModelSpec::exponential(vec![], None, None, 0.1, 0.0).is_err());
    }

    #[test]
    fn monotonicity_follows_d_range() {
        let a = atom(-2.0, [0.0, 0.5, 0.5], [0.0, 0.5, 0.5]);
        let spec = ModelSpec::exponential(vec![a], None, Some(Uniform::new(-1.0, 3.0).unwrap()), 0.1, 0.1);
        assert!(!spec.unwrap().monotone());
        let spec = ModelSpec::exponential(vec![a], None, Some(Uniform::new(0.5, 3.0).unwrap()), 0.1, 0.1);
        assert!(spec.unwrap().monotone());
    }

    #[test]
    fn uniform_moments() {
        let u = Uniform::new(-1.0, 3.0).unwrap();
        assert_eq!(u.mean(), 1.0);
        assert!((u.second_moment() - 7.0 / 3.0).abs() < 1e-15);
        assert!(Uniform::new(1.0, 0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2_000))]

        #[test]
        fn sub_lorentzian_for_nonnegative_drift(
            p in proptest::array::uniform3(-2.0..2.0f64),
            (u, v, extra) in (-1.0..1.0f64, -1.0..1.0f64, 0.0..1.0f64),
            eta in 0.0..std::f64::consts::TAU,
            eps in 0.0..0.5f64,
            delta in 0.0..0.5f64,
            d in 0.0..3.0f64,
        ) {
            let q3 = (u * u + v * v).sqrt() + extra;
            let a = atom(eta, p, [u, v, q3]);
            let t = realize_atom(&a, eps, delta, 0.0, d);
            prop_assert!(su11_defect(&t) <= 1e-10 * t.frobenius_norm().powi(2).max(1.0));
            prop_assert!((t.det() - C64::new(1.0, 0.0)).norm() <= 1e-12 * t.frobenius_norm().powi(2).max(1.0));
        }
    }
}
