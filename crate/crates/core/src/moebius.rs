//! The Möbius action on the Riemann sphere in projective coordinates.
//!
//! A point is stored as a unit vector `(a, b) ∈ ℂ²`; its chart value is
//! `a/b`, with `b = 0` standing for `∞`. The matrix action is then plain
//! matrix-vector multiplication followed by renormalization, so the pole
//! `z = −d/c` of the fractional-linear formula needs no special case.

use num_complex::ComplexFloat;

use crate::error::{Error, Result};
use crate::su11::{su11_defect, Mat2C, C64, DEFECT_TOL};

/// Below this modulus of `b` the chart value is reported as `∞`.
pub const INFINITY_THRESHOLD: f64 = 1e-300;

/// Point of ℂ ∪ {∞}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extended {
    Finite(C64),
    Infinity,
}

impl Extended {
    pub fn finite(self) -> Option<C64> {
        match self {
            Extended::Finite(z) => Some(z),
            Extended::Infinity => None,
        }
    }
}

impl From<C64> for Extended {
    fn from(z: C64) -> Self {
        Extended::Finite(z)
    }
}

/// Unit-norm representative `(a, b)` of the projective point `(a : b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint {
    a: C64,
    b: C64,
}

impl SpherePoint {
    /// Normalizes `(a, b)`; fails on the zero vector.
    pub fn from_vector(a: C64, b: C64) -> Result<Self> {
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if !(n >= INFINITY_THRESHOLD) || !n.is_finite() {
            return Err(Error::DegenerateVector(n));
        }
        Ok(Self { a: a / n, b: b / n })
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn b(&self) -> C64 {
        self.b
    }

    pub fn norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr()).sqrt()
    }

    /// Stereographic chart `a/b`, or `∞` when `|b| ≤ 1e-300`.
    pub fn chart(&self) -> Extended {
        if self.b.norm() <= INFINITY_THRESHOLD {
            Extended::Infinity
        } else {
            Extended::Finite(scaled_div(self.a, self.b))
        }
    }

    /// `|z|² = |a|²/|b|²`, which is `+∞` at the point at infinity.
    pub fn radius_sq(&self) -> f64 {
        let bb = self.b.norm_sqr();
        if bb == 0.0 {
            f64::INFINITY
        } else {
            self.a.norm_sqr() / bb
        }
    }
}

/// `a/b` without forming `|b|²`, which underflows for `|b| < 1e-154`.
fn scaled_div(a: C64, b: C64) -> C64 {
    let m = b.re.abs().max(b.im.abs());
    let bs = b / m;
    a * bs.conj() / (bs.norm_sqr() * m)
}

/// `T ⋆ x = Tx/‖Tx‖`, also returning `‖Tx‖` (the Lyapunov increment).
pub fn act_with_norm(t: &Mat2C, x: &SpherePoint) -> Result<(SpherePoint, f64)> {
    let (a, b) = t.apply(x.a, x.b);
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if !(n >= INFINITY_THRESHOLD) || !n.is_finite() {
        return Err(Error::DegenerateVector(n));
    }
    Ok((SpherePoint { a: a / n, b: b / n }, n))
}

pub fn act(t: &Mat2C, x: &SpherePoint) -> Result<SpherePoint> {
    act_with_norm(t, x).map(|(p, _)| p)
}

/// A unit representative of `π⁻¹(z)` with `b` real and nonnegative.
pub fn lift(z: Extended) -> SpherePoint {
    match z {
        Extended::Infinity => SpherePoint { a: C64::new(1.0, 0.0), b: C64::new(0.0, 0.0) },
        Extended::Finite(z) => {
            // (z, 1)/sqrt(1 + |z|²), written to stay finite for huge |z|.
            let r = z.norm();
            if r <= 1.0 {
                let n = (1.0 + r * r).sqrt();
                SpherePoint { a: z / n, b: C64::new(1.0 / n, 0.0) }
            } else {
                let inv = 1.0 / r;
                let n = (1.0 + inv * inv).sqrt();
                SpherePoint { a: (z * inv) / n, b: C64::new(inv / n, 0.0) }
            }
        }
    }
}

/// The fractional-linear formula `(a z + b)/(c z + d)` with the conventions
/// `T·(−d/c) = ∞` and `T·∞ = a/c`.
pub fn moebius(t: &Mat2C, z: Extended) -> Extended {
    match z {
        Extended::Infinity => {
            if t.c == C64::new(0.0, 0.0) {
                Extended::Infinity
            } else {
                Extended::Finite(t.a / t.c)
            }
        }
        Extended::Finite(z) => {
            let den = t.c * z + t.d;
            if den == C64::new(0.0, 0.0) {
                Extended::Infinity
            } else {
                Extended::Finite((t.a * z + t.b) / den)
            }
        }
    }
}

/// `(1 − |T·z|²)|cz + d|² − (1 − |z|²)`, which is nonnegative on the closed
/// disc for `T ∈ SU_≤(1,1)` and vanishes identically for `T ∈ SU(1,1)`.
pub fn disc_defect(t: &Mat2C, z: C64) -> Result<f64> {
    let defect = su11_defect(t);
    if defect > DEFECT_TOL {
        return Err(Error::OutsideSemigroup(defect));
    }
    if z.abs() > 1.0 + 1e-12 {
        return Err(Error::InvalidArgument(format!("|z| = {} exceeds 1", z.abs())));
    }
    let num = t.a * z + t.b;
    let den = t.c * z + t.d;
    // (1 − |num/den|²)|den|² without forming the quotient.
    Ok(den.norm_sqr() - num.norm_sqr() - (1.0 - z.norm_sqr()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su11::{b, exp_su11, Su11Coeffs};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn chart_of(x: &SpherePoint) -> C64 {
        x.chart().finite().expect("finite chart")
    }

    #[test]
    fn identity_action() {
        let x = lift(c(0.3, -0.2).into());
        let y = act(&Mat2C::identity(), &x).unwrap();
        assert!((chart_of(&y) - c(0.3, -0.2)).norm() < 1e-15);
    }

    #[test]
    fn inversion_swaps_zero_and_infinity() {
        let t = Mat2C::real(0.0, 1.0, -1.0, 0.0);
        let z = c(0.4, 0.7);
        let y = act(&t, &lift(z.into())).unwrap();
        assert!((chart_of(&y) - (-1.0 / z)).norm() < 1e-14);
        assert_eq!(act(&t, &lift(c(0.0, 0.0).into())).unwrap().chart(), Extended::Infinity);
        let y = act(&t, &lift(Extended::Infinity)).unwrap();
        assert!(chart_of(&y).norm() < 1e-15);
        assert_eq!(moebius(&t, c(0.0, 0.0).into()), Extended::Infinity);
        assert_eq!(moebius(&t, Extended::Infinity), Extended::Finite(c(-0.0, 0.0)));
    }

    #[test]
    fn boost_moves_origin_to_tanh() {
        let ep = 0.37;
        let t = exp_su11(&(b(1) * ep)).unwrap();
        let y = act(&t, &lift(c(0.0, 0.0).into())).unwrap();
        assert!((chart_of(&y) - c(ep.tanh(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lift_examples() {
        let x = lift(c(0.0, 0.0).into());
        assert_eq!((x.a(), x.b()), (c(0.0, 0.0), c(1.0, 0.0)));
        let x = lift(Extended::Infinity);
        assert_eq!((x.a(), x.b()), (c(1.0, 0.0), c(0.0, 0.0)));
        let x = lift(c(1.0, 0.0).into());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((x.a() - c(h, 0.0)).norm() < 1e-15 && (x.b() - c(h, 0.0)).norm() < 1e-15);
        let x = lift(c(3e200, -1e200).into());
        assert!((x.norm() - 1.0).abs() < 1e-15);
        assert!((chart_of(&x) - c(3e200, -1e200)).norm() / 3e200 < 1e-14);
    }

    #[test]
    fn disc_defect_examples() {
        let t = exp_su11(&(b(1) * 0.8 + b(2) * -0.3)).unwrap() * Mat2C::rotation(1.1);
        for z in [c(0.0, 0.0), c(0.5, 0.5), c(0.6, -0.8)] {
            assert!(disc_defect(&t, z).unwrap().abs() < 1e-10);
        }
        let (q, d) = (0.5, 0.2);
        let t = exp_su11(&(b(3) * c(0.0, d * q))).unwrap();
        let z = c(0.5, 0.0);
        // |T·z| = e^{−2δq}|z|.
        let tz = chart_of(&act(&t, &lift(z.into())).unwrap());
        assert!((tz.norm() - (-2.0 * d * q).exp() * 0.5).abs() < 1e-15);
        assert!(disc_defect(&t, z).unwrap() > 0.0);
        assert_eq!(disc_defect(&Mat2C::identity(), c(0.3, 0.4)).unwrap(), 0.0);

        let bad = exp_su11(&(b(3) * c(0.0, -0.1))).unwrap();
        assert!(matches!(disc_defect(&bad, z), Err(Error::OutsideSemigroup(_))));
    }

    fn coeffs(r: f64) -> impl Strategy<Value = Su11Coeffs> {
        (-r..r, -r..r, -r..r).prop_map(|(a, b, c)| Su11Coeffs::new(a, b, c))
    }

    fn disc_point() -> impl Strategy<Value = C64> {
        (0.0..0.999f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| C64::from_polar(r, t))
    }

    fn group_element() -> impl Strategy<Value = Mat2C> {
        (coeffs(2.0), 0.0..std::f64::consts::TAU)
            .prop_map(|(p, eta)| Mat2C::rotation(eta) * exp_su11(&p.matrix()).unwrap())
    }

    /// `R_η exp(P + iQ)` with `q₃ ≥ |ξ|`, which lies in SU_≤(1,1).
    fn semigroup_element() -> impl Strategy<Value = Mat2C> {
        (coeffs(2.0), -1.0..1.0f64, -1.0..1.0f64, 0.0..1.5f64, 0.0..std::f64::consts::TAU)
            .prop_map(|(p, u, v, extra, eta)| {
                let q = Su11Coeffs::new(u, v, (u * u + v * v).sqrt() + extra);
                let gen = p.matrix() + q.matrix() * c(0.0, 1.0);
                Mat2C::rotation(eta) * exp_su11(&gen).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn equivariance(t in group_element(), z in disc_point()) {
            let x = act(&t, &lift(z.into())).unwrap();
            prop_assert!((x.norm() - 1.0).abs() <= 1e-12);
            let direct = moebius(&t, z.into()).finite().unwrap();
            let via = chart_of(&x);
            prop_assert!((direct - via).norm() <= 1e-10 * direct.norm().max(1.0));
        }

        #[test]
        fn composition(t1 in group_element(), t2 in group_element(), z in disc_point()) {
            let x = lift(z.into());
            let two_step = act(&t2, &act(&t1, &x).unwrap()).unwrap();
            let one_step = act(&(t2 * t1), &x).unwrap();
            // Same projective point: the 2x2 determinant of the pair vanishes.
            let cross = two_step.a() * one_step.b() - two_step.b() * one_step.a();
            prop_assert!(cross.norm() <= 1e-9);
        }

        #[test]
        fn disc_invariance(t in semigroup_element(), z in disc_point()) {
            prop_assert!(su11_defect(&t) <= 1e-10 * t.frobenius_norm().powi(2).max(1.0));
            let y = act(&t, &lift(z.into())).unwrap();
            prop_assert!(y.radius_sq() < 1.0);
        }

        #[test]
        fn circle_invariance(t in group_element(), theta in 0.0..std::f64::consts::TAU) {
            let y = act(&t, &lift(C64::from_polar(1.0, theta).into())).unwrap();
            prop_assert!((chart_of(&y).norm() - 1.0).abs() <= 1e-10);
        }
    }
}
