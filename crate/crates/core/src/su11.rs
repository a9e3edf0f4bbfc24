//! Complex 2×2 matrices, the su(1,1) basis and its closed-form exponential.
//!
//! Everything here is plain value arithmetic. The group SU(1,1) is the set of
//! unimodular `T` with `T* J T = J`; the semigroup SU_≤(1,1) relaxes this to
//! `T* J T ≤ J` in the sense of Hermitian forms.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance on `|det − 1|` for constructors that promise a unimodular result.
pub const DET_TOL: f64 = 1e-12;
/// Tolerance on the extreme eigenvalues of `T* J T − J`.
pub const DEFECT_TOL: f64 = 1e-10;
/// Below this modulus of `μ` the exponential switches to its Taylor series.
const SERIES_THRESHOLD: f64 = 1e-4;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Row-major complex 2×2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat2C {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl fmt::Debug for Mat2C {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl Mat2C {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { a, b, c, d }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub fn diag(a: C64, d: C64) -> Self {
        Self::new(a, ZERO, ZERO, d)
    }

    /// The rotation `R_η = diag(e^{iη}, e^{−iη})`.
    pub fn rotation(eta: f64) -> Self {
        Self::diag(C64::from_polar(1.0, eta), C64::from_polar(1.0, -eta))
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Inverse via the adjugate; exact for unimodular input up to one division.
    pub fn inverse(&self) -> Self {
        let det = self.det();
        Self::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    /// Applies the matrix to the column vector `(x, y)`.
    pub fn apply(&self, x: C64, y: C64) -> (C64, C64) {
        (self.a * x + self.b * y, self.c * x + self.d * y)
    }

    pub fn frobenius_norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()).sqrt()
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            (self.a - other.a).norm(),
            (self.b - other.b).norm(),
            (self.c - other.c).norm(),
            (self.d - other.d).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        [self.a, self.b, self.c, self.d].iter().all(|z| z.is_finite())
    }
}

impl Add for Mat2C {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Mat2C {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Mat2C {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl Mul for Mat2C {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Mul<f64> for Mat2C {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s.into())
    }
}

impl Mul<C64> for Mat2C {
    type Output = Self;
    fn mul(self, s: C64) -> Self {
        self.scale(s)
    }
}

/// The basis `B₁, B₂, B₃` of su(1,1).
///
/// ```text
/// B₁ = [[0, 1], [1, 0]]   B₂ = [[0, i], [−i, 0]]   B₃ = [[i, 0], [0, −i]]
/// ```
pub fn basis(j: usize) -> Result<Mat2C> {
    match j {
        1 => Ok(Mat2C::new(ZERO, ONE, ONE, ZERO)),
        2 => Ok(Mat2C::new(ZERO, I, -I, ZERO)),
        3 => Ok(Mat2C::new(I, ZERO, ZERO, -I)),
        _ => Err(Error::BasisIndex(j)),
    }
}

pub(crate) fn b(j: usize) -> Mat2C {
    basis(j).expect("basis index is a literal 1..=3")
}

/// `J = diag(1, −1)`, the form preserved by SU(1,1).
pub fn j_form() -> Mat2C {
    Mat2C::real(1.0, 0.0, 0.0, -1.0)
}

/// `I = [[0, −1], [1, 0]]`, the symplectic form preserved by SL(2,ℝ).
pub fn i_form() -> Mat2C {
    Mat2C::real(0.0, -1.0, 1.0, 0.0)
}

/// The Cayley transform `C = sqrt(−i/2) [[1, −i], [1, i]]`; unitary, with
/// `C* J C = i I`.
pub fn cayley() -> Mat2C {
    let pre = C64::new(0.0, -0.5).sqrt();
    Mat2C::new(ONE, -I, ONE, I).scale(pre)
}

/// Real coordinates of an element `p1 B₁ + p2 B₂ + p3 B₃` of su(1,1).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Su11Coeffs {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl Su11Coeffs {
    pub const ZERO: Self = Self { p1: 0.0, p2: 0.0, p3: 0.0 };

    pub const fn new(p1: f64, p2: f64, p3: f64) -> Self {
        Self { p1, p2, p3 }
    }

    pub fn matrix(&self) -> Mat2C {
        Mat2C::new(
            C64::new(0.0, self.p3),
            C64::new(self.p1, self.p2),
            C64::new(self.p1, -self.p2),
            C64::new(0.0, -self.p3),
        )
    }

    /// Reads the coordinates back from a matrix, which must lie in su(1,1)
    /// to within `tol` elementwise.
    pub fn from_matrix(m: &Mat2C, tol: f64) -> Result<Self> {
        let coeffs = Self::new(m.b.re, m.b.im, m.a.im);
        let err = coeffs.matrix().max_abs_diff(m);
        if err > tol {
            return Err(Error::InvalidArgument(format!(
                "matrix is not in su(1,1) (distance {err:e})"
            )));
        }
        Ok(coeffs)
    }

    /// `β = p1 − i p2 = ½ Tr((B₁ − iB₂) P)`.
    pub fn beta(&self) -> C64 {
        C64::new(self.p1, -self.p2)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.p1 * s, self.p2 * s, self.p3 * s)
    }

    pub fn plus(&self, o: &Self) -> Self {
        Self::new(self.p1 + o.p1, self.p2 + o.p2, self.p3 + o.p3)
    }

    pub fn is_finite(&self) -> bool {
        self.p1.is_finite() && self.p2.is_finite() && self.p3.is_finite()
    }
}

/// Closed-form exponential of a traceless 2×2 matrix.
///
/// For traceless `A`, `A² = −det(A)·Id`, so `exp(A) = cosh(μ) Id + sinh(μ)/μ · A`
/// with `μ² = −det A`. Both coefficient functions are even in `μ` and the
/// choice of square root does not matter.
pub fn exp_su11(m: &Mat2C) -> Result<Mat2C> {
    let tr = m.trace().norm();
    if tr > 1e-12 * m.frobenius_norm().max(1.0) {
        return Err(Error::NotTraceless(tr));
    }
    Ok(exp_traceless(m))
}

/// [`exp_su11`] without the trace check, for hot loops whose input is
/// traceless by construction.
pub(crate) fn exp_traceless(m: &Mat2C) -> Mat2C {
    let mu2 = -m.det();
    let (ch, shc) = if mu2.norm() < SERIES_THRESHOLD * SERIES_THRESHOLD {
        let mu4 = mu2 * mu2;
        (
            ONE + mu2 / 2.0 + mu4 / 24.0 + mu4 * mu2 / 720.0,
            ONE + mu2 / 6.0 + mu4 / 120.0 + mu4 * mu2 / 5040.0,
        )
    } else {
        let mu = mu2.sqrt();
        (mu.cosh(), mu.sinh() / mu)
    };
    Mat2C::new(ch + shc * m.a, shc * m.b, shc * m.c, ch + shc * m.d)
}

/// Both eigenvalues `(min, max)` of the Hermitian matrix `T* J T − J`.
pub fn su11_defect_extremes(t: &Mat2C) -> (f64, f64) {
    let j = j_form();
    let h = t.adjoint() * j * *t - j;
    let p = h.a.re;
    let r = h.d.re;
    let q = h.b;
    let mid = 0.5 * (p + r);
    let rad = (0.25 * (p - r) * (p - r) + q.norm_sqr()).sqrt();
    (mid - rad, mid + rad)
}

/// Largest eigenvalue of `T* J T − J`. Values `≤ tol` mean `T ∈ SU_≤(1,1)`.
pub fn su11_defect(t: &Mat2C) -> f64 {
    su11_defect_extremes(t).1
}

/// True when both extreme eigenvalues of `T* J T − J` vanish within `tol`
/// and `det T = 1` within [`DET_TOL`].
pub fn is_su11(t: &Mat2C, tol: f64) -> bool {
    let (lo, hi) = su11_defect_extremes(t);
    lo.abs() <= tol && hi.abs() <= tol && (t.det() - ONE).norm() <= DET_TOL
}

/// `C S C⁻¹` for a real unimodular `S`; maps SL(2,ℝ) onto SU(1,1).
pub fn cayley_conjugate(s: &Mat2C) -> Result<Mat2C> {
    let imag = [s.a, s.b, s.c, s.d].iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag > 1e-12 {
        return Err(Error::NotRealUnimodular(format!("imaginary part {imag:e}")));
    }
    let det_err = (s.det() - ONE).norm();
    if det_err > DET_TOL {
        return Err(Error::NotRealUnimodular(format!("|det − 1| = {det_err:e}")));
    }
    let c = cayley();
    Ok(c * *s * c.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &Mat2C, b: &Mat2C, tol: f64) -> bool {
        a.max_abs_diff(b) <= tol
    }

    #[test]
    fn basis_matches_printed_matrices() {
        assert_eq!(basis(3).unwrap(), Mat2C::diag(I, -I));
        assert_eq!(basis(1).unwrap(), Mat2C::real(0.0, 1.0, 1.0, 0.0));
        assert_eq!(basis(2).unwrap(), Mat2C::new(ZERO, I, -I, ZERO));
        assert!(matches!(basis(0), Err(Error::BasisIndex(0))));
        assert!(matches!(basis(4), Err(Error::BasisIndex(4))));
    }

    #[test]
    fn b1_is_an_involution() {
        assert_eq!(b(1) * b(1), Mat2C::identity());
    }

    #[test]
    fn commutators_of_literal_basis() {
        // Multiplied out by hand: B1 B2 = diag(−i, i), B2 B1 = diag(i, −i).
        assert_eq!(b(1) * b(2), Mat2C::diag(-I, I));
        assert_eq!(b(2) * b(1), Mat2C::diag(I, -I));
        assert!(close(&b(1).commutator(&b(2)), &(b(3) * -2.0), 0.0));
        assert!(close(&b(2).commutator(&b(3)), &(b(1) * 2.0), 0.0));
        assert!(close(&b(3).commutator(&b(1)), &(b(2) * 2.0), 0.0));
    }

    #[test]
    fn cayley_maps_j_to_i() {
        let c = cayley();
        let lhs = c.adjoint() * j_form() * c;
        assert!(close(&lhs, &i_form().scale(I), 1e-14));
        assert!(close(&(c.adjoint() * c), &Mat2C::identity(), 1e-15));
        assert!((c.det() - ONE).norm() < 1e-15);
    }

    #[test]
    fn exp_closed_forms() {
        let t = 0.7;
        let e = exp_su11(&(b(3) * t)).unwrap();
        assert!(close(&e, &Mat2C::diag(C64::from_polar(1.0, t), C64::from_polar(1.0, -t)), 1e-15));
        let e = exp_su11(&(b(3) * C64::new(0.0, t))).unwrap();
        assert!(close(&e, &Mat2C::real((-t).exp(), 0.0, 0.0, t.exp()), 1e-15));
        let e = exp_su11(&(b(1) * t)).unwrap();
        assert!(close(&e, &Mat2C::real(t.cosh(), t.sinh(), t.sinh(), t.cosh()), 1e-15));
        let e = exp_su11(&(b(2) * t)).unwrap();
        let expect = Mat2C::new(t.cosh().into(), I * t.sinh(), -I * t.sinh(), t.cosh().into());
        assert!(close(&e, &expect, 1e-15));
        let e = exp_su11(&(b(1) * C64::new(0.0, t))).unwrap();
        let expect = Mat2C::new(t.cos().into(), I * t.sin(), I * t.sin(), t.cos().into());
        assert!(close(&e, &expect, 1e-15));
        let e = exp_su11(&(b(2) * C64::new(0.0, t))).unwrap();
        assert!(close(&e, &Mat2C::real(t.cos(), -t.sin(), t.sin(), t.cos()), 1e-15));
        assert_eq!(exp_su11(&Mat2C::zero()).unwrap(), Mat2C::identity());
    }

    #[test]
    fn exp_series_branch_is_continuous() {
        // Just below and just above the series threshold the two branches agree.
        for mu in [0.99e-4, 1.01e-4, 5e-5, 3e-3] {
            let m = b(1) * mu;
            let e = exp_su11(&m).unwrap();
            let expect = Mat2C::real(mu.cosh(), mu.sinh(), mu.sinh(), mu.cosh());
            assert!(close(&e, &expect, 1e-16), "mu = {mu}");
        }
    }

    #[test]
    fn exp_rejects_trace() {
        assert!(matches!(exp_su11(&Mat2C::identity()), Err(Error::NotTraceless(_))));
    }

    #[test]
    fn defect_examples() {
        let (lo, hi) = su11_defect_extremes(&Mat2C::rotation(0.4));
        assert!(lo.abs() < 1e-15 && hi.abs() < 1e-15);

        // T*JT − J = diag(e^{−2δq} − 1, 1 − e^{2δq}) is negative definite.
        let dq = 0.3;
        let t = exp_su11(&(b(3) * C64::new(0.0, dq))).unwrap();
        let (lo, hi) = su11_defect_extremes(&t);
        assert!(hi < 0.0);
        assert!((hi - ((-2.0 * dq).exp() - 1.0)).abs() < 1e-14);
        assert!((lo - (1.0 - (2.0 * dq).exp())).abs() < 1e-14);

        let t = exp_su11(&(b(1) * 1.3)).unwrap();
        assert!(is_su11(&t, 1e-12));
    }

    #[test]
    fn cayley_conjugate_examples() {
        assert!(close(&cayley_conjugate(&Mat2C::identity()).unwrap(), &Mat2C::identity(), 1e-15));

        let eta: f64 = 0.9;
        let rot = Mat2C::real(eta.cos(), -eta.sin(), eta.sin(), eta.cos());
        let out = cayley_conjugate(&rot).unwrap();
        // A rotation by η becomes R_{−η}.
        assert!(close(&out, &Mat2C::rotation(-eta), 1e-14));

        let t: f64 = 0.6;
        let boost = Mat2C::real(t.cosh(), t.sinh(), t.sinh(), t.cosh());
        let out = cayley_conjugate(&boost).unwrap();
        assert!(is_su11(&out, 1e-12));
        // boost = cosh t Id + sinh t B₁, hence C boost C* = cosh t Id + sinh t C B₁ C*.
        let gen = cayley() * Mat2C::real(0.0, 1.0, 1.0, 0.0) * cayley().adjoint();
        let expect = Mat2C::identity() * t.cosh() + gen * t.sinh();
        assert!(close(&out, &expect, 1e-14));

        assert!(cayley_conjugate(&Mat2C::diag(I, -I)).is_err());
        assert!(cayley_conjugate(&Mat2C::real(2.0, 0.0, 0.0, 1.0)).is_err());
    }

    fn traceless() -> impl Strategy<Value = Mat2C> {
        (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64)
            .prop_map(|(ar, ai, br, bi, cr, ci)| {
                let a = C64::new(ar, ai);
                Mat2C::new(a, C64::new(br, bi), C64::new(cr, ci), -a)
            })
    }

    fn coeffs() -> impl Strategy<Value = Su11Coeffs> {
        (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b, c)| Su11Coeffs::new(a, b, c))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn exp_is_unimodular(m in traceless()) {
            let e = exp_su11(&m).unwrap();
            // Entries reach ~e^{10}; the determinant tolerance is relative.
            let scale = e.frobenius_norm().powi(2).max(1.0);
            prop_assert!((e.det() - ONE).norm() <= 1e-12 * scale);
            let back = e * exp_su11(&-m).unwrap();
            prop_assert!(back.max_abs_diff(&Mat2C::identity()) <= 1e-10 * scale);
        }

        #[test]
        fn real_span_exponentiates_into_su11(p in coeffs()) {
            let a = p.matrix();
            prop_assert!(a.trace().norm() < 1e-14);
            let lhs = a.adjoint() * j_form();
            let rhs = -(j_form() * a);
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-14);
            let e = exp_su11(&a).unwrap();
            let scale = e.frobenius_norm().powi(2).max(1.0);
            let (lo, hi) = su11_defect_extremes(&e);
            prop_assert!(lo.abs() <= 1e-10 * scale && hi.abs() <= 1e-10 * scale);
        }

        #[test]
        fn hyperbolic_drift_is_sub_lorentzian(q in 0.0..5.0f64) {
            let e = exp_su11(&(b(3) * C64::new(0.0, q))).unwrap();
            prop_assert!(su11_defect(&e) <= 1e-12);
        }

        #[test]
        fn coefficient_round_trip(p in coeffs()) {
            let back = Su11Coeffs::from_matrix(&p.matrix(), 1e-15).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
