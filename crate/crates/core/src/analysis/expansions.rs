//! Truncated second-order expansions of the Möbius action and of the
//! log-norm, and order checks of their remainders.
//!
//! The second-order coefficient of the action is `β̃ = p̃₁ − i p̃₂`, where
//! `p̃` is defined by `e^{εP + ε²P′} = e^{ε(p₃+εp̃₃)B₃} e^{ε(p₂+εp̃₂)B₂}
//! e^{ε(p₁+εp̃₁)B₁} + O(ε³)`. Reordering the exponentials gives
//! `p̃ = (p′₁ + p₂p₃, p′₂ − p₁p₃, p′₃ − p₁p₂)`, so `β̃ = β′` only when the
//! second-order commutator terms vanish. The log-norm expansion involves
//! `β′` itself.
//!
//! The rotation `e^{ε(p₃+εp̃₃)B₃}` contributes `2iε²p̃₃ z`, so the linear
//! second-order coefficient of the action carries `−2i p̃₃`.

use crate::models::{realize_atom, Atom};
use crate::moebius::{act_with_norm, lift, moebius, Extended};
use crate::su11::{Mat2C, Su11Coeffs, C64};

const I: C64 = C64::new(0.0, 1.0);

/// Defects below this are treated as exact.
pub const DEFECT_FLOOR: f64 = 1e-13;
pub const EPSILON_RATIO_MIN: f64 = 7.0;
pub const DELTA_RATIO_MIN: f64 = 3.5;

/// Coefficients entering the expansions for one realized `σ`.
#[derive(Clone, Copy, Debug)]
struct Coeffs {
    eta: f64,
    beta: C64,
    p3: f64,
    beta_prime: C64,
    beta_tilde: C64,
    p3_tilde: f64,
    xi: C64,
    q3: f64,
}

/// `p̃` from reordering the exponential.
pub fn reordered_coeffs(p: &Su11Coeffs, p_prime: &Su11Coeffs) -> Su11Coeffs {
    Su11Coeffs::new(
        p_prime.p1 + p.p2 * p.p3,
        p_prime.p2 - p.p1 * p.p3,
        p_prime.p3 - p.p1 * p.p2,
    )
}

fn coeffs(atom: &Atom, w: f64, d: f64) -> Coeffs {
    let p = atom.p_at(w);
    let tilde = reordered_coeffs(&p, &atom.p_prime);
    let q = atom.q.scaled(d * atom.d_factor);
    Coeffs {
        eta: atom.eta,
        beta: p.beta(),
        p3: p.p3,
        beta_prime: atom.p_prime.beta(),
        beta_tilde: tilde.beta(),
        p3_tilde: tilde.p3,
        xi: q.beta(),
        q3: q.p3,
    }
}

/// Truncated expansion of `T·z` through `ε²` and `δ`.
pub fn action_expansion(atom: &Atom, w: f64, d: f64, epsilon: f64, delta: f64, z: C64) -> C64 {
    let k = coeffs(atom, w, d);
    let (b, bt) = (k.beta, k.beta_tilde);
    let z2 = z * z;
    let first = b.conj() + 2.0 * I * k.p3 * z - b * z2;
    let drift = I * k.xi.conj() - 2.0 * k.q3 * z - I * k.xi * z2;
    let linear = b.norm_sqr() + I * (b * b).im - 2.0 * I * k.p3_tilde + 2.0 * k.p3 * k.p3;
    let second = bt.conj() - bt * z2 + 2.0 * I * k.p3 * (b.conj() - b * z2) - linear * z + b * b * z2 * z;
    C64::from_polar(1.0, 2.0 * k.eta) * (z + epsilon * first + delta * drift + epsilon * epsilon * second)
}

/// Truncated expansion of `|T·z|²`.
pub fn radius_sq_expansion(atom: &Atom, w: f64, d: f64, epsilon: f64, delta: f64, z: C64) -> f64 {
    let k = coeffs(atom, w, d);
    let s = z.norm_sqr();
    let b = k.beta;
    let first = 2.0 * (b * z).re * (1.0 - s);
    let second = (b.norm_sqr() * (1.0 - s) + 2.0 * (k.beta_tilde * z - b * b * z * z).re) * (1.0 - s);
    let drift = 2.0 * ((k.xi * z).im * (1.0 + s) - 2.0 * k.q3 * s);
    s + epsilon * first + epsilon * epsilon * second + delta * drift
}

/// Truncated expansion of `log‖T x‖` for the unit lift `x` of `z`.
pub fn lognorm_expansion(atom: &Atom, w: f64, d: f64, epsilon: f64, delta: f64, z: C64) -> f64 {
    let k = coeffs(atom, w, d);
    let s = z.norm_sqr();
    let b = k.beta;
    let n = 1.0 + s;
    let first = 2.0 * (b * z).re / n;
    let second = b.norm_sqr() * (1.0 + s * s) / (n * n)
        + 2.0 * (((k.beta_prime + I * k.p3 * b) * z).re / n - (b * b * z * z).re / (n * n));
    let drift = k.q3 * (1.0 - s) / n;
    epsilon * first + epsilon * epsilon * second + delta * drift
}

/// Defects of the action and squared-modulus expansions at `z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActionDefect {
    pub action: f64,
    pub radius_sq: f64,
}

/// Distance between the exact action of `t_exact` at `z` and its truncated
/// expansion for `(atom, w, d)`, together with the `|·|²` variant.
pub fn expansion_defect_action(
    t_exact: &Mat2C,
    atom: &Atom,
    w: f64,
    d: f64,
    epsilon: f64,
    delta: f64,
    z: C64,
) -> ActionDefect {
    let exact = match moebius(t_exact, Extended::Finite(z)) {
        Extended::Finite(v) => v,
        Extended::Infinity => return ActionDefect { action: f64::INFINITY, radius_sq: f64::INFINITY },
    };
    ActionDefect {
        action: (exact - action_expansion(atom, w, d, epsilon, delta, z)).norm(),
        radius_sq: (exact.norm_sqr() - radius_sq_expansion(atom, w, d, epsilon, delta, z)).abs(),
    }
}

/// Exact `log‖T x‖` for the unit lift of `z`.
pub fn exact_lognorm(t: &Mat2C, z: C64) -> f64 {
    let x = lift(Extended::Finite(z));
    act_with_norm(t, &x).map_or(f64::NAN, |(_, norm)| norm.ln())
}

/// `|log‖T x‖ − truncated expansion|` with `T` realized from `atom`.
pub fn expansion_defect_lognorm(atom: &Atom, w: f64, d: f64, epsilon: f64, delta: f64, z: C64) -> f64 {
    let t = realize_atom(atom, epsilon, delta, w, d);
    (exact_lognorm(&t, z) - lognorm_expansion(atom, w, d, epsilon, delta, z)).abs()
}

/// Which expansion a ratio test probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expansion {
    Action,
    RadiusSq,
    LogNorm,
}

impl Expansion {
    pub const ALL: [Expansion; 3] = [Expansion::Action, Expansion::RadiusSq, Expansion::LogNorm];

    pub fn as_str(&self) -> &'static str {
        match self {
            Expansion::Action => "action",
            Expansion::RadiusSq => "radius_sq",
            Expansion::LogNorm => "lognorm",
        }
    }
}

/// Defect of one expansion with `T` realized from the atom.
pub fn defect(kind: Expansion, atom: &Atom, w: f64, d: f64, epsilon: f64, delta: f64, z: C64) -> f64 {
    match kind {
        Expansion::LogNorm => expansion_defect_lognorm(atom, w, d, epsilon, delta, z),
        _ => {
            let t = realize_atom(atom, epsilon, delta, w, d);
            let dft = expansion_defect_action(&t, atom, w, d, epsilon, delta, z);
            if kind == Expansion::Action {
                dft.action
            } else {
                dft.radius_sq
            }
        }
    }
}

/// `defect(h)/defect(h/2)`, or `None` when `defect(h)` is at rounding level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioOutcome {
    pub coarse: f64,
    pub fine: f64,
    pub ratio: Option<f64>,
    pub threshold: f64,
}

impl RatioOutcome {
    fn new(coarse: f64, fine: f64, threshold: f64) -> Self {
        let ratio = (coarse > DEFECT_FLOOR).then(|| coarse / fine);
        Self { coarse, fine, ratio, threshold }
    }

    pub fn passed(&self) -> bool {
        self.ratio.map_or(self.fine <= DEFECT_FLOOR, |r| r >= self.threshold)
    }
}

/// Halves `ε` at `δ = 0`; a third-order remainder gives a ratio near 8.
pub fn epsilon_ratio(kind: Expansion, atom: &Atom, w: f64, d: f64, epsilon: f64, z: C64) -> RatioOutcome {
    RatioOutcome::new(
        defect(kind, atom, w, d, epsilon, 0.0, z),
        defect(kind, atom, w, d, 0.5 * epsilon, 0.0, z),
        EPSILON_RATIO_MIN,
    )
}

/// Halves `δ` at `ε = 0`; a second-order remainder gives a ratio near 4.
pub fn delta_ratio(kind: Expansion, atom: &Atom, w: f64, d: f64, delta: f64, z: C64) -> RatioOutcome {
    RatioOutcome::new(
        defect(kind, atom, w, d, 0.0, delta, z),
        defect(kind, atom, w, d, 0.0, 0.5 * delta, z),
        DELTA_RATIO_MIN,
    )
}

/// 25 points of the closed disc: the origin and six angles on each of the
/// radii 1/4, 1/2, 3/4 and 1.
pub fn disc_grid() -> Vec<C64> {
    let mut pts = vec![C64::new(0.0, 0.0)];
    for r in [0.25, 0.5, 0.75, 1.0] {
        for k in 0..6 {
            let theta = std::f64::consts::PI * (2 * k + 1) as f64 / 6.0 + 0.1;
            pts.push(C64::from_polar(r, theta));
        }
    }
    pts
}
