use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::su11::C64;

/// Radial test functions `g(s)` with their first two derivatives; all are
/// smooth on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadialFn {
    /// `s^m` with `m ≤ 6`.
    Monomial(u8),
    /// `log(1 + s)`.
    Log1p,
    /// `(1 + s)⁻¹`.
    Inverse1p,
    /// `s²(3 − 2s)`.
    SmoothStep,
}

impl RadialFn {
    pub const MAX_DEGREE: u8 = 6;

    /// Every member of the family, with monomials of degree 0 to 6.
    pub fn all() -> Vec<RadialFn> {
        let mut v: Vec<RadialFn> = (0..=Self::MAX_DEGREE).map(RadialFn::Monomial).collect();
        v.extend([RadialFn::Log1p, RadialFn::Inverse1p, RadialFn::SmoothStep]);
        v
    }

    pub fn monomial(m: u8) -> Result<Self> {
        if m > Self::MAX_DEGREE {
            return Err(Error::InvalidArgument(format!("monomial degree {m} exceeds 6")));
        }
        Ok(RadialFn::Monomial(m))
    }

    pub fn value(&self, s: f64) -> f64 {
        match *self {
            RadialFn::Monomial(m) => s.powi(m as i32),
            RadialFn::Log1p => s.ln_1p(),
            RadialFn::Inverse1p => 1.0 / (1.0 + s),
            RadialFn::SmoothStep => s * s * (3.0 - 2.0 * s),
        }
    }

    pub fn d1(&self, s: f64) -> f64 {
        match *self {
            RadialFn::Monomial(0) => 0.0,
            RadialFn::Monomial(m) => m as f64 * s.powi(m as i32 - 1),
            RadialFn::Log1p => 1.0 / (1.0 + s),
            RadialFn::Inverse1p => -1.0 / ((1.0 + s) * (1.0 + s)),
            RadialFn::SmoothStep => 6.0 * s * (1.0 - s),
        }
    }

    pub fn d2(&self, s: f64) -> f64 {
        match *self {
            RadialFn::Monomial(m) if m < 2 => 0.0,
            RadialFn::Monomial(m) => (m as f64) * (m as f64 - 1.0) * s.powi(m as i32 - 2),
            RadialFn::Log1p => -1.0 / ((1.0 + s) * (1.0 + s)),
            RadialFn::Inverse1p => 2.0 / ((1.0 + s) * (1.0 + s) * (1.0 + s)),
            RadialFn::SmoothStep => 6.0 - 12.0 * s,
        }
    }

    /// `max |g|` on `[0, 1]`.
    pub fn sup_norm(&self) -> f64 {
        match *self {
            RadialFn::Monomial(_) | RadialFn::Inverse1p | RadialFn::SmoothStep => 1.0,
            RadialFn::Log1p => std::f64::consts::LN_2,
        }
    }
}

impl fmt::Display for RadialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialFn::Monomial(m) => write!(f, "s^{m}"),
            RadialFn::Log1p => f.write_str("log1p"),
            RadialFn::Inverse1p => f.write_str("inv1p"),
            RadialFn::SmoothStep => f.write_str("smoothstep"),
        }
    }
}

impl FromStr for RadialFn {
    type Err = Error;

    /// Accepts `s^m`, `log1p`, `inv1p` and `smoothstep`.
    fn from_str(text: &str) -> Result<Self> {
        match text {
            "log1p" => Ok(RadialFn::Log1p),
            "inv1p" => Ok(RadialFn::Inverse1p),
            "smoothstep" => Ok(RadialFn::SmoothStep),
            "s" => Ok(RadialFn::Monomial(1)),
            _ => {
                let m = text
                    .strip_prefix("s^")
                    .and_then(|m| m.parse::<u8>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown radial function `{text}`")))?;
                RadialFn::monomial(m)
            }
        }
    }
}

/// `f(z) = z^j g(|z|²)`; negative `j` stands for `z̄^{|j|}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Observable {
    pub j: i32,
    pub g: RadialFn,
}

impl Observable {
    pub fn new(j: i32, g: RadialFn) -> Self {
        Self { j, g }
    }

    pub fn eval(&self, z: C64, s: f64) -> C64 {
        let base = if self.j < 0 { z.conj() } else { z };
        base.powi(self.j.abs()) * self.g.value(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-5;
        for g in RadialFn::all() {
            for i in 1..20 {
                let s = i as f64 / 20.0;
                let fd1 = (g.value(s + h) - g.value(s - h)) / (2.0 * h);
                let fd2 = (g.d1(s + h) - g.d1(s - h)) / (2.0 * h);
                assert!((fd1 - g.d1(s)).abs() < 1e-8, "{g} at {s}");
                assert!((fd2 - g.d2(s)).abs() < 1e-8, "{g}'' at {s}");
            }
        }
    }

    #[test]
    fn sup_norms_on_unit_interval() {
        for g in RadialFn::all() {
            let sup = (0..=1000).map(|i| g.value(i as f64 / 1000.0).abs()).fold(0.0, f64::max);
            assert!((sup - g.sup_norm()).abs() < 1e-12, "{g}");
        }
    }

    #[test]
    fn names_round_trip() {
        for g in RadialFn::all() {
            assert_eq!(g.to_string().parse::<RadialFn>().unwrap(), g);
        }
        assert!("s^7".parse::<RadialFn>().is_err());
        assert!("cosh".parse::<RadialFn>().is_err());
    }

    #[test]
    fn observable_values() {
        let z = C64::new(0.3, 0.4);
        let o = Observable::new(2, RadialFn::Monomial(1));
        assert!((o.eval(z, z.norm_sqr()) - z * z * 0.25).norm() < 1e-16);
        let o = Observable::new(-1, RadialFn::Monomial(0));
        assert_eq!(o.eval(z, 0.25), z.conj());
    }
}
