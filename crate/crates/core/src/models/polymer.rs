use super::Atom;
use crate::error::{Error, Result};
use crate::su11::{cayley, Mat2C, Su11Coeffs, C64};

const COMMUTE_TOL: f64 = 1e-10;
/// Step of the central differences used to extract `P` and `Q`.
const FD_STEP: f64 = 1e-5;

/// One polymer σ = (K, t̂(1..K), v̂(1..K)) with its probability.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub weight: f64,
    pub t: Vec<f64>,
    pub v: Vec<f64>,
}

impl Block {
    pub fn new(weight: f64, t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.is_empty() || t.len() != v.len() {
            return Err(Error::InvalidModel("polymer block needs K >= 1 matching t and v".into()));
        }
        if t.iter().any(|t| !(t.is_finite() && *t > 0.0)) || v.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("polymer hoppings must be positive and finite".into()));
        }
        Ok(Self { weight, t, v })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolymerSpec {
    pub blocks: Vec<Block>,
}

/// `S_{v−E,t} = (1/t) [[v − E, −t²], [1, 0]]`.
pub fn transfer_step(v: f64, t: f64, energy: C64) -> Mat2C {
    let inv = 1.0 / t;
    Mat2C::new((C64::new(v, 0.0) - energy) * inv, C64::new(-t, 0.0), C64::new(inv, 0.0), C64::new(0.0, 0.0))
}

/// `S^E_σ`, propagating across sites `1..K` so that site `K` acts last:
/// `S_K ⋯ S_1`.
pub fn polymer_transfer(spec: &PolymerSpec, block: usize, energy: C64) -> Result<Mat2C> {
    let b = spec
        .blocks
        .get(block)
        .ok_or_else(|| Error::InvalidArgument(format!("block index {block} out of range")))?;
    Ok(block_transfer(b, energy))
}

fn block_transfer(b: &Block, energy: C64) -> Mat2C {
    b.t.iter()
        .zip(&b.v)
        .fold(Mat2C::identity(), |acc, (&t, &v)| transfer_step(v, t, energy) * acc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalReport {
    pub max_commutator_norm: f64,
    pub critical: bool,
    /// Per block: `|Tr S| < 2` or `S = ±Id`.
    pub elliptic: Vec<bool>,
}

impl CriticalReport {
    pub fn elliptic_critical(&self) -> bool {
        self.critical && self.elliptic.iter().all(|&e| e)
    }
}

fn is_plus_minus_identity(s: &Mat2C) -> bool {
    s.max_abs_diff(&Mat2C::identity()) <= COMMUTE_TOL || s.max_abs_diff(&-Mat2C::identity()) <= COMMUTE_TOL
}

/// Pairwise commutators and ellipticity of the blocks at the real energy `E_c`.
pub fn critical_energy_check(spec: &PolymerSpec, e_c: f64) -> CriticalReport {
    let mats: Vec<Mat2C> = spec.blocks.iter().map(|b| block_transfer(b, e_c.into())).collect();
    let mut max_comm: f64 = 0.0;
    for (i, a) in mats.iter().enumerate() {
        for b in &mats[i + 1..] {
            max_comm = max_comm.max(a.commutator(b).frobenius_norm());
        }
    }
    let elliptic = mats.iter().map(|s| s.trace().re.abs() < 2.0 || is_plus_minus_identity(s)).collect();
    CriticalReport { max_commutator_norm: max_comm, critical: max_comm <= COMMUTE_TOL, elliptic }
}

/// The real lower-triangular `M′` with `M′ S (M′)⁻¹` a rotation, for a real
/// elliptic `S = [[a, b], [c, d]]` with `|a + d| < 2`.
pub fn elliptic_basis_change(s: &Mat2C) -> Result<Mat2C> {
    let (a, b) = (s.a.re, s.b.re);
    let cos = 0.5 * s.trace().re;
    if !(cos.abs() < 1.0) || b == 0.0 {
        return Err(Error::InvalidModel(format!("transfer matrix {s:?} is not elliptic")));
    }
    let sin = -b.signum() * (1.0 - cos * cos).sqrt();
    let p = (-sin / b).sqrt();
    let q = p * (cos - a) / sin;
    Ok(Mat2C::real(p, 0.0, q, 1.0 / p))
}

/// `P = R_η⁻¹ ∂_ε T` and `Q = −i R_η⁻¹ ∂_δ T` at `ε = δ = 0`, by central
/// differences with one Richardson step.
pub fn extract_generators(
    t: impl Fn(f64, f64) -> Mat2C,
    eta: f64,
) -> Result<(Su11Coeffs, Su11Coeffs)> {
    let central = |h: f64, along_eps: bool| {
        let (plus, minus) = if along_eps { (t(h, 0.0), t(-h, 0.0)) } else { (t(0.0, h), t(0.0, -h)) };
        (plus - minus) * (0.5 / h)
    };
    let richardson = |along_eps: bool| {
        let coarse = central(FD_STEP, along_eps);
        let fine = central(0.5 * FD_STEP, along_eps);
        (fine * 4.0 - coarse) * (1.0 / 3.0)
    };
    let back = Mat2C::rotation(-eta);
    let p = back * richardson(true);
    let q = back * richardson(false) * C64::new(0.0, -1.0);
    Ok((Su11Coeffs::from_matrix(&p, 1e-7)?, Su11Coeffs::from_matrix(&q, 1e-7)?))
}

/// A polymer model at an elliptic critical energy, conjugated so that the
/// unperturbed matrices are the rotations `R_η`.
#[derive(Clone, Debug)]
pub struct PolymerModel {
    pub spec: PolymerSpec,
    pub e_c: f64,
    /// `M = C M′`.
    pub m: Mat2C,
    m_inv: Mat2C,
    /// `η`, `P` and `Q` of each block; `P′` is not extracted.
    pub atoms: Vec<Atom>,
}

impl PolymerModel {
    pub fn new(spec: PolymerSpec, e_c: f64) -> Result<Self> {
        if spec.blocks.is_empty() {
            return Err(Error::InvalidModel("polymer model has no blocks".into()));
        }
        let report = critical_energy_check(&spec, e_c);
        if !report.elliptic_critical() {
            return Err(Error::InvalidModel(format!(
                "E_c = {e_c} is not an elliptic critical energy (commutator {:e})",
                report.max_commutator_norm
            )));
        }
        let first_rotation = spec
            .blocks
            .iter()
            .map(|b| block_transfer(b, e_c.into()))
            .find(|s| !is_plus_minus_identity(s));
        let m_prime = match first_rotation {
            Some(s) => elliptic_basis_change(&s)?,
            None => Mat2C::identity(),
        };
        let m = cayley() * m_prime;
        let m_inv = m.inverse();
        let mut model = Self { spec, e_c, m, m_inv, atoms: Vec::new() };

        let mut atoms = Vec::with_capacity(model.spec.blocks.len());
        for (i, b) in model.spec.blocks.iter().enumerate() {
            let t0 = model.realize(i, 0.0, 0.0);
            let off = t0.b.norm().max(t0.c.norm());
            if off > 1e-9 {
                return Err(Error::InvalidModel(format!(
                    "block {i} is not diagonalized by the common basis change"
                )));
            }
            let eta = t0.a.arg();
            let (p, q) = extract_generators(|e, d| model.realize(i, e, d), eta)?;
            atoms.push(Atom::new(b.weight, eta, p, q));
        }
        model.atoms = atoms;
        Ok(model)
    }

    /// `M S^{E_c + ε − iδ}_σ M⁻¹`.
    pub fn realize(&self, block: usize, epsilon: f64, delta: f64) -> Mat2C {
        let energy = C64::new(self.e_c + epsilon, -delta);
        self.m * block_transfer(&self.spec.blocks[block], energy) * self.m_inv
    }

    /// `R_η⁻¹ M (∂_E S^E_σ) M⁻¹` at `E_c`, by the product rule.
    pub fn energy_derivative(&self, block: usize) -> Mat2C {
        let b = &self.spec.blocks[block];
        let e: C64 = self.e_c.into();
        let steps: Vec<Mat2C> = b.t.iter().zip(&b.v).map(|(&t, &v)| transfer_step(v, t, e)).collect();
        let mut total = Mat2C::zero();
        for k in 0..steps.len() {
            let mut term = Mat2C::identity();
            for (j, s) in steps.iter().enumerate() {
                let factor = if j == k { Mat2C::real(-1.0 / b.t[j], 0.0, 0.0, 0.0) } else { *s };
                term = factor * term;
            }
            total = total + term;
        }
        Mat2C::rotation(-self.atoms[block].eta) * self.m * total * self.m_inv
    }
}
