use rayon::prelude::*;

use super::accumulator::{AccumulatorLayout, OrbitAccumulator, RadialAxis};
use super::rng::{sample_stream, SampleStream};
use crate::error::{Error, Result};
use crate::models::{Draw, Family, ModelSpec};
use crate::moebius::{act_with_norm, lift, Extended, SpherePoint};
use crate::quadrature::gauss_legendre;
use crate::su11::{exp_traceless, Mat2C, C64};

pub const DEFAULT_BURNIN: u64 = 1000;
/// Tolerance on `|z|² − 1` before an orbit counts as escaped.
pub const ESCAPE_TOL: f64 = 1e-9;
const W_NODES: usize = 16;
const D_NODES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    /// Total iterations, burn-in included.
    pub steps: u64,
    pub burnin: u64,
    pub replicas: u64,
    pub z0: C64,
}

impl RunConfig {
    pub fn new(steps: u64) -> Self {
        Self { seed: 0, steps, burnin: DEFAULT_BURNIN.min(steps.saturating_sub(1)), replicas: 1, z0: C64::new(0.0, 0.0) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.burnin >= self.steps {
            return Err(Error::InvalidArgument(format!(
                "need steps > burnin >= 0 (steps {}, burnin {})",
                self.steps, self.burnin
            )));
        }
        if self.replicas == 0 {
            return Err(Error::InvalidArgument("need at least one replica".into()));
        }
        if !(self.z0.norm() <= 1.0) {
            return Err(Error::InvalidArgument(format!("z0 = {} is outside the closed disc", self.z0)));
        }
        Ok(())
    }

    pub fn retained(&self) -> u64 {
        self.steps - self.burnin
    }
}

impl RadialAxis {
    pub fn for_model(spec: &ModelSpec) -> Self {
        if spec.monotone() {
            RadialAxis::Disc
        } else {
            RadialAxis::Sphere
        }
    }
}

/// Precomputed step matrices for one model.
struct Kernel<'a> {
    spec: &'a ModelSpec,
    rotations: Vec<Mat2C>,
}

impl<'a> Kernel<'a> {
    fn new(spec: &'a ModelSpec) -> Self {
        let rotations = spec.atoms().iter().map(|a| Mat2C::rotation(a.eta)).collect();
        Self { spec, rotations }
    }

    fn matrix(&self, draw: &Draw) -> Mat2C {
        match &self.spec.family {
            Family::Exponential { atoms, .. } => {
                let a = &atoms[draw.atom];
                let (eps, delta) = (self.spec.epsilon, self.spec.delta);
                let real = a.p_at(draw.w).scaled(eps).plus(&a.p_prime.scaled(eps * eps));
                let imag = a.q.scaled(delta * draw.d * a.d_factor);
                let generator = real.matrix() + imag.matrix() * C64::new(0.0, 1.0);
                self.rotations[draw.atom] * exp_traceless(&generator)
            }
            Family::Polymer(_) => self.spec.realize(draw),
        }
    }

    /// `(probability, T_σ)` pairs for `𝔼_σ`: exact over atoms, Gauss–Legendre
    /// over the uniform laws.
    fn expectation_table(&self) -> Vec<(f64, Mat2C)> {
        let nodes = |law: Option<crate::models::Uniform>, n: usize, default: f64| match law {
            Some(u) => gauss_legendre(n)
                .into_iter()
                .map(|(x, w)| (0.5 * w, u.mean() + 0.5 * (u.high - u.low) * x))
                .collect::<Vec<_>>(),
            None => vec![(1.0, default)],
        };
        let ws = nodes(self.spec.w_law(), W_NODES, 0.0);
        let ds = nodes(self.spec.d_law(), D_NODES, 1.0);
        let mut table = Vec::new();
        for (i, a) in self.spec.atoms().iter().enumerate() {
            if a.weight == 0.0 {
                continue;
            }
            for &(pw, w) in &ws {
                for &(pd, d) in &ds {
                    table.push((a.weight * pw * pd, self.matrix(&Draw { atom: i, w, d })));
                }
            }
        }
        table
    }
}

/// One trajectory `x_n = T_n ⋆ x_{n−1}` on the sphere.
pub struct Orbit<'a> {
    kernel: Kernel<'a>,
    stream: SampleStream,
    x: SpherePoint,
    n: u64,
    check_escape: bool,
}

impl<'a> Orbit<'a> {
    pub fn new(spec: &'a ModelSpec, cfg: &RunConfig, replica: u64) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            kernel: Kernel::new(spec),
            stream: sample_stream(spec, cfg.seed, replica),
            x: lift(Extended::Finite(cfg.z0)),
            n: 0,
            check_escape: spec.monotone(),
        })
    }

    pub fn point(&self) -> &SpherePoint {
        &self.x
    }

    pub fn index(&self) -> u64 {
        self.n
    }

    /// Advances one step and returns `‖T_n x_{n−1}‖`.
    pub fn step(&mut self) -> Result<f64> {
        let draw = self.stream.next_draw();
        let t = self.kernel.matrix(&draw);
        let (x, norm) = act_with_norm(&t, &self.x)?;
        self.x = x;
        self.n += 1;
        if self.check_escape {
            let s = x.radius_sq();
            if s > 1.0 + ESCAPE_TOL {
                return Err(Error::Escape { step: self.n, radius_sq: s });
            }
        }
        Ok(norm)
    }
}

/// Options beyond the accumulator layout.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub layout: AccumulatorLayout,
    /// Also record `𝔼_σ log‖T_σ x_{n−1}‖` along the orbit.
    pub furstenberg: bool,
}

/// Runs one replica; burn-in steps move the state but record nothing.
pub fn run_replica(spec: &ModelSpec, cfg: &RunConfig, opts: &RunOptions, replica: u64) -> Result<OrbitAccumulator> {
    let mut orbit = Orbit::new(spec, cfg, replica)?;
    let mut acc = OrbitAccumulator::new(opts.layout.clone())?;
    let table = if opts.furstenberg { orbit.kernel.expectation_table() } else { Vec::new() };
    for n in 1..=cfg.steps {
        let retained = n > cfg.burnin;
        if retained && opts.furstenberg {
            let x = orbit.point();
            acc.furstenberg_sum += table
                .iter()
                .map(|(p, t)| {
                    let (a, b) = t.apply(x.a(), x.b());
                    0.5 * p * (a.norm_sqr() + b.norm_sqr()).ln()
                })
                .sum::<f64>();
        }
        let norm = orbit.step()?;
        if retained {
            acc.log_norm_sum += norm.ln();
            let x = orbit.point();
            acc.record(x.chart().finite(), x.radius_sq());
        }
    }
    Ok(acc)
}

/// All replicas, in replica order; they may run concurrently.
pub fn run_replicas(spec: &ModelSpec, cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<OrbitAccumulator>> {
    cfg.validate()?;
    (0..cfg.replicas).into_par_iter().map(|r| run_replica(spec, cfg, opts, r)).collect()
}

fn merge_all(parts: &[OrbitAccumulator]) -> Result<OrbitAccumulator> {
    let mut total = OrbitAccumulator::new(parts[0].layout.clone())?;
    for p in parts {
        total.merge(p)?;
    }
    Ok(total)
}

/// Runs every replica and merges the accumulators in replica order.
pub fn run_orbit_with(spec: &ModelSpec, cfg: &RunConfig, opts: &RunOptions) -> Result<OrbitAccumulator> {
    merge_all(&run_replicas(spec, cfg, opts)?)
}

pub fn run_orbit(spec: &ModelSpec, cfg: &RunConfig, layout: AccumulatorLayout) -> Result<OrbitAccumulator> {
    run_orbit_with(spec, cfg, &RunOptions { layout, furstenberg: false })
}

/// Retained states `(n, z_n)` of replica 0; `None` stands for `∞`.
pub fn trace_orbit(spec: &ModelSpec, cfg: &RunConfig) -> Result<Vec<(u64, Option<C64>, f64)>> {
    let mut orbit = Orbit::new(spec, cfg, 0)?;
    let mut rows = Vec::with_capacity(cfg.retained() as usize);
    for n in 1..=cfg.steps {
        orbit.step()?;
        if n > cfg.burnin {
            let x = orbit.point();
            rows.push((n, x.chart().finite(), x.radius_sq()));
        }
    }
    Ok(rows)
}
