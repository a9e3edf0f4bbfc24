use super::accumulator::{AccumulatorLayout, OrbitAccumulator};
use super::engine::{run_replicas, RunConfig, RunOptions};
use crate::error::Result;
use crate::models::ModelSpec;

/// Mean and standard error of per-replica values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// Sample standard deviation over `√replicas`; `None` for one replica.
    pub stderr: Option<f64>,
}

impl Estimate {
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let stderr = (values.len() >= 2).then(|| {
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        });
        Self { mean, stderr }
    }
}

/// Both estimators from one set of replicas.
#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovReport {
    /// Vector growth `(1/N) Σ log‖T_n x_{n−1}‖`.
    pub growth: Estimate,
    /// Orbit average of `𝔼_σ log‖T_σ x_n‖`.
    pub furstenberg: Option<Estimate>,
    pub per_replica: Vec<f64>,
    pub merged: OrbitAccumulator,
}

pub fn lyapunov_report(
    spec: &ModelSpec,
    cfg: &RunConfig,
    layout: AccumulatorLayout,
    furstenberg: bool,
) -> Result<LyapunovReport> {
    let parts = run_replicas(spec, cfg, &RunOptions { layout: layout.clone(), furstenberg })?;
    let per_replica = parts.iter().map(OrbitAccumulator::gamma).collect::<Result<Vec<_>>>()?;
    let furstenberg = if furstenberg {
        let f = parts.iter().map(OrbitAccumulator::furstenberg_gamma).collect::<Result<Vec<_>>>()?;
        Some(Estimate::from_samples(&f))
    } else {
        None
    };
    let mut merged = OrbitAccumulator::new(layout)?;
    for p in &parts {
        merged.merge(p)?;
    }
    Ok(LyapunovReport { growth: Estimate::from_samples(&per_replica), furstenberg, per_replica, merged })
}

/// `(γ̂, stderr)` from the vector-growth estimator.
///
/// The growth of `‖T_N ⋯ T_1 x‖` bounds the matrix-norm growth from below
/// and has the same limit when the family is irreducible.
pub fn lyapunov_estimate(spec: &ModelSpec, cfg: &RunConfig) -> Result<Estimate> {
    Ok(lyapunov_report(spec, cfg, AccumulatorLayout::default(), false)?.growth)
}

/// `γ` through the Furstenberg formula, with the inner expectation exact
/// over atoms and by Gauss–Legendre quadrature over uniform parameters.
pub fn furstenberg_gamma(spec: &ModelSpec, cfg: &RunConfig) -> Result<f64> {
    let report = lyapunov_report(spec, cfg, AccumulatorLayout::default(), true)?;
    Ok(report.furstenberg.map_or(0.0, |e| e.mean))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{anderson_model, Uniform};
    use crate::su11::C64;

    fn benchmark_model(epsilon: f64, delta: f64) -> ModelSpec {
        anderson_model(-2.0 * 2f64.cos(), epsilon, delta, Uniform::new(-1.0, 1.0).unwrap(), None)
            .unwrap()
    }

    #[test]
    fn estimate_statistics() {
        let e = Estimate::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.mean, 2.5);
        assert!((e.stderr.unwrap() - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        assert_eq!(Estimate::from_samples(&[3.0]).stderr, None);
    }

    #[test]
    fn shipped_models_have_nonnegative_exponents() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("models");
        let cfg = RunConfig { replicas: 2, burnin: 100, ..RunConfig::new(20_000) };
        for name in ["anderson.json", "dimer.json", "hyperbolic_drift.json"] {
            let spec = crate::models::load_model(&dir.join(name)).unwrap();
            let e = lyapunov_estimate(&spec, &cfg).unwrap();
            assert!(e.mean >= -1e-9, "{name}: {}", e.mean);
        }
    }

    #[test]
    fn unperturbed_exponent_is_zero() {
        let cfg = RunConfig { replicas: 2, ..RunConfig::new(1000) };
        let e = lyapunov_estimate(&benchmark_model(0.0, 0.0), &cfg).unwrap();
        assert!(e.mean.abs() < 1e-14 && e.stderr.unwrap() < 1e-14);
        assert!(furstenberg_gamma(&benchmark_model(0.0, 0.0), &cfg).unwrap().abs() < 1e-14);
    }

    #[test]
    fn pure_drift_matches_c_delta() {
        // At ε = 0 the Anderson orbit is deterministic and settles at the
        // fixed point, where the growth is exactly the drift rate.
        let delta = 1e-3;
        let cfg = RunConfig { replicas: 2, z0: C64::new(0.0, 0.0), ..RunConfig::new(200_000) };
        let e = lyapunov_estimate(&benchmark_model(0.0, delta), &cfg).unwrap();
        let c = 1.0 / (2.0 * 2f64.sin());
        assert!((e.mean - c * delta).abs() < 0.02 * c * delta, "{} vs {}", e.mean, c * delta);
    }

    #[test]
    fn estimators_agree() {
        let cfg = RunConfig { replicas: 4, ..RunConfig::new(100_000) };
        let r = lyapunov_report(&benchmark_model(0.1, 1e-3), &cfg, AccumulatorLayout::default(), true).unwrap();
        let f = r.furstenberg.unwrap();
        let combined = r.growth.stderr.unwrap().hypot(f.stderr.unwrap());
        assert!((r.growth.mean - f.mean).abs() <= 4.0 * combined, "{:?} vs {:?}", r.growth, f);
    }
}
