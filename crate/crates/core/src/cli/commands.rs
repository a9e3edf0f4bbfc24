use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::{fmt_f64, output, RunArgs};
use crate::analysis::radial::bin_edge;
use crate::analysis::{ks_compare, gamma_residual, RadialLaw};
use crate::dynamics::{
    lyapunov_estimate, lyapunov_report, run_orbit, AccumulatorLayout, Orbit, RadialAxis,
};
use crate::error::{Error, Result};
use crate::models::{constants as model_constants, load_model, xi_q3_bound, DerivedConstants};

const LYAP_REPLICAS: u64 = 4;

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, Value::from)
}

fn write_json(out: Option<&Path>, value: &Value) -> Result<()> {
    let mut w = output(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn orbit(args: &RunArgs) -> Result<()> {
    let spec = args.model()?;
    let cfg = args.config(0, 1)?;
    let mut orbit = Orbit::new(&spec, &cfg, 0)?;
    let mut w = output(args.out.as_deref())?;
    writeln!(w, "n,re_z,im_z,abs_z2")?;
    for n in 1..=cfg.steps {
        orbit.step()?;
        if n > cfg.burnin {
            let x = orbit.point();
            let s = x.radius_sq();
            match x.chart().finite() {
                Some(z) => writeln!(w, "{n},{},{},{}", fmt_f64(z.re), fmt_f64(z.im), fmt_f64(s))?,
                None => writeln!(w, "{n},inf,inf,inf")?,
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Sidecar path for `hist --out <path>`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

pub fn hist(args: &RunArgs, bins: usize) -> Result<()> {
    let spec = args.model()?;
    let cfg = args.default_config(1)?;
    let axis = RadialAxis::for_model(&spec);
    let acc = run_orbit(&spec, &cfg, AccumulatorLayout { bins, axis, ..Default::default() })?;
    let lambda = model_constants(&spec).ok().and_then(|k| k.lambda_at(spec.epsilon, spec.delta).ok());
    let law = lambda.filter(|l| *l > 0.0).map(RadialLaw::new).transpose()?;

    let mut w = output(args.out.as_deref())?;
    writeln!(w, "s_lo,s_hi,count,empirical_density,rho_lambda")?;
    let total = acc.count as f64;
    let mut lo = 0.0;
    for (k, &count) in acc.radial_counts.iter().enumerate() {
        let hi = bin_edge(axis, bins, k);
        let width = hi - lo;
        let density = if width.is_finite() { count as f64 / (total * width) } else { 0.0 };
        let mid = 0.5 * (lo + hi);
        let rho = match law {
            Some(l) if mid <= 1.0 => l.rho(mid)?,
            Some(_) => 0.0,
            None => f64::NAN,
        };
        writeln!(w, "{},{},{count},{},{}", fmt_f64(lo), fmt_f64(hi), fmt_f64(density), fmt_f64(rho))?;
        lo = hi;
    }
    w.flush()?;
    drop(w);

    let ks = law.map(|l| ks_compare(&acc, &l)).transpose()?;
    let sidecar = json!({
        "lambda": opt(lambda),
        "ks_statistic": opt(ks),
        "count": acc.count,
        "bins": bins,
        "axis": match axis { RadialAxis::Disc => "s", RadialAxis::Sphere => "arctan_s" },
        "epsilon": spec.epsilon,
        "delta": spec.delta,
        "seed": cfg.seed,
        "steps": cfg.steps,
        "burnin": cfg.burnin,
        "replicas": cfg.replicas,
    });
    match &args.out {
        Some(p) => write_json(Some(&sidecar_path(p)), &sidecar),
        None => {
            eprintln!("{sidecar}");
            Ok(())
        }
    }
}

fn require_replicas(n: u64) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument("standard errors need --replicas >= 2".into()));
    }
    Ok(())
}

pub fn lyap(args: &RunArgs) -> Result<()> {
    let spec = args.model()?;
    let cfg = args.default_config(LYAP_REPLICAS)?;
    require_replicas(cfg.replicas)?;
    let k = model_constants(&spec)?;
    let report = lyapunov_report(&spec, &cfg, AccumulatorLayout::default(), true)?;
    let (prediction, residual) = gamma_residual(&k, spec.epsilon, spec.delta, report.growth.mean);
    let value = json!({
        "gamma_hat": report.growth.mean,
        "stderr": opt(report.growth.stderr),
        "gamma_furstenberg": opt(report.furstenberg.map(|f| f.mean)),
        "prediction": prediction,
        "residual": residual,
        "C": k.c,
        "D": k.d,
        "lambda": opt(k.lambda_at(spec.epsilon, spec.delta).ok()),
    });
    write_json(args.out.as_deref(), &value)
}

pub fn scan(args: &RunArgs, epsilons: &[f64], deltas: &[f64]) -> Result<()> {
    if epsilons.is_empty() || deltas.is_empty() {
        return Err(Error::InvalidArgument("scan grids must be nonempty".into()));
    }
    let base = args.model()?;
    let cfg = args.default_config(LYAP_REPLICAS)?;
    require_replicas(cfg.replicas)?;
    let k = model_constants(&base)?;
    let mut w = output(args.out.as_deref())?;
    writeln!(w, "epsilon,delta,gamma_hat,stderr,prediction,residual")?;
    for &eps in epsilons {
        for &delta in deltas {
            let est = lyapunov_estimate(&base.with_params(eps, delta), &cfg)?;
            let (prediction, residual) = gamma_residual(&k, eps, delta, est.mean);
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt_f64(eps),
                fmt_f64(delta),
                fmt_f64(est.mean),
                fmt_f64(est.stderr.unwrap_or(f64::NAN)),
                fmt_f64(prediction),
                fmt_f64(residual)
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn constants_json(k: &DerivedConstants, xi_bound: Option<f64>) -> Value {
    json!({
        "C": k.c,
        "D": k.d,
        "lambda_per_unit_ratio": opt(k.lambda_per_unit_ratio),
        "beta_mean_re": k.beta_mean.re,
        "beta_mean_im": k.beta_mean.im,
        "beta_abs2_mean": k.beta_abs2_mean,
        "phase2_mean": [k.phase2_mean.re, k.phase2_mean.im],
        "phase4_mean": [k.phase4_mean.re, k.phase4_mean.im],
        "d_classification": k.d_classification.as_str(),
        "xi_q3_bound": opt(xi_bound),
    })
}

pub fn constants(model: &Path, out: Option<&Path>) -> Result<()> {
    let spec = load_model(model)?;
    let k = model_constants(&spec)?;
    write_json(out, &constants_json(&k, xi_q3_bound(&spec).ok()))
}
