use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::output;
use crate::analysis::radial::generator_image;
use crate::analysis::{delta_ratio, disc_grid, epsilon_ratio, weak_identity_residual_with, Expansion, RadialLaw};
use crate::dynamics::{run_orbit, AccumulatorLayout, RadialFn, RunConfig};
use crate::error::{Error, Result};
use crate::models::{anderson_model, constants, ModelSpec, Uniform};
use crate::moebius::{act, lift, moebius};
use crate::su11::{b, cayley_conjugate, exp_su11, su11_defect_extremes, Mat2C, Su11Coeffs, C64};
use crate::analysis::second_order_balance;

const CASES: usize = 10_000;
const LAMBDA_GRID: [f64; 6] = [0.1, 0.21823, 1.0475, 2.0, 6.547, 20.0];
const BENCHMARK_POINTS: [(f64, f64); 3] = [(0.05, 7.5e-4), (0.05, 1.2e-4), (0.05, 2.5e-5)];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Moebius,
    Expansions,
    Density,
    Balance,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Algebra, Suite::Moebius, Suite::Expansions, Suite::Density, Suite::Balance];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Moebius => "moebius",
            Suite::Expansions => "expansions",
            Suite::Density => "density",
            Suite::Balance => "balance",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown suite `{s}` (expected algebra, moebius, expansions, density or balance)"))
    }
}

/// One measured quantity and its bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    /// `"<="` or `">="`.
    pub relation: &'static str,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub passed: bool,
    pub assertions: Vec<Assertion>,
}

#[derive(Default)]
struct Recorder {
    assertions: Vec<Assertion>,
}

impl Recorder {
    fn at_most(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        let passed = value <= tolerance;
        self.assertions.push(Assertion { name: name.into(), value, relation: "<=", tolerance, passed });
    }

    fn at_least(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        let passed = value >= tolerance;
        self.assertions.push(Assertion { name: name.into(), value, relation: ">=", tolerance, passed });
    }
}

fn benchmark_model(epsilon: f64, delta: f64) -> Result<ModelSpec> {
    anderson_model(-2.0 * 2f64.cos(), epsilon, delta, Uniform::new(-1.0, 1.0)?, None)
}

fn coeffs(rng: &mut ChaCha8Rng, r: f64) -> Su11Coeffs {
    Su11Coeffs::new(rng.random_range(-r..r), rng.random_range(-r..r), rng.random_range(-r..r))
}

fn group_element(rng: &mut ChaCha8Rng) -> Mat2C {
    let p = coeffs(rng, 2.0);
    Mat2C::rotation(rng.random_range(0.0..std::f64::consts::TAU)) * exp_su11(&p.matrix()).expect("traceless")
}

/// `R_η exp(P + iQ)` with `q₃ ≥ |ξ|`.
fn semigroup_element(rng: &mut ChaCha8Rng) -> Mat2C {
    let p = coeffs(rng, 2.0);
    let (u, v): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let q = Su11Coeffs::new(u, v, u.hypot(v) + rng.random_range(0.0..1.5));
    let gen = p.matrix() + q.matrix() * C64::new(0.0, 1.0);
    Mat2C::rotation(rng.random_range(0.0..std::f64::consts::TAU)) * exp_su11(&gen).expect("traceless")
}

fn disc_point(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(rng.random_range(0.0..0.999), rng.random_range(0.0..std::f64::consts::TAU))
}

fn scale(t: &Mat2C) -> f64 {
    t.frobenius_norm().powi(2).max(1.0)
}

fn algebra(rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let comm = [
        (b(1).commutator(&b(2)) + b(3) * C64::new(2.0, 0.0)).frobenius_norm(),
        (b(2).commutator(&b(3)) - b(1) * C64::new(2.0, 0.0)).frobenius_norm(),
        (b(3).commutator(&b(1)) - b(2) * C64::new(2.0, 0.0)).frobenius_norm(),
    ];
    rec.at_most("commutation_relations", comm.into_iter().fold(0.0, f64::max), 1e-15);

    let (mut form, mut det) = (0.0f64, 0.0f64);
    for _ in 0..CASES {
        let t = group_element(rng);
        let (lo, hi) = su11_defect_extremes(&t);
        form = form.max(lo.abs().max(hi.abs()) / scale(&t));
        det = det.max((t.det() - C64::new(1.0, 0.0)).norm() / scale(&t));
    }
    rec.at_most("exp_su11_form_defect_max", form, 1e-10);
    rec.at_most("exp_su11_det_defect_max", det, 1e-12);

    let mut violations = 0;
    for _ in 0..CASES {
        let t = semigroup_element(rng);
        if su11_defect_extremes(&t).1 > 1e-10 * scale(&t) {
            violations += 1;
        }
    }
    rec.at_most("semigroup_membership_violations", violations as f64, 0.0);

    let mut cayley = 0.0f64;
    for _ in 0..CASES {
        let (a, bb, c): (f64, f64, f64) = (rng.random_range(0.2..3.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let s = Mat2C::real(a, bb, c, (1.0 + bb * c) / a);
        let t = cayley_conjugate(&s).expect("real unimodular");
        let (lo, hi) = su11_defect_extremes(&t);
        cayley = cayley.max(lo.abs().max(hi.abs()) / scale(&t));
    }
    rec.at_most("cayley_form_defect_max", cayley, 1e-10);
}

fn moebius_suite(rng: &mut ChaCha8Rng, rec: &mut Recorder) {
    let mut violations = 0;
    for _ in 0..CASES {
        let t = semigroup_element(rng);
        let z = disc_point(rng);
        match act(&t, &lift(z.into())) {
            Ok(y) if y.radius_sq() < 1.0 => {}
            _ => violations += 1,
        }
    }
    rec.at_most("disc_invariance_violations", violations as f64, 0.0);

    let mut circle = 0.0f64;
    for _ in 0..CASES {
        let t = group_element(rng);
        let z = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
        let w = moebius(&t, z.into()).finite().map_or(f64::INFINITY, |w| (w.norm() - 1.0).abs());
        circle = circle.max(w);
    }
    rec.at_most("circle_invariance_max", circle, 1e-10);

    let mut comp = 0.0f64;
    for _ in 0..CASES {
        let (t1, t2) = (group_element(rng), group_element(rng));
        let x = lift(disc_point(rng).into());
        let (Ok(a), Ok(bb)) = (act(&t1, &x).and_then(|y| act(&t2, &y)), act(&(t2 * t1), &x)) else {
            comp = f64::INFINITY;
            continue;
        };
        comp = comp.max((a.a() * bb.b() - a.b() * bb.a()).norm());
    }
    rec.at_most("composition_cross_max", comp, 1e-9);
}

fn expansions(rec: &mut Recorder) -> Result<()> {
    let spec = benchmark_model(0.0, 0.0)?;
    let grid = disc_grid();
    for kind in Expansion::ALL {
        let (mut eps_min, mut delta_min) = (f64::INFINITY, f64::INFINITY);
        let mut failures = 0;
        for atom in spec.atoms() {
            for w in [-1.0, 0.0, 1.0] {
                for &z in &grid {
                    let e = epsilon_ratio(kind, atom, w, 1.0, 0.01, z);
                    let d = delta_ratio(kind, atom, w, 1.0, 0.01, z);
                    failures += usize::from(!e.passed()) + usize::from(!d.passed());
                    eps_min = eps_min.min(e.ratio.unwrap_or(f64::INFINITY));
                    delta_min = delta_min.min(d.ratio.unwrap_or(f64::INFINITY));
                }
            }
        }
        rec.at_least(format!("{}_epsilon_halving_ratio_min", kind.as_str()), eps_min, 7.0);
        rec.at_least(format!("{}_delta_halving_ratio_min", kind.as_str()), delta_min, 3.5);
        rec.at_most(format!("{}_ratio_failures", kind.as_str()), failures as f64, 0.0);
    }
    Ok(())
}

fn density(rec: &mut Recorder, lambda_scale: f64) -> Result<()> {
    let (mut norm, mut weak, mut cdf) = (0.0f64, 0.0f64, 0.0f64);
    let h = 1e-6;
    for lambda in LAMBDA_GRID {
        let law = RadialLaw::new(lambda)?;
        norm = norm.max((law.normalization() - 1.0).abs());
        let density_law = RadialLaw::new(lambda * lambda_scale)?;
        for g in RadialFn::all() {
            weak = weak.max(weak_identity_residual_with(&density_law, lambda, g).abs());
        }
        for i in 1..1000 {
            let s = i as f64 / 1000.0;
            let fd = (law.cdf(s + h) - law.cdf(s - h)) / (2.0 * h);
            let rho = law.rho(s)?;
            cdf = cdf.max((fd - rho).abs() / rho.max(1.0));
        }
    }
    rec.at_most("normalization_error_max", norm, 1e-10);
    rec.at_most("weak_identity_residual_max", weak, 1e-8);
    rec.at_most("cdf_derivative_relative_error_max", cdf, 1e-8);
    Ok(())
}

/// Steps of the short simulated balance run.
const BALANCE_STEPS: u64 = 2_000_000;

fn balance(rec: &mut Recorder, seed: u64) -> Result<()> {
    let g = RadialFn::Log1p;
    let mut integrand = 0.0f64;
    for i in 0..=100 {
        let s = i as f64 / 100.0;
        integrand = integrand.max((s * g.d1(s) - s / (1.0 + s)).abs());
        let diffusion = (1.0 - s) * (1.0 - s) * (g.d1(s) + s * g.d2(s));
        integrand = integrand.max((diffusion - ((1.0 - s) / (1.0 + s)).powi(2)).abs());
    }
    rec.at_most("log1p_integrand_mismatch_max", integrand, 1e-15);

    // Under the exact law the two sides agree to quadrature accuracy.
    let mut exact = 0.0f64;
    for (eps, delta) in BENCHMARK_POINTS {
        let k = constants(&benchmark_model(eps, delta)?)?;
        let law = RadialLaw::new(k.lambda_at(eps, delta)?)?;
        for g in [RadialFn::Monomial(1), RadialFn::Log1p] {
            let lhs = 2.0 * k.c * delta * law.expectation(|s| s * g.d1(s));
            let rhs = k.d * eps * eps * law.expectation(|s| (1.0 - s) * (1.0 - s) * (g.d1(s) + s * g.d2(s)));
            let image = k.d * eps * eps * law.expectation(|s| generator_image(law.lambda(), g, s));
            exact = exact.max((lhs - rhs).abs().max(image.abs()) / lhs.max(rhs));
        }
    }
    rec.at_most("exact_law_balance_relative_max", exact, 1e-8);

    let (eps, delta) = BENCHMARK_POINTS[1];
    let spec = benchmark_model(eps, delta)?;
    let k = constants(&spec)?;
    let cfg = RunConfig { seed, replicas: 4, ..RunConfig::new(BALANCE_STEPS / 4) };
    let layout = AccumulatorLayout { balance: vec![RadialFn::Monomial(1), RadialFn::Log1p], ..Default::default() };
    let acc = run_orbit(&spec, &cfg, layout)?;
    for g in [RadialFn::Monomial(1), RadialFn::Log1p] {
        let (lhs, rhs) = second_order_balance(&acc, &k, eps, delta, g)?;
        rec.at_most(format!("simulated_balance_{g}_relative"), (lhs - rhs).abs() / lhs.max(rhs), 0.2);
    }
    Ok(())
}

/// Runs the selected suites (all when empty).
pub fn run_suites(suites: &[Suite], seed: u64, lambda_scale: f64) -> Result<Vec<SuiteReport>> {
    if !(lambda_scale > 0.0 && lambda_scale.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda scale must be positive, got {lambda_scale}")));
    }
    let selected: Vec<Suite> = if suites.is_empty() { Suite::ALL.to_vec() } else { suites.to_vec() };
    let mut reports = Vec::new();
    for suite in selected {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rec = Recorder::default();
        match suite {
            Suite::Algebra => algebra(&mut rng, &mut rec),
            Suite::Moebius => moebius_suite(&mut rng, &mut rec),
            Suite::Expansions => expansions(&mut rec)?,
            Suite::Density => density(&mut rec, lambda_scale)?,
            Suite::Balance => balance(&mut rec, seed)?,
        }
        let passed = rec.assertions.iter().all(|a| a.passed);
        reports.push(SuiteReport { suite: suite.as_str(), passed, assertions: rec.assertions });
    }
    Ok(reports)
}

/// Writes the JSON report; returns whether every assertion passed.
pub fn check(suites: &[Suite], seed: u64, lambda_scale: f64, out: Option<&Path>) -> Result<bool> {
    let reports = run_suites(suites, seed, lambda_scale)?;
    let passed = reports.iter().all(|r| r.passed);
    let mut w = output(out)?;
    serde_json::to_writer_pretty(&mut w, &serde_json::json!({ "passed": passed, "suites": reports }))?;
    writeln!(w)?;
    w.flush()?;
    Ok(passed)
}
