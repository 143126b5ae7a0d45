//! Acceptance criteria, run in order on one thread so the runtime limits
//! measure each criterion alone. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::oracle::*;
use pinchlab::audit::{self, Audit, AuditOptions, ChartChoice, EvaluationSummary, GridSpec};
use pinchlab::constants::{self, EpsilonBranch, ScalarSign};
use pinchlab::engine::{self, FdConfig};
use pinchlab::lab::{self, CampaignConfig, Distribution, Inequality, KChoice};
use pinchlab::sampling::halton;
use pinchlab::verify::{self, Suite, SuiteOptions};
use pinchlab::zoo;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("runtime {t:.2?} exceeds {limit:?}"))?;
    Ok(t)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn product(n: usize) -> zoo::ZooEntry {
    zoo::make_product_circle_sphere(n, 0.1, true).unwrap()
}

/// Normalized trace-free Ricci `L^{n/2}` norm over `Y` on S¹×S^{n−1}, n ∈ {6, 8}.
fn sharpness_ratio() -> Outcome {
    let start = Instant::now();
    let mut detail = Vec::new();
    for n in [6, 8] {
        let e = product(n);
        let closed = audit::run_audit(Audit::WeylRicci, &e, &AuditOptions::closed_form().without_bach()).map_err(|e| e.to_string())?;
        let c = closed.auxiliary("ric0_ln2_sqrt_n_n1_over_Y").unwrap();
        ensure((c - 1.0).abs() <= 1e-8, || format!("n={n} closed-form ratio {c}"))?;
        let grid = GridSpec::default_for_entry(&e);
        let quad = audit::run_audit(Audit::WeylRicci, &e, &AuditOptions::quadrature(grid).without_bach()).map_err(|e| e.to_string())?;
        let q = quad.auxiliary("ric0_ln2_sqrt_n_n1_over_Y").unwrap();
        ensure((q - 1.0).abs() <= 1e-3, || format!("n={n} quadrature ratio {q}"))?;
        detail.push(format!("n={n} closed {:.1e} quad {:.1e}", (c - 1.0).abs(), (q - 1.0).abs()));
    }
    let t = within_time(start, Duration::from_secs(10))?;
    Ok(format!("{} in {t:.2?}", detail.join(", ")))
}

/// `lhs/Y = C₁(n)` on the same metrics.
fn weyl_ricci_boundary() -> Outcome {
    let mut detail = Vec::new();
    for n in [6i64, 8] {
        let e = product(n as usize);
        let r = audit::run_audit(Audit::WeylRicci, &e, &AuditOptions::closed_form().without_bach()).map_err(|e| e.to_string())?;
        let v = r.auxiliary("lhs_over_Y").unwrap();
        let err = rel_err(v, &oracle_c1(n));
        ensure(err <= 1e-8, || format!("n={n}: lhs/Y {v} vs C1, rel {err:e}"))?;
        ensure(r.verdict == audit::Verdict::Boundary, || format!("n={n}: verdict {}", r.verdict))?;
        detail.push(format!("n={n} rel {err:.1e}"));
    }
    Ok(detail.join(", "))
}

/// The pointwise condition holds with equality on S¹×S^{n−1}.
fn pointwise_equality() -> Outcome {
    let mut worst = 0.0_f64;
    for n in [4, 5, 6] {
        let e = product(n);
        let r = audit::run_audit(Audit::Pointwise, &e, &AuditOptions::sampled(200).without_bach()).map_err(|e| e.to_string())?;
        let EvaluationSummary::Sampled { points, max_abs_residual } = r.evaluation else {
            return Err("pointwise audit did not sample".into());
        };
        ensure(points == 200, || format!("{points} points"))?;
        ensure(max_abs_residual <= 1e-10, || format!("n={n}: residual {max_abs_residual:e}"))?;
        worst = worst.max(max_abs_residual);
    }
    Ok(format!("max |residual| {worst:.1e} over 200 points, n=4,5,6"))
}

/// The Gauss–Bonnet combination on the round S⁴.
fn gauss_bonnet() -> Outcome {
    let e = zoo::make_round_sphere(4, 1.0).unwrap();
    let target = 64.0 * PI * PI;
    let closed = audit::run_audit(Audit::GaussBonnet, &e, &AuditOptions::closed_form().without_bach()).map_err(|e| e.to_string())?;
    let ec = rel(closed.lhs, target);
    ensure(ec <= 1e-6, || format!("closed form {} vs 64π², rel {ec:e}", closed.lhs))?;
    let grid = GridSpec::uniform(20).on(ChartChoice::Primary);
    let quad = audit::run_audit(Audit::GaussBonnet, &e, &AuditOptions::quadrature(grid).without_bach()).map_err(|e| e.to_string())?;
    let eq = rel(quad.lhs, target);
    ensure(eq <= 1e-3, || format!("stereographic quadrature {} vs 64π², rel {eq:e}", quad.lhs))?;
    Ok(format!("closed rel {ec:.1e}, stereographic 20^4 rel {eq:.1e}"))
}

/// `∫R² − 12∫|R̊ic|² = Y² = 384π²` on the round S⁴.
fn gursky_equality() -> Outcome {
    let e = zoo::make_round_sphere(4, 1.0).unwrap();
    let target = 384.0 * PI * PI;
    let r = audit::run_audit(Audit::Gursky, &e, &AuditOptions::closed_form().without_bach()).map_err(|e| e.to_string())?;
    let el = rel(r.lhs, target);
    let ey = rel(r.threshold, target);
    ensure(el <= 1e-6 && ey <= 1e-6, || format!("lhs {} and Y² {} vs 384π²", r.lhs, r.threshold))?;
    Ok(format!("lhs rel {el:.1e}, Y² rel {ey:.1e}"))
}

fn bach_max(chart: &engine::MetricChart, points: &[Vec<f64>], cfg: &FdConfig) -> Result<(f64, usize), String> {
    let mut best = (0.0, 0);
    for (i, x) in points.iter().enumerate() {
        let b = engine::bach(chart, x, cfg).map_err(|e| e.to_string())?.max_abs_entry();
        if b > best.0 {
            best = (b, i);
        }
    }
    Ok(best)
}

fn halton_points(chart: &engine::MetricChart, k: usize) -> Vec<Vec<f64>> {
    (0..k).map(|i| chart.sample_point(&halton(i, chart.dim()))).collect()
}

/// Bach vanishing on the Bach-flat zoo, and a stable nonzero control.
fn bach_vanishing() -> Outcome {
    let start = Instant::now();
    let cfg = FdConfig::default();
    let labels = [
        "round-sphere:n=4:r=1",
        "round-sphere:n=5:r=1",
        "round-sphere:n=6:r=1",
        "flat-torus:n=4",
        "flat-torus:n=5",
        "s1xs:n=4:t=0.1:normalized",
        "s1xs:n=5:t=0.1:normalized",
        "s1xs:n=6:t=0.1:normalized",
        "s1xs:n=8:t=0.1:normalized",
        "fubini-study",
    ];
    let mut worst = 0.0_f64;
    for label in labels {
        let e = zoo::from_label(label).unwrap();
        let (b, _) = bach_max(&e.chart, &halton_points(&e.chart, 4), &cfg)?;
        ensure(b < 1e-5, || format!("{label}: max |B| {b:e}"))?;
        worst = worst.max(b);
    }
    let control = zoo::from_label("perturbed-flat:n=4:amp=0.1:seed=42").unwrap();
    let points = halton_points(&control.chart, 8);
    let (b, i) = bach_max(&control.chart, &points, &cfg)?;
    ensure(b > 1e-3, || format!("perturbed flat max |B| {b:e}"))?;
    let half = FdConfig::new(cfg.step / 2.0, cfg.order, cfg.richardson).unwrap();
    let b_half = engine::bach(&control.chart, &points[i], &half).map_err(|e| e.to_string())?.max_abs_entry();
    let drift = rel(b_half, b);
    ensure(drift <= 0.2, || format!("control changes by {drift:.3} under step halving"))?;
    let t = within_time(start, Duration::from_secs(60))?;
    Ok(format!("zoo max |B| {worst:.1e}; control {b:.3e}, step-halving drift {drift:.1e}; {t:.2?}"))
}

/// Algebraic identity suites on 1000 random tensors per dimension.
fn identity_suites() -> Outcome {
    let start = Instant::now();
    let opts = SuiteOptions { dims: (4..=8).collect(), trials: 1000, seed: 2024, ..SuiteOptions::default() };
    let r = verify::run_suite(Suite::Algebra, &opts).map_err(|e| e.to_string())?;
    let worst = r.checks.iter().map(|c| c.max_residual).fold(0.0, f64::max);
    if let Some(c) = r.checks.iter().find(|c| !c.passed()) {
        return Err(format!("{} on {}: {:e}", c.name, c.subject, c.max_residual));
    }
    ensure(r.checks.iter().all(|c| c.tol == 1e-12 && c.cases == 1000), || "suite tolerance or size differs".into())?;
    let t = within_time(start, Duration::from_secs(30))?;
    Ok(format!("{} checks, worst relative residual {worst:.1e}; {t:.2?}", r.checks.len()))
}

/// Seeded campaigns with no violations, and spiked matrix campaigns that
/// approach equality.
fn inequality_campaigns() -> Outcome {
    const TRIALS: u64 = 100_000;
    let start = Instant::now();
    let mut runs: Vec<(Inequality, usize, Distribution)> = Vec::new();
    for m in 3..=8 {
        runs.push((Inequality::CubicTrace, m, Distribution::Gaussian));
        runs.push((Inequality::EigenBound, m, Distribution::Gaussian));
    }
    for n in 4..=8 {
        runs.push((Inequality::Huisken, n, Distribution::Gaussian));
        for k in [KChoice::Value(0.0), KChoice::Value(1.0), KChoice::Critical] {
            runs.push((Inequality::WeylRicciCubic(k), n, Distribution::Gaussian));
        }
        runs.push((Inequality::ContractionCubic, n, Distribution::Gaussian));
        runs.push((Inequality::ContractionRicci, n, Distribution::Gaussian));
    }
    let mut campaigns = 0;
    for (seed, (ineq, n, dist)) in runs.into_iter().enumerate() {
        let cfg = CampaignConfig::new(ineq, n, TRIALS, seed as u64).with_distribution(dist);
        let s = lab::run_campaign(&cfg).map_err(|e| e.to_string())?;
        ensure(s.violations == 0, || format!("{} n={n}: {} violations", ineq.id(), s.violations))?;
        ensure(s.tol == 1e-12 && s.trials == TRIALS, || "campaign tolerance or size differs".into())?;
        campaigns += 1;
    }
    let mut min_spiked = f64::INFINITY;
    for m in 3..=8 {
        for ineq in [Inequality::CubicTrace, Inequality::EigenBound] {
            let cfg = CampaignConfig::new(ineq, m, TRIALS, 1000 + m as u64).with_distribution(Distribution::Spiked);
            let s = lab::run_campaign(&cfg).map_err(|e| e.to_string())?;
            let r = s.max_ratio.unwrap_or(0.0);
            ensure(s.violations == 0, || format!("spiked {} m={m}: violations", ineq.id()))?;
            ensure(r > 0.999, || format!("spiked {} m={m}: max ratio {r}", ineq.id()))?;
            min_spiked = min_spiked.min(r);
            campaigns += 1;
        }
    }
    let t = within_time(start, Duration::from_secs(300))?;
    Ok(format!("{campaigns} campaigns of {TRIALS} trials, no violations; spiked max ratio >= {min_spiked:.10}; {t:.2?}"))
}

fn binary_exit(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_pinchlab")).args(args).output().expect("binary runs").status.code().unwrap_or(-1)
}

/// Constants against the fixed-point oracle, and exit code 2 on branch
/// domain violations.
fn constants_vs_oracle() -> Outcome {
    let mut worst = 0.0_f64;
    let mut check = |name: &str, got: f64, want: Fx| -> Result<(), String> {
        let e = rel_err(got, &want);
        worst = worst.max(e);
        ensure(e <= REL_TOL, || format!("{name}: rel {e:e}"))
    };
    for n in 3..=12i64 {
        let u = n as usize;
        check("C", constants::c_cubic(u).unwrap(), oracle_c(n))?;
        check("E", constants::e_const(u).unwrap(), oracle_e(n))?;
        check("A", constants::a_const(u, ScalarSign::NonNeg).unwrap(), Fx::ratio(1, n - 1))?;
        check("A", constants::a_const(u, ScalarSign::Neg).unwrap(), Fx::ratio(2, n))?;
    }
    for n in [4i64, 5] {
        let u = n as usize;
        check("eps critical", constants::epsilon_auto(u, n as f64 / 2.0).unwrap(), oracle_eps_critical(n))?;
        check("eps large", constants::epsilon_auto(u, constants::epsilon_upper_exponent(u)).unwrap(), oracle_eps_large(n))?;
        check("C3", constants::c3_weitzenbock(u).unwrap(), oracle_c2(n))?;
    }
    for (n, pn, pd) in [(4i64, 5i64, 2i64), (4, 3, 1), (5, 11, 4), (5, 3, 1)] {
        let got = constants::epsilon_with_branch(n as usize, pn as f64 / pd as f64, EpsilonBranch::Intermediate).unwrap();
        check("eps intermediate", got, oracle_eps_intermediate(n, pn, pd))?;
    }
    for n in 4..=12i64 {
        let u = n as usize;
        if n >= 6 {
            check("eps large", constants::epsilon_auto(u, n as f64).unwrap(), oracle_eps_large(n))?;
        }
        check("C1", constants::c1_einstein(u).unwrap(), oracle_c1(n))?;
        check("C2", constants::c2_sphere(u).unwrap(), oracle_c2(n))?;
    }
    let rejections: [&[&str]; 4] = [
        &["constants", "--n", "4", "--p", "1.5"],
        &["constants", "--n", "6", "--p", "2"],
        &["constants", "--n", "6", "--name", "C3"],
        &["constants", "--n", "6", "--p", "4", "--branch", "intermediate"],
    ];
    for args in rejections {
        let code = binary_exit(args);
        ensure(code == 2, || format!("{args:?} exited {code}"))?;
    }
    ensure(binary_exit(&["constants", "--n", "4", "--p", "3", "--branch", "intermediate"]) == 0, || "valid input rejected".into())?;
    Ok(format!("worst relative error {worst:.1e}; 4 domain violations exit 2"))
}

/// Divergence and second Bianchi identities on constant-scalar metrics,
/// and the Kato inequality on the perturbed-flat control.
fn divergence_and_kato() -> Outcome {
    let cfg = FdConfig::default();
    let (mut div, mut bianchi, mut metrics) = (0.0_f64, 0.0_f64, 0);
    for label in zoo::catalog() {
        let e = zoo::from_label(label).unwrap();
        if !e.flags().constant_scalar {
            continue;
        }
        metrics += 1;
        for x in halton_points(&e.chart, 4) {
            let d = engine::weyl_divergence_check(&e.chart, &x, &cfg).map_err(|e| e.to_string())?;
            let b = engine::second_bianchi_check(&e.chart, &x, &cfg).map_err(|e| e.to_string())?;
            ensure(d < 1e-6 && b < 1e-6, || format!("{label}: divergence {d:e}, bianchi {b:e}"))?;
            div = div.max(d);
            bianchi = bianchi.max(b);
        }
    }
    let control = zoo::from_label("perturbed-flat:n=4:amp=0.1:seed=42").unwrap();
    let k = engine::kato_check(&control.chart, &halton_points(&control.chart, 16), &cfg).map_err(|e| e.to_string())?;
    let margin = k.min_margin.ok_or("Kato check vacuous on every sample")?;
    ensure(margin >= -1e-6, || format!("Kato min margin {margin:e}"))?;
    Ok(format!(
        "{metrics} metrics: divergence {div:.1e}, second Bianchi {bianchi:.1e}; Kato min margin {margin:.3e} ({} vacuous of {})",
        k.vacuous, k.samples
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("sharpness ratio", sharpness_ratio),
        ("weyl-ricci boundary equals C1", weyl_ricci_boundary),
        ("pointwise equality on products", pointwise_equality),
        ("gauss-bonnet on S4", gauss_bonnet),
        ("gursky equality on S4", gursky_equality),
        ("bach vanishing", bach_vanishing),
        ("identity suites", identity_suites),
        ("inequality campaigns", inequality_campaigns),
        ("constants", constants_vs_oracle),
        ("divergence identities and kato", divergence_and_kato),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {reason}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
