//! Command-line front end.
//!
//! Exit codes: 0 on success (audit satisfied or boundary, campaign without
//! violations, suite passed), 1 when an audit is not satisfied, a campaign
//! finds a violation or a suite fails, 2 on usage or domain errors.
//!
//! A short summary goes to standard output. The full JSON report goes to
//! `--out PATH` (written atomically), or to standard output instead of the
//! summary with `--out -`.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::audit::{self, Audit, AuditOptions, Evaluation, GridSpec, Tolerances};
use crate::constants::{self, EpsilonBranch, NamedConstant, ScalarSign};
use crate::engine::{self, BundleOptions, FdConfig};
use crate::lab::{self, CampaignConfig, Distribution, Inequality, KChoice};
use crate::report::{self, num, opt_num};
use crate::sampling::halton;
use crate::verify::{self, Suite, SuiteOptions};
use crate::zoo;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "pinchlab", version, about = "Curvature decomposition, Bach tensor, pinching audits and inequality campaigns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Metric catalog.
    Zoo {
        #[command(subcommand)]
        action: ZooAction,
    },
    /// Full curvature bundle of a zoo metric at one point.
    Curvature(CurvatureArgs),
    /// Evaluate a pinching hypothesis on a zoo metric.
    Audit(AuditArgs),
    /// Seeded randomized campaign for a pointwise inequality.
    Sample(SampleArgs),
    /// Run an identity suite (`algebra` or `engine`).
    Verify(VerifyArgs),
    /// Print the pinching constants for a dimension and exponent.
    Constants(ConstantsArgs),
}

#[derive(Debug, Subcommand)]
enum ZooAction {
    /// List labels with their closed-form data.
    List(OutArgs),
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Report path; `-` prints the report instead of the summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FdArgs {
    #[arg(long = "fd-step", default_value_t = FdConfig::default().step)]
    fd_step: f64,
    /// Central-difference order: 2, 4 or 6.
    #[arg(long = "fd-order", default_value_t = FdConfig::default().order)]
    fd_order: u8,
    /// Richardson-extrapolate every derivative.
    #[arg(long)]
    richardson: bool,
}

impl FdArgs {
    fn config(&self) -> Result<FdConfig, String> {
        FdConfig::new(self.fd_step, self.fd_order, self.richardson).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Args)]
struct CurvatureArgs {
    #[arg(long)]
    metric: String,
    /// Chart coordinates, comma separated; defaults to the first Halton point.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    point: Option<Vec<f64>>,
    /// Skip the Bach tensor and the divergence of the trace-free curvature.
    #[arg(long = "no-bach")]
    no_bach: bool,
    /// Use finite differences even when a closed-form curvature exists.
    #[arg(long = "fd-only")]
    fd_only: bool,
    #[command(flatten)]
    fd: FdArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct AuditArgs {
    /// Audit id: rm0-lp, weyl-ricci, l2-dim4, pointwise, pointwise-low-dim,
    /// gauss-bonnet or gursky.
    #[arg(long, visible_alias = "audit")]
    theorem: String,
    #[arg(long)]
    metric: String,
    /// Exponent for rm0-lp (default n/2).
    #[arg(long)]
    p: Option<f64>,
    /// closed-form, quadrature or sampled.
    #[arg(long)]
    eval: Option<String>,
    /// Quadrature nodes: `m` or `m1,m2,...`, optionally `@primary` or
    /// `@integration`. Implies quadrature.
    #[arg(long)]
    grid: Option<String>,
    /// Halton points for pointwise audits. Implies sampling.
    #[arg(long)]
    points: Option<usize>,
    /// Yamabe constant, overriding the certified value.
    #[arg(long)]
    yamabe: Option<f64>,
    /// Skip the numerical Bach-flatness flag.
    #[arg(long = "no-bach")]
    no_bach: bool,
    #[arg(long = "tol.boundary", default_value_t = audit::BOUNDARY_TOL)]
    tol_boundary: f64,
    #[arg(long = "tol.bach", default_value_t = audit::BACH_TOL)]
    tol_bach: f64,
    #[arg(long = "tol.volume", default_value_t = audit::VOLUME_TOL)]
    tol_volume: f64,
    #[command(flatten)]
    fd: FdArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// cubic-trace, eigen-bound, huisken, weyl-ricci-cubic,
    /// contraction-cubic, contraction-ricci or ric-rm-norm.
    #[arg(long)]
    inequality: String,
    /// Dimension (matrix size for the matrix inequalities).
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Constant K for weyl-ricci-cubic: a number or `critical`.
    #[arg(long)]
    k: Option<String>,
    /// gaussian or spiked.
    #[arg(long, default_value = "gaussian")]
    distribution: String,
    #[arg(long = "tol.violation", default_value_t = lab::DEFAULT_TOL)]
    tol_violation: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Suite id: algebra or engine.
    suite: String,
    /// Dimensions for the algebra suite (repeatable; default 4..=8).
    #[arg(long)]
    n: Vec<usize>,
    /// Random tensors per dimension.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample points per zoo metric in the engine suite.
    #[arg(long, default_value_t = 2)]
    points: usize,
    #[command(flatten)]
    fd: FdArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct ConstantsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: Option<f64>,
    /// Sign of the scalar curvature: nonneg or neg.
    #[arg(long, default_value = "nonneg")]
    sign: String,
    /// Force an epsilon branch: critical, intermediate or large.
    #[arg(long)]
    branch: Option<String>,
    /// Print one constant (C, A, E, C1, C2, C3, epsilon); fails if it is
    /// undefined for the inputs.
    #[arg(long)]
    name: Option<String>,
    #[command(flatten)]
    out: OutArgs,
}

/// A run outcome: the report, its summary and the exit code.
struct Outcome {
    report: Value,
    summary: String,
    code: i32,
}

type CmdResult = Result<Outcome, String>;

/// Parses `args` (including the program name) and runs the command.
pub fn run(args: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let (out, result) = match &cli.command {
        Command::Zoo { action: ZooAction::List(o) } => (o, cmd_zoo_list()),
        Command::Curvature(a) => (&a.out, cmd_curvature(a)),
        Command::Audit(a) => (&a.out, cmd_audit(a)),
        Command::Sample(a) => (&a.out, cmd_sample(a)),
        Command::Verify(a) => (&a.out, cmd_verify(a)),
        Command::Constants(a) => (&a.out, cmd_constants(a)),
    };
    match result {
        Ok(o) => emit(out, o),
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

fn emit(out: &OutArgs, o: Outcome) -> i32 {
    let text = report::to_text(&o.report);
    match out.out.as_deref() {
        Some(p) if p.as_os_str() == "-" => print!("{text}"),
        Some(p) => {
            print!("{}", o.summary);
            if let Err(e) = report::write_atomic(p, &text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return EXIT_USAGE;
            }
        }
        None => print!("{}", o.summary),
    }
    o.code
}

fn err<E: ToString>(e: E) -> String {
    e.to_string()
}

fn cmd_zoo_list() -> CmdResult {
    let entries = zoo::catalog().into_iter().map(zoo::from_label).collect::<Result<Vec<_>, _>>().map_err(err)?;
    let mut summary = String::new();
    for e in &entries {
        match &e.exact {
            Some(x) => summary.push_str(&format!(
                "{:<40} n={} R={:.6} |Ric0|^2={:.6} |W|^2={:.6} vol={:.6}\n",
                e.label,
                e.dim(),
                x.scalar,
                x.ricci0_sq,
                x.weyl_sq,
                x.volume
            )),
            None => summary.push_str(&format!("{:<40} n={} (no closed-form data)\n", e.label, e.dim())),
        }
    }
    let report = report::zoo_report(&entries, &json!({ "command": "zoo list" }));
    Ok(Outcome { report, summary, code: EXIT_OK })
}

fn cmd_curvature(a: &CurvatureArgs) -> CmdResult {
    let fd = a.fd.config()?;
    let entry = zoo::from_label(&a.metric).map_err(err)?;
    let chart = &entry.chart;
    let x = match &a.point {
        Some(p) => p.clone(),
        None => chart.sample_point(&halton(0, chart.dim())),
    };
    chart.check_point(&x).map_err(err)?;
    let opts = BundleOptions { with_bach: !a.no_bach, with_div: !a.no_bach, prefer_exact: !a.fd_only };
    let b = engine::bundle(chart, &x, &fd, opts).map_err(err)?;
    let closed = !a.fd_only && chart.has_exact_riemann();
    let input = json!({
        "command": "curvature",
        "metric": a.metric,
        "point": report::nums(&x),
        "no_bach": a.no_bach,
        "fd_only": a.fd_only,
        "fd": report::fd_json(&fd),
    });
    let mut summary = format!(
        "curvature of {} at {:?}\n  R = {:.12e}\n  |W|^2 = {:.6e}  |Ric0|^2 = {:.6e}\n",
        a.metric,
        x,
        b.scalar,
        b.weyl.norm_sq(&b.g).map_err(err)?,
        b.ricci0.norm_sq(&b.g).map_err(err)?
    );
    if let Some(bach) = &b.bach {
        summary.push_str(&format!("  max |Bach| = {:.6e}\n", bach.max_abs_entry()));
    }
    let report = report::curvature_report(&a.metric, &b, &fd, closed, &input);
    Ok(Outcome { report, summary, code: EXIT_OK })
}

fn audit_options(a: &AuditArgs) -> Result<AuditOptions, String> {
    let evaluation = match (a.eval.as_deref(), &a.grid, a.points) {
        (_, Some(_), Some(_)) => return Err("--grid and --points are mutually exclusive".into()),
        (None | Some("quadrature"), Some(g), None) => Some(Evaluation::Quadrature(g.parse::<GridSpec>().map_err(err)?)),
        (None | Some("sampled"), None, Some(k)) => Some(Evaluation::Sampled(k)),
        (Some(e), Some(_), None) | (Some(e), None, Some(_)) => {
            return Err(format!("--eval {e} conflicts with --grid/--points"));
        }
        (Some("closed-form"), None, None) => Some(Evaluation::ClosedForm),
        (Some("sampled"), None, None) => Some(Evaluation::Sampled(audit::POINTWISE_POINTS)),
        (Some("quadrature"), None, None) => None,
        (Some(other), None, None) => return Err(format!("unknown evaluation '{other}' (expected closed-form, quadrature or sampled)")),
        (None, None, None) => None,
    };
    Ok(AuditOptions {
        evaluation,
        fd: a.fd.config()?,
        yamabe: a.yamabe,
        check_bach: !a.no_bach,
        tol: Tolerances { boundary: a.tol_boundary, bach: a.tol_bach, volume: a.tol_volume },
    })
}

fn cmd_audit(a: &AuditArgs) -> CmdResult {
    let entry = zoo::from_label(&a.metric).map_err(err)?;
    let n = entry.dim();
    let which = Audit::parse(&a.theorem, a.p, n).map_err(err)?;
    if a.p.is_some() && which.p().is_none() {
        return Err(format!("--p applies only to rm0-lp, not {}", which.id()));
    }
    let mut opts = audit_options(a)?;
    if a.eval.as_deref() == Some("quadrature") && opts.evaluation.is_none() {
        opts.evaluation = Some(Evaluation::Quadrature(GridSpec::default_for_entry(&entry)));
    }
    let r = audit::run_audit(which, &entry, &opts).map_err(err)?;
    let input = json!({
        "command": "audit",
        "theorem": which.id(),
        "metric": a.metric,
        "p": opt_num(a.p),
        "eval": a.eval,
        "grid": a.grid,
        "points": a.points,
        "yamabe": opt_num(a.yamabe),
        "no_bach": a.no_bach,
        "fd": report::fd_json(&opts.fd),
        "tol": { "boundary": num(a.tol_boundary), "bach": num(a.tol_bach), "volume": num(a.tol_volume) },
    });
    let bach = match &r.flags.bach {
        Some(b) => format!("{} (max entry {:.3e} at {} points)", b.flat, b.max_entry, b.points),
        None => "not checked".into(),
    };
    let summary = format!(
        "{} on {}: {}\n  lhs       = {:.12e}\n  threshold = {:.12e}\n  margin    = {:.6e}\n  bach-flat {bach}; constant R {}; R > 0 {}\n  if the hypotheses hold: {}\n",
        which.id(),
        a.metric,
        r.verdict,
        r.lhs,
        r.threshold,
        r.margin,
        r.flags.constant_r,
        r.flags.r_positive,
        which.conclusion()
    );
    let code = if r.verdict == audit::Verdict::NotSatisfied { EXIT_FAILED } else { EXIT_OK };
    let report = report::audit_report(&r, &input);
    Ok(Outcome { report, summary, code })
}

fn cmd_sample(a: &SampleArgs) -> CmdResult {
    let k = a.k.as_deref().map(str::parse::<KChoice>).transpose().map_err(err)?;
    let inequality = Inequality::parse(&a.inequality, k).map_err(err)?;
    if k.is_some() && !matches!(inequality, Inequality::WeylRicciCubic(_)) {
        return Err(format!("--k applies only to weyl-ricci-cubic, not {}", inequality.id()));
    }
    let distribution: Distribution = a.distribution.parse().map_err(err)?;
    let mut cfg = CampaignConfig::new(inequality, a.n, a.trials, a.seed).with_distribution(distribution);
    cfg.tol = a.tol_violation;
    let start = Instant::now();
    let stats = lab::run_campaign(&cfg).map_err(err)?;
    let runtime = start.elapsed().as_millis();
    let input = json!({
        "command": "sample",
        "inequality": inequality.id(),
        "k": a.k,
        "n": a.n,
        "trials": a.trials,
        "seed": a.seed,
        "distribution": distribution.id(),
        "tol": { "violation": num(a.tol_violation) },
    });
    let summary = format!(
        "{} n={} trials={} seed={} ({}): {} violations, {} degenerate, max ratio {}\n",
        inequality.id(),
        a.n,
        stats.trials,
        a.seed,
        distribution.id(),
        stats.violations,
        stats.degenerate,
        stats.max_ratio.map_or("n/a".into(), |r| format!("{r:.15}"))
    );
    let code = if stats.violations == 0 { EXIT_OK } else { EXIT_FAILED };
    let report = report::sample_report(&stats, runtime, &input);
    Ok(Outcome { report, summary, code })
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let suite = Suite::parse(&a.suite).map_err(err)?;
    let mut opts = SuiteOptions { trials: a.trials, seed: a.seed, points: a.points, fd: a.fd.config()?, ..SuiteOptions::default() };
    if !a.n.is_empty() {
        opts.dims = a.n.clone();
    }
    let start = Instant::now();
    let r = verify::run_suite(suite, &opts).map_err(err)?;
    let runtime = start.elapsed().as_millis();
    let input = json!({
        "command": "verify",
        "suite": suite.id(),
        "n": opts.dims,
        "trials": a.trials,
        "seed": a.seed,
        "points": a.points,
        "fd": report::fd_json(&opts.fd),
    });
    let mut summary = String::new();
    for c in &r.checks {
        summary.push_str(&format!(
            "{} {:<32} {:<40} max {:.3e} (tol {:.0e})\n",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.subject,
            c.max_residual,
            c.tol
        ));
    }
    summary.push_str(&format!("suite {}: {}\n", suite.id(), if r.passed() { "passed" } else { "FAILED" }));
    let code = if r.passed() { EXIT_OK } else { EXIT_FAILED };
    let report = report::suite_report(&r, runtime, &input);
    Ok(Outcome { report, summary, code })
}

fn named_constant(name: &str, n: usize, p: Option<f64>, sign: ScalarSign, branch: Option<EpsilonBranch>) -> Result<NamedConstant, String> {
    let value = match name {
        "C" => constants::c_cubic(n),
        "A" => constants::a_const(n, sign),
        "E" => constants::e_const(n),
        "C1" => constants::c1_einstein(n),
        "C2" => constants::c2_sphere(n),
        "C3" => constants::c3_weitzenbock(n),
        "epsilon" => {
            let p = p.ok_or("epsilon needs --p")?;
            match branch {
                Some(b) => constants::epsilon_with_branch(n, p, b),
                None => constants::epsilon_auto(n, p),
            }
        }
        other => return Err(format!("unknown constant '{other}' (expected C, A, E, C1, C2, C3 or epsilon)")),
    };
    Ok(NamedConstant { name: name.to_string(), value })
}

fn cmd_constants(a: &ConstantsArgs) -> CmdResult {
    let sign: ScalarSign = a.sign.parse()?;
    let branch = a.branch.as_deref().map(str::parse::<EpsilonBranch>).transpose()?;
    if branch.is_some() && a.p.is_none() {
        return Err("--branch needs --p".into());
    }
    if let Some(p) = a.p {
        // an exponent outside the domain of every branch is a usage error
        constants::epsilon_branch(a.n, p).map_err(err)?;
    }
    let values = match &a.name {
        Some(name) => {
            let c = named_constant(name, a.n, a.p, sign, branch)?;
            if let Err(e) = &c.value {
                return Err(e.to_string());
            }
            vec![c]
        }
        None => {
            let mut v = constants::all_constants(a.n, None, sign);
            if a.p.is_some() {
                let eps = named_constant("epsilon", a.n, a.p, sign, branch)?;
                if let Err(e) = &eps.value {
                    return Err(e.to_string());
                }
                v.push(eps);
            }
            v
        }
    };
    let mut summary = String::new();
    for c in &values {
        match &c.value {
            Ok(v) => summary.push_str(&format!("{:<8} = {:.17e}\n", c.name, v)),
            Err(e) => summary.push_str(&format!("{:<8}   not applicable: {e}\n", c.name)),
        }
    }
    let input = json!({
        "command": "constants",
        "n": a.n,
        "p": opt_num(a.p),
        "sign": sign.to_string(),
        "branch": branch.map(|b| b.to_string()),
        "name": a.name,
    });
    let report = report::constants_report(a.n, a.p, &sign.to_string(), &values, &input);
    Ok(Outcome { report, summary, code: EXIT_OK })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        std::iter::once("pinchlab").chain(s.split_whitespace()).map(String::from).collect()
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(&args("audit --theorem nope --metric round-sphere:n=4:r=1")), EXIT_USAGE);
        assert_eq!(run(&args("audit --theorem gursky --metric nowhere:n=4")), EXIT_USAGE);
        assert_eq!(run(&args("sample --inequality huisken --n 4 --bogus 1")), EXIT_USAGE);
        assert_eq!(run(&args("constants --n 6 --name C3")), EXIT_USAGE);
        assert_eq!(run(&args("constants --n 4 --p 1.5")), EXIT_USAGE);
        assert_eq!(run(&args("constants --n 6 --p 4 --branch intermediate")), EXIT_USAGE);
        assert_eq!(run(&["pinchlab".to_string(), "verify".to_string(), String::new()]), EXIT_USAGE);
    }

    #[test]
    fn constants_and_audits_exit_zero() {
        assert_eq!(run(&args("constants --n 6 --p 3")), EXIT_OK);
        assert_eq!(run(&args("audit --theorem rm0-lp --metric round-sphere:n=6:r=1 --no-bach")), EXIT_OK);
        assert_eq!(run(&args("audit --theorem weyl-ricci --metric s1xs:n=8:t=0.1:normalized --no-bach")), EXIT_OK);
    }

    #[test]
    fn not_satisfied_exits_one() {
        assert_eq!(run(&args("audit --theorem pointwise --metric s1xs:n=5:t=0.1 --no-bach --points 4")), EXIT_OK);
        assert_eq!(run(&args("audit --theorem weyl-ricci --metric s1xs:n=4:t=0.1:normalized --no-bach")), EXIT_FAILED);
    }
}
