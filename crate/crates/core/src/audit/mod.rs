//! Pinching-hypothesis audits on zoo metrics.
//!
//! Audits evaluate hypotheses only. The rigidity conclusions that follow
//! from a satisfied hypothesis are echoed as text in the report.

pub mod quadrature;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

use crate::constants::{self, ConstantError};
use crate::engine::{self, EngineError, FdConfig};
use crate::sampling::halton;
use crate::tensor::TensorError;
use crate::zoo::{ExactData, YamabeDatum, YamabeProvenance, ZooEntry};

pub use quadrature::{ChartChoice, GridSpec, PointValues, Quadrature};

/// `|margin| ≤ BOUNDARY_TOL · |threshold|` is reported as boundary.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Max-entry tolerance for the numerical Bach-flatness flag.
pub const BACH_TOL: f64 = 1e-4;
/// Points used for the Bach-flatness flag.
pub const BACH_POINTS: usize = 4;
/// Allowed relative error of the quadrature volume against the exact one.
pub const VOLUME_TOL: f64 = 1e-3;
/// Default number of Halton points for pointwise audits.
pub const POINTWISE_POINTS: usize = 200;

#[derive(Debug, Error)]
pub enum AuditError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Constant(#[from] ConstantError),
    #[error("{audit} requires {requirement}, got n = {n}")]
    Dimension { audit: &'static str, n: usize, requirement: &'static str },
    #[error("{audit} requires a metric certified to have constant scalar curvature ({label} is not)")]
    NotConstantScalar { audit: &'static str, label: String },
    #[error("{audit} requires positive scalar curvature, got {scalar}")]
    NonPositiveScalar { audit: &'static str, scalar: f64 },
    #[error("no certified Yamabe constant for {0}; supply one explicitly")]
    NoYamabe(String),
    #[error("no closed-form data for {0}; use quadrature")]
    NoExactData(String),
    #[error("no Euler characteristic recorded for {0}")]
    NoEuler(String),
    #[error("invalid grid: {0}")]
    BadGrid(String),
    #[error("quadrature volume {computed} differs from exact volume {exact} by {rel:e} (relative)")]
    GridTooCoarse { computed: f64, exact: f64, rel: f64 },
    #[error("{audit} does not support {evaluation} evaluation")]
    Evaluation { audit: &'static str, evaluation: &'static str },
    #[error("exponent p must be finite and at least 1, got {0}")]
    BadExponent(f64),
    #[error("unknown audit id '{0}'")]
    UnknownAudit(String),
}

pub type Result<T> = std::result::Result<T, AuditError>;

/// Which hypothesis to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Audit {
    /// `(∫|R̊m|^p)^{1/p} < ε(n,p) Y^{n/2p} R^{1−n/2p}`.
    Rm0Lp { p: f64 },
    /// `(∫|W + √n/(2√2(n−2)) R̊ic∧g|^{n/2})^{2/n} < C₁(n) Y`.
    WeylRicci,
    /// `∫|W|² + 5/4 ∫|R̊ic|² ≤ 1/48 ∫R²` in dimension four.
    L2Dim4,
    /// `|W|² + n/(2(n−2))|R̊ic|² ≤ R²/(2(n−2)(n−1))` at every point.
    Pointwise,
    /// The pointwise condition restricted to `n ∈ {4, 5}`.
    PointwiseLowDim,
    /// `∫|W|² − 2∫|R̊ic|² + 1/6 ∫R² = 32π²χ` in dimension four.
    GaussBonnet,
    /// `∫R² − 12∫|R̊ic|² ≤ Y²` in dimension four.
    Gursky,
}

impl Audit {
    pub const IDS: [&'static str; 7] =
        ["rm0-lp", "weyl-ricci", "l2-dim4", "pointwise", "pointwise-low-dim", "gauss-bonnet", "gursky"];

    pub fn id(&self) -> &'static str {
        match self {
            Audit::Rm0Lp { .. } => "rm0-lp",
            Audit::WeylRicci => "weyl-ricci",
            Audit::L2Dim4 => "l2-dim4",
            Audit::Pointwise => "pointwise",
            Audit::PointwiseLowDim => "pointwise-low-dim",
            Audit::GaussBonnet => "gauss-bonnet",
            Audit::Gursky => "gursky",
        }
    }

    /// `rm0-lp` takes `p`, defaulting to `n/2`.
    pub fn parse(id: &str, p: Option<f64>, n: usize) -> Result<Self> {
        Ok(match id {
            "rm0-lp" => Audit::Rm0Lp { p: p.unwrap_or(n as f64 / 2.0) },
            "weyl-ricci" => Audit::WeylRicci,
            "l2-dim4" => Audit::L2Dim4,
            "pointwise" => Audit::Pointwise,
            "pointwise-low-dim" => Audit::PointwiseLowDim,
            "gauss-bonnet" => Audit::GaussBonnet,
            "gursky" => Audit::Gursky,
            other => return Err(AuditError::UnknownAudit(other.to_string())),
        })
    }

    pub fn p(&self) -> Option<f64> {
        match self {
            Audit::Rm0Lp { p } => Some(*p),
            _ => None,
        }
    }

    /// Whether equality still satisfies the hypothesis.
    pub fn non_strict(&self) -> bool {
        !matches!(self, Audit::Rm0Lp { .. } | Audit::WeylRicci)
    }

    /// The conclusion that a satisfied hypothesis would give for a compact
    /// Bach-flat metric with positive constant scalar curvature.
    pub fn conclusion(&self) -> &'static str {
        match self {
            Audit::Rm0Lp { .. } => "isometric to a quotient of the round sphere",
            Audit::WeylRicci => {
                "Einstein; a quotient of the round sphere for n in {4, 5}, or for n >= 6 under the weakened threshold 2Y/(n C2)"
            }
            Audit::L2Dim4 => "isometric to a quotient of the round 4-sphere",
            Audit::Pointwise => "Einstein, or a quotient of S^1 x S^(n-1) with the product metric",
            Audit::PointwiseLowDim => {
                "a quotient of the round sphere, or of S^1 x S^(n-1) with the product metric"
            }
            Audit::GaussBonnet => "identity check (no conclusion)",
            Audit::Gursky => "equality only for conformally Einstein metrics",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Satisfied,
    Boundary,
    NotSatisfied,
}

impl Verdict {
    pub fn classify(margin: f64, scale: f64, tol: f64) -> Verdict {
        if margin.abs() <= tol * scale.abs() {
            Verdict::Boundary
        } else if margin > 0.0 {
            Verdict::Satisfied
        } else {
            Verdict::NotSatisfied
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Satisfied => "hypothesis-satisfied",
            Verdict::Boundary => "boundary",
            Verdict::NotSatisfied => "not-satisfied",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How integrals and pointwise maxima are obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum Evaluation {
    /// Constant integrands from the entry's closed-form data.
    ClosedForm,
    /// Tensor-product quadrature.
    Quadrature(GridSpec),
    /// Halton points on the primary chart (pointwise audits).
    Sampled(usize),
}

impl Evaluation {
    pub fn name(&self) -> &'static str {
        match self {
            Evaluation::ClosedForm => "closed-form",
            Evaluation::Quadrature(_) => "quadrature",
            Evaluation::Sampled(_) => "sampled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub boundary: f64,
    pub bach: f64,
    pub volume: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { boundary: BOUNDARY_TOL, bach: BACH_TOL, volume: VOLUME_TOL }
    }
}

#[derive(Debug, Clone)]
pub struct AuditOptions {
    /// `None` picks closed form when available, else quadrature with the
    /// default grid; pointwise audits default to sampling.
    pub evaluation: Option<Evaluation>,
    pub fd: FdConfig,
    pub yamabe: Option<f64>,
    pub check_bach: bool,
    pub tol: Tolerances,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self { evaluation: None, fd: FdConfig::default(), yamabe: None, check_bach: true, tol: Tolerances::default() }
    }
}

impl AuditOptions {
    pub fn closed_form() -> Self {
        Self { evaluation: Some(Evaluation::ClosedForm), ..Self::default() }
    }

    pub fn quadrature(grid: GridSpec) -> Self {
        Self { evaluation: Some(Evaluation::Quadrature(grid)), ..Self::default() }
    }

    pub fn sampled(points: usize) -> Self {
        Self { evaluation: Some(Evaluation::Sampled(points)), ..Self::default() }
    }

    pub fn without_bach(mut self) -> Self {
        self.check_bach = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BachFlag {
    pub flat: bool,
    pub max_entry: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisFlags {
    /// `None` when the check was skipped.
    pub bach: Option<BachFlag>,
    pub constant_r: bool,
    pub r_positive: bool,
}

/// What was integrated or sampled.
#[derive(Debug, Clone, PartialEq)]
pub enum EvaluationSummary {
    ClosedForm { volume: f64 },
    Quadrature { chart: String, nodes: Vec<usize>, points: usize, volume: f64, exact_volume: Option<f64>, volume_rel_error: Option<f64> },
    Sampled { points: usize, max_abs_residual: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PinchingReport {
    pub audit: Audit,
    pub metric_label: String,
    pub n: usize,
    pub lhs: f64,
    pub threshold: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub flags: HypothesisFlags,
    pub yamabe: Option<YamabeDatum>,
    pub evaluation: EvaluationSummary,
    pub tol: Tolerances,
    pub runtime_ms: u128,
    /// Secondary values: alternative thresholds, equivalent forms, constants.
    pub auxiliary: Vec<(String, f64)>,
}

impl PinchingReport {
    /// True for a satisfied hypothesis, and for boundary when equality is
    /// allowed.
    pub fn hypothesis_holds(&self) -> bool {
        match self.verdict {
            Verdict::Satisfied => true,
            Verdict::Boundary => self.audit.non_strict(),
            Verdict::NotSatisfied => false,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.lhs / self.threshold
    }

    pub fn auxiliary(&self, key: &str) -> Option<f64> {
        self.auxiliary.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

/// Which pointwise quantity an `L^p` norm integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    Rm0,
    Ric0,
    Weyl,
    /// `W + √n/(2√2(n−2)) R̊ic ∧ g`.
    WeylPlusKn,
    /// The density `R²`.
    ScalarSquared,
}

impl Selector {
    pub fn value(&self, v: &PointValues) -> f64 {
        match self {
            Selector::Rm0 => v.rm0_sq.max(0.0).sqrt(),
            Selector::Ric0 => v.ricci0_sq.max(0.0).sqrt(),
            Selector::Weyl => v.weyl_sq.max(0.0).sqrt(),
            Selector::WeylPlusKn => v.combo_sq.max(0.0).sqrt(),
            Selector::ScalarSquared => v.scalar * v.scalar,
        }
    }
}

impl FromStr for Selector {
    type Err = AuditError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "rm0" => Selector::Rm0,
            "ric0" => Selector::Ric0,
            "weyl" => Selector::Weyl,
            "weyl-plus-kn" => Selector::WeylPlusKn,
            "r-squared" => Selector::ScalarSquared,
            other => return Err(AuditError::UnknownAudit(other.to_string())),
        })
    }
}

/// Pointwise values of a curvature-homogeneous metric from its closed form.
pub fn exact_point_values(exact: &ExactData, n: usize) -> PointValues {
    let nf = n as f64;
    PointValues {
        scalar: exact.scalar,
        ricci0_sq: exact.ricci0_sq,
        weyl_sq: exact.weyl_sq,
        rm0_sq: exact.rm0_sq,
        combo_sq: exact.weyl_sq + nf / (2.0 * (nf - 2.0)) * exact.ricci0_sq,
    }
}

/// Integration backend shared by the integral audits.
enum Integrator {
    Closed { values: PointValues, volume: f64 },
    Grid(Quadrature, Option<f64>),
}

impl Integrator {
    fn integrate(&self, f: impl Fn(&PointValues) -> f64) -> f64 {
        match self {
            Integrator::Closed { values, volume } => f(values) * volume,
            Integrator::Grid(q, _) => q.integrate(f),
        }
    }

    fn summary(&self) -> EvaluationSummary {
        match self {
            Integrator::Closed { volume, .. } => EvaluationSummary::ClosedForm { volume: *volume },
            Integrator::Grid(q, exact) => EvaluationSummary::Quadrature {
                chart: q.chart_label.clone(),
                nodes: q.nodes.clone(),
                points: q.points(),
                volume: q.volume(),
                exact_volume: *exact,
                volume_rel_error: exact.map(|e| (q.volume() - e).abs() / e),
            },
        }
    }
}

fn integrator(entry: &ZooEntry, audit: &'static str, opts: &AuditOptions) -> Result<Integrator> {
    let eval = match &opts.evaluation {
        Some(e) => e.clone(),
        None if entry.exact.is_some() => Evaluation::ClosedForm,
        None => Evaluation::Quadrature(GridSpec::default_for_entry(entry)),
    };
    match eval {
        Evaluation::ClosedForm => {
            let exact = entry.exact.as_ref().ok_or_else(|| AuditError::NoExactData(entry.label.clone()))?;
            Ok(Integrator::Closed { values: exact_point_values(exact, entry.dim()), volume: exact.volume })
        }
        Evaluation::Quadrature(grid) => {
            let q = quadrature::quadrature(entry, &grid, &opts.fd)?;
            let exact = entry.exact.map(|e| e.volume);
            if let Some(e) = exact {
                let rel = (q.volume() - e).abs() / e;
                if !(rel <= opts.tol.volume) {
                    return Err(AuditError::GridTooCoarse { computed: q.volume(), exact: e, rel });
                }
            }
            Ok(Integrator::Grid(q, exact))
        }
        Evaluation::Sampled(_) => Err(AuditError::Evaluation { audit, evaluation: "sampled" }),
    }
}

/// `(∫|q|^p dV)^{1/p}`.
pub fn lp_norm(entry: &ZooEntry, selector: Selector, p: f64, opts: &AuditOptions) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(AuditError::BadExponent(p));
    }
    let integ = integrator(entry, "lp-norm", opts)?;
    Ok(integ.integrate(|v| selector.value(v).abs().powf(p)).powf(1.0 / p))
}

/// Yamabe constant: a user-supplied value wins, otherwise the entry's
/// certified value. Uncertified metrics are refused.
pub fn yamabe_value(entry: &ZooEntry, user: Option<f64>) -> Result<YamabeDatum> {
    if let Some(v) = user {
        return Ok(YamabeDatum { value: v, provenance: YamabeProvenance::UserSupplied });
    }
    entry.exact.and_then(|e| e.yamabe).ok_or_else(|| AuditError::NoYamabe(entry.label.clone()))
}

/// Scalar curvature of a metric certified to have it constant: from the
/// closed form, otherwise evaluated at one interior point.
fn constant_scalar(entry: &ZooEntry, audit: &'static str, opts: &AuditOptions) -> Result<f64> {
    if !entry.flags().constant_scalar {
        return Err(AuditError::NotConstantScalar { audit, label: entry.label.clone() });
    }
    match entry.exact {
        Some(e) => Ok(e.scalar),
        None => {
            let x = entry.chart.sample_point(&halton(0, entry.dim()));
            Ok(quadrature::point_values(&entry.chart, &x, &opts.fd)?.scalar)
        }
    }
}

fn positive_scalar(entry: &ZooEntry, audit: &'static str, opts: &AuditOptions) -> Result<f64> {
    let r = constant_scalar(entry, audit, opts)?;
    if !(r > 0.0) {
        return Err(AuditError::NonPositiveScalar { audit, scalar: r });
    }
    Ok(r)
}

fn bach_flag(entry: &ZooEntry, opts: &AuditOptions) -> Result<Option<BachFlag>> {
    if !opts.check_bach {
        return Ok(None);
    }
    let mut max_entry = 0.0_f64;
    for i in 0..BACH_POINTS {
        let x = entry.chart.sample_point(&halton(i, entry.dim()));
        max_entry = max_entry.max(engine::bach(&entry.chart, &x, &opts.fd)?.max_abs_entry());
    }
    Ok(Some(BachFlag { flat: max_entry < opts.tol.bach, max_entry, points: BACH_POINTS }))
}

struct Draft {
    lhs: f64,
    threshold: f64,
    scale: f64,
    yamabe: Option<YamabeDatum>,
    evaluation: EvaluationSummary,
    auxiliary: Vec<(String, f64)>,
    scalar: f64,
}

fn finish(audit: Audit, entry: &ZooEntry, opts: &AuditOptions, start: Instant, d: Draft) -> Result<PinchingReport> {
    let bach = bach_flag(entry, opts)?;
    let margin = d.threshold - d.lhs;
    Ok(PinchingReport {
        audit,
        metric_label: entry.label.clone(),
        n: entry.dim(),
        lhs: d.lhs,
        threshold: d.threshold,
        margin,
        verdict: Verdict::classify(margin, d.scale, opts.tol.boundary),
        flags: HypothesisFlags { bach, constant_r: entry.flags().constant_scalar, r_positive: d.scalar > 0.0 },
        yamabe: d.yamabe,
        evaluation: d.evaluation,
        tol: opts.tol,
        runtime_ms: start.elapsed().as_millis(),
        auxiliary: d.auxiliary,
    })
}

fn require_dim(audit: &'static str, n: usize, ok: bool, requirement: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(AuditError::Dimension { audit, n, requirement })
    }
}

/// Runs `audit` on `entry`.
pub fn run_audit(audit: Audit, entry: &ZooEntry, opts: &AuditOptions) -> Result<PinchingReport> {
    match audit {
        Audit::Rm0Lp { p } => audit_rm0_lp(entry, p, opts),
        Audit::WeylRicci => audit_weyl_ricci(entry, opts),
        Audit::L2Dim4 => audit_l2_dim4(entry, opts),
        Audit::Pointwise => audit_pointwise(entry, opts),
        Audit::PointwiseLowDim => audit_pointwise_low_dim(entry, opts),
        Audit::GaussBonnet => gauss_bonnet_check(entry, opts),
        Audit::Gursky => gursky_check(entry, opts),
    }
}

/// `(∫|R̊m|^p)^{1/p}` against `ε(n,p) Y^{n/2p} R^{1−n/2p}`.
pub fn audit_rm0_lp(entry: &ZooEntry, p: f64, opts: &AuditOptions) -> Result<PinchingReport> {
    const ID: &str = "rm0-lp";
    let start = Instant::now();
    let n = entry.dim();
    require_dim(ID, n, n >= 4, "n >= 4")?;
    let eps = constants::epsilon_auto(n, p)?;
    let branch = constants::epsilon_branch(n, p)?;
    let r = positive_scalar(entry, ID, opts)?;
    let y = yamabe_value(entry, opts.yamabe)?;
    let integ = integrator(entry, ID, opts)?;
    let lhs = integ.integrate(|v| v.rm0_sq.max(0.0).sqrt().powf(p)).powf(1.0 / p);
    let e = n as f64 / (2.0 * p);
    let threshold = eps * y.value.powf(e) * r.powf(1.0 - e);
    let branch_index = match branch {
        constants::EpsilonBranch::Critical => 1.0,
        constants::EpsilonBranch::Intermediate => 2.0,
        constants::EpsilonBranch::Large => 3.0,
    };
    finish(
        Audit::Rm0Lp { p },
        entry,
        opts,
        start,
        Draft {
            lhs,
            threshold,
            scale: threshold,
            yamabe: Some(y),
            evaluation: integ.summary(),
            auxiliary: vec![("epsilon".into(), eps), ("epsilon_branch".into(), branch_index), ("R".into(), r)],
            scalar: r,
        },
    )
}

/// `(∫|W + c R̊ic∧g|^{n/2})^{2/n}` against `C₁(n) Y`; for `n ≥ 6` the
/// weakened threshold `2Y/(n C₂(n))` is recorded as auxiliary.
pub fn audit_weyl_ricci(entry: &ZooEntry, opts: &AuditOptions) -> Result<PinchingReport> {
    const ID: &str = "weyl-ricci";
    let start = Instant::now();
    let n = entry.dim();
    require_dim(ID, n, n >= 4, "n >= 4")?;
    let nf = n as f64;
    let c1 = constants::c1_einstein(n)?;
    let r = positive_scalar(entry, ID, opts)?;
    let y = yamabe_value(entry, opts.yamabe)?;
    let integ = integrator(entry, ID, opts)?;
    let p = nf / 2.0;
    let lhs = integ.integrate(|v| v.combo_sq.max(0.0).sqrt().powf(p)).powf(1.0 / p);
    let ric_lp = integ.integrate(|v| v.ricci0_sq.max(0.0).sqrt().powf(p)).powf(1.0 / p);
    let threshold = c1 * y.value;
    let mut auxiliary = vec![
        ("C1".into(), c1),
        ("lhs_over_Y".into(), lhs / y.value),
        ("ric0_ln2_sqrt_n_n1_over_Y".into(), ric_lp * (nf * (nf - 1.0)).sqrt() / y.value),
        ("R".into(), r),
    ];
    if n >= 6 {
        let c2 = constants::c2_sphere(n)?;
        auxiliary.push(("C2".into(), c2));
        auxiliary.push(("sphere_threshold".into(), 2.0 * y.value / (nf * c2)));
    }
    finish(
        Audit::WeylRicci,
        entry,
        opts,
        start,
        Draft { lhs, threshold, scale: threshold, yamabe: Some(y), evaluation: integ.summary(), auxiliary, scalar: r },
    )
}

struct FourIntegrals {
    weyl: f64,
    ric0: f64,
    r2: f64,
    integ: Integrator,
    scalar: f64,
}

fn four_integrals(entry: &ZooEntry, audit: &'static str, opts: &AuditOptions, need_positive: bool) -> Result<FourIntegrals> {
    require_dim(audit, entry.dim(), entry.dim() == 4, "n = 4")?;
    let scalar = if need_positive { positive_scalar(entry, audit, opts)? } else { constant_scalar(entry, audit, opts)? };
    let integ = integrator(entry, audit, opts)?;
    Ok(FourIntegrals {
        weyl: integ.integrate(|v| v.weyl_sq),
        ric0: integ.integrate(|v| v.ricci0_sq),
        r2: integ.integrate(|v| v.scalar * v.scalar),
        integ,
        scalar,
    })
}

/// `∫|W|² + 5/4∫|R̊ic|²` against `1/48 ∫R²`; the equivalent form
/// `∫|W|² + 2/39∫R² ≤ 160/13 π² χ` is recorded when `χ` is known.
pub fn audit_l2_dim4(entry: &ZooEntry, opts: &AuditOptions) -> Result<PinchingReport> {
    const ID: &str = "l2-dim4";
    let start = Instant::now();
    let f = four_integrals(entry, ID, opts, true)?;
    let lhs = f.weyl + 1.25 * f.ric0;
    let threshold = f.r2 / 48.0;
    let mut auxiliary =
        vec![("int_weyl_sq".into(), f.weyl), ("int_ric0_sq".into(), f.ric0), ("int_R_sq".into(), f.r2)];
    if let Some(chi) = entry.exact.and_then(|e| e.euler) {
        auxiliary.push(("euler_form_lhs".into(), f.weyl + 2.0 / 39.0 * f.r2));
        auxiliary.push(("euler_form_threshold".into(), 160.0 / 13.0 * PI * PI * chi as f64));
    }
    finish(
        Audit::L2Dim4,
        entry,
        opts,
        start,
        Draft { lhs, threshold, scale: threshold, yamabe: None, evaluation: f.integ.summary(), auxiliary, scalar: f.scalar },
    )
}

/// `∫|W|² − 2∫|R̊ic|² + 1/6∫R²` against `32π²χ`; boundary means the
/// identity holds to tolerance.
pub fn gauss_bonnet_check(entry: &ZooEntry, opts: &AuditOptions) -> Result<PinchingReport> {
    const ID: &str = "gauss-bonnet";
    let start = Instant::now();
    let chi = entry.exact.and_then(|e| e.euler).ok_or_else(|| AuditError::NoEuler(entry.label.clone()))?;
    let f = four_integrals(entry, ID, opts, false)?;
    let lhs = f.weyl - 2.0 * f.ric0 + f.r2 / 6.0;
    let threshold = 32.0 * PI * PI * chi as f64;
    let scale = threshold.abs().max(f.weyl + 2.0 * f.ric0 + f.r2 / 6.0);
    let auxiliary = vec![
        ("int_weyl_sq".into(), f.weyl),
        ("int_ric0_sq".into(), f.ric0),
        ("int_R_sq".into(), f.r2),
        ("euler".into(), chi as f64),
        ("residual".into(), lhs - threshold),
    ];
    finish(
        Audit::GaussBonnet,
        entry,
        opts,
        start,
        Draft { lhs, threshold, scale, yamabe: None, evaluation: f.integ.summary(), auxiliary, scalar: f.scalar },
    )
}

/// `∫R² − 12∫|R̊ic|²` against `Y²`.
pub fn gursky_check(entry: &ZooEntry, opts: &AuditOptions) -> Result<PinchingReport> {
    const ID: &str = "gursky";
    let start = Instant::now();
    let f = four_integrals(entry, ID, opts, true)?;
    let y = yamabe_value(entry, opts.yamabe)?;
    let lhs = f.r2 - 12.0 * f.ric0;
    let threshold = y.value * y.value;
    finish(
        Audit::Gursky,
        entry,
        opts,
        start,
        Draft {
            lhs,
            threshold,
            scale: threshold,
            yamabe: Some(y),
            evaluation: f.integ.summary(),
            auxiliary: vec![("int_ric0_sq".into(), f.ric0), ("int_R_sq".into(), f.r2)],
            scalar: f.scalar,
        },
    )
}

/// Largest value of `|W|² + n/(2(n−2))|R̊ic|²` over the evaluation points,
/// against `R²/(2(n−2)(n−1))`.
pub fn audit_pointwise(entry: &ZooEntry, opts: &AuditOptions) -> Result<PinchingReport> {
    pointwise(Audit::Pointwise, entry, opts)
}

/// The pointwise audit for `n ∈ {4, 5}`, recording `C₃(n)`.
pub fn audit_pointwise_low_dim(entry: &ZooEntry, opts: &AuditOptions) -> Result<PinchingReport> {
    let n = entry.dim();
    require_dim("pointwise-low-dim", n, n == 4 || n == 5, "n in {4, 5}")?;
    pointwise(Audit::PointwiseLowDim, entry, opts)
}

/// `|W|² + n/(2(n−2))|R̊ic|² − R²/(2(n−2)(n−1))`.
pub fn pointwise_residual(v: &PointValues, n: usize) -> f64 {
    let nf = n as f64;
    v.weyl_sq + nf / (2.0 * (nf - 2.0)) * v.ricci0_sq - v.scalar * v.scalar / (2.0 * (nf - 2.0) * (nf - 1.0))
}

fn pointwise(audit: Audit, entry: &ZooEntry, opts: &AuditOptions) -> Result<PinchingReport> {
    let id = audit.id();
    let start = Instant::now();
    let n = entry.dim();
    require_dim(id, n, n >= 4, "n >= 4")?;
    let r = positive_scalar(entry, id, opts)?;
    let nf = n as f64;
    let threshold = r * r / (2.0 * (nf - 2.0) * (nf - 1.0));
    let eval = opts.evaluation.clone().unwrap_or(Evaluation::Sampled(POINTWISE_POINTS));
    let (lhs, evaluation) = match eval {
        Evaluation::ClosedForm => {
            let exact = entry.exact.as_ref().ok_or_else(|| AuditError::NoExactData(entry.label.clone()))?;
            let v = exact_point_values(exact, n);
            (threshold + pointwise_residual(&v, n), EvaluationSummary::ClosedForm { volume: exact.volume })
        }
        Evaluation::Sampled(points) => {
            let mut lhs = f64::NEG_INFINITY;
            let mut max_abs = 0.0_f64;
            for i in 0..points {
                let x = entry.chart.sample_point(&halton(i, n));
                let v = quadrature::point_values(&entry.chart, &x, &opts.fd)?;
                let res = pointwise_residual(&v, n);
                max_abs = max_abs.max(res.abs());
                lhs = lhs.max(threshold + res);
            }
            (lhs, EvaluationSummary::Sampled { points, max_abs_residual: max_abs })
        }
        Evaluation::Quadrature(_) => return Err(AuditError::Evaluation { audit: id, evaluation: "quadrature" }),
    };
    let mut auxiliary = vec![("R".into(), r)];
    if audit == Audit::PointwiseLowDim {
        auxiliary.push(("C3".into(), constants::c3_weitzenbock(n)?));
    }
    finish(
        audit,
        entry,
        opts,
        start,
        Draft { lhs, threshold, scale: threshold, yamabe: None, evaluation, auxiliary, scalar: r },
    )
}
