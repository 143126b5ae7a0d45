//! Identity suites: algebraic identities on random curvature tensors, and
//! engine identities on the zoo metrics.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::{self, EngineError, FdConfig};
use crate::lab;
use crate::sampling::halton;
use crate::tensor::{self, AlgCurv4, Frame, Sym2, TensorError};
use crate::zoo::{self, ZooError};

/// Relative tolerance of the algebra suite.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Absolute tolerance for finite-difference identities.
pub const ENGINE_TOL: f64 = 1e-6;
/// Max-entry tolerance for Bach vanishing in the engine suite.
pub const BACH_VANISHING_TOL: f64 = 1e-5;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown suite '{0}' (expected one of: algebra, engine)")]
    UnknownSuite(String),
    #[error("suite id must not be empty")]
    EmptySuite,
    #[error("algebra suite needs n >= 4, got {0}")]
    Dimension(usize),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Zoo(#[from] ZooError),
}

pub type Result<T> = std::result::Result<T, VerifyError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Engine,
}

impl Suite {
    pub fn parse(id: &str) -> Result<Self> {
        match id.trim() {
            "" => Err(VerifyError::EmptySuite),
            "algebra" => Ok(Suite::Algebra),
            "engine" => Ok(Suite::Engine),
            other => Err(VerifyError::UnknownSuite(other.to_string())),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Engine => "engine",
        }
    }
}

/// One identity checked over many cases. `max_residual` is compared with
/// `tol`; what the residual measures is stated by `name`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub subject: String,
    pub cases: usize,
    pub max_residual: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Sample points per zoo entry in the engine suite.
    pub points: usize,
    pub fd: FdConfig,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { dims: (4..=8).collect(), trials: 1000, seed: 0, points: 2, fd: FdConfig::default() }
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteReport> {
    let checks = match suite {
        Suite::Algebra => {
            let mut v = Vec::new();
            for &n in &opts.dims {
                v.extend(algebra_checks(n, opts.trials, opts.seed)?);
            }
            v
        }
        Suite::Engine => engine_checks(opts)?,
    };
    Ok(SuiteReport { suite, checks })
}

fn rel(residual: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        residual.abs()
    } else {
        residual.abs() / scale
    }
}

/// `I + A Aᵀ / n` for a Gaussian `A`; condition number stays moderate.
pub fn random_metric(n: usize, rng: &mut ChaCha8Rng) -> Sym2 {
    let a = Sym2::random(n, rng);
    let a2 = a.square();
    Sym2::from_fn(n, |i, j| a2.get(i, j) / n as f64 + if i == j { 1.0 } else { 0.0 })
}

const ALGEBRA_NAMES: [&str; 16] = [
    "decomposition-reconstructs",
    "pair-symmetries",
    "first-bianchi",
    "rm0-trace-is-ric0",
    "weyl-totally-trace-free",
    "orthogonal-w-v",
    "orthogonal-w-u",
    "orthogonal-v-u",
    "rm0-norm-split",
    "ric0-rm0-norm-bound",
    "kn-square-norm",
    "kn-ricci-part-norm",
    "kn-scalar-part-norm",
    "kn-weighted-norm-sum",
    "weyl-contraction-via-kn",
    "cubic-trace-via-kn",
];

/// Every algebra identity on `trials` random tensors with random metrics,
/// as relative residuals.
pub fn algebra_checks(n: usize, trials: usize, seed: u64) -> Result<Vec<Check>> {
    if n < 4 {
        return Err(VerifyError::Dimension(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    let mut worst = [0.0_f64; 16];
    let nf = n as f64;
    for _ in 0..trials {
        let g = random_metric(n, &mut rng);
        let rm = AlgCurv4::random(n, &mut rng);
        let d = tensor::decompose(&rm, &g)?;
        let frame = Frame::new(&g)?;
        let g_inv = frame.inverse_metric();
        let mut r = [0.0_f64; 16];

        let rebuilt = &(&(&d.weyl + &d.ricci_part) + &d.scalar_part) - &rm;
        r[0] = rel(rebuilt.max_abs_entry(), rm.max_abs_entry());
        for t in [&d.weyl, &d.ricci_part, &d.scalar_part, &d.rm0] {
            r[1] = r[1].max(rel(t.symmetry_residual(), t.max_abs_entry()));
            r[2] = r[2].max(rel(t.bianchi_residual(), t.max_abs_entry()));
        }
        let tr = d.rm0.ricci_contraction(g_inv)?;
        r[3] = rel((&tr - &d.ricci0).max_abs_entry(), d.ricci0.max_abs_entry());
        let wf = frame.curv_to_frame(&d.weyl);
        r[4] = rel(wf.ricci_contraction(&Sym2::identity(n))?.max_abs_entry(), wf.max_abs_entry());

        let w2 = d.weyl.norm_sq(&g)?;
        let v2 = d.ricci_part.norm_sq(&g)?;
        let u2 = d.scalar_part.norm_sq(&g)?;
        r[5] = rel(d.weyl.inner(&d.ricci_part, &g)?, (w2 * v2).sqrt());
        r[6] = rel(d.weyl.inner(&d.scalar_part, &g)?, (w2 * u2).sqrt());
        r[7] = rel(d.ricci_part.inner(&d.scalar_part, &g)?, (v2 * u2).sqrt());

        let rm0_2 = d.rm0.norm_sq(&g)?;
        let ric0_2 = d.ricci0.norm_sq(&g)?;
        r[8] = rel(rm0_2 - w2 - 4.0 / (nf - 2.0) * ric0_2, rm0_2);
        r[9] = rel((ric0_2 - (nf - 2.0) / 4.0 * rm0_2).max(0.0), rm0_2);

        let ric = frame.sym2_to_frame(&d.ricci0);
        let parts = tensor::kn_square_decompose(&ric)?;
        let a2 = ric.frobenius_sq();
        let a4 = a2 * a2;
        let sq2 = ric.square().frobenius_sq();
        let p2 = parts.product.frobenius_sq();
        let vp2 = parts.ricci_part.frobenius_sq();
        let up2 = parts.scalar_part.frobenius_sq();
        let t2 = parts.trace_free.frobenius_sq();
        r[10] = rel(p2 - (8.0 * a4 - 8.0 * sq2), p2.max(8.0 * a4));
        r[11] = rel(vp2 - (16.0 / (nf - 2.0) * sq2 - 16.0 / (nf * (nf - 2.0)) * a4), vp2.max(a4));
        r[12] = rel(up2 - 8.0 / (nf * (nf - 1.0)) * a4, up2);
        let lhs = t2 + nf / 2.0 * vp2;
        r[13] = rel(lhs - 8.0 * (nf - 2.0) / (nf - 1.0) * a4, lhs.max(a4));

        let scale3 = wf.frobenius_sq().sqrt() * a2;
        let wrr = lab::weyl_ricci_contraction(&wf, &ric);
        r[14] = rel(wrr - 0.25 * wf.dot(&parts.product), scale3);
        let kn_rg = tensor::kulkarni_nomizu(&ric, &Sym2::identity(n))?;
        r[15] = rel(ric.cubic_trace() + 0.125 * kn_rg.dot(&parts.product), a2.powf(1.5));

        for (w, v) in worst.iter_mut().zip(r) {
            *w = w.max(v);
        }
    }
    Ok(ALGEBRA_NAMES
        .iter()
        .zip(worst)
        .map(|(name, max_residual)| Check {
            name,
            subject: format!("random:n={n}"),
            cases: trials,
            max_residual,
            tol: ALGEBRA_TOL,
        })
        .collect())
}

fn sample_points(chart: &engine::MetricChart, count: usize) -> Vec<Vec<f64>> {
    (0..count).map(|i| chart.sample_point(&halton(i, chart.dim()))).collect()
}

/// Bach vanishing on Bach-flat zoo entries, the divergence and second
/// Bianchi identities on constant-scalar entries, closed-form versus
/// finite-difference curvature, and the Kato inequality on the
/// perturbed-flat control.
pub fn engine_checks(opts: &SuiteOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for label in zoo::catalog() {
        let entry = zoo::from_label(label)?;
        let chart = &entry.chart;
        let flags = chart.flags();
        let points = sample_points(chart, opts.points);
        let mut push = |name, max_residual: f64, tol| {
            checks.push(Check { name, subject: label.to_string(), cases: points.len(), max_residual, tol })
        };

        if chart.has_exact_riemann() {
            let mut worst = 0.0_f64;
            for x in &points {
                let exact = chart.exact_riemann_at(x).expect("closed form present")?;
                let fd = engine::riemann(chart, x, &opts.fd)?;
                worst = worst.max(rel((&fd - &exact).max_abs_entry(), exact.max_abs_entry().max(1.0)));
            }
            push("fd-riemann-matches-closed-form", worst, ENGINE_TOL);
        }
        if flags.einstein || flags.conformally_flat {
            let mut worst = 0.0_f64;
            for x in &points {
                worst = worst.max(engine::bach(chart, x, &opts.fd)?.max_abs_entry());
            }
            push("bach-vanishes", worst, BACH_VANISHING_TOL);
        }
        if flags.constant_scalar {
            let (mut div, mut bianchi) = (0.0_f64, 0.0_f64);
            for x in &points {
                div = div.max(engine::weyl_divergence_check(chart, x, &opts.fd)?);
                bianchi = bianchi.max(engine::second_bianchi_check(chart, x, &opts.fd)?);
            }
            push("weyl-divergence-identity", div, ENGINE_TOL);
            push("second-bianchi-trace-free", bianchi, ENGINE_TOL);
        } else {
            let kato = engine::kato_check(chart, &points, &opts.fd)?;
            push("kato-inequality", kato.min_margin.map_or(0.0, |m| (-m).max(0.0)), ENGINE_TOL);
        }
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_ids_parse() {
        assert_eq!(Suite::parse("algebra").unwrap(), Suite::Algebra);
        assert!(matches!(Suite::parse(""), Err(VerifyError::EmptySuite)));
        assert!(matches!(Suite::parse("nope"), Err(VerifyError::UnknownSuite(_))));
    }

    #[test]
    fn algebra_identities_hold_on_a_few_tensors() {
        for n in [4, 6] {
            for c in algebra_checks(n, 20, 3).unwrap() {
                assert!(c.passed(), "{c:?}");
            }
        }
    }

    #[test]
    fn algebra_suite_rejects_low_dimension() {
        assert!(matches!(algebra_checks(3, 1, 0), Err(VerifyError::Dimension(3))));
    }
}
