//! Seeded randomized campaigns for the pointwise algebraic inequalities.
//!
//! Every checker returns `Ok(None)` for a degenerate (zero-denominator)
//! sample and `Ok(Some(ratio))` otherwise, where `ratio ≤ 1` is the
//! inequality. Campaigns shard trials into fixed-size blocks; block `s`
//! draws from ChaCha8 seeded with the campaign seed on stream `s`, so the
//! result does not depend on how many workers run the blocks.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::tensor::{self, idx4, AlgCurv4, Skew2, Sym2, TensorError};

/// Default violation tolerance: a sample violates when `ratio > 1 + tol`.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Relative tolerance for the trace-free preconditions.
pub const TRACE_TOL: f64 = 1e-12;
/// Trials per shard.
pub const SHARD_SIZE: u64 = 1024;
/// Name of the random generator, recorded in reports.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha 0.9), stream = shard index";

#[derive(Debug, Error, PartialEq)]
pub enum LabError {
    #[error("unknown inequality id '{0}'")]
    UnknownInequality(String),
    #[error("unknown distribution '{0}' (expected gaussian or spiked)")]
    UnknownDistribution(String),
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("{id} requires n >= {min}, got {n}")]
    Dimension { id: &'static str, n: usize, min: usize },
    #[error("input is not trace-free: |trace| = {trace:e}, norm = {norm:e}")]
    NotTraceFree { trace: f64, norm: f64 },
    #[error("the K parameter must be finite")]
    BadK,
    #[error("witness does not match inequality {0}")]
    BadWitness(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

pub type Result<T> = std::result::Result<T, LabError>;

fn norm(x: f64) -> f64 {
    x.sqrt()
}

fn check_trace_free_sym(t: &Sym2) -> Result<()> {
    let nrm = norm(t.frobenius_sq());
    let tr = t.trace();
    if tr.abs() > TRACE_TOL * nrm.max(f64::MIN_POSITIVE) && tr != 0.0 {
        return Err(LabError::NotTraceFree { trace: tr, norm: nrm });
    }
    Ok(())
}

/// Largest entry of the Ricci contraction relative to `|T|`.
fn check_trace_free_curv(t: &AlgCurv4, total: bool) -> Result<()> {
    let n = t.dim();
    let nrm = norm(t.frobenius_sq());
    if total {
        let ric = t.ricci_contraction(&Sym2::identity(n))?;
        let r = norm(ric.frobenius_sq());
        if r > 1e-10 * nrm {
            return Err(LabError::NotTraceFree { trace: r, norm: nrm });
        }
    } else {
        let mut scalar = 0.0;
        for i in 0..n {
            for j in 0..n {
                scalar += t.get(i, j, i, j);
            }
        }
        if scalar.abs() > 1e-10 * nrm {
            return Err(LabError::NotTraceFree { trace: scalar, norm: nrm });
        }
    }
    Ok(())
}

fn ratio(lhs: f64, bound: f64) -> Option<f64> {
    if bound > 0.0 && bound.is_finite() && lhs.is_finite() {
        Some(lhs / bound)
    } else {
        None
    }
}

/// `tr(T³) ≤ (m−2)/√(m(m−1)) |T|³` for trace-free symmetric `T`; the
/// ratio is signed.
pub fn check_cubic_trace(t: &Sym2) -> Result<Option<f64>> {
    let m = t.dim();
    if m < 3 {
        return Err(LabError::Dimension { id: "cubic-trace", n: m, min: 3 });
    }
    check_trace_free_sym(t)?;
    let mf = m as f64;
    let nrm = norm(t.frobenius_sq());
    let bound = (mf - 2.0) / (mf * (mf - 1.0)).sqrt() * nrm.powi(3);
    Ok(ratio(t.cubic_trace(), bound))
}

/// `λ_max ≤ √((m−1)/m) |T|` for trace-free symmetric `T`.
pub fn check_eigen_bound(t: &Sym2) -> Result<Option<f64>> {
    let m = t.dim();
    if m < 2 {
        return Err(LabError::Dimension { id: "eigen-bound", n: m, min: 2 });
    }
    check_trace_free_sym(t)?;
    let mf = m as f64;
    let nrm = norm(t.frobenius_sq());
    let bound = ((mf - 1.0) / mf).sqrt() * nrm;
    let lmax = *t.eigenvalues().last().expect("m >= 2");
    Ok(ratio(lmax, bound))
}

/// `W_ijkl R̊_ik R̊_jl` for the identity metric.
pub fn weyl_ricci_contraction(w: &AlgCurv4, ric0: &Sym2) -> f64 {
    let n = w.dim();
    let d = w.as_slice();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let a = ric0.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for l in 0..n {
                    s += d[idx4(n, i, j, k, l)] * a * ric0.get(j, l);
                }
            }
        }
    }
    s
}

fn check_weyl_pair(w: &AlgCurv4, ric0: &Sym2) -> Result<()> {
    if w.dim() != ric0.dim() {
        return Err(TensorError::DimensionMismatch { expected: w.dim(), found: ric0.dim() }.into());
    }
    if w.dim() < 4 {
        return Err(LabError::Dimension { id: "huisken", n: w.dim(), min: 4 });
    }
    check_trace_free_curv(w, true)?;
    check_trace_free_sym(ric0)
}

/// `|W_ijkl R̊_ik R̊_jl| ≤ √((n−2)/(2(n−1))) |W| |R̊ic|²`.
pub fn check_huisken(w: &AlgCurv4, ric0: &Sym2) -> Result<Option<f64>> {
    check_weyl_pair(w, ric0)?;
    let nf = w.dim() as f64;
    let c = ((nf - 2.0) / (2.0 * (nf - 1.0))).sqrt();
    let bound = c * norm(w.frobenius_sq()) * ric0.frobenius_sq();
    Ok(ratio(weyl_ricci_contraction(w, ric0).abs(), bound))
}

/// `|−W_ijkl R̊_ik R̊_jl + K tr(R̊ic³)|
///  ≤ √((n−2)/(2(n−1))) |R̊ic|² (|W|² + 2(n−2)K²/n |R̊ic|²)^{1/2}`.
pub fn check_weyl_ricci_cubic(w: &AlgCurv4, ric0: &Sym2, k: f64) -> Result<Option<f64>> {
    if !k.is_finite() {
        return Err(LabError::BadK);
    }
    check_weyl_pair(w, ric0)?;
    let nf = w.dim() as f64;
    let c = ((nf - 2.0) / (2.0 * (nf - 1.0))).sqrt();
    let r2 = ric0.frobenius_sq();
    let lhs = (-weyl_ricci_contraction(w, ric0) + k * ric0.cubic_trace()).abs();
    let inner = w.frobenius_sq() + 2.0 * (nf - 2.0) * k * k / nf * r2;
    Ok(ratio(lhs, c * r2 * inner.sqrt()))
}

/// The value of `K` for which the bound becomes the one used in the
/// Laplacian estimate of `|R̊ic|²`: `n/(2(n−2))`.
pub fn critical_k(n: usize) -> f64 {
    let nf = n as f64;
    nf / (2.0 * (nf - 2.0))
}

/// Row-major `n² × n²` matrix product.
fn matmul(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut c = vec![0.0; m * m];
    for i in 0..m {
        for k in 0..m {
            let aik = a[i * m + k];
            if aik == 0.0 {
                continue;
            }
            let row = &b[k * m..(k + 1) * m];
            let out = &mut c[i * m..(i + 1) * m];
            for (o, &x) in out.iter_mut().zip(row) {
                *o += aik * x;
            }
        }
    }
    c
}

fn trace_cube(a: &[f64], m: usize) -> f64 {
    let a2 = matmul(a, a, m);
    // tr(A²·A) = Σ (A²)_ij A_ji, and A is symmetric.
    a2.iter().zip(a).map(|(x, y)| x * y).sum()
}

/// The two cubic contractions bounded for trace-adjusted curvature tensors:
/// `2 R̊_ijlk R̊_ihlm R̊_hjmk + ½ R̊_ijkl R̊_ijhm R̊_hmkl` and
/// `R̊_ijkl R̊_ijkh R̊_hl`.
pub fn contraction_values(rm0: &AlgCurv4) -> (f64, f64) {
    let n = rm0.dim();
    let m = n * n;
    let d = rm0.as_slice();
    // X_{(a,b),(c,d)} = R̊_acbd, so R̊_ijlk R̊_ihlm R̊_hjmk = tr(X³).
    let mut x = vec![0.0; m * m];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for e in 0..n {
                    x[(a * n + b) * m + c * n + e] = d[idx4(n, a, c, b, e)];
                }
            }
        }
    }
    // L_{(i,j),(k,l)} = R̊_ijkl is the data itself.
    let cubic = 2.0 * trace_cube(&x, m) + 0.5 * trace_cube(d, m);

    let ric = rm0.ricci_contraction(&Sym2::identity(n)).expect("same dimension");
    let mut mixed = 0.0;
    for l in 0..n {
        for h in 0..n {
            let r = ric.get(h, l);
            let mut s = 0.0;
            for ijk in 0..n * n * n {
                s += d[ijk * n + l] * d[ijk * n + h];
            }
            mixed += s * r;
        }
    }
    (cubic, mixed)
}

/// Ratios of the two cubic contractions to their bounds
/// `(2(n²−2)/(n√(n²−1)) + (n²−n−4)/(2√((n−2)n(n²−1)))) |R̊m|³` and
/// `√((n−1)/n) |R̊ic| |R̊m|²`.
pub fn check_contraction_bounds(rm0: &AlgCurv4) -> Result<Option<(f64, f64)>> {
    let n = rm0.dim();
    if n < 3 {
        return Err(LabError::Dimension { id: "contraction-cubic", n, min: 3 });
    }
    check_trace_free_curv(rm0, false)?;
    let nf = n as f64;
    let r2 = rm0.frobenius_sq();
    let nrm = norm(r2);
    if nrm == 0.0 {
        return Ok(None);
    }
    let (cubic, mixed) = contraction_values(rm0);
    let c_cubic = 2.0 * (nf * nf - 2.0) / (nf * (nf * nf - 1.0).sqrt())
        + (nf * nf - nf - 4.0) / (2.0 * ((nf - 2.0) * nf * (nf * nf - 1.0)).sqrt());
    let first = cubic.abs() / (c_cubic * nrm * r2);
    let ric = rm0.ricci_contraction(&Sym2::identity(n))?;
    let ric_norm = norm(ric.frobenius_sq());
    let second = if ric_norm == 0.0 {
        0.0
    } else {
        mixed.abs() / (((nf - 1.0) / nf).sqrt() * ric_norm * r2)
    };
    Ok(Some((first, second)))
}

/// `|R̊ic|² ≤ (n−2)/4 |R̊m|²`.
pub fn check_ric_rm_bound(rm0: &AlgCurv4) -> Result<Option<f64>> {
    let n = rm0.dim();
    if n < 3 {
        return Err(LabError::Dimension { id: "ric-rm-norm", n, min: 3 });
    }
    check_trace_free_curv(rm0, false)?;
    let ric = rm0.ricci_contraction(&Sym2::identity(n))?;
    let bound = (n as f64 - 2.0) / 4.0 * rm0.frobenius_sq();
    Ok(ratio(ric.frobenius_sq(), bound))
}

/// The constant `K` of the Weyl–Ricci cubic bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KChoice {
    Value(f64),
    /// `n/(2(n−2))`.
    Critical,
}

impl KChoice {
    pub fn resolve(self, n: usize) -> f64 {
        match self {
            KChoice::Value(k) => k,
            KChoice::Critical => critical_k(n),
        }
    }
}

impl fmt::Display for KChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KChoice::Value(k) => write!(f, "{k}"),
            KChoice::Critical => f.write_str("critical"),
        }
    }
}

impl FromStr for KChoice {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        if s == "critical" {
            return Ok(KChoice::Critical);
        }
        match s.parse::<f64>() {
            Ok(k) if k.is_finite() => Ok(KChoice::Value(k)),
            _ => Err(LabError::BadK),
        }
    }
}

/// Which inequality a campaign samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Inequality {
    CubicTrace,
    EigenBound,
    Huisken,
    WeylRicciCubic(KChoice),
    ContractionCubic,
    ContractionRicci,
    RicRmNorm,
}

impl Inequality {
    pub const IDS: [&'static str; 7] = [
        "cubic-trace",
        "eigen-bound",
        "huisken",
        "weyl-ricci-cubic",
        "contraction-cubic",
        "contraction-ricci",
        "ric-rm-norm",
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Inequality::CubicTrace => "cubic-trace",
            Inequality::EigenBound => "eigen-bound",
            Inequality::Huisken => "huisken",
            Inequality::WeylRicciCubic(_) => "weyl-ricci-cubic",
            Inequality::ContractionCubic => "contraction-cubic",
            Inequality::ContractionRicci => "contraction-ricci",
            Inequality::RicRmNorm => "ric-rm-norm",
        }
    }

    /// Parses an id; `weyl-ricci-cubic` takes its `K` from `k`
    /// (default `critical`).
    pub fn parse(id: &str, k: Option<KChoice>) -> Result<Self> {
        Ok(match id {
            "cubic-trace" => Inequality::CubicTrace,
            "eigen-bound" => Inequality::EigenBound,
            "huisken" => Inequality::Huisken,
            "weyl-ricci-cubic" => Inequality::WeylRicciCubic(k.unwrap_or(KChoice::Critical)),
            "contraction-cubic" => Inequality::ContractionCubic,
            "contraction-ricci" => Inequality::ContractionRicci,
            "ric-rm-norm" => Inequality::RicRmNorm,
            other => return Err(LabError::UnknownInequality(other.to_string())),
        })
    }

    pub fn min_dim(&self) -> usize {
        match self {
            Inequality::CubicTrace => 3,
            Inequality::EigenBound => 2,
            Inequality::Huisken | Inequality::WeylRicciCubic(_) => 4,
            Inequality::ContractionCubic
            | Inequality::ContractionRicci
            | Inequality::RicRmNorm => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Distribution {
    Gaussian,
    /// A dominant rank-one direction with log-uniform strength in
    /// `[1, 1e4]` on top of Gaussian noise.
    Spiked,
}

impl Distribution {
    pub fn id(&self) -> &'static str {
        match self {
            Distribution::Gaussian => "gaussian",
            Distribution::Spiked => "spiked",
        }
    }
}

impl FromStr for Distribution {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Distribution::Gaussian),
            "spiked" => Ok(Distribution::Spiked),
            other => Err(LabError::UnknownDistribution(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub inequality: Inequality,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub distribution: Distribution,
    pub tol: f64,
}

impl CampaignConfig {
    pub fn new(inequality: Inequality, n: usize, trials: u64, seed: u64) -> Self {
        Self { inequality, n, trials, seed, distribution: Distribution::Gaussian, tol: DEFAULT_TOL }
    }

    pub fn with_distribution(mut self, distribution: Distribution) -> Self {
        self.distribution = distribution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(LabError::NoTrials);
        }
        let min = self.inequality.min_dim();
        if self.n < min {
            return Err(LabError::Dimension { id: self.inequality.id(), n: self.n, min });
        }
        if let Inequality::WeylRicciCubic(KChoice::Value(k)) = self.inequality {
            if !k.is_finite() {
                return Err(LabError::BadK);
            }
        }
        Ok(())
    }
}

/// A flat tensor attached to a witness.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedTensor {
    pub name: String,
    pub rank: usize,
    pub dim: usize,
    pub data: Vec<f64>,
}

/// The sample attaining the campaign's maximum ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub trial: u64,
    pub ratio: f64,
    pub tensors: Vec<NamedTensor>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleStats {
    pub config: CampaignConfig,
    pub trials: u64,
    pub violations: u64,
    pub degenerate: u64,
    /// `None` when every sample was degenerate.
    pub max_ratio: Option<f64>,
    pub witness: Option<Witness>,
    pub tol: f64,
}

/// One drawn sample, before evaluation.
#[derive(Debug, Clone)]
pub enum Sample {
    Matrix(Sym2),
    WeylRicci(AlgCurv4, Sym2),
    TraceAdjusted(AlgCurv4),
}

impl Sample {
    pub fn tensors(&self) -> Vec<NamedTensor> {
        let sym = |name: &str, t: &Sym2| NamedTensor {
            name: name.into(),
            rank: 2,
            dim: t.dim(),
            data: t.as_slice().to_vec(),
        };
        let curv = |name: &str, t: &AlgCurv4| NamedTensor {
            name: name.into(),
            rank: 4,
            dim: t.dim(),
            data: t.as_slice().to_vec(),
        };
        match self {
            Sample::Matrix(t) => vec![sym("T", t)],
            Sample::WeylRicci(w, r) => vec![curv("W", w), sym("Ric0", r)],
            Sample::TraceAdjusted(r) => vec![curv("Rm0", r)],
        }
    }
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

fn unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let s = norm(v.iter().map(|x| x * x).sum());
    v.into_iter().map(|x| x / s).collect()
}

fn random_trace_free<R: Rng + ?Sized>(n: usize, dist: Distribution, rng: &mut R) -> Sym2 {
    let noise = Sym2::random(n, rng).trace_free();
    match dist {
        Distribution::Gaussian => noise,
        Distribution::Spiked => {
            let s = log_uniform(rng, 1.0, 1e4);
            let v = unit_vector(n, rng);
            let spike = Sym2::from_fn(n, |i, j| v[i] * v[j]).trace_free();
            &(spike * s) + &noise
        }
    }
}

/// `Rm − U` and `W` of an algebraic curvature tensor for the identity
/// metric, without the validation done by [`tensor::decompose`].
fn identity_parts(rm: AlgCurv4, weyl: bool) -> AlgCurv4 {
    let n = rm.dim();
    let nf = n as f64;
    let d = rm.as_slice();
    let mut ric = vec![0.0; n * n];
    for j in 0..n {
        for l in 0..n {
            ric[j * n + l] = (0..n).map(|i| d[idx4(n, i, j, i, l)]).sum();
        }
    }
    let scalar: f64 = (0..n).map(|i| ric[i * n + i]).sum();
    for i in 0..n {
        ric[i * n + i] -= scalar / nf;
    }
    let u = scalar / (nf * (nf - 1.0));
    let v = if weyl { 1.0 / (nf - 2.0) } else { 0.0 };
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut out = rm.into_vec();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let gg = delta(i, k) * delta(j, l) - delta(i, l) * delta(j, k);
                    let kn = ric[i * n + k] * delta(j, l) - ric[i * n + l] * delta(j, k)
                        + ric[j * n + l] * delta(i, k)
                        - ric[j * n + k] * delta(i, l);
                    out[idx4(n, i, j, k, l)] -= u * gg + v * kn;
                }
            }
        }
    }
    AlgCurv4::from_vec_unchecked(n, out)
}

/// Weyl part (identity metric) of a random algebraic curvature tensor.
fn random_weyl<R: Rng + ?Sized>(n: usize, rng: &mut R) -> AlgCurv4 {
    identity_parts(AlgCurv4::random(n, rng), true)
}

/// `Rm − U` for a random algebraic curvature tensor, optionally with a
/// dominant `σ ⊗ σ` direction for a unit 2-form `σ`.
fn random_trace_adjusted<R: Rng + ?Sized>(n: usize, dist: Distribution, rng: &mut R) -> AlgCurv4 {
    let mut rm = AlgCurv4::random(n, rng);
    if dist == Distribution::Spiked {
        let s = log_uniform(rng, 1.0, 1e4);
        let sigma = Skew2::random(n, rng);
        let scale = s / sigma.dot(&sigma);
        let mut raw = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        raw[idx4(n, i, j, k, l)] = scale * sigma.get(i, j) * sigma.get(k, l);
                    }
                }
            }
        }
        rm = &rm + &AlgCurv4::project(n, &raw).expect("length matches");
    }
    identity_parts(rm, false)
}

/// Draws one sample for `inequality` in dimension `n`.
pub fn draw<R: Rng + ?Sized>(inequality: Inequality, n: usize, dist: Distribution, rng: &mut R) -> Sample {
    match inequality {
        Inequality::CubicTrace | Inequality::EigenBound => {
            Sample::Matrix(random_trace_free(n, dist, rng))
        }
        Inequality::Huisken | Inequality::WeylRicciCubic(_) => {
            let mut w = random_weyl(n, rng);
            if dist == Distribution::Spiked {
                w = w * log_uniform(rng, 1e-2, 1e2);
            }
            Sample::WeylRicci(w, random_trace_free(n, dist, rng))
        }
        Inequality::ContractionCubic | Inequality::ContractionRicci | Inequality::RicRmNorm => {
            Sample::TraceAdjusted(random_trace_adjusted(n, dist, rng))
        }
    }
}

/// Evaluates the ratio of `inequality` on `sample`.
pub fn evaluate(inequality: Inequality, sample: &Sample) -> Result<Option<f64>> {
    let mismatch = || LabError::BadWitness(inequality.id().to_string());
    match (inequality, sample) {
        (Inequality::CubicTrace, Sample::Matrix(t)) => check_cubic_trace(t),
        (Inequality::EigenBound, Sample::Matrix(t)) => check_eigen_bound(t),
        (Inequality::Huisken, Sample::WeylRicci(w, r)) => check_huisken(w, r),
        (Inequality::WeylRicciCubic(k), Sample::WeylRicci(w, r)) => {
            check_weyl_ricci_cubic(w, r, k.resolve(w.dim()))
        }
        (Inequality::ContractionCubic, Sample::TraceAdjusted(r)) => {
            Ok(check_contraction_bounds(r)?.map(|p| p.0))
        }
        (Inequality::ContractionRicci, Sample::TraceAdjusted(r)) => {
            Ok(check_contraction_bounds(r)?.map(|p| p.1))
        }
        (Inequality::RicRmNorm, Sample::TraceAdjusted(r)) => check_ric_rm_bound(r),
        _ => Err(mismatch()),
    }
}

#[derive(Debug, Clone)]
struct Partial {
    trials: u64,
    violations: u64,
    degenerate: u64,
    best: Option<(f64, u64, Sample)>,
}

impl Partial {
    fn empty() -> Self {
        Self { trials: 0, violations: 0, degenerate: 0, best: None }
    }

    /// Associative merge: counts add, the larger ratio wins, ties go to the
    /// lower trial index.
    fn merge(mut self, other: Partial) -> Partial {
        self.trials += other.trials;
        self.violations += other.violations;
        self.degenerate += other.degenerate;
        self.best = match (self.best, other.best) {
            (None, b) | (b, None) => b,
            (Some(a), Some(b)) => {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    Some(b)
                } else {
                    Some(a)
                }
            }
        };
        self
    }
}

fn run_shard(cfg: &CampaignConfig, shard: u64) -> Result<Partial> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(shard);
    let start = shard * SHARD_SIZE;
    let end = (start + SHARD_SIZE).min(cfg.trials);
    let mut part = Partial::empty();
    for trial in start..end {
        let sample = draw(cfg.inequality, cfg.n, cfg.distribution, &mut rng);
        part.trials += 1;
        match evaluate(cfg.inequality, &sample)? {
            None => part.degenerate += 1,
            Some(r) => {
                if r > 1.0 + cfg.tol {
                    part.violations += 1;
                }
                let better = match &part.best {
                    None => true,
                    Some((b, _, _)) => r > *b,
                };
                if better {
                    part.best = Some((r, trial, sample));
                }
            }
        }
    }
    Ok(part)
}

/// Runs a campaign. Shards are distributed over the available cores; the
/// result is identical for any worker count.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<SampleStats> {
    cfg.validate()?;
    let shards = cfg.trials.div_ceil(SHARD_SIZE);
    let workers = std::thread::available_parallelism()
        .map(|w| w.get() as u64)
        .unwrap_or(1)
        .clamp(1, shards);
    let total = if workers == 1 {
        let mut acc = Partial::empty();
        for s in 0..shards {
            acc = acc.merge(run_shard(cfg, s)?);
        }
        acc
    } else {
        let results: Vec<Result<Partial>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    scope.spawn(move || {
                        let mut acc = Partial::empty();
                        let mut s = w;
                        while s < shards {
                            acc = acc.merge(run_shard(cfg, s)?);
                            s += workers;
                        }
                        Ok(acc)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("campaign worker panicked")).collect()
        });
        let mut acc = Partial::empty();
        for r in results {
            acc = acc.merge(r?);
        }
        acc
    };
    let (max_ratio, witness) = match total.best {
        Some((r, trial, sample)) => {
            (Some(r), Some(Witness { trial, ratio: r, tensors: sample.tensors() }))
        }
        None => (None, None),
    };
    Ok(SampleStats {
        config: cfg.clone(),
        trials: total.trials,
        violations: total.violations,
        degenerate: total.degenerate,
        max_ratio,
        witness,
        tol: cfg.tol,
    })
}

/// Rebuilds the sample stored in a witness without re-projecting it, so the
/// replayed ratio is bit-identical.
pub fn witness_sample(inequality: Inequality, tensors: &[NamedTensor]) -> Result<Sample> {
    let bad = || LabError::BadWitness(inequality.id().to_string());
    let find = |name: &str| tensors.iter().find(|t| t.name == name).ok_or_else(bad);
    let sym = |t: &NamedTensor| -> Result<Sym2> {
        if t.rank != 2 {
            return Err(bad());
        }
        Ok(Sym2::from_rows(t.dim, t.data.clone())?)
    };
    let curv = |t: &NamedTensor| -> Result<AlgCurv4> {
        let n = t.dim;
        if t.rank != 4 || t.data.len() != n * n * n * n {
            return Err(bad());
        }
        let scale = t.data.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(1.0);
        let residual = tensor::raw_symmetry_residual(n, &t.data);
        if residual > tensor::SYMMETRY_TOL * scale {
            return Err(TensorError::SymmetryViolation(residual).into());
        }
        Ok(AlgCurv4::from_vec_unchecked(n, t.data.clone()))
    };
    match inequality {
        Inequality::CubicTrace | Inequality::EigenBound => Ok(Sample::Matrix(sym(find("T")?)?)),
        Inequality::Huisken | Inequality::WeylRicciCubic(_) => {
            Ok(Sample::WeylRicci(curv(find("W")?)?, sym(find("Ric0")?)?))
        }
        _ => Ok(Sample::TraceAdjusted(curv(find("Rm0")?)?)),
    }
}

/// Re-evaluates a witness.
pub fn replay(inequality: Inequality, witness: &Witness) -> Result<Option<f64>> {
    evaluate(inequality, &witness_sample(inequality, &witness.tensors)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn cubic_trace_equality_witness() {
        let t = Sym2::diagonal(&[2.0, -1.0, -1.0]);
        let r = check_cubic_trace(&t).unwrap().unwrap();
        assert!((r - 1.0).abs() < 1e-15, "{r}");
        let r_neg = check_cubic_trace(&(-t)).unwrap().unwrap();
        assert!((r_neg + 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigen_bound_cases() {
        for m in 2..8 {
            let mut d = vec![-1.0; m];
            d[0] = m as f64 - 1.0;
            let r = check_eigen_bound(&Sym2::diagonal(&d)).unwrap().unwrap();
            assert!((r - 1.0).abs() < 1e-14, "m={m} r={r}");
        }
        let m = 5;
        let mut d = vec![0.0; m];
        d[0] = 1.0;
        d[1] = -1.0;
        let r = check_eigen_bound(&Sym2::diagonal(&d)).unwrap().unwrap();
        let expected = (0.5_f64).sqrt() / ((m as f64 - 1.0) / m as f64).sqrt();
        assert!((r - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_inputs_are_degenerate() {
        assert_eq!(check_cubic_trace(&Sym2::zeros(4)).unwrap(), None);
        let ric = Sym2::diagonal(&[1.0, -1.0, 0.0, 0.0]);
        assert_eq!(check_huisken(&AlgCurv4::zeros(4), &ric).unwrap(), None);
        assert_eq!(check_ric_rm_bound(&AlgCurv4::zeros(5)).unwrap(), None);
        assert_eq!(check_contraction_bounds(&AlgCurv4::zeros(5)).unwrap(), None);
    }

    #[test]
    fn rejects_traceful_input() {
        let t = Sym2::diagonal(&[1.0, 1.0, 1.0]);
        assert!(matches!(check_cubic_trace(&t), Err(LabError::NotTraceFree { .. })));
        let rm = AlgCurv4::random(4, &mut rng(3));
        let ric = Sym2::diagonal(&[1.0, -1.0, 0.0, 0.0]);
        assert!(matches!(check_huisken(&rm, &ric), Err(LabError::NotTraceFree { .. })));
    }

    #[test]
    fn ric_rm_equality_on_ricci_part() {
        let mut g = rng(11);
        for n in 3..8 {
            let ric0 = Sym2::random(n, &mut g).trace_free();
            let v = tensor::kulkarni_nomizu(&ric0, &Sym2::identity(n)).unwrap() * (1.0 / (n as f64 - 2.0));
            let r = check_ric_rm_bound(&v).unwrap().unwrap();
            assert!((r - 1.0).abs() < 1e-13, "n={n} r={r}");
            if n >= 4 {
                let w = random_weyl(n, &mut g);
                assert!(check_ric_rm_bound(&w).unwrap().unwrap() < 1e-26);
            }
        }
    }

    #[test]
    fn k_zero_matches_huisken() {
        let mut g = rng(5);
        for n in 4..7 {
            let w = random_weyl(n, &mut g);
            let r = Sym2::random(n, &mut g).trace_free();
            let a = check_huisken(&w, &r).unwrap().unwrap();
            let b = check_weyl_ricci_cubic(&w, &r, 0.0).unwrap().unwrap();
            assert!((a - b).abs() < 1e-14 * a.max(1.0));
        }
    }

    #[test]
    fn critical_k_without_weyl_is_cubic_trace_bound() {
        let mut g = rng(8);
        for n in 4..8 {
            let ric0 = Sym2::random(n, &mut g).trace_free();
            let a = check_weyl_ricci_cubic(&AlgCurv4::zeros(n), &ric0, critical_k(n)).unwrap().unwrap();
            let b = check_cubic_trace(&ric0).unwrap().unwrap().abs();
            assert!((a - b).abs() < 1e-13, "n={n}: {a} vs {b}");
        }
    }

    #[test]
    fn contraction_matrices_match_index_loops() {
        let n = 4;
        let rm0 = random_trace_adjusted(n, Distribution::Gaussian, &mut rng(21));
        let r = |i, j, k, l| rm0.get(i, j, k, l);
        let mut a = 0.0;
        let mut b = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        for h in 0..n {
                            for m in 0..n {
                                a += r(i, j, l, k) * r(i, h, l, m) * r(h, j, m, k);
                                b += r(i, j, k, l) * r(i, j, h, m) * r(h, m, k, l);
                            }
                        }
                    }
                }
            }
        }
        let (cubic, _) = contraction_values(&rm0);
        let expected = 2.0 * a + 0.5 * b;
        assert!((cubic - expected).abs() < 1e-12 * expected.abs().max(1.0));
    }

    #[test]
    fn campaign_is_deterministic_and_replays() {
        let cfg = CampaignConfig::new(Inequality::Huisken, 4, 3000, 7);
        let a = run_campaign(&cfg).unwrap();
        let b = run_campaign(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.violations, 0);
        assert_eq!(a.trials, 3000);
        let w = a.witness.as_ref().unwrap();
        assert_eq!(replay(cfg.inequality, w).unwrap(), a.max_ratio);
    }

    #[test]
    fn fast_parts_match_decomposition() {
        let mut g = rng(4);
        for n in 4..7 {
            let rm = AlgCurv4::random(n, &mut g);
            let dec = tensor::decompose(&rm, &Sym2::identity(n)).unwrap();
            let w = identity_parts(rm.clone(), true);
            let r0 = identity_parts(rm, false);
            let scale = dec.rm0.max_abs_entry();
            assert!((&w - &dec.weyl).max_abs_entry() < 1e-13 * scale);
            assert!((&r0 - &dec.rm0).max_abs_entry() < 1e-13 * scale);
        }
    }

    #[test]
    fn zero_trials_rejected() {
        let cfg = CampaignConfig::new(Inequality::CubicTrace, 4, 0, 1);
        assert_eq!(run_campaign(&cfg), Err(LabError::NoTrials));
        assert!(Inequality::parse("nope", None).is_err());
    }

    #[test]
    fn merge_prefers_lower_index_on_ties() {
        let s = Sample::Matrix(Sym2::zeros(3));
        let a = Partial { trials: 1, violations: 0, degenerate: 0, best: Some((0.5, 9, s.clone())) };
        let b = Partial { trials: 1, violations: 0, degenerate: 0, best: Some((0.5, 2, s)) };
        assert_eq!(a.clone().merge(b.clone()).best.unwrap().1, 2);
        assert_eq!(b.merge(a).best.unwrap().1, 2);
    }
}
