//! Closed-form metrics with exact curvature data.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::{Axis, ChartFlags, MetricChart};
use crate::sampling::halton;
use crate::tensor::{kulkarni_nomizu, AlgCurv4, Sym2};

/// Half-width of the stereographic coordinate box. The excluded neighbourhood
/// of the pole has relative volume below 2e-5 for `n >= 4`.
pub const STEREO_HALF_WIDTH: f64 = 20.0;

/// Half-width of the affine box for the complex projective plane (excluded
/// relative volume below 1e-4).
pub const AFFINE_HALF_WIDTH: f64 = 200.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZooError {
    #[error("unknown metric label '{0}'")]
    UnknownLabel(String),
    #[error("invalid parameter in '{label}': {reason}")]
    BadParameter { label: String, reason: String },
    #[error("conformal factor is not positive at {0:?}")]
    NonPositiveFactor(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YamabeProvenance {
    RoundSphereExact,
    YamabeMetricRVol,
    UserSupplied,
}

impl fmt::Display for YamabeProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::RoundSphereExact => "round-sphere-exact",
            Self::YamabeMetricRVol => "yamabe-metric-RVol",
            Self::UserSupplied => "user-supplied",
        })
    }
}

/// A Yamabe constant together with where it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YamabeDatum {
    pub value: f64,
    pub provenance: YamabeProvenance,
}

/// Closed-form data of a curvature-homogeneous metric: every pointwise norm
/// is constant, so integrals are `value * volume`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactData {
    pub scalar: f64,
    pub ricci0_sq: f64,
    pub weyl_sq: f64,
    pub rm0_sq: f64,
    pub volume: f64,
    pub yamabe: Option<YamabeDatum>,
    pub euler: Option<i64>,
}

impl ExactData {
    /// Data of the homothetic metric `c2 * g`.
    pub fn scaled(&self, c2: f64, n: usize) -> ExactData {
        ExactData {
            scalar: self.scalar / c2,
            ricci0_sq: self.ricci0_sq / (c2 * c2),
            weyl_sq: self.weyl_sq / (c2 * c2),
            rm0_sq: self.rm0_sq / (c2 * c2),
            volume: self.volume * c2.powf(n as f64 / 2.0),
            yamabe: self.yamabe,
            euler: self.euler,
        }
    }
}

/// A metric with its primary chart, an optional chart better suited to
/// tensor-product quadrature, and closed-form data when known.
#[derive(Debug, Clone)]
pub struct ZooEntry {
    pub label: String,
    pub chart: MetricChart,
    pub integration_chart: Option<MetricChart>,
    /// Node counts per axis of the integration chart that resolve the
    /// volume to better than 1e-4.
    pub quadrature_nodes: Option<Vec<usize>>,
    pub exact: Option<ExactData>,
}

impl ZooEntry {
    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn flags(&self) -> ChartFlags {
        self.chart.flags()
    }

    /// Chart used for integration: the dedicated one when present.
    pub fn quadrature_chart(&self) -> &MetricChart {
        self.integration_chart.as_ref().unwrap_or(&self.chart)
    }
}

/// Volume of the unit sphere `S^n`.
pub fn unit_sphere_volume(n: usize) -> f64 {
    let mut v = if n % 2 == 0 { 2.0 } else { 2.0 * PI };
    let mut k = if n % 2 == 0 { 0 } else { 1 };
    while k < n {
        k += 2;
        v *= 2.0 * PI / (k as f64 - 1.0);
    }
    v
}

/// Yamabe constant of the round sphere, `n(n-1) Vol(S^n(1))^{2/n}`.
pub fn sphere_yamabe(n: usize) -> f64 {
    let nf = n as f64;
    nf * (nf - 1.0) * unit_sphere_volume(n).powf(2.0 / nf)
}

/// Largest circle radius for which the product `S^1(t) x S^{n-1}` is
/// recorded as a Yamabe metric: the constant solution is the only one while
/// the circle length stays below `2π/√(n-2)`.
pub fn product_yamabe_cutoff(n: usize) -> f64 {
    1.0 / ((n as f64) - 2.0).sqrt()
}

/// Coordinates on the unit sphere `S^m` built from joins: `S^m = S^a * S^b`
/// with `a + b + 1 = m`, where `φ ∈ [0, π/2]` and the metric is
/// `dφ² + cos²φ g_a + sin²φ g_b`. Every axis carries a low power of a sine
/// or cosine in `√det g`, which keeps tensor-product quadrature small.
#[derive(Debug, Clone)]
enum JoinSphere {
    Circle,
    /// Polar angle and azimuth on `S^2`.
    Polar,
    Join(Box<JoinSphere>, Box<JoinSphere>),
}

impl JoinSphere {
    fn new(m: usize) -> Self {
        match m {
            0 => unreachable!("S^0 has no chart"),
            1 => JoinSphere::Circle,
            2 => JoinSphere::Polar,
            _ => {
                let a = (m - 1) / 2;
                JoinSphere::Join(Box::new(Self::new(a)), Box::new(Self::new(m - 1 - a)))
            }
        }
    }

    fn dim(&self) -> usize {
        match self {
            JoinSphere::Circle => 1,
            JoinSphere::Polar => 2,
            JoinSphere::Join(a, b) => a.dim() + b.dim() + 1,
        }
    }

    fn axes(&self, out: &mut Vec<Axis>) {
        match self {
            JoinSphere::Circle => out.push(Axis::periodic(0.0, 2.0 * PI)),
            JoinSphere::Polar => {
                out.push(Axis::interval(0.0, PI));
                out.push(Axis::periodic(0.0, 2.0 * PI));
            }
            JoinSphere::Join(a, b) => {
                out.push(Axis::interval(0.0, PI / 2.0));
                a.axes(out);
                b.axes(out);
            }
        }
    }

    /// Diagonal of `scale * g` at `x`, appended to `out`.
    fn diag(&self, x: &[f64], scale: f64, out: &mut Vec<f64>) {
        match self {
            JoinSphere::Circle => out.push(scale),
            JoinSphere::Polar => {
                out.push(scale);
                out.push(scale * x[0].sin().powi(2));
            }
            JoinSphere::Join(a, b) => {
                let phi = x[0];
                out.push(scale);
                let da = a.dim();
                a.diag(&x[1..=da], scale * phi.cos().powi(2), out);
                b.diag(&x[1 + da..], scale * phi.sin().powi(2), out);
            }
        }
    }

    /// Node counts that integrate the volume density to about 1e-5:
    /// Gauss–Legendre on `cos^a φ sin^b φ` needs roughly `a + b + 2` nodes.
    fn nodes(&self, out: &mut Vec<usize>) {
        match self {
            JoinSphere::Circle => out.push(2),
            JoinSphere::Polar => out.extend([5, 2]),
            JoinSphere::Join(a, b) => {
                out.push((a.dim() + b.dim() + 2).max(4));
                a.nodes(out);
                b.nodes(out);
            }
        }
    }
}

fn stereo_factor(y: &[f64]) -> f64 {
    let r2: f64 = y.iter().map(|v| v * v).sum();
    2.0 / (1.0 + r2)
}

/// Constant-curvature Riemann tensor `K (g_ik g_jl - g_il g_jk)`.
fn constant_curvature(g: &Sym2, k: f64) -> AlgCurv4 {
    kulkarni_nomizu(g, g).expect("square metric") * (0.5 * k)
}

fn bad(label: &str, reason: impl Into<String>) -> ZooError {
    ZooError::BadParameter { label: label.to_string(), reason: reason.into() }
}

const ALL_FLAGS: ChartFlags = ChartFlags { einstein: true, conformally_flat: true, constant_scalar: true };

/// Round sphere of radius `r` in a stereographic chart.
pub fn make_round_sphere(n: usize, r: f64) -> Result<ZooEntry, ZooError> {
    let label = format!("round-sphere:n={n}:r={r}");
    if n < 3 {
        return Err(bad(&label, "n must be at least 3"));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(bad(&label, "r must be positive"));
    }
    let k = 1.0 / (r * r);
    let chart = MetricChart::new(
        label.clone(),
        vec![Axis::unbounded(STEREO_HALF_WIDTH); n],
        Arc::new(move |y: &[f64]| Sym2::scaled_identity(n, (r * stereo_factor(y)).powi(2))),
    )
    .with_riemann(Arc::new(move |y: &[f64]| {
        constant_curvature(&Sym2::scaled_identity(n, (r * stereo_factor(y)).powi(2)), k)
    }))
    .with_flags(ALL_FLAGS);
    let join = JoinSphere::new(n);
    let mut axes = Vec::new();
    join.axes(&mut axes);
    let mut quadrature_nodes = Vec::new();
    join.nodes(&mut quadrature_nodes);
    let angular_metric = move |a: &[f64]| {
        let mut d = Vec::with_capacity(n);
        join.diag(a, r * r, &mut d);
        Sym2::diagonal(&d)
    };
    let integration = MetricChart::new(format!("{label}:join"), axes, Arc::new(angular_metric.clone()))
    .with_riemann(Arc::new(move |a: &[f64]| constant_curvature(&angular_metric(a), k)))
    .with_flags(ALL_FLAGS);
    let nf = n as f64;
    Ok(ZooEntry {
        label,
        chart,
        integration_chart: Some(integration),
        quadrature_nodes: Some(quadrature_nodes),
        exact: Some(ExactData {
            scalar: nf * (nf - 1.0) * k,
            ricci0_sq: 0.0,
            weyl_sq: 0.0,
            rm0_sq: 0.0,
            volume: r.powi(n as i32) * unit_sphere_volume(n),
            yamabe: Some(YamabeDatum { value: sphere_yamabe(n), provenance: YamabeProvenance::RoundSphereExact }),
            euler: Some(if n % 2 == 0 { 2 } else { 0 }),
        }),
    })
}

/// `S^1(t) x S^{n-1}` with unit sphere factor, optionally rescaled to unit
/// volume. Coordinates: circle angle first, then the sphere factor.
pub fn make_product_circle_sphere(n: usize, t: f64, normalize_volume: bool) -> Result<ZooEntry, ZooError> {
    let label = format!("s1xs:n={n}:t={t}{}", if normalize_volume { ":normalized" } else { "" });
    if n < 4 {
        return Err(bad(&label, "n must be at least 4"));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(bad(&label, "t must be positive"));
    }
    let base_volume = 2.0 * PI * t * unit_sphere_volume(n - 1);
    // homothety g -> c2 g
    let c2 = if normalize_volume { base_volume.powf(-2.0 / n as f64) } else { 1.0 };
    let k = 1.0 / c2;
    // Riemann tensor of the sphere block only
    let block = move |g: &Sym2| -> AlgCurv4 {
        let h = Sym2::from_fn(n, |i, j| if i == 0 || j == 0 { 0.0 } else { g.get(i, j) });
        constant_curvature(&h, k)
    };
    let flags = ChartFlags { einstein: false, conformally_flat: true, constant_scalar: true };

    let stereo_metric = move |x: &[f64]| {
        let s = stereo_factor(&x[1..]).powi(2);
        Sym2::from_fn(n, |i, j| match (i, j) {
            (0, 0) => c2 * t * t,
            _ if i == j => c2 * s,
            _ => 0.0,
        })
    };
    let mut axes = vec![Axis::periodic(0.0, 2.0 * PI)];
    axes.extend(vec![Axis::unbounded(STEREO_HALF_WIDTH); n - 1]);
    let chart = MetricChart::new(label.clone(), axes, Arc::new(stereo_metric))
        .with_riemann(Arc::new(move |x: &[f64]| block(&stereo_metric(x))))
        .with_flags(flags);

    let join = JoinSphere::new(n - 1);
    let mut axes = vec![Axis::periodic(0.0, 2.0 * PI)];
    join.axes(&mut axes);
    let mut quadrature_nodes = vec![2];
    join.nodes(&mut quadrature_nodes);
    let angular_metric = move |x: &[f64]| {
        let mut d = Vec::with_capacity(n);
        d.push(c2 * t * t);
        join.diag(&x[1..], c2, &mut d);
        Sym2::diagonal(&d)
    };
    let integration = MetricChart::new(format!("{label}:join"), axes, Arc::new(angular_metric.clone()))
        .with_riemann(Arc::new(move |x: &[f64]| block(&angular_metric(x))))
        .with_flags(flags);

    let nf = n as f64;
    let scalar = (nf - 1.0) * (nf - 2.0) * k;
    let ricci0_sq = scalar * scalar / (nf * (nf - 1.0));
    let volume = base_volume * c2.powf(nf / 2.0);
    let yamabe = (t <= product_yamabe_cutoff(n)).then(|| YamabeDatum {
        value: scalar * volume.powf(2.0 / nf),
        provenance: YamabeProvenance::YamabeMetricRVol,
    });
    Ok(ZooEntry {
        label,
        chart,
        integration_chart: Some(integration),
        quadrature_nodes: Some(quadrature_nodes),
        exact: Some(ExactData {
            scalar,
            ricci0_sq,
            weyl_sq: 0.0,
            rm0_sq: 4.0 / (nf - 2.0) * ricci0_sq,
            volume,
            yamabe,
            euler: Some(0),
        }),
    })
}

/// Flat torus `R^n / (2π Z)^n`.
pub fn make_flat_torus(n: usize) -> Result<ZooEntry, ZooError> {
    let label = format!("flat-torus:n={n}");
    if n < 3 {
        return Err(bad(&label, "n must be at least 3"));
    }
    let chart = MetricChart::new(
        label.clone(),
        vec![Axis::periodic(0.0, 2.0 * PI); n],
        Arc::new(move |_x: &[f64]| Sym2::identity(n)),
    )
    .with_riemann(Arc::new(move |_x: &[f64]| AlgCurv4::zeros(n)))
    .with_flags(ALL_FLAGS);
    Ok(ZooEntry {
        label,
        chart,
        integration_chart: None,
        quadrature_nodes: None,
        exact: Some(ExactData {
            scalar: 0.0,
            ricci0_sq: 0.0,
            weyl_sq: 0.0,
            rm0_sq: 0.0,
            volume: (2.0 * PI).powi(n as i32),
            yamabe: Some(YamabeDatum { value: 0.0, provenance: YamabeProvenance::YamabeMetricRVol }),
            euler: Some(0),
        }),
    })
}

/// Fubini–Study metric (holomorphic sectional curvature 4) on the complex
/// projective plane, in the affine chart with real coordinates `(x1, y1, x2, y2)`.
pub fn make_fubini_study() -> ZooEntry {
    let label = "fubini-study".to_string();
    let metric = |q: &[f64]| {
        let r2: f64 = q.iter().map(|v| v * v).sum();
        let v = [-q[1], q[0], -q[3], q[2]];
        let s = 1.0 + r2;
        Sym2::from_fn(4, |i, j| {
            let d = if i == j { s } else { 0.0 };
            (d - q[i] * q[j] - v[i] * v[j]) / (s * s)
        })
    };
    let riemann = move |q: &[f64]| {
        let g = metric(q);
        // ω_ij = g(J ∂_i, ∂_j) with J ∂x = ∂y, J ∂y = -∂x
        let jrow = |i: usize| -> (usize, f64) {
            match i {
                0 => (1, 1.0),
                1 => (0, -1.0),
                2 => (3, 1.0),
                _ => (2, -1.0),
            }
        };
        let w = |i: usize, j: usize| {
            let (m, s) = jrow(i);
            s * g.get(m, j)
        };
        let n = 4;
        let mut data = vec![0.0; 256];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        data[((i * n + j) * n + k) * n + l] = g.get(i, k) * g.get(j, l)
                            - g.get(i, l) * g.get(j, k)
                            + w(i, k) * w(j, l)
                            - w(i, l) * w(j, k)
                            + 2.0 * w(i, j) * w(k, l);
                    }
                }
            }
        }
        AlgCurv4::project(4, &data).expect("length 256")
    };
    let chart = MetricChart::new(label.clone(), vec![Axis::unbounded(AFFINE_HALF_WIDTH); 4], Arc::new(metric))
        .with_riemann(Arc::new(riemann))
        .with_flags(ChartFlags { einstein: true, conformally_flat: false, constant_scalar: true });
    let volume = PI * PI / 2.0;
    ZooEntry {
        label,
        chart,
        integration_chart: None,
        quadrature_nodes: None,
        exact: Some(ExactData {
            scalar: 24.0,
            ricci0_sq: 0.0,
            // from the Chern–Gauss–Bonnet formula with χ = 3
            weyl_sq: 96.0,
            rm0_sq: 96.0,
            volume,
            // Einstein metrics are Yamabe metrics in their conformal class
            yamabe: Some(YamabeDatum { value: 24.0 * volume.sqrt(), provenance: YamabeProvenance::YamabeMetricRVol }),
            euler: Some(3),
        }),
    }
}

/// Positive function multiplying a metric.
#[derive(Clone)]
pub enum ConformalFactor {
    Constant(f64),
    Function { name: String, f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync> },
}

impl fmt::Debug for ConformalFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "Constant({c})"),
            Self::Function { name, .. } => write!(f, "Function({name})"),
        }
    }
}

fn scale_chart(chart: &MetricChart, c2: f64, label: String) -> MetricChart {
    let m = chart.metric_fn().clone();
    let mut out = MetricChart::new(label, chart.axes().to_vec(), Arc::new(move |x: &[f64]| m(x) * c2))
        .with_flags(chart.flags());
    if let Some(r) = chart.riemann_fn().cloned() {
        out = out.with_riemann(Arc::new(move |x: &[f64]| r(x) * c2));
    }
    out
}

/// `factor * g`. A constant factor is a homothety and keeps all closed-form
/// data; a non-constant factor keeps only conformal flatness.
pub fn make_conformal(entry: &ZooEntry, factor: ConformalFactor) -> Result<ZooEntry, ZooError> {
    match factor {
        ConformalFactor::Constant(c2) => {
            if !(c2 > 0.0) || !c2.is_finite() {
                return Err(ZooError::NonPositiveFactor(vec![]));
            }
            let label = format!("{}:scale={c2}", entry.label);
            Ok(ZooEntry {
                chart: scale_chart(&entry.chart, c2, label.clone()),
                integration_chart: entry
                    .integration_chart
                    .as_ref()
                    .map(|c| scale_chart(c, c2, format!("{label}:join"))),
                quadrature_nodes: entry.quadrature_nodes.clone(),
                exact: entry.exact.map(|e| e.scaled(c2, entry.dim())),
                label,
            })
        }
        ConformalFactor::Function { name, f } => {
            let chart = &entry.chart;
            for i in 0..512 {
                let x = chart.sample_point(&halton(i, chart.dim()));
                let v = f(&x);
                if !(v > 0.0) || !v.is_finite() {
                    return Err(ZooError::NonPositiveFactor(x));
                }
            }
            let label = format!("{}:conformal={name}", entry.label);
            let m = chart.metric_fn().clone();
            let flags = ChartFlags {
                einstein: false,
                conformally_flat: chart.flags().conformally_flat,
                constant_scalar: false,
            };
            let new_chart = MetricChart::new(label.clone(), chart.axes().to_vec(), Arc::new(move |x: &[f64]| m(x) * f(x)))
                .with_flags(flags);
            Ok(ZooEntry { label, chart: new_chart, integration_chart: None, quadrature_nodes: None, exact: None })
        }
    }
}

/// Round sphere multiplied by `exp(2 amp y_1 / (1 + |y|^2))`: conformally
/// flat with non-constant scalar curvature.
pub fn make_conformal_sphere(n: usize, amp: f64) -> Result<ZooEntry, ZooError> {
    let base = make_round_sphere(n, 1.0)?;
    let f = move |y: &[f64]| {
        let r2: f64 = y.iter().map(|v| v * v).sum();
        (2.0 * amp * y[0] / (1.0 + r2)).exp()
    };
    let mut e = make_conformal(&base, ConformalFactor::Function { name: format!("amp{amp}"), f: Arc::new(f) })?;
    e.label = format!("conformal-sphere:n={n}:amp={amp}");
    Ok(e)
}

/// Flat torus plus a seeded trigonometric perturbation of relative size
/// `amplitude`; positive definite for `amplitude < 1`.
pub fn make_perturbed_flat(n: usize, amplitude: f64, seed: u64) -> Result<ZooEntry, ZooError> {
    let label = format!("perturbed-flat:n={n}:amp={amplitude}:seed={seed}");
    if n < 3 {
        return Err(bad(&label, "n must be at least 3"));
    }
    if !(0.0..1.0).contains(&amplitude) {
        return Err(bad(&label, "amplitude must lie in [0, 1)"));
    }
    const MODES: usize = 2;
    // (i, j, wave vector, phase, coefficient)
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes: Vec<(usize, usize, Vec<f64>, f64, f64)> = Vec::new();
    for i in 0..n {
        for j in i..n {
            for _ in 0..MODES {
                let k = loop {
                    let k: Vec<f64> = (0..n).map(|_| rng.random_range(-1i32..=1) as f64).collect();
                    if k.iter().any(|&v| v != 0.0) {
                        break k;
                    }
                };
                let phase = rng.random_range(0.0..2.0 * PI);
                // each row of the perturbation has absolute sum at most 1
                let coef = rng.random_range(-1.0..1.0) / (MODES as f64 * n as f64);
                modes.push((i, j, k, phase, coef));
            }
        }
    }
    let metric = move |x: &[f64]| {
        let mut p = vec![0.0; n * n];
        for (i, j, k, phase, coef) in &modes {
            let arg: f64 = k.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + phase;
            let v = amplitude * coef * arg.cos();
            p[i * n + j] += v;
            if i != j {
                p[j * n + i] += v;
            }
        }
        Sym2::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 } + p[i * n + j])
    };
    let flags = if amplitude == 0.0 { ALL_FLAGS } else { ChartFlags::NONE };
    let chart = MetricChart::new(label.clone(), vec![Axis::periodic(0.0, 2.0 * PI); n], Arc::new(metric)).with_flags(flags);
    Ok(ZooEntry { label, chart, integration_chart: None, quadrature_nodes: None, exact: None })
}

struct LabelParts<'a> {
    label: &'a str,
    kind: &'a str,
    keys: Vec<(&'a str, &'a str)>,
    words: Vec<&'a str>,
}

impl<'a> LabelParts<'a> {
    fn parse(label: &'a str) -> Self {
        let mut it = label.split(':');
        let kind = it.next().unwrap_or("");
        let mut keys = Vec::new();
        let mut words = Vec::new();
        for part in it {
            match part.split_once('=') {
                Some((k, v)) => keys.push((k, v)),
                None => words.push(part),
            }
        }
        Self { label, kind, keys, words }
    }

    fn value<T: std::str::FromStr>(&self, key: &str) -> Result<T, ZooError> {
        let raw = self
            .keys
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| bad(self.label, format!("missing '{key}='")))?;
        raw.parse().map_err(|_| bad(self.label, format!("cannot parse '{key}={raw}'")))
    }

    fn value_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ZooError> {
        if self.keys.iter().any(|(k, _)| *k == key) {
            self.value(key)
        } else {
            Ok(default)
        }
    }

    fn only(&self, allowed_keys: &[&str], allowed_words: &[&str]) -> Result<(), ZooError> {
        if let Some((k, _)) = self.keys.iter().find(|(k, _)| !allowed_keys.contains(k)) {
            return Err(bad(self.label, format!("unexpected parameter '{k}'")));
        }
        if let Some(w) = self.words.iter().find(|w| !allowed_words.contains(w)) {
            return Err(bad(self.label, format!("unexpected flag '{w}'")));
        }
        Ok(())
    }
}

/// Builds a zoo entry from its label, e.g. `round-sphere:n=4:r=1` or
/// `s1xs:n=6:t=0.1:normalized`.
pub fn from_label(label: &str) -> Result<ZooEntry, ZooError> {
    let p = LabelParts::parse(label);
    match p.kind {
        "round-sphere" => {
            p.only(&["n", "r"], &[])?;
            make_round_sphere(p.value("n")?, p.value_or("r", 1.0)?)
        }
        "s1xs" => {
            p.only(&["n", "t"], &["normalized"])?;
            make_product_circle_sphere(p.value("n")?, p.value("t")?, p.words.contains(&"normalized"))
        }
        "flat-torus" => {
            p.only(&["n"], &[])?;
            make_flat_torus(p.value("n")?)
        }
        "fubini-study" => {
            p.only(&[], &[])?;
            Ok(make_fubini_study())
        }
        "perturbed-flat" => {
            p.only(&["n", "amp", "seed"], &[])?;
            make_perturbed_flat(p.value("n")?, p.value("amp")?, p.value_or("seed", 0)?)
        }
        "conformal-sphere" => {
            p.only(&["n", "amp"], &[])?;
            make_conformal_sphere(p.value("n")?, p.value("amp")?)
        }
        _ => Err(ZooError::UnknownLabel(label.to_string())),
    }
}

/// Labels listed by the command-line front end, sorted.
pub fn catalog() -> Vec<&'static str> {
    let mut v = vec![
        "conformal-sphere:n=4:amp=0.2",
        "flat-torus:n=4",
        "flat-torus:n=5",
        "fubini-study",
        "perturbed-flat:n=4:amp=0.1:seed=42",
        "round-sphere:n=4:r=1",
        "round-sphere:n=5:r=1",
        "round-sphere:n=6:r=1",
        "s1xs:n=4:t=0.1:normalized",
        "s1xs:n=5:t=0.1:normalized",
        "s1xs:n=6:t=0.1:normalized",
        "s1xs:n=8:t=0.1:normalized",
    ];
    v.sort_unstable();
    v
}
