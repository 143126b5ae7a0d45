//! Tensor-product quadrature of pointwise curvature norms.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::engine::{self, Axis, AxisKind, FdConfig, MetricChart};
use crate::tensor::Frame;
use crate::zoo::ZooEntry;

use super::AuditError;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = mf * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

/// A one-dimensional rule for one chart axis.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Periodic axes use the trapezoid rule; intervals use Gauss–Legendre;
/// unbounded axes use Gauss–Legendre after the stretch `y = sinh(a s)` with
/// `a = asinh(L)`, which clusters nodes near the origin and reaches `±L`.
pub fn axis_rule(axis: &Axis, m: usize) -> AxisRule {
    match axis.kind {
        AxisKind::Periodic => {
            let h = axis.length() / m as f64;
            AxisRule { nodes: (0..m).map(|k| axis.lower + k as f64 * h).collect(), weights: vec![h; m] }
        }
        AxisKind::Interval => {
            let (x, w) = gauss_legendre(m);
            let half = 0.5 * axis.length();
            let mid = 0.5 * (axis.lower + axis.upper);
            AxisRule {
                nodes: x.iter().map(|s| mid + half * s).collect(),
                weights: w.iter().map(|v| half * v).collect(),
            }
        }
        AxisKind::Unbounded => {
            let (x, w) = gauss_legendre(m);
            let a = axis.upper.asinh();
            AxisRule {
                nodes: x.iter().map(|s| (a * s).sinh()).collect(),
                weights: x.iter().zip(&w).map(|(s, v)| v * a * (a * s).cosh()).collect(),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartChoice {
    /// The entry's primary chart.
    Primary,
    /// The entry's integration chart when it has one.
    Integration,
}

/// Node counts per axis (a single count applies to every axis) and the
/// chart to integrate on.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub nodes: Vec<usize>,
    pub chart: ChartChoice,
}

/// Points targeted by [`GridSpec::default_for`].
pub const DEFAULT_GRID_POINTS: f64 = 2.0e5;

impl GridSpec {
    pub fn uniform(m: usize) -> Self {
        Self { nodes: vec![m], chart: ChartChoice::Integration }
    }

    pub fn per_axis(nodes: Vec<usize>) -> Self {
        Self { nodes, chart: ChartChoice::Integration }
    }

    pub fn on(mut self, chart: ChartChoice) -> Self {
        self.chart = chart;
        self
    }

    /// About [`DEFAULT_GRID_POINTS`] nodes, at least 4 per axis.
    pub fn default_for(n: usize) -> Self {
        let m = DEFAULT_GRID_POINTS.powf(1.0 / n as f64).floor() as usize;
        Self::uniform(m.clamp(4, 32))
    }

    /// The entry's recommended integration-chart grid when it has one.
    pub fn default_for_entry(entry: &ZooEntry) -> Self {
        match (&entry.integration_chart, &entry.quadrature_nodes) {
            (Some(_), Some(nodes)) => Self::per_axis(nodes.clone()),
            _ => Self::default_for(entry.dim()).on(ChartChoice::Primary),
        }
    }

    pub fn counts(&self, n: usize) -> Result<Vec<usize>, AuditError> {
        let counts = match self.nodes.len() {
            1 => vec![self.nodes[0]; n],
            k if k == n => self.nodes.clone(),
            k => return Err(AuditError::BadGrid(format!("{k} node counts for {n} axes"))),
        };
        if counts.iter().any(|&m| m < 2) {
            return Err(AuditError::BadGrid("node counts must be at least 2".into()));
        }
        Ok(counts)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.nodes.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", s.join(","))?;
        if self.chart == ChartChoice::Primary {
            f.write_str("@primary")?;
        }
        Ok(())
    }
}

/// `8`, `2,8,8,8` or either followed by `@primary`.
impl FromStr for GridSpec {
    type Err = AuditError;
    fn from_str(s: &str) -> Result<Self, AuditError> {
        let (body, chart) = match s.split_once('@') {
            None => (s, ChartChoice::Integration),
            Some((b, "primary")) => (b, ChartChoice::Primary),
            Some((b, "integration")) => (b, ChartChoice::Integration),
            Some((_, other)) => return Err(AuditError::BadGrid(format!("unknown chart '{other}'"))),
        };
        let nodes = body
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| AuditError::BadGrid(format!("bad node count '{t}'"))))
            .collect::<Result<Vec<_>, _>>()?;
        if nodes.iter().any(|&m| m < 2) {
            return Err(AuditError::BadGrid("node counts must be at least 2".into()));
        }
        Ok(GridSpec { nodes, chart })
    }
}

/// Pointwise invariants at one node, all with respect to the metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValues {
    pub scalar: f64,
    pub ricci0_sq: f64,
    pub weyl_sq: f64,
    pub rm0_sq: f64,
    /// `|W + √n/(2√2(n−2)) R̊ic ∧ g|²`.
    pub combo_sq: f64,
}

/// Coefficient of `R̊ic ∧ g` in the combined Weyl–Ricci quantity.
pub fn combo_coefficient(n: usize) -> f64 {
    let nf = n as f64;
    nf.sqrt() / (2.0 * 2.0_f64.sqrt() * (nf - 2.0))
}

/// Invariants of a curvature tensor given in orthonormal-frame components:
/// one pass builds `R̊m = Rm − U`, `W = R̊m − V` and the combined quantity
/// entrywise and accumulates their squared norms.
pub fn frame_invariants(n: usize, rm: &[f64]) -> PointValues {
    let nf = n as f64;
    let mut ric = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                ric[j * n + l] += rm[((i * n + j) * n + i) * n + l];
            }
        }
    }
    let scalar: f64 = (0..n).map(|i| ric[i * n + i]).sum();
    for i in 0..n {
        ric[i * n + i] -= scalar / nf;
    }
    let u = scalar / (nf * (nf - 1.0));
    let v = 1.0 / (nf - 2.0);
    let c = combo_coefficient(n);
    let (mut rm0_sq, mut weyl_sq, mut combo_sq) = (0.0, 0.0, 0.0);
    let mut flat = 0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let r = rm[flat];
                    flat += 1;
                    let (dik, dil, djk, djl) = (i == k, i == l, j == k, j == l);
                    let (rm0, kn) = if dik || dil || djk || djl {
                        let d = |b: bool| if b { 1.0 } else { 0.0 };
                        let gg = d(dik) * d(djl) - d(dil) * d(djk);
                        let kn = ric[i * n + k] * d(djl) - ric[i * n + l] * d(djk) + ric[j * n + l] * d(dik)
                            - ric[j * n + k] * d(dil);
                        (r - u * gg, kn)
                    } else {
                        (r, 0.0)
                    };
                    let w = rm0 - v * kn;
                    let combo = w + c * kn;
                    rm0_sq += rm0 * rm0;
                    weyl_sq += w * w;
                    combo_sq += combo * combo;
                }
            }
        }
    }
    PointValues { scalar, ricci0_sq: ric.iter().map(|x| x * x).sum(), weyl_sq, rm0_sq, combo_sq }
}

/// Curvature invariants at `x` and `√det g`, from the chart's exact
/// curvature when it has one, otherwise by finite differences.
pub fn point_values_with_density(chart: &MetricChart, x: &[f64], cfg: &FdConfig) -> Result<(PointValues, f64), AuditError> {
    let g = chart.metric_at(x)?;
    let rm = engine::riemann_auto(chart, x, cfg)?;
    let frame = Frame::new(&g)?;
    let hat = frame.curv_to_frame(&rm);
    Ok((frame_invariants(chart.dim(), hat.as_slice()), frame.sqrt_det()))
}

/// Curvature invariants at `x`.
pub fn point_values(chart: &MetricChart, x: &[f64], cfg: &FdConfig) -> Result<PointValues, AuditError> {
    Ok(point_values_with_density(chart, x, cfg)?.0)
}

/// Weighted pointwise data on a tensor grid; weights include `√det g`.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub chart_label: String,
    pub nodes: Vec<usize>,
    pub weights: Vec<f64>,
    pub values: Vec<PointValues>,
}

impl Quadrature {
    pub fn points(&self) -> usize {
        self.weights.len()
    }

    pub fn volume(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(&PointValues) -> f64) -> f64 {
        self.weights.iter().zip(&self.values).map(|(w, v)| w * f(v)).sum()
    }
}

/// Evaluates the invariants on the tensor grid of `grid`.
pub fn quadrature(entry: &ZooEntry, grid: &GridSpec, cfg: &FdConfig) -> Result<Quadrature, AuditError> {
    let chart = match grid.chart {
        ChartChoice::Primary => &entry.chart,
        ChartChoice::Integration => entry.quadrature_chart(),
    };
    let n = chart.dim();
    let counts = grid.counts(n)?;
    let rules: Vec<AxisRule> = chart.axes().iter().zip(&counts).map(|(a, &m)| axis_rule(a, m)).collect();
    let total: usize = counts.iter().product();
    let mut weights = Vec::with_capacity(total);
    let mut values = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    for _ in 0..total {
        let mut w = 1.0;
        for a in 0..n {
            x[a] = rules[a].nodes[idx[a]];
            w *= rules[a].weights[idx[a]];
        }
        let (v, sqrt_det) = point_values_with_density(chart, &x, cfg)?;
        weights.push(w * sqrt_det);
        values.push(v);
        for a in (0..n).rev() {
            idx[a] += 1;
            if idx[a] < counts[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    Ok(Quadrature { chart_label: chart.label().to_string(), nodes: counts, weights, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for m in 1..12 {
            let (x, w) = gauss_legendre(m);
            for deg in 0..(2 * m) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-13, "m={m} deg={deg}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn stretched_rule_integrates_decaying_function() {
        let rule = axis_rule(&Axis::unbounded(200.0), 64);
        let q: f64 = rule.nodes.iter().zip(&rule.weights).map(|(y, w)| w / (1.0 + y * y)).sum();
        let exact = 2.0 * 200.0_f64.atan();
        assert!((q - exact).abs() < 1e-8, "{q} vs {exact}");
    }

    #[test]
    fn frame_invariants_match_decomposition() {
        use crate::tensor::{decompose, kulkarni_nomizu, AlgCurv4, Sym2};
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for n in 4..8 {
            let rm = AlgCurv4::random(n, &mut rng);
            let g = Sym2::from_fn(n, |i, j| if i == j { 2.0 + i as f64 } else { 0.1 / (1.0 + (i + j) as f64) });
            let frame = Frame::new(&g).unwrap();
            let coord = frame.curv_from_frame(&rm);
            let dec = decompose(&coord, &g).unwrap();
            let combo = &dec.weyl + &(kulkarni_nomizu(&dec.ricci0, &g).unwrap() * combo_coefficient(n));
            let v = frame_invariants(n, rm.as_slice());
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
            assert!(close(v.scalar, dec.scalar));
            assert!(close(v.ricci0_sq, dec.ricci0.norm_sq(&g).unwrap()));
            assert!(close(v.weyl_sq, dec.weyl.norm_sq(&g).unwrap()));
            assert!(close(v.rm0_sq, dec.rm0.norm_sq(&g).unwrap()));
            assert!(close(v.combo_sq, combo.norm_sq(&g).unwrap()));
        }
    }

    #[test]
    fn grid_spec_parsing() {
        assert_eq!("6".parse::<GridSpec>().unwrap(), GridSpec::uniform(6));
        let g: GridSpec = "2,8,8@primary".parse().unwrap();
        assert_eq!(g, GridSpec::per_axis(vec![2, 8, 8]).on(ChartChoice::Primary));
        assert_eq!(g.to_string(), "2,8,8@primary");
        assert!("1".parse::<GridSpec>().is_err());
        assert!("x".parse::<GridSpec>().is_err());
        assert!(GridSpec::uniform(4).counts(3).is_ok());
        assert!(GridSpec::per_axis(vec![4, 4]).counts(3).is_err());
    }
}
