//! Curvature of a metric chart from closed-form callbacks or central finite
//! differences: connection, Riemann tensor, covariant derivatives, the Bach
//! tensor and several differential-identity residuals.

mod chart;
pub mod covariant;
pub mod fd;

use thiserror::Error;

use crate::tensor::{self, decompose, AlgCurv4, Decomposition, Frame, Sym2, TensorError};

pub use chart::{Axis, AxisKind, ChartFlags, CurvatureFn, MetricChart, MetricFn};
pub use fd::{jet, FdConfig, Jet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("finite-difference stencil leaves the chart on axis {axis} (coordinate {coord})")]
    StencilExitsDomain { axis: usize, coord: f64 },
    #[error("point outside the chart on axis {axis} (coordinate {coord})")]
    OutsideDomain { axis: usize, coord: f64 },
    #[error("point has {found} coordinates, chart dimension is {expected}")]
    PointDimension { expected: usize, found: usize },
    #[error("{op} is not defined in dimension {n}")]
    DimensionUnsupported { op: &'static str, n: usize },
    #[error("chart is not flagged {0}; the identity being checked assumes it")]
    RequiresFlag(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

pub type Result<T> = std::result::Result<T, EngineError>;

/// Metric, inverse metric and Levi-Civita connection at a point, with the
/// first derivatives of the connection when requested.
#[derive(Debug, Clone)]
pub struct Connection {
    pub n: usize,
    pub g: Sym2,
    pub g_inv: Sym2,
    /// `gamma[(k*n + i)*n + j] = Γ^k_{ij}`.
    pub gamma: Vec<f64>,
    /// `dgamma[((b*n + k)*n + i)*n + j] = ∂_b Γ^k_{ij}`.
    pub dgamma: Option<Vec<f64>>,
    /// Lowered raw Riemann tensor assembled from the same jet.
    riemann_raw: Option<Vec<f64>>,
}

fn metric_jet(chart: &MetricChart, x: &[f64], second: bool, cfg: &FdConfig) -> Result<Jet> {
    let f = chart.metric_fn().clone();
    jet(chart, x, second, cfg, |y| Ok(f(y).into_vec()))
}

/// Builds the connection (and the raw Riemann tensor when `second`) from
/// finite differences of the metric.
pub fn connection(chart: &MetricChart, x: &[f64], cfg: &FdConfig, second: bool) -> Result<Connection> {
    let n = chart.dim();
    let j = metric_jet(chart, x, second, cfg)?;
    let g = Sym2::from_vec_unchecked(n, j.value.clone());
    let frame = Frame::new(&g)?;
    let g_inv = frame.inverse_metric().clone();
    let nn = n * n;
    let dg = |a: usize, i: usize, k: usize| j.d1[a * nn + i * n + k];

    // Γ_{l,ij}
    let mut lower = vec![0.0; n * n * n];
    for l in 0..n {
        for i in 0..n {
            for k in 0..n {
                lower[(l * n + i) * n + k] = 0.5 * (dg(i, k, l) + dg(k, i, l) - dg(l, i, k));
            }
        }
    }
    let mut gamma = vec![0.0; n * n * n];
    for m in 0..n {
        for i in 0..n {
            for k in 0..n {
                gamma[(m * n + i) * n + k] =
                    (0..n).map(|l| g_inv.get(m, l) * lower[(l * n + i) * n + k]).sum();
            }
        }
    }

    let (dgamma, riemann_raw) = if second {
        let ddg = |a: usize, b: usize, i: usize, k: usize| j.d2(a, b)[i * n + k];
        // ∂_b g^{ml}
        let mut dginv = vec![0.0; n * n * n];
        for b in 0..n {
            for m in 0..n {
                for l in 0..n {
                    let mut s = 0.0;
                    for p in 0..n {
                        for q in 0..n {
                            s += g_inv.get(m, p) * dg(b, p, q) * g_inv.get(q, l);
                        }
                    }
                    dginv[(b * n + m) * n + l] = -s;
                }
            }
        }
        let mut dgamma = vec![0.0; n * n * n * n];
        for b in 0..n {
            for m in 0..n {
                for i in 0..n {
                    for k in 0..n {
                        let mut s = 0.0;
                        for l in 0..n {
                            let dlower =
                                0.5 * (ddg(b, i, k, l) + ddg(b, k, i, l) - ddg(b, l, i, k));
                            s += dginv[(b * n + m) * n + l] * lower[(l * n + i) * n + k]
                                + g_inv.get(m, l) * dlower;
                        }
                        dgamma[((b * n + m) * n + i) * n + k] = s;
                    }
                }
            }
        }
        let mut raw = vec![0.0; n * n * n * n];
        for i in 0..n {
            for jj in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut v = 0.5
                            * (ddg(jj, k, i, l) + ddg(i, l, jj, k) - ddg(i, k, jj, l) - ddg(jj, l, i, k));
                        for p in 0..n {
                            v += gamma[(p * n + jj) * n + k] * lower[(p * n + i) * n + l]
                                - gamma[(p * n + jj) * n + l] * lower[(p * n + i) * n + k];
                        }
                        raw[tensor::idx4(n, i, jj, k, l)] = v;
                    }
                }
            }
        }
        (Some(dgamma), Some(raw))
    } else {
        (None, None)
    };
    Ok(Connection { n, g, g_inv, gamma, dgamma, riemann_raw })
}

/// Christoffel symbols `Γ^k_{ij}` at `x`, laid out `(k, i, j)`.
pub fn christoffel(chart: &MetricChart, x: &[f64], cfg: &FdConfig) -> Result<Vec<f64>> {
    Ok(connection(chart, x, cfg, false)?.gamma)
}

/// Finite-difference Riemann tensor together with the symmetry residual of
/// the raw (pre-projection) values.
#[derive(Debug, Clone)]
pub struct RiemannFd {
    pub tensor: AlgCurv4,
    pub raw_symmetry_residual: f64,
}

pub fn riemann_fd(chart: &MetricChart, x: &[f64], cfg: &FdConfig) -> Result<RiemannFd> {
    let n = chart.dim();
    let conn = connection(chart, x, cfg, true)?;
    let raw = conn.riemann_raw.expect("second-order connection carries Riemann");
    let raw_symmetry_residual = tensor::raw_symmetry_residual(n, &raw);
    Ok(RiemannFd { tensor: AlgCurv4::project(n, &raw)?, raw_symmetry_residual })
}

/// Lowered Riemann tensor at `x` by finite differences, projected onto the
/// algebraic curvature tensors.
pub fn riemann(chart: &MetricChart, x: &[f64], cfg: &FdConfig) -> Result<AlgCurv4> {
    Ok(riemann_fd(chart, x, cfg)?.tensor)
}

/// Closed-form Riemann tensor when the chart has one, otherwise finite
/// differences.
pub fn riemann_auto(chart: &MetricChart, x: &[f64], cfg: &FdConfig) -> Result<AlgCurv4> {
    match chart.exact_riemann_at(x) {
        Some(r) => r,
        None => riemann(chart, x, cfg),
    }
}

/// Decomposition of the curvature at `x` (closed form when available).
pub fn decomposition_at(chart: &MetricChart, x: &[f64], cfg: &FdConfig, exact: bool) -> Result<Decomposition> {
    let g = chart.metric_at(x)?;
    let rm = if exact { riemann_auto(chart, x, cfg)? } else { riemann(chart, x, cfg)? };
    Ok(decompose(&rm, &g)?)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BundleOptions {
    pub with_bach: bool,
    pub with_div: bool,
    /// Use the chart's closed-form Riemann tensor for the pointwise parts.
    pub prefer_exact: bool,
}

/// Every pointwise curvature quantity at one chart point.
#[derive(Debug, Clone)]
pub struct CurvatureBundle {
    pub point: Vec<f64>,
    pub g: Sym2,
    pub rm: AlgCurv4,
    pub weyl: AlgCurv4,
    pub v: AlgCurv4,
    pub u: AlgCurv4,
    pub rm0: AlgCurv4,
    pub ricci: Sym2,
    pub ricci0: Sym2,
    pub scalar: f64,
    pub bach: Option<Sym2>,
    /// `(δR̊m)_{ijk} = ∇^l R̊_{ijkl}`, laid out `(i, j, k)`.
    pub div_rm0: Option<Vec<f64>>,
    /// Symmetry residual of the raw finite-difference Riemann tensor
    /// (zero when the closed form was used).
    pub raw_symmetry_residual: f64,
}

pub fn bundle(chart: &MetricChart, x: &[f64], cfg: &FdConfig, opts: BundleOptions) -> Result<CurvatureBundle> {
    let g = chart.metric_at(x)?;
    let (rm, raw_symmetry_residual) = match (opts.prefer_exact, chart.exact_riemann_at(x)) {
        (true, Some(r)) => (r?, 0.0),
        _ => {
            let r = riemann_fd(chart, x, cfg)?;
            (r.tensor, r.raw_symmetry_residual)
        }
    };
    let d = decompose(&rm, &g)?;
    let bach = if opts.with_bach { Some(bach(chart, x, cfg)?) } else { None };
    let div_rm0 = if opts.with_div { Some(div_rm0(chart, x, cfg)?) } else { None };
    Ok(CurvatureBundle {
        point: x.to_vec(),
        g,
        rm,
        weyl: d.weyl,
        v: d.ricci_part,
        u: d.scalar_part,
        rm0: d.rm0,
        ricci: d.ricci,
        ricci0: d.ricci0,
        scalar: d.scalar,
        bach,
        div_rm0,
        raw_symmetry_residual,
    })
}

/// Covariant derivative of a rank-`rank` covariant tensor field at `x`;
/// the new index comes first.
pub fn cov_deriv<F>(chart: &MetricChart, x: &[f64], rank: usize, cfg: &FdConfig, field: F) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let n = chart.dim();
    let j = jet(chart, x, false, cfg, field)?;
    if j.m != n.pow(rank as u32) {
        return Err(EngineError::InvalidConfig(format!(
            "field has {} components, rank {rank} needs {}",
            j.m,
            n.pow(rank as u32)
        )));
    }
    let conn = connection(chart, x, cfg, false)?;
    Ok(covariant::cov(n, rank, &j.value, &j.d1, &conn.gamma))
}

/// Settings for curvature fields that are themselves differentiated: same
/// stencil, no extrapolation.
fn inner_cfg(cfg: &FdConfig) -> FdConfig {
    cfg.with_richardson(false)
}

/// Bach tensor `B_ij = ∇^k∇^l W_ikjl / (n-3) + R^{kl} W_ikjl / (n-2)`.
///
/// The Weyl field is evaluated by finite differences at every outer stencil
/// point, then differentiated twice with the connection of the center point.
pub fn bach(chart: &MetricChart, x: &[f64], cfg: &FdConfig) -> Result<Sym2> {
    let n = chart.dim();
    if n < 4 {
        return Err(EngineError::DimensionUnsupported { op: "the Bach tensor", n });
    }
    let inner = inner_cfg(cfg);
    let weyl_field = |y: &[f64]| -> Result<Vec<f64>> {
        Ok(decomposition_at(chart, y, &inner, false)?.weyl.into_vec())
    };
    let wj = jet(chart, x, true, cfg, weyl_field)?;
    let conn = connection(chart, x, &inner, true)?;
    let raw = conn.riemann_raw.as_ref().expect("second-order connection");
    let center = decompose(&AlgCurv4::project(n, raw)?, &conn.g)?;
    let dgamma = conn.dgamma.as_ref().expect("second-order connection");
    let d2 = wj.d2.as_ref().expect("second-order jet");
    let nnw = covariant::second_cov(n, 4, &wj.value, &wj.d1, d2, &conn.gamma, dgamma);

    let gi = &conn.g_inv;
    let n4 = n.pow(4);
    // raised Ricci R^{kl}
    let ric_up = Sym2::from_fn(n, |k, l| {
        let mut s = 0.0;
        for c in 0..n {
            for d in 0..n {
                s += gi.get(k, c) * gi.get(l, d) * center.ricci.get(c, d);
            }
        }
        s
    });
    let w = &wj.value;
    let nf = n as f64;
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for jj in 0..n {
            let mut div2 = 0.0;
            let mut ricw = 0.0;
            for k in 0..n {
                for l in 0..n {
                    let widx = tensor::idx4(n, i, k, jj, l);
                    ricw += ric_up.get(k, l) * w[widx];
                    for c in 0..n {
                        let gkc = gi.get(k, c);
                        if gkc == 0.0 {
                            continue;
                        }
                        for d in 0..n {
                            div2 += gkc * gi.get(l, d) * nnw[(c * n + d) * n4 + widx];
                        }
                    }
                }
            }
            b[i * n + jj] = div2 / (nf - 3.0) + ricw / (nf - 2.0);
        }
    }
    Ok(Sym2::from_fn(n, |i, j| b[i * n + j]))
}

/// Jet of the concatenated field `[W, R̊m, |R̊m|]`. The inner curvature
/// evaluations use `cfg` as given, Richardson included: their truncation
/// error is what the outer derivative sees.
fn trace_free_jet(chart: &MetricChart, x: &[f64], cfg: &FdConfig) -> Result<Jet> {
    let inner = *cfg;
    jet(chart, x, false, cfg, |y| {
        let g = chart.metric_at(y)?;
        let d = decomposition_at(chart, y, &inner, false)?;
        let norm = d.rm0.norm_sq(&g)?.sqrt();
        let mut v = d.weyl.into_vec();
        v.extend_from_slice(d.rm0.as_slice());
        v.push(norm);
        Ok(v)
    })
}

struct TraceFreeDerivs {
    conn: Connection,
    /// `∇_a W_{ijkl}`
    dw: Vec<f64>,
    /// `∇_a R̊_{ijkl}`
    drm0: Vec<f64>,
    rm0: Vec<f64>,
    rm0_norm: f64,
    /// `∂_a |R̊m|`
    dnorm: Vec<f64>,
}

fn trace_free_derivs(chart: &MetricChart, x: &[f64], cfg: &FdConfig) -> Result<TraceFreeDerivs> {
    let n = chart.dim();
    let n4 = n.pow(4);
    let j = trace_free_jet(chart, x, cfg)?;
    let conn = connection(chart, x, &inner_cfg(cfg), false)?;
    let split = |v: &[f64], off: usize| -> Vec<f64> { v[off..off + n4].to_vec() };
    let mut dw_p = Vec::with_capacity(n * n4);
    let mut drm0_p = Vec::with_capacity(n * n4);
    let mut dnorm = Vec::with_capacity(n);
    for a in 0..n {
        let row = j.d1(a);
        dw_p.extend_from_slice(&row[..n4]);
        drm0_p.extend_from_slice(&row[n4..2 * n4]);
        dnorm.push(row[2 * n4]);
    }
    let w = split(&j.value, 0);
    let rm0 = split(&j.value, n4);
    let dw = covariant::cov(n, 4, &w, &dw_p, &conn.gamma);
    let drm0 = covariant::cov(n, 4, &rm0, &drm0_p, &conn.gamma);
    Ok(TraceFreeDerivs { rm0_norm: j.value[2 * n4], conn, dw, drm0, rm0, dnorm })
}

/// `g^{la} T_{a,ijkl}` for a derivative-first rank-5 array.
fn divergence(n: usize, g_inv: &Sym2, d: &[f64]) -> Vec<f64> {
    let n4 = n.pow(4);
    let mut out = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    for a in 0..n {
                        s += g_inv.get(l, a) * d[a * n4 + tensor::idx4(n, i, j, k, l)];
                    }
                }
                out[(i * n + j) * n + k] = s;
            }
        }
    }
    out
}

/// `(δR̊m)_{ijk} = ∇^l R̊_{ijkl}`.
pub fn div_rm0(chart: &MetricChart, x: &[f64], cfg: &FdConfig) -> Result<Vec<f64>> {
    let n = chart.dim();
    let t = trace_free_derivs(chart, x, cfg)?;
    Ok(divergence(n, &t.conn.g_inv, &t.drm0))
}

/// Max-norm of `∇^l W_ijkl - (n-3)/(n-2) ∇^l R̊_ijkl`; requires constant
/// scalar curvature.
pub fn weyl_divergence_check(chart: &MetricChart, x: &[f64], cfg: &FdConfig) -> Result<f64> {
    if !chart.flags().constant_scalar {
        return Err(EngineError::RequiresFlag("constant-scalar"));
    }
    let n = chart.dim();
    let t = trace_free_derivs(chart, x, cfg)?;
    let dw = divergence(n, &t.conn.g_inv, &t.dw);
    let dr = divergence(n, &t.conn.g_inv, &t.drm0);
    let c = (n as f64 - 3.0) / (n as f64 - 2.0);
    Ok(dw.iter().zip(&dr).fold(0.0_f64, |m, (a, b)| m.max((a - c * b).abs())))
}

/// Max-norm of the cyclic sum `∇_h R̊_ijkl + ∇_l R̊_ijhk + ∇_k R̊_ijlh`;
/// requires constant scalar curvature.
pub fn second_bianchi_check(chart: &MetricChart, x: &[f64], cfg: &FdConfig) -> Result<f64> {
    if !chart.flags().constant_scalar {
        return Err(EngineError::RequiresFlag("constant-scalar"));
    }
    let n = chart.dim();
    let n4 = n.pow(4);
    let t = trace_free_derivs(chart, x, cfg)?;
    let d = |a: usize, i: usize, j: usize, k: usize, l: usize| t.drm0[a * n4 + tensor::idx4(n, i, j, k, l)];
    let mut r = 0.0_f64;
    for h in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        r = r.max((d(h, i, j, k, l) + d(l, i, j, h, k) + d(k, i, j, l, h)).abs());
                    }
                }
            }
        }
    }
    Ok(r)
}

/// Outcome of the pointwise Kato inequality `|∇R̊m|² ≥ |∇|R̊m||²`.
#[derive(Debug, Clone, PartialEq)]
pub struct KatoStats {
    pub samples: usize,
    /// Points where `R̊m` vanishes (to FD noise) and `∇|R̊m|` is undefined.
    pub vacuous: usize,
    /// Smallest `|∇R̊m|² - |∇|R̊m||²` over non-vacuous points.
    pub min_margin: Option<f64>,
}

impl KatoStats {
    pub fn is_vacuous(&self) -> bool {
        self.min_margin.is_none()
    }
}

/// Relative size below which `R̊m` counts as zero in the Kato check.
pub const KATO_VACUITY: f64 = 1e-6;

pub fn kato_check(chart: &MetricChart, points: &[Vec<f64>], cfg: &FdConfig) -> Result<KatoStats> {
    let n = chart.dim();
    let mut stats = KatoStats { samples: points.len(), vacuous: 0, min_margin: None };
    for x in points {
        let t = trace_free_derivs(chart, x, cfg)?;
        let rm = riemann(chart, x, &inner_cfg(cfg))?;
        let scale = rm.norm_sq(&t.conn.g)?.sqrt().max(1.0);
        if t.rm0_norm <= KATO_VACUITY * scale {
            stats.vacuous += 1;
            continue;
        }
        let frame = Frame::new(&t.conn.g)?;
        let grad_sq: f64 = frame.to_frame(&t.drm0, 5).iter().map(|v| v * v).sum();
        let mut norm_grad_sq = 0.0;
        for a in 0..n {
            for b in 0..n {
                norm_grad_sq += t.conn.g_inv.get(a, b) * t.dnorm[a] * t.dnorm[b];
            }
        }
        debug_assert_eq!(t.rm0.len(), n.pow(4));
        let margin = grad_sq - norm_grad_sq;
        stats.min_margin = Some(stats.min_margin.map_or(margin, |m: f64| m.min(margin)));
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn stereo_sphere(n: usize) -> MetricChart {
        MetricChart::new(
            "sphere",
            vec![Axis::unbounded(20.0); n],
            Arc::new(move |y: &[f64]| {
                let r2: f64 = y.iter().map(|v| v * v).sum();
                Sym2::scaled_identity(n, (2.0 / (1.0 + r2)).powi(2))
            }),
        )
        .with_flags(ChartFlags { einstein: true, conformally_flat: true, constant_scalar: true })
    }

    fn exact_sphere(g: &Sym2) -> AlgCurv4 {
        tensor::kulkarni_nomizu(g, g).unwrap() * 0.5
    }

    #[test]
    fn stereographic_origin_has_zero_connection() {
        let c = stereo_sphere(4);
        let gamma = christoffel(&c, &[0.0; 4], &FdConfig::default()).unwrap();
        assert!(gamma.iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn christoffel_is_symmetric_and_metric_compatible() {
        let c = stereo_sphere(4);
        let x = [0.3, -0.2, 0.5, 0.1];
        let cfg = FdConfig::default();
        let gamma = christoffel(&c, &x, &cfg).unwrap();
        let n = 4;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    assert!((gamma[(k * n + i) * n + j] - gamma[(k * n + j) * n + i]).abs() < 1e-14);
                }
            }
        }
        let f = c.metric_fn().clone();
        let ng = cov_deriv(&c, &x, 2, &cfg, |y| Ok(f(y).into_vec())).unwrap();
        assert!(ng.iter().all(|v| v.abs() < 1e-7), "∇g = 0");
    }

    #[test]
    fn fd_riemann_matches_constant_curvature() {
        let c = stereo_sphere(4);
        let x = [0.3, -0.2, 0.5, 0.1];
        let cfg = FdConfig::default().with_richardson(true);
        let r = riemann_fd(&c, &x, &cfg).unwrap();
        let exact = exact_sphere(&c.metric_at(&x).unwrap());
        let err = (&r.tensor - &exact).max_abs_entry() / exact.max_abs_entry();
        assert!(err < 1e-6, "relative error {err}");
        assert!(r.raw_symmetry_residual < 1e-8);
        let d = decompose(&r.tensor, &c.metric_at(&x).unwrap()).unwrap();
        assert!((d.scalar - 12.0).abs() < 1e-6);
    }

    #[test]
    fn order_two_riemann_converges_quadratically() {
        let c = stereo_sphere(3);
        let x = [0.4, 0.1, -0.3];
        let exact = exact_sphere(&c.metric_at(&x).unwrap());
        let err = |h: f64| {
            let cfg = FdConfig::new(h, 2, false).unwrap();
            (&riemann(&c, &x, &cfg).unwrap() - &exact).max_abs_entry()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn bach_vanishes_on_sphere_and_rejects_dimension_three() {
        let c = stereo_sphere(4);
        let b = bach(&c, &[0.2, 0.1, -0.3, 0.25], &FdConfig::default()).unwrap();
        assert!(b.max_abs_entry() < 1e-5, "{}", b.max_abs_entry());
        assert!(matches!(
            bach(&stereo_sphere(3), &[0.0; 3], &FdConfig::default()),
            Err(EngineError::DimensionUnsupported { .. })
        ));
    }

    #[test]
    fn gradient_of_scaled_metric_matches_partials() {
        let n = 3;
        let flat = MetricChart::new("flat", vec![Axis::unbounded(5.0); n], Arc::new(move |_y: &[f64]| Sym2::identity(n)));
        let f = |y: &[f64]| (y[0] * y[1]).sin() + y[2] * y[2];
        let x = [0.3, 0.7, -0.4];
        let d = cov_deriv(&flat, &x, 2, &FdConfig::default(), |y| Ok(Sym2::scaled_identity(n, f(y)).into_vec())).unwrap();
        let df = [0.7 * (0.21f64).cos(), 0.3 * (0.21f64).cos(), -0.8];
        for a in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let expect = if i == j { df[a] } else { 0.0 };
                    assert!((d[(a * n + i) * n + j] - expect).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn identity_checks_refuse_without_flag() {
        let c = stereo_sphere(4).with_flags(ChartFlags::NONE);
        assert_eq!(
            weyl_divergence_check(&c, &[0.0; 4], &FdConfig::default()),
            Err(EngineError::RequiresFlag("constant-scalar"))
        );
        assert!(second_bianchi_check(&c, &[0.0; 4], &FdConfig::default()).is_err());
    }

    #[test]
    fn sphere_identity_residuals_small() {
        let c = stereo_sphere(5);
        let x = [0.1, -0.2, 0.3, 0.0, 0.2];
        let cfg = FdConfig::default().with_richardson(true);
        assert!(weyl_divergence_check(&c, &x, &cfg).unwrap() < 1e-6);
        assert!(second_bianchi_check(&c, &x, &cfg).unwrap() < 1e-6);
        let k = kato_check(&c, &[x.to_vec()], &cfg).unwrap();
        assert!(k.is_vacuous(), "{k:?}");
        assert!(div_rm0(&c, &x, &cfg).unwrap().iter().all(|v| v.abs() < 1e-6));
    }
}
