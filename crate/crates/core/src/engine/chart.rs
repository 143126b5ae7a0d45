use std::fmt;
use std::sync::Arc;

use crate::tensor::{AlgCurv4, Sym2};

use super::EngineError;

pub type MetricFn = Arc<dyn Fn(&[f64]) -> Sym2 + Send + Sync>;
pub type CurvatureFn = Arc<dyn Fn(&[f64]) -> AlgCurv4 + Send + Sync>;

/// How a coordinate axis behaves at its ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisKind {
    /// Coordinates wrap modulo `upper - lower`.
    Periodic,
    /// A compact coordinate range (e.g. a polar angle).
    Interval,
    /// A truncation of an unbounded coordinate (e.g. stereographic). The
    /// excluded tail has small volume; quadrature clusters nodes near 0.
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lower: f64,
    pub upper: f64,
    pub kind: AxisKind,
}

impl Axis {
    pub fn periodic(lower: f64, upper: f64) -> Self {
        Self { lower, upper, kind: AxisKind::Periodic }
    }

    pub fn interval(lower: f64, upper: f64) -> Self {
        Self { lower, upper, kind: AxisKind::Interval }
    }

    /// Symmetric truncation `[-half_width, half_width]`.
    pub fn unbounded(half_width: f64) -> Self {
        Self { lower: -half_width, upper: half_width, kind: AxisKind::Unbounded }
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    /// Range used when drawing random interior sample points.
    pub fn sample_range(&self) -> (f64, f64) {
        match self.kind {
            AxisKind::Periodic => (self.lower, self.upper),
            AxisKind::Interval => {
                let m = 0.1 * self.length();
                (self.lower + m, self.upper - m)
            }
            AxisKind::Unbounded => (-1.5_f64.max(self.lower), 1.5_f64.min(self.upper)),
        }
    }
}

/// Standing hypotheses known to hold for a chart's metric.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChartFlags {
    pub einstein: bool,
    pub conformally_flat: bool,
    pub constant_scalar: bool,
}

impl ChartFlags {
    pub const NONE: ChartFlags =
        ChartFlags { einstein: false, conformally_flat: false, constant_scalar: false };
}

/// A single coordinate chart `(box, g(x))`, optionally with a closed-form
/// Riemann tensor.
#[derive(Clone)]
pub struct MetricChart {
    n: usize,
    axes: Vec<Axis>,
    metric: MetricFn,
    riemann: Option<CurvatureFn>,
    flags: ChartFlags,
    label: String,
}

impl fmt::Debug for MetricChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricChart")
            .field("label", &self.label)
            .field("n", &self.n)
            .field("axes", &self.axes)
            .field("flags", &self.flags)
            .field("exact_riemann", &self.riemann.is_some())
            .finish()
    }
}

impl MetricChart {
    pub fn new(label: impl Into<String>, axes: Vec<Axis>, metric: MetricFn) -> Self {
        Self { n: axes.len(), axes, metric, riemann: None, flags: ChartFlags::NONE, label: label.into() }
    }

    pub fn with_riemann(mut self, riemann: CurvatureFn) -> Self {
        self.riemann = Some(riemann);
        self
    }

    pub fn without_riemann(mut self) -> Self {
        self.riemann = None;
        self
    }

    pub fn with_flags(mut self, flags: ChartFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn flags(&self) -> ChartFlags {
        self.flags
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn metric_fn(&self) -> &MetricFn {
        &self.metric
    }

    pub fn riemann_fn(&self) -> Option<&CurvatureFn> {
        self.riemann.as_ref()
    }

    pub fn has_exact_riemann(&self) -> bool {
        self.riemann.is_some()
    }

    pub fn check_point(&self, x: &[f64]) -> Result<(), EngineError> {
        if x.len() != self.n {
            return Err(EngineError::PointDimension { expected: self.n, found: x.len() });
        }
        for (a, (&v, axis)) in x.iter().zip(&self.axes).enumerate() {
            if !v.is_finite() {
                return Err(EngineError::OutsideDomain { axis: a, coord: v });
            }
            if axis.kind != AxisKind::Periodic && (v < axis.lower || v > axis.upper) {
                return Err(EngineError::OutsideDomain { axis: a, coord: v });
            }
        }
        Ok(())
    }

    pub fn metric_at(&self, x: &[f64]) -> Result<Sym2, EngineError> {
        self.check_point(x)?;
        Ok((self.metric)(x))
    }

    pub fn exact_riemann_at(&self, x: &[f64]) -> Option<Result<AlgCurv4, EngineError>> {
        self.riemann.as_ref().map(|f| {
            self.check_point(x)?;
            Ok(f(x))
        })
    }

    /// `x + delta e_axis`, wrapped on periodic axes. Fails when a bounded
    /// axis would be left.
    pub fn shifted(&self, x: &[f64], axis: usize, delta: f64) -> Result<Vec<f64>, EngineError> {
        let mut y = x.to_vec();
        let ax = &self.axes[axis];
        let v = x[axis] + delta;
        y[axis] = match ax.kind {
            AxisKind::Periodic => ax.lower + (v - ax.lower).rem_euclid(ax.length()),
            _ => {
                if v < ax.lower || v > ax.upper {
                    return Err(EngineError::StencilExitsDomain { axis, coord: v });
                }
                v
            }
        };
        Ok(y)
    }

    /// Maps a point of the unit cube to a sample point of the chart.
    pub fn sample_point(&self, unit: &[f64]) -> Vec<f64> {
        self.axes
            .iter()
            .zip(unit)
            .map(|(ax, &u)| {
                let (lo, hi) = ax.sample_range();
                lo + u * (hi - lo)
            })
            .collect()
    }
}
