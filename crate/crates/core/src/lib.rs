//! Numerical curvature toolkit: orthogonal curvature decomposition, the Bach
//! tensor, pinching-hypothesis audits on closed-form metrics, and randomized
//! verification of pointwise curvature inequalities.

pub mod audit;
pub mod cli;
pub mod constants;
pub mod engine;
pub mod lab;
pub mod report;
pub mod sampling;
pub mod tensor;
pub mod verify;
pub mod zoo;

pub use engine::{Axis, AxisKind, ChartFlags, CurvatureBundle, EngineError, FdConfig, MetricChart};
pub use tensor::{AlgCurv4, Skew2, Sym2, TensorError};
pub use zoo::ZooEntry;
