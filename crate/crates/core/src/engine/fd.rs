//! Central finite-difference jets of vector-valued fields on a chart.

use super::{EngineError, MetricChart};

/// Finite-difference settings. `order` is the truncation order of the
/// central stencils (2 or 4).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    pub step: f64,
    pub order: u8,
    pub richardson: bool,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self { step: 1e-2, order: 4, richardson: false }
    }
}

impl FdConfig {
    pub fn new(step: f64, order: u8, richardson: bool) -> Result<Self, EngineError> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(EngineError::InvalidConfig(format!("step must be positive, got {step}")));
        }
        if order != 2 && order != 4 {
            return Err(EngineError::InvalidConfig(format!("order must be 2 or 4, got {order}")));
        }
        Ok(Self { step, order, richardson })
    }

    pub fn with_richardson(self, richardson: bool) -> Self {
        Self { richardson, ..self }
    }

    pub fn with_step(self, step: f64) -> Self {
        Self { step, ..self }
    }

    /// Largest coordinate offset touched by one stencil.
    pub fn reach(&self) -> f64 {
        let k = if self.order == 4 { 2.0 } else { 1.0 };
        k * self.step
    }
}

/// Value, gradient and (optionally) Hessian of an `m`-component field.
#[derive(Debug, Clone)]
pub struct Jet {
    pub n: usize,
    pub m: usize,
    pub value: Vec<f64>,
    /// `d1[a * m + c] = ∂_a f_c`.
    pub d1: Vec<f64>,
    /// `d2[(a * n + b) * m + c] = ∂_a ∂_b f_c`, symmetric in `(a, b)`.
    pub d2: Option<Vec<f64>>,
}

impl Jet {
    pub fn d1(&self, a: usize) -> &[f64] {
        &self.d1[a * self.m..(a + 1) * self.m]
    }

    pub fn d2(&self, a: usize, b: usize) -> &[f64] {
        let d2 = self.d2.as_ref().expect("jet computed without second derivatives");
        let off = (a * self.n + b) * self.m;
        &d2[off..off + self.m]
    }
}

const C4: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];

/// Jet of `field` at `x`. With `cfg.richardson`, one level of Richardson
/// extrapolation (steps `h` and `h/2`) is applied to the derivatives.
pub fn jet<F>(
    chart: &MetricChart,
    x: &[f64],
    second: bool,
    cfg: &FdConfig,
    mut field: F,
) -> Result<Jet, EngineError>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>, EngineError>,
{
    chart.check_point(x)?;
    let value = field(x)?;
    let coarse = raw_jet(chart, x, &value, second, cfg.step, cfg.order, &mut field)?;
    if !cfg.richardson {
        return Ok(coarse);
    }
    let fine = raw_jet(chart, x, &value, second, cfg.step / 2.0, cfg.order, &mut field)?;
    let w = 2f64.powi(cfg.order as i32);
    let mix = |c: &[f64], f: &[f64]| -> Vec<f64> {
        c.iter().zip(f).map(|(c, f)| (w * f - c) / (w - 1.0)).collect()
    };
    Ok(Jet {
        n: coarse.n,
        m: coarse.m,
        value,
        d1: mix(&coarse.d1, &fine.d1),
        d2: match (&coarse.d2, &fine.d2) {
            (Some(c), Some(f)) => Some(mix(c, f)),
            _ => None,
        },
    })
}

fn raw_jet<F>(
    chart: &MetricChart,
    x: &[f64],
    f0: &[f64],
    second: bool,
    h: f64,
    order: u8,
    field: &mut F,
) -> Result<Jet, EngineError>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>, EngineError>,
{
    let n = chart.dim();
    let m = f0.len();
    let mut d1 = vec![0.0; n * m];
    let mut d2 = if second { Some(vec![0.0; n * n * m]) } else { None };
    let check_len = |v: &Vec<f64>| -> Result<(), EngineError> {
        if v.len() != m {
            return Err(EngineError::InvalidConfig(format!(
                "field returned {} components, expected {m}",
                v.len()
            )));
        }
        Ok(())
    };

    for a in 0..n {
        if order == 2 {
            let fp = field(&chart.shifted(x, a, h)?)?;
            let fm = field(&chart.shifted(x, a, -h)?)?;
            check_len(&fp)?;
            check_len(&fm)?;
            for c in 0..m {
                d1[a * m + c] = (fp[c] - fm[c]) / (2.0 * h);
            }
            if let Some(d2) = d2.as_mut() {
                for c in 0..m {
                    d2[(a * n + a) * m + c] = (fp[c] - 2.0 * f0[c] + fm[c]) / (h * h);
                }
            }
        } else {
            let fm2 = field(&chart.shifted(x, a, -2.0 * h)?)?;
            let fm1 = field(&chart.shifted(x, a, -h)?)?;
            let fp1 = field(&chart.shifted(x, a, h)?)?;
            let fp2 = field(&chart.shifted(x, a, 2.0 * h)?)?;
            for v in [&fm2, &fm1, &fp1, &fp2] {
                check_len(v)?;
            }
            for c in 0..m {
                d1[a * m + c] = (fm2[c] - 8.0 * fm1[c] + 8.0 * fp1[c] - fp2[c]) / (12.0 * h);
            }
            if let Some(d2) = d2.as_mut() {
                for c in 0..m {
                    d2[(a * n + a) * m + c] =
                        (-fm2[c] + 16.0 * fm1[c] - 30.0 * f0[c] + 16.0 * fp1[c] - fp2[c])
                            / (12.0 * h * h);
                }
            }
        }
    }

    if let Some(d2) = d2.as_mut() {
        for a in 0..n {
            for b in (a + 1)..n {
                let mut acc = vec![0.0; m];
                if order == 2 {
                    for (sa, sb, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                        let y = chart.shifted(&chart.shifted(x, a, sa * h)?, b, sb * h)?;
                        let f = field(&y)?;
                        check_len(&f)?;
                        for c in 0..m {
                            acc[c] += w * f[c];
                        }
                    }
                    acc.iter_mut().for_each(|v| *v /= 4.0 * h * h);
                } else {
                    for &(oa, wa) in &C4 {
                        for &(ob, wb) in &C4 {
                            let y = chart.shifted(&chart.shifted(x, a, oa * h)?, b, ob * h)?;
                            let f = field(&y)?;
                            check_len(&f)?;
                            for c in 0..m {
                                acc[c] += wa * wb * f[c];
                            }
                        }
                    }
                    acc.iter_mut().for_each(|v| *v /= 144.0 * h * h);
                }
                for c in 0..m {
                    d2[(a * n + b) * m + c] = acc[c];
                    d2[(b * n + a) * m + c] = acc[c];
                }
            }
        }
    }

    Ok(Jet { n, m, value: f0.to_vec(), d1, d2 })
}
