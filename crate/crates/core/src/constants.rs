//! Pinching constants and thresholds, with their dimension and exponent
//! domains enforced.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstantError {
    #[error("{name} is defined for {requirement}, got n = {n}")]
    Dimension { name: &'static str, n: usize, requirement: &'static str },
    #[error("exponent p = {p} is below n/2 = {min} (n = {n})")]
    ExponentBelowCritical { n: usize, p: f64, min: f64 },
    #[error("exponent p = {0} is not finite")]
    ExponentNotFinite(f64),
    #[error("branch {branch} of epsilon does not apply at n = {n}, p = {p}: it requires {condition}")]
    BranchDomain { branch: EpsilonBranch, n: usize, p: f64, condition: &'static str },
}

pub type Result<T> = std::result::Result<T, ConstantError>;

/// Sign of the scalar curvature, which selects the constant `A(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarSign {
    NonNeg,
    Neg,
}

impl fmt::Display for ScalarSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NonNeg => "nonneg",
            Self::Neg => "neg",
        })
    }
}

impl std::str::FromStr for ScalarSign {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "nonneg" | "positive" | "+" => Ok(Self::NonNeg),
            "neg" | "negative" | "-" => Ok(Self::Neg),
            _ => Err(format!("unknown sign '{s}' (expected nonneg or neg)")),
        }
    }
}

/// The three displayed cases of the integral pinching threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonBranch {
    /// `n ∈ {4, 5}` and `p = n/2`.
    Critical,
    /// `n ∈ {4, 5}` and `n/2 < p < 2n/(n-2)`.
    Intermediate,
    /// `n ≥ 6`, or `n ∈ {4, 5}` and `p ≥ 2n/(n-2)`.
    Large,
}

impl fmt::Display for EpsilonBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Critical => "critical",
            Self::Intermediate => "intermediate",
            Self::Large => "large",
        })
    }
}

impl std::str::FromStr for EpsilonBranch {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "critical" | "1" => Ok(Self::Critical),
            "intermediate" | "2" => Ok(Self::Intermediate),
            "large" | "3" => Ok(Self::Large),
            _ => Err(format!("unknown branch '{s}' (expected critical, intermediate or large)")),
        }
    }
}

fn need(name: &'static str, n: usize, ok: bool, requirement: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(ConstantError::Dimension { name, n, requirement })
    }
}

/// Coefficient of `|R̊m|^3` in the Laplacian estimate for `R̊m`:
/// `4(n²-2)/(n√(n²-1)) + (n²-n-4)/√((n-2)n(n²-1)) + √((n-2)(n-1)/n)`.
pub fn c_cubic(n: usize) -> Result<f64> {
    need("C", n, n >= 3, "n >= 3")?;
    let nf = n as f64;
    let n2 = nf * nf;
    Ok(4.0 * (n2 - 2.0) / (nf * (n2 - 1.0).sqrt())
        + (n2 - nf - 4.0) / ((nf - 2.0) * nf * (n2 - 1.0)).sqrt()
        + ((nf - 2.0) * (nf - 1.0) / nf).sqrt())
}

/// Coefficient of `R |R̊m|²`: `1/(n-1)` when `R ≥ 0`, `2/n` when `R < 0`.
pub fn a_const(n: usize, sign: ScalarSign) -> Result<f64> {
    need("A", n, n >= 3, "n >= 3")?;
    let nf = n as f64;
    Ok(match sign {
        ScalarSign::NonNeg => 1.0 / (nf - 1.0),
        ScalarSign::Neg => 2.0 / nf,
    })
}

/// `E(n) = C(n) + √((n-2)³/(2(n-1)))`.
pub fn e_const(n: usize) -> Result<f64> {
    let c = c_cubic(n)?;
    let nf = n as f64;
    Ok(c + ((nf - 2.0).powi(3) / (2.0 * (nf - 1.0))).sqrt())
}

/// Shared denominator `C(n) + (n-2)√((n-2)/(2(n-1)))`.
fn epsilon_core(n: usize) -> Result<f64> {
    let nf = n as f64;
    Ok(c_cubic(n)? + (nf - 2.0) * ((nf - 2.0) / (2.0 * (nf - 1.0))).sqrt())
}

fn check_exponent(n: usize, p: f64) -> Result<()> {
    need("epsilon", n, n >= 4, "n >= 4")?;
    if !p.is_finite() {
        return Err(ConstantError::ExponentNotFinite(p));
    }
    let min = n as f64 / 2.0;
    if p < min {
        return Err(ConstantError::ExponentBelowCritical { n, p, min });
    }
    Ok(())
}

/// Upper end `2n/(n-2)` of the intermediate range.
pub fn epsilon_upper_exponent(n: usize) -> f64 {
    2.0 * n as f64 / (n as f64 - 2.0)
}

/// Branch that applies at `(n, p)`.
pub fn epsilon_branch(n: usize, p: f64) -> Result<EpsilonBranch> {
    check_exponent(n, p)?;
    let nf = n as f64;
    Ok(if n >= 6 || p >= epsilon_upper_exponent(n) {
        EpsilonBranch::Large
    } else if p == nf / 2.0 {
        EpsilonBranch::Critical
    } else {
        EpsilonBranch::Intermediate
    })
}

/// Threshold constant of the integral pinching condition at `(n, p)`.
pub fn epsilon_auto(n: usize, p: f64) -> Result<f64> {
    let b = epsilon_branch(n, p)?;
    epsilon_with_branch(n, p, b)
}

/// Evaluates the requested branch formula, refusing when `(n, p)` is outside
/// that branch's stated domain.
pub fn epsilon_with_branch(n: usize, p: f64, branch: EpsilonBranch) -> Result<f64> {
    check_exponent(n, p)?;
    let nf = n as f64;
    let low_dim = n == 4 || n == 5;
    let upper = epsilon_upper_exponent(n);
    let fail = |condition| Err(ConstantError::BranchDomain { branch, n, p, condition });
    let core = epsilon_core(n)?;
    match branch {
        EpsilonBranch::Critical => {
            if !(low_dim && p == nf / 2.0) {
                return fail("n in {4, 5} and p = n/2");
            }
            Ok((nf - 2.0) / (4.0 * (nf - 1.0) * core))
        }
        EpsilonBranch::Intermediate => {
            if !(low_dim && p > nf / 2.0 && p < upper) {
                return fail("n in {4, 5} and n/2 < p < 2n/(n-2)");
            }
            let base = (nf - 2.0) * (2.0 * p - nf) / (nf * (6.0 - nf));
            let lead = base.powf(nf / (2.0 * p));
            Ok(lead * (6.0 - nf) * p / (2.0 * (nf - 1.0) * (2.0 * p - nf) * core))
        }
        EpsilonBranch::Large => {
            if !(n >= 6 || (low_dim && p >= upper)) {
                return fail("n >= 6, or n in {4, 5} and p >= 2n/(n-2)");
            }
            Ok(1.0 / ((nf - 1.0) * core))
        }
    }
}

/// Differences between the intermediate formula near each end of its range
/// and the neighbouring branch, for `n ∈ {4, 5}`: `(left, right)`.
pub fn epsilon_branch_jumps(n: usize) -> Result<(f64, f64)> {
    need("epsilon branch audit", n, n == 4 || n == 5, "n in {4, 5}")?;
    let nf = n as f64;
    let upper = epsilon_upper_exponent(n);
    let d = 1e-9;
    let left = epsilon_with_branch(n, nf / 2.0 + d, EpsilonBranch::Intermediate)?
        - epsilon_with_branch(n, nf / 2.0, EpsilonBranch::Critical)?;
    let right = epsilon_with_branch(n, upper - d, EpsilonBranch::Intermediate)?
        - epsilon_with_branch(n, upper, EpsilonBranch::Large)?;
    Ok((left, right))
}

/// Threshold constant for the Weyl-plus-Ricci `L^{n/2}` condition.
pub fn c1_einstein(n: usize) -> Result<f64> {
    need("C1", n, n >= 4, "n >= 4")?;
    let nf = n as f64;
    Ok(if n <= 5 {
        ((nf - 2.0) / (32.0 * (nf - 1.0))).sqrt()
    } else {
        1.0 / (2.0 * (nf - 2.0) * (nf - 1.0)).sqrt()
    })
}

/// Constant of the weakened sphere criterion.
pub fn c2_sphere(n: usize) -> Result<f64> {
    need("C2", n, n >= 4, "n >= 4")?;
    let nf = n as f64;
    Ok(match n {
        4 => 6f64.sqrt() / 2.0,
        5 => 8.0 * 10f64.sqrt() / 15.0,
        _ => {
            let n2 = nf * nf;
            4.0 * (n2 - 2.0) / (nf * (n2 - 1.0).sqrt())
                + (n2 - nf - 4.0) / ((nf - 2.0) * (nf - 1.0) * nf * (nf + 1.0)).sqrt()
        }
    })
}

/// Weitzenböck-formula constant, defined for `n ∈ {4, 5}`.
pub fn c3_weitzenbock(n: usize) -> Result<f64> {
    need("C3", n, n == 4 || n == 5, "n in {4, 5}")?;
    Ok(if n == 4 { 6f64.sqrt() / 2.0 } else { 8.0 * 10f64.sqrt() / 15.0 })
}

/// One named constant with its value or the reason it is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedConstant {
    pub name: String,
    pub value: Result<f64>,
}

/// Every constant applicable to `(n, p, sign)`.
pub fn all_constants(n: usize, p: Option<f64>, sign: ScalarSign) -> Vec<NamedConstant> {
    let mut out = vec![
        NamedConstant { name: "C".into(), value: c_cubic(n) },
        NamedConstant { name: "A".into(), value: a_const(n, sign) },
        NamedConstant { name: "E".into(), value: e_const(n) },
        NamedConstant { name: "C1".into(), value: c1_einstein(n) },
        NamedConstant { name: "C2".into(), value: c2_sphere(n) },
        NamedConstant { name: "C3".into(), value: c3_weitzenbock(n) },
    ];
    if let Some(p) = p {
        out.push(NamedConstant { name: "epsilon".into(), value: epsilon_auto(n, p) });
    }
    out
}
