//! Pointwise multilinear algebra for curvature-type tensors.
//!
//! All tensors carry lowered indices and dense row-major storage. Contractions
//! against a general metric go through an orthonormal [`Frame`] obtained from a
//! Cholesky factorization, so the norm identities only ever have to be written
//! for the identity metric.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Relative tolerance used when validating symmetries of caller-supplied data.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expected {expected} entries, found {found}")]
    BadLength { expected: usize, found: usize },
    #[error("dimension {0} is too small (need n >= {1})")]
    DimensionTooSmall(usize, usize),
    #[error("matrix is not symmetric (residual {0:e})")]
    NotSymmetric(f64),
    #[error("metric is not positive definite")]
    NotPositiveDefinite,
    #[error("tensor violates curvature symmetries (residual {0:e})")]
    SymmetryViolation(f64),
    #[error("tensor is not trace-free (trace {0:e})")]
    NotTraceFree(f64),
}

pub type Result<T> = std::result::Result<T, TensorError>;

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(TensorError::DimensionMismatch { expected, found })
    }
}

fn max_abs(data: &[f64]) -> f64 {
    data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

#[inline]
pub(crate) fn idx4(n: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * n + j) * n + k) * n + l
}

// ---------------------------------------------------------------------------
// Symmetric and skew 2-tensors
// ---------------------------------------------------------------------------

/// Symmetric covariant 2-tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Sym2 {
    n: usize,
    data: Vec<f64>,
}

impl Sym2 {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        Self::from_fn(n, |i, j| if i == j { c } else { 0.0 })
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Self::from_fn(diag.len(), |i, j| if i == j { diag[i] } else { 0.0 })
    }

    /// Builds the symmetric part of `f`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = f(i, i);
            for j in (i + 1)..n {
                let v = 0.5 * (f(i, j) + f(j, i));
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    /// Accepts row-major entries that are symmetric up to [`SYMMETRY_TOL`]
    /// (relative), then symmetrizes exactly.
    pub fn from_rows(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(TensorError::BadLength { expected: n * n, found: data.len() });
        }
        let scale = max_abs(&data).max(1.0);
        let mut residual = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                residual = residual.max((data[i * n + j] - data[j * n + i]).abs());
            }
        }
        if residual > SYMMETRY_TOL * scale {
            return Err(TensorError::NotSymmetric(residual));
        }
        Ok(Self::from_fn(n, |i, j| data[i * n + j]))
    }

    pub(crate) fn from_vec_unchecked(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `g^{ij} S_{ij}`.
    pub fn trace_with(&self, g: &Sym2) -> Result<f64> {
        check_dim(self.n, g.n)?;
        let inv = Frame::new(g)?.inverse_metric().clone();
        Ok(inv.dot(self))
    }

    /// `S - (tr S / n) I`.
    pub fn trace_free(&self) -> Sym2 {
        let t = self.trace() / self.n as f64;
        Self::from_fn(self.n, |i, j| self.get(i, j) - if i == j { t } else { 0.0 })
    }

    /// `S - (tr_g S / n) g`.
    pub fn trace_free_with(&self, g: &Sym2) -> Result<Sym2> {
        let t = self.trace_with(g)? / self.n as f64;
        Ok(self - &(g * t))
    }

    /// Entrywise inner product.
    pub fn dot(&self, other: &Sym2) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.dot(self)
    }

    /// Metric squared norm `g^{ik} g^{jl} S_ij S_kl`.
    pub fn norm_sq(&self, g: &Sym2) -> Result<f64> {
        check_dim(self.n, g.n)?;
        let frame = Frame::new(g)?;
        Ok(frame.sym2_to_frame(self).frobenius_sq())
    }

    /// `(S^2)_{ik} = S_ip S_kp`.
    pub fn square(&self) -> Sym2 {
        let n = self.n;
        Self::from_fn(n, |i, k| (0..n).map(|p| self.get(i, p) * self.get(k, p)).sum())
    }

    /// `tr(S^3)` for the identity metric.
    pub fn cubic_trace(&self) -> f64 {
        self.square().dot(self)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_row_slice(self.n, self.n, &self.data);
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn max_abs_entry(&self) -> f64 {
        max_abs(&self.data)
    }

    /// Gaussian symmetric matrix (GOE scaling: off-diagonal variance 1/2).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Sym2 {
        let raw: Vec<f64> = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
        Self::from_fn(n, |i, j| raw[i * n + j])
    }
}

/// Skew-symmetric covariant 2-tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Skew2 {
    n: usize,
    data: Vec<f64>,
}

impl Skew2 {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    /// Builds the antisymmetric part of `f`.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (f(i, j) - f(j, i));
                data[i * n + j] = v;
                data[j * n + i] = -v;
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn dot(&self, other: &Skew2) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Skew2 {
        let raw: Vec<f64> = (0..n * n).map(|_| rng.sample(StandardNormal)).collect();
        Self::from_fn(n, |i, j| raw[i * n + j])
    }
}

// ---------------------------------------------------------------------------
// Algebraic curvature tensors
// ---------------------------------------------------------------------------

/// Rank-4 covariant tensor with the symmetries of a Riemann tensor:
/// `T_ijkl = T_klij = -T_jikl = -T_ijlk` and the first Bianchi identity.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgCurv4 {
    n: usize,
    data: Vec<f64>,
}

impl AlgCurv4 {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n * n * n] }
    }

    /// Projects arbitrary rank-4 data onto the algebraic curvature tensors:
    /// average over the pair/antisymmetry group, then remove the cyclic
    /// (totally antisymmetric) part.
    pub fn project(n: usize, raw: &[f64]) -> Result<Self> {
        let len = n * n * n * n;
        if raw.len() != len {
            return Err(TensorError::BadLength { expected: len, found: raw.len() });
        }
        let mut sym = vec![0.0; len];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = |a, b, c, d| raw[idx4(n, a, b, c, d)];
                        sym[idx4(n, i, j, k, l)] = (r(i, j, k, l) - r(j, i, k, l) - r(i, j, l, k)
                            + r(j, i, l, k)
                            + r(k, l, i, j)
                            - r(l, k, i, j)
                            - r(k, l, j, i)
                            + r(l, k, j, i))
                            / 8.0;
                    }
                }
            }
        }
        let mut data = vec![0.0; len];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let s = |a, b, c, d| sym[idx4(n, a, b, c, d)];
                        let cyc = s(i, j, k, l) + s(i, l, j, k) + s(i, k, l, j);
                        data[idx4(n, i, j, k, l)] = s(i, j, k, l) - cyc / 3.0;
                    }
                }
            }
        }
        Ok(Self { n, data })
    }

    /// Accepts data satisfying the curvature symmetries up to
    /// [`SYMMETRY_TOL`] (relative to the largest entry) and re-projects it.
    pub fn try_new(n: usize, data: Vec<f64>) -> Result<Self> {
        let len = n * n * n * n;
        if data.len() != len {
            return Err(TensorError::BadLength { expected: len, found: data.len() });
        }
        let residual = raw_symmetry_residual(n, &data);
        if residual > SYMMETRY_TOL * max_abs(&data).max(1.0) {
            return Err(TensorError::SymmetryViolation(residual));
        }
        Self::project(n, &data)
    }

    pub(crate) fn from_vec_unchecked(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n * n * n);
        Self { n, data }
    }

    /// Gaussian entries projected onto the curvature subspace.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let raw: Vec<f64> = (0..n * n * n * n).map(|_| rng.sample(StandardNormal)).collect();
        Self::project(n, &raw).expect("length matches by construction")
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[idx4(self.n, i, j, k, l)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn max_abs_entry(&self) -> f64 {
        max_abs(&self.data)
    }

    /// Largest violation of the pair symmetry and the two antisymmetries.
    pub fn symmetry_residual(&self) -> f64 {
        pair_residual(self.n, &self.data)
    }

    /// Largest first-Bianchi cyclic sum.
    pub fn bianchi_residual(&self) -> f64 {
        bianchi_residual(self.n, &self.data)
    }

    pub fn dot(&self, other: &AlgCurv4) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.dot(self)
    }

    /// `|T|^2 = g^{im} g^{jn} g^{ks} g^{lt} T_ijkl T_mnst`.
    pub fn norm_sq(&self, g: &Sym2) -> Result<f64> {
        check_dim(self.n, g.n)?;
        Ok(Frame::new(g)?.to_frame(&self.data, 4).iter().map(|v| v * v).sum())
    }

    /// Metric inner product `<T, S>_g`.
    pub fn inner(&self, other: &AlgCurv4, g: &Sym2) -> Result<f64> {
        check_dim(self.n, other.n)?;
        check_dim(self.n, g.n)?;
        let frame = Frame::new(g)?;
        let a = frame.to_frame(&self.data, 4);
        let b = frame.to_frame(&other.data, 4);
        Ok(a.iter().zip(&b).map(|(x, y)| x * y).sum())
    }

    /// Ricci-type contraction `g^{ik} T_ijkl`, indexed `(j, l)`.
    pub fn ricci_contraction(&self, g_inv: &Sym2) -> Result<Sym2> {
        check_dim(self.n, g_inv.n)?;
        let n = self.n;
        Ok(Sym2::from_fn(n, |j, l| {
            let mut s = 0.0;
            for i in 0..n {
                for k in 0..n {
                    s += g_inv.get(i, k) * self.get(i, j, k, l);
                }
            }
            s
        }))
    }
}

/// Max violation of `T_ijkl = T_klij = -T_jikl = -T_ijlk` on raw data.
pub fn pair_residual(n: usize, data: &[f64]) -> f64 {
    let mut r = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let t = data[idx4(n, i, j, k, l)];
                    r = r
                        .max((t - data[idx4(n, k, l, i, j)]).abs())
                        .max((t + data[idx4(n, j, i, k, l)]).abs())
                        .max((t + data[idx4(n, i, j, l, k)]).abs());
                }
            }
        }
    }
    r
}

/// Max first-Bianchi cyclic sum on raw data.
pub fn bianchi_residual(n: usize, data: &[f64]) -> f64 {
    let mut r = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let c = data[idx4(n, i, j, k, l)]
                        + data[idx4(n, i, l, j, k)]
                        + data[idx4(n, i, k, l, j)];
                    r = r.max(c.abs());
                }
            }
        }
    }
    r
}

/// Combined symmetry residual of raw rank-4 data.
pub fn raw_symmetry_residual(n: usize, data: &[f64]) -> f64 {
    pair_residual(n, data).max(bianchi_residual(n, data))
}

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

macro_rules! impl_linear_ops {
    ($ty:ident) => {
        impl Add for &$ty {
            type Output = $ty;
            fn add(self, rhs: &$ty) -> $ty {
                assert_eq!(self.n, rhs.n, "dimension mismatch");
                $ty {
                    n: self.n,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
                }
            }
        }
        impl Add for $ty {
            type Output = $ty;
            fn add(self, rhs: $ty) -> $ty {
                &self + &rhs
            }
        }
        impl Sub for &$ty {
            type Output = $ty;
            fn sub(self, rhs: &$ty) -> $ty {
                assert_eq!(self.n, rhs.n, "dimension mismatch");
                $ty {
                    n: self.n,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
                }
            }
        }
        impl Sub for $ty {
            type Output = $ty;
            fn sub(self, rhs: $ty) -> $ty {
                &self - &rhs
            }
        }
        impl Mul<f64> for &$ty {
            type Output = $ty;
            fn mul(self, c: f64) -> $ty {
                $ty { n: self.n, data: self.data.iter().map(|a| a * c).collect() }
            }
        }
        impl Mul<f64> for $ty {
            type Output = $ty;
            fn mul(mut self, c: f64) -> $ty {
                self.data.iter_mut().for_each(|a| *a *= c);
                self
            }
        }
        impl Neg for $ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                self * -1.0
            }
        }
    };
}

impl_linear_ops!(Sym2);
impl_linear_ops!(Skew2);
impl_linear_ops!(AlgCurv4);

// ---------------------------------------------------------------------------
// Orthonormal frames
// ---------------------------------------------------------------------------

/// A `g`-orthonormal frame `e_a = E_{ia} ∂_i`, from `g = L L^T`, `E = L^{-T}`.
#[derive(Debug, Clone)]
pub struct Frame {
    n: usize,
    /// `E_{ia}` row-major; maps coordinate to frame components.
    to_frame: Vec<f64>,
    /// `F_{ai} = L_{ia}`; maps frame to coordinate components.
    from_frame: Vec<f64>,
    diagonal: bool,
    inverse: Sym2,
    sqrt_det: f64,
}

impl Frame {
    pub fn new(g: &Sym2) -> Result<Self> {
        let n = g.n;
        let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || g.get(i, j) == 0.0));
        if diagonal {
            let mut to_frame = vec![0.0; n * n];
            let mut from_frame = vec![0.0; n * n];
            let mut sqrt_det = 1.0;
            for i in 0..n {
                let d = g.get(i, i);
                if !(d > 0.0) || !d.is_finite() {
                    return Err(TensorError::NotPositiveDefinite);
                }
                let s = d.sqrt();
                to_frame[i * n + i] = 1.0 / s;
                from_frame[i * n + i] = s;
                sqrt_det *= s;
            }
            let inverse = Sym2::from_fn(n, |i, j| if i == j { 1.0 / g.get(i, i) } else { 0.0 });
            return Ok(Self { n, to_frame, from_frame, diagonal, inverse, sqrt_det });
        }
        let m = DMatrix::from_row_slice(n, n, &g.data);
        let chol = m.cholesky().ok_or(TensorError::NotPositiveDefinite)?;
        let l = chol.l();
        let sqrt_det = (0..n).map(|i| l[(i, i)]).product::<f64>();
        if !(sqrt_det > 0.0) || !sqrt_det.is_finite() {
            return Err(TensorError::NotPositiveDefinite);
        }
        let l_inv = l.clone().try_inverse().ok_or(TensorError::NotPositiveDefinite)?;
        // E = L^{-T}: E_{ia} = (L^{-1})_{ai}
        let mut to_frame = vec![0.0; n * n];
        let mut from_frame = vec![0.0; n * n];
        for i in 0..n {
            for a in 0..n {
                to_frame[i * n + a] = l_inv[(a, i)];
                from_frame[a * n + i] = l[(i, a)];
            }
        }
        let inv = chol.inverse();
        let inverse = Sym2::from_fn(n, |i, j| inv[(i, j)]);
        Ok(Self { n, to_frame, from_frame, diagonal, inverse, sqrt_det })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn inverse_metric(&self) -> &Sym2 {
        &self.inverse
    }

    /// `sqrt(det g)`, the Riemannian volume density.
    pub fn sqrt_det(&self) -> f64 {
        self.sqrt_det
    }

    /// Frame components of a rank-`rank` covariant tensor.
    pub fn to_frame(&self, data: &[f64], rank: usize) -> Vec<f64> {
        self.transform(data, rank, &self.to_frame)
    }

    /// Coordinate components of a rank-`rank` tensor given in the frame.
    pub fn from_frame(&self, data: &[f64], rank: usize) -> Vec<f64> {
        // from_frame is indexed (a, i); transform expects (old, new).
        self.transform(data, rank, &self.from_frame)
    }

    pub fn sym2_to_frame(&self, s: &Sym2) -> Sym2 {
        Sym2::from_vec_unchecked(self.n, self.to_frame(&s.data, 2))
    }

    pub fn curv_to_frame(&self, t: &AlgCurv4) -> AlgCurv4 {
        AlgCurv4::from_vec_unchecked(self.n, self.to_frame(&t.data, 4))
    }

    pub fn curv_from_frame(&self, t: &AlgCurv4) -> AlgCurv4 {
        AlgCurv4::from_vec_unchecked(self.n, self.from_frame(&t.data, 4))
    }

    /// `out_{b1..br} = sum M_{a1 b1} ... M_{ar br} T_{a1..ar}`, one slot at a time.
    fn transform(&self, data: &[f64], rank: usize, m: &[f64]) -> Vec<f64> {
        let n = self.n;
        debug_assert_eq!(data.len(), n.pow(rank as u32));
        if self.diagonal {
            let d: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
            // weight of each flat index, built one slot at a time
            let mut w = vec![1.0];
            for _ in 0..rank {
                w = w.iter().flat_map(|a| d.iter().map(move |b| a * b)).collect();
            }
            return data.iter().zip(&w).map(|(x, f)| x * f).collect();
        }
        let mut cur = data.to_vec();
        let mut next = vec![0.0; cur.len()];
        for slot in 0..rank {
            // stride of this slot in row-major layout
            let stride = n.pow((rank - 1 - slot) as u32);
            next.iter_mut().for_each(|v| *v = 0.0);
            for (flat, out) in next.iter_mut().enumerate() {
                let b = (flat / stride) % n;
                let base = flat - b * stride;
                let mut s = 0.0;
                for a in 0..n {
                    s += m[a * n + b] * cur[base + a * stride];
                }
                *out = s;
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur
    }
}

// ---------------------------------------------------------------------------
// Kulkarni–Nomizu product and the orthogonal decomposition
// ---------------------------------------------------------------------------

/// `(A ∧ B)_ijkl = A_ik B_jl - A_il B_jk + A_jl B_ik - A_jk B_il`.
pub fn kulkarni_nomizu(a: &Sym2, b: &Sym2) -> Result<AlgCurv4> {
    check_dim(a.n, b.n)?;
    let n = a.n;
    let (a, b) = (&a.data, &b.data);
    let mut data = Vec::with_capacity(n * n * n * n);
    for i in 0..n {
        for j in 0..n {
            let (ai, aj, bi, bj) = (&a[i * n..][..n], &a[j * n..][..n], &b[i * n..][..n], &b[j * n..][..n]);
            for k in 0..n {
                for l in 0..n {
                    data.push(ai[k] * bj[l] - ai[l] * bj[k] + aj[l] * bi[k] - aj[k] * bi[l]);
                }
            }
        }
    }
    Ok(AlgCurv4::from_vec_unchecked(n, data))
}

/// The pieces of `Rm = W + V + U`, all in coordinate components.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub weyl: AlgCurv4,
    /// `V = (Ric0 ∧ g) / (n - 2)`.
    pub ricci_part: AlgCurv4,
    /// `U = R / (2n(n-1)) g ∧ g`.
    pub scalar_part: AlgCurv4,
    pub ricci: Sym2,
    pub scalar: f64,
    pub ricci0: Sym2,
    /// Trace-free Riemann tensor `Rm - U`.
    pub rm0: AlgCurv4,
}

/// Orthogonal decomposition of `rm` with respect to `g`.
pub fn decompose(rm: &AlgCurv4, g: &Sym2) -> Result<Decomposition> {
    check_dim(rm.n, g.n)?;
    let n = rm.n;
    if n < 3 {
        return Err(TensorError::DimensionTooSmall(n, 3));
    }
    let residual = rm.symmetry_residual().max(rm.bianchi_residual());
    if residual > SYMMETRY_TOL * rm.max_abs_entry().max(1.0) {
        return Err(TensorError::SymmetryViolation(residual));
    }
    let frame = Frame::new(g)?;
    let ricci = rm.ricci_contraction(frame.inverse_metric())?;
    let scalar = frame.inverse_metric().dot(&ricci);
    let ricci0 = &ricci - &(g * (scalar / n as f64));
    let nf = n as f64;
    let ricci_part = kulkarni_nomizu(&ricci0, g)? * (1.0 / (nf - 2.0));
    let scalar_part = kulkarni_nomizu(g, g)? * (scalar / (2.0 * nf * (nf - 1.0)));
    let rm0 = rm - &scalar_part;
    let weyl = &rm0 - &ricci_part;
    Ok(Decomposition { weyl, ricci_part, scalar_part, ricci, scalar, ricci0, rm0 })
}

/// `(T ω)_kl = T_ijkl ω_ij`.
pub fn apply_lambda2(t: &AlgCurv4, omega: &Skew2) -> Result<Skew2> {
    check_dim(t.n, omega.n)?;
    let n = t.n;
    let mut data = vec![0.0; n * n];
    for k in 0..n {
        for l in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += t.get(i, j, k, l) * omega.get(i, j);
                }
            }
            data[k * n + l] = s;
        }
    }
    Ok(Skew2 { n, data })
}

/// `(T θ)_kl = T_kilj θ_ij`.
pub fn apply_otimes2(t: &AlgCurv4, theta: &Sym2) -> Result<Sym2> {
    check_dim(t.n, theta.n)?;
    let n = t.n;
    let mut data = vec![0.0; n * n];
    for k in 0..n {
        for l in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += t.get(k, i, l, j) * theta.get(i, j);
                }
            }
            data[k * n + l] = s;
        }
    }
    Ok(Sym2::from_vec_unchecked(n, data))
}

/// `Ric0 ∧ Ric0 = T + V' + U'` with `T` totally trace-free.
#[derive(Debug, Clone)]
pub struct KnSquareParts {
    pub product: AlgCurv4,
    pub trace_free: AlgCurv4,
    pub ricci_part: AlgCurv4,
    pub scalar_part: AlgCurv4,
}

/// Splits `Ric0 ∧ Ric0` (identity metric) into its Weyl-type, Ricci-type and
/// scalar-type components. `ric0` must be trace-free to 1e-12 relative.
pub fn kn_square_decompose(ric0: &Sym2) -> Result<KnSquareParts> {
    let n = ric0.n;
    if n < 3 {
        return Err(TensorError::DimensionTooSmall(n, 3));
    }
    let trace = ric0.trace();
    if trace.abs() > 1e-12 * ric0.frobenius_sq().sqrt().max(f64::MIN_POSITIVE) && trace != 0.0 {
        return Err(TensorError::NotTraceFree(trace));
    }
    let nf = n as f64;
    let g = Sym2::identity(n);
    let norm_sq = ric0.frobenius_sq();
    let gg = kulkarni_nomizu(&g, &g)?;
    let product = kulkarni_nomizu(ric0, ric0)?;
    let ricci_part = kulkarni_nomizu(&ric0.square(), &g)? * (-2.0 / (nf - 2.0))
        + &gg * (2.0 * norm_sq / (nf * (nf - 2.0)));
    let scalar_part = gg * (-norm_sq / (nf * (nf - 1.0)));
    let trace_free = &(&product - &ricci_part) - &scalar_part;
    Ok(KnSquareParts { product, trace_free, ricci_part, scalar_part })
}
