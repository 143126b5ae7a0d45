//! Covariant derivatives of covariant tensors from coordinate jets.
//!
//! Tensors are flat row-major arrays of `n^rank` entries; a derivative index
//! is always prepended. Christoffel symbols use `gamma[(m*n + a)*n + i] = Γ^m_{ai}`
//! and their derivatives `dgamma[((b*n + m)*n + a)*n + i] = ∂_b Γ^m_{ai}`.

/// `(∇T)_{a,I} = ∂_a T_I - Σ_s Γ^m_{a i_s} T_{I[s→m]}`.
pub fn cov(n: usize, rank: usize, t: &[f64], dt: &[f64], gamma: &[f64]) -> Vec<f64> {
    let size = n.pow(rank as u32);
    debug_assert_eq!(t.len(), size);
    debug_assert_eq!(dt.len(), n * size);
    let mut out = dt.to_vec();
    for a in 0..n {
        for idx in 0..size {
            let mut corr = 0.0;
            for s in 0..rank {
                let stride = n.pow((rank - 1 - s) as u32);
                let digit = (idx / stride) % n;
                let base = idx - digit * stride;
                for m in 0..n {
                    corr += gamma[(m * n + a) * n + digit] * t[base + m * stride];
                }
            }
            out[a * size + idx] -= corr;
        }
    }
    out
}

/// `∂_b (∇T)_{a,I}` laid out as `(b, a, I)`, from the 2-jet of `T` and the
/// 1-jet of the connection.
pub fn partial_of_cov(
    n: usize,
    rank: usize,
    t: &[f64],
    dt: &[f64],
    d2t: &[f64],
    gamma: &[f64],
    dgamma: &[f64],
) -> Vec<f64> {
    let size = n.pow(rank as u32);
    debug_assert_eq!(d2t.len(), n * n * size);
    let mut out = d2t.to_vec();
    for b in 0..n {
        for a in 0..n {
            for idx in 0..size {
                let mut corr = 0.0;
                for s in 0..rank {
                    let stride = n.pow((rank - 1 - s) as u32);
                    let digit = (idx / stride) % n;
                    let base = idx - digit * stride;
                    for m in 0..n {
                        let j = base + m * stride;
                        corr += dgamma[((b * n + m) * n + a) * n + digit] * t[j]
                            + gamma[(m * n + a) * n + digit] * dt[b * size + j];
                    }
                }
                out[(b * n + a) * size + idx] -= corr;
            }
        }
    }
    out
}

/// `(∇∇T)_{b,a,I} = ∇_b ∇_a T_I` at a point.
pub fn second_cov(
    n: usize,
    rank: usize,
    t: &[f64],
    dt: &[f64],
    d2t: &[f64],
    gamma: &[f64],
    dgamma: &[f64],
) -> Vec<f64> {
    let s = cov(n, rank, t, dt, gamma);
    let ds = partial_of_cov(n, rank, t, dt, d2t, gamma, dgamma);
    cov(n, rank + 1, &s, &ds, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_partials_without_connection() {
        let n = 3;
        let t: Vec<f64> = (0..9).map(|v| v as f64).collect();
        let dt: Vec<f64> = (0..27).map(|v| (v as f64).sin()).collect();
        let gamma = vec![0.0; 27];
        assert_eq!(cov(n, 2, &t, &dt, &gamma), dt);
    }

    #[test]
    fn covector_correction_matches_hand_formula() {
        let n = 2;
        let t = vec![1.0, 2.0];
        let dt = vec![0.0; 4];
        let mut gamma = vec![0.0; 8];
        // Γ^1_{0 0} = 3
        gamma[(1 * n + 0) * n + 0] = 3.0;
        let out = cov(n, 1, &t, &dt, &gamma);
        // (∇T)_{0,0} = -Γ^m_{00} T_m = -3 * 2
        assert_eq!(out[0], -6.0);
        assert_eq!(out[1], 0.0);
    }
}
