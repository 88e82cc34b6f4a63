//! Orthonormal shifted Legendre polynomials on `[0,1]` and the integrated
//! (Lobatto) bubbles built from them.

/// Values `phi_0(x) ..= phi_n(x)`.
pub fn values(n: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    values_into(x, &mut out);
    out
}

/// Fills `out[k] = phi_k(x)` for `k < out.len()`.
pub fn values_into(x: f64, out: &mut [f64]) {
    let t = 2.0 * x - 1.0;
    let (mut p_prev, mut p) = (0.0, 1.0);
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = p * ((2 * k + 1) as f64).sqrt();
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * t * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
}

/// Values and first derivatives of `phi_0 ..= phi_n` at `x`.
pub fn values_and_derivatives(n: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let t = 2.0 * x - 1.0;
    let mut p = vec![0.0; n + 1];
    let mut dp = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = t;
        dp[1] = 1.0;
    }
    for k in 1..n {
        let kf = k as f64;
        p[k + 1] = ((2.0 * kf + 1.0) * t * p[k] - kf * p[k - 1]) / (kf + 1.0);
        dp[k + 1] = dp[k - 1] + (2.0 * kf + 1.0) * p[k];
    }
    for k in 0..=n {
        let s = ((2 * k + 1) as f64).sqrt();
        p[k] *= s;
        dp[k] *= 2.0 * s;
    }
    (p, dp)
}

/// `phi_k(0)`.
pub fn at_zero(k: usize) -> f64 {
    let s = ((2 * k + 1) as f64).sqrt();
    if k.is_multiple_of(2) {
        s
    } else {
        -s
    }
}

/// `phi_k(1)`.
pub fn at_one(k: usize) -> f64 {
    ((2 * k + 1) as f64).sqrt()
}

/// Coefficients of `d/dx` of a series: `out[j] = sum_k D[j][k] c[k]`.
/// The result has one fewer coefficient (degree drops by one), at least one.
pub fn differentiate(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    let mut out = vec![0.0; n.saturating_sub(1).max(1)];
    for (k, &ck) in c.iter().enumerate() {
        if ck == 0.0 {
            continue;
        }
        let sk = ((2 * k + 1) as f64).sqrt();
        // phi_k' = sum_{j<k, k-j odd} 2 sqrt(2k+1) sqrt(2j+1) phi_j
        let mut j = k as isize - 1;
        while j >= 0 {
            let ju = j as usize;
            out[ju] += 2.0 * sk * ((2 * ju + 1) as f64).sqrt() * ck;
            j -= 2;
        }
    }
    out
}

/// Coefficients of the Lobatto bubble `l_k(x) = int_0^x phi_{k-1}`, `k >= 2`,
/// as a series of length `k + 1`. These vanish at both endpoints.
pub fn lobatto(k: usize) -> Vec<f64> {
    assert!(k >= 2, "Lobatto bubbles start at k = 2");
    let mut c = vec![0.0; k + 1];
    let a = ((2 * k - 1) as f64).sqrt();
    c[k] = 1.0 / (2.0 * a * ((2 * k + 1) as f64).sqrt());
    c[k - 2] = -1.0 / (2.0 * a * ((2 * k - 3) as f64).sqrt());
    c
}

/// Series of the linear function `1 - x`.
pub fn one_minus_x() -> Vec<f64> {
    vec![0.5, -0.5 / 3f64.sqrt()]
}

/// Series of the linear function `x`.
pub fn x_linear() -> Vec<f64> {
    vec![0.5, 0.5 / 3f64.sqrt()]
}

/// Coefficients of `f(1 - x)` given those of `f(x)`.
pub fn reflect(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .map(|(k, &v)| if k % 2 == 0 { v } else { -v })
        .collect()
}

/// Evaluates a series at `x`.
pub fn eval_series(c: &[f64], x: f64) -> f64 {
    if c.is_empty() {
        return 0.0;
    }
    let v = values(c.len() - 1, x);
    c.iter().zip(&v).map(|(a, b)| a * b).sum()
}
