//! Test-side oracles on dense rational coefficient vectors, written without
//! the crate's series engine.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Product truncated after degree `n`.
pub fn mul(a: &[Q], b: &[Q], n: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); n + 1];
    for (i, x) in a.iter().enumerate().take(n + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `(1 + u)^alpha` with `u(0) = 0`, by the generalized binomial series.
pub fn binom_pow(u: &[Q], alpha: &Q, n: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); n + 1];
    out[0] = Q::one();
    let mut upow = vec![Q::zero(); n + 1];
    upow[0] = Q::one();
    let mut coef = Q::one();
    for k in 1..=n {
        upow = mul(&upow, u, n);
        coef = coef * (alpha - Q::from_integer((k - 1).into())) / Q::from_integer(k.into());
        for j in 0..=n {
            out[j] += &coef * &upow[j];
        }
    }
    out
}

/// `c x^k` as a dense vector of length `n + 1`.
pub fn mono(c: Q, k: usize, n: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n + 1];
    if k <= n {
        v[k] = c;
    }
    v
}

pub fn add(a: &[Q], b: &[Q]) -> Vec<Q> {
    (0..a.len().max(b.len()))
        .map(|j| a.get(j).cloned().unwrap_or_else(Q::zero) + b.get(j).cloned().unwrap_or_else(Q::zero))
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}
