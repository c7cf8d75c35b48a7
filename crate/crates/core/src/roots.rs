//! Roots of univariate polynomials over Q(i) or C.
//!
//! Exact inputs get an exact square-free decomposition first, so every
//! numerically located root is simple and its multiplicity is known
//! exactly. Roots that are Gaussian rationals are then recovered exactly
//! and verified by exact evaluation. Float inputs fall back to clustering.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::scalar::{exact_from_c64, Scalar};

/// Dense univariate polynomial, coefficients from low to high degree.
pub type UPoly = Vec<Scalar>;

#[derive(Clone, Debug, PartialEq)]
pub struct Root {
    pub value: Scalar,
    pub multiplicity: usize,
}

fn is_exact(p: &[Scalar]) -> bool {
    p.iter().all(Scalar::is_exact)
}

/// Drop trailing zero coefficients (exact zeros or float below `tol` relative).
pub fn trim(mut p: UPoly) -> UPoly {
    let scale = p.iter().map(Scalar::abs).fold(0.0, f64::max).max(1e-300);
    while let Some(last) = p.last() {
        if last.is_exact_zero() || (!last.is_exact() && last.abs() <= 1e-14 * scale) {
            p.pop();
        } else {
            break;
        }
    }
    p
}

pub fn degree(p: &[Scalar]) -> Option<usize> {
    let t = trim(p.to_vec());
    if t.is_empty() {
        None
    } else {
        Some(t.len() - 1)
    }
}

pub fn eval(p: &[Scalar], x: &Scalar) -> Scalar {
    p.iter().rev().fold(Scalar::zero(), |acc, c| &(&acc * x) + c)
}

pub fn eval_c64(p: &[Scalar], x: Complex64) -> Complex64 {
    p.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c.to_c64())
}

pub fn derivative(p: &[Scalar]) -> UPoly {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * &Scalar::int(k as i64))
        .collect()
}

/// Quotient and remainder.
pub fn divrem(a: &[Scalar], b: &[Scalar]) -> (UPoly, UPoly) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (vec![], r);
    }
    let lead_inv = b[db].inv().expect("nonzero leading coefficient");
    let mut q = vec![Scalar::zero(); r.len() - db];
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let c = &r[r.len() - 1] * &lead_inv;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &(&c * bj);
        }
        q[k] = c;
        r.pop();
        r = trim(r);
    }
    (q, r)
}

fn monic(p: UPoly) -> UPoly {
    let p = trim(p);
    match p.last().and_then(Scalar::inv) {
        Some(inv) => p.iter().map(|c| c * &inv).collect(),
        None => p,
    }
}

pub fn gcd(a: &[Scalar], b: &[Scalar]) -> UPoly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y);
        x = y;
        y = r;
    }
    monic(x)
}

fn sub(a: &[Scalar], b: &[Scalar]) -> UPoly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|k| {
                let x = a.get(k).cloned().unwrap_or_else(Scalar::zero);
                let y = b.get(k).cloned().unwrap_or_else(Scalar::zero);
                &x - &y
            })
            .collect(),
    )
}

/// Yun's square-free decomposition: `p = lc * prod_i a_i^i`, returned as
/// `(i, a_i)` with `a_i` monic and non-constant. Requires exact coefficients.
pub fn squarefree_decomposition(p: &[Scalar]) -> Vec<(usize, UPoly)> {
    let f = trim(p.to_vec());
    if f.len() <= 1 {
        return vec![];
    }
    let df = derivative(&f);
    let a0 = gcd(&f, &df);
    let mut b = divrem(&f, &a0).0;
    let c = divrem(&df, &a0).0;
    let mut d = sub(&c, &derivative(&b));
    let mut out = Vec::new();
    let mut i = 1;
    while b.len() > 1 {
        let ai = gcd(&b, &d);
        b = divrem(&b, &ai).0;
        let cnext = divrem(&d, &ai).0;
        d = sub(&cnext, &derivative(&b));
        if ai.len() > 1 {
            out.push((i, ai));
        }
        i += 1;
    }
    out
}

/// Eigenvalues of the companion matrix, polished by Newton steps.
fn numeric_roots(p: &[Scalar]) -> Vec<Complex64> {
    let p = trim(p.to_vec());
    let n = p.len().saturating_sub(1);
    if n == 0 {
        return vec![];
    }
    let c: Vec<Complex64> = p.iter().map(Scalar::to_c64).collect();
    let lead = c[n];
    if n == 1 {
        return vec![-c[0] / lead];
    }
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for k in 1..n {
        m[(k, k - 1)] = Complex64::new(1.0, 0.0);
    }
    for k in 0..n {
        m[(k, n - 1)] = -c[k] / lead;
    }
    let eig: Vec<Complex64> = nalgebra::linalg::Schur::try_new(m, f64::EPSILON, 10_000)
        .and_then(|s| s.eigenvalues())
        .map(|v| v.iter().cloned().collect())
        .unwrap_or_else(|| durand_kerner(&c));
    let dp: Vec<Complex64> = (1..=n).map(|k| c[k] * k as f64).collect();
    eig.into_iter()
        .map(|mut x| {
            for _ in 0..8 {
                let fx = c.iter().rev().fold(Complex64::new(0.0, 0.0), |a, ck| a * x + ck);
                let dfx = dp.iter().rev().fold(Complex64::new(0.0, 0.0), |a, ck| a * x + ck);
                if dfx.norm() == 0.0 {
                    break;
                }
                let step = fx / dfx;
                let y = x - step;
                let fy = c.iter().rev().fold(Complex64::new(0.0, 0.0), |a, ck| a * y + ck);
                if !(fy.norm() < fx.norm()) {
                    break;
                }
                x = y;
            }
            x
        })
        .collect()
}

/// Simultaneous iteration, used only if the QR sweep does not converge.
fn durand_kerner(c: &[Complex64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let lead = c[n];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    let radius = 1.0 + monic[..n].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for k in 0..n {
            let fk = monic.iter().rev().fold(Complex64::new(0.0, 0.0), |a, ck| a * z[k] + ck);
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != k {
                    den *= z[k] - z[j];
                }
            }
            let step = fk / den;
            z[k] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * radius {
            break;
        }
    }
    z
}

fn sort_roots(v: &mut [Root]) {
    v.sort_by(|a, b| {
        let (x, y) = (a.value.to_c64(), b.value.to_c64());
        x.re.partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
    });
}

/// All roots with multiplicities, sorted by (re, im).
pub fn roots(p: &[Scalar]) -> Vec<Root> {
    let p = trim(p.to_vec());
    if p.len() <= 1 {
        return vec![];
    }
    let mut out = Vec::new();
    if is_exact(&p) {
        for (mult, factor) in squarefree_decomposition(&p) {
            for x in numeric_roots(&factor) {
                let value = match exact_from_c64(x) {
                    Some(r) if eval(&factor, &r).is_exact_zero() => r,
                    _ => Scalar::Float(x),
                };
                out.push(Root { value, multiplicity: mult });
            }
        }
    } else {
        let xs = numeric_roots(&p);
        let scale = xs.iter().map(|x| x.norm()).fold(1.0, f64::max);
        let mut used = vec![false; xs.len()];
        for k in 0..xs.len() {
            if used[k] {
                continue;
            }
            let mut cluster = vec![xs[k]];
            used[k] = true;
            for j in k + 1..xs.len() {
                if !used[j] && (xs[j] - xs[k]).norm() <= 1e-5 * scale {
                    used[j] = true;
                    cluster.push(xs[j]);
                }
            }
            let mean = cluster.iter().sum::<Complex64>() / cluster.len() as f64;
            out.push(Root { value: Scalar::Float(mean), multiplicity: cluster.len() });
        }
    }
    sort_roots(&mut out);
    out
}
