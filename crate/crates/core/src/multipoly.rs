//! Sparse multivariate polynomials in `(z_1, .., z_{d-1}, w)`.
//!
//! Terms live in a map keyed by exponent vectors in graded-lex order, so
//! iteration (and therefore every printed or serialized form) is
//! deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, DEFAULT_TOL};
use crate::series::TruncSeries;

/// Exponent vector ordered by total degree, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Variable names for the Siegel side: `["z","w"]` when `d = 2`,
/// otherwise `["z1",..,"z{d-1}","w"]`.
pub fn siegel_vars(d: usize) -> Vec<String> {
    if d == 2 {
        vec!["z".into(), "w".into()]
    } else {
        let mut v: Vec<String> = (1..d).map(|j| format!("z{j}")).collect();
        v.push("w".into());
        v
    }
}

/// Variable names for the ball side: `["z1",..,"zd"]`.
pub fn ball_vars(d: usize) -> Vec<String> {
    (1..=d).map(|j| format!("z{j}")).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero(vars: Vec<String>) -> Self {
        assert!(!vars.is_empty(), "a polynomial needs at least one variable");
        MultiPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: Vec<String>, c: Scalar) -> Self {
        let d = vars.len();
        let mut p = Self::zero(vars);
        p.add_term(Monomial(vec![0; d]), c);
        p
    }

    /// The coordinate function for variable `idx`.
    pub fn var(vars: Vec<String>, idx: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        Self::from_terms(vars, vec![(e, Scalar::one())])
    }

    pub fn from_terms(vars: Vec<String>, terms: Vec<(Vec<u32>, Scalar)>) -> Self {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.dim(), "exponent length must match the variable count");
            p.add_term(Monomial(e), c);
        }
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Scalar::is_exact)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Degree in variable `idx`.
    pub fn degree_in(&self, idx: usize) -> u32 {
        self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0)
    }

    pub fn coeff(&self, e: &[u32]) -> Scalar {
        self.terms
            .get(&Monomial(e.to_vec()))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// Add `c * x^e`, dropping the term if the sum vanishes.
    pub fn add_term(&mut self, e: Monomial, c: Scalar) {
        let entry = self.terms.remove(&e);
        let sum = match entry {
            Some(old) => &old + &c,
            None => c,
        };
        if !sum.is_zero_tol(0.0) {
            self.terms.insert(e, sum);
        }
    }

    /// Drop float coefficients below `tol` relative to the largest one.
    pub fn clean(&self, tol: f64) -> Self {
        let scale = self.terms.values().map(Scalar::abs).fold(0.0, f64::max);
        let mut p = Self::zero(self.vars.clone());
        for (m, c) in &self.terms {
            if !c.is_zero_scaled(tol, scale.max(1e-300)) {
                p.terms.insert(m.clone(), c.clone());
            }
        }
        p
    }

    pub fn to_float(&self) -> Self {
        self.map_coeffs(Scalar::to_float)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        let mut p = Self::zero(self.vars.clone());
        for (m, c) in &self.terms {
            p.add_term(m.clone(), f(c));
        }
        p
    }

    pub fn with_vars(&self, vars: Vec<String>) -> Self {
        assert_eq!(vars.len(), self.dim());
        MultiPoly { vars, terms: self.terms.clone() }
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.dim(), other.dim(), "variable count mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut p = self.clone();
        for (m, c) in &other.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    pub fn scalar_mul(&self, k: &Scalar) -> Self {
        self.map_coeffs(|c| c * k)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_same(other);
        let mut p = Self::zero(self.vars.clone());
        for (ma, a) in &self.terms {
            for (mb, b) in &other.terms {
                let e: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect();
                p.add_term(Monomial(e), a * b);
            }
        }
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(self.vars.clone(), Scalar::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, pt: &[Scalar]) -> Result<Scalar> {
        if pt.len() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), got: pt.len() });
        }
        let mut acc = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in pt.iter().zip(&m.0) {
                if e > 0 {
                    t = &t * &x.powi(e as i64);
                }
            }
            acc += &t;
        }
        Ok(acc)
    }

    pub fn eval_c64(&self, pt: &[Complex64]) -> Complex64 {
        assert_eq!(pt.len(), self.dim(), "dimension mismatch");
        let mut acc = Complex64::zero();
        for (m, c) in &self.terms {
            let mut t = c.to_c64();
            for (x, &e) in pt.iter().zip(&m.0) {
                if e > 0 {
                    t *= x.powu(e);
                }
            }
            acc += t;
        }
        acc
    }

    /// Partial derivative in variable `idx`.
    pub fn partial(&self, idx: usize) -> Self {
        let mut p = Self::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let k = m.0[idx];
            if k == 0 {
                continue;
            }
            let mut e = m.0.clone();
            e[idx] -= 1;
            p.add_term(Monomial(e), c * &Scalar::int(k as i64));
        }
        p
    }

    pub fn gradient(&self) -> Vec<MultiPoly> {
        (0..self.dim()).map(|j| self.partial(j)).collect()
    }

    /// Gradient evaluated at the origin.
    pub fn gradient_at_zero(&self) -> Vec<Scalar> {
        (0..self.dim())
            .map(|j| {
                let mut e = vec![0; self.dim()];
                e[j] = 1;
                self.coeff(&e)
            })
            .collect()
    }

    /// Second partials in the `z` variables (all but the last), at the origin.
    pub fn hessian_z(&self) -> Vec<Vec<Scalar>> {
        let n = self.dim() - 1;
        let mut h = vec![vec![Scalar::zero(); n]; n];
        for (a, row) in h.iter_mut().enumerate() {
            for (b, entry) in row.iter_mut().enumerate() {
                let mut e = vec![0; self.dim()];
                e[a] += 1;
                e[b] += 1;
                let c = self.coeff(&e);
                *entry = if a == b { &c * &Scalar::int(2) } else { c };
            }
        }
        h
    }

    /// Replace every variable by a polynomial in a new variable set.
    pub fn compose(&self, subs: &[MultiPoly]) -> Result<Self> {
        if subs.len() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), got: subs.len() });
        }
        let vars = subs[0].vars.clone();
        let mut powers: Vec<Vec<MultiPoly>> = subs
            .iter()
            .map(|s| vec![MultiPoly::constant(vars.clone(), Scalar::one()), s.clone()])
            .collect();
        let mut out = MultiPoly::zero(vars.clone());
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(vars.clone(), c.clone());
            for (j, &e) in m.0.iter().enumerate() {
                while powers[j].len() <= e as usize {
                    let next = powers[j].last().unwrap().mul(&subs[j]);
                    powers[j].push(next);
                }
                if e > 0 {
                    t = t.mul(&powers[j][e as usize]);
                }
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    /// Substitute a polynomial for variable `idx`, keeping the variable set.
    pub fn substitute(&self, idx: usize, q: &MultiPoly) -> Self {
        let subs: Vec<MultiPoly> = (0..self.dim())
            .map(|j| if j == idx { q.clone() } else { MultiPoly::var(self.vars.clone(), j) })
            .collect();
        self.compose(&subs).expect("dimensions agree by construction")
    }

    /// Coefficients `P_k(z)` of `p = sum_k P_k(z) w^k`, `w` the last variable.
    pub fn w_coeffs(&self) -> Vec<MultiPoly> {
        let last = self.dim() - 1;
        let deg = self.degree_in(last) as usize;
        let mut out = vec![MultiPoly::zero(self.vars.clone()); deg + 1];
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            let k = e[last] as usize;
            e[last] = 0;
            out[k].add_term(Monomial(e), c.clone());
        }
        out
    }

    fn from_w_coeffs(vars: Vec<String>, cs: &[MultiPoly]) -> Self {
        let last = vars.len() - 1;
        let mut p = MultiPoly::zero(vars);
        for (k, ck) in cs.iter().enumerate() {
            for (m, c) in &ck.terms {
                let mut e = m.0.clone();
                e[last] += k as u32;
                p.add_term(Monomial(e), c.clone());
            }
        }
        p
    }

    /// Exact division by `(a + w)` when it divides, `None` otherwise.
    pub fn div_linear_w(&self, a: &Scalar) -> Option<Self> {
        let cs = self.w_coeffs();
        let n = cs.len() - 1;
        if n == 0 {
            return if self.is_zero() { Some(self.clone()) } else { None };
        }
        let mut q = vec![MultiPoly::zero(self.vars.clone()); n];
        q[n - 1] = cs[n].clone();
        for k in (1..n).rev() {
            q[k - 1] = cs[k].sub(&q[k].scalar_mul(a));
        }
        let rem = cs[0].sub(&q[0].scalar_mul(a));
        if rem.clean(DEFAULT_TOL).is_zero() && (self.is_exact() || rem.terms.values().all(|c| c.abs() <= DEFAULT_TOL * self.max_abs().max(1.0))) {
            Some(Self::from_w_coeffs(self.vars.clone(), &q))
        } else {
            None
        }
    }

    /// Remove every factor `(a + w)`, returning the quotient and the count.
    pub fn strip_linear_w(&self, a: &Scalar) -> (Self, u32) {
        let mut p = self.clone();
        let mut k = 0;
        while !p.is_zero() {
            match p.div_linear_w(a) {
                Some(q) => {
                    p = q;
                    k += 1;
                }
                None => break,
            }
        }
        (p, k)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Scalar::abs).fold(0.0, f64::max)
    }

    /// Scale so that the coefficient of `w` is one (no-op if it vanishes).
    pub fn normalize_w_coefficient(&self) -> Self {
        let mut e = vec![0; self.dim()];
        *e.last_mut().unwrap() = 1;
        let c = self.coeff(&e);
        match c.inv() {
            Some(inv) if !c.is_zero() => self.scalar_mul(&inv),
            _ => self.clone(),
        }
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson { exp: m.0.clone(), coef: c.clone() })
                .collect(),
        }
    }

    pub fn from_json(j: &PolyJson) -> Result<Self> {
        if j.vars.is_empty() {
            return Err(Error::Parse("polynomial needs at least one variable".into()));
        }
        let mut p = MultiPoly::zero(j.vars.clone());
        for t in &j.terms {
            if t.exp.len() != j.vars.len() {
                return Err(Error::DimMismatch { expected: j.vars.len(), got: t.exp.len() });
            }
            p.add_term(Monomial(t.exp.clone()), t.coef.clone());
        }
        Ok(p)
    }
}

/// Wire format for polynomials.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub exp: Vec<u32>,
    pub coef: Scalar,
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter() {
            let mono: Vec<String> = m
                .0
                .iter()
                .zip(&self.vars)
                .filter(|(e, _)| **e > 0)
                .map(|(e, v)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect();
            let mono = mono.join("*");
            // real or imaginary coefficients with a negative sign print as subtraction
            let negative_real = matches!(c, Scalar::Exact(g) if (g.im.is_zero() && g.re < num_rational::BigRational::zero())
                    || (g.re.is_zero() && g.im < num_rational::BigRational::zero()))
                || matches!(c, Scalar::Float(z) if (z.im == 0.0 && z.re < 0.0) || (z.re == 0.0 && z.im < 0.0));
            let (sign, mag) = if negative_real { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if negative_real {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let ms = mag.to_string();
            match (mono.is_empty(), ms.as_str()) {
                (true, _) => write!(f, "{ms}")?,
                (false, "1") => write!(f, "{mono}")?,
                (false, _) => write!(f, "{ms}*{mono}")?,
            }
        }
        Ok(())
    }
}

/// `(2 z_j / (i + w), (i - w) / (i + w))`: Siegel domain to ball.
pub fn siegel_to_ball_point(pt: &[Scalar]) -> Vec<Scalar> {
    let w = pt.last().expect("nonempty point");
    let den = &Scalar::i() + w;
    let mut out: Vec<Scalar> = pt[..pt.len() - 1]
        .iter()
        .map(|z| &(z * &Scalar::int(2)) / &den)
        .collect();
    out.push(&(&Scalar::i() - w) / &den);
    out
}

/// `(i z_j / (1 + z_d), i (1 - z_d) / (1 + z_d))`: ball to Siegel domain.
pub fn ball_to_siegel_point(pt: &[Scalar]) -> Vec<Scalar> {
    let zd = pt.last().expect("nonempty point");
    let den = &Scalar::one() + zd;
    let mut out: Vec<Scalar> = pt[..pt.len() - 1]
        .iter()
        .map(|z| &(z * &Scalar::i()) / &den)
        .collect();
    out.push(&(&Scalar::i() * &(&Scalar::one() - zd)) / &den);
    out
}

pub fn in_ball(pt: &[Complex64]) -> bool {
    pt.iter().map(|z| z.norm_sqr()).sum::<f64>() < 1.0
}

pub fn in_siegel(pt: &[Complex64]) -> bool {
    let (w, z) = pt.split_last().expect("nonempty point");
    w.im > z.iter().map(|x| x.norm_sqr()).sum::<f64>()
}

/// `(i + w)^{deg p} p(F(z, w))` with common `(i + w)` factors removed.
pub fn transport_ball_to_siegel(p: &MultiPoly) -> MultiPoly {
    let d = p.dim();
    let vars = siegel_vars(d);
    let deg = p.total_degree();
    let w = MultiPoly::var(vars.clone(), d - 1);
    let iw = MultiPoly::constant(vars.clone(), Scalar::i()).add(&w);
    let i_minus_w = MultiPoly::constant(vars.clone(), Scalar::i()).sub(&w);
    let mut out = MultiPoly::zero(vars.clone());
    for (m, c) in p.terms() {
        let mut t = MultiPoly::constant(vars.clone(), c.clone());
        for j in 0..d - 1 {
            let zj = MultiPoly::var(vars.clone(), j).scalar_mul(&Scalar::int(2));
            t = t.mul(&zj.pow(m.0[j]));
        }
        t = t.mul(&i_minus_w.pow(m.0[d - 1]));
        t = t.mul(&iw.pow(deg - m.degree()));
        out = out.add(&t);
    }
    out.strip_linear_w(&Scalar::i()).0
}

/// `(1 + w)^{deg p} p(F^{-1}(z, w))` with common `(1 + w)` factors removed.
pub fn transport_siegel_to_ball(p: &MultiPoly) -> MultiPoly {
    let d = p.dim();
    let vars = ball_vars(d);
    let deg = p.total_degree();
    let zd = MultiPoly::var(vars.clone(), d - 1);
    let one = MultiPoly::constant(vars.clone(), Scalar::one());
    let one_plus = one.add(&zd);
    let i_one_minus = one.sub(&zd).scalar_mul(&Scalar::i());
    let mut out = MultiPoly::zero(vars.clone());
    for (m, c) in p.terms() {
        let mut t = MultiPoly::constant(vars.clone(), c.clone());
        for j in 0..d - 1 {
            let zj = MultiPoly::var(vars.clone(), j).scalar_mul(&Scalar::i());
            t = t.mul(&zj.pow(m.0[j]));
        }
        t = t.mul(&i_one_minus.pow(m.0[d - 1]));
        t = t.mul(&one_plus.pow(deg - m.degree()));
        out = out.add(&t);
    }
    out.strip_linear_w(&Scalar::one()).0
}

/// Taylor coefficients in `w` at `w = 0`: `(1/j!) d^j q / dw^j (z, 0)` for `j < m`,
/// as polynomials in the `z` variables (the `w` slot is left at exponent 0).
pub fn w_taylor_at_zero(q: &MultiPoly, m: usize) -> Vec<MultiPoly> {
    let cs = q.w_coeffs();
    (0..m)
        .map(|j| cs.get(j).cloned().unwrap_or_else(|| MultiPoly::zero(q.vars().to_vec())))
        .collect()
}

/// Reduction of a two-variable `q(z, w)` modulo `(w - center(z))^m`.
///
/// Returns `q_j(z) = (1/j!) (d^j q / dw^j)(z, center(z))` for `j < m` as
/// series of order `order`. `center = None` means the center `w = 0`.
pub fn weierstrass_reduce(
    q: &MultiPoly,
    m: usize,
    center: Option<&TruncSeries>,
    order: usize,
) -> Result<Vec<TruncSeries>> {
    if q.dim() != 2 {
        return Err(Error::DimMismatch { expected: 2, got: q.dim() });
    }
    let c = match center {
        Some(c) => c.truncate(order),
        None => TruncSeries::zero(order),
    };
    let c = TruncSeries::from_coeffs(c.into_coeffs(), order);
    let mut powers = vec![TruncSeries::one(order)];
    let wmax = q.degree_in(1) as usize;
    for _ in 0..wmax {
        let next = powers.last().unwrap().mul(&c);
        powers.push(next);
    }
    let mut out = vec![TruncSeries::zero(order); m];
    for (mono, coef) in q.terms() {
        let a = mono.0[0] as usize;
        let b = mono.0[1] as usize;
        // (1/j!) d^j/dw^j of w^b is binom(b, j) w^{b-j}
        for (j, slot) in out.iter_mut().enumerate().take(m.min(b + 1)) {
            let bin = Scalar::rational(crate::series::binomial(b as u64, j as u64));
            let term = powers[b - j].shift_up(a).truncate(order);
            let term = TruncSeries::from_coeffs(term.into_coeffs(), order);
            *slot = slot.add(&term.scalar_mul(&(coef * &bin)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use proptest::prelude::*;

    fn p(s: &str) -> MultiPoly {
        parse_poly(s, None).unwrap()
    }

    fn pv(s: &str, vars: &[&str]) -> MultiPoly {
        parse_poly(s, Some(&vars.iter().map(|v| v.to_string()).collect::<Vec<_>>())).unwrap()
    }

    #[test]
    fn evaluation() {
        assert!(p("w - z^2").eval(&[Scalar::one(), Scalar::one()]).unwrap().is_zero());
        assert!(pv("1 - z2", &["z1", "z2"]).eval(&[Scalar::zero(), Scalar::one()]).unwrap().is_zero());
        assert_eq!(
            p("w - z^2").eval(&[Scalar::one()]),
            Err(Error::DimMismatch { expected: 2, got: 1 })
        );
    }

    #[test]
    fn closed_form_curve_point() {
        // gamma(s) = (s/2 (1 + r), 3 i s^2 / 2 - 2 i ((r^3 - 1)/3 - (r - 1))), r = (1 + i s)^{1/2}
        let s = Scalar::gauss_ratio(-4, 1, -2, 1);
        let r = Scalar::gauss_ratio(-2, 1, 1, 1);
        assert_eq!(&r * &r, &Scalar::one() + &(&Scalar::i() * &s));
        let z = &(&s * &Scalar::ratio(1, 2)) * &(&Scalar::one() + &r);
        let cube = &(&r.powi(3) - &Scalar::one()) * &Scalar::ratio(1, 3);
        let bracket = &cube - &(&r - &Scalar::one());
        let w = &(&Scalar::gauss_ratio(0, 1, 3, 2) * &(&s * &s)) - &(&Scalar::gauss_ratio(0, 1, 2, 1) * &bracket);
        assert_eq!(z, Scalar::gauss_ratio(3, 1, -1, 1));
        assert_eq!(w, Scalar::gauss_ratio(-56, 3, 14, 1));
        assert!(in_siegel(&[z.to_c64(), w.to_c64()]));
    }

    #[test]
    fn gradient_and_hessian() {
        let w = pv("w", &["z", "w"]);
        let g = w.gradient_at_zero();
        assert_eq!(g, vec![Scalar::zero(), Scalar::one()]);
        let q = pv("i*w - 3*z1^2 - 5*z2^2", &["z1", "z2", "w"]);
        let h = q.hessian_z();
        assert_eq!(h[0][0], Scalar::int(-6));
        assert_eq!(h[1][1], Scalar::int(-10));
        assert_eq!(h[0][1], Scalar::zero());
        let h = p("w - i*w^2 - i*z^2").hessian_z();
        assert_eq!(h[0][0], Scalar::gauss_ratio(0, 1, -2, 1));
    }

    #[test]
    fn transport_examples() {
        let t = transport_ball_to_siegel(&pv("1 - z2", &["z1", "z2"]));
        assert_eq!(t, pv("2*w", &["z", "w"]));
        // 1 - z2 + c z1^2, c = 1/2: proportional to w - i w^2 - 2 c i z^2
        let t = transport_ball_to_siegel(&pv("1 - z2 + 1/2*z1^2", &["z1", "z2"]));
        let target = p("w - i*w^2 - i*z^2");
        let k = &t.coeff(&[0, 1]) / &target.coeff(&[0, 1]);
        assert_eq!(t, target.scalar_mul(&k));
    }

    #[test]
    fn transport_of_product_form() {
        // 1 - 2 z1 z2 transported, after the unitary change z1 = (u+v)/sqrt2 style,
        // is checked through its zero set: (z, w) = (t, t^2) maps onto 1 - 2 z1 z2 after
        // a linear change; here we verify the Siegel polynomial vanishes on the image
        // of the ball zero set under F^{-1}.
        let ball = pv("1 - 2*z1*z2", &["z1", "z2"]);
        let sieg = transport_ball_to_siegel(&ball);
        for k in 1..6 {
            let z1 = Scalar::ratio(k, 3);
            let z2 = &Scalar::one() / &(&z1 * &Scalar::int(2));
            let s = ball_to_siegel_point(&[z1, z2]);
            assert!(sieg.eval(&s).unwrap().is_zero());
        }
    }

    #[test]
    fn weierstrass_examples() {
        let w = pv("w", &["z", "w"]);
        let r = weierstrass_reduce(&w, 1, None, 6).unwrap();
        assert!(r[0].is_zero_tol(0.0));
        let q = p("z^4 + w");
        let center = TruncSeries::monomial(Scalar::i(), 2, 6);
        let r = weierstrass_reduce(&q, 1, Some(&center), 6).unwrap();
        let mut want = TruncSeries::zero(6);
        want.set_coeff(2, Scalar::i());
        want.set_coeff(4, Scalar::one());
        assert_eq!(r[0], want);
        let r = weierstrass_reduce(&pv("w^2", &["z", "w"]), 2, None, 4).unwrap();
        assert!(r.iter().all(|s| s.is_zero_tol(0.0)));
    }

    #[test]
    fn w_division() {
        let q = p("(i + w)^2*(z + w)");
        let (r, k) = q.strip_linear_w(&Scalar::i());
        assert_eq!(k, 2);
        assert_eq!(r, p("z + w"));
    }

    fn small_poly() -> impl Strategy<Value = MultiPoly> {
        prop::collection::vec(((0u32..=2, 0u32..=2), (-9i64..=9, -9i64..=9)), 1..6).prop_map(|ts| {
            let vars = ball_vars(2);
            let mut q = MultiPoly::zero(vars.clone());
            for ((a, b), (re, im)) in ts {
                q.add_term(Monomial(vec![a, b]), Scalar::gauss_ratio(re, 1, im, 1));
            }
            q
        })
    }

    fn rat_point() -> impl Strategy<Value = Vec<Scalar>> {
        prop::collection::vec((-50i64..=50, -50i64..=50), 2).prop_map(|v| {
            v.into_iter().map(|(a, b)| Scalar::gauss_ratio(a, 101, b, 101)).collect()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn transport_round_trip(q in small_poly()) {
            prop_assume!(!q.is_zero());
            let (_, k) = q.strip_linear_w(&Scalar::one());
            prop_assume!(k == 0);
            let back = transport_siegel_to_ball(&transport_ball_to_siegel(&q));
            let (m, c) = q.terms().next().unwrap();
            let lam = &back.coeff(&m.0) / c;
            prop_assert!(!lam.is_zero());
            prop_assert_eq!(back, q.scalar_mul(&lam));
        }

        #[test]
        fn maps_inverse_and_domains(pt in rat_point()) {
            let s = ball_to_siegel_point(&pt);
            prop_assert_eq!(siegel_to_ball_point(&s), pt.clone());
            let b: Vec<Complex64> = pt.iter().map(Scalar::to_c64).collect();
            let sc: Vec<Complex64> = s.iter().map(Scalar::to_c64).collect();
            prop_assert_eq!(in_ball(&b), in_siegel(&sc));
        }

        #[test]
        fn hessian_symmetric(q in small_poly()) {
            let q = q.with_vars(siegel_vars(2)).mul(&pv("1 + z + w", &["z", "w"]));
            let h = q.hessian_z();
            for a in 0..h.len() { for b in 0..h.len() { prop_assert_eq!(&h[a][b], &h[b][a]); } }
        }
    }
}
