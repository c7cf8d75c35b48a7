//! Univariate truncated power series `sum_{j<=N} a_j t^j`.
//!
//! A series of order `N` is known modulo `t^{N+1}`. Binary operations take
//! the minimum of the operand orders; composition and reversion follow the
//! rules documented on those functions. Nothing here extends an order
//! silently.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, DEFAULT_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries {
    coeffs: Vec<Scalar>,
}

impl TruncSeries {
    /// Build from coefficients `a_0..a_N`; the order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Scalar>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        TruncSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncSeries::new(vec![Scalar::zero(); order + 1])
    }

    pub fn one(order: usize) -> Self {
        Self::monomial(Scalar::one(), 0, order)
    }

    /// The identity series `t`.
    pub fn var(order: usize) -> Self {
        Self::monomial(Scalar::one(), 1, order)
    }

    /// `c t^k`, truncated at `order` (zero if `k > order`).
    pub fn monomial(c: Scalar, k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    /// Integer coefficients, handy in tests and examples.
    pub fn from_ints(v: &[i64]) -> Self {
        TruncSeries::new(v.iter().map(|&x| Scalar::int(x)).collect())
    }

    /// Pad or cut a coefficient list to exactly `order + 1` entries.
    pub fn from_coeffs(mut v: Vec<Scalar>, order: usize) -> Self {
        v.resize(order + 1, Scalar::zero());
        TruncSeries::new(v)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    /// Coefficient of `t^j`; zero past the order.
    pub fn coeff(&self, j: usize) -> Scalar {
        self.coeffs.get(j).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn set_coeff(&mut self, j: usize, c: Scalar) {
        assert!(j <= self.order(), "index {j} beyond order {}", self.order());
        self.coeffs[j] = c;
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_exact)
    }

    pub fn to_float(&self) -> Self {
        TruncSeries::new(self.coeffs.iter().map(Scalar::to_float).collect())
    }

    pub fn valuation(&self) -> Option<usize> {
        self.valuation_tol(DEFAULT_TOL)
    }

    /// Smallest index with a nonzero coefficient, `None` when all vanish.
    pub fn valuation_tol(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero_tol(tol))
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        self.valuation_tol(tol).is_none()
    }

    /// Keep coefficients up to `order` (clamped to the current order).
    pub fn truncate(&self, order: usize) -> Self {
        let n = order.min(self.order());
        TruncSeries::new(self.coeffs[..=n].to_vec())
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        TruncSeries::new(self.coeffs.iter().map(f).collect())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c)
    }

    pub fn conj(&self) -> Self {
        self.map(Scalar::conj)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        TruncSeries::new((0..=n).map(|j| &self.coeffs[j] + &other.coeffs[j]).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        TruncSeries::new((0..=n).map(|j| &self.coeffs[j] - &other.coeffs[j]).collect())
    }

    pub fn scalar_mul(&self, c: &Scalar) -> Self {
        self.map(|a| a * c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        self.mul_to(other, n)
    }

    /// Product truncated at `n` (callers guarantee `n` respects both orders).
    fn mul_to(&self, other: &Self, n: usize) -> Self {
        let mut out = vec![Scalar::zero(); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                if b.is_exact_zero() {
                    continue;
                }
                out[i + j] += &(a * b);
            }
        }
        TruncSeries::new(out)
    }

    /// Multiply by `t^k`; the order grows by `k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut v = vec![Scalar::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        TruncSeries::new(v)
    }

    /// Divide by `t^k`; the first `k` coefficients must vanish. Order drops by `k`.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if k > self.order() {
            return Err(Error::InsufficientOrder { have: self.order(), needs: k });
        }
        if self.coeffs[..k].iter().any(|c| !c.is_zero()) {
            return Err(Error::NonzeroConstantTerm);
        }
        Ok(TruncSeries::new(self.coeffs[k..].to_vec()))
    }

    /// Order `N - 1`.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return TruncSeries::zero(0);
        }
        TruncSeries::new(
            (1..=self.order())
                .map(|j| &self.coeffs[j] * &Scalar::int(j as i64))
                .collect(),
        )
    }

    /// Constant of integration zero; order `N + 1`.
    pub fn antiderivative(&self) -> Self {
        let mut v = vec![Scalar::zero()];
        for (j, a) in self.coeffs.iter().enumerate() {
            v.push(a * &Scalar::ratio(1, j as i64 + 1));
        }
        TruncSeries::new(v)
    }

    /// `f(g)` for `g` with zero constant term.
    ///
    /// Result order is `min(order(f) * val(g), order(g))`, with `val(g)`
    /// read as infinite when `g` vanishes to its order.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        let v = g.valuation();
        if v == Some(0) {
            return Err(Error::NonzeroConstantTerm);
        }
        let n = match v {
            Some(v) => (self.order() * v).min(g.order()),
            None => g.order(),
        };
        let g = g.truncate(n);
        let mut acc = TruncSeries::monomial(self.coeff(self.order().min(n)), 0, n);
        if v.is_none() {
            return Ok(TruncSeries::monomial(self.coeff(0), 0, n));
        }
        // Horner; powers of g past n vanish, so start from the highest useful index.
        let top = self.order().min(n);
        for j in (0..top).rev() {
            acc = acc.mul_to(&g, n);
            acc.coeffs[0] += &self.coeffs[j];
        }
        Ok(acc)
    }

    fn require_const(&self, want_one: bool) -> Result<()> {
        let c = &self.coeffs[0];
        let ok = if want_one { c.is_one() } else { c.is_zero() };
        if ok {
            Ok(())
        } else {
            Err(Error::BadConstantTerm(c.to_string()))
        }
    }

    /// `exp(f)` for `f(0) = 0`.
    pub fn exp(&self) -> Result<Self> {
        self.require_const(false)?;
        let n = self.order();
        let mut h = vec![Scalar::one()];
        let kf: Vec<Scalar> = (0..=n).map(|k| &self.coeffs[k] * &Scalar::int(k as i64)).collect();
        for m in 1..=n {
            let mut s = Scalar::zero();
            for k in 1..=m {
                if kf[k].is_exact_zero() {
                    continue;
                }
                s += &(&kf[k] * &h[m - k]);
            }
            h.push(&s * &Scalar::ratio(1, m as i64));
        }
        Ok(TruncSeries::new(h))
    }

    /// `exp(f) - 1` for `f(0) = 0`.
    pub fn exp_m1(&self) -> Result<Self> {
        let mut e = self.exp()?;
        e.coeffs[0] = Scalar::zero();
        Ok(e)
    }

    /// Principal `log(f)` for `f(0) = 1`.
    pub fn log(&self) -> Result<Self> {
        self.require_const(true)?;
        let n = self.order();
        let f = &self.coeffs;
        let mut g = vec![Scalar::zero()];
        for m in 1..=n {
            let mut s = f[m].clone() * Scalar::int(m as i64);
            for k in 1..m {
                if f[m - k].is_exact_zero() {
                    continue;
                }
                s -= &(&(&g[k] * &Scalar::int(k as i64)) * &f[m - k]);
            }
            g.push(&s * &Scalar::ratio(1, m as i64));
        }
        Ok(TruncSeries::new(g))
    }

    /// `f^alpha` (principal branch) for `f(0) = 1` and rational `alpha`.
    pub fn pow_rational(&self, alpha: &BigRational) -> Result<Self> {
        self.require_const(true)?;
        let n = self.order();
        let f = &self.coeffs;
        let a1 = Scalar::rational(alpha + BigRational::one());
        let mut h = vec![Scalar::one()];
        for k in 1..=n {
            let mut s = Scalar::zero();
            for j in 1..=k {
                if f[j].is_exact_zero() {
                    continue;
                }
                let w = &(&a1 * &Scalar::int(j as i64)) - &Scalar::int(k as i64);
                s += &(&(&w * &f[j]) * &h[k - j]);
            }
            h.push(&s * &Scalar::ratio(1, k as i64));
        }
        Ok(TruncSeries::new(h))
    }

    /// Principal `n`-th root for `f(0) = 1`.
    pub fn nth_root(&self, n: u32) -> Result<Self> {
        assert!(n > 0, "nth_root needs a positive index");
        self.pow_rational(&BigRational::new(BigInt::one(), BigInt::from(n)))
    }

    /// `1/f` for `f(0) != 0`.
    pub fn recip(&self) -> Result<Self> {
        let inv0 = self.coeffs[0]
            .inv()
            .filter(|_| !self.coeffs[0].is_zero())
            .ok_or_else(|| Error::BadConstantTerm(self.coeffs[0].to_string()))?;
        let n = self.order();
        let mut h = vec![inv0.clone()];
        for m in 1..=n {
            let mut s = Scalar::zero();
            for k in 1..=m {
                if self.coeffs[k].is_exact_zero() {
                    continue;
                }
                s += &(&self.coeffs[k] * &h[m - k]);
            }
            h.push(-(&s * &inv0));
        }
        Ok(TruncSeries::new(h))
    }

    /// Compositional inverse of `f = t + O(t^2)`, same order as `f`.
    ///
    /// Newton iteration `g <- g - (f(g) - s) / f'(g)` with doubling precision.
    pub fn reversion(&self) -> Result<Self> {
        if self.order() == 0 {
            return Err(Error::NotNormalized);
        }
        if !self.coeffs[0].is_zero() || !self.coeffs[1].is_one() {
            return Err(Error::NotNormalized);
        }
        let n = self.order();
        let df = self.derivative();
        let mut g = TruncSeries::var(1);
        let mut prec = 1;
        while prec < n {
            prec = (2 * prec).min(n);
            let gp = TruncSeries::from_coeffs(g.coeffs.clone(), prec);
            let fg = self.truncate(prec).compose(&gp)?;
            let resid = fg.sub(&TruncSeries::var(prec));
            let dfg = df.truncate(prec).compose(&gp)?;
            // resid has zero constant term, so the top coefficient of 1/f'(g) is never used.
            let inv = TruncSeries::from_coeffs(dfg.recip()?.coeffs, prec);
            let corr = resid.mul(&inv);
            g = gp.sub(&TruncSeries::from_coeffs(corr.coeffs, prec));
        }
        Ok(TruncSeries::from_coeffs(g.coeffs, n))
    }

    /// Evaluate the truncated polynomial at a complex point.
    pub fn eval_c64(&self, t: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c.to_c64())
    }

    /// Exact evaluation of the truncated polynomial.
    pub fn eval(&self, t: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| &(&acc * t) + c)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(Scalar::abs).fold(0.0, f64::max)
    }

    pub fn to_json(&self, var: &str) -> SeriesJson {
        SeriesJson {
            var: var.to_string(),
            order: self.order(),
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self> {
        if j.coeffs.len() != j.order + 1 {
            return Err(Error::Parse(format!(
                "series of order {} needs {} coefficients, got {}",
                j.order,
                j.order + 1,
                j.coeffs.len()
            )));
        }
        Ok(TruncSeries::new(j.coeffs.clone()))
    }

    /// Render with a variable name, omitting zero terms.
    pub fn display_in(&self, var: &str) -> String {
        let mut parts = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_exact_zero() {
                continue;
            }
            let mono = match j {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{j}"),
            };
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) if !rest.contains(['+', '-']) => (true, rest.to_string()),
                _ => (false, cs),
            };
            let term = match (j, mag.as_str()) {
                (0, _) => mag,
                (_, "1") => mono,
                _ => format!("{mag}*{mono}"),
            };
            parts.push((neg, term));
        }
        let mut body = String::new();
        for (k, (neg, term)) in parts.iter().enumerate() {
            match (k, neg) {
                (0, true) => body.push('-'),
                (0, false) => {}
                (_, true) => body.push_str(" - "),
                (_, false) => body.push_str(" + "),
            }
            body.push_str(term);
        }
        if body.is_empty() {
            body.push('0');
        }
        format!("{body} + O({var}^{})", self.order() + 1)
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("t"))
    }
}

/// Wire format for series.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SeriesJson {
    pub var: String,
    pub order: usize,
    pub coeffs: Vec<Scalar>,
}

/// Coefficients of `Phi`, the inverse of `Psi(s) = s exp(L(s))`, from
/// `[t^n] Phi = (1/n) [s^{n-1}] exp(-n L(s))`.
///
/// Returns a series of order `order(L) + 1`.
pub fn lagrange_inverse_from_log(l: &TruncSeries) -> Result<TruncSeries> {
    let n_max = l.order() + 1;
    let mut out = vec![Scalar::zero(); n_max + 1];
    for n in 1..=n_max {
        let e = l.scalar_mul(&Scalar::int(-(n as i64))).truncate(n - 1).exp()?;
        out[n] = &e.coeff(n - 1) * &Scalar::ratio(1, n as i64);
    }
    Ok(TruncSeries::new(out))
}

/// Compositional inverse via Lagrange inversion; order `order(f)`.
pub fn lagrange_reversion(f: &TruncSeries) -> Result<TruncSeries> {
    if f.order() == 0 || !f.coeff(0).is_zero() || !f.coeff(1).is_one() {
        return Err(Error::NotNormalized);
    }
    let l = f.shift_down(1)?.log()?;
    lagrange_inverse_from_log(&l)
}

/// Exact binomial coefficient as a rational.
pub fn binomial(n: u64, k: u64) -> BigRational {
    let mut acc = BigInt::one();
    for j in 0..k {
        acc = acc * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    BigRational::from_integer(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(v: &[i64]) -> TruncSeries {
        TruncSeries::from_ints(v)
    }

    fn ci(re: i64, im: i64) -> Scalar {
        Scalar::gauss_ratio(re, 1, im, 1)
    }

    #[test]
    fn calculus() {
        let f = TruncSeries::monomial(Scalar::i(), 2, 4);
        assert_eq!(f.derivative(), TruncSeries::monomial(ci(0, 2), 1, 3));
        // antiderivative(2M i t^{2M-1}) = i t^{2M}, M = 2
        let g = TruncSeries::monomial(ci(0, 4), 3, 6);
        assert_eq!(g.antiderivative(), TruncSeries::monomial(Scalar::i(), 4, 7));
    }

    #[test]
    fn difference_of_squares() {
        let a = s(&[0, 1, 1, 0, 0]);
        let b = s(&[0, 1, -1, 0, 0]);
        assert_eq!(a.mul(&b), s(&[0, 0, 1, 0, -1]));
    }

    #[test]
    fn min_order_rule() {
        assert_eq!(s(&[1, 2, 3]).add(&s(&[1, 1, 1, 1, 1])).order(), 2);
        assert_eq!(s(&[1, 2, 3]).mul(&s(&[1, 1, 1, 1, 1])).order(), 2);
    }

    #[test]
    fn compose_examples() {
        let f = s(&[0, 0, 1, 0, 0]);
        let g = s(&[0, 1, 0, 1, 0]);
        assert_eq!(f.compose(&g).unwrap(), s(&[0, 0, 1, 0, 2]));

        let phi = TruncSeries::monomial(Scalar::i(), 2, 6);
        assert_eq!(phi.compose(&TruncSeries::var(6)).unwrap(), phi);

        let e = TruncSeries::var(3).exp().unwrap();
        let is = TruncSeries::monomial(Scalar::i(), 1, 3);
        let want = TruncSeries::new(vec![
            Scalar::one(),
            Scalar::i(),
            Scalar::ratio(-1, 2),
            Scalar::gauss_ratio(0, 1, -1, 6),
        ]);
        assert_eq!(e.compose(&is).unwrap(), want);

        assert_eq!(f.compose(&s(&[1, 1])), Err(Error::NonzeroConstantTerm));
    }

    #[test]
    fn compose_order_rule() {
        // order(f) * val(g) = 3 * 2 = 6 < order(g) = 10
        let f = s(&[0, 1, 1, 1]);
        let g = TruncSeries::monomial(Scalar::one(), 2, 10);
        assert_eq!(f.compose(&g).unwrap().order(), 6);
    }

    #[test]
    fn exp_log_root_examples() {
        let is = TruncSeries::monomial(Scalar::i(), 1, 2);
        assert_eq!(
            is.exp().unwrap(),
            TruncSeries::new(vec![Scalar::one(), Scalar::i(), Scalar::ratio(-1, 2)])
        );
        assert_eq!(s(&[1, 0, 4, 0, 0]).nth_root(2).unwrap(), s(&[1, 0, 2, 0, -2]));
        let f = TruncSeries::new(vec![
            Scalar::zero(),
            Scalar::zero(),
            Scalar::i(),
            Scalar::zero(),
            Scalar::one(),
            Scalar::zero(),
            Scalar::zero(),
        ]);
        assert_eq!(f.exp().unwrap().log().unwrap(), f);
        assert!(matches!(s(&[2, 1]).log(), Err(Error::BadConstantTerm(_))));
        assert!(matches!(s(&[1, 1]).exp(), Err(Error::BadConstantTerm(_))));
    }

    #[test]
    fn reversion_examples() {
        assert_eq!(TruncSeries::var(5).reversion().unwrap(), TruncSeries::var(5));
        let g = s(&[0, 1, -1, 0]).reversion().unwrap();
        assert_eq!(g, s(&[0, 1, 1, 2]));
        // compose round trip as the oracle
        assert_eq!(s(&[0, 1, -1, 0]).compose(&g).unwrap(), TruncSeries::var(3));
        assert_eq!(s(&[1, 1, 0]).reversion(), Err(Error::NotNormalized));
        assert_eq!(s(&[0, 2, 0]).reversion(), Err(Error::NotNormalized));
    }

    #[test]
    fn reversion_of_quartic_root() {
        // Phi(t) = t (1 + 4 t^2)^{-1/4};  Psi(s) = s ((1 + 4 s^4)^{1/2} + 2 s^2)^{1/2}
        let n = 9;
        let base = TruncSeries::from_coeffs(vec![Scalar::one(), Scalar::zero(), Scalar::int(4)], n - 1);
        let phi = base
            .pow_rational(&BigRational::new((-1).into(), 4.into()))
            .unwrap()
            .shift_up(1);
        let psi = phi.reversion().unwrap();
        let inner = TruncSeries::from_coeffs(
            vec![Scalar::one(), Scalar::zero(), Scalar::zero(), Scalar::zero(), Scalar::int(4)],
            n - 1,
        )
        .nth_root(2)
        .unwrap()
        .add(&TruncSeries::monomial(Scalar::int(2), 2, n - 1));
        let want = inner.nth_root(2).unwrap().shift_up(1);
        assert_eq!(psi.truncate(8), want.truncate(8));
    }

    #[test]
    fn lagrange_matches_newton_fixed() {
        let f = s(&[0, 1, 3, -2, 5, 1, 0, 7]);
        assert_eq!(lagrange_reversion(&f).unwrap(), f.reversion().unwrap());
    }

    #[test]
    fn json_round_trip() {
        let f = TruncSeries::new(vec![Scalar::ratio(1, 3), Scalar::i(), Scalar::float(0.25, -1.0)]);
        let j = serde_json::to_string(&f.to_json("t")).unwrap();
        let back: SeriesJson = serde_json::from_str(&j).unwrap();
        assert_eq!(back.var, "t");
        assert_eq!(TruncSeries::from_json(&back).unwrap(), f);
    }

    fn rat_series(max_order: usize) -> impl Strategy<Value = TruncSeries> {
        prop::collection::vec((-100i64..=100, 1i64..=100, -100i64..=100, 1i64..=100), 2..=max_order + 1)
            .prop_map(|v| {
                TruncSeries::new(v.into_iter().map(|(a, b, c, d)| Scalar::gauss_ratio(a, b, c, d)).collect())
            })
    }

    fn normalized(f: TruncSeries) -> TruncSeries {
        let mut f = f;
        f.set_coeff(0, Scalar::zero());
        f.set_coeff(1, Scalar::one());
        f
    }

    fn rel_close(a: &TruncSeries, b: &TruncSeries, tol: f64) -> bool {
        a.order() == b.order()
            && a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| {
                let (x, y) = (x.to_c64(), y.to_c64());
                (x - y).norm() <= tol * x.norm().max(y.norm()).max(1.0)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn reversion_round_trip(f in rat_series(7)) {
            let f = normalized(f);
            let g = f.reversion().unwrap();
            let id = TruncSeries::var(f.order());
            prop_assert_eq!(f.compose(&g).unwrap(), id.clone());
            prop_assert_eq!(g.compose(&f).unwrap(), id);
        }

        #[test]
        fn exp_log_inverse(f in rat_series(7)) {
            let mut f = f;
            f.set_coeff(0, Scalar::zero());
            prop_assert_eq!(f.exp().unwrap().log().unwrap(), f.clone());
            let mut h = f.clone();
            h.set_coeff(0, Scalar::one());
            prop_assert_eq!(h.log().unwrap().exp().unwrap(), h);
        }

        #[test]
        fn nth_root_power(f in rat_series(6), n in 1u32..=4) {
            let mut f = f;
            f.set_coeff(0, Scalar::one());
            let r = f.nth_root(n).unwrap();
            let mut acc = TruncSeries::one(f.order());
            for _ in 0..n { acc = acc.mul(&r); }
            prop_assert_eq!(acc, f);
        }

        #[test]
        fn lagrange_agrees_with_newton(f in rat_series(6)) {
            let f = normalized(f);
            prop_assert_eq!(lagrange_reversion(&f).unwrap(), f.reversion().unwrap());
        }

        #[test]
        fn float_tracks_exact(f in rat_series(10), g in rat_series(10)) {
            let f0 = normalized(f.clone());
            let ff = f0.to_float();
            prop_assert!(rel_close(&f0.mul(&g), &ff.mul(&g.to_float()), 1e-10));
            prop_assert!(rel_close(&f0.reversion().unwrap(), &ff.reversion().unwrap(), 1e-10));
            let mut e = f.clone(); e.set_coeff(0, Scalar::zero());
            prop_assert!(rel_close(&e.exp().unwrap(), &e.to_float().exp().unwrap(), 1e-10));
        }
    }
}
