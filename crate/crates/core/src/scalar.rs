//! Complex coefficients with an exact Gaussian-rational backend and a
//! double-precision backend.
//!
//! Mixed arithmetic promotes to the float backend. Exact zero tests are
//! exact; float zero tests compare against a tolerance.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Default zero tolerance for the float backend.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Backend selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

impl FromStr for Backend {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            other => Err(format!("unknown backend '{other}' (expected exact|float)")),
        }
    }
}

/// Element of Q(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

/// A complex scalar, exact or floating.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(GaussRat),
    Float(Complex64),
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // very large numerators/denominators: scale by bit length
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db;
    let num = r.numer() >> (nb.saturating_sub(60).max(0) as usize);
    let den = r.denom() >> (db.saturating_sub(60).max(0) as usize);
    let m = num.to_f64().unwrap_or(0.0) / den.to_f64().unwrap_or(1.0);
    let adj = (nb.saturating_sub(60).max(0)) - (db.saturating_sub(60).max(0));
    let _ = shift;
    m * 2f64.powi(adj as i32)
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued fractions).
pub fn rationalize(x: f64, max_den: u64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e18 {
            break;
        }
        let a_int = a as u128;
        let p2 = a_int.checked_mul(p1)?.checked_add(p0)?;
        let q2 = a_int.checked_mul(q1)?.checked_add(q0)?;
        if q2 > max_den as u128 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - a;
        if frac < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    let r = BigRational::new(BigInt::from(p1), BigInt::from(q1));
    Some(if neg { -r } else { r })
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(GaussRat::new(BigRational::zero(), BigRational::zero()))
    }

    pub fn one() -> Self {
        Scalar::int(1)
    }

    pub fn i() -> Self {
        Scalar::Exact(GaussRat::new(BigRational::zero(), BigRational::one()))
    }

    pub fn int(n: i64) -> Self {
        Scalar::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::rational(rat(n, d))
    }

    pub fn rational(r: BigRational) -> Self {
        Scalar::Exact(GaussRat::new(r, BigRational::zero()))
    }

    pub fn gauss(re: BigRational, im: BigRational) -> Self {
        Scalar::Exact(GaussRat::new(re, im))
    }

    /// `a/b + (c/d) i`
    pub fn gauss_ratio(a: i64, b: i64, c: i64, d: i64) -> Self {
        Scalar::gauss(rat(a, b), rat(c, d))
    }

    pub fn float(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn from_c64(z: Complex64) -> Self {
        Scalar::Float(z)
    }

    pub fn real_f64(x: f64) -> Self {
        Scalar::Float(Complex64::new(x, 0.0))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(g) => g.to_c64(),
            Scalar::Float(z) => *z,
        }
    }

    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_c64())
    }

    pub fn to_backend(&self, backend: Backend) -> Scalar {
        match backend {
            Backend::Exact => self.clone(),
            Backend::Float => self.to_float(),
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(GaussRat::new(g.re.clone(), -g.im.clone())),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    /// Real part, as a scalar of the same backend.
    pub fn re(&self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::rational(g.re.clone()),
            Scalar::Float(z) => Scalar::real_f64(z.re),
        }
    }

    /// Imaginary part, as a scalar of the same backend.
    pub fn im(&self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::rational(g.im.clone()),
            Scalar::Float(z) => Scalar::real_f64(z.im),
        }
    }

    pub fn re_f64(&self) -> f64 {
        self.to_c64().re
    }

    pub fn im_f64(&self) -> f64 {
        self.to_c64().im
    }

    pub fn norm_sqr(&self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::rational(g.norm_sqr()),
            Scalar::Float(z) => Scalar::real_f64(z.norm_sqr()),
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Zero test with the default tolerance.
    pub fn is_zero(&self) -> bool {
        self.is_zero_tol(DEFAULT_TOL)
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        self.is_zero_scaled(tol, 1.0)
    }

    /// `|x| <= tol * scale` on the float backend, exact equality otherwise.
    pub fn is_zero_scaled(&self, tol: f64, scale: f64) -> bool {
        match self {
            Scalar::Exact(g) => g.re.is_zero() && g.im.is_zero(),
            Scalar::Float(z) => z.norm() <= tol * scale,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.re.is_zero() && g.im.is_zero(),
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        (self - &Scalar::one()).is_zero()
    }

    pub fn is_real_tol(&self, tol: f64) -> bool {
        self.im().is_zero_tol(tol)
    }

    pub fn is_imag_tol(&self, tol: f64) -> bool {
        self.re().is_zero_tol(tol)
    }

    /// The rational value when the scalar is an exact real number.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Exact(g) if g.im.is_zero() => Some(g.re.clone()),
            _ => None,
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        match self {
            Scalar::Exact(g) => {
                let n = g.norm_sqr();
                if n.is_zero() {
                    None
                } else {
                    Some(Scalar::gauss(&g.re / &n, -&g.im / &n))
                }
            }
            Scalar::Float(z) => {
                if z.norm_sqr() == 0.0 {
                    None
                } else {
                    Some(Scalar::Float(z.inv()))
                }
            }
        }
    }

    pub fn powi(&self, e: i64) -> Scalar {
        if e < 0 {
            return self
                .inv()
                .expect("negative power of zero")
                .powi(-e);
        }
        let mut base = self.clone();
        let mut acc = Scalar::one();
        let mut n = e as u64;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        if !self.is_exact() {
            acc.to_float()
        } else {
            acc
        }
    }

    pub fn mul_i(&self) -> Scalar {
        self * &Scalar::i()
    }

    /// Principal `n`-th root. Exact when the root lies in Q(i) with a
    /// moderate denominator; float otherwise.
    pub fn principal_root(&self, n: u32) -> Scalar {
        if n == 1 {
            return self.clone();
        }
        let z = self.to_c64();
        let principal = z.powf(1.0 / n as f64);
        if self.is_exact() {
            // Any exact root in Q(i) is one of the n float roots; prefer the principal one.
            let mut cands: Vec<Complex64> = (0..n)
                .map(|k| principal * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
                .collect();
            cands.sort_by(|a, b| {
                (a - principal)
                    .norm()
                    .partial_cmp(&(b - principal).norm())
                    .unwrap()
            });
            for c in cands {
                if let Some(r) = exact_from_c64(c) {
                    if r.powi(n as i64) == *self {
                        return r;
                    }
                }
            }
        }
        Scalar::Float(principal)
    }

    pub fn arg(&self) -> f64 {
        self.to_c64().arg()
    }
}

/// Attempt to recover an exact Gaussian rational from a float approximation.
pub fn exact_from_c64(z: Complex64) -> Option<Scalar> {
    let scale = z.norm().max(1.0);
    let max_den = 1_000_000u64;
    let re = rationalize(z.re, max_den)?;
    let im = rationalize(z.im, max_den)?;
    let back = Complex64::new(rat_to_f64(&re), rat_to_f64(&im));
    if (back - z).norm() <= 1e-9 * scale {
        Some(Scalar::gauss(re, im))
    } else {
        None
    }
}

/// `exp(2 pi i num / den)`; exact when it is one of 1, i, -1, -i.
pub fn root_of_unity(num: i64, den: i64) -> Scalar {
    assert!(den > 0, "root_of_unity needs a positive denominator");
    let k = num.rem_euclid(den);
    if (4 * k) % den == 0 {
        match (4 * k) / den {
            0 => Scalar::one(),
            1 => Scalar::i(),
            2 => Scalar::int(-1),
            _ => -Scalar::i(),
        }
    } else {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / den as f64;
        Scalar::Float(Complex64::from_polar(1.0, theta))
    }
}

fn binop(a: &Scalar, b: &Scalar, op: char) -> Scalar {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => match op {
            '+' => Scalar::gauss(&x.re + &y.re, &x.im + &y.im),
            '-' => Scalar::gauss(&x.re - &y.re, &x.im - &y.im),
            '*' => Scalar::gauss(
                &x.re * &y.re - &x.im * &y.im,
                &x.re * &y.im + &x.im * &y.re,
            ),
            '/' => {
                let n = y.norm_sqr();
                assert!(!n.is_zero(), "division by exact zero");
                Scalar::gauss(
                    (&x.re * &y.re + &x.im * &y.im) / &n,
                    (&x.im * &y.re - &x.re * &y.im) / &n,
                )
            }
            _ => unreachable!(),
        },
        _ => {
            let (x, y) = (a.to_c64(), b.to_c64());
            Scalar::Float(match op {
                '+' => x + y,
                '-' => x - y,
                '*' => x * y,
                '/' => x / y,
                _ => unreachable!(),
            })
        }
    }
}

macro_rules! impl_binop {
    ($tr:ident, $m:ident, $c:expr) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                binop(self, rhs, $c)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                binop(&self, &rhs, $c)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                binop(&self, rhs, $c)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                binop(self, &rhs, $c)
            }
        }
    };
}

impl_binop!(Add, add, '+');
impl_binop!(Sub, sub, '-');
impl_binop!(Mul, mul, '*');
impl_binop!(Div, div, '/');

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = binop(self, rhs, '+');
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = binop(self, rhs, '-');
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = binop(self, rhs, '*');
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::gauss(-g.re.clone(), -g.im.clone()),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::rational(r)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Float(z)
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Float components are written in shortest round-trip form.
fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(g) => {
                let (re, im) = (&g.re, &g.im);
                match (re.is_zero(), im.is_zero()) {
                    (_, true) => write!(f, "{}", fmt_rat(re)),
                    (true, false) => {
                        if im.is_one() {
                            write!(f, "i")
                        } else if (-im).is_one() {
                            write!(f, "-i")
                        } else {
                            write!(f, "{}i", fmt_rat(im))
                        }
                    }
                    (false, false) => {
                        let sign = if im.is_negative() { '-' } else { '+' };
                        let a = im.abs();
                        if a.is_one() {
                            write!(f, "({}{}i)", fmt_rat(re), sign)
                        } else {
                            write!(f, "({}{}{}i)", fmt_rat(re), sign, fmt_rat(&a))
                        }
                    }
                }
            }
            Scalar::Float(z) => {
                if z.im == 0.0 {
                    write!(f, "{}", fmt_f64(z.re))
                } else if z.re == 0.0 {
                    write!(f, "{}i", fmt_f64(z.im))
                } else {
                    let sign = if z.im < 0.0 { '-' } else { '+' };
                    write!(f, "({}{}{}i)", fmt_f64(z.re), sign, fmt_f64(z.im.abs()))
                }
            }
        }
    }
}

/// Parse a real component: `p/q`, integer, or decimal (decimal gives float).
pub fn parse_component(s: &str) -> Result<ComponentValue, String> {
    let s = s.trim();
    let looks_float = s.contains('.')
        || s.contains('e')
        || s.contains('E')
        || s.eq_ignore_ascii_case("inf")
        || s.eq_ignore_ascii_case("nan");
    if looks_float {
        s.parse::<f64>()
            .map(ComponentValue::Float)
            .map_err(|e| format!("bad decimal '{s}': {e}"))
    } else if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| format!("bad numerator in '{s}'"))?;
        let d: BigInt = d.trim().parse().map_err(|_| format!("bad denominator in '{s}'"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in '{s}'"));
        }
        Ok(ComponentValue::Rational(BigRational::new(n, d)))
    } else {
        let n: BigInt = s.parse().map_err(|_| format!("bad integer '{s}'"))?;
        Ok(ComponentValue::Rational(BigRational::from_integer(n)))
    }
}

pub enum ComponentValue {
    Rational(BigRational),
    Float(f64),
}

#[derive(Serialize, Deserialize)]
struct ScalarJson {
    re: String,
    im: String,
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let j = match self {
            Scalar::Exact(g) => ScalarJson {
                re: fmt_rat(&g.re),
                im: fmt_rat(&g.im),
            },
            Scalar::Float(z) => ScalarJson {
                re: fmt_f64(z.re),
                im: fmt_f64(z.im),
            },
        };
        j.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = ScalarJson::deserialize(d)?;
        let re = parse_component(&j.re).map_err(D::Error::custom)?;
        let im = parse_component(&j.im).map_err(D::Error::custom)?;
        Ok(match (re, im) {
            (ComponentValue::Rational(a), ComponentValue::Rational(b)) => Scalar::gauss(a, b),
            (a, b) => {
                let f = |v: ComponentValue| match v {
                    ComponentValue::Rational(r) => rat_to_f64(&r),
                    ComponentValue::Float(x) => x,
                };
                Scalar::float(f(a), f(b))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops_exact() {
        let a = Scalar::gauss_ratio(1, 2, 3, 4);
        let b = Scalar::gauss_ratio(-2, 3, 1, 5);
        let q = &a / &b;
        assert_eq!(&q * &b, a);
        assert_eq!(&(&a + &b) - &b, a);
        assert!((&a - &a).is_zero_tol(0.0));
        assert_eq!(Scalar::i() * Scalar::i(), Scalar::int(-1));
    }

    #[test]
    fn mixed_promotes_to_float() {
        let a = Scalar::ratio(1, 3);
        let b = Scalar::float(0.5, 0.0);
        assert!(!(&a + &b).is_exact());
        assert!(((&a + &b).re_f64() - (1.0 / 3.0 + 0.5)).abs() < 1e-15);
    }

    #[test]
    fn zero_tests() {
        assert!(Scalar::float(1e-12, 0.0).is_zero());
        assert!(!Scalar::float(1e-6, 0.0).is_zero());
        assert!(Scalar::float(1e-6, 0.0).is_zero_scaled(1e-9, 1e4));
        assert!(!Scalar::ratio(1, 1_000_000_000_000).is_zero());
    }

    #[test]
    fn exact_roots() {
        assert_eq!(Scalar::int(-4).principal_root(2), Scalar::gauss_ratio(0, 1, 2, 1));
        assert_eq!(Scalar::ratio(1, 16).principal_root(4), Scalar::ratio(1, 2));
        assert_eq!(Scalar::gauss_ratio(0, 1, 2, 1).principal_root(2), Scalar::gauss_ratio(1, 1, 1, 1));
        let r = Scalar::int(2).principal_root(2);
        assert!(!r.is_exact());
        assert!((r.re_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn roots_of_unity() {
        assert_eq!(root_of_unity(1, 4), Scalar::i());
        assert_eq!(root_of_unity(3, 6), Scalar::int(-1));
        assert_eq!(root_of_unity(-1, 4), -Scalar::i());
        let z = root_of_unity(1, 8);
        assert!(!z.is_exact());
        assert!((z.powi(8) - Scalar::one()).is_zero_tol(1e-14));
    }

    #[test]
    fn json_round_trip() {
        let a = Scalar::gauss_ratio(-3, 7, 5, 2);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"re":"-3/7","im":"5/2"}"#);
        assert_eq!(serde_json::from_str::<Scalar>(&s).unwrap(), a);
        let f = Scalar::float(0.1, -2.5e-20);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<Scalar>(&s).unwrap(), f);
    }

    #[test]
    fn display() {
        assert_eq!(Scalar::gauss_ratio(1, 2, -1, 1).to_string(), "(1/2-i)");
        assert_eq!(Scalar::gauss_ratio(0, 1, 2, 3).to_string(), "2/3i");
        assert_eq!(Scalar::int(-5).to_string(), "-5");
    }
}
