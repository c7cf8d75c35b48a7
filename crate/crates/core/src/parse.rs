//! Text input for polynomials.
//!
//! Grammar: sums and differences of products, `^` with a non-negative
//! integer exponent, implicit multiplication, parentheses, and division by
//! constants. Identifiers are one letter followed by optional digits, so
//! `iz2` reads as `i * z2`. The letter `i` is the imaginary unit. Decimal
//! literals switch their coefficient to the float backend.

use crate::error::{Error, Result};
use crate::multipoly::MultiPoly;
use crate::scalar::{parse_component, ComponentValue, Scalar};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Scalar),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let ch = chars[k];
        if ch.is_whitespace() {
            k += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let start = k;
            while k < chars.len() && (chars[k].is_ascii_digit() || chars[k] == '.') {
                k += 1;
            }
            // exponent part only when followed by a digit (optionally signed)
            if k < chars.len() && (chars[k] == 'e' || chars[k] == 'E') {
                let mut j = k + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    k = j;
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                }
            }
            let text: String = chars[start..k].iter().collect();
            let v = match parse_component(&text).map_err(Error::Parse)? {
                ComponentValue::Rational(r) => Scalar::rational(r),
                ComponentValue::Float(x) => Scalar::real_f64(x),
            };
            out.push(Tok::Num(v));
        } else if ch.is_ascii_alphabetic() {
            let start = k;
            k += 1;
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            out.push(Tok::Ident(chars[start..k].iter().collect()));
        } else if "+-*/^()".contains(ch) {
            out.push(Tok::Op(ch));
            k += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character '{ch}'")));
        }
    }
    Ok(out)
}

/// Variables found in the text, ordered as `z`-like names by index and `w` last.
pub fn detect_vars(src: &str) -> Result<Vec<String>> {
    let mut names: Vec<String> = lex(src)?
        .into_iter()
        .filter_map(|t| match t {
            Tok::Ident(s) if s != "i" => Some(s),
            _ => None,
        })
        .collect();
    names.sort_by(|a, b| var_key(a).cmp(&var_key(b)));
    names.dedup();
    if names.is_empty() {
        names = vec!["z".into(), "w".into()];
    }
    Ok(names)
}

fn var_key(s: &str) -> (u8, char, u64) {
    let letter = s.chars().next().unwrap_or('z');
    let idx: u64 = s[1..].parse().unwrap_or(0);
    let rank = if letter == 'w' { 1 } else { 0 };
    (rank, letter, idx)
}

/// Parse polynomial text. Without `vars` the variables are detected.
pub fn parse_poly(src: &str, vars: Option<&[String]>) -> Result<MultiPoly> {
    let vars = match vars {
        Some(v) => v.to_vec(),
        None => detect_vars(src)?,
    };
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, vars };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    vars: Vec<String>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                let c = as_constant(&d)
                    .ok_or_else(|| Error::Parse("division by a non-constant".into()))?;
                if c.is_zero_tol(0.0) {
                    return Err(Error::Parse("division by zero".into()));
                }
                acc = acc.scalar_mul(&c.inv().unwrap());
            } else if matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('('))) {
                acc = acc.mul(&self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<MultiPoly> {
        if self.eat('-') {
            Ok(self.unary()?.neg())
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e = n
                        .as_rational()
                        .filter(|r| r.is_integer())
                        .and_then(|r| num_traits::ToPrimitive::to_u32(&r.to_integer()))
                        .ok_or_else(|| Error::Parse("exponent must be a non-negative integer".into()))?;
                    Ok(base.pow(e))
                }
                _ => Err(Error::Parse("expected an integer exponent after '^'".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        let tok = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Parse("unexpected end of input".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(c) => Ok(MultiPoly::constant(self.vars.clone(), c)),
            Tok::Ident(name) => {
                if name == "i" {
                    return Ok(MultiPoly::constant(self.vars.clone(), Scalar::i()));
                }
                let idx = self
                    .vars
                    .iter()
                    .position(|v| *v == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable '{name}'")))?;
                Ok(MultiPoly::var(self.vars.clone(), idx))
            }
            Tok::Op('(') => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            Tok::Op(c) => Err(Error::Parse(format!("unexpected '{c}'"))),
        }
    }
}

fn as_constant(p: &MultiPoly) -> Option<Scalar> {
    if p.is_zero() {
        return Some(Scalar::zero());
    }
    if p.total_degree() == 0 {
        return Some(p.coeff(&vec![0; p.dim()]));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn implicit_products_and_unit() {
        let p = parse_poly("w^2 + w - iz^2", None).unwrap();
        assert_eq!(p.vars(), &["z".to_string(), "w".to_string()]);
        assert_eq!(p.coeff(&[2, 0]), -Scalar::i());
        assert_eq!(p.coeff(&[0, 2]), Scalar::one());
        let q = parse_poly("2z1 z2 - (1/4)z1^2 + 3/2", None).unwrap();
        assert_eq!(q.coeff(&[1, 1]), Scalar::int(2));
        assert_eq!(q.coeff(&[2, 0]), Scalar::ratio(-1, 4));
        assert_eq!(q.coeff(&[0, 0]), Scalar::ratio(3, 2));
    }

    #[test]
    fn decimals_are_float() {
        let p = parse_poly("0.5 w + 1e-3 z^2", None).unwrap();
        assert!(!p.is_exact());
        assert!((p.coeff(&[2, 0]).re_f64() - 1e-3).abs() < 1e-18);
    }

    #[test]
    fn display_round_trips() {
        for s in ["w - i*w^2 - 3/2*i*z^2", "(1+2i)z w + 7", "-z^3 + (2/3 - i)w^4"] {
            let p = parse_poly(s, None).unwrap();
            let back = parse_poly(&p.to_string(), Some(p.vars())).unwrap();
            assert_eq!(back, p, "{s} -> {p}");
        }
    }

    #[test]
    fn errors() {
        assert!(parse_poly("w / z", None).is_err());
        assert!(parse_poly("w^(2)", None).is_err());
        assert!(parse_poly("(w", None).is_err());
        assert!(parse_poly("w $ z", None).is_err());
    }
}
