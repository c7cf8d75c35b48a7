//! Necessary conditions on an algebraic `f = e^L` given by `P(s, f(s)) = 0`.
//!
//! Gate 1: the extreme coefficients `P_0(s)`, `P_m(s)` in `y` are monomials.
//! Gate 2: a branch of `f` passes through `(0, 1)` and its logarithm is of
//! curve or isolated type.
//! Gate 3: on every branch at `s = infinity` the expansion of `L'(1/s)` has
//! no `s^{2M+1}` term.
//!
//! For gate 3 a branch `s = c t^e`, `y = t^a U(t)` of `s^D P(1/s, y)` gives
//! `L'(1/s) = -(c/e) (a t^e + t^{e+1} U'(t)/U(t))`, an ordinary series in
//! `t`, and `s^{2M+1}` corresponds to `t^{e(2M+1)}`.

use serde_json::{json, Value};

use crate::classify::{classify_branch, Tag};
use crate::error::{Error, Result};
use crate::multipoly::{Monomial, MultiPoly};
use crate::puiseux::{raw_branches, RawBranch};
use crate::roots::roots;
use crate::scalar::{Scalar, DEFAULT_TOL};
use crate::series::TruncSeries;

use super::branch_from_param;

#[derive(Clone, Debug)]
pub struct InfinityBranch {
    /// Ramification `e` in `s = c t^e`.
    pub e: u32,
    pub c: Scalar,
    /// `y ~ t^a` with `a < 0` a pole of `f` at infinity.
    pub a: i64,
    /// `L'(1/s)` as a series in `t`.
    pub series: TruncSeries,
    /// Coefficient of `s^{2M+1}`, `None` if the order did not reach it.
    pub residue_coeff: Option<Scalar>,
}

#[derive(Clone, Debug)]
pub struct AlgebraicLReport {
    pub m: u32,
    pub monomial_ends: bool,
    pub l: Option<TruncSeries>,
    pub l_tag: Option<Tag>,
    pub local_gate: bool,
    pub infinity: Vec<InfinityBranch>,
    pub no_residue_term: bool,
    /// Irreducibility of `P` is taken on trust.
    pub irreducibility_verified: bool,
}

impl AlgebraicLReport {
    pub fn passed(&self) -> bool {
        self.monomial_ends && self.local_gate && self.no_residue_term
    }

    pub fn to_json(&self) -> Value {
        json!({
            "M": self.m,
            "gates": {
                "monomial_ends": self.monomial_ends,
                "local_type": self.local_gate,
                "no_residue_term": self.no_residue_term,
            },
            "passed": self.passed(),
            "L": self.l.as_ref().map(|l| l.to_json("s")),
            "L_tag": self.l_tag,
            "infinity_branches": self.infinity.iter().map(|b| json!({
                "e": b.e,
                "c": b.c,
                "a": b.a,
                "residue_coeff": b.residue_coeff,
            })).collect::<Vec<_>>(),
            "irreducibility_verified": self.irreducibility_verified,
        })
    }
}

fn sy(p: &MultiPoly) -> MultiPoly {
    p.with_vars(vec!["s".into(), "y".into()])
}

fn y_coeff_is_monomial(p: &MultiPoly, j: u32) -> bool {
    p.terms().filter(|(m, _)| m.0[1] == j).count() == 1
}

/// `P(s, y0 + y)`.
fn shift_y(p: &MultiPoly, y0: &Scalar) -> MultiPoly {
    let v = p.vars().to_vec();
    let s = MultiPoly::var(v.clone(), 0);
    let y = MultiPoly::var(v.clone(), 1).add(&MultiPoly::constant(v, y0.clone()));
    p.compose(&[s, y]).expect("two substitutions")
}

fn map_terms(p: &MultiPoly, f: impl Fn(u32, u32) -> (u32, u32)) -> MultiPoly {
    let mut out = MultiPoly::zero(p.vars().to_vec());
    for (m, c) in p.terms() {
        let (a, b) = f(m.0[0], m.0[1]);
        out.add_term(Monomial(vec![a, b]), c.clone());
    }
    out
}

fn clean(p: MultiPoly, tol: f64) -> MultiPoly {
    if p.is_exact() {
        p
    } else {
        p.clean(tol)
    }
}

fn infinity_branch(b: &RawBranch, a_shift: Option<i64>, y0: Option<&Scalar>, two_m1: usize) -> Result<InfinityBranch> {
    let e = b.m as usize;
    let n = b.phi.order();
    // y = t^a U(t)
    let (a, u) = match (a_shift, y0) {
        (None, Some(y0)) => (0i64, b.phi.add(&TruncSeries::monomial(y0.clone(), 0, n))),
        (Some(sign), None) => {
            let v = b.phi.valuation_tol(DEFAULT_TOL).ok_or(Error::InsufficientOrder { have: n, needs: 2 * n })?;
            let w = b.phi.shift_down(v)?;
            let w = if sign < 0 { w.recip()? } else { w };
            (sign * v as i64, w)
        }
        _ => unreachable!(),
    };
    let ratio = u.derivative().mul(&u.recip()?);
    let mut g = ratio.shift_up(e + 1);
    let lead = TruncSeries::monomial(Scalar::int(a), e, g.order());
    g = g.add(&lead);
    let factor = &(-&b.c) / &Scalar::int(e as i64);
    let series = g.scalar_mul(&factor);
    let target = e * two_m1;
    let residue_coeff = if series.order() >= target {
        let ct = b.c.powi(two_m1 as i64);
        Some(&series.coeff(target) / &ct)
    } else {
        None
    };
    Ok(InfinityBranch { e: b.m, c: b.c.clone(), a, series, residue_coeff })
}

fn branches_at_infinity(p: &MultiPoly, m: u32, order: usize, tol: f64) -> Result<Vec<InfinityBranch>> {
    let two_m1 = 2 * m as usize + 1;
    let ds = p.degree_in(0);
    let dy = p.degree_in(1);
    // s^D P(1/s, y)
    let pt = clean(map_terms(p, |a, b| (ds - a, b)), tol);
    let mut out = Vec::new();
    let at0: Vec<Scalar> = (0..=dy).map(|j| pt.coeff(&[0, j])).collect();
    for r in roots(&at0) {
        if r.value.is_zero_tol(tol) {
            continue;
        }
        let q = clean(shift_y(&pt, &r.value), tol);
        for b in raw_branches(&q, order, tol)? {
            out.push(infinity_branch(&b, None, Some(&r.value), two_m1)?);
        }
    }
    if pt.coeff(&[0, 0]).is_zero_tol(tol) {
        for b in raw_branches(&pt, order, tol)? {
            out.push(infinity_branch(&b, Some(1), None, two_m1)?);
        }
    }
    if at0[dy as usize].is_zero_tol(tol) {
        let v = clean(map_terms(&pt, |a, b| (a, dy - b)), tol);
        for b in raw_branches(&v, order, tol)? {
            out.push(infinity_branch(&b, Some(-1), None, two_m1)?);
        }
    }
    Ok(out)
}

/// Run the three gates for `P(s, y)` (variables in that order) and `M`.
pub fn check_algebraic_l(p: &MultiPoly, m: u32, order: usize) -> Result<AlgebraicLReport> {
    if p.dim() != 2 {
        return Err(Error::DimMismatch { expected: 2, got: p.dim() });
    }
    let tol = DEFAULT_TOL;
    let p = sy(p);
    let dy = p.degree_in(1);
    let monomial_ends = y_coeff_is_monomial(&p, 0) && y_coeff_is_monomial(&p, dy);

    let q = clean(shift_y(&p, &Scalar::one()), tol);
    if !q.coeff(&[0, 0]).is_zero_tol(tol) {
        return Err(Error::NoBranchThroughOne);
    }
    let local = raw_branches(&q, order, tol)?;
    let b = local.iter().find(|b| b.m == 1).ok_or(Error::NoBranchThroughOne)?;
    // u(s) = phi(s / c)
    let cinv = b.c.inv().ok_or(Error::NoBranchThroughOne)?;
    let mut scale = Scalar::one();
    let mut u = TruncSeries::zero(b.phi.order());
    for j in 0..=b.phi.order() {
        u.set_coeff(j, &b.phi.coeff(j) * &scale);
        scale = &scale * &cinv;
    }
    let l = u.add(&TruncSeries::one(u.order())).log()?;
    let l_tag = match branch_from_param(m, &Scalar::one(), &l).and_then(|br| classify_branch(&br)) {
        Ok((cls, _)) => Some(cls.tag),
        Err(Error::InsufficientOrder { .. }) => None,
        Err(e) => return Err(e),
    };
    let local_gate = matches!(l_tag, Some(Tag::Curve) | Some(Tag::Isolated));

    let mut n = order.max(8 * (m as usize + 1));
    let infinity = loop {
        let br = branches_at_infinity(&p, m, n, tol)?;
        if br.iter().all(|b| b.residue_coeff.is_some()) || n >= 16 * order.max(32) {
            break br;
        }
        n *= 2;
    };
    let no_residue_term = infinity
        .iter()
        .all(|b| b.residue_coeff.as_ref().is_some_and(|c| c.is_zero_tol(tol)));
    Ok(AlgebraicLReport {
        m,
        monomial_ends,
        l: Some(l),
        l_tag,
        local_gate,
        infinity,
        no_residue_term,
        irreducibility_verified: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn p(s: &str) -> MultiPoly {
        parse_poly(s, Some(&["s".to_string(), "y".to_string()])).unwrap()
    }

    #[test]
    fn sqrt_family_passes() {
        let r = check_algebraic_l(&p("y^4 - 4s^2 y^2 - 1"), 1, 16).unwrap();
        assert!(r.monomial_ends);
        assert_eq!(r.l_tag, Some(Tag::Isolated));
        assert!(r.no_residue_term, "{:?}", r.infinity.iter().map(|b| &b.residue_coeff).collect::<Vec<_>>());
        assert!(r.passed());
        let l = r.l.unwrap();
        assert_eq!(l.coeff(2), Scalar::one());
    }

    #[test]
    fn imaginary_quartic_passes() {
        let r = check_algebraic_l(&p("y^4 - 4i s^2 y^2 - 1"), 1, 16).unwrap();
        assert_eq!(r.l_tag, Some(Tag::Curve));
        assert!(r.passed());
    }

    #[test]
    fn residue_at_infinity_fails() {
        let r = check_algebraic_l(&p("y^2 - 2i s y - 1"), 1, 16).unwrap();
        assert!(r.monomial_ends);
        assert!(r.local_gate);
        assert!(!r.no_residue_term);
        assert!(r.infinity.iter().any(|b| b.residue_coeff.as_ref().is_some_and(|c| !c.is_zero())));
    }

    #[test]
    fn quadratic_local_only() {
        // f = (1 + (1 + i s)^{1/2}) / 2
        let r = check_algebraic_l(&p("4y^2 - 4y - i s"), 1, 16).unwrap();
        let l = r.l.clone().unwrap();
        assert_eq!(l.coeff(1), Scalar::gauss_ratio(0, 1, 1, 4));
        assert_eq!(l.coeff(2), Scalar::ratio(3, 32));
        assert_eq!(r.l_tag, Some(Tag::Isolated));
        assert!(r.monomial_ends && r.no_residue_term);
    }

    #[test]
    fn no_branch_through_one() {
        assert!(matches!(check_algebraic_l(&p("y - 2 - s"), 1, 8), Err(Error::NoBranchThroughOne)));
    }
}
