//! Puiseux branches of a plane curve `p(z, w) = 0` at the origin.
//!
//! Each branch is an injective parametrization `t -> (c t^M, phi(t))`.
//! The expansion follows the Newton polygon. For an edge of slope `-m/q`
//! and a root `xi` of its edge polynomial we substitute
//! `x = xi^v T^q`, `y = T^m (xi^u + y1)` with `u q - v m = 1`, which keeps
//! the working polynomial in Q(i) whenever `xi` is. Once a sheet becomes
//! regular the remaining series is solved by Newton iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multipoly::{Monomial, MultiPoly};
use crate::roots::roots;
use crate::scalar::{root_of_unity, Scalar, DEFAULT_TOL};
use crate::series::{binomial, SeriesJson, TruncSeries};

/// One branch `t -> (c t^M, phi(t))`.
#[derive(Clone, Debug, PartialEq)]
pub struct PuiseuxBranch {
    pub m: u32,
    pub c: Scalar,
    /// `c = exp(2 pi i k / n)` recorded as `(k, n)` when known exactly.
    pub c_turns: Option<(i64, i64)>,
    pub phi: TruncSeries,
    pub multiplicity: usize,
    pub certified_order: usize,
}

/// Output of the expansion before normalization: `x = c T^M`, `y = phi(T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RawBranch {
    pub m: u32,
    pub c: Scalar,
    pub phi: TruncSeries,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BranchJson {
    #[serde(rename = "M")]
    pub m: u32,
    pub c: Scalar,
    pub phi: SeriesJson,
    pub multiplicity: usize,
    pub certified_order: usize,
}

impl PuiseuxBranch {
    pub fn to_json(&self) -> BranchJson {
        BranchJson {
            m: self.m,
            c: self.c.clone(),
            phi: self.phi.to_json("t"),
            multiplicity: self.multiplicity,
            certified_order: self.certified_order,
        }
    }

    pub fn from_json(j: &BranchJson) -> Result<Self> {
        Ok(PuiseuxBranch {
            m: j.m,
            c: j.c.clone(),
            c_turns: None,
            phi: TruncSeries::from_json(&j.phi)?,
            multiplicity: j.multiplicity,
            certified_order: j.certified_order,
        })
    }

    pub fn order(&self) -> usize {
        self.phi.order()
    }

    /// Valuation of `phi` (`a0`), `None` if `phi` vanishes to its order.
    pub fn a0(&self) -> Option<usize> {
        self.phi.valuation()
    }

    /// First nonzero coefficient of `phi`.
    pub fn psi0(&self) -> Option<Scalar> {
        self.a0().map(|a| self.phi.coeff(a))
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

struct State {
    c: Scalar,
    r: u32,
    p: Vec<Scalar>,
    kappa: Scalar,
    e: usize,
}

fn work_vars() -> Vec<String> {
    vec!["T".into(), "y".into()]
}

fn min_y_exp(q: &MultiPoly) -> u32 {
    q.terms().map(|(m, _)| m.0[1]).min().unwrap_or(0)
}

/// `ord_y Q(0, y)`, `None` when `Q(0, y)` vanishes identically.
fn ord_y_at_zero(q: &MultiPoly) -> Option<u32> {
    q.terms().filter(|(m, _)| m.0[0] == 0).map(|(m, _)| m.0[1]).min()
}

fn divide_monomial(q: &MultiPoly, a: u32, b: u32) -> MultiPoly {
    let mut out = MultiPoly::zero(work_vars());
    for (m, c) in q.terms() {
        out.add_term(Monomial(vec![m.0[0] - a, m.0[1] - b]), c.clone());
    }
    out
}

/// `Q(mu T^q, T^m (beta + y1)) / T^v`.
fn substitute_edge(q: &MultiPoly, qq: u32, mm: u32, mu: &Scalar, beta: &Scalar, v: u32, tol: f64) -> MultiPoly {
    let mut out = MultiPoly::zero(work_vars());
    let maxj = q.degree_in(1);
    let beta_pows: Vec<Scalar> = (0..=maxj).map(|k| beta.powi(k as i64)).collect();
    for (m, c) in q.terms() {
        let (i, j) = (m.0[0], m.0[1]);
        let texp = qq * i + mm * j;
        debug_assert!(texp >= v);
        let base = c * &mu.powi(i as i64);
        for l in 0..=j {
            let coef = &(&base * &Scalar::rational(binomial(j as u64, l as u64))) * &beta_pows[(j - l) as usize];
            out.add_term(Monomial(vec![texp - v, l]), coef);
        }
    }
    if out.is_exact() {
        out
    } else {
        out.clean(tol)
    }
}

/// Evaluate `Q(T, y(T))` to order `n`.
fn eval_at_series(q: &MultiPoly, y: &TruncSeries, n: usize) -> TruncSeries {
    let y = TruncSeries::from_coeffs(y.truncate(n).into_coeffs(), n);
    let maxj = q.degree_in(1) as usize;
    let mut pows = vec![TruncSeries::one(n)];
    for _ in 0..maxj {
        let next = pows.last().unwrap().mul(&y);
        pows.push(next);
    }
    let mut acc = TruncSeries::zero(n);
    for (m, c) in q.terms() {
        let i = m.0[0] as usize;
        if i > n {
            continue;
        }
        let term = pows[m.0[1] as usize].shift_up(i).truncate(n).scalar_mul(c);
        acc = acc.add(&TruncSeries::from_coeffs(term.into_coeffs(), n));
    }
    acc
}

/// Solve `Q(T, y) = 0`, `y(0) = 0`, for a regular sheet (`Q_y(0,0) != 0`).
fn solve_regular(q: &MultiPoly, n: usize) -> Result<TruncSeries> {
    let qy = q.partial(1);
    let mut y = TruncSeries::zero(0);
    let mut prec = 0;
    while prec < n {
        prec = (2 * prec + 1).min(n);
        let yp = TruncSeries::from_coeffs(y.into_coeffs(), prec);
        let f = eval_at_series(q, &yp, prec);
        let df = eval_at_series(&qy, &yp, prec);
        let step = f.mul(&df.recip()?);
        y = yp.sub(&step);
    }
    Ok(TruncSeries::from_coeffs(y.into_coeffs(), n))
}

fn finish(state: &State, ycur: Option<&TruncSeries>, n: usize) -> TruncSeries {
    let mut phi = TruncSeries::from_coeffs(state.p.clone(), n);
    if let Some(yc) = ycur {
        if state.e <= n {
            let tail = yc.shift_up(state.e).scalar_mul(&state.kappa);
            phi = phi.add(&TruncSeries::from_coeffs(tail.truncate(n).into_coeffs(), n));
        }
    }
    phi
}

fn lower_hull(q: &MultiPoly, r: u32) -> Vec<((u32, u32), (u32, u32))> {
    // points (j, min i) for j in 0..=r
    let mut pts: Vec<(u32, u32)> = Vec::new();
    for j in 0..=r {
        if let Some(i) = q.terms().filter(|(m, _)| m.0[1] == j).map(|(m, _)| m.0[0]).min() {
            pts.push((j, i));
        }
    }
    let mut edges = Vec::new();
    let mut cur = pts[0];
    while cur.0 < r {
        let mut best: Option<(u32, u32)> = None;
        for &p in pts.iter().filter(|p| p.0 > cur.0) {
            best = match best {
                None => Some(p),
                Some(b) => {
                    // slope (p.1 - cur.1)/(p.0 - cur.0) vs (b.1 - cur.1)/(b.0 - cur.0)
                    let lhs = (p.1 as i64 - cur.1 as i64) * (b.0 as i64 - cur.0 as i64);
                    let rhs = (b.1 as i64 - cur.1 as i64) * (p.0 as i64 - cur.0 as i64);
                    if lhs < rhs || (lhs == rhs && p.0 > b.0) {
                        Some(p)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        let b = best.expect("hull reaches (r, 0)");
        edges.push((cur, b));
        cur = b;
    }
    edges
}

fn recurse(q: MultiPoly, state: State, n: usize, tol: f64, out: &mut Vec<RawBranch>, depth: usize) -> Result<()> {
    if depth > 64 + n {
        return Err(Error::NumericalDegeneracy("Newton polygon recursion did not terminate".into()));
    }
    let mut q = q;
    let j0 = min_y_exp(&q);
    if j0 > 0 {
        out.push(RawBranch {
            m: state.r,
            c: state.c.clone(),
            phi: finish(&state, None, n),
            multiplicity: j0 as usize,
        });
        q = divide_monomial(&q, 0, j0);
    }
    if q.is_zero() {
        return Ok(());
    }
    let r = match ord_y_at_zero(&q) {
        Some(r) => r,
        None => {
            let i0 = q.terms().map(|(m, _)| m.0[0]).min().unwrap_or(0);
            q = divide_monomial(&q, i0, 0);
            match ord_y_at_zero(&q) {
                Some(r) => r,
                None => return Ok(()),
            }
        }
    };
    if r == 0 {
        return Ok(());
    }
    if state.e >= n {
        out.push(RawBranch {
            m: state.r,
            c: state.c.clone(),
            phi: finish(&state, None, n),
            multiplicity: r as usize,
        });
        return Ok(());
    }
    if r == 1 {
        let ycur = solve_regular(&q, n - state.e)?;
        out.push(RawBranch {
            m: state.r,
            c: state.c.clone(),
            phi: finish(&state, Some(&ycur), n),
            multiplicity: 1,
        });
        return Ok(());
    }
    for ((j1, i1), (j2, i2)) in lower_hull(&q, r) {
        let dj = (j2 - j1) as u64;
        let di = (i1 - i2) as u64;
        let g = gcd(dj, di);
        let (qq, mm) = ((dj / g) as u32, (di / g) as u32);
        let steps = (j2 - j1) / qq;
        let chi: Vec<Scalar> = (0..=steps)
            .map(|k| q.coeff(&[i1 - k * mm, j1 + k * qq]))
            .collect();
        let (_, x, y) = ext_gcd(qq as i64, mm as i64);
        let (u, v) = (x, -y);
        let vshift = qq * i1 + mm * j1;
        for root in roots(&chi) {
            let xi = root.value;
            let mu = xi.powi(v);
            let beta = xi.powi(u);
            let q1 = substitute_edge(&q, qq, mm, &mu, &beta, vshift, tol);
            // y = P(mu T^q) + kappa mu^e beta T^{qe+m} + kappa mu^e T^{qe+m} y1
            let mut p1 = vec![Scalar::zero(); n + 1];
            for (j, pj) in state.p.iter().enumerate() {
                let idx = j * qq as usize;
                if idx <= n && !pj.is_exact_zero() {
                    p1[idx] = pj * &mu.powi(j as i64);
                }
            }
            let kappa1 = &state.kappa * &mu.powi(state.e as i64);
            let e1 = state.e * qq as usize + mm as usize;
            if e1 <= n {
                p1[e1] += &(&kappa1 * &beta);
            }
            let next = State {
                c: &state.c * &mu.powi(state.r as i64),
                r: state.r * qq,
                p: p1,
                kappa: kappa1,
                e: e1,
            };
            recurse(q1, next, n, tol, out, depth + 1)?;
        }
    }
    Ok(())
}

/// All branches of a bivariate polynomial through the origin, before
/// normalization. The first variable plays the role of `x = c T^M`.
pub fn raw_branches(p: &MultiPoly, order: usize, tol: f64) -> Result<Vec<RawBranch>> {
    if p.dim() != 2 {
        return Err(Error::DimMismatch { expected: 2, got: p.dim() });
    }
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !p.coeff(&[0, 0]).is_zero_tol(tol) {
        return Err(Error::NotAtOrigin);
    }
    let q = p.with_vars(work_vars());
    let q = if q.is_exact() { q } else { q.clean(tol) };
    let mut q = q;
    let c0 = q.coeff(&[0, 0]);
    if !c0.is_exact_zero() {
        q.add_term(Monomial(vec![0, 0]), -c0);
    }
    let state = State {
        c: Scalar::one(),
        r: 1,
        p: vec![Scalar::zero(); order + 1],
        kappa: Scalar::one(),
        e: 0,
    };
    let mut out = Vec::new();
    recurse(q, state, order, tol, &mut out, 0)?;
    Ok(out)
}

/// Normalize `(M, c, phi)`: fold `|c|` into the parameter, then rotate so
/// the first nonzero coefficient of `phi` lies in `i (0, inf)`.
pub fn normalize_branch(raw: &RawBranch) -> PuiseuxBranch {
    normalize_parts(raw.m, &raw.c, None, &raw.phi, raw.multiplicity, raw.phi.order())
}

fn unit_turns(u: &Scalar) -> Option<i64> {
    if !u.is_exact() {
        return None;
    }
    [Scalar::one(), Scalar::i(), Scalar::int(-1), -Scalar::i()]
        .iter()
        .position(|x| x == u)
        .map(|k| k as i64)
}

fn reduce_turns(k: i64, n: i64) -> (i64, i64) {
    let g = gcd(k.rem_euclid(n) as u64, n as u64).max(1) as i64;
    (k.rem_euclid(n) / g, n / g)
}

pub(crate) fn normalize_parts(
    m: u32,
    c: &Scalar,
    c_turns: Option<(i64, i64)>,
    phi: &TruncSeries,
    multiplicity: usize,
    certified_order: usize,
) -> PuiseuxBranch {
    // |c|^{1/M}, exact when possible; t -> t / |c|^{1/M}
    let modulus = c.norm_sqr().principal_root(2 * m);
    let (mut c1, mut turns, mut phi1) = if modulus.is_one() && modulus.is_exact() {
        (c.clone(), c_turns, phi.clone())
    } else {
        let lam = modulus.inv().expect("nonzero c");
        let mut scale = Scalar::one();
        let phi1 = TruncSeries::new(
            phi.coeffs()
                .iter()
                .map(|a| {
                    let v = a * &scale;
                    scale = &scale * &lam;
                    v
                })
                .collect(),
        );
        (c * &lam.powi(m as i64), c_turns, phi1)
    };
    if turns.is_none() {
        turns = unit_turns(&c1).map(|k| reduce_turns(k, 4));
    }
    if let Some(a0) = phi1.valuation() {
        let psi0 = phi1.coeff(a0);
        let absval = psi0.norm_sqr().principal_root(2);
        let u = &(&Scalar::i() * &psi0.conj()) / &absval;
        let n = 4 * a0 as i64;
        match unit_turns(&u) {
            Some(k) => {
                let coeffs: Vec<Scalar> = phi1
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(j, a)| {
                        if a.is_exact_zero() {
                            a.clone()
                        } else {
                            a * &root_of_unity(k * j as i64, n)
                        }
                    })
                    .collect();
                let all_exact = coeffs.iter().all(Scalar::is_exact);
                phi1 = if all_exact || !phi1.is_exact() {
                    TruncSeries::new(coeffs)
                } else {
                    TruncSeries::new(coeffs).to_float()
                };
                c1 = &c1 * &root_of_unity(k * m as i64, n);
                turns = turns.map(|(a, b)| reduce_turns(a * n + k * m as i64 * b, b * n));
            }
            None => {
                let omega = u.principal_root(a0 as u32).to_float();
                let mut scale = Scalar::one();
                phi1 = TruncSeries::new(
                    phi1.coeffs()
                        .iter()
                        .map(|a| {
                            let v = a * &scale;
                            scale = &scale * &omega;
                            v
                        })
                        .collect(),
                )
                .to_float();
                c1 = &c1 * &omega.powi(m as i64);
                turns = None;
            }
        }
        // exact psi0 on the positive imaginary axis is restored exactly
        let p0 = phi1.coeff(a0);
        if !p0.is_exact() {
            phi1.set_coeff(a0, Scalar::float(0.0, p0.abs()));
        }
    }
    if let Some((k, n)) = turns {
        if !c1.is_exact() {
            c1 = root_of_unity(k, n);
        }
    }
    if !c1.is_exact() {
        let z = c1.to_c64();
        c1 = Scalar::from_c64(z / z.norm());
    }
    PuiseuxBranch {
        m,
        c: c1,
        c_turns: turns,
        phi: phi1,
        multiplicity,
        certified_order,
    }
}

/// Renormalize an already normalized branch (idempotent).
pub fn renormalize(b: &PuiseuxBranch) -> PuiseuxBranch {
    normalize_parts(b.m, &b.c, b.c_turns, &b.phi, b.multiplicity, b.certified_order)
}

/// Branches of `Z_p` through the origin, normalized.
///
/// Requires `d = 2`, `p(0, 0) = 0` and `p(0, w)` not identically zero.
pub fn expand_branches(p: &MultiPoly, order: usize) -> Result<Vec<PuiseuxBranch>> {
    expand_branches_tol(p, order, DEFAULT_TOL)
}

pub fn expand_branches_tol(p: &MultiPoly, order: usize, tol: f64) -> Result<Vec<PuiseuxBranch>> {
    if p.dim() != 2 {
        return Err(Error::DimMismatch { expected: 2, got: p.dim() });
    }
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if p.terms().all(|(m, c)| m.0[0] > 0 || c.is_zero_tol(tol)) {
        return Err(Error::NotWGeneral);
    }
    let raw = raw_branches(p, order, tol)?;
    Ok(raw.iter().map(normalize_branch).collect())
}

/// `ord_w p(0, w)`.
pub fn w_order_at_origin(p: &MultiPoly) -> Option<u32> {
    p.terms().filter(|(m, _)| m.0[0] == 0).map(|(m, _)| m.0[1]).min()
}

/// True iff `gcd(M, {j : phi_j != 0}) = 1` up to the truncation order.
pub fn branch_is_injective(b: &PuiseuxBranch) -> bool {
    let mut g = b.m as u64;
    for (j, c) in b.phi.coeffs().iter().enumerate() {
        if !c.is_zero() {
            g = gcd(g, j as u64);
        }
    }
    g == 1
}

/// `p(c t^M, phi(t))` as a series of order `order(phi)`.
pub fn residual(p: &MultiPoly, m: u32, c: &Scalar, phi: &TruncSeries) -> TruncSeries {
    let n = phi.order();
    let z = TruncSeries::monomial(c.clone(), m as usize, n);
    let zmax = p.degree_in(0) as usize;
    let wmax = p.degree_in(1) as usize;
    let mut zp = vec![TruncSeries::one(n)];
    for _ in 0..zmax {
        let next = zp.last().unwrap().mul(&z);
        zp.push(next);
    }
    let mut wp = vec![TruncSeries::one(n)];
    for _ in 0..wmax {
        let next = wp.last().unwrap().mul(phi);
        wp.push(next);
    }
    let mut acc = TruncSeries::zero(n);
    for (mono, coef) in p.terms() {
        acc = acc.add(&zp[mono.0[0] as usize].mul(&wp[mono.0[1] as usize]).scalar_mul(coef));
    }
    acc
}

/// Residual check for a normalized branch: zero exactly, or within `tol`
/// relative to the largest coefficient of `p` in the float backend.
pub fn residual_ok(p: &MultiPoly, b: &PuiseuxBranch, tol: f64) -> bool {
    let r = residual(p, b.m, &b.c, &b.phi);
    let scale = p.max_abs() * b.phi.max_abs().max(1.0).powi(p.total_degree() as i32);
    r.coeffs().iter().all(|x| x.is_zero_scaled(tol, scale.max(1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use proptest::prelude::*;

    fn p(s: &str) -> MultiPoly {
        parse_poly(s, Some(&["z".to_string(), "w".to_string()])).unwrap()
    }

    fn s_ints(v: &[(usize, Scalar)], n: usize) -> TruncSeries {
        let mut s = TruncSeries::zero(n);
        for (k, c) in v {
            s.set_coeff(*k, c.clone());
        }
        s
    }

    #[test]
    fn parabola() {
        let b = expand_branches(&p("w - z^2"), 8).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].m, 1);
        assert_eq!(b[0].phi, s_ints(&[(2, Scalar::i())], 8));
        assert_eq!(b[0].c_turns, Some((1, 8)));
        let c = b[0].c.to_c64();
        let want = num_complex::Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        assert!((c - want).norm() < 1e-15);
        assert!(residual_ok(&p("w - z^2"), &b[0], 1e-12));
    }

    #[test]
    fn next_simplest() {
        // phi = (i/2)((1 + 4 t^2)^{1/2} - 1)
        let n = 12;
        let b = expand_branches(&p("w - i*w^2 - i*z^2"), n).unwrap();
        assert_eq!(b.len(), 1);
        let root = TruncSeries::from_coeffs(vec![Scalar::one(), Scalar::zero(), Scalar::int(4)], n)
            .nth_root(2)
            .unwrap();
        let want = root.sub(&TruncSeries::one(n)).scalar_mul(&Scalar::gauss_ratio(0, 1, 1, 2));
        assert_eq!(b[0].phi, want);
        assert_eq!(b[0].c, Scalar::one());
    }

    #[test]
    fn imaginary_quartic_branches() {
        // phi = (1/2)((1 + 4 i t^2)^{1/2} - 1), already normalized (psi0 = i)
        let n = 10;
        let b = expand_branches(&p("w^2 + w - i*z^2"), n).unwrap();
        assert_eq!(b.len(), 1);
        let root = TruncSeries::from_coeffs(vec![Scalar::one(), Scalar::zero(), Scalar::gauss_ratio(0, 1, 4, 1)], n)
            .nth_root(2)
            .unwrap();
        let want = root.sub(&TruncSeries::one(n)).scalar_mul(&Scalar::ratio(1, 2));
        assert_eq!(b[0].phi, want);
        assert_eq!(b[0].phi.coeff(2), Scalar::i());
    }

    #[test]
    fn ramified_cusp() {
        // w^2 = z^3: one branch with M = 2
        let q = p("w^2 - z^3");
        let b = expand_branches(&q, 10).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].m, 2);
        assert!(branch_is_injective(&b[0]));
        assert!(residual_ok(&q, &b[0], 1e-12));
        assert_eq!(b[0].a0(), Some(3));
    }

    #[test]
    fn repeated_and_zero_branches() {
        let q = p("w*(w - z^2)^2");
        let b = expand_branches(&q, 8).unwrap();
        let total: usize = b.iter().map(|x| x.m as usize * x.multiplicity).sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn errors() {
        assert_eq!(expand_branches(&p("z*w - z^2"), 5), Err(Error::NotWGeneral));
        assert_eq!(expand_branches(&p("1 + w"), 5), Err(Error::NotAtOrigin));
        assert_eq!(expand_branches(&MultiPoly::zero(vec!["z".into(), "w".into()]), 5), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn normalize_examples() {
        let n = 6;
        let raw = RawBranch { m: 1, c: Scalar::one(), phi: s_ints(&[(2, -Scalar::i())], n), multiplicity: 1 };
        let b = normalize_branch(&raw);
        assert_eq!(b.phi, s_ints(&[(2, Scalar::i())], n));
        assert_eq!(b.c, Scalar::i());

        let raw = RawBranch { m: 1, c: Scalar::one(), phi: s_ints(&[(2, Scalar::i())], n), multiplicity: 1 };
        let b = normalize_branch(&raw);
        assert_eq!(b.phi, raw.phi);
        assert_eq!(b.c, Scalar::one());

        // z = 2t, w = i t^2 folds to z = t, w = (i/4) t^2
        let raw = RawBranch { m: 1, c: Scalar::int(2), phi: s_ints(&[(2, Scalar::i())], n), multiplicity: 1 };
        let b = normalize_branch(&raw);
        assert_eq!(b.c, Scalar::one());
        assert_eq!(b.phi, s_ints(&[(2, Scalar::gauss_ratio(0, 1, 1, 4))], n));
        assert!(residual_ok(&p("w - i/4*z^2"), &b, 0.0));
    }

    #[test]
    fn injectivity() {
        let mk = |m, phi| PuiseuxBranch { m, c: Scalar::one(), c_turns: None, phi, multiplicity: 1, certified_order: 12 };
        assert!(!branch_is_injective(&mk(2, s_ints(&[(4, Scalar::i())], 12))));
        assert!(branch_is_injective(&mk(2, s_ints(&[(4, Scalar::i()), (9, Scalar::one())], 12))));
        assert!(branch_is_injective(&mk(1, s_ints(&[(4, Scalar::i())], 12))));
    }

    fn wgeneral_poly() -> impl Strategy<Value = MultiPoly> {
        (
            prop::collection::vec(((0u32..=3, 0u32..=2), (-5i64..=5, -5i64..=5)), 1..6),
            1u32..=3,
            (-3i64..=3, -3i64..=3),
        )
            .prop_map(|(ts, k, (a, b))| {
                let mut q = MultiPoly::zero(vec!["z".into(), "w".into()]);
                for ((i, j), (re, im)) in ts {
                    if i + j > 0 && i + j <= 5 {
                        q.add_term(Monomial(vec![i, j]), Scalar::gauss_ratio(re, 1, im, 1));
                    }
                }
                // guarantee a pure w^k term so p(0, w) is not identically zero
                let c = if a == 0 && b == 0 { Scalar::one() } else { Scalar::gauss_ratio(a, 1, b, 1) };
                q.add_term(Monomial(vec![0, k]), c);
                q
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn multiplicity_sum_and_residual(q in wgeneral_poly()) {
            prop_assume!(w_order_at_origin(&q).is_some());
            let r = w_order_at_origin(&q).unwrap() as usize;
            let n = 10;
            let bs = expand_branches(&q, n).unwrap();
            let total: usize = bs.iter().map(|b| b.m as usize * b.multiplicity).sum();
            prop_assert_eq!(total, r);
            for b in &bs {
                prop_assert!(residual_ok(&q, b, 1e-7), "residual failed for {:?}", b);
            }
        }

        #[test]
        fn normalization_idempotent(q in wgeneral_poly()) {
            prop_assume!(w_order_at_origin(&q).is_some());
            for b in expand_branches(&q, 8).unwrap() {
                let again = renormalize(&b);
                prop_assert_eq!(again.m, b.m);
                for (x, y) in again.phi.coeffs().iter().zip(b.phi.coeffs()) {
                    prop_assert!((x.to_c64() - y.to_c64()).norm() <= 1e-9 * y.abs().max(1.0));
                }
                prop_assert!((again.c.to_c64() - b.c.to_c64()).norm() <= 1e-9);
            }
        }
    }
}
