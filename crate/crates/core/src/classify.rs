//! Classification of normalized branches near a boundary zero.
//!
//! A branch `t -> (c t^M, phi(t))` avoids the Siegel domain near the origin
//! iff `G(t) = |t|^{2M} - Im phi(t) >= 0` for small `t`. With
//! `a0 = val(phi)` and `psi0` its leading coefficient the branch is basic
//! when `a0 > 2M` or `a0 = 2M, |psi0| < 1`, unstable when `a0 < 2M` or
//! `|psi0| > 1`, and otherwise the series `L` decides between curve type,
//! isolated type and instability.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::multipoly::MultiPoly;
use crate::puiseux::{expand_branches_tol, PuiseuxBranch};
use crate::scalar::{root_of_unity, Scalar, DEFAULT_TOL};
use crate::series::{SeriesJson, TruncSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tag {
    Basic,
    Isolated,
    Curve,
    Unstable,
}

/// Data attached to an isolated-type branch.
#[derive(Clone, Debug, PartialEq)]
pub struct IsolatedData {
    pub k: usize,
    /// `A0(u)`, real coefficients, degree `< 2K`.
    pub a0_poly: TruncSeries,
    /// `L_{2MK}`, the constant term of `L1`; its real part is positive.
    pub l1_lead: Scalar,
    /// `phi0(u) = sum_{j < 2(K+1)} phi_{jM} u^j`.
    pub phi0: TruncSeries,
    pub lower_bound_exponent: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchClass {
    pub tag: Tag,
    pub m: u32,
    pub c: Scalar,
    pub a0: Option<usize>,
    pub psi0: Option<Scalar>,
    pub isolated: Option<IsolatedData>,
    /// `L` for branches that passed the non-basic gate.
    pub l: Option<TruncSeries>,
    /// A point `(z, w)` of the branch inside the domain, for unstable branches.
    pub witness: Option<[Complex64; 2]>,
    pub certified_order: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationTrace {
    pub mu: Scalar,
    pub nu: Scalar,
    /// `m(k)` for `k = 0..2M`, `None` when no index up to the order qualifies.
    pub m_of_k: Vec<Option<usize>>,
    /// Leading `(exponent, coefficient)` of `G(Psi(r mu^k))` per `k`.
    pub g_leading: Vec<Option<(usize, Scalar)>>,
}

/// `(L, Phi, Psi)` for a branch in the non-basic regime.
#[derive(Clone, Debug, PartialEq)]
pub struct LData {
    pub m: u32,
    pub l: TruncSeries,
    pub phi_cap: TruncSeries,
    pub psi: TruncSeries,
}

fn is_i(x: &Scalar, tol: f64) -> bool {
    (x - &Scalar::i()).is_zero_tol(tol)
}

/// Build `Phi`, `Psi = Phi^{-1}` and `L = log(Psi(s)/s)` from
/// `i t phi'(t) / (-2M) = Phi(t)^{2M}`.
pub fn build_l(b: &PuiseuxBranch) -> Result<LData> {
    build_l_tol(b, DEFAULT_TOL)
}

pub fn build_l_tol(b: &PuiseuxBranch, tol: f64) -> Result<LData> {
    let two_m = 2 * b.m as usize;
    let a0 = b.phi.valuation_tol(tol);
    if a0 != Some(two_m) || !is_i(&b.phi.coeff(two_m), tol) {
        return Err(Error::NotNonBasic);
    }
    let n = b.phi.order();
    if n <= two_m {
        return Err(Error::InsufficientOrder { have: n, needs: two_m + 1 });
    }
    let scale = &Scalar::i() / &Scalar::int(-(two_m as i64));
    let h = b.phi.derivative().shift_up(1).scalar_mul(&scale);
    let mut base = h.shift_down(two_m).map_err(|_| Error::NotNonBasic)?;
    // the leading coefficient is 1 up to rounding on the float backend
    base.set_coeff(0, Scalar::one());
    let root = base.nth_root(two_m as u32)?;
    let phi_cap = root.shift_up(1);
    let psi = phi_cap.reversion()?;
    let l = psi.shift_down(1)?.log()?;
    Ok(LData { m: b.m, l, phi_cap, psi })
}

/// `i s^{2M} + 2M i * int_0^s w^{2M} L'(w) dw`, the second coordinate of the
/// `L`-parametrization.
pub fn w_of_l(m: u32, l: &TruncSeries) -> TruncSeries {
    let two_m = 2 * m as usize;
    let integral = l.derivative().shift_up(two_m).antiderivative();
    let lead = TruncSeries::monomial(Scalar::i(), two_m, integral.order());
    lead.add(&integral.scalar_mul(&Scalar::gauss_ratio(0, 1, two_m as i64, 1)))
}

/// Real part of `f(r omega^k)` as a series in real `r`, with
/// `omega = exp(2 pi i / n)`.
fn rotated_real_part(f: &TruncSeries, k: i64, n: i64) -> TruncSeries {
    TruncSeries::new(
        f.coeffs()
            .iter()
            .enumerate()
            .map(|(j, a)| {
                if a.is_exact_zero() {
                    a.clone()
                } else {
                    (a * &root_of_unity(k * j as i64, n)).re()
                }
            })
            .collect(),
    )
}

/// `G(Psi(r mu^k))` as a real series in `r` (`mu = exp(i pi / M)`):
/// `r^{2M} (exp(2M Re L(r mu^k)) - 1) - 2M Re int_0^{r mu^k} w^{2M} L'(w) dw`.
pub fn g_critical_series(ld: &LData, k: i64) -> Result<TruncSeries> {
    let two_m = 2 * ld.m as i64;
    let re_l = rotated_real_part(&ld.l, k, two_m);
    let em1 = re_l.scalar_mul(&Scalar::int(two_m)).exp_m1()?;
    let first = em1.shift_up(two_m as usize);
    let integral = ld.l.derivative().shift_up(two_m as usize).antiderivative();
    let second = rotated_real_part(&integral, k, two_m).scalar_mul(&Scalar::int(two_m));
    Ok(first.sub(&second))
}

/// Evaluate the angular critical value `G(Psi(r mu^k))`.
pub fn angular_critical_g(ld: &LData, r: f64, k: i64) -> Result<f64> {
    let g = g_critical_series(ld, k)?;
    Ok(g.eval_c64(Complex64::new(r, 0.0)).re)
}

/// Direct evaluation `G(t) = |t|^{2M} - Im phi(t)`.
pub fn g_direct(b: &PuiseuxBranch, t: Complex64) -> f64 {
    t.norm().powi(2 * b.m as i32) - b.phi.eval_c64(t).im
}

/// Radius inside which truncated series evaluation is trusted:
/// `0.5 / max_j |a_j|^{1/j}`.
pub fn reliability_radius(s: &TruncSeries) -> f64 {
    let mut worst: f64 = 0.0;
    for (j, a) in s.coeffs().iter().enumerate().skip(1) {
        let v = a.abs();
        if v > 0.0 {
            worst = worst.max(v.powf(1.0 / j as f64));
        }
    }
    if worst == 0.0 {
        0.5
    } else {
        (0.5 / worst).min(0.5)
    }
}

/// Pattern `phi = i t^{2M} + alpha t^{2M(K+1)} + ...` with `Im alpha < 0`:
/// returns `K` and the predicted leading coefficient `i (K+1) alpha / (2M)` of `L`.
pub fn simple_criterion(b: &PuiseuxBranch) -> Option<(usize, Scalar)> {
    let two_m = 2 * b.m as usize;
    if b.phi.valuation() != Some(two_m) || !is_i(&b.phi.coeff(two_m), DEFAULT_TOL) {
        return None;
    }
    let next = (two_m + 1..=b.phi.order()).find(|&j| !b.phi.coeff(j).is_zero())?;
    if next % two_m != 0 {
        return None;
    }
    let k = next / two_m - 1;
    let alpha = b.phi.coeff(next);
    if alpha.im_f64() >= 0.0 || alpha.im().is_zero() {
        return None;
    }
    let lead = &(&Scalar::i() * &Scalar::int(k as i64 + 1)) * &(&alpha / &Scalar::int(two_m as i64));
    Some((k, lead))
}

/// Outcome of the decomposition `L = i A0(s^M) + s^{2MK} L1`.
#[derive(Clone, Debug, PartialEq)]
pub enum LVerdict {
    Curve,
    Isolated { m: usize },
    Unstable { m: usize },
    Undecided,
}

/// First index `j` where `L_j != 0` and not (`M | j` with `Re L_j = 0`).
pub fn l_verdict(ld: &LData, tol: f64) -> LVerdict {
    let m = ld.m as usize;
    let scale = ld.l.max_abs().max(1.0);
    let first = (1..=ld.l.order()).find(|&j| {
        let c = ld.l.coeff(j);
        !c.is_zero_scaled(tol, scale) && !(j % m == 0 && c.re().is_zero_scaled(tol, scale))
    });
    match first {
        None if m == 1 => LVerdict::Curve,
        None => LVerdict::Undecided,
        Some(j) => {
            let re = ld.l.coeff(j).re_f64();
            if j % (2 * m) == 0 && re > 0.0 {
                LVerdict::Isolated { m: j }
            } else {
                LVerdict::Unstable { m: j }
            }
        }
    }
}

fn trace_for(ld: &LData, tol: f64) -> Result<ClassificationTrace> {
    let two_m = 2 * ld.m as i64;
    let mut m_of_k = Vec::new();
    let mut g_leading = Vec::new();
    for k in 0..two_m {
        let re = rotated_real_part(&ld.l, k, two_m);
        let scale = re.max_abs().max(1.0);
        m_of_k.push((1..=re.order()).find(|&j| !re.coeff(j).is_zero_scaled(tol, scale)));
        let g = g_critical_series(ld, k)?;
        let gscale = g.max_abs().max(1.0);
        g_leading.push(
            (0..=g.order())
                .find(|&j| !g.coeff(j).is_zero_scaled(tol, gscale))
                .map(|j| (j, g.coeff(j))),
        );
    }
    Ok(ClassificationTrace {
        mu: root_of_unity(1, two_m),
        nu: root_of_unity(1, 2 * two_m),
        m_of_k,
        g_leading,
    })
}

fn isolated_data(b: &PuiseuxBranch, ld: &LData, mm: usize) -> IsolatedData {
    let m = b.m as usize;
    let k = mm / (2 * m);
    let mut a0 = TruncSeries::zero(2 * k - 1);
    for j in 1..2 * k {
        a0.set_coeff(j, ld.l.coeff(m * j).im());
    }
    let mut phi0 = TruncSeries::zero(2 * (k + 1) - 1);
    for j in 0..2 * (k + 1) {
        phi0.set_coeff(j, b.phi.coeff(j * m));
    }
    IsolatedData {
        k,
        a0_poly: a0,
        l1_lead: ld.l.coeff(mm),
        phi0,
        lower_bound_exponent: 2 * m * (1 + k),
    }
}

fn base_class(b: &PuiseuxBranch, tag: Tag) -> BranchClass {
    BranchClass {
        tag,
        m: b.m,
        c: b.c.clone(),
        a0: b.a0(),
        psi0: b.psi0(),
        isolated: None,
        l: None,
        witness: None,
        certified_order: b.phi.order(),
    }
}

/// Classify a normalized branch. `p`, when given, is used to refine the
/// witness of an unstable branch onto the zero set.
pub fn classify_branch(b: &PuiseuxBranch) -> Result<(BranchClass, Option<ClassificationTrace>)> {
    classify_branch_with(b, None, DEFAULT_TOL)
}

pub fn classify_branch_with(
    b: &PuiseuxBranch,
    p: Option<&MultiPoly>,
    tol: f64,
) -> Result<(BranchClass, Option<ClassificationTrace>)> {
    let two_m = 2 * b.m as usize;
    let a0 = match b.phi.valuation_tol(tol) {
        None => return Ok((base_class(b, Tag::Basic), None)),
        Some(a) => a,
    };
    if a0 > two_m {
        return Ok((base_class(b, Tag::Basic), None));
    }
    if a0 < two_m {
        let mut cls = base_class(b, Tag::Unstable);
        cls.witness = basic_witness(b, p);
        return Ok((cls, None));
    }
    let modsq = b.phi.coeff(a0).norm_sqr();
    let diff = &modsq - &Scalar::one();
    if !diff.is_zero_tol(tol) {
        let tag = if diff.re_f64() < 0.0 { Tag::Basic } else { Tag::Unstable };
        let mut cls = base_class(b, tag);
        if tag == Tag::Unstable {
            cls.witness = basic_witness(b, p);
        }
        return Ok((cls, None));
    }
    let ld = build_l_tol(b, tol)?;
    let trace = trace_for(&ld, tol)?;
    let mut cls = base_class(b, Tag::Curve);
    cls.certified_order = ld.l.order();
    match l_verdict(&ld, tol) {
        LVerdict::Curve => {}
        LVerdict::Isolated { m } => {
            cls.tag = Tag::Isolated;
            cls.isolated = Some(isolated_data(b, &ld, m));
        }
        LVerdict::Unstable { .. } => {
            cls.tag = Tag::Unstable;
            cls.witness = nonbasic_witness(b, &ld, &trace, p);
        }
        LVerdict::Undecided => {
            return Err(Error::InsufficientOrder { have: b.phi.order(), needs: 2 * b.phi.order() });
        }
    }
    cls.l = Some(ld.l);
    Ok((cls, Some(trace)))
}

fn refine_on_zero_set(p: Option<&MultiPoly>, z: Complex64, w: Complex64) -> Complex64 {
    let p = match p {
        Some(p) if p.dim() == 2 => p,
        _ => return w,
    };
    let dw = p.partial(1);
    let mut w = w;
    for _ in 0..50 {
        let f = p.eval_c64(&[z, w]);
        let d = dw.eval_c64(&[z, w]);
        if d.norm() == 0.0 {
            break;
        }
        let step = f / d;
        w -= step;
        if step.norm() <= 1e-16 * w.norm().max(1e-300) {
            break;
        }
    }
    w
}

fn accept(b: &PuiseuxBranch, t: Complex64, p: Option<&MultiPoly>) -> Option<[Complex64; 2]> {
    let z = b.c.to_c64() * t.powu(b.m);
    let w0 = b.phi.eval_c64(t);
    if !(w0.im > z.norm_sqr()) {
        return None;
    }
    let w = refine_on_zero_set(p, z, w0);
    // keep the refined point only if it stayed on this sheet and inside the domain
    if w.im > z.norm_sqr() && (w - w0).norm() <= 0.5 * (w0.im - z.norm_sqr()) + 1e-300 {
        Some([z, w])
    } else if p.is_none() {
        Some([z, w0])
    } else {
        None
    }
}

fn basic_witness(b: &PuiseuxBranch, p: Option<&MultiPoly>) -> Option<[Complex64; 2]> {
    let mut r = reliability_radius(&b.phi);
    for _ in 0..60 {
        let t = Complex64::new(r, 0.0);
        if g_direct(b, t) < 0.0 {
            if let Some(pt) = accept(b, t, p) {
                return Some(pt);
            }
        }
        r *= 0.5;
    }
    None
}

fn nonbasic_witness(
    b: &PuiseuxBranch,
    ld: &LData,
    trace: &ClassificationTrace,
    p: Option<&MultiPoly>,
) -> Option<[Complex64; 2]> {
    let two_m = 2 * b.m as i64;
    let mut choices = Vec::new();
    for (k, lead) in trace.g_leading.iter().enumerate() {
        if let Some((e, g)) = lead {
            let g = g.re_f64();
            if g < 0.0 {
                choices.push((k as i64, 1.0));
            } else if e % 2 == 1 {
                choices.push((k as i64, -1.0));
            }
        }
    }
    let r0 = reliability_radius(&ld.psi).min(reliability_radius(&b.phi));
    for (k, sign) in choices {
        let mu_k = root_of_unity(k, two_m).to_c64();
        let mut r = r0;
        for _ in 0..60 {
            let t = ld.psi.eval_c64(mu_k * (sign * r));
            if g_direct(b, t) < 0.0 {
                if let Some(pt) = accept(b, t, p) {
                    return Some(pt);
                }
            }
            r *= 0.5;
        }
    }
    None
}

/// Verdict for a simple zero in `d` variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothVerdict {
    StrictContraction,
    ContractionBoundary,
    Violation,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothReport {
    pub gradient_parallel: bool,
    /// `A = -Hp(0) / (2 dp/dw(0))`, present when `dp/dw(0) != 0`.
    pub a_matrix: Option<Vec<Vec<Scalar>>>,
    pub op_norm: Option<f64>,
    pub singular_values: Vec<f64>,
    pub verdict: SmoothVerdict,
}

/// Singular values of a complex matrix, descending.
pub fn singular_values(a: &[Vec<Complex64>]) -> Vec<f64> {
    let n = a.len();
    if n == 0 {
        return vec![];
    }
    let m = DMatrix::from_fn(n, a[0].len(), |r, c| a[r][c]);
    let mut s: Vec<f64> = m.singular_values().iter().cloned().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

/// Check the simple-zero conditions at the origin: the gradient must be a
/// multiple of `e_d` and `A = -Hp(0)/(2 dp/dw(0))` must be contractive.
pub fn classify_simple_zero(p: &MultiPoly) -> Result<SmoothReport> {
    classify_simple_zero_tol(p, DEFAULT_TOL)
}

pub fn classify_simple_zero_tol(p: &MultiPoly, tol: f64) -> Result<SmoothReport> {
    if !p.coeff(&vec![0; p.dim()]).is_zero_tol(tol) {
        return Err(Error::NotAtOrigin);
    }
    let g = p.gradient_at_zero();
    if g.iter().all(|x| x.is_zero_tol(tol)) {
        return Err(Error::ZeroGradient);
    }
    let d = p.dim();
    let parallel = g[..d - 1].iter().all(|x| x.is_zero_tol(tol));
    let pw = &g[d - 1];
    if !parallel || pw.is_zero_tol(tol) {
        return Ok(SmoothReport {
            gradient_parallel: parallel,
            a_matrix: None,
            op_norm: None,
            singular_values: vec![],
            verdict: SmoothVerdict::Violation,
        });
    }
    let h = p.hessian_z();
    let f = &Scalar::int(-1) / &(&Scalar::int(2) * pw);
    let a: Vec<Vec<Scalar>> = h.iter().map(|row| row.iter().map(|x| x * &f).collect()).collect();
    let af: Vec<Vec<Complex64>> = a.iter().map(|r| r.iter().map(Scalar::to_c64).collect()).collect();
    let sv = singular_values(&af);
    let norm = sv.first().cloned().unwrap_or(0.0);
    let verdict = if norm < 1.0 - tol {
        SmoothVerdict::StrictContraction
    } else if norm <= 1.0 + tol {
        SmoothVerdict::ContractionBoundary
    } else {
        SmoothVerdict::Violation
    };
    Ok(SmoothReport {
        gradient_parallel: true,
        a_matrix: Some(a),
        op_norm: Some(norm),
        singular_values: sv,
        verdict,
    })
}

/// Options for whole-polynomial classification.
#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub order: usize,
    pub max_order: usize,
    pub tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { order: 32, max_order: 512, tol: DEFAULT_TOL }
    }
}

#[derive(Clone, Debug)]
pub struct ClassifiedBranch {
    pub branch: PuiseuxBranch,
    pub class: BranchClass,
    pub trace: Option<ClassificationTrace>,
}

/// All branches of a two-variable polynomial at the origin with their
/// classes. Doubles the order when a branch needs more coefficients.
#[derive(Clone, Debug)]
pub struct PolyClassification {
    pub order_used: usize,
    pub branches: Vec<ClassifiedBranch>,
}

impl PolyClassification {
    /// True when no branch enters the domain near the origin.
    pub fn locally_stable(&self) -> bool {
        self.branches.iter().all(|b| b.class.tag != Tag::Unstable)
    }
}

pub fn classify_polynomial(p: &MultiPoly, opts: &ClassifyOptions) -> Result<PolyClassification> {
    let mut n = opts.order.max(4);
    loop {
        match classify_at_order(p, n, opts.tol) {
            Ok(out) => return Ok(out),
            Err(Error::InsufficientOrder { .. }) if 2 * n <= opts.max_order => n *= 2,
            Err(Error::InsufficientOrder { .. }) => return Err(Error::Inconclusive(n)),
            Err(e) => return Err(e),
        }
    }
}

fn classify_at_order(p: &MultiPoly, n: usize, tol: f64) -> Result<PolyClassification> {
    let branches = expand_branches_tol(p, n, tol)?;
    let mut out = Vec::new();
    for b in branches {
        let (class, trace) = classify_branch_with(&b, Some(p), tol)?;
        out.push(ClassifiedBranch { branch: b, class, trace });
    }
    Ok(PolyClassification { order_used: n, branches: out })
}

/// Serializable classification report.
#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub tag: Tag,
    #[serde(rename = "M")]
    pub m: u32,
    pub c: Scalar,
    pub a0: Option<usize>,
    pub psi0: Option<Scalar>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    #[serde(rename = "A0")]
    pub a0_poly: Option<SeriesJson>,
    pub phi0: Option<SeriesJson>,
    #[serde(rename = "L")]
    pub l: Option<SeriesJson>,
    pub lower_bound_exponent: Option<usize>,
    pub witness: Option<Vec<Scalar>>,
    pub certified_order: usize,
    pub multiplicity: usize,
}

impl ClassifiedBranch {
    pub fn report(&self) -> ClassReport {
        let c = &self.class;
        let iso = c.isolated.as_ref();
        ClassReport {
            tag: c.tag,
            m: c.m,
            c: c.c.clone(),
            a0: c.a0,
            psi0: c.psi0.clone(),
            k: iso.map(|d| d.k),
            a0_poly: iso.map(|d| d.a0_poly.to_json("u")),
            phi0: iso.map(|d| d.phi0.to_json("u")),
            l: c.l.as_ref().map(|l| l.to_json("s")),
            lower_bound_exponent: iso.map(|d| d.lower_bound_exponent),
            witness: c.witness.map(|w| w.iter().map(|x| Scalar::from_c64(*x)).collect()),
            certified_order: c.certified_order,
            multiplicity: self.branch.multiplicity,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multipoly::in_siegel;
    use crate::parse::parse_poly;
    use crate::puiseux::expand_branches;
    use proptest::prelude::*;

    fn p(s: &str) -> MultiPoly {
        parse_poly(s, Some(&["z".to_string(), "w".to_string()])).unwrap()
    }

    fn branch(m: u32, coeffs: &[(usize, Scalar)], n: usize) -> PuiseuxBranch {
        let mut phi = TruncSeries::zero(n);
        for (k, c) in coeffs {
            phi.set_coeff(*k, c.clone());
        }
        PuiseuxBranch { m, c: Scalar::one(), c_turns: Some((0, 1)), phi, multiplicity: 1, certified_order: n }
    }

    fn only(q: &MultiPoly, n: usize) -> PuiseuxBranch {
        let mut b = expand_branches(q, n).unwrap();
        assert_eq!(b.len(), 1);
        b.remove(0)
    }

    #[test]
    fn parabola_has_zero_l() {
        let b = only(&p("w - z^2"), 16);
        let ld = build_l(&b).unwrap();
        assert!(ld.l.is_zero_tol(0.0));
        assert_eq!(ld.psi, TruncSeries::var(ld.psi.order()));
        let (cls, _) = classify_branch(&b).unwrap();
        assert_eq!(cls.tag, Tag::Curve);
        for k in 0..2 {
            assert_eq!(angular_critical_g(&ld, 0.1, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn sqrt_family_l() {
        // exp(L) = ((1 + 4 s^4)^{1/2} + 2 s^2)^{1/2}
        let n = 20;
        let b = only(&p("w - i*w^2 - i*z^2"), n);
        let ld = build_l(&b).unwrap();
        let nl = ld.l.order();
        let inner = TruncSeries::from_coeffs(
            vec![Scalar::one(), Scalar::zero(), Scalar::zero(), Scalar::zero(), Scalar::int(4)],
            nl,
        )
        .nth_root(2)
        .unwrap()
        .add(&TruncSeries::monomial(Scalar::int(2), 2, nl));
        let want = inner.nth_root(2).unwrap().log().unwrap();
        assert_eq!(ld.l, want);
        assert_eq!(ld.l.coeff(2), Scalar::one());
    }

    #[test]
    fn imaginary_linear_l_parametrization() {
        // L = i s gives phi(Psi(s)) = i s^2 - (2/3) s^3
        let w = w_of_l(1, &TruncSeries::monomial(Scalar::i(), 1, 6));
        let mut want = TruncSeries::zero(w.order());
        want.set_coeff(2, Scalar::i());
        want.set_coeff(3, Scalar::ratio(-2, 3));
        assert_eq!(w, want);
    }

    #[test]
    fn phi_psi_identity() {
        let b = only(&p("w^2 + w - i*z^2"), 18);
        let ld = build_l(&b).unwrap();
        let lhs = b.phi.compose(&ld.psi).unwrap();
        let rhs = w_of_l(1, &ld.l);
        let diff = lhs.sub(&rhs);
        let n = b.phi.order();
        assert!(diff.valuation().map_or(true, |v| v > n - 2));
    }

    #[test]
    fn pc_family() {
        // c < 1/2 basic; c = 1/2 isolated with K = 1, phi0 = i u^2
        let b = only(&p("w - i*w^2 - 1/2*i*z^2"), 16);
        let (cls, _) = classify_branch(&b).unwrap();
        assert_eq!(cls.tag, Tag::Basic);
        assert_eq!(cls.a0, Some(2));

        let b = only(&p("w - i*w^2 - i*z^2"), 16);
        let (cls, trace) = classify_branch(&b).unwrap();
        assert_eq!(cls.tag, Tag::Isolated);
        let iso = cls.isolated.unwrap();
        assert_eq!(iso.k, 1);
        assert_eq!(iso.l1_lead, Scalar::one());
        let mut phi0 = TruncSeries::zero(3);
        phi0.set_coeff(2, Scalar::i());
        assert_eq!(iso.phi0, phi0);
        assert_eq!(iso.lower_bound_exponent, 4);
        let trace = trace.unwrap();
        assert_eq!(trace.m_of_k, vec![Some(2), Some(2)]);
        // leading G term at k = 0: (2M)^2/(m + 2M) r^{2M + m} Re L_m = r^4
        assert_eq!(trace.g_leading[0], Some((4, Scalar::one())));

        let b = only(&p("w - i*w^2 - 2*i*z^2"), 16);
        let (cls, _) = classify_branch(&b).unwrap();
        assert_eq!(cls.tag, Tag::Unstable);
    }

    #[test]
    fn ramified_isolated() {
        // z = s^2 exp(2L), w = i s^4 + 4 i int s^4 L', L = i s^2 + s^4 + s^5
        let n = 24;
        let mut l = TruncSeries::zero(n);
        l.set_coeff(2, Scalar::i());
        l.set_coeff(4, Scalar::one());
        l.set_coeff(5, Scalar::one());
        let b = crate::constructors::branch_from_param(2, &Scalar::one(), &l).unwrap();
        let ld = build_l(&b).unwrap();
        for j in 0..=ld.l.order().min(n) {
            assert_eq!(ld.l.coeff(j), l.coeff(j), "L_{j}");
        }
        let (cls, trace) = classify_branch(&b).unwrap();
        assert_eq!(cls.tag, Tag::Isolated);
        let iso = cls.isolated.unwrap();
        assert_eq!(iso.k, 1);
        assert_eq!(iso.a0_poly.coeff(1), Scalar::one());
        assert_eq!(iso.l1_lead, Scalar::one());
        assert!(trace.unwrap().m_of_k.iter().all(|m| *m == Some(4)));
    }

    #[test]
    fn a0_below_2m_is_unstable() {
        let b = branch(2, &[(2, Scalar::gauss_ratio(0, 1, 1, 2))], 12);
        let (cls, _) = classify_branch(&b).unwrap();
        assert_eq!(cls.tag, Tag::Unstable);
        let w = cls.witness.unwrap();
        assert!(in_siegel(&w));
    }

    #[test]
    fn simple_criterion_examples() {
        let b = only(&p("w - i*w^2 - i*z^2"), 12);
        assert_eq!(simple_criterion(&b), Some((1, Scalar::one())));
        // phi = i t^2 - 2 i beta t^{2K+2}, beta = 3/4, K = 2 -> beta (K+1)
        let b = branch(1, &[(2, Scalar::i()), (6, Scalar::gauss_ratio(0, 1, -3, 2))], 14);
        let (k, lead) = simple_criterion(&b).unwrap();
        assert_eq!((k, lead.clone()), (2, Scalar::ratio(9, 4)));
        let ld = build_l(&b).unwrap();
        assert_eq!(ld.l.valuation(), Some(4));
        assert_eq!(ld.l.coeff(4), lead);
        let b = branch(1, &[(2, Scalar::i()), (4, Scalar::one())], 10);
        assert_eq!(simple_criterion(&b), None);
    }

    #[test]
    fn unstable_nonbasic_witness() {
        // phi = i t^2 + i t^4: Im alpha > 0, L_2 = -1
        let q = p("w - i*z^2 - i*z^4");
        let pc = classify_polynomial(&q, &ClassifyOptions::default()).unwrap();
        let cls = &pc.branches[0].class;
        assert_eq!(cls.tag, Tag::Unstable);
        let w = cls.witness.unwrap();
        assert!(in_siegel(&w));
        assert!(q.eval_c64(&w).norm() < 1e-12);
    }

    #[test]
    fn simple_zero_reports() {
        let vars: Vec<String> = ["z1", "z2", "w"].iter().map(|s| s.to_string()).collect();
        let r = classify_simple_zero(&parse_poly("w", Some(&vars)).unwrap()).unwrap();
        assert_eq!(r.verdict, SmoothVerdict::StrictContraction);
        assert_eq!(r.op_norm, Some(0.0));
        let r = classify_simple_zero(&parse_poly("i*w - 1/2*z1^2 - 3/4*z2^2", Some(&vars)).unwrap()).unwrap();
        assert!((r.singular_values[0] - 0.75).abs() < 1e-14);
        assert!((r.singular_values[1] - 0.5).abs() < 1e-14);
        assert_eq!(r.verdict, SmoothVerdict::StrictContraction);
        let r = classify_simple_zero(&parse_poly("i*w - z1^2 - 1/2*z2^2", Some(&vars)).unwrap()).unwrap();
        assert_eq!(r.verdict, SmoothVerdict::ContractionBoundary);
        let r = classify_simple_zero(&parse_poly("z1 + w", Some(&vars)).unwrap()).unwrap();
        assert!(!r.gradient_parallel);
        assert_eq!(r.verdict, SmoothVerdict::Violation);
        assert_eq!(
            classify_simple_zero(&parse_poly("z1^2 + w^2", Some(&vars)).unwrap()),
            Err(Error::ZeroGradient)
        );
    }

    fn random_unitary(seed: &[f64]) -> Vec<Vec<Complex64>> {
        // Gram-Schmidt on a seeded 2x2 complex matrix
        let cols = [
            [Complex64::new(seed[0], seed[1]), Complex64::new(seed[2], seed[3])],
            [Complex64::new(seed[4], seed[5]), Complex64::new(seed[6], seed[7])],
        ];
        let n0 = (cols[0][0].norm_sqr() + cols[0][1].norm_sqr()).sqrt();
        let u0 = [cols[0][0] / n0, cols[0][1] / n0];
        let dot = u0[0].conj() * cols[1][0] + u0[1].conj() * cols[1][1];
        let v = [cols[1][0] - dot * u0[0], cols[1][1] - dot * u0[1]];
        let n1 = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        let u1 = [v[0] / n1, v[1] / n1];
        vec![vec![u0[0], u1[0]], vec![u0[1], u1[1]]]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn basic_gate(a0 in 1usize..7, m in 1u32..3, num in 1i64..12, den in 1i64..12, tail in -5i64..5) {
            let mut phi = vec![(a0, Scalar::gauss_ratio(0, 1, num, den))];
            phi.push((a0 + 1, Scalar::int(tail)));
            let b = branch(m, &phi, 16);
            let two_m = 2 * m as usize;
            let expect_basic = a0 > two_m || (a0 == two_m && num < den);
            match classify_branch(&b) {
                Ok((cls, _)) => prop_assert_eq!(cls.tag == Tag::Basic, expect_basic),
                Err(Error::InsufficientOrder { .. }) => prop_assert!(!expect_basic),
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }

        #[test]
        fn norm_unitary_invariant(d1 in 0.0f64..2.0, d2 in 0.0f64..2.0, seed in prop::collection::vec(-1.0f64..1.0, 8)) {
            prop_assume!(seed.iter().map(|x| x.abs()).sum::<f64>() > 0.5);
            let u = random_unitary(&seed);
            // A' = U^T A U for A = diag(d1, d2)
            let a = [[d1, 0.0], [0.0, d2]];
            let mut ap = vec![vec![Complex64::new(0.0, 0.0); 2]; 2];
            for i in 0..2 { for j in 0..2 { for k in 0..2 {
                ap[i][j] += u[k][i] * a[k][k] * u[k][j];
            }}}
            let sv = singular_values(&ap);
            prop_assert!((sv[0] - d1.max(d2)).abs() < 1e-8);
            prop_assert!((sv[1] - d1.min(d2)).abs() < 1e-8);
        }
    }
}
