//! Admissible numerator ideals: the germs `q` with `q / p` bounded near the
//! boundary zero inside the domain, for the cases that are settled.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::classify::{classify_polynomial, classify_simple_zero_tol, ClassifyOptions, SmoothVerdict, Tag};
use crate::error::{Error, Result};
use crate::multipoly::{siegel_vars, transport_siegel_to_ball, weierstrass_reduce, MultiPoly, PolyJson};
use crate::scalar::Scalar;
use crate::series::TruncSeries;
use crate::verify::{boundedness_probe, log_grid, ProbeVerdict};

#[derive(Clone, Debug, PartialEq)]
pub enum IdealKind {
    /// `(w, z_a z_b)` at a simple zero in `d` variables.
    SimpleZero { d: usize },
    /// `(w, z^2)^M`.
    BasicPower { m: usize },
    /// `(w - phi0(conj(c) z), z^{2(1+K)})^M`.
    IsolatedProduct { m: usize, k: usize, phi0: TruncSeries, c: Scalar, a0_poly: TruncSeries },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleIdeal {
    pub kind: IdealKind,
    pub generators: Vec<MultiPoly>,
}

fn z_pow(vars: &[String], e: u32) -> MultiPoly {
    MultiPoly::var(vars.to_vec(), 0).pow(e)
}

/// `phi0(conj(c) z)` as a polynomial in `z`.
fn center_poly(phi0: &TruncSeries, c: &Scalar) -> MultiPoly {
    let v = siegel_vars(2);
    let cb = c.conj();
    let mut out = MultiPoly::zero(v.clone());
    let mut scale = Scalar::one();
    for j in 0..=phi0.order() {
        let a = phi0.coeff(j);
        if !a.is_exact_zero() {
            out = out.add(&z_pow(&v, j as u32).scalar_mul(&(&a * &scale)));
        }
        scale = &scale * &cb;
    }
    out
}

fn center_series(phi0: &TruncSeries, c: &Scalar, order: usize) -> TruncSeries {
    let cb = c.conj();
    let mut s = TruncSeries::zero(order);
    let mut scale = Scalar::one();
    for j in 0..=phi0.order().min(order) {
        s.set_coeff(j, &phi0.coeff(j) * &scale);
        scale = &scale * &cb;
    }
    s
}

impl AdmissibleIdeal {
    pub fn simple_zero(d: usize) -> Self {
        let v = siegel_vars(d);
        let mut gens = vec![MultiPoly::var(v.clone(), d - 1)];
        for a in 0..d - 1 {
            for b in a..d - 1 {
                gens.push(MultiPoly::var(v.clone(), a).mul(&MultiPoly::var(v.clone(), b)));
            }
        }
        AdmissibleIdeal { kind: IdealKind::SimpleZero { d }, generators: gens }
    }

    pub fn basic_power(m: usize) -> Self {
        let v = siegel_vars(2);
        let w = MultiPoly::var(v.clone(), 1);
        let gens = (0..=m)
            .map(|j| w.pow(j as u32).mul(&z_pow(&v, 2 * (m - j) as u32)))
            .collect();
        AdmissibleIdeal { kind: IdealKind::BasicPower { m }, generators: gens }
    }

    pub fn isolated_product(m: usize, k: usize, phi0: TruncSeries, c: Scalar, a0_poly: TruncSeries) -> Self {
        let v = siegel_vars(2);
        let base = MultiPoly::var(v.clone(), 1).sub(&center_poly(&phi0, &c));
        let gens = (0..=m)
            .map(|j| base.pow(j as u32).mul(&z_pow(&v, (2 * (1 + k) * (m - j)) as u32)))
            .collect();
        AdmissibleIdeal { kind: IdealKind::IsolatedProduct { m, k, phi0, c, a0_poly }, generators: gens }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            IdealKind::SimpleZero { d } => d,
            _ => 2,
        }
    }

    /// Generators moved to the ball picture, where the zero sits at `e_d`.
    pub fn generators_ball(&self) -> Vec<MultiPoly> {
        self.generators.iter().map(transport_siegel_to_ball).collect()
    }

    /// Short human form such as `(w - i*z^2, z^4)`.
    pub fn describe(&self) -> String {
        match &self.kind {
            IdealKind::SimpleZero { d: 2 } | IdealKind::BasicPower { m: 1 } => "(w, z^2)".into(),
            IdealKind::SimpleZero { .. } => "(w, (z)^2)".into(),
            IdealKind::BasicPower { m } => format!("(w, z^2)^{m}"),
            IdealKind::IsolatedProduct { m, k, phi0, c, .. } => {
                let center = center_poly(phi0, c);
                let base = MultiPoly::var(siegel_vars(2), 1).sub(&center);
                let s = format!("({}, z^{})", base, 2 * (1 + k));
                if *m == 1 {
                    s
                } else {
                    format!("{s}^{m}")
                }
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let gens: Vec<PolyJson> = self.generators.iter().map(MultiPoly::to_json).collect();
        let (kind, params) = match &self.kind {
            IdealKind::SimpleZero { d } => ("SimpleZero", json!({ "d": d })),
            IdealKind::BasicPower { m } => ("BasicPower", json!({ "M": m })),
            IdealKind::IsolatedProduct { m, k, phi0, c, .. } => (
                "IsolatedProduct",
                json!({ "M": m, "K": k, "phi0": phi0.to_json("u"), "c": c }),
            ),
        };
        json!({ "kind": kind, "parameters": params, "generators": gens, "display": self.describe() })
    }
}

/// The admissible numerator ideal of `p` at the origin, for the settled cases:
/// a strictly contractive simple zero, all branches basic, or a single
/// isolated-type branch.
pub fn ideal_for(p: &MultiPoly, opts: &ClassifyOptions) -> Result<AdmissibleIdeal> {
    let d = p.dim();
    if d < 2 {
        return Err(Error::DimMismatch { expected: 2, got: d });
    }
    if d > 2 {
        let r = classify_simple_zero_tol(p, opts.tol)?;
        return match r.verdict {
            SmoothVerdict::StrictContraction => Ok(AdmissibleIdeal::simple_zero(d)),
            SmoothVerdict::ContractionBoundary => Err(Error::UnsettledCase(
                "simple zero with a contraction of norm one".into(),
            )),
            SmoothVerdict::Violation => Err(Error::NotStable("simple zero conditions fail".into())),
        };
    }
    let pc = classify_polynomial(p, opts)?;
    if pc.branches.iter().any(|b| b.class.tag == Tag::Unstable) {
        return Err(Error::NotStable("a branch enters the domain".into()));
    }
    if pc.branches.iter().all(|b| b.class.tag == Tag::Basic) {
        let m: usize = pc.branches.iter().map(|b| b.class.m as usize * b.branch.multiplicity).sum();
        return Ok(AdmissibleIdeal::basic_power(m));
    }
    if pc.branches.len() == 1 && pc.branches[0].branch.multiplicity == 1 {
        let b = &pc.branches[0];
        if let Some(iso) = &b.class.isolated {
            return Ok(AdmissibleIdeal::isolated_product(
                b.class.m as usize,
                iso.k,
                iso.phi0.clone(),
                b.class.c.clone(),
                iso.a0_poly.clone(),
            ));
        }
        return Err(Error::UnsettledCase("curve-type branch".into()));
    }
    Err(Error::UnsettledCase("several branches or a repeated non-basic branch".into()))
}

fn valuation_ok(s: &TruncSeries, need: usize, tol: f64) -> bool {
    let scale = s.max_abs().max(1.0);
    (0..need.min(s.order() + 1)).all(|j| s.coeff(j).is_zero_scaled(tol, scale))
}

/// Membership of a polynomial numerator, decided exactly on exact input.
pub fn is_member(q: &MultiPoly, ideal: &AdmissibleIdeal) -> Result<bool> {
    is_member_tol(q, ideal, 0.0)
}

pub fn is_member_tol(q: &MultiPoly, ideal: &AdmissibleIdeal, tol: f64) -> Result<bool> {
    if q.dim() != ideal.dim() {
        return Err(Error::DimMismatch { expected: ideal.dim(), got: q.dim() });
    }
    let tol = if q.is_exact() { 0.0 } else { tol.max(1e-12) };
    match &ideal.kind {
        IdealKind::SimpleZero { d } => {
            if !q.coeff(&vec![0; *d]).is_zero_tol(tol) {
                return Ok(false);
            }
            let g = q.gradient_at_zero();
            Ok(g[..d - 1].iter().all(|x| x.is_zero_tol(tol)))
        }
        IdealKind::BasicPower { m } => {
            let order = 2 * m + 1;
            let qs = weierstrass_reduce(q, *m, None, order)?;
            Ok(qs.iter().enumerate().all(|(j, s)| valuation_ok(s, 2 * (m - j), tol)))
        }
        IdealKind::IsolatedProduct { m, k, phi0, c, .. } => {
            let order = 2 * (1 + k) * m + 1;
            let center = center_series(phi0, c, order);
            let qs = weierstrass_reduce(q, *m, Some(&center), order)?;
            Ok(qs.iter().enumerate().all(|(j, s)| valuation_ok(s, 2 * (1 + k) * (m - j), tol)))
        }
    }
}

/// A one-parameter family of points in the domain approaching the origin as `r -> 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family")]
pub enum CurveFamily {
    /// `(r z0, r^2 w0)` with `(z0, w0)` in the domain.
    Ray { z0: Vec<Scalar>, w0: Scalar },
    /// `z = c r^M e^{i M A0(r^M)}`,
    /// `w = i r^{2M} - 2M int_0^r x^{2M} (A0(x^M))' dx + i B r^{2M(K+1)}`.
    Isolated {
        #[serde(rename = "M")]
        m: usize,
        #[serde(rename = "K")]
        k: usize,
        c: Scalar,
        a0_poly: Vec<Scalar>,
        b: f64,
    },
}

impl CurveFamily {
    pub fn point(&self, r: f64) -> Vec<Complex64> {
        match self {
            CurveFamily::Ray { z0, w0 } => {
                let mut v: Vec<Complex64> = z0.iter().map(|z| z.to_c64() * r).collect();
                v.push(w0.to_c64() * (r * r));
                v
            }
            CurveFamily::Isolated { m, k, c, a0_poly, b } => {
                let (m, k) = (*m as i32, *k as i32);
                let u = r.powi(m);
                let a0: f64 = a0_poly.iter().enumerate().map(|(j, a)| a.re_f64() * u.powi(j as i32)).sum();
                let z = c.to_c64() * Complex64::new(0.0, m as f64 * a0).exp() * u;
                // int_0^r x^{2M} d/dx A0(x^M) dx = sum_j a_j jM/(jM + 2M) r^{jM + 2M}
                let mut integral = 0.0;
                for (j, a) in a0_poly.iter().enumerate().skip(1) {
                    let e = j as i32 * m + 2 * m;
                    integral += a.re_f64() * (j as f64 * m as f64) / e as f64 * r.powi(e);
                }
                let w = Complex64::new(-2.0 * m as f64 * integral, r.powi(2 * m) + b * r.powi(2 * m * (k + 1)));
                vec![z, w]
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessCurve {
    pub curve: CurveFamily,
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    /// Fitted slope of `log |q/p|` against `log r`.
    pub rate: f64,
}

fn probe(q: &MultiPoly, p: &MultiPoly, curve: CurveFamily) -> Option<WitnessCurve> {
    let radii = log_grid(1e-1, 1e-3, 12);
    let pts: Vec<Vec<Complex64>> = radii.iter().map(|&r| curve.point(r)).collect();
    match boundedness_probe(q, p, &pts, &radii) {
        ProbeVerdict::Growth { rate, ratios } => Some(WitnessCurve { curve, radii, ratios, rate }),
        ProbeVerdict::Bounded { .. } => None,
    }
}

/// A curve in the domain along which `|q/p|` grows, for `q` outside the ideal.
/// The verdict itself comes from [`is_member`]; this is a numerical cross-check.
pub fn unboundedness_witness(q: &MultiPoly, p: &MultiPoly, ideal: &AdmissibleIdeal) -> Result<WitnessCurve> {
    let d = ideal.dim();
    let mut candidates: Vec<CurveFamily> = Vec::new();
    match &ideal.kind {
        IdealKind::SimpleZero { .. } => {
            let g = q.gradient_at_zero();
            let gz: Vec<Complex64> = g[..d - 1].iter().map(Scalar::to_c64).collect();
            let n = gz.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if n > 0.0 {
                let z0 = gz.iter().map(|x| Scalar::from_c64(x.conj() / n)).collect();
                candidates.push(CurveFamily::Ray { z0, w0: Scalar::float(0.0, 2.0) });
            }
            candidates.push(CurveFamily::Ray { z0: vec![Scalar::zero(); d - 1], w0: Scalar::i() });
        }
        IdealKind::BasicPower { .. } => {
            for (th, h) in [(0.3, 1.5), (1.1, 2.0), (2.3, 1.25), (0.0, 1.0)] {
                let z0 = Scalar::float(0.5 * f64::cos(th), 0.5 * f64::sin(th));
                let w0 = Scalar::float(0.2, h * 0.25);
                candidates.push(CurveFamily::Ray { z0: vec![z0], w0 });
            }
        }
        IdealKind::IsolatedProduct { m, k, c, a0_poly, .. } => {
            for b in [1.0, 2.0, 0.5, 3.0, 0.25] {
                candidates.push(CurveFamily::Isolated {
                    m: *m,
                    k: *k,
                    c: c.clone(),
                    a0_poly: a0_poly.coeffs().to_vec(),
                    b,
                });
            }
        }
    }
    for c in candidates {
        if let Some(w) = probe(q, p, c) {
            return Ok(w);
        }
    }
    Err(Error::WitnessSearchFailed(format!("no growth found for {}", q)))
}
