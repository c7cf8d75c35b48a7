//! Factories for example polynomials and parametrized curves.

mod algl;
mod quadform;
mod rowdet;

pub use algl::{check_algebraic_l, AlgebraicLReport, InfinityBranch};
pub use quadform::{quadratic_form_poly, takagi, QuadForm, Takagi};
pub use rowdet::{planted_instance, rowdet_factor, rowdet_poly, RowContraction, RowContractionJson, RowdetFactorization};

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::classify::{l_verdict, w_of_l, LData, LVerdict, Tag};
use crate::error::{Error, Result};
use crate::multipoly::{ball_vars, siegel_vars, transport_ball_to_siegel, MultiPoly};
use crate::puiseux::PuiseuxBranch;
use crate::scalar::{Scalar, DEFAULT_TOL};
use crate::series::{binomial, TruncSeries};

/// The curve `s -> (c s^M e^{M L(s)}, i s^{2M} + 2M i int_0^s x^{2M} L'(x) dx)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamCurve {
    pub m: u32,
    pub c: Scalar,
    pub l: TruncSeries,
    pub z_series: TruncSeries,
    pub w_series: TruncSeries,
    pub order: usize,
    /// `M = 1` and every `L_j` imaginary to the order.
    pub condition_a: bool,
    /// `L = i A0(s^M) + s^{2MK} L1` with `Re L1(0) > 0`.
    pub condition_b: bool,
    /// `L` is not a function of `s^M`.
    pub injective: bool,
}

fn param_ldata(m: u32, l: &TruncSeries) -> Result<LData> {
    let psi = l.exp()?.shift_up(1);
    let phi_cap = psi.reversion()?;
    Ok(LData { m, l: l.clone(), phi_cap, psi })
}

pub fn make_param(m: u32, c: &Scalar, l: &TruncSeries, order: usize) -> Result<ParamCurve> {
    if !l.coeff(0).is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    let l = l.truncate(order);
    let z_series = l
        .scalar_mul(&Scalar::int(m as i64))
        .exp()?
        .shift_up(m as usize)
        .scalar_mul(c)
        .truncate(order);
    let w_series = w_of_l(m, &l).truncate(order);
    let ld = param_ldata(m, &l)?;
    let verdict = l_verdict(&ld, DEFAULT_TOL);
    let mut g = m as u64;
    for (j, x) in l.coeffs().iter().enumerate() {
        if !x.is_zero() {
            g = num_integer::gcd(g, j as u64);
        }
    }
    Ok(ParamCurve {
        m,
        c: c.clone(),
        z_series,
        w_series,
        order,
        condition_a: verdict == LVerdict::Curve,
        condition_b: matches!(verdict, LVerdict::Isolated { .. }),
        injective: g == 1,
        l,
    })
}

/// The branch `t -> (c t^M, phi(t))` of the curve defined by `(M, c, L)`,
/// with `t = s e^{L(s)}`.
pub fn branch_from_param(m: u32, c: &Scalar, l: &TruncSeries) -> Result<PuiseuxBranch> {
    let ld = param_ldata(m, l)?;
    let w = w_of_l(m, l);
    let phi = w.compose(&ld.phi_cap)?;
    let n = phi.order();
    Ok(PuiseuxBranch {
        m,
        c: c.clone(),
        c_turns: if c.is_one() { Some((0, 1)) } else { None },
        phi,
        multiplicity: 1,
        certified_order: n,
    })
}

/// `P_c(z, w) = w - i w^2 - 2 c i z^2`.
pub fn family_pc(c: &Scalar) -> MultiPoly {
    let v = siegel_vars(2);
    let z = MultiPoly::var(v.clone(), 0);
    let w = MultiPoly::var(v, 1);
    let two_ci = &(&Scalar::int(2) * c) * &Scalar::i();
    w.sub(&w.pow(2).scalar_mul(&Scalar::i())).sub(&z.pow(2).scalar_mul(&two_ci))
}

/// `Q_c` is shown stable for `0 <= c <= 1/12`.
pub const QC_SUFFICIENT: (i64, i64) = (1, 12);
/// Claimed sharp stability bound for `Q_c`; only checked by sampling here.
pub const QC_SHARP: (i64, i64) = (27, 32);

/// `Q_c(z, w) = w - 3 i w^2 - 3 w^3 + i w^4 + 8 c i z^4`.
pub fn family_qc(c: &Scalar) -> MultiPoly {
    let v = siegel_vars(2);
    let z = MultiPoly::var(v.clone(), 0);
    let w = MultiPoly::var(v, 1);
    let eight_ci = &(&Scalar::int(8) * c) * &Scalar::i();
    w.sub(&w.pow(2).scalar_mul(&Scalar::gauss_ratio(0, 1, 3, 1)))
        .sub(&w.pow(3).scalar_mul(&Scalar::int(3)))
        .add(&w.pow(4).scalar_mul(&Scalar::i()))
        .add(&z.pow(4).scalar_mul(&eight_ci))
}

/// `c_k = (1/2k) 4^{1-k} binom(2k-2, k-1)`, the Taylor coefficients of
/// `1 - (1 - x)^{1/2}`.
pub fn rudin_bound(k: usize) -> BigRational {
    assert!(k >= 1);
    let four = BigRational::from_integer(4.into());
    let mut pow = BigRational::one();
    for _ in 1..k {
        pow *= &four;
    }
    binomial(2 * k as u64 - 2, k as u64 - 1) / (BigRational::from_integer((2 * k).into()) * pow)
}

#[derive(Clone, Debug)]
pub struct RudinPoly {
    pub ball: MultiPoly,
    pub siegel: MultiPoly,
    pub tag: Option<Tag>,
    pub m: Option<u32>,
    pub k: Option<usize>,
}

/// `F = 1 - (z2 + sum_k g_k z1^{2k})` with constant `g_k`, `|g_k| <= c_k`.
/// `g[0]` is `g_1`.
pub fn rudin_poly(g: &[Scalar]) -> Result<RudinPoly> {
    let v = ball_vars(2);
    let z1 = MultiPoly::var(v.clone(), 0);
    let z2 = MultiPoly::var(v.clone(), 1);
    let mut inner = z2;
    for (idx, gk) in g.iter().enumerate() {
        let k = idx + 1;
        let bound = Scalar::rational(rudin_bound(k));
        let over = if gk.is_exact() {
            let diff = &gk.norm_sqr() - &(&bound * &bound);
            diff.as_rational().map_or(false, |r| r > BigRational::zero())
        } else {
            gk.abs() > bound.re_f64() * (1.0 + DEFAULT_TOL)
        };
        if over {
            return Err(Error::BoundViolated { k, value: gk.abs(), bound: bound.re_f64() });
        }
        inner = inner.add(&z1.pow(2 * k as u32).scalar_mul(gk));
    }
    let ball = MultiPoly::constant(v, Scalar::one()).sub(&inner);
    let siegel = transport_ball_to_siegel(&ball);
    let (mut tag, mut m, mut k) = (None, None, None);
    if let Ok(pc) = crate::classify::classify_polynomial(&siegel, &Default::default()) {
        if pc.branches.len() == 1 {
            let cls = &pc.branches[0].class;
            tag = Some(cls.tag);
            m = Some(cls.m);
            k = cls.isolated.as_ref().map(|d| d.k);
        }
    }
    Ok(RudinPoly { ball, siegel, tag, m, k })
}

/// `(p o tau)(z)` with `tau(z) = d^{d/2} z_1 ... z_d`; `p` has coefficients
/// from low to high degree.
pub fn one_variable_lift(p: &[Scalar], d: usize) -> MultiPoly {
    let v = ball_vars(d);
    let scale = if d % 2 == 0 {
        Scalar::int((d as i64).pow(d as u32 / 2))
    } else {
        Scalar::real_f64((d as f64).powf(d as f64 / 2.0))
    };
    let mut tau = MultiPoly::constant(v.clone(), scale);
    for j in 0..d {
        tau = tau.mul(&MultiPoly::var(v.clone(), j));
    }
    let mut acc = MultiPoly::zero(v.clone());
    for c in p.iter().rev() {
        acc = acc.mul(&tau).add(&MultiPoly::constant(v.clone(), c.clone()));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{build_l, classify_branch, g_critical_series};
    use crate::parse::parse_poly;
    use proptest::prelude::*;

    fn pz(s: &str) -> MultiPoly {
        parse_poly(s, Some(&siegel_vars(2))).unwrap()
    }

    fn pb(s: &str, d: usize) -> MultiPoly {
        parse_poly(s, Some(&ball_vars(d))).unwrap()
    }

    #[test]
    fn imaginary_linear_l_curve() {
        let l = TruncSeries::monomial(Scalar::i(), 1, 10);
        let pc = make_param(1, &Scalar::one(), &l, 10).unwrap();
        let mut w = TruncSeries::zero(10);
        w.set_coeff(2, Scalar::i());
        w.set_coeff(3, Scalar::ratio(-2, 3));
        assert_eq!(pc.w_series, w);
        assert!(pc.condition_a && !pc.condition_b && pc.injective);
        // z = s e^{is}
        assert_eq!(pc.z_series.coeff(3), Scalar::ratio(-1, 2));
    }

    #[test]
    fn ramified_isolated_param() {
        let mut l = TruncSeries::zero(12);
        l.set_coeff(2, Scalar::i());
        l.set_coeff(4, Scalar::one());
        l.set_coeff(5, Scalar::one());
        let pc = make_param(2, &Scalar::one(), &l, 12).unwrap();
        let mut w = TruncSeries::zero(12);
        w.set_coeff(4, Scalar::i());
        w.set_coeff(6, Scalar::ratio(-4, 3));
        w.set_coeff(8, Scalar::gauss_ratio(0, 1, 2, 1));
        w.set_coeff(9, Scalar::gauss_ratio(0, 1, 20, 9));
        assert_eq!(pc.w_series, w);
        assert!(pc.condition_b && pc.injective);
        assert_eq!(pc.z_series.valuation(), Some(2));

        l.set_coeff(5, Scalar::zero());
        assert!(!make_param(2, &Scalar::one(), &l, 12).unwrap().injective);
    }

    #[test]
    fn trivial_param() {
        let pc = make_param(1, &Scalar::one(), &TruncSeries::zero(6), 6).unwrap();
        assert_eq!(pc.z_series, TruncSeries::var(6));
        assert_eq!(pc.w_series, TruncSeries::monomial(Scalar::i(), 2, 6));
    }

    #[test]
    fn families() {
        assert_eq!(family_pc(&Scalar::ratio(1, 2)), pz("w - i*w^2 - i*z^2"));
        assert_eq!(family_pc(&Scalar::zero()), pz("w - i*w^2"));
        assert_eq!(family_qc(&Scalar::ratio(1, 12)), pz("w - 3i*w^2 - 3w^3 + i*w^4 + 2/3*i*z^4"));
        for (n, d) in [QC_SUFFICIENT, QC_SHARP] {
            let cfg = crate::verify::SampleConfig { count: 20_000, ..Default::default() };
            let scan = crate::verify::stability_scan(&family_qc(&Scalar::ratio(n, d)), &cfg, 1e-9);
            assert_eq!(scan.zero_hits, 0);
        }
    }

    #[test]
    fn rudin() {
        let cs: Vec<BigRational> = (1..=4).map(rudin_bound).collect();
        assert_eq!(
            cs,
            vec![
                crate::scalar::rat(1, 2),
                crate::scalar::rat(1, 8),
                crate::scalar::rat(1, 16),
                crate::scalar::rat(5, 128)
            ]
        );
        let r = rudin_poly(&[Scalar::ratio(1, 2)]).unwrap();
        assert_eq!(r.ball, pb("1 - z2 - 1/2*z1^2", 2));
        assert_eq!(r.tag, Some(Tag::Isolated));
        assert_eq!(r.k, Some(1));
        let r = rudin_poly(&[Scalar::ratio(1, 2), Scalar::ratio(1, 8)]).unwrap();
        assert_eq!(r.ball, pb("1 - z2 - 1/2*z1^2 - 1/8*z1^4", 2));
        assert_eq!(r.k, Some(2));
        assert!(matches!(
            rudin_poly(&[Scalar::ratio(3, 5)]),
            Err(Error::BoundViolated { k: 1, .. })
        ));
    }

    #[test]
    fn lifts() {
        let one_minus_x = vec![Scalar::one(), Scalar::int(-1)];
        assert_eq!(one_variable_lift(&one_minus_x, 2), pb("1 - 2z1 z2", 2));
        assert_eq!(one_variable_lift(&[Scalar::one()], 3), pb("1", 3));
        let sq = vec![Scalar::one(), Scalar::int(-2), Scalar::one()];
        assert_eq!(one_variable_lift(&sq, 2), pb("(1 - 2z1 z2)^2", 2));
    }

    #[test]
    fn param_branch_classifies() {
        let l = TruncSeries::monomial(Scalar::one(), 2, 16);
        let b = branch_from_param(1, &Scalar::one(), &l).unwrap();
        let ld = build_l(&b).unwrap();
        for j in 0..=ld.l.order() {
            assert_eq!(ld.l.coeff(j), l.coeff(j));
        }
        let (cls, _) = classify_branch(&b).unwrap();
        assert_eq!(cls.tag, Tag::Isolated);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        // Curves built from admissible L stay outside the domain at the
        // angular critical points.
        #[test]
        fn admissible_param_avoids(m in 1u32..3, k in 1usize..3, lead in 1i64..4, im_a in -3i64..3, extra in -3i64..3) {
            let mu = m as usize;
            let n = 2 * mu * k + 6;
            let mut l = TruncSeries::zero(n);
            if k > 1 || mu > 1 {
                l.set_coeff(mu, Scalar::gauss_ratio(0, 1, im_a, 1));
            }
            l.set_coeff(2 * mu * k, Scalar::int(lead));
            l.set_coeff(2 * mu * k + 1, Scalar::int(extra));
            let pc = make_param(m, &Scalar::one(), &l, n).unwrap();
            prop_assert!(pc.condition_b);
            let ld = param_ldata(m, &l).unwrap();
            let r0 = crate::classify::reliability_radius(&l).min(0.2);
            for kk in 0..2 * m as i64 {
                let g = g_critical_series(&ld, kk).unwrap();
                for step in 1..=10 {
                    let r = r0 * step as f64 / 10.0;
                    for sign in [1.0, -1.0] {
                        let v = g.eval_c64(num_complex::Complex64::new(sign * r, 0.0)).re;
                        prop_assert!(v >= -1e-12 * r.powi(2 * mu as i32), "G = {v} at r = {r}");
                    }
                }
            }
        }
    }
}
