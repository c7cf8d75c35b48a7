use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::multipoly::{ball_vars, transport_ball_to_siegel, MultiPoly};
use crate::scalar::{Scalar, DEFAULT_TOL};

/// `A = U D U^T` with `U` unitary and `D` nonnegative diagonal.
#[derive(Clone, Debug)]
pub struct Takagi {
    pub u: Vec<Vec<Complex64>>,
    pub d: Vec<f64>,
    /// Present when `A` is real diagonal, in which case `D = |A_jj|`.
    pub d_exact: Option<Vec<Scalar>>,
}

#[derive(Clone, Debug)]
pub struct QuadForm {
    pub ball: MultiPoly,
    pub takagi: Takagi,
    pub contractive: bool,
    /// `i w - sum_j D_j z_j^2` (with `D` ascending) when the largest `D_j` is 1.
    pub siegel: Option<MultiPoly>,
}

fn is_symmetric(a: &[Vec<Scalar>]) -> bool {
    let n = a.len();
    a.iter().all(|r| r.len() == n)
        && (0..n).all(|i| (0..i).all(|j| (&a[i][j] - &a[j][i]).is_zero_tol(DEFAULT_TOL)))
}

/// Takagi factorization through the real symmetric embedding
/// `[[Re A, Im A], [Im A, -Re A]]`: an eigenvector `(x, y)` for `sigma >= 0`
/// gives a column `x + i y` of `U`.
pub fn takagi(a: &[Vec<Scalar>]) -> Result<Takagi> {
    if !is_symmetric(a) {
        return Err(Error::NotSymmetric);
    }
    let n = a.len();
    let diag_real = (0..n).all(|i| {
        a[i][i].is_exact() && a[i][i].im().is_zero() && (0..n).all(|j| i == j || a[i][j].is_exact_zero())
    });
    if diag_real {
        let mut u = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        let mut d = Vec::new();
        let mut d_exact = Vec::new();
        for i in 0..n {
            let x = a[i][i].clone();
            let neg = x.re_f64() < 0.0;
            u[i][i] = if neg { Complex64::new(0.0, 1.0) } else { Complex64::new(1.0, 0.0) };
            let ax = if neg { -x } else { x };
            d.push(ax.re_f64());
            d_exact.push(ax);
        }
        return Ok(Takagi { u, d, d_exact: Some(d_exact) });
    }
    let b = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let (i, j) = (r % n, c % n);
        let v = a[i][j].to_c64();
        match (r < n, c < n) {
            (true, true) => v.re,
            (true, false) | (false, true) => v.im,
            (false, false) => -v.re,
        }
    });
    let eig = b.symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].partial_cmp(&eig.eigenvalues[x]).unwrap());
    let mut cols: Vec<DVector<Complex64>> = Vec::new();
    let mut d = Vec::new();
    for &k in &order {
        if cols.len() == n {
            break;
        }
        let v = eig.eigenvectors.column(k);
        let mut u = DVector::from_fn(n, |i, _| Complex64::new(v[i], v[i + n]));
        for c in &cols {
            let proj = c.dotc(&u);
            u -= c * proj;
        }
        let norm = u.norm();
        if norm > 0.5 {
            cols.push(u / Complex64::new(norm, 0.0));
            d.push(eig.eigenvalues[k].max(0.0));
        }
    }
    if cols.len() < n {
        return Err(Error::NumericalDegeneracy("Takagi basis incomplete".into()));
    }
    let u = (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
    Ok(Takagi { u, d, d_exact: None })
}

/// `1 - z^T A z` for a symmetric matrix `A`.
pub fn quadratic_form_poly(a: &[Vec<Scalar>]) -> Result<QuadForm> {
    let t = takagi(a)?;
    let n = a.len();
    let v = ball_vars(n);
    let mut ball = MultiPoly::constant(v.clone(), Scalar::one());
    for i in 0..n {
        for j in 0..n {
            let zz = MultiPoly::var(v.clone(), i).mul(&MultiPoly::var(v.clone(), j));
            ball = ball.sub(&zz.scalar_mul(&a[i][j]));
        }
    }
    let top = t.d.iter().cloned().fold(0.0, f64::max);
    let contractive = top <= 1.0 + DEFAULT_TOL;
    let siegel = if (top - 1.0).abs() <= DEFAULT_TOL && n >= 2 {
        let mut ds: Vec<Scalar> = match &t.d_exact {
            Some(e) => e.clone(),
            None => t.d.iter().map(|&x| Scalar::real_f64(x)).collect(),
        };
        ds.sort_by(|x, y| x.re_f64().partial_cmp(&y.re_f64()).unwrap());
        let last = ds.len() - 1;
        ds[last] = Scalar::one();
        let mut model = MultiPoly::constant(v.clone(), Scalar::one());
        for (j, dj) in ds.iter().enumerate() {
            model = model.sub(&MultiPoly::var(v.clone(), j).pow(2).scalar_mul(dj));
        }
        let s = transport_ball_to_siegel(&model);
        let mut e = vec![0; n];
        e[n - 1] = 1;
        let cw = s.coeff(&e);
        Some(s.scalar_mul(&(&Scalar::i() / &cw)))
    } else {
        None
    };
    Ok(QuadForm { ball, takagi: t, contractive, siegel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify_simple_zero, singular_values};
    use crate::multipoly::siegel_vars;
    use crate::parse::parse_poly;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|&x| Scalar::int(x)).collect()).collect()
    }

    #[test]
    fn examples() {
        let q = quadratic_form_poly(&m(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(q.ball, parse_poly("1 - z1^2 - z2^2", Some(&ball_vars(2))).unwrap());
        let q = quadratic_form_poly(&m(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(q.ball, parse_poly("1 - 2z1 z2", Some(&ball_vars(2))).unwrap());
        let mut sv = q.takagi.d.clone();
        sv.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((sv[0] - 1.0).abs() < 1e-12 && (sv[1] - 1.0).abs() < 1e-12);

        let a = vec![vec![Scalar::ratio(1, 2), Scalar::zero()], vec![Scalar::zero(), Scalar::one()]];
        let q = quadratic_form_poly(&a).unwrap();
        let s = q.siegel.unwrap();
        assert_eq!(s, parse_poly("i*w - 1/2*z^2", Some(&siegel_vars(2))).unwrap());
        let r = classify_simple_zero(&s).unwrap();
        assert_eq!(r.op_norm, Some(0.5));
        assert!(quadratic_form_poly(&m(&[&[0, 1], &[2, 0]])).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn takagi_reconstructs(entries in prop::collection::vec(-1.0f64..1.0, 18)) {
            let n = 3;
            let mut a = vec![vec![Scalar::zero(); n]; n];
            let mut k = 0;
            for i in 0..n {
                for j in i..n {
                    let x = Scalar::float(entries[k], entries[k + 1]);
                    k += 2;
                    a[i][j] = x.clone();
                    a[j][i] = x;
                }
            }
            let t = takagi(&a).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let mut s = Complex64::new(0.0, 0.0);
                    for l in 0..n {
                        s += t.u[i][l] * t.d[l] * t.u[j][l];
                    }
                    prop_assert!((s - a[i][j].to_c64()).norm() < 1e-10);
                }
            }
            let af: Vec<Vec<Complex64>> = a.iter().map(|r| r.iter().map(Scalar::to_c64).collect()).collect();
            let sv = singular_values(&af);
            let mut d = t.d.clone();
            d.sort_by(|x, y| y.partial_cmp(x).unwrap());
            for (x, y) in sv.iter().zip(&d) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }
}
