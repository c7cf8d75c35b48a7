//! Determinantal polynomials `det(I - sum_j z_j A_j)` of row contractions
//! and the peeling of their boundary zeros.
//!
//! A unit vector `zeta` is a zero iff some `v` satisfies `A_j^* v = zeta_j v`
//! for every `j`. Such `v` are found as eigenvectors of a random combination
//! of the `A_j^*` and then checked against each matrix. In a basis starting
//! with `v` the first row of `I - sum z_j A_j` is `(1 - <z, zeta>, 0, ..., 0)`,
//! which splits off the linear factor and leaves a compressed row contraction.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multipoly::{ball_vars, MultiPoly};
use crate::scalar::Scalar;

type CMat = DMatrix<Complex64>;

#[derive(Clone, Debug, PartialEq)]
pub struct RowContraction {
    pub d: usize,
    pub n: usize,
    pub matrices: Vec<Vec<Vec<Scalar>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RowContractionJson {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub matrices: Vec<Vec<Vec<Scalar>>>,
}

fn to_cmat(m: &[Vec<Scalar>]) -> CMat {
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| m[i][j].to_c64())
}

fn from_cmat(m: &CMat) -> Vec<Vec<Scalar>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| Scalar::from_c64(m[(i, j)])).collect())
        .collect()
}

/// Smallest eigenvalue of `I - sum_j A_j A_j^*`.
pub fn defect_min_eigenvalue(mats: &[CMat]) -> f64 {
    let n = mats.first().map_or(0, |m| m.nrows());
    if n == 0 {
        return 1.0;
    }
    let mut h = CMat::identity(n, n);
    for a in mats {
        h -= a * a.adjoint();
    }
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

impl RowContraction {
    pub fn new(matrices: Vec<Vec<Vec<Scalar>>>, tol: f64) -> Result<Self> {
        let d = matrices.len();
        if d == 0 {
            return Err(Error::DimMismatch { expected: 1, got: 0 });
        }
        let n = matrices[0].len();
        for m in &matrices {
            if m.len() != n || m.iter().any(|r| r.len() != n) {
                return Err(Error::DimMismatch { expected: n, got: m.len() });
            }
        }
        let rc = RowContraction { d, n, matrices };
        let e = defect_min_eigenvalue(&rc.cmats());
        if e < -tol {
            return Err(Error::NotRowContraction(e));
        }
        Ok(rc)
    }

    pub fn from_cmats(mats: &[CMat], tol: f64) -> Result<Self> {
        Self::new(mats.iter().map(from_cmat).collect(), tol)
    }

    pub fn cmats(&self) -> Vec<CMat> {
        self.matrices.iter().map(|m| to_cmat(m)).collect()
    }

    pub fn to_json(&self) -> RowContractionJson {
        RowContractionJson { d: self.d, n: self.n, matrices: self.matrices.clone() }
    }

    pub fn from_json(j: &RowContractionJson, tol: f64) -> Result<Self> {
        let rc = Self::new(j.matrices.clone(), tol)?;
        if rc.d != j.d || rc.n != j.n {
            return Err(Error::DimMismatch { expected: j.n, got: rc.n });
        }
        Ok(rc)
    }
}

fn det(m: Vec<Vec<MultiPoly>>) -> MultiPoly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = MultiPoly::zero(m[0][0].vars().to_vec());
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<MultiPoly>> = m[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = m[0][j].mul(&det(minor));
        acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

fn pencil_det(d: usize, mats: &[Vec<Vec<Scalar>>]) -> MultiPoly {
    let v = ball_vars(d);
    let n = mats.first().map_or(0, |m| m.len());
    if n == 0 {
        return MultiPoly::constant(v, Scalar::one());
    }
    let mut entries = vec![vec![MultiPoly::zero(v.clone()); n]; n];
    for (i, row) in entries.iter_mut().enumerate() {
        for (k, e) in row.iter_mut().enumerate() {
            if i == k {
                *e = MultiPoly::constant(v.clone(), Scalar::one());
            }
            for (j, a) in mats.iter().enumerate() {
                *e = e.sub(&MultiPoly::var(v.clone(), j).scalar_mul(&a[i][k]));
            }
        }
    }
    det(entries)
}

/// `det(I - sum_j z_j A_j)` in the ball variables.
pub fn rowdet_poly(a: &RowContraction) -> MultiPoly {
    pencil_det(a.d, &a.matrices)
}

#[derive(Clone, Debug)]
pub struct RowdetFactorization {
    /// Distinct boundary zeros with how many factors each contributed.
    pub zeros: Vec<(Vec<Complex64>, usize)>,
    pub peeled: usize,
    pub residual: MultiPoly,
    pub residual_matrices: Vec<CMat>,
    /// Largest coefficient of `p - prod_k (1 - <z, zeta_k>) q`.
    pub reconstruction_error: f64,
}

const EIG_TOL: f64 = 1e-9;

/// A common eigenvector of the `A_j^*` with unimodular eigenvalue tuple.
fn find_boundary_zero(mats: &[CMat], rng: &mut ChaCha8Rng) -> Result<Option<(DVector<Complex64>, Vec<Complex64>)>> {
    let n = mats[0].nrows();
    let scale = mats.iter().map(|m| m.norm()).fold(1.0, f64::max);
    let mut near_miss = false;
    for _attempt in 0..4 {
        let mut c = CMat::zeros(n, n);
        for a in mats {
            let r = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            c += a.adjoint() * r;
        }
        let eig: Vec<Complex64> = match c.clone().schur().eigenvalues() {
            Some(e) => e.iter().cloned().collect(),
            None => continue,
        };
        for lam in eig {
            let shifted = &c - CMat::identity(n, n) * lam;
            let svd = shifted.svd(false, true);
            let vt = match svd.v_t {
                Some(v) => v,
                None => continue,
            };
            let (imin, _) = svd
                .singular_values
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
            let v: DVector<Complex64> = vt.row(imin).adjoint();
            let v = &v / Complex64::new(v.norm(), 0.0);
            let mut zeta = Vec::new();
            let mut resid: f64 = 0.0;
            for a in mats {
                let av = a.adjoint() * &v;
                let z = v.dotc(&av);
                resid = resid.max((av - &v * z).norm());
                zeta.push(z);
            }
            let norm2: f64 = zeta.iter().map(|z| z.norm_sqr()).sum();
            if (norm2 - 1.0).abs() <= 1e-6 {
                if resid <= EIG_TOL * scale.max(1.0) * 10.0 {
                    return Ok(Some((v, zeta)));
                }
                near_miss = true;
            }
        }
    }
    if near_miss {
        return Err(Error::NumericalDegeneracy(
            "candidate boundary zero with an ill-conditioned common eigenvector".into(),
        ));
    }
    Ok(None)
}

/// Unitary with first column `v`.
fn complete_basis(v: &DVector<Complex64>) -> CMat {
    let n = v.len();
    let mut cols: Vec<DVector<Complex64>> = vec![v.clone()];
    for k in 0..n {
        if cols.len() == n {
            break;
        }
        let mut e = DVector::from_element(n, Complex64::new(0.0, 0.0));
        e[k] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for c in &cols {
                let p = c.dotc(&e);
                e -= c * p;
            }
        }
        let nrm = e.norm();
        if nrm > 1e-6 {
            cols.push(e / Complex64::new(nrm, 0.0));
        }
    }
    CMat::from_columns(&cols)
}

/// Peel one linear factor `1 - <z, zeta>` per boundary zero.
pub fn rowdet_factor(p: &MultiPoly, a: &RowContraction, seed: u64) -> Result<RowdetFactorization> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mats = a.cmats();
    let mut zeros: Vec<(Vec<Complex64>, usize)> = Vec::new();
    let mut factors: Vec<Vec<Complex64>> = Vec::new();
    while mats[0].nrows() > 0 {
        let (v, zeta) = match find_boundary_zero(&mats, &mut rng)? {
            Some(x) => x,
            None => break,
        };
        let w = complete_basis(&v);
        let n = mats[0].nrows();
        mats = mats
            .iter()
            .map(|m| {
                let b = w.adjoint() * m * &w;
                b.view((1, 1), (n - 1, n - 1)).into_owned()
            })
            .collect();
        match zeros.iter_mut().find(|(z, _)| z.iter().zip(&zeta).all(|(x, y)| (x - y).norm() < 1e-6)) {
            Some(entry) => entry.1 += 1,
            None => zeros.push((zeta.clone(), 1)),
        }
        factors.push(zeta);
    }
    let residual_mats: Vec<Vec<Vec<Scalar>>> = mats.iter().map(from_cmat).collect();
    let residual = pencil_det(a.d, &residual_mats).clean(1e-12);
    let vars = ball_vars(a.d);
    let mut prod = residual.clone();
    for zeta in &factors {
        let mut lin = MultiPoly::constant(vars.clone(), Scalar::one());
        for (j, zj) in zeta.iter().enumerate() {
            lin = lin.sub(&MultiPoly::var(vars.clone(), j).scalar_mul(&Scalar::from_c64(zj.conj())));
        }
        prod = prod.mul(&lin);
    }
    let reconstruction_error = p.to_float().sub(&prod).max_abs();
    Ok(RowdetFactorization {
        peeled: factors.len(),
        zeros,
        residual,
        residual_matrices: mats,
        reconstruction_error,
    })
}

/// A random row contraction with a planted boundary zero `zeta`:
/// `A_j = W diag(conj zeta_j, C_j) W^*` with `sum C_j C_j^* <= 0.81 I`.
pub fn planted_instance(d: usize, n: usize, seed: u64) -> (RowContraction, Vec<Complex64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let raw: Vec<Complex64> = (0..d).map(|_| gauss()).collect();
    let nz = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let zeta: Vec<Complex64> = raw.iter().map(|z| z / nz).collect();
    let cs: Vec<CMat> = (0..d).map(|_| CMat::from_fn(n - 1, n - 1, |_, _| gauss())).collect();
    let mut row = CMat::zeros(n - 1, (n - 1) * d);
    for (j, c) in cs.iter().enumerate() {
        row.view_mut((0, j * (n - 1)), (n - 1, n - 1)).copy_from(c);
    }
    let s = if n > 1 { row.singular_values().max() } else { 1.0 };
    let scale = Complex64::new(0.9 / s.max(1e-12), 0.0);
    let v = complete_basis(&DVector::from_fn(n, |_, _| gauss()).normalize());
    let mats: Vec<CMat> = (0..d)
        .map(|j| {
            let mut b = CMat::zeros(n, n);
            b[(0, 0)] = zeta[j].conj();
            if n > 1 {
                b.view_mut((1, 1), (n - 1, n - 1)).copy_from(&(&cs[j] * scale));
            }
            &v * b * v.adjoint()
        })
        .collect();
    (RowContraction::from_cmats(&mats, 1e-9).expect("planted instance is a row contraction"), zeta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn s(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
        rows.iter().map(|r| r.iter().map(|&x| Scalar::int(x)).collect()).collect()
    }

    #[test]
    fn diagonal_pair() {
        let a = RowContraction::new(vec![s(&[&[1, 0], &[0, 0]]), s(&[&[0, 0], &[0, 1]])], 1e-12).unwrap();
        let p = rowdet_poly(&a);
        assert_eq!(p, parse_poly("(1 - z1)(1 - z2)", Some(&ball_vars(2))).unwrap());
        let f = rowdet_factor(&p, &a, 7).unwrap();
        assert_eq!(f.peeled, 2);
        assert!(f.reconstruction_error < 1e-12);
        assert_eq!(f.residual.total_degree(), 0);
        let mut zs: Vec<Vec<f64>> = f.zeros.iter().map(|(z, _)| z.iter().map(|x| x.norm()).collect()).collect();
        zs.sort_by(|x, y| y.partial_cmp(x).unwrap());
        assert_eq!(zs, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn scalar_case() {
        let a = RowContraction::new(vec![s(&[&[1]]), s(&[&[0]])], 1e-12).unwrap();
        let p = rowdet_poly(&a);
        assert_eq!(p, parse_poly("1 - z1", Some(&ball_vars(2))).unwrap());
        let f = rowdet_factor(&p, &a, 1).unwrap();
        assert_eq!(f.peeled, 1);
        assert!((f.zeros[0].0[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rejects_non_contraction() {
        let r = RowContraction::new(vec![s(&[&[1]]), s(&[&[1]])], 1e-9);
        assert!(matches!(r, Err(Error::NotRowContraction(_))));
    }

    #[test]
    fn fixed_vector_forces_zero_rows() {
        // A_1^* e_1 = e_1 together with sum A_j A_j^* <= I leaves no room in
        // the first row of the other matrices
        let (a, _) = planted_instance(2, 3, 11);
        let mats = a.cmats();
        let f = rowdet_factor(&rowdet_poly(&a), &a, 3).unwrap();
        assert_eq!(f.peeled, 1);
        let zeta = &f.zeros[0].0;
        // rotate z so that zeta = e_1, then A'_1 = sum conj(u_j1) A_j has A'_1^* v = v
        let a1: CMat = mats.iter().zip(zeta).fold(CMat::zeros(3, 3), |acc, (m, z)| acc + m * *z);
        let a2: CMat = &mats[0] * (-zeta[1].conj()) + &mats[1] * zeta[0].conj();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (v, _) = find_boundary_zero(&mats, &mut rng).unwrap().unwrap();
        assert!((a1.adjoint() * &v - &v).norm() < 1e-8);
        assert!((a2.adjoint() * &v).norm() < 1e-8);
    }
}
