//! Numerical checks: sampling scans, growth-exponent fits, boundedness
//! probes along curves, and tracing of boundary zero curves.
//!
//! Random streams come from ChaCha8 seeded with a `u64`, so reports are
//! reproducible across platforms.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::{angular_critical_g, g_direct, BranchClass, LData, Tag};
use crate::constructors::ParamCurve;
use crate::error::{Error, Result};
use crate::multipoly::MultiPoly;
use crate::puiseux::{expand_branches, PuiseuxBranch};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    UniformBall,
    BoundaryShell,
    BranchPerturbation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Siegel,
    Ball,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleConfig {
    pub seed: u64,
    pub count: usize,
    pub radius: f64,
    pub domain: Domain,
    pub strategy: Strategy,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { seed: 42, count: 10_000, radius: 0.1, domain: Domain::Siegel, strategy: Strategy::UniformBall }
    }
}

fn unit_ball_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<Complex64> {
    // direction from the Gaussian-free rejection method, radius with density r^{2n-1}
    loop {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let nrm2: f64 = v.iter().map(|x| x.norm_sqr()).sum();
        if nrm2 <= 1.0 && nrm2 > 1e-24 {
            let r = radius * rng.random::<f64>().powf(1.0 / (2 * n) as f64);
            let s = r / nrm2.sqrt();
            return v.into_iter().map(|x| x * s).collect();
        }
    }
}

fn siegel_point(rng: &mut ChaCha8Rng, d: usize, radius: f64, shell: bool) -> Vec<Complex64> {
    let mut z = if d > 1 { unit_ball_point(rng, d - 1, radius) } else { vec![] };
    let r2 = radius * radius;
    let u = if shell {
        r2 * 10f64.powf(-6.0 * rng.random::<f64>())
    } else {
        r2 * (1.0 - rng.random::<f64>())
    };
    let im = z.iter().map(|x| x.norm_sqr()).sum::<f64>() + u;
    let re = rng.random_range(-r2..r2);
    z.push(Complex64::new(re, im));
    z
}

/// Deterministic sample stream for `(seed, count, strategy)`.
pub fn sample_points(cfg: &SampleConfig, d: usize, branches: &[PuiseuxBranch]) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.count);
    for _ in 0..cfg.count {
        let pt = match (cfg.domain, cfg.strategy) {
            (Domain::Ball, Strategy::BoundaryShell) => {
                let mut v = unit_ball_point(&mut rng, d, 1.0);
                let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
                let target = 1.0 - 10f64.powf(-1.0 - 5.0 * rng.random::<f64>());
                for x in v.iter_mut() {
                    *x *= target / n.max(1e-300);
                }
                v
            }
            (Domain::Ball, _) => unit_ball_point(&mut rng, d, 1.0),
            (Domain::Siegel, Strategy::UniformBall) => siegel_point(&mut rng, d, cfg.radius, false),
            (Domain::Siegel, Strategy::BoundaryShell) => siegel_point(&mut rng, d, cfg.radius, true),
            (Domain::Siegel, Strategy::BranchPerturbation) => {
                if branches.is_empty() || d != 2 {
                    siegel_point(&mut rng, d, cfg.radius, true)
                } else {
                    let b = &branches[rng.random_range(0..branches.len())];
                    let rho = cfg.radius.powf(1.0 / b.m as f64);
                    let r = rho * rng.random::<f64>();
                    let th = rng.random_range(0.0..std::f64::consts::TAU);
                    let t = Complex64::from_polar(r, th);
                    let z = b.c.to_c64() * t.powu(b.m);
                    let mut w = b.phi.eval_c64(t);
                    let deficit = z.norm_sqr() - w.im;
                    if deficit >= 0.0 {
                        let u = cfg.radius * cfg.radius * (1.0 - rng.random::<f64>());
                        w.im += deficit + u;
                    }
                    vec![z, w]
                }
            }
        };
        out.push(pt);
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub count: usize,
    pub min_abs: f64,
    pub argmin: Vec<Complex64>,
    pub zero_hits: usize,
    /// Up to 32 hit points, sorted by `|p|`.
    pub hit_points: Vec<Vec<Complex64>>,
}

/// Minimum of `|p|` over samples of the open domain; a hit is `|p| < tol`.
pub fn stability_scan(p: &MultiPoly, cfg: &SampleConfig, tol: f64) -> ScanReport {
    let branches = if cfg.strategy == Strategy::BranchPerturbation && p.dim() == 2 {
        expand_branches(p, 24).unwrap_or_default()
    } else {
        vec![]
    };
    let pts = sample_points(cfg, p.dim(), &branches);
    let mut min_abs = f64::INFINITY;
    let mut argmin = vec![];
    let mut hits: Vec<(f64, Vec<Complex64>)> = vec![];
    for pt in pts.iter() {
        let v = p.eval_c64(pt).norm();
        if v < min_abs {
            min_abs = v;
            argmin = pt.clone();
        }
        if v < tol {
            hits.push((v, pt.clone()));
        }
    }
    hits.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let zero_hits = hits.len();
    ScanReport {
        count: pts.len(),
        min_abs,
        argmin,
        zero_hits,
        hit_points: hits.into_iter().take(32).map(|h| h.1).collect(),
    }
}

/// `n` log-spaced values from `a` to `b` inclusive.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|k| (la + (lb - la) * k as f64 / (n - 1).max(1) as f64).exp())
        .collect()
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// `x_k(r)` with `x e^{Re L(x mu^k)} = r`, so that `|Psi(x mu^k)| = r`.
fn critical_parameter(ld: &LData, r: f64, k: i64) -> f64 {
    let mu = Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 / ld.m as f64);
    let mut x = r;
    for _ in 0..60 {
        let val = ld.l.eval_c64(mu * x).re;
        let next = r * (-val).exp();
        if (next - x).abs() <= 1e-16 * r {
            return next;
        }
        x = next;
    }
    x
}

/// Slope of `log min_k G` at the angular critical points of modulus `r`
/// against `log r`, over 20 radii in `[1e-3, 1e-1]`. For a basic branch the
/// minimum is taken over a circle of angles instead.
pub fn g_exponent_fit(b: &PuiseuxBranch, class: &BranchClass, ld: Option<&LData>) -> Result<f64> {
    let radii = log_grid(1e-3, 1e-1, 20);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &r in &radii {
        let g = match (class.tag, ld) {
            (Tag::Isolated, Some(ld)) | (Tag::Curve, Some(ld)) => {
                let mut best = f64::INFINITY;
                for k in 0..2 * ld.m as i64 {
                    let x = critical_parameter(ld, r, k);
                    best = best.min(angular_critical_g(ld, x, k)?);
                }
                best
            }
            (Tag::Basic, _) => (0..256)
                .map(|j| {
                    let t = Complex64::from_polar(r, std::f64::consts::TAU * j as f64 / 256.0);
                    g_direct(b, t)
                })
                .fold(f64::INFINITY, f64::min),
            _ => return Err(Error::DegenerateFit(format!("no fit for a {:?} branch", class.tag))),
        };
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::DegenerateFit(format!("G = {g} at r = {r}")));
        }
        xs.push(r.ln());
        ys.push(g.ln());
    }
    Ok(ls_slope(&xs, &ys))
}

/// Growth threshold for probes: the ratio must rise by at least
/// `10^{0.4}` per decade of the curve parameter, monotonically.
pub const GROWTH_SLOPE: f64 = -0.4;

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ProbeVerdict {
    Bounded { max_ratio: f64, ratios: Vec<f64> },
    Growth { rate: f64, ratios: Vec<f64> },
}

/// Tabulate `|q/p|` at the points; `dist` is the distance parameter of each
/// point to the boundary zero (decreasing).
pub fn boundedness_probe(q: &MultiPoly, p: &MultiPoly, pts: &[Vec<Complex64>], dist: &[f64]) -> ProbeVerdict {
    let ratios: Vec<f64> = pts.iter().map(|pt| (q.eval_c64(pt) / p.eval_c64(pt)).norm()).collect();
    let usable: Vec<(f64, f64)> = dist
        .iter()
        .zip(&ratios)
        .filter(|(_, r)| r.is_finite() && **r > 0.0)
        .map(|(d, r)| (d.ln(), r.ln()))
        .collect();
    if usable.len() >= 3 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = usable.iter().cloned().unzip();
        let rate = ls_slope(&xs, &ys);
        let monotone = ratios.windows(2).all(|w| w[1] >= 0.99 * w[0]);
        if rate <= GROWTH_SLOPE && monotone {
            return ProbeVerdict::Growth { rate, ratios };
        }
    }
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    ProbeVerdict::Bounded { max_ratio, ratios }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub param: f64,
    pub z: Complex64,
    pub w: Complex64,
}

/// Where a boundary curve comes from.
#[derive(Clone, Debug)]
pub enum TraceSource {
    /// `theta -> (+-(sqrt2/2) e^{i theta/2} e^{i pi/4} sqrt(sin theta), -1/2 + e^{i theta}/2)`,
    /// the boundary zeros of `w + w^2 - z^2`.
    Lemniscate,
    /// Curve-type parametrization evaluated at real `s` in `[-s_max, s_max]`.
    Param { curve: ParamCurve, s_max: f64 },
    /// Ridge of zeros of `|z|^2 - Im w` on `Z_p` through the origin.
    Poly(MultiPoly),
}

pub fn lemniscate_point(theta: f64, sign: f64) -> (Complex64, Complex64) {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let z = Complex64::from_polar(half * theta.sin().max(0.0).sqrt(), theta / 2.0 + std::f64::consts::FRAC_PI_4) * sign;
    let w = Complex64::new(-0.5, 0.0) + Complex64::from_polar(0.5, theta);
    (z, w)
}

pub fn trace_boundary_curve(src: &TraceSource, n_points: usize) -> Result<Vec<TracePoint>> {
    match src {
        TraceSource::Lemniscate => {
            // theta runs over [0, pi] on the + lobe, then back on the - lobe
            let mut out = Vec::with_capacity(n_points);
            for j in 0..n_points {
                let u = 2.0 * j as f64 / n_points as f64;
                let (theta, sign) = if u <= 1.0 { (u * std::f64::consts::PI, 1.0) } else { ((2.0 - u) * std::f64::consts::PI, -1.0) };
                let (z, w) = lemniscate_point(theta, sign);
                out.push(TracePoint { param: u * std::f64::consts::PI, z, w });
            }
            Ok(out)
        }
        TraceSource::Param { curve, s_max } => Ok((0..n_points)
            .map(|j| {
                let s = -s_max + 2.0 * s_max * j as f64 / (n_points - 1).max(1) as f64;
                let sc = Complex64::new(s, 0.0);
                TracePoint { param: s, z: curve.z_series.eval_c64(sc), w: curve.w_series.eval_c64(sc) }
            })
            .collect()),
        TraceSource::Poly(p) => trace_ridge(p, n_points),
    }
}

/// Residuals `|Im w - |z|^2|` and `|p(z, w)|` over a trace.
pub fn trace_residuals(pts: &[TracePoint], p: Option<&MultiPoly>) -> (f64, f64) {
    let mut a: f64 = 0.0;
    let mut b: f64 = 0.0;
    for t in pts {
        a = a.max((t.w.im - t.z.norm_sqr()).abs());
        if let Some(p) = p {
            b = b.max(p.eval_c64(&[t.z, t.w]).norm());
        }
    }
    (a, b)
}

pub fn trace_to_csv(pts: &[TracePoint]) -> String {
    let mut s = String::from("param,z_re,z_im,w_re,w_im\n");
    for t in pts {
        s.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            t.param, t.z.re, t.z.im, t.w.re, t.w.im
        ));
    }
    s
}

// Ridge tracing. On Z_p the defect h = |z|^2 - Im w is >= 0 near a curve of
// boundary zeros and vanishes along it, so the curve is a valley floor: the
// Hessian of h in a holomorphic chart has a null (tangent) direction and a
// positive (normal) one. Predict along the tangent, correct along the normal.

struct RidgeCtx<'a> {
    p: &'a MultiPoly,
    pz: MultiPoly,
    pw: MultiPoly,
    pzz: MultiPoly,
    pzw: MultiPoly,
    pww: MultiPoly,
}

#[derive(Clone, Copy)]
enum Chart {
    Z,
    W,
}

impl<'a> RidgeCtx<'a> {
    fn new(p: &'a MultiPoly) -> Self {
        let pz = p.partial(0);
        let pw = p.partial(1);
        RidgeCtx { pzz: pz.partial(0), pzw: pz.partial(1), pww: pw.partial(1), pz, pw, p }
    }

    fn chart(&self, z: Complex64, w: Complex64) -> Chart {
        if self.pw.eval_c64(&[z, w]).norm() >= self.pz.eval_c64(&[z, w]).norm() {
            Chart::W
        } else {
            Chart::Z
        }
    }

    /// Put `(z, w)` back on `Z_p`, moving only the dependent coordinate.
    fn project(&self, chart: Chart, mut z: Complex64, mut w: Complex64) -> (Complex64, Complex64) {
        for _ in 0..40 {
            let f = self.p.eval_c64(&[z, w]);
            let step = match chart {
                Chart::W => f / self.pw.eval_c64(&[z, w]),
                Chart::Z => f / self.pz.eval_c64(&[z, w]),
            };
            match chart {
                Chart::W => w -= step,
                Chart::Z => z -= step,
            }
            if step.norm() < 1e-17 {
                break;
            }
        }
        (z, w)
    }

    /// Gradient and Hessian of `h` with respect to the real and imaginary
    /// parts of the free coordinate (`z` in chart `W`, where `w = w(z)`).
    fn derivs(&self, chart: Chart, z: Complex64, w: Complex64) -> (Vector2<f64>, Matrix2<f64>) {
        let pt = [z, w];
        let (pz, pw) = (self.pz.eval_c64(&pt), self.pw.eval_c64(&pt));
        let (pzz, pzw, pww) = (self.pzz.eval_c64(&pt), self.pzw.eval_c64(&pt), self.pww.eval_c64(&pt));
        let two_i = Complex64::new(0.0, 2.0);
        let (h_x, h_xxbar, h_xx) = match chart {
            Chart::W => {
                let w1 = -pz / pw;
                let w2 = -(pzz + pzw * w1 * 2.0 + pww * w1 * w1) / pw;
                (z.conj() - w1 / two_i, 1.0, -w2 / two_i)
            }
            Chart::Z => {
                let z1 = -pw / pz;
                let z2 = -(pww + pzw * z1 * 2.0 + pzz * z1 * z1) / pz;
                (z.conj() * z1 - Complex64::new(1.0, 0.0) / two_i, z1.norm_sqr(), z.conj() * z2)
            }
        };
        let g = Vector2::new(2.0 * h_x.re, -2.0 * h_x.im);
        let hm = Matrix2::new(
            2.0 * h_xx.re + 2.0 * h_xxbar,
            -2.0 * h_xx.im,
            -2.0 * h_xx.im,
            -2.0 * h_xx.re + 2.0 * h_xxbar,
        );
        (g, hm)
    }

    fn shift(&self, chart: Chart, z: Complex64, w: Complex64, d: Complex64) -> (Complex64, Complex64) {
        match chart {
            Chart::W => self.project(chart, z + d, w),
            Chart::Z => self.project(chart, z, w + d),
        }
    }

    fn tangent_normal(&self, chart: Chart, z: Complex64, w: Complex64) -> (Complex64, Complex64, f64, Vector2<f64>) {
        let (g, h) = self.derivs(chart, z, w);
        let e = h.symmetric_eigen();
        let (i_small, i_big) = if e.eigenvalues[0] <= e.eigenvalues[1] { (0, 1) } else { (1, 0) };
        let t = e.eigenvectors.column(i_small);
        let n = e.eigenvectors.column(i_big);
        (Complex64::new(t[0], t[1]), Complex64::new(n[0], n[1]), e.eigenvalues[i_big], g)
    }

    /// Newton steps along the normal direction onto the valley floor.
    fn correct(&self, mut z: Complex64, mut w: Complex64) -> (Complex64, Complex64) {
        for _ in 0..30 {
            let chart = self.chart(z, w);
            let (_, n, lam, g) = self.tangent_normal(chart, z, w);
            if lam <= 0.0 {
                break;
            }
            let gn = g[0] * n.re + g[1] * n.im;
            let step = n * (-gn / lam);
            let (z1, w1) = self.shift(chart, z, w, step);
            z = z1;
            w = w1;
            if step.norm() < 1e-15 {
                break;
            }
        }
        (z, w)
    }
}

fn trace_ridge(p: &MultiPoly, n_points: usize) -> Result<Vec<TracePoint>> {
    if p.dim() != 2 {
        return Err(Error::DimMismatch { expected: 2, got: p.dim() });
    }
    let ctx = RidgeCtx::new(p);
    let origin = Complex64::new(0.0, 0.0);
    if p.eval_c64(&[origin, origin]).norm() > 1e-12 {
        return Err(Error::NotAtOrigin);
    }
    let h_step = 2e-3;
    let max_steps = 200_000;
    let mut path: Vec<(Complex64, Complex64)> = vec![(origin, origin)];
    let mut closed = false;
    for dir_sign in [1.0, -1.0] {
        if closed {
            break;
        }
        let (mut z, mut w) = (origin, origin);
        let chart0 = ctx.chart(z, w);
        let (t0, _, _, _) = ctx.tangent_normal(chart0, z, w);
        let mut prev_dir: Option<(Complex64, Complex64)> = None;
        let mut seed_t = t0 * dir_sign;
        let mut branch: Vec<(Complex64, Complex64)> = Vec::new();
        for step in 0..max_steps {
            let chart = ctx.chart(z, w);
            let (t, _, _, _) = ctx.tangent_normal(chart, z, w);
            let mut t = if step == 0 { seed_t } else { t };
            // keep the orientation consistent with the previous step
            let (z1, w1) = ctx.shift(chart, z, w, t * h_step);
            let (dz, dw) = (z1 - z, w1 - w);
            if let Some((pz_, pw_)) = prev_dir {
                if (dz * pz_.conj() + dw * pw_.conj()).re < 0.0 {
                    t = -t;
                }
            }
            let local = (dz.norm_sqr() + dw.norm_sqr()).sqrt().max(1e-300);
            let scale = h_step / local * h_step;
            let (zp, wp) = ctx.shift(chart, z, w, t * scale);
            let (zc, wc) = ctx.correct(zp, wp);
            let defect = (wc.im - zc.norm_sqr()).abs();
            if defect > 1e-6 || zc.norm() > 1e3 || wc.norm() > 1e3 || !zc.is_finite() || !wc.is_finite() {
                break;
            }
            prev_dir = Some((zc - z, wc - w));
            z = zc;
            w = wc;
            seed_t = t;
            branch.push((z, w));
            if step > 20 && (z.norm_sqr() + w.norm_sqr()).sqrt() < 1.5 * h_step {
                closed = true;
                break;
            }
        }
        if dir_sign > 0.0 {
            path.extend(branch);
        } else {
            branch.reverse();
            let mut joined = branch;
            joined.extend(path);
            path = joined;
        }
    }
    if path.len() < 2 {
        return Err(Error::NumericalDegeneracy("no boundary zero curve through the origin".into()));
    }
    // resample by arclength
    let mut arc = vec![0.0];
    for k in 1..path.len() {
        let (a, b) = (path[k - 1], path[k]);
        arc.push(arc[k - 1] + ((b.0 - a.0).norm_sqr() + (b.1 - a.1).norm_sqr()).sqrt());
    }
    let total = *arc.last().unwrap();
    let mut out = Vec::with_capacity(n_points);
    let mut k = 1;
    for j in 0..n_points {
        let s = total * j as f64 / n_points as f64;
        while k < arc.len() - 1 && arc[k] < s {
            k += 1;
        }
        let f = ((s - arc[k - 1]) / (arc[k] - arc[k - 1]).max(1e-300)).clamp(0.0, 1.0);
        let z = path[k - 1].0 + (path[k].0 - path[k - 1].0) * f;
        let w = path[k - 1].1 + (path[k].1 - path[k - 1].1) * f;
        let chart = ctx.chart(z, w);
        let (z, w) = ctx.project(chart, z, w);
        let (z, w) = ctx.correct(z, w);
        out.push(TracePoint { param: s, z, w });
    }
    Ok(out)
}
