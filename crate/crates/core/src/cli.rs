//! Command-line front end.
//!
//! Polynomials are given as text (`"w - i*w^2 - i*z^2"`), as polynomial JSON,
//! or as a path to a JSON file. Text whose variables include `w` is read in
//! the Siegel picture; text in `z1..zd` only is read in the ball picture and
//! moved to the Siegel picture at the boundary point `(0, .., 0, 1)`.
//!
//! Exit codes: 0 success, 2 input error, 3 unsettled or inconclusive,
//! 4 numerical degeneracy.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::classify::{classify_polynomial, classify_simple_zero_tol, ClassifyOptions, Tag};
use crate::constructors::{
    check_algebraic_l, family_pc, family_qc, make_param, one_variable_lift, planted_instance, quadratic_form_poly,
    rowdet_factor, rowdet_poly, rudin_poly, RowContraction, RowContractionJson,
};
use crate::error::{Error, Result};
use crate::ideals::{ideal_for, is_member_tol, unboundedness_witness};
use crate::multipoly::{ball_vars, siegel_vars, transport_ball_to_siegel, transport_siegel_to_ball, MultiPoly, PolyJson};
use crate::parse::{detect_vars, parse_poly};
use crate::puiseux::expand_branches_tol;
use crate::scalar::{Backend, Scalar};
use crate::series::TruncSeries;
use crate::verify::{
    g_exponent_fit, stability_scan, trace_boundary_curve, trace_residuals, trace_to_csv, Domain, SampleConfig, Strategy,
    TraceSource,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "stablepoly", version, about = "Local analysis of stable polynomials at a boundary zero")]
pub struct Cli {
    #[command(flatten)]
    pub config: CliConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CliConfig {
    /// Coefficient arithmetic: exact (Gaussian rationals) or float.
    #[arg(long, global = true, env = "STABLEPOLY_BACKEND", default_value = "exact")]
    pub backend: Backend,
    /// Initial truncation order for series.
    #[arg(long, global = true, default_value_t = 32)]
    pub order: usize,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Branches, classification and ideal in one report.
    Analyze { poly: String },
    Classify { poly: String },
    Branches { poly: String },
    Ideal { poly: String },
    /// Membership of a numerator in the admissible ideal of a denominator.
    Member {
        #[arg(long)]
        numerator: String,
        #[arg(long)]
        denominator: String,
    },
    Transport {
        #[arg(long, value_enum)]
        to: Picture,
        poly: String,
    },
    #[command(subcommand)]
    Construct(Construct),
    /// Necessary conditions on an algebraic `e^L` given by `P(s, y) = 0`.
    CheckAlgL {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 1)]
        m: u32,
    },
    #[command(subcommand)]
    Verify(Verify),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Picture {
    Ball,
    Siegel,
}

#[derive(Subcommand, Debug)]
pub enum Construct {
    /// `w - i w^2 - 2ci z^2`.
    Pc {
        #[arg(long)]
        c: String,
    },
    /// `w - 3i w^2 - 3w^3 + i w^4 + 8ci z^4`.
    Qc {
        #[arg(long)]
        c: String,
    },
    /// `1 - z2 - sum_k g_k z1^{2k}` from comma-separated `g_1, g_2, ..`.
    Rudin {
        #[arg(long, value_delimiter = ',')]
        g: Vec<String>,
    },
    /// `1 - z2 - z^T A z` from a symmetric matrix given as JSON rows of scalars.
    Quadform {
        #[arg(long)]
        matrix: String,
    },
    /// Determinant polynomial of a row contraction (matrix JSON), factored at
    /// its boundary zeros. `--planted d,N` builds a random instance instead.
    Rowdet {
        #[arg(long)]
        matrices: Option<String>,
        #[arg(long, value_delimiter = ',')]
        planted: Option<Vec<usize>>,
    },
    /// Curve `(c s^M e^{ML}, w(s))` from `L` given as a polynomial in `s`.
    Param {
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long)]
        l: String,
    },
    /// `p(d^{d/2} z1 .. zd)` for a one-variable `p` in `x`.
    Lift {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        d: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum Verify {
    /// Sample the domain and report the smallest `|p|`.
    Scan {
        #[arg(long)]
        poly: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0.1)]
        radius: f64,
        #[arg(long, value_enum, default_value_t = StrategyArg::UniformBall)]
        strategy: StrategyArg,
    },
    /// Fitted exponent of `min G` on circles `|t| = r`, per branch.
    Gfit {
        #[arg(long)]
        poly: String,
    },
    /// `|q/p|` along test curves of the ideal of `p`.
    Probe {
        #[arg(long)]
        numerator: String,
        #[arg(long)]
        denominator: String,
    },
    /// Boundary zero curve through the origin.
    Trace {
        #[arg(long)]
        poly: Option<String>,
        /// Trace the curve of a parametrization `L` (polynomial in `s`) instead.
        #[arg(long)]
        l: Option<String>,
        #[arg(long, default_value_t = 0.1)]
        s_max: f64,
        #[arg(long, default_value_t = 512)]
        points: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    UniformBall,
    BoundaryShell,
    BranchPerturbation,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::UniformBall => Strategy::UniformBall,
            StrategyArg::BoundaryShell => Strategy::BoundaryShell,
            StrategyArg::BranchPerturbation => Strategy::BranchPerturbation,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnsettledCase(_) | Error::Inconclusive(_) | Error::InsufficientOrder { .. } => 3,
        Error::NumericalDegeneracy(_) | Error::DegenerateFit(_) | Error::WitnessSearchFailed(_) => 4,
        _ => 2,
    }
}

/// Command output: a JSON value plus renderings for the other formats.
#[derive(Debug)]
pub struct Output {
    pub json: Value,
    pub text: String,
    pub csv: Option<String>,
    pub code: i32,
}

impl Output {
    fn new(json: Value, text: String) -> Self {
        Output { json, text, csv: None, code: 0 }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(&self.json).unwrap_or_default() + "\n",
            Format::Csv => self.csv.clone().unwrap_or_else(|| self.text.clone()),
            Format::Text => self.text.clone(),
        }
    }
}

fn read_source(src: &str) -> Result<String> {
    let t = src.trim();
    if !t.starts_with('{') && !t.starts_with('[') && std::path::Path::new(t).is_file() {
        return std::fs::read_to_string(t).map_err(|e| Error::Parse(format!("{t}: {e}")));
    }
    Ok(src.to_string())
}

fn json_poly(src: &str) -> Result<Option<MultiPoly>> {
    if !src.trim_start().starts_with('{') {
        return Ok(None);
    }
    let j: PolyJson = serde_json::from_str(src).map_err(|e| Error::Parse(e.to_string()))?;
    MultiPoly::from_json(&j).map(Some)
}

/// Parse a polynomial; `None` for the picture means detect it.
fn load_poly(src: &str, extra_vars: Option<&[String]>) -> Result<MultiPoly> {
    let src = read_source(src)?;
    if let Some(p) = json_poly(&src)? {
        return Ok(p);
    }
    let vars = match extra_vars {
        Some(v) => v.to_vec(),
        None => canonical_vars(detect_vars(&src)?),
    };
    parse_poly(&src, Some(&vars))
}

/// Fill in variables that do not occur: `z1..zk` up to the largest index seen,
/// and a `z` when `w` stands alone.
fn canonical_vars(v: Vec<String>) -> Vec<String> {
    let has_w = v.iter().any(|x| x == "w");
    let max_idx = v.iter().filter_map(|x| x.strip_prefix('z')?.parse::<usize>().ok()).max();
    match (has_w, max_idx) {
        (true, Some(k)) if v.iter().all(|x| x == "w" || x.starts_with('z')) => siegel_vars(k + 1),
        (false, Some(k)) if v.iter().all(|x| x.starts_with('z')) => ball_vars(k),
        (true, None) if v.len() == 1 => siegel_vars(2),
        _ => v,
    }
}

fn with_backend(p: MultiPoly, cfg: &CliConfig) -> MultiPoly {
    match cfg.backend {
        Backend::Exact => p,
        Backend::Float => p.to_float(),
    }
}

/// Siegel-picture polynomial with canonical variable names.
fn siegel_poly(src: &str, cfg: &CliConfig) -> Result<(MultiPoly, bool)> {
    let p = load_poly(src, None)?;
    let (p, from_ball) = if p.vars().last().map(String::as_str) == Some("w") {
        (p, false)
    } else {
        (transport_ball_to_siegel(&p), true)
    };
    if p.dim() < 2 {
        return Err(Error::DimMismatch { expected: 2, got: p.dim() });
    }
    let d = p.dim();
    Ok((with_backend(p.with_vars(siegel_vars(d)), cfg), from_ball))
}

/// Numerator and denominator read in the same picture.
fn siegel_pair(q: &str, p: &str, cfg: &CliConfig) -> Result<(MultiPoly, MultiPoly)> {
    let ps = read_source(p)?;
    let qs = read_source(q)?;
    let pp = load_poly(&ps, None)?;
    let mut vars = pp.vars().to_vec();
    if json_poly(&qs)?.is_none() {
        for v in detect_vars(&qs)? {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        vars.sort_by_key(|v| (v == "w", v.clone()));
        vars = canonical_vars(vars);
    }
    let pp = if json_poly(&ps)?.is_some() { pp } else { load_poly(&ps, Some(&vars))? };
    let qq = load_poly(&qs, Some(&vars))?;
    let ball = vars.last().map(String::as_str) != Some("w");
    let (pp, qq) = if ball { (transport_ball_to_siegel(&pp), transport_ball_to_siegel(&qq)) } else { (pp, qq) };
    let d = pp.dim();
    Ok((with_backend(qq.with_vars(siegel_vars(d)), cfg), with_backend(pp.with_vars(siegel_vars(d)), cfg)))
}

fn parse_scalar(s: &str) -> Result<Scalar> {
    let p = parse_poly(s, Some(&["_".to_string()]))?;
    if p.degree_in(0) > 0 {
        return Err(Error::Parse(format!("'{s}' is not a constant")));
    }
    Ok(p.coeff(&[0]))
}

/// A polynomial in `s` read as a series of the given order.
fn parse_series(s: &str, order: usize) -> Result<TruncSeries> {
    let p = parse_poly(s, Some(&["s".to_string()]))?;
    let mut out = TruncSeries::zero(order.max(p.degree_in(0) as usize));
    for (m, c) in p.terms() {
        out.set_coeff(m.0[0] as usize, c.clone());
    }
    Ok(out)
}

fn opts(cfg: &CliConfig) -> ClassifyOptions {
    ClassifyOptions { order: cfg.order, tol: cfg.tol, ..Default::default() }
}

fn classification_json(p: &MultiPoly, cfg: &CliConfig, text: &mut String) -> Result<Value> {
    if p.dim() > 2 {
        let r = classify_simple_zero_tol(p, cfg.tol)?;
        let _ = writeln!(text, "simple zero: |A| = {:?}, singular values {:?}, {:?}", r.op_norm, r.singular_values, r.verdict);
        return Ok(serde_json::to_value(&r).unwrap_or(Value::Null));
    }
    let pc = classify_polynomial(p, &opts(cfg))?;
    let mut reports = Vec::new();
    for (j, b) in pc.branches.iter().enumerate() {
        let r = b.report();
        let _ = write!(text, "branch {}: {:?}, M={}, c={}", j + 1, r.tag, r.m, r.c);
        if let Some(a0) = r.a0 {
            let _ = write!(text, ", a0={a0}");
        }
        if let Some(psi0) = &r.psi0 {
            let _ = write!(text, ", psi0={psi0}");
        }
        if let Some(iso) = &b.class.isolated {
            let _ = write!(text, ", K={}, phi0={}", iso.k, poly_in(&iso.phi0, "z"));
        }
        if let Some(w) = &b.class.witness {
            let _ = write!(text, ", witness=({}, {})", w[0], w[1]);
        }
        if b.branch.multiplicity > 1 {
            let _ = write!(text, ", multiplicity={}", b.branch.multiplicity);
        }
        text.push('\n');
        reports.push(serde_json::to_value(&r).unwrap_or(Value::Null));
    }
    let _ = writeln!(text, "locally stable: {}", pc.locally_stable());
    Ok(json!({ "order_used": pc.order_used, "locally_stable": pc.locally_stable(), "branches": reports }))
}

fn poly_in(s: &TruncSeries, var: &str) -> String {
    let p = MultiPoly::from_terms(
        vec![var.to_string()],
        s.coeffs().iter().enumerate().map(|(j, c)| (vec![j as u32], c.clone())).collect(),
    );
    p.to_string()
}

fn ideal_json(p: &MultiPoly, cfg: &CliConfig, text: &mut String) -> (Value, i32) {
    match ideal_for(p, &opts(cfg)) {
        Ok(id) => {
            let _ = writeln!(text, "ideal: {}", id.describe());
            (id.to_json(), 0)
        }
        Err(e) => {
            let _ = writeln!(text, "ideal: {e}");
            (json!({ "error": e.to_string() }), exit_code(&e))
        }
    }
}

pub fn execute(cmd: &Command, cfg: &CliConfig) -> Result<Output> {
    match cmd {
        Command::Analyze { poly } => {
            let (p, from_ball) = siegel_poly(poly, cfg)?;
            let mut text = format!("polynomial: {p}\n");
            let branches = if p.dim() == 2 {
                expand_branches_tol(&p, cfg.order, cfg.tol)?.iter().map(|b| b.to_json()).collect()
            } else {
                vec![]
            };
            let classes = classification_json(&p, cfg, &mut text)?;
            let (ideal, code) = ideal_json(&p, cfg, &mut text);
            let mut out = Output::new(
                json!({
                    "polynomial": p.to_json(),
                    "transported_from_ball": from_ball,
                    "branches": branches,
                    "classification": classes,
                    "ideal": ideal,
                }),
                text,
            );
            // an unstable polynomial is a valid answer, not an unsettled one
            out.code = if code == 2 { 0 } else { code };
            Ok(out)
        }
        Command::Classify { poly } => {
            let (p, _) = siegel_poly(poly, cfg)?;
            let mut text = String::new();
            let j = classification_json(&p, cfg, &mut text)?;
            Ok(Output::new(j, text))
        }
        Command::Branches { poly } => {
            let (p, _) = siegel_poly(poly, cfg)?;
            let bs = expand_branches_tol(&p, cfg.order, cfg.tol)?;
            let mut text = String::new();
            for b in &bs {
                let _ = writeln!(text, "z = {} t^{}, w = {}", b.c, b.m, b.phi.display_in("t"));
            }
            Ok(Output::new(serde_json::to_value(bs.iter().map(|b| b.to_json()).collect::<Vec<_>>()).unwrap(), text))
        }
        Command::Ideal { poly } => {
            let (p, _) = siegel_poly(poly, cfg)?;
            let id = ideal_for(&p, &opts(cfg))?;
            Ok(Output::new(id.to_json(), format!("{}\n", id.describe())))
        }
        Command::Member { numerator, denominator } => {
            let (q, p) = siegel_pair(numerator, denominator, cfg)?;
            let id = ideal_for(&p, &opts(cfg))?;
            let member = is_member_tol(&q, &id, cfg.tol)?;
            let mut text = format!("ideal: {}\nmember: {member}\n", id.describe());
            let mut j = json!({ "member": member, "ideal": id.to_json() });
            let mut csv = None;
            if !member {
                match unboundedness_witness(&q, &p, &id) {
                    Ok(w) => {
                        let _ = writeln!(text, "witness curve: {:?}, |q/p| ~ r^{:.3}", w.curve, w.rate);
                        let mut c = String::from("r,ratio\n");
                        for (r, v) in w.radii.iter().zip(&w.ratios) {
                            let _ = writeln!(c, "{r:.16e},{v:.16e}");
                        }
                        csv = Some(c);
                        j["witness"] = serde_json::to_value(&w).unwrap_or(Value::Null);
                    }
                    Err(e) => {
                        let _ = writeln!(text, "witness: {e}");
                        j["witness"] = json!({ "error": e.to_string() });
                    }
                }
            }
            let mut out = Output::new(j, text);
            out.csv = csv;
            Ok(out)
        }
        Command::Transport { to, poly } => {
            let p = load_poly(poly, None)?;
            let is_siegel = p.vars().last().map(String::as_str) == Some("w");
            let r = match (to, is_siegel) {
                (Picture::Ball, true) => transport_siegel_to_ball(&p),
                (Picture::Siegel, false) => transport_ball_to_siegel(&p),
                _ => p,
            };
            let r = with_backend(r, cfg);
            Ok(Output::new(serde_json::to_value(r.to_json()).unwrap(), format!("{r}\n")))
        }
        Command::Construct(c) => construct(c, cfg),
        Command::CheckAlgL { poly, m } => {
            let src = read_source(poly)?;
            let p = match json_poly(&src)? {
                Some(p) => p,
                None => parse_poly(&src, Some(&["s".to_string(), "y".to_string()]))?,
            };
            let r = check_algebraic_l(&with_backend(p, cfg), *m, cfg.order.min(64))?;
            let text = format!(
                "monomial ends: {}\nlocal type: {:?} ({})\nno s^{} term at infinity: {}\npassed: {}\n",
                r.monomial_ends,
                r.l_tag,
                r.local_gate,
                2 * m + 1,
                r.no_residue_term,
                r.passed()
            );
            Ok(Output::new(r.to_json(), text))
        }
        Command::Verify(v) => verify(v, cfg),
    }
}

fn poly_output(p: &MultiPoly, extra: Value) -> Output {
    let mut j = json!({ "polynomial": p.to_json() });
    if let (Value::Object(a), Value::Object(b)) = (&mut j, extra) {
        a.extend(b);
    }
    Output::new(j, format!("{p}\n"))
}

fn construct(c: &Construct, cfg: &CliConfig) -> Result<Output> {
    match c {
        Construct::Pc { c } => Ok(poly_output(&with_backend(family_pc(&parse_scalar(c)?), cfg), json!({}))),
        Construct::Qc { c } => Ok(poly_output(&with_backend(family_qc(&parse_scalar(c)?), cfg), json!({}))),
        Construct::Rudin { g } => {
            let g: Vec<Scalar> = g.iter().map(|s| parse_scalar(s)).collect::<Result<_>>()?;
            let r = rudin_poly(&g)?;
            let mut out = poly_output(
                &r.ball,
                json!({ "siegel": r.siegel.to_json(), "tag": r.tag, "M": r.m, "K": r.k }),
            );
            out.text = format!("ball: {}\nsiegel: {}\ntype: {:?}, M={:?}, K={:?}\n", r.ball, r.siegel, r.tag, r.m, r.k);
            Ok(out)
        }
        Construct::Quadform { matrix } => {
            let src = read_source(matrix)?;
            let rows: Vec<Vec<Value>> = serde_json::from_str(&src).map_err(|e| Error::Parse(e.to_string()))?;
            let a: Vec<Vec<Scalar>> = rows
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|v| match v {
                            Value::String(s) => parse_scalar(s),
                            Value::Number(n) => parse_scalar(&n.to_string()),
                            other => serde_json::from_value(other.clone()).map_err(|e| Error::Parse(e.to_string())),
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            let q = quadratic_form_poly(&a)?;
            let mut out = poly_output(
                &q.ball,
                json!({
                    "takagi_d": q.takagi.d,
                    "contractive": q.contractive,
                    "siegel": q.siegel.as_ref().map(MultiPoly::to_json),
                }),
            );
            out.text = format!("ball: {}\nTakagi values: {:?}\ncontractive: {}\n", q.ball, q.takagi.d, q.contractive);
            if let Some(s) = &q.siegel {
                let _ = writeln!(out.text, "siegel: {s}");
            }
            Ok(out)
        }
        Construct::Rowdet { matrices, planted } => {
            let rc = match (matrices, planted) {
                (Some(m), _) => {
                    let src = read_source(m)?;
                    let j: RowContractionJson = serde_json::from_str(&src).map_err(|e| Error::Parse(e.to_string()))?;
                    RowContraction::from_json(&j, cfg.tol)?
                }
                (None, Some(dn)) if dn.len() == 2 => planted_instance(dn[0], dn[1], cfg.seed).0,
                _ => return Err(Error::Parse("give --matrices FILE or --planted d,N".into())),
            };
            let p = rowdet_poly(&rc);
            let f = rowdet_factor(&p, &rc, cfg.seed)?;
            let zeros: Vec<Value> = f.zeros.iter().map(|(z, k)| json!({ "zeta": z, "count": k })).collect();
            let mut out = poly_output(
                &p,
                json!({
                    "matrices": rc.to_json(),
                    "boundary_zeros": zeros,
                    "peeled": f.peeled,
                    "residual": f.residual.to_json(),
                    "reconstruction_error": f.reconstruction_error,
                }),
            );
            let mut text = format!("det: {p}\npeeled factors: {}\n", f.peeled);
            for (z, k) in &f.zeros {
                let _ = writeln!(text, "zeta = {z:?} (x{k})");
            }
            let _ = writeln!(text, "residual: {}\nreconstruction error: {:.3e}", f.residual, f.reconstruction_error);
            out.text = text;
            Ok(out)
        }
        Construct::Param { m, c, l } => {
            let l = parse_series(l, cfg.order)?;
            let pc = make_param(*m, &parse_scalar(c)?, &l, cfg.order)?;
            let j = json!({
                "M": pc.m,
                "c": pc.c,
                "L": pc.l.to_json("s"),
                "z": pc.z_series.to_json("s"),
                "w": pc.w_series.to_json("s"),
                "condition_a": pc.condition_a,
                "condition_b": pc.condition_b,
                "injective": pc.injective,
            });
            let text = format!(
                "z = {}\nw = {}\ncurve type: {}, isolated type: {}, injective: {}\n",
                pc.z_series.display_in("s"),
                pc.w_series.display_in("s"),
                pc.condition_a,
                pc.condition_b,
                pc.injective
            );
            Ok(Output::new(j, text))
        }
        Construct::Lift { poly, d } => {
            let p = parse_poly(&read_source(poly)?, Some(&["x".to_string()]))?;
            let coeffs: Vec<Scalar> = (0..=p.degree_in(0)).map(|k| p.coeff(&[k])).collect();
            Ok(poly_output(&with_backend(one_variable_lift(&coeffs, *d), cfg), json!({})))
        }
    }
}

fn verify(v: &Verify, cfg: &CliConfig) -> Result<Output> {
    match v {
        Verify::Scan { poly, samples, radius, strategy } => {
            let (p, _) = siegel_poly(poly, cfg)?;
            let sc = SampleConfig {
                seed: cfg.seed,
                count: *samples,
                radius: *radius,
                domain: Domain::Siegel,
                strategy: (*strategy).into(),
            };
            let r = stability_scan(&p, &sc, cfg.tol);
            let text = format!(
                "samples: {}\nmin |p|: {:.6e}\nzero hits: {}\n",
                r.count, r.min_abs, r.zero_hits
            );
            let mut csv = String::from("z_re,z_im,w_re,w_im\n");
            for pt in &r.hit_points {
                let cells: Vec<String> = pt.iter().flat_map(|x| [format!("{:.16e}", x.re), format!("{:.16e}", x.im)]).collect();
                let _ = writeln!(csv, "{}", cells.join(","));
            }
            let mut out = Output::new(serde_json::to_value(&r).unwrap(), text);
            out.csv = Some(csv);
            Ok(out)
        }
        Verify::Gfit { poly } => {
            let (p, _) = siegel_poly(poly, cfg)?;
            let pc = classify_polynomial(&p, &opts(cfg))?;
            let mut fits = Vec::new();
            let mut text = String::new();
            for (j, b) in pc.branches.iter().enumerate() {
                let ld = crate::classify::build_l_tol(&b.branch, cfg.tol).ok();
                let fit = g_exponent_fit(&b.branch, &b.class, ld.as_ref());
                let expected = match b.class.tag {
                    Tag::Basic => b.class.a0,
                    Tag::Isolated => b.class.isolated.as_ref().map(|d| d.lower_bound_exponent),
                    _ => None,
                };
                match &fit {
                    Ok(e) => {
                        let _ = writeln!(text, "branch {}: {:?}, fitted exponent {e:.4}, expected {expected:?}", j + 1, b.class.tag);
                    }
                    Err(e) => {
                        let _ = writeln!(text, "branch {}: {:?}, {e}", j + 1, b.class.tag);
                    }
                }
                fits.push(json!({
                    "tag": b.class.tag,
                    "exponent": fit.as_ref().ok(),
                    "expected": expected,
                    "error": fit.as_ref().err().map(|e| e.to_string()),
                }));
            }
            Ok(Output::new(json!({ "branches": fits }), text))
        }
        Verify::Probe { numerator, denominator } => {
            let (q, p) = siegel_pair(numerator, denominator, cfg)?;
            let id = ideal_for(&p, &opts(cfg))?;
            let w = unboundedness_witness(&q, &p, &id);
            let mut csv = String::from("r,ratio\n");
            let (j, text) = match &w {
                Ok(w) => {
                    for (r, v) in w.radii.iter().zip(&w.ratios) {
                        let _ = writeln!(csv, "{r:.16e},{v:.16e}");
                    }
                    (
                        json!({ "growth": true, "witness": w }),
                        format!("|q/p| grows like r^{:.3} along {:?}\n", w.rate, w.curve),
                    )
                }
                Err(e) => (json!({ "growth": false, "detail": e.to_string() }), format!("no growth found: {e}\n")),
            };
            let mut out = Output::new(j, text);
            out.csv = Some(csv);
            Ok(out)
        }
        Verify::Trace { poly, l, s_max, points } => {
            let (src, p) = match (poly, l) {
                (Some(poly), _) => {
                    let (p, _) = siegel_poly(poly, cfg)?;
                    (TraceSource::Poly(p.to_float()), Some(p.to_float()))
                }
                (None, Some(l)) => {
                    let l = parse_series(l, cfg.order)?;
                    let curve = make_param(1, &Scalar::one(), &l, cfg.order)?;
                    (TraceSource::Param { curve, s_max: *s_max }, None)
                }
                _ => return Err(Error::Parse("give --poly or --l".into())),
            };
            let pts = trace_boundary_curve(&src, *points)?;
            let (res_g, res_p) = trace_residuals(&pts, p.as_ref());
            let text = format!(
                "points: {}\nmax |Im w - |z|^2|: {res_g:.3e}\nmax |p|: {res_p:.3e}\n",
                pts.len()
            );
            let j = json!({ "points": pts, "max_defect": res_g, "max_abs_p": res_p });
            let mut out = Output::new(j, text);
            out.csv = Some(trace_to_csv(&pts));
            Ok(out)
        }
    }
}

/// Parse arguments, run, write output; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let cfg = &cli.config;
    match execute(&cli.command, cfg) {
        Ok(out) => {
            // trace defaults to CSV when written to a file
            let format = match (&cli.command, &cfg.out, cfg.format) {
                (Command::Verify(Verify::Trace { .. }), Some(path), Format::Text)
                    if path.extension().is_some_and(|e| e == "csv") =>
                {
                    Format::Csv
                }
                _ => cfg.format,
            };
            let body = out.render(format);
            match &cfg.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, body) {
                        eprintln!("error: {}: {e}", path.display());
                        return 2;
                    }
                }
                None => print!("{body}"),
            }
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> CliConfig {
        CliConfig { backend: Backend::Exact, order: 32, tol: 1e-9, seed: 42, out: None, format: Format::Json }
    }

    #[test]
    fn analyze_next_simplest() {
        let out = execute(&Command::Analyze { poly: "w - i*w^2 - i*z^2".into() }, &cfg()).unwrap();
        assert_eq!(out.code, 0);
        let b = &out.json["classification"]["branches"][0];
        assert_eq!(b["tag"], "Isolated");
        assert_eq!(b["M"], 1);
        assert_eq!(b["K"], 1);
        assert_eq!(out.json["ideal"]["display"], "(w - i*z^2, z^4)");
        assert!(out.text.contains("phi0=i*z^2"), "{}", out.text);
    }

    #[test]
    fn member_flow() {
        let m = |q: &str, p: &str| {
            execute(&Command::Member { numerator: q.into(), denominator: p.into() }, &cfg()).unwrap().json["member"].clone()
        };
        assert_eq!(m("z^2", "w"), true);
        assert_eq!(m("z", "w"), false);
        assert_eq!(m("z1^2", "1 - z2"), true);
        assert_eq!(m("z1", "1 - z2"), false);
    }

    #[test]
    fn exit_codes() {
        let e = execute(&Command::Ideal { poly: "w^2 + w - z^2".into() }, &cfg()).unwrap_err();
        assert_eq!(exit_code(&e), 3);
        let e = execute(&Command::Ideal { poly: "w +* z".into() }, &cfg()).unwrap_err();
        assert_eq!(exit_code(&e), 2);
        assert_eq!(run(["stablepoly", "ideal", "1 + w"]), 2);
        assert_eq!(run(["stablepoly", "--format", "json", "analyze", "w"]), 0);
    }

    #[test]
    fn construct_and_check() {
        let out = execute(&Command::Construct(Construct::Pc { c: "1/2".into() }), &cfg()).unwrap();
        assert!(out.text.contains("w"));
        let out = execute(
            &Command::Construct(Construct::Param { m: 1, c: "1".into(), l: "i*s".into() }),
            &CliConfig { order: 3, ..cfg() },
        )
        .unwrap();
        assert!(out.text.contains("i*s^2 - 2/3*s^3"), "{}", out.text);
        let out = execute(&Command::CheckAlgL { poly: "y^4 - 4s^2 y^2 - 1".into(), m: 1 }, &cfg()).unwrap();
        assert_eq!(out.json["passed"], true);
    }
}
