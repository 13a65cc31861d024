//! Double-exponential quadrature over intervals, half-lines, the real line,
//! and iterated products of those, with declared singular points handled by a
//! square-root substitution.
//!
//! Each piece is integrated by the trapezoid rule in the transformed
//! variable, doubling the node density per level until the level-to-level
//! difference meets the requested tolerance. Node positions and summation
//! order are fixed, so results are bit-reproducible for a given spec,
//! including under parallel evaluation (samples are collected in index order
//! and folded serially).

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuadError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFiniteSample { x: f64 },
}

/// Tolerances and resource limits for one integration call.
///
/// `singular_hyperplanes` lists interior points (per innermost coordinate for
/// the 1-d entry points) where the integrand has an algebraic or oscillatory
/// singularity; the domain is split there and a square-root substitution is
/// applied on both sides. `de_level_max` caps node-density doublings,
/// `max_subdivisions` caps the number of pieces a domain may be cut into.
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: u32,
    pub de_level_max: u32,
    pub parallelism: usize,
    pub singular_hyperplanes: Vec<f64>,
    /// Advisory cap on the imaginary size of exponents a caller should feed
    /// this spec; callers flag (not fail) results beyond it.
    pub oscillation_budget: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 64,
            de_level_max: 12,
            parallelism: 1,
            singular_hyperplanes: Vec::new(),
            oscillation_budget: 8.0,
        }
    }
}

/// Outcome of an integration: the value, a conservative error estimate
/// (level-difference plus accumulated inner-dimension estimates), the number
/// of integrand evaluations, and whether every level sequence met tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub evaluations: u64,
    pub converged: bool,
}

// ---------------------------------------------------------------------------
// piece decomposition
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
enum Piece {
    Fin { a: f64, b: f64, sq_a: bool, sq_b: bool },
    Up { p: f64, sq: bool },
    Down { p: f64, sq: bool },
    Line,
}

fn interior_splits(list: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut s: Vec<f64> = list
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > lo && *x < hi)
        .collect();
    s.sort_by(f64::total_cmp);
    s.dedup();
    s
}

fn is_marked(list: &[f64], x: f64) -> bool {
    list.iter().any(|&s| s == x)
}

// Finite spans with singular marks at both ends are halved so that each piece
// carries at most one square-root substitution.
fn push_fin(pieces: &mut Vec<Piece>, a: f64, b: f64, sq_a: bool, sq_b: bool) {
    if a >= b {
        return;
    }
    if sq_a && sq_b {
        let m = 0.5 * (a + b);
        if m > a && m < b {
            pieces.push(Piece::Fin { a, b: m, sq_a: true, sq_b: false });
            pieces.push(Piece::Fin { a: m, b, sq_a: false, sq_b: true });
            return;
        }
    }
    pieces.push(Piece::Fin { a, b, sq_a, sq_b });
}

fn pieces_interval(a: f64, b: f64, marks: &[f64]) -> Vec<Piece> {
    let splits = interior_splits(marks, a, b);
    let mut bounds = vec![a];
    bounds.extend_from_slice(&splits);
    bounds.push(b);
    let mut pieces = Vec::new();
    for w in bounds.windows(2) {
        push_fin(&mut pieces, w[0], w[1], is_marked(marks, w[0]), is_marked(marks, w[1]));
    }
    pieces
}

fn pieces_halfline(marks: &[f64]) -> Vec<Piece> {
    let splits = interior_splits(marks, 0.0, f64::INFINITY);
    let mut pieces = Vec::new();
    let mut lo = 0.0;
    for &s in &splits {
        push_fin(&mut pieces, lo, s, is_marked(marks, lo), true);
        lo = s;
    }
    pieces.push(Piece::Up { p: lo, sq: is_marked(marks, lo) });
    pieces
}

fn pieces_realline(marks: &[f64]) -> Vec<Piece> {
    let splits = interior_splits(marks, f64::NEG_INFINITY, f64::INFINITY);
    if splits.is_empty() {
        return vec![Piece::Line];
    }
    let mut pieces = vec![Piece::Down { p: splits[0], sq: true }];
    for w in splits.windows(2) {
        push_fin(&mut pieces, w[0], w[1], true, true);
    }
    pieces.push(Piece::Up { p: *splits.last().unwrap(), sq: true });
    pieces
}

// ---------------------------------------------------------------------------
// double-exponential node maps
// ---------------------------------------------------------------------------

// Node range: exp(+-(pi/2)sinh 5) spans ~1e-101..1e101, so even three
// aligned square-root singular factors stay inside f64 range, while the
// truncated double-exponential tail is below 1e-20 for the slowest decay
// handled here.
const TMAX: f64 = 5.0;
const START_LEVEL: u32 = 3;

#[derive(Debug, Clone, Copy)]
enum Map {
    TanhSinh { a: f64, b: f64 },
    ExpSinh { p: f64, sign: f64 },
    SinhSinh,
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

// Node position and weight (including the (pi/2) cosh t map factor) at
// transform parameter t, or None for nodes collapsed onto a boundary or with
// an underflowed weight; those carry no usable contribution.
fn node(map: Map, t: f64) -> Option<(f64, f64)> {
    let u = FRAC_PI_2 * t.sinh();
    let du = FRAC_PI_2 * t.cosh();
    match map {
        Map::TanhSinh { a, b } => {
            let sp = sigmoid(2.0 * u);
            let sm = sigmoid(-2.0 * u);
            let x = a + (b - a) * sp;
            let w = (b - a) * 2.0 * sp * sm * du;
            (x > a && x < b && w.is_finite() && w > 0.0).then_some((x, w))
        }
        Map::ExpSinh { p, sign } => {
            let e = u.exp();
            let x = p + sign * e;
            let w = e * du;
            (x.is_finite() && x != p && w.is_finite() && w > 0.0).then_some((x, w))
        }
        Map::SinhSinh => {
            let x = u.sinh();
            let w = u.cosh() * du;
            (x.is_finite() && w.is_finite()).then_some((x, w))
        }
    }
}

// ---------------------------------------------------------------------------
// level-doubling engine
// ---------------------------------------------------------------------------

// One integrand sample: value plus the error estimate, evaluation count, and
// convergence flag of any nested integral hiding behind it.
#[derive(Debug, Clone, Copy)]
struct Sample {
    value: Complex64,
    inner_err: f64,
    evals: u64,
    converged: bool,
}

type SampleFn<'a> = dyn Fn(f64) -> Result<Sample, QuadError> + Sync + 'a;

struct PieceOut {
    value: Complex64,
    err: f64,
    evals: u64,
    converged: bool,
}

fn de_run(g: &SampleFn, map: Map, spec: &QuadratureSpec, par: bool) -> Result<PieceOut, QuadError> {
    let eval_one = |t: f64| -> Result<Option<(f64, Sample)>, QuadError> {
        match node(map, t) {
            None => Ok(None),
            Some((x, w)) => {
                let s = g(x)?;
                let contrib = s.value * w;
                if !contrib.re.is_finite() || !contrib.im.is_finite() {
                    return Err(QuadError::NonFiniteSample { x });
                }
                Ok(Some((w, s)))
            }
        }
    };

    let mut value;
    let mut aux = 0.0f64;
    let mut prev: Option<Complex64> = None;
    let mut de_err = f64::INFINITY;
    let mut evals = 0u64;
    let mut inner_conv = true;
    let mut converged = false;
    let mut level = START_LEVEL;
    loop {
        let h = 0.5f64.powi(level as i32);
        let n = (TMAX / h).floor() as i64;
        let ts: Vec<f64> = if level == START_LEVEL {
            (-n..=n).map(|k| k as f64 * h).collect()
        } else {
            (-n..=n).filter(|k| k % 2 != 0).map(|k| k as f64 * h).collect()
        };
        let entries: Vec<Option<(f64, Sample)>> = if par && ts.len() > 16 {
            ts.par_iter().map(|&t| eval_one(t)).collect::<Result<_, _>>()?
        } else {
            ts.iter().map(|&t| eval_one(t)).collect::<Result<_, _>>()?
        };
        let mut s_val = Complex64::new(0.0, 0.0);
        let mut s_aux = 0.0f64;
        for e in entries.into_iter().flatten() {
            let (w, smp) = e;
            s_val += smp.value * w;
            s_aux += smp.inner_err * w;
            evals += smp.evals;
            // an inner run that missed its own relative target is still fine
            // when its weighted uncertainty cannot move this sum past abs_tol
            inner_conv &= smp.converged || smp.inner_err * w <= spec.abs_tol;
        }
        let (new_val, new_aux) = match prev {
            None => (s_val * h, s_aux * h),
            Some(p) => (p * 0.5 + s_val * h, aux * 0.5 + s_aux * h),
        };
        if let Some(p) = prev {
            de_err = (new_val - p).norm();
        }
        value = new_val;
        aux = new_aux;
        prev = Some(new_val);
        if de_err <= spec.abs_tol.max(spec.rel_tol * value.norm()) {
            converged = true;
            break;
        }
        if level >= spec.de_level_max {
            break;
        }
        level += 1;
    }
    if !de_err.is_finite() {
        de_err = value.norm();
    }
    Ok(PieceOut {
        value,
        err: de_err + aux,
        evals,
        converged: converged && inner_conv,
    })
}

fn integrate_piece(
    g: &SampleFn,
    piece: Piece,
    spec: &QuadratureSpec,
    par: bool,
) -> Result<PieceOut, QuadError> {
    // The square-root substitution x = s +/- u^2 bounds an algebraic
    // singularity at the marked point and halves its log-oscillation rate.
    // Nodes whose u^2 collapses onto the mark in f64 carry a Jacobian below
    // resolution and contribute exact zero instead of being evaluated.
    let sq_eval = |base: f64, sign: f64, u: f64| -> Result<Sample, QuadError> {
        let x = base + sign * u * u;
        if x == base {
            return Ok(Sample {
                value: Complex64::new(0.0, 0.0),
                inner_err: 0.0,
                evals: 0,
                converged: true,
            });
        }
        let mut s = g(x)?;
        s.value *= 2.0 * u;
        s.inner_err *= 2.0 * u;
        Ok(s)
    };
    match piece {
        Piece::Fin { a, b, sq_a: false, sq_b: false } => de_run(g, Map::TanhSinh { a, b }, spec, par),
        Piece::Fin { a, b, sq_a: true, .. } => {
            let l = (b - a).sqrt();
            let h = move |u: f64| sq_eval(a, 1.0, u);
            de_run(&h, Map::TanhSinh { a: 0.0, b: l }, spec, par)
        }
        Piece::Fin { a, b, .. } => {
            let l = (b - a).sqrt();
            let h = move |u: f64| sq_eval(b, -1.0, u);
            de_run(&h, Map::TanhSinh { a: 0.0, b: l }, spec, par)
        }
        Piece::Up { p, sq: false } => de_run(g, Map::ExpSinh { p, sign: 1.0 }, spec, par),
        Piece::Up { p, sq: true } => {
            let h = move |u: f64| sq_eval(p, 1.0, u);
            de_run(&h, Map::ExpSinh { p: 0.0, sign: 1.0 }, spec, par)
        }
        Piece::Down { p, sq: false } => de_run(g, Map::ExpSinh { p, sign: -1.0 }, spec, par),
        Piece::Down { p, sq: true } => {
            let h = move |u: f64| sq_eval(p, -1.0, u);
            de_run(&h, Map::ExpSinh { p: 0.0, sign: 1.0 }, spec, par)
        }
        Piece::Line => de_run(g, Map::SinhSinh, spec, par),
    }
}

fn run_pieces(
    g: &SampleFn,
    pieces: &[Piece],
    spec: &QuadratureSpec,
    par: bool,
) -> Result<IntegralResult, QuadError> {
    if pieces.len() > spec.max_subdivisions as usize {
        return Err(QuadError::InvalidDomain(format!(
            "{} pieces exceed max_subdivisions = {}",
            pieces.len(),
            spec.max_subdivisions
        )));
    }
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut evals = 0u64;
    let mut conv = true;
    for &p in pieces {
        let out = integrate_piece(g, p, spec, par)?;
        value += out.value;
        err += out.err;
        evals += out.evals;
        conv &= out.converged;
    }
    Ok(IntegralResult {
        value,
        error_estimate: err,
        evaluations: evals.max(1),
        converged: conv,
    })
}

fn leaf<'a, F>(f: &'a F) -> impl Fn(f64) -> Result<Sample, QuadError> + Sync + 'a
where
    F: Fn(f64) -> Complex64 + Sync + ?Sized,
{
    move |x| {
        Ok(Sample {
            value: f(x),
            inner_err: 0.0,
            evals: 1,
            converged: true,
        })
    }
}

// ---------------------------------------------------------------------------
// public one-dimensional entry points
// ---------------------------------------------------------------------------

/// Integrate over the finite interval `[a, b]`.
pub fn integrate_interval<F>(
    f: &F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, QuadError>
where
    F: Fn(f64) -> Complex64 + Sync + ?Sized,
{
    if !a.is_finite() || !b.is_finite() || a >= b {
        return Err(QuadError::InvalidDomain(format!("interval [{a}, {b}]")));
    }
    let pieces = pieces_interval(a, b, &spec.singular_hyperplanes);
    run_pieces(&leaf(f), &pieces, spec, spec.parallelism > 1)
}

/// Integrate over `[0, infinity)`.
pub fn integrate_halfline<F>(f: &F, spec: &QuadratureSpec) -> Result<IntegralResult, QuadError>
where
    F: Fn(f64) -> Complex64 + Sync + ?Sized,
{
    let pieces = pieces_halfline(&spec.singular_hyperplanes);
    run_pieces(&leaf(f), &pieces, spec, spec.parallelism > 1)
}

/// Integrate over the whole real line.
pub fn integrate_realline<F>(f: &F, spec: &QuadratureSpec) -> Result<IntegralResult, QuadError>
where
    F: Fn(f64) -> Complex64 + Sync + ?Sized,
{
    let pieces = pieces_realline(&spec.singular_hyperplanes);
    run_pieces(&leaf(f), &pieces, spec, spec.parallelism > 1)
}

// ---------------------------------------------------------------------------
// iterated multi-dimensional integration
// ---------------------------------------------------------------------------

/// Where one coordinate of an iterated integral lives.
#[derive(Clone)]
pub enum Domain {
    Interval(f64, f64),
    HalfLine,
    RealLine,
}

/// Singular-point locator for one coordinate: receives the already-fixed
/// outer coordinates and returns the singular position on this axis.
pub type SplitFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// One coordinate of an iterated integral: its domain and any singular
/// points, which may depend on the outer coordinates.
#[derive(Clone)]
pub struct DimSpec {
    pub domain: Domain,
    pub splits: Vec<SplitFn>,
}

impl DimSpec {
    pub fn new(domain: Domain) -> Self {
        Self { domain, splits: Vec::new() }
    }

    pub fn with_splits(domain: Domain, splits: Vec<SplitFn>) -> Self {
        Self { domain, splits }
    }
}

/// Iterated integral over `dims`, outermost first; `f` receives coordinates
/// in the same order. Inner error estimates are integrated alongside the
/// value and added to the outer level-difference estimate, and evaluation
/// counts are for the innermost integrand. Only the outermost dimension is
/// parallelized, keeping the summation order fixed.
pub fn integrate_nd<F>(
    f: &F,
    dims: &[DimSpec],
    spec: &QuadratureSpec,
) -> Result<IntegralResult, QuadError>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    if dims.is_empty() {
        return Err(QuadError::InvalidDomain("no dimensions given".into()));
    }
    let s = nd_recurse(f, dims, &[], spec, spec.parallelism > 1)?;
    Ok(IntegralResult {
        value: s.value,
        error_estimate: s.inner_err,
        evaluations: s.evals.max(1),
        converged: s.converged,
    })
}

fn nd_recurse<F>(
    f: &F,
    dims: &[DimSpec],
    coords: &[f64],
    spec: &QuadratureSpec,
    par: bool,
) -> Result<Sample, QuadError>
where
    F: Fn(&[f64]) -> Complex64 + Sync,
{
    let dim = &dims[0];
    let marks: Vec<f64> = dim.splits.iter().map(|s| s(coords)).collect();
    let g = |x: f64| -> Result<Sample, QuadError> {
        let mut c = Vec::with_capacity(coords.len() + 1);
        c.extend_from_slice(coords);
        c.push(x);
        if dims.len() == 1 {
            Ok(Sample {
                value: f(&c),
                inner_err: 0.0,
                evals: 1,
                converged: true,
            })
        } else {
            nd_recurse(f, &dims[1..], &c, spec, false)
        }
    };
    let pieces = match dim.domain {
        Domain::Interval(a, b) => {
            if !a.is_finite() || !b.is_finite() || a >= b {
                return Err(QuadError::InvalidDomain(format!("interval [{a}, {b}]")));
            }
            pieces_interval(a, b, &marks)
        }
        Domain::HalfLine => pieces_halfline(&marks),
        Domain::RealLine => pieces_realline(&marks),
    };
    let out = run_pieces(&g, &pieces, spec, par)?;
    Ok(Sample {
        value: out.value,
        inner_err: out.error_estimate,
        evals: out.evaluations,
        converged: out.converged,
    })
}
