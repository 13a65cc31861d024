//! The ten-display reduction that takes the 3D pairing integral to its
//! closed gamma form: coordinate substitutions, Mellin-type integrations in
//! one variable at a time, and hypergeometric summation. Each display is
//! independently evaluable so that consecutive displays can be compared
//! numerically.
//!
//! The tabulated constants from the third display onward omit the factor 2
//! produced when the even integrand over the full `y` line is folded to a
//! half-line; values returned here restore that factor so that every
//! consecutive pair agrees.

use crate::model::{decay_pow, GL2Parameter, GL3Parameter, ModelError, SpectralPoint};
use crate::quad::{
    integrate_halfline, integrate_nd, DimSpec, Domain, IntegralResult, QuadratureSpec, SplitFn,
};
use crate::special::{
    f32_interval_near1, gamma_quotient, gauss_2f1, pfq_series, pow_cx, ErrSlot, SpecialError,
};
use num_complex::Complex64;
use std::sync::Arc;

/// One of the ten displays, numbered 0 (the raw 3D integral) through 9 (the
/// closed gamma form).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChainStepId(u8);

impl ChainStepId {
    pub fn new(step: u8) -> Result<Self, ModelError> {
        if step > 9 {
            return Err(ModelError::InvalidParameter(format!(
                "chain step must be 0..=9, got {step}"
            )));
        }
        Ok(Self(step))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn all() -> [ChainStepId; 10] {
        [0, 1, 2, 3, 4, 5, 6, 7, 8, 9].map(ChainStepId)
    }
}

/// Integration-variable count of each display; the final display is exact.
pub const STEP_DIMENSION: [u8; 10] = [3, 3, 2, 3, 3, 2, 3, 2, 1, 0];

/// Agreement expected of a display evaluated at the given dimensionality.
pub fn ladder_tolerance(dimension: u8) -> f64 {
    match dimension {
        3 => 1e-2,
        2 => 1e-3,
        _ => 1e-6,
    }
}

/// Tolerance for comparing displays `k` and `k+1`: the looser of the two.
pub fn pair_tolerance(first: usize) -> f64 {
    ladder_tolerance(STEP_DIMENSION[first]).max(ladder_tolerance(STEP_DIMENSION[first + 1]))
}

/// Quadrature settings sized to each display's dimensionality.
pub fn recommended_spec(step: ChainStepId) -> QuadratureSpec {
    let (rel_tol, de_level_max) = match step.0 {
        0 | 1 | 3 | 4 | 6 => (3e-4, 6),
        2 | 5 => (1e-5, 7),
        7 => (3e-6, 7),
        8 => (1e-8, 9),
        _ => (1e-9, 4),
    };
    QuadratureSpec {
        rel_tol,
        abs_tol: 1e-13,
        de_level_max,
        ..Default::default()
    }
}

fn finish(
    out: Result<IntegralResult, crate::quad::QuadError>,
    slot: &ErrSlot,
    factor: Complex64,
) -> Result<IntegralResult, ModelError> {
    if let Some(e) = slot.take() {
        return Err(e.into());
    }
    let mut r = out?;
    r.value *= factor;
    r.error_estimate *= factor.norm();
    Ok(r)
}

struct Params {
    l1: Complex64,
    l2: Complex64,
    l3: Complex64,
    n1: Complex64,
    n2: Complex64,
}

impl Params {
    fn new(p: &GL3Parameter, q: &GL2Parameter) -> Self {
        let l = p.lambda();
        let n = q.nu();
        Self { l1: l[0], l2: l[1], l3: l[2], n1: n[0], n2: n[1] }
    }

    fn s1(&self) -> Complex64 {
        (self.l1 - self.l2 + 1.0) / 2.0
    }

    fn s2(&self) -> Complex64 {
        (self.l2 - self.l3 + 1.0) / 2.0
    }

    fn c5(&self) -> Result<Complex64, SpecialError> {
        let half = Complex64::new(0.5, 0.0);
        gamma_quotient(
            &[
                self.l2 + self.n1 + 0.5,
                -self.l3 - self.n1 + 0.5,
                (self.l2 - self.l3 + 2.0) / 2.0,
                half,
            ],
            &[
                self.l2 - self.l3 + 1.0,
                (2.0 * self.l2 + 2.0 * self.n1 + 3.0) / 4.0,
                -(2.0 * self.l3 + 2.0 * self.n1 - 3.0) / 4.0,
            ],
        )
    }

    fn c7(&self) -> Result<Complex64, SpecialError> {
        let half = Complex64::new(0.5, 0.0);
        let extra = gamma_quotient(
            &[
                half,
                (2.0 * self.l1 + 2.0 * self.n2 + 1.0) / 4.0,
                -(self.l2 + self.l3 + self.n1 + self.n2 - 1.0) / 2.0,
            ],
            &[
                (2.0 * self.l2 + 2.0 * self.n1 + 1.0) / 4.0,
                -(2.0 * self.l2 + 2.0 * self.n1 - 1.0) / 4.0,
                (2.0 * self.l1 - 2.0 * self.l2 - 2.0 * self.l3 - 2.0 * self.n1 + 3.0) / 4.0,
            ],
        )?;
        Ok(self.c5()? * extra)
    }
}

fn real_line_with(splits: Vec<SplitFn>) -> DimSpec {
    DimSpec::with_splits(Domain::RealLine, splits)
}

// display 0: the raw kernel-against-spherical-vector integral
fn step0(
    p: &GL3Parameter,
    q: &GL2Parameter,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, ModelError> {
    crate::model::intertwine_at_zero(p, q, SpectralPoint { t: 0.0 }, spec)
}

// display 1: after z -> z - xy/2 and x -> x/y; even in y and in (x, z)
// jointly, so the quarter x > 0, y > 0 is integrated and fourfolded
fn step1(pr: &Params, spec: &QuadratureSpec) -> Result<IntegralResult, ModelError> {
    let (l1, l2, n1, n2) = (pr.l1, pr.l2, pr.n1, pr.n2);
    let (s1, s2) = (pr.s1(), pr.s2());
    let dims = [
        DimSpec::new(Domain::HalfLine),
        real_line_with(vec![
            Arc::new(|_: &[f64]| 0.0) as SplitFn,
            Arc::new(|c: &[f64]| c[0]) as SplitFn,
        ]),
        DimSpec::new(Domain::HalfLine),
    ];
    let f = |v: &[f64]| {
        let (x, z, y) = (v[0], v[1], v[2]);
        let zx = z - x;
        let r = y / x;
        pow_cx(x, -l1 - n2 - 1.5)
            * pow_cx(y, l1 + n2 + 0.5)
            * decay_pow(z.abs(), l1 + n2 - 0.5)
            * decay_pow(zx.abs(), l2 + n1 - 0.5)
            * decay_pow(1.0 + zx * zx, -s2)
            * decay_pow(1.0 + r * r + (z * r) * (z * r), -s1)
            * decay_pow(1.0 + (y * y) / (1.0 + zx * zx), -s2)
    };
    let out = integrate_nd(&f, &dims, spec);
    finish(out, &ErrSlot::new(), Complex64::new(4.0, 0.0))
}

// display 2: y integrated out, leaving a Gauss function of the cross-ratio
fn step2(pr: &Params, spec: &QuadratureSpec) -> Result<IntegralResult, ModelError> {
    let (l1, l2, l3, n1, n2) = (pr.l1, pr.l2, pr.l3, pr.n1, pr.n2);
    let s2 = pr.s2();
    let fb = (2.0 * l1 + 2.0 * n2 + 3.0) / 4.0;
    let fc = (l1 - l3 + 2.0) / 2.0;
    let c2 = gamma_quotient(&[fb, -(2.0 * l3 + 2.0 * n2 - 1.0) / 4.0], &[fc])
        .map_err(ModelError::from)?
        / 2.0;
    let slot = ErrSlot::new();
    let dims = [
        DimSpec::new(Domain::HalfLine),
        real_line_with(vec![
            Arc::new(|_: &[f64]| 0.0) as SplitFn,
            Arc::new(|c: &[f64]| c[0]) as SplitFn,
        ]),
    ];
    let f = |v: &[f64]| {
        let (x, z) = (v[0], v[1]);
        let zx = z - x;
        let den = (1.0 + z * z) * (1.0 + zx * zx);
        let mut arg = 1.0 - x * x / den;
        if arg >= 1.0 {
            arg = 1.0 - 1e-16;
        }
        let fval = slot.guard(gauss_2f1(s2, fb, fc, arg));
        decay_pow(z.abs(), l1 + n2 - 0.5)
            * decay_pow(zx.abs(), l2 + n1 - 0.5)
            * decay_pow(1.0 + zx * zx, -s2)
            * decay_pow(1.0 + z * z, -fb)
            * fval
    };
    let out = integrate_nd(&f, &dims, spec);
    // 2 from the x half-line fold, 2 restoring the dropped evenness factor
    finish(out, &slot, 4.0 * c2)
}

// display 3: the Gauss function opened back up as a half-line integral
fn step3(pr: &Params, spec: &QuadratureSpec) -> Result<IntegralResult, ModelError> {
    let (l1, l2, n1, n2) = (pr.l1, pr.l2, pr.n1, pr.n2);
    let (s1, s2) = (pr.s1(), pr.s2());
    let e_t = (2.0 * l1 + 2.0 * n2 - 1.0) / 4.0;
    let e_z = (2.0 * l1 + 2.0 * n2 + 3.0) / 4.0;
    let dims = [
        DimSpec::new(Domain::HalfLine),
        real_line_with(vec![
            Arc::new(|_: &[f64]| 0.0) as SplitFn,
            Arc::new(|c: &[f64]| c[0]) as SplitFn,
        ]),
        DimSpec::new(Domain::HalfLine),
    ];
    let f = |v: &[f64]| {
        let (x, z, t) = (v[0], v[1], v[2]);
        let zx = z - x;
        let cap_x = x * x / ((1.0 + z * z) * (1.0 + zx * zx));
        decay_pow(z.abs(), l1 + n2 - 0.5)
            * decay_pow(zx.abs(), l2 + n1 - 0.5)
            * decay_pow(1.0 + zx * zx, -s2)
            * decay_pow(1.0 + z * z, -e_z)
            * pow_cx(t, e_t)
            * decay_pow(1.0 + t, -s1)
            * decay_pow(1.0 + t * cap_x, -s2)
    };
    let out = integrate_nd(&f, &dims, spec);
    // tabulated 1/2, x-fold 2, restored evenness 2
    finish(out, &ErrSlot::new(), Complex64::new(2.0, 0.0))
}

// display 4: x -> x + z and t -> (1 + z^2) t
fn step4(pr: &Params, spec: &QuadratureSpec) -> Result<IntegralResult, ModelError> {
    let (l1, l2, n1, n2) = (pr.l1, pr.l2, pr.n1, pr.n2);
    let (s1, s2) = (pr.s1(), pr.s2());
    let e_t = (2.0 * l1 + 2.0 * n2 - 1.0) / 4.0;
    let dims = [
        DimSpec::new(Domain::HalfLine),
        real_line_with(vec![
            Arc::new(|_: &[f64]| 0.0) as SplitFn,
            Arc::new(|c: &[f64]| -c[0]) as SplitFn,
        ]),
        DimSpec::new(Domain::HalfLine),
    ];
    let f = |v: &[f64]| {
        let (z, x, t) = (v[0], v[1], v[2]);
        let xz = x + z;
        pow_cx(z, l1 + n2 - 0.5)
            * decay_pow(x.abs(), l2 + n1 - 0.5)
            * pow_cx(t, e_t)
            * decay_pow(1.0 + t + t * z * z, -s1)
            * decay_pow(1.0 + x * x + t * (xz * xz), -s2)
    };
    let out = integrate_nd(&f, &dims, spec);
    finish(out, &ErrSlot::new(), Complex64::new(2.0, 0.0))
}

// display 5: x integrated out, Gauss function of a negative argument
fn step5(pr: &Params, spec: &QuadratureSpec) -> Result<IntegralResult, ModelError> {
    let (l1, l2, l3, n1, n2) = (pr.l1, pr.l2, pr.l3, pr.n1, pr.n2);
    let fa = -(2.0 * l3 + 2.0 * n1 - 1.0) / 4.0;
    let fb = -(2.0 * l2 + 2.0 * n1 - 1.0) / 4.0;
    let half = Complex64::new(0.5, 0.0);
    let e_t = (2.0 * l1 + 2.0 * n2 - 1.0) / 4.0;
    let e_tail = -(l2 + l3 + 2.0 * n1) / 2.0;
    let e_q = -(2.0 * l1 - 2.0 * l2 - 2.0 * l3 - 2.0 * n1 + 3.0) / 4.0;
    let c5 = pr.c5().map_err(ModelError::from)?;
    let slot = ErrSlot::new();
    let dims = [DimSpec::new(Domain::HalfLine), DimSpec::new(Domain::HalfLine)];
    let f = |v: &[f64]| {
        let (z, t) = (v[0], v[1]);
        let q = 1.0 + t + t * z * z;
        let arg = -(t * z * z) * (t / q);
        let fval = slot.guard(gauss_2f1(fa, fb, half, arg));
        pow_cx(z, l1 + n2 - 0.5)
            * pow_cx(t, e_t)
            * decay_pow(1.0 + t, e_tail)
            * decay_pow(q, e_q)
            * fval
    };
    let out = integrate_nd(&f, &dims, spec);
    finish(out, &slot, 4.0 * c5)
}

// display 6: Euler representation opens the Gauss function once more
fn step6(pr: &Params, spec: &QuadratureSpec) -> Result<IntegralResult, ModelError> {
    let (l1, l2, l3, n1, n2) = (pr.l1, pr.l2, pr.l3, pr.n1, pr.n2);
    let s1 = pr.s1();
    let half = Complex64::new(0.5, 0.0);
    let c6 = 2.0
        * pr.c5().map_err(ModelError::from)?
        * gamma_quotient(
            &[half],
            &[
                (2.0 * l2 + 2.0 * n1 + 1.0) / 4.0,
                -(2.0 * l2 + 2.0 * n1 - 1.0) / 4.0,
            ],
        )
        .map_err(ModelError::from)?;
    let e_t = (2.0 * l1 + 2.0 * n2 - 1.0) / 4.0;
    let e_t2 = -(2.0 * l1 + 2.0 * n1 + 3.0) / 4.0;
    let e_s = -(2.0 * l2 + 2.0 * n1 + 3.0) / 4.0;
    let e_cz = (2.0 * l3 + 2.0 * n1 - 1.0) / 4.0;
    let dims = [
        DimSpec::new(Domain::HalfLine),
        DimSpec::new(Domain::HalfLine),
        DimSpec::new(Domain::HalfLine),
    ];
    let half_neg = Complex64::new(-0.5, 0.0);
    let f = |v: &[f64]| {
        let (t, s, z) = (v[0], v[1], v[2]);
        // t(1+s+st)/((1+s)(1+t)) arranged so huge nodes overflow to inf
        // (which the decay factor maps to 0) instead of producing inf/inf
        let cz = (t / (1.0 + t)) * (1.0 + t * (s / (1.0 + s)));
        pow_cx(t, e_t)
            * decay_pow(1.0 + t, e_t2)
            * pow_cx(s, e_s)
            * decay_pow(1.0 + s, half_neg)
            * pow_cx(z, l1 + n2 - 0.5)
            * decay_pow(1.0 + (cz * z) * z, e_cz)
            * decay_pow(1.0 + (t / (1.0 + t)) * (z * z), -s1)
    };
    let out = integrate_nd(&f, &dims, spec);
    finish(out, &ErrSlot::new(), 2.0 * c6)
}

// display 7: z integrated out
fn step7(pr: &Params, spec: &QuadratureSpec) -> Result<IntegralResult, ModelError> {
    let (l1, l2, l3, n1, n2) = (pr.l1, pr.l2, pr.l3, pr.n1, pr.n2);
    let fa = -(2.0 * l3 + 2.0 * n1 - 1.0) / 4.0;
    let fb = (2.0 * l1 + 2.0 * n2 + 1.0) / 4.0;
    let fc = (2.0 * l1 - 2.0 * l2 - 2.0 * l3 - 2.0 * n1 + 3.0) / 4.0;
    let e_s = -(2.0 * l2 + 2.0 * n1 + 3.0) / 4.0;
    let e_t2 = -(n1 - n2 + 1.0) / 2.0;
    let c7 = pr.c7().map_err(ModelError::from)?;
    let slot = ErrSlot::new();
    let dims = [DimSpec::new(Domain::HalfLine), DimSpec::new(Domain::HalfLine)];
    let half_neg = Complex64::new(-0.5, 0.0);
    let f = |v: &[f64]| {
        let (s, t) = (v[0], v[1]);
        let arg = -t * (s / (1.0 + s));
        let fval = slot.guard(gauss_2f1(fa, fb, fc, arg));
        pow_cx(s, e_s)
            * decay_pow(1.0 + s, half_neg)
            * pow_cx(t, half_neg)
            * decay_pow(1.0 + t, e_t2)
            * fval
    };
    let out = integrate_nd(&f, &dims, spec);
    finish(out, &slot, 2.0 * c7)
}

// 3F2 at argument x in [0, 1): partial sums while the terms contract
// geometrically, the Beta-weighted interval representation close to 1
fn hyp3f2_unit_interval(
    up: [Complex64; 3],
    low: [Complex64; 2],
    x: f64,
) -> Result<Complex64, SpecialError> {
    if x <= 0.9 {
        pfq_series(&up, &low, x)
    } else {
        f32_interval_near1(up, low, 2, 1, x)
    }
}

// display 8: t integrated out, two 3F2 terms in s
fn step8(pr: &Params, spec: &QuadratureSpec) -> Result<IntegralResult, ModelError> {
    let (l1, l2, l3, n1, n2) = (pr.l1, pr.l2, pr.l3, pr.n1, pr.n2);
    let half = Complex64::new(0.5, 0.0);
    let al = -(2.0 * l3 + 2.0 * n1 - 1.0) / 4.0;
    let be = (2.0 * l1 + 2.0 * n2 + 1.0) / 4.0;
    let ga = (2.0 * l1 - 2.0 * l2 - 2.0 * l3 - 2.0 * n1 + 3.0) / 4.0;
    let c7 = pr.c7().map_err(ModelError::from)?;
    let co1 = gamma_quotient(&[half, (n1 - n2) / 2.0], &[(n1 - n2 + 1.0) / 2.0])
        .map_err(ModelError::from)?;
    let co2 = gamma_quotient(
        &[
            ga,
            -(2.0 * l3 + 2.0 * n2 - 1.0) / 4.0,
            (2.0 * l1 + 2.0 * n1 + 1.0) / 4.0,
            -(n1 - n2) / 2.0,
        ],
        &[
            al,
            be,
            (2.0 * l1 - 2.0 * l2 - 2.0 * l3 - 2.0 * n2 + 3.0) / 4.0,
        ],
    )
    .map_err(ModelError::from)?;

    let slot = ErrSlot::new();
    let up1 = [al, be, half];
    let low1 = [ga, (2.0 - (n1 - n2)) / 2.0];
    let e_s1 = -(2.0 * l2 + 2.0 * n1 + 3.0) / 4.0;
    let half_neg = Complex64::new(-0.5, 0.0);
    let f1 = |s: f64| {
        let x = s / (1.0 + s);
        let fval = slot.guard(hyp3f2_unit_interval(up1, low1, x));
        pow_cx(s, e_s1) * decay_pow(1.0 + s, half_neg) * fval
    };
    let t1 = integrate_halfline(&f1, spec);
    if let Some(e) = slot.take() {
        return Err(e.into());
    }
    let t1 = t1?;

    let up2 = [
        -(2.0 * l3 + 2.0 * n2 - 1.0) / 4.0,
        (2.0 * l1 + 2.0 * n1 + 1.0) / 4.0,
        (n1 - n2 + 1.0) / 2.0,
    ];
    let low2 = [
        (2.0 * l1 - 2.0 * l2 - 2.0 * l3 - 2.0 * n2 + 3.0) / 4.0,
        (n1 - n2 + 2.0) / 2.0,
    ];
    let e_s2 = -(2.0 * l2 + 2.0 * n2 + 3.0) / 4.0;
    let e_tail2 = -(n1 - n2 + 1.0) / 2.0;
    let f2 = |s: f64| {
        let x = s / (1.0 + s);
        let fval = slot.guard(hyp3f2_unit_interval(up2, low2, x));
        pow_cx(s, e_s2) * decay_pow(1.0 + s, e_tail2) * fval
    };
    let t2 = integrate_halfline(&f2, spec);
    if let Some(e) = slot.take() {
        return Err(e.into());
    }
    let t2 = t2?;

    let factor = 2.0 * c7;
    Ok(IntegralResult {
        value: factor * (co1 * t1.value + co2 * t2.value),
        error_estimate: factor.norm()
            * (co1.norm() * t1.error_estimate + co2.norm() * t2.error_estimate),
        evaluations: t1.evaluations + t2.evaluations,
        converged: t1.converged && t2.converged,
    })
}

// display 9: the closed gamma form
fn step9(pr: &Params) -> Result<IntegralResult, ModelError> {
    let (l1, l2, l3, n1, n2) = (pr.l1, pr.l2, pr.l3, pr.n1, pr.n2);
    let c7 = pr.c7().map_err(ModelError::from)?;
    let quotient = gamma_quotient(
        &[
            (2.0 * l1 + 2.0 * n1 + 1.0) / 4.0,
            -(2.0 * l2 + 2.0 * n2 - 1.0) / 4.0,
            -(2.0 * l2 + 2.0 * n1 - 1.0) / 4.0,
            (2.0 * l2 + 2.0 * n1 + 1.0) / 4.0,
            (2.0 * l1 - 2.0 * l2 - 2.0 * l3 - 2.0 * n1 + 3.0) / 4.0,
            -(2.0 * l3 + 2.0 * n2 - 1.0) / 4.0,
        ],
        &[
            (l1 - l2 + 1.0) / 2.0,
            (n1 - n2 + 1.0) / 2.0,
            -(l2 + l3 + n1 + n2 - 1.0) / 2.0,
            (l1 - l3 + 1.0) / 2.0,
        ],
    )
    .map_err(ModelError::from)?;
    Ok(IntegralResult {
        value: 2.0 * c7 * quotient,
        error_estimate: 0.0,
        evaluations: 1,
        converged: true,
    })
}

fn step_dispatch(
    step: ChainStepId,
    p: &GL3Parameter,
    q: &GL2Parameter,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, ModelError> {
    let pr = Params::new(p, q);
    match step.0 {
        0 => step0(p, q, spec),
        1 => step1(&pr, spec),
        2 => step2(&pr, spec),
        3 => step3(&pr, spec),
        4 => step4(&pr, spec),
        5 => step5(&pr, spec),
        6 => step6(&pr, spec),
        7 => step7(&pr, spec),
        8 => step8(&pr, spec),
        _ => step9(&pr),
    }
}

// displays 8 and 9 hold individual gamma factors that are singular when the
// two GL(2) parameters coincide, though their sum is not; straddle the
// degenerate locus and average
const NU_DEGENERATE_EPS: f64 = 1e-3;
const NU_STRADDLE: f64 = 1e-4;

fn needs_straddle(step: ChainStepId, q: &GL2Parameter) -> bool {
    step.0 == 8 && {
        let n = q.nu();
        (n[0] - n[1]).norm() < NU_DEGENERATE_EPS
    }
}

/// Evaluate one display. Consecutive displays agree to the ladder tolerance
/// of the deeper of the two.
pub fn chain_step(
    step: ChainStepId,
    p: &GL3Parameter,
    q: &GL2Parameter,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, ModelError> {
    if needs_straddle(step, q) {
        let tau = q.tau();
        let hi = GL2Parameter::new_unchecked(tau + Complex64::new(0.0, NU_STRADDLE));
        let lo = GL2Parameter::new_unchecked(tau - Complex64::new(0.0, NU_STRADDLE));
        let a = step_dispatch(step, p, &hi, spec)?;
        let b = step_dispatch(step, p, &lo, spec)?;
        return Ok(IntegralResult {
            value: (a.value + b.value) / 2.0,
            error_estimate: 0.5 * (a.error_estimate + b.error_estimate)
                + NU_STRADDLE * NU_STRADDLE,
            evaluations: a.evaluations + b.evaluations,
            converged: a.converged && b.converged,
        });
    }
    step_dispatch(step, p, q, spec)
}

/// Same as [`chain_step`] with the display's constant multiplied by
/// `prefactor_scale`; scaling one display must break its two neighboring
/// comparisons, which guards the harness against vacuous passes.
pub fn chain_step_scaled(
    step: ChainStepId,
    p: &GL3Parameter,
    q: &GL2Parameter,
    spec: &QuadratureSpec,
    prefactor_scale: f64,
) -> Result<IntegralResult, ModelError> {
    let mut r = chain_step(step, p, q, spec)?;
    r.value *= prefactor_scale;
    r.error_estimate *= prefactor_scale.abs();
    Ok(r)
}

/// Comparison of two consecutive displays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainPairRecord {
    pub first: u8,
    pub second: u8,
    pub first_value: Complex64,
    pub second_value: Complex64,
    pub rel_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Evaluate all ten displays at recommended settings and compare each
/// consecutive pair.
pub fn verify_chain(
    p: &GL3Parameter,
    q: &GL2Parameter,
) -> Result<Vec<ChainPairRecord>, ModelError> {
    let mut values = Vec::with_capacity(10);
    for step in ChainStepId::all() {
        values.push(chain_step(step, p, q, &recommended_spec(step))?.value);
    }
    let mut out = Vec::with_capacity(9);
    for k in 0..9 {
        let (a, b) = (values[k], values[k + 1]);
        let scale = b.norm().max(1e-300);
        let rel_diff = (a - b).norm() / scale;
        let tolerance = pair_tolerance(k);
        out.push(ChainPairRecord {
            first: k as u8,
            second: k as u8 + 1,
            first_value: a,
            second_value: b,
            rel_diff,
            tolerance,
            pass: rel_diff <= tolerance,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::model_value_closed;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(l: [f64; 3], t: f64) -> (GL3Parameter, GL2Parameter) {
        (
            GL3Parameter::from_imag(l[0], l[1], l[2]).unwrap(),
            GL2Parameter::from_imag(t).unwrap(),
        )
    }

    const SQRT_PI: f64 = 1.772453850905516027298;

    #[test]
    fn final_display_matches_closed_form() {
        for (l, t) in [
            ([0.0, 0.0, 0.0], 0.0),
            ([0.5, 0.0, -0.5], 0.3),
            ([0.8, -0.8, 0.0], 0.5),
        ] {
            let (p, q) = pt(l, t);
            let spec = recommended_spec(ChainStepId::new(9).unwrap());
            let got = chain_step(ChainStepId::new(9).unwrap(), &p, &q, &spec).unwrap();
            let want = model_value_closed(&p, &q).unwrap() * SQRT_PI;
            assert!(
                (got.value - want).norm() < 1e-12 * want.norm(),
                "{l:?} tau {t}: {} vs {want}",
                got.value
            );
        }
    }

    #[test]
    fn final_display_reference_value() {
        let (p, q) = pt([0.0, 0.0, 0.0], 0.0);
        let spec = recommended_spec(ChainStepId::new(9).unwrap());
        let got = chain_step(ChainStepId::new(9).unwrap(), &p, &q, &spec).unwrap();
        // gamma(1/4)^6 / pi^{3/2}
        let want = 407.9074536618589270117;
        assert!((got.value - c(want, 0.0)).norm() < 1e-11 * want, "{}", got.value);
    }

    #[test]
    fn step_ids_validated() {
        assert!(ChainStepId::new(10).is_err());
        assert_eq!(ChainStepId::new(7).unwrap().index(), 7);
        assert_eq!(ChainStepId::all().len(), 10);
    }

    #[test]
    fn pair_tolerances_follow_ladder() {
        assert_eq!(pair_tolerance(0), 1e-2);
        assert_eq!(pair_tolerance(6), 1e-2);
        assert_eq!(pair_tolerance(7), 1e-3);
        assert_eq!(pair_tolerance(8), 1e-6);
    }

    #[test]
    fn summed_display_tracks_closed_form() {
        // display 8 against display 9 at an off-degenerate point
        let (p, q) = pt([0.8, -0.8, 0.0], 0.5);
        let spec = recommended_spec(ChainStepId::new(8).unwrap());
        let v8 = chain_step(ChainStepId::new(8).unwrap(), &p, &q, &spec).unwrap();
        let v9 = chain_step(ChainStepId::new(9).unwrap(), &p, &q, &spec).unwrap();
        let rel = (v8.value - v9.value).norm() / v9.value.norm();
        assert!(rel < 1e-6, "rel {rel:.3e}: {} vs {}", v8.value, v9.value);
    }

    #[test]
    fn summed_display_handles_degenerate_gl2() {
        let (p, q) = pt([0.5, 0.0, -0.5], 0.0);
        let spec = recommended_spec(ChainStepId::new(8).unwrap());
        let v8 = chain_step(ChainStepId::new(8).unwrap(), &p, &q, &spec).unwrap();
        let v9 = chain_step(ChainStepId::new(9).unwrap(), &p, &q, &spec).unwrap();
        let rel = (v8.value - v9.value).norm() / v9.value.norm();
        assert!(rel < 1e-6, "rel {rel:.3e}: {} vs {}", v8.value, v9.value);
    }

    #[test]
    fn scaling_a_display_shifts_its_value() {
        let (p, q) = pt([0.5, 0.0, -0.5], 0.3);
        let spec = recommended_spec(ChainStepId::new(9).unwrap());
        let base = chain_step(ChainStepId::new(9).unwrap(), &p, &q, &spec).unwrap();
        let scaled =
            chain_step_scaled(ChainStepId::new(9).unwrap(), &p, &q, &spec, 1.01).unwrap();
        let ratio = (scaled.value / base.value).re;
        assert!((ratio - 1.01).abs() < 1e-12);
    }
}
