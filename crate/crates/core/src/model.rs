//! The model invariant bilinear form: spherical vectors, the intertwining
//! kernel, its value at the spherical vectors evaluated both by quadrature
//! and in closed gamma form, the proportionality-constant calibration, the
//! reciprocity check against the completed-period prefactor, and localized
//! bump functions exhibiting the `T^{-3/2}` scaling.

use crate::gamma_factors::completed_prefactor;
use crate::quad::{
    integrate_nd, DimSpec, Domain, IntegralResult, QuadError, QuadratureSpec, SplitFn,
};
use crate::special::{ensure_finite, gamma_quotient, pow_cx, SpecialError};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("kernel singular: {0}")]
    KernelSingular(String),
    #[error("bump support touches a kernel singularity: {0}")]
    SupportTouchesSingularity(String),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error("quadrature failed: {0}")]
    Quad(#[from] QuadError),
}

const UNITARY_TOL: f64 = 1e-12;

/// GL(3) Langlands parameter on the unitary locus: three purely imaginary
/// components summing to zero (both up to 1e-12).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GL3Parameter {
    lambda: [Complex64; 3],
}

impl GL3Parameter {
    pub fn new(lambda: [Complex64; 3]) -> Result<Self, ModelError> {
        let sum: Complex64 = lambda.iter().sum();
        for (i, &l) in lambda.iter().enumerate() {
            ensure_finite("lambda", l)?;
            if l.re.abs() > UNITARY_TOL {
                return Err(ModelError::InvalidParameter(format!(
                    "lambda[{i}] = {l} is not purely imaginary"
                )));
            }
        }
        if sum.norm() > UNITARY_TOL {
            return Err(ModelError::InvalidParameter(format!(
                "lambda components sum to {sum}, not zero"
            )));
        }
        Ok(Self { lambda })
    }

    /// Convenience constructor from the imaginary parts.
    pub fn from_imag(a: f64, b: f64, c: f64) -> Result<Self, ModelError> {
        Self::new([
            Complex64::new(0.0, a),
            Complex64::new(0.0, b),
            Complex64::new(0.0, c),
        ])
    }

    /// Skips the unitarity checks; for probing off-locus behavior.
    pub fn new_unchecked(lambda: [Complex64; 3]) -> Self {
        Self { lambda }
    }

    pub fn lambda(&self) -> [Complex64; 3] {
        self.lambda
    }
}

/// GL(2) spectral parameter `tau` on the unitary locus (purely imaginary up
/// to 1e-12); the Langlands parameter is `(tau, -tau)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GL2Parameter {
    tau: Complex64,
}

impl GL2Parameter {
    pub fn new(tau: Complex64) -> Result<Self, ModelError> {
        ensure_finite("tau", tau)?;
        if tau.re.abs() > UNITARY_TOL {
            return Err(ModelError::InvalidParameter(format!(
                "tau = {tau} is not purely imaginary"
            )));
        }
        Ok(Self { tau })
    }

    pub fn from_imag(t: f64) -> Result<Self, ModelError> {
        Self::new(Complex64::new(0.0, t))
    }

    pub fn new_unchecked(tau: Complex64) -> Self {
        Self { tau }
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn nu(&self) -> [Complex64; 2] {
        [self.tau, -self.tau]
    }
}

/// A point on the twist line: the form pairs against `|det|^{-it}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub t: f64,
}

impl SpectralPoint {
    pub fn new(t: f64) -> Result<Self, ModelError> {
        if !t.is_finite() {
            return Err(ModelError::InvalidParameter(format!("t = {t}")));
        }
        Ok(Self { t })
    }
}

// Complex power of a non-negative base that may have overflowed to infinity;
// every use site has an exponent with negative real part, where the true
// value is below f64 resolution.
pub(crate) fn decay_pow(base: f64, e: Complex64) -> Complex64 {
    if base.is_finite() {
        pow_cx(base, e)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// GL(3) spherical vector in the non-compact picture:
/// `(1 + x^2 + (z + xy/2)^2)^{-(l1-l2+1)/2} (1 + y^2 + (z - xy/2)^2)^{-(l2-l3+1)/2}`.
pub fn sphere_gl3(lambda: [Complex64; 3], x: f64, y: f64, z: f64) -> Complex64 {
    let p = z + x * y / 2.0;
    let m = z - x * y / 2.0;
    let q1 = 1.0 + x * x + p * p;
    let q2 = 1.0 + y * y + m * m;
    let e1 = -(lambda[0] - lambda[1] + 1.0) / 2.0;
    let e2 = -(lambda[1] - lambda[2] + 1.0) / 2.0;
    decay_pow(q1, e1) * decay_pow(q2, e2)
}

/// GL(2) spherical vector: `(1 + w^2)^{-(2 tau + 1)/2}`.
pub fn sphere_gl2(q: &GL2Parameter, w: f64) -> Complex64 {
    decay_pow(1.0 + w * w, -(2.0 * q.tau + 1.0) / 2.0)
}

// Kernel exponents for given spectral data; the pairing evaluates these at
// (lambda, -nu, -t).
fn kernel_exponents(lambda: [Complex64; 3], nu: [Complex64; 2], t: f64) -> [Complex64; 3] {
    let it = Complex64::new(0.0, t);
    [
        lambda[0] - nu[1] - it - 0.5,
        lambda[1] - nu[0] - it - 0.5,
        -lambda[1] + nu[1] + it - 0.5,
    ]
}

// b2 is grouped as z - (xy/2 - wy) so that it reproduces, bit for bit, the
// distance to the singular split the z-quadrature declares; other groupings
// can round to exactly zero next to the surface.
fn kernel_value(e: &[Complex64; 3], x: f64, y: f64, z: f64, w: f64) -> Complex64 {
    let b1 = (z + x * y / 2.0).abs();
    let b2 = (z - (x * y / 2.0 - w * y)).abs();
    let b3 = (x - w).abs();
    if b1 == 0.0 || b2 == 0.0 || b3 == 0.0 {
        // a singular hyperplane was hit exactly; poison the sample so the
        // quadrature reports it instead of silently absorbing it
        return Complex64::new(f64::NAN, f64::NAN);
    }
    decay_pow(b1, e[0]) * decay_pow(b2, e[1]) * decay_pow(b3, e[2])
}

/// Intertwining kernel
/// `|z+xy/2|^{l1-n2-it-1/2} |z-xy/2+wy|^{l2-n1-it-1/2} |x-w|^{-l2+n2+it-1/2}`.
/// Exactly singular points are an error.
pub fn kernel(
    lambda: [Complex64; 3],
    nu: [Complex64; 2],
    t: f64,
    point: (f64, f64, f64),
    w: f64,
) -> Result<Complex64, ModelError> {
    for (name, v) in [("lambda", &lambda[..]), ("nu", &nu[..])] {
        for &z in v {
            ensure_finite(if name == "lambda" { "lambda" } else { "nu" }, z)
                .map_err(ModelError::from)?;
        }
    }
    let (x, y, z) = point;
    let b1 = (z + x * y / 2.0).abs();
    let b2 = (z - (x * y / 2.0 - w * y)).abs();
    let b3 = (x - w).abs();
    for (b, surface) in [(b1, "z + xy/2 = 0"), (b2, "z - xy/2 + wy = 0"), (b3, "x = w")] {
        if b == 0.0 {
            return Err(ModelError::KernelSingular(surface.to_string()));
        }
    }
    let e = kernel_exponents(lambda, nu, t);
    Ok(decay_pow(b1, e[0]) * decay_pow(b2, e[1]) * decay_pow(b3, e[2]))
}

fn max_imag_exponent(lambda: [Complex64; 3], nu: [Complex64; 2], t: f64) -> f64 {
    kernel_exponents(lambda, nu, t)
        .iter()
        .map(|e| e.im.abs())
        .fold(0.0, f64::max)
}

/// The spherical image at the origin: the 3-dimensional integral of the
/// kernel at `(lambda, -nu, -t)` against the GL(3) spherical vector over all
/// of `(x, y, z)`. The integrand is invariant under `(x,y,z) -> (-x,-y,z)`
/// and `(x,y,z) -> (-x,y,-z)`, so the integral is four times the quarter
/// space `x > 0, y > 0`, where the only interior singular surfaces are
/// `z = +-xy/2`. Results whose kernel exponents oscillate beyond the spec's
/// budget are flagged unconverged rather than rejected.
pub fn intertwine_at_zero(
    p: &GL3Parameter,
    q: &GL2Parameter,
    t: SpectralPoint,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, ModelError> {
    let lambda = p.lambda;
    let nu = q.nu();
    let neg_nu = [-nu[0], -nu[1]];
    let e = kernel_exponents(lambda, neg_nu, -t.t);
    let dims = [
        DimSpec::new(Domain::HalfLine),
        DimSpec::new(Domain::HalfLine),
        DimSpec::with_splits(
            Domain::RealLine,
            vec![
                Arc::new(|c: &[f64]| -c[0] * c[1] / 2.0) as SplitFn,
                Arc::new(|c: &[f64]| c[0] * c[1] / 2.0) as SplitFn,
            ],
        ),
    ];
    let f = |v: &[f64]| {
        let (x, y, z) = (v[0], v[1], v[2]);
        kernel_value(&e, x, y, z, 0.0) * sphere_gl3(lambda, x, y, z)
    };
    let mut r = integrate_nd(&f, &dims, spec)?;
    r.value *= 4.0;
    r.error_estimate *= 4.0;
    if max_imag_exponent(lambda, neg_nu, -t.t) > spec.oscillation_budget {
        r.converged = false;
    }
    Ok(r)
}

/// The model pairing at the spherical vectors, numerically:
/// `pi * intertwine_at_zero`, the `pi` being the residual `w`-integral
/// `int (1+w^2)^{-1} dw` left by sphericity.
pub fn model_value_numeric(
    p: &GL3Parameter,
    q: &GL2Parameter,
    t: SpectralPoint,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, ModelError> {
    let mut r = intertwine_at_zero(p, q, t, spec)?;
    r.value *= PI;
    r.error_estimate *= PI;
    Ok(r)
}

/// The model pairing as a raw 4-dimensional integral over `(w, x, y, z)`,
/// with no sphericity shortcut. Expensive; serves as a cross-check of
/// [`model_value_numeric`] at loose tolerance. The integrand is invariant
/// under simultaneous negation of `(w, x, y)`, so only `x > 0` is
/// integrated, doubled.
pub fn model_value_pairing_4d(
    p: &GL3Parameter,
    q: &GL2Parameter,
    t: SpectralPoint,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, ModelError> {
    let lambda = p.lambda;
    let nu = q.nu();
    let neg_nu = [-nu[0], -nu[1]];
    let e = kernel_exponents(lambda, neg_nu, -t.t);
    let q2 = *q;
    let dims = [
        DimSpec::new(Domain::RealLine),
        DimSpec::with_splits(Domain::HalfLine, vec![Arc::new(|c: &[f64]| c[0]) as SplitFn]),
        DimSpec::with_splits(Domain::RealLine, vec![Arc::new(|_: &[f64]| 0.0) as SplitFn]),
        DimSpec::with_splits(
            Domain::RealLine,
            vec![
                Arc::new(|c: &[f64]| -c[1] * c[2] / 2.0) as SplitFn,
                Arc::new(|c: &[f64]| c[1] * c[2] / 2.0 - c[0] * c[2]) as SplitFn,
            ],
        ),
    ];
    let f = move |v: &[f64]| {
        let (w, x, y, z) = (v[0], v[1], v[2], v[3]);
        kernel_value(&e, x, y, z, w) * sphere_gl3(lambda, x, y, z) * sphere_gl2(&q2, w)
    };
    let mut r = integrate_nd(&f, &dims, spec)?;
    r.value *= 2.0;
    r.error_estimate *= 2.0;
    if max_imag_exponent(lambda, neg_nu, -t.t) > spec.oscillation_budget {
        r.converged = false;
    }
    Ok(r)
}

fn closed_from_nu(lambda: [Complex64; 3], nu: [Complex64; 2]) -> Result<Complex64, ModelError> {
    let num = [
        (2.0 * lambda[0] + 2.0 * nu[0] + 1.0) / 4.0,
        (2.0 * lambda[0] + 2.0 * nu[1] + 1.0) / 4.0,
        (2.0 * lambda[1] + 2.0 * nu[0] + 1.0) / 4.0,
        -(2.0 * lambda[1] + 2.0 * nu[1] - 1.0) / 4.0,
        -(2.0 * lambda[2] + 2.0 * nu[0] - 1.0) / 4.0,
        -(2.0 * lambda[2] + 2.0 * nu[1] - 1.0) / 4.0,
    ];
    let den = [
        (lambda[0] - lambda[1] + 1.0) / 2.0,
        (lambda[1] - lambda[2] + 1.0) / 2.0,
        (lambda[0] - lambda[2] + 1.0) / 2.0,
        (nu[0] - nu[1] + 1.0) / 2.0,
    ];
    Ok(gamma_quotient(&num, &den)?)
}

/// Closed gamma form of the model pairing at the spherical vectors, without
/// the overall proportionality constant (see [`calibrate_constant`]).
pub fn model_value_closed(p: &GL3Parameter, q: &GL2Parameter) -> Result<Complex64, ModelError> {
    closed_from_nu(p.lambda, q.nu())
}

/// Closed form of the twisted pairing: the `nu` entries shift by `it`, which
/// is an exact identity of the gamma quotient.
pub fn model_value_closed_t(
    p: &GL3Parameter,
    q: &GL2Parameter,
    t: SpectralPoint,
) -> Result<Complex64, ModelError> {
    let it = Complex64::new(0.0, t.t);
    let nu = q.nu();
    closed_from_nu(p.lambda, [nu[0] + it, nu[1] + it])
}

/// One ratio of the numeric pairing to its closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationPoint {
    pub lambda_im: [f64; 3],
    pub tau_im: f64,
    pub ratio: Complex64,
}

/// Result of estimating the proportionality constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub constant: f64,
    pub spread: f64,
    pub points: Vec<CalibrationPoint>,
}

/// Built-in unitary spectral points (imaginary parts) used for calibration.
pub const CALIBRATION_POINTS: [([f64; 3], f64); 6] = [
    ([0.0, 0.0, 0.0], 0.0),
    ([0.5, 0.0, -0.5], 0.3),
    ([0.8, -0.8, 0.0], 0.5),
    ([0.3, 0.3, -0.6], -0.4),
    ([1.0, -0.2, -0.8], 0.9),
    ([-0.7, 0.4, 0.3], -1.0),
];

/// Estimates the proportionality constant between the numeric pairing and
/// its closed gamma form: the mean of the pointwise ratios over the built-in
/// spectral points, with `spread` the largest relative deviation of any
/// ratio from that mean. A spread at quadrature-error level certifies that a
/// single constant fits every point.
pub fn calibrate_constant(spec: &QuadratureSpec) -> Result<Calibration, ModelError> {
    let mut points = Vec::with_capacity(CALIBRATION_POINTS.len());
    let mut sum = Complex64::new(0.0, 0.0);
    for &(li, ti) in &CALIBRATION_POINTS {
        let p = GL3Parameter::from_imag(li[0], li[1], li[2])?;
        let q = GL2Parameter::from_imag(ti)?;
        let numeric = model_value_numeric(&p, &q, SpectralPoint { t: 0.0 }, spec)?;
        let closed = model_value_closed(&p, &q)?;
        let ratio = numeric.value / closed;
        sum += ratio;
        points.push(CalibrationPoint {
            lambda_im: li,
            tau_im: ti,
            ratio,
        });
    }
    let mean = sum / points.len() as f64;
    let spread = points
        .iter()
        .map(|pt| (pt.ratio - mean).norm())
        .fold(0.0, f64::max)
        / mean.norm();
    Ok(Calibration {
        constant: mean.re,
        spread,
        points,
    })
}

/// `|closed form at t| * |completed prefactor at s = 1/2 + it|`; identically
/// 1 on the unitary locus, because the prefactor's gamma factors are the
/// conjugate reciprocals of the closed form's.
pub fn reciprocity_modulus(
    p: &GL3Parameter,
    q: &GL2Parameter,
    t: SpectralPoint,
) -> Result<f64, ModelError> {
    let closed = model_value_closed_t(p, q, t)?;
    let s = Complex64::new(0.5, t.t);
    let pref = completed_prefactor(p.lambda, q.tau, s)?;
    Ok(closed.norm() * pref.norm())
}

// squared L^2 norm of (1-|v|^2)^4 on the unit ball of R^3
const PROFILE_NORM_SQ: f64 = 0.198_111_061_696_421_89;

/// Compactly supported radial profile `(1-|v|^2)^4`, recentered at
/// `(1, 0, 1)` and shrunk to radius `eps/T`, normalized to unit L^2 norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpProfile {
    radius_eps: f64,
}

impl BumpProfile {
    /// Center of the bump, where all three kernel factors equal 1.
    pub const CENTER: (f64, f64, f64) = (1.0, 0.0, 1.0);

    pub fn new(radius_eps: f64) -> Result<Self, ModelError> {
        if !(radius_eps.is_finite() && radius_eps > 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "bump radius must be positive, got {radius_eps}"
            )));
        }
        Ok(Self { radius_eps })
    }

    pub fn radius_eps(&self) -> f64 {
        self.radius_eps
    }

    /// The rescaled test function at scale `T`: support radius `eps/T`, unit
    /// L^2 norm.
    pub fn value(&self, scale_t: f64, x: f64, y: f64, z: f64) -> f64 {
        let s = scale_t / self.radius_eps;
        let (cx, cy, cz) = Self::CENTER;
        let (u, v, w) = ((x - cx) * s, (y - cy) * s, (z - cz) * s);
        let r2 = u * u + v * v + w * w;
        if r2 >= 1.0 {
            return 0.0;
        }
        let p = (1.0 - r2).powi(4);
        s.powf(1.5) * p / PROFILE_NORM_SQ.sqrt()
    }

    /// Support box `[1-r, 1+r] x [-r, r] x [1-r, 1+r]`, `r = eps/T`.
    pub fn support_box(&self, scale_t: f64) -> [(f64, f64); 3] {
        let r = self.radius_eps / scale_t;
        let (cx, cy, cz) = Self::CENTER;
        [(cx - r, cx + r), (cy - r, cy + r), (cz - r, cz + r)]
    }
}

/// The spherical image at the origin of the rescaled bump: the kernel at
/// `(lambda, -nu, -t)` integrated against the bump over its support box.
/// Requires `T >= 4`, spectral parameters bounded by `T`, and the support
/// staying clear of the kernel's singular surfaces.
pub fn bump_value(
    profile: &BumpProfile,
    p: &GL3Parameter,
    q: &GL2Parameter,
    t: SpectralPoint,
    scale_t: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult, ModelError> {
    if !(scale_t.is_finite() && scale_t >= 4.0) {
        return Err(ModelError::InvalidParameter(format!(
            "bump scale T must be at least 4, got {scale_t}"
        )));
    }
    let lam_max = p.lambda.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let bound = lam_max.max(q.tau.norm()).max(t.t.abs());
    if bound > scale_t {
        return Err(ModelError::InvalidParameter(format!(
            "spectral parameters reach {bound}, beyond the bump scale {scale_t}"
        )));
    }
    let r = profile.radius_eps / scale_t;
    // worst case of |z + xy/2| etc. over the support box
    let clearance = (1.0 - r) - (1.0 + r) * r / 2.0;
    if clearance <= 0.0 || r >= 1.0 {
        return Err(ModelError::SupportTouchesSingularity(format!(
            "support radius {r} reaches the surfaces z = -+ xy/2"
        )));
    }
    let lambda = p.lambda;
    let nu = q.nu();
    let neg_nu = [-nu[0], -nu[1]];
    let e = kernel_exponents(lambda, neg_nu, -t.t);
    let bx = profile.support_box(scale_t);
    let dims = [
        DimSpec::new(Domain::Interval(bx[0].0, bx[0].1)),
        DimSpec::new(Domain::Interval(bx[1].0, bx[1].1)),
        DimSpec::new(Domain::Interval(bx[2].0, bx[2].1)),
    ];
    let prof = *profile;
    let f = move |v: &[f64]| {
        let (x, y, z) = (v[0], v[1], v[2]);
        let u = prof.value(scale_t, x, y, z);
        if u == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            kernel_value(&e, x, y, z, 0.0) * u
        }
    };
    Ok(integrate_nd(&f, &dims, spec)?)
}
