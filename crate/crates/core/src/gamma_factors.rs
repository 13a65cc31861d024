//! Spectral-parameter dictionary and archimedean gamma factors: conversions
//! between type parameters and Langlands parameters, the Rankin-Selberg
//! gamma quotient, and the completed-period prefactor.

use crate::special::{ensure_finite, gamma_quotient, pow_cx, SpecialError};
use num_complex::Complex64;
use std::f64::consts::PI;

/// GL(3) type parameter pair with real parts pinned to 1/3, the tempered
/// normalization under which the Langlands parameter comes out purely
/// imaginary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GL3TypeParameter {
    alpha: (Complex64, Complex64),
}

impl GL3TypeParameter {
    pub fn new(alpha1: Complex64, alpha2: Complex64) -> Result<Self, SpecialError> {
        ensure_finite("alpha1", alpha1)?;
        ensure_finite("alpha2", alpha2)?;
        for (name, a) in [("alpha1", alpha1), ("alpha2", alpha2)] {
            if (a.re - 1.0 / 3.0).abs() > 1e-12 {
                return Err(SpecialError::InvalidArgument(format!(
                    "Re {name} must be 1/3, got {}",
                    a.re
                )));
            }
        }
        Ok(Self { alpha: (alpha1, alpha2) })
    }

    /// Skips the real-part check; for exploring non-tempered types.
    pub fn new_unchecked(alpha1: Complex64, alpha2: Complex64) -> Self {
        Self { alpha: (alpha1, alpha2) }
    }

    pub fn alpha(&self) -> (Complex64, Complex64) {
        self.alpha
    }
}

/// GL(2) type parameter; `tau = 1/2 - beta` is the spectral parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GL2TypeParameter {
    beta: Complex64,
}

impl GL2TypeParameter {
    pub fn new(beta: Complex64) -> Result<Self, SpecialError> {
        ensure_finite("beta", beta)?;
        Ok(Self { beta })
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }
}

/// Langlands parameter of a GL(3) type pair:
/// `(-a1 - 2 a2 + 1, -a1 + a2, 2 a1 + a2 - 1)`. The components always sum to
/// zero, and are purely imaginary exactly when both real parts are 1/3.
pub fn alpha_to_lambda(p: &GL3TypeParameter) -> [Complex64; 3] {
    let (a1, a2) = p.alpha;
    [
        -a1 - 2.0 * a2 + 1.0,
        -a1 + a2,
        2.0 * a1 + a2 - 1.0,
    ]
}

/// Spectral parameter `tau = 1/2 - beta` of a GL(2) type.
pub fn beta_to_tau(p: &GL2TypeParameter) -> Complex64 {
    Complex64::new(0.5, 0.0) - p.beta
}

/// Langlands parameter `(tau, -tau)` of a GL(2) type.
pub fn beta_to_nu(p: &GL2TypeParameter) -> [Complex64; 2] {
    let tau = beta_to_tau(p);
    [tau, -tau]
}

/// Archimedean gamma factor of the GL(3) x GL(2) Rankin-Selberg convolution
/// in Langlands coordinates:
///
/// `pi^{-3s} prod_{i,j} G((s + lambda_i + nu_j)/2)` over
/// `pi^{-3/2 + lambda_1 - lambda_3} G((1 + lambda_3 - lambda_2)/2)
///  G((1 + lambda_2 - lambda_1)/2) G((1 + lambda_3 - lambda_1)/2)`.
///
/// Normalized so the value at `lambda = nu = 0`, `s = 1` is exactly 1.
pub fn stade_gamma(
    lambda: [Complex64; 3],
    nu: [Complex64; 2],
    s: Complex64,
) -> Result<Complex64, SpecialError> {
    ensure_finite("s", s)?;
    let mut num = Vec::with_capacity(6);
    for &l in &lambda {
        ensure_finite("lambda", l)?;
        for &n in &nu {
            ensure_finite("nu", n)?;
            num.push((s + l + n) / 2.0);
        }
    }
    let half = Complex64::new(0.5, 0.0);
    let den = [
        half * (1.0 + lambda[2] - lambda[1]),
        half * (1.0 + lambda[1] - lambda[0]),
        half * (1.0 + lambda[2] - lambda[0]),
    ];
    let quot = gamma_quotient(&num, &den)?;
    let pi_pow = pow_cx(PI, -3.0 * s + 1.5 - lambda[0] + lambda[2]);
    Ok(pi_pow * quot)
}

/// The gamma-quotient prefactor turning the raw period into the completed
/// period:
///
/// `G((l1-l2+1)/2) G((l2-l3+1)/2) G((l1-l3+1)/2) G(tau + 1/2)` over
/// `prod_i G((s + lambda_i + tau)/2) G((s + lambda_i - tau)/2)`.
pub fn completed_prefactor(
    lambda: [Complex64; 3],
    tau: Complex64,
    s: Complex64,
) -> Result<Complex64, SpecialError> {
    ensure_finite("tau", tau)?;
    ensure_finite("s", s)?;
    let half = Complex64::new(0.5, 0.0);
    let num = [
        half * (lambda[0] - lambda[1] + 1.0),
        half * (lambda[1] - lambda[2] + 1.0),
        half * (lambda[0] - lambda[2] + 1.0),
        tau + 0.5,
    ];
    let mut den = Vec::with_capacity(6);
    for &l in &lambda {
        ensure_finite("lambda", l)?;
        den.push(half * (s + l + tau));
        den.push(half * (s + l - tau));
    }
    gamma_quotient(&num, &den)
}
