//! Numerical verification kernels for an invariant bilinear pairing between
//! GL(3) and GL(2) spherical principal series.
//!
//! The crate provides, bottom up:
//!
//! * [`special`]: complex log-gamma, gamma quotients, the Gauss
//!   hypergeometric function of a real argument, and generalized
//!   hypergeometric series at unit argument with tail acceleration;
//! * [`quad`]: double-exponential quadrature on intervals, half-lines and the
//!   real line, with declared singular splits and a deterministic iterated
//!   n-dimensional driver;
//! * [`gamma_factors`]: the archimedean gamma-factor dictionary (spectral
//!   parameter conversions, the L-function gamma quotient, the completed
//!   period prefactor);
//! * [`model`]: the intertwining kernel, spherical vectors, the model pairing
//!   evaluated numerically and in closed gamma form, calibration and
//!   reciprocity checks, and localized bump-function scaling;
//! * [`chain`]: the ten-step reduction connecting the 3D pairing integral to
//!   its closed form, each step evaluable independently;
//! * [`appendix`]: eight hypergeometric integral identities with seeded
//!   parameter sampling and LHS/RHS verification;
//! * [`report`]: the serialization shape shared by emitted check records.

pub mod appendix;
pub mod chain;
pub mod gamma_factors;
pub mod model;
pub mod quad;
pub mod report;
pub mod special;

pub use num_complex::Complex64;
