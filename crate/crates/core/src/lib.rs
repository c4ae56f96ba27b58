//! Exact and Monte Carlo diagnostics of high-frequency ergodicity (HFE) and
//! high-frequency Gaussianity (HFG) for isotropic spherical random fields
//! obtained by Hermite-type Gaussian subordination.
//!
//! The crate is organised bottom-up:
//!
//! - [`wigner`]: 3j/6j symbols, Clebsch-Gordan coefficients and their
//!   convolutions, with an exact big-integer path and a fast recurrence path.
//! - [`harmonics`]: normalized associated Legendre functions and complex
//!   spherical harmonics.
//! - [`spectrum`]: angular power spectra, including the power-exponential
//!   class `C_l = c l^{-alpha} e^{-beta l}`.
//! - [`subordination`]: Hermite polynomials, spectra of `H_q(T)` and the
//!   harmonic coefficients of `H_2(T)`.
//! - [`diagnostics`]: HFE/HFG functionals, analytic variance terms, bounds
//!   and phase scans.
//! - [`montecarlo`]: seeded, thread-count independent simulation harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coeffs;
pub mod diagnostics;
pub mod error;
pub mod format;
pub mod harmonics;
pub mod montecarlo;
pub mod spectrum;
pub mod subordination;
pub mod wigner;

pub use coeffs::CoefficientSet;
pub use error::{Error, Result};
pub use harmonics::SpherePoint;
pub use spectrum::{ClassDParams, PowerSpectrum};
