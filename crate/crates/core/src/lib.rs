//! Decoherence of Bose-Einstein-condensate phonon modes under three-body loss,
//! Landau and Beliaev damping, and its effect on quantum-enhanced sensing.
//!
//! The crate is organised bottom-up:
//!
//! - [`gaussian`]: Gaussian states in the `(b, b†)` basis and the symplectic
//!   squeeze/rotate/displace operations acting on them.
//! - [`condensate`]: healing length, sound speed, Bogoliubov dispersion and
//!   coefficients of a homogeneous condensate.
//! - [`rates`]: three-body, Landau and Beliaev channel rates and their thermal
//!   combination into cooling/heating constants.
//! - [`dynamics`]: closed-form rotating-wave evolution, a general bilinear
//!   Hamiltonian ODE path, the squeezed-frame 3×3 system and continuous
//!   squeezing.
//! - [`metrology`]: Gaussian quantum Fisher information and the closed-form
//!   scheme sensitivities.
//! - [`fock`]: brute-force truncated number-basis Lindblad integrator used as
//!   an independent oracle for everything above.
//! - [`scenarios`]: experimental parameter tables, damping curves and the
//!   gravity-sensing estimate, with CSV output.
//!
//! The state-space layer (`gaussian`, `dynamics`, `metrology`) is generic over
//! the real scalar type; the aliases below fix it to `f64`. The physical
//! layers work in SI units where quantities like ħ³ underflow `f32`, so they
//! are `f64` only.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod condensate;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod metrology;
pub mod quadrature;
pub mod rates;
pub mod scalar;
pub mod scenarios;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::{Complex, Complex32, Complex64};

/// Double-precision Gaussian state.
pub type GaussianState = gaussian::GaussianState<f64>;
/// Single-precision Gaussian state.
pub type GaussianState32 = gaussian::GaussianState<f32>;
/// Double-precision symplectic matrix.
pub type SymplecticMatrix = gaussian::SymplecticMatrix<f64>;
/// Single-precision symplectic matrix.
pub type SymplecticMatrix32 = gaussian::SymplecticMatrix<f32>;
pub type BilinearHamiltonian = dynamics::BilinearHamiltonian<f64>;
pub type ModeCoupling = dynamics::ModeCoupling<f64>;
pub type RateMatrices = dynamics::RateMatrices<f64>;
pub type ModeRates = dynamics::ModeRates<f64>;
pub type SqueezedFrameState = dynamics::SqueezedFrameState<f64>;
pub type QfiInput = metrology::QfiInput<f64>;
pub type SchemeResult = metrology::SchemeResult<f64>;
