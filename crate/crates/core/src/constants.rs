//! Physical constants (SI) and built-in atomic data.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J K⁻¹.
pub const K_B: f64 = 1.380_649e-23;
/// Bohr radius, m.
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;

/// cm⁶ s⁻¹ → m⁶ s⁻¹.
pub const CM6_TO_M6: f64 = 1e-12;
/// cm⁻³ → m⁻³.
pub const PER_CM3_TO_PER_M3: f64 = 1e6;

pub const RB87_MASS: f64 = 1.443_16e-25;
pub const RB87_SCATTERING_LENGTH: f64 = 98.0 * BOHR_RADIUS;
/// Three-body decay constant of Rb-87, cm⁶ s⁻¹.
pub const RB87_THREE_BODY_CM6: f64 = 5.8e-30;

pub const YB168_MASS: f64 = 2.788_39e-25;
pub const YB168_SCATTERING_LENGTH: f64 = 250.0 * BOHR_RADIUS;
/// Three-body decay constant of Yb-168, cm⁶ s⁻¹.
pub const YB168_THREE_BODY_CM6: f64 = 4e-30;
