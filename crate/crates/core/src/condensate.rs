//! Homogeneous-condensate quantities: healing length, sound speed, Bogoliubov
//! dispersion and mode coefficients, and mean-field three-body density decay.
//!
//! Everything is SI internally. Three-body constants and densities quoted in
//! cm-based units are converted at the constructors.

use std::f64::consts::PI;

use crate::constants::{
    CM6_TO_M6, HBAR, PER_CM3_TO_PER_M3, RB87_MASS, RB87_SCATTERING_LENGTH, RB87_THREE_BODY_CM6, YB168_MASS,
    YB168_SCATTERING_LENGTH, YB168_THREE_BODY_CM6,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Species {
    Rb87,
    Yb168,
    /// Mass in kg, scattering length in m, three-body constant in cm⁶ s⁻¹.
    Custom { mass: f64, scattering_length: f64, three_body_cm6: f64 },
}

impl Species {
    pub fn mass(&self) -> f64 {
        match *self {
            Species::Rb87 => RB87_MASS,
            Species::Yb168 => YB168_MASS,
            Species::Custom { mass, .. } => mass,
        }
    }

    pub fn scattering_length(&self) -> f64 {
        match *self {
            Species::Rb87 => RB87_SCATTERING_LENGTH,
            Species::Yb168 => YB168_SCATTERING_LENGTH,
            Species::Custom { scattering_length, .. } => scattering_length,
        }
    }

    /// Three-body loss constant in cm⁶ s⁻¹.
    pub fn three_body_cm6(&self) -> f64 {
        match *self {
            Species::Rb87 => RB87_THREE_BODY_CM6,
            Species::Yb168 => YB168_THREE_BODY_CM6,
            Species::Custom { three_body_cm6, .. } => three_body_cm6,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Species::Rb87 => "rb",
            Species::Yb168 => "yb",
            Species::Custom { .. } => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Condensate length in m; standing-wave harmonics have `k = nπ/L`.
    pub length: f64,
    pub aspect_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondensateSpec {
    /// kg
    pub atom_mass: f64,
    /// m
    pub scattering_length: f64,
    /// m⁻³
    pub density: f64,
    /// m⁶ s⁻¹
    pub three_body_constant: f64,
    /// K
    pub temperature: f64,
    pub geometry: Geometry,
}

impl CondensateSpec {
    /// Builds a spec from a species and a density in cm⁻³.
    pub fn for_species(species: Species, density_per_cm3: f64, temperature: f64, geometry: Geometry) -> Result<Self> {
        let spec = Self {
            atom_mass: species.mass(),
            scattering_length: species.scattering_length(),
            density: density_per_cm3 * PER_CM3_TO_PER_M3,
            three_body_constant: species.three_body_cm6() * CM6_TO_M6,
            temperature,
            geometry,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("atom_mass", self.atom_mass),
            ("scattering_length", self.scattering_length),
            ("density", self.density),
            ("length", self.geometry.length),
            ("aspect_ratio", self.geometry.aspect_ratio),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive and finite, got {v}")));
            }
        }
        for (name, v) in [("three_body_constant", self.three_body_constant), ("temperature", self.temperature)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(format!("{name} must be non-negative and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Density in cm⁻³.
    pub fn density_per_cm3(&self) -> f64 {
        self.density / PER_CM3_TO_PER_M3
    }

    /// Three-body constant in cm⁶ s⁻¹.
    pub fn three_body_cm6(&self) -> f64 {
        self.three_body_constant / CM6_TO_M6
    }
}

/// Wavenumber, frequency and Bogoliubov coefficients of one plane-wave mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    /// m⁻¹
    pub k: f64,
    /// rad s⁻¹
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl ModeSpec {
    pub fn new(k: f64, spec: &CondensateSpec) -> Result<Self> {
        let (alpha, beta) = bogoliubov_coefficients(k, spec)?;
        Ok(Self { k, omega: dispersion(k, spec), alpha, beta })
    }

    /// Standing-wave harmonic `n` of the condensate length.
    pub fn harmonic(n: u32, spec: &CondensateSpec) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("harmonic index must be at least 1"));
        }
        Self::new(harmonic_wavenumber(n, spec), spec)
    }
}

/// `ξ = 1/√(8π a_s ρ)`.
pub fn healing_length(spec: &CondensateSpec) -> f64 {
    1.0 / (8.0 * PI * spec.scattering_length * spec.density).sqrt()
}

/// `c_s = ħ/(√2 m ξ)`.
pub fn sound_speed(spec: &CondensateSpec) -> f64 {
    HBAR / (std::f64::consts::SQRT_2 * spec.atom_mass * healing_length(spec))
}

/// `μ = m c_s²`.
pub fn chemical_potential(spec: &CondensateSpec) -> f64 {
    let c = sound_speed(spec);
    spec.atom_mass * c * c
}

/// Contact coupling `g = 4πħ²a_s/m`.
pub fn contact_coupling(spec: &CondensateSpec) -> f64 {
    4.0 * PI * HBAR * HBAR * spec.scattering_length / spec.atom_mass
}

/// `ω_k = c_s |k| √(1 + ξ²k²/2)`.
pub fn dispersion(k: f64, spec: &CondensateSpec) -> f64 {
    let xi = healing_length(spec);
    let k = k.abs();
    sound_speed(spec) * k * (1.0 + 0.5 * (xi * k).powi(2)).sqrt()
}

/// `(α, β)` with `σ = (1 + 2/(ξk)²)^{1/4}`, `α = (σ⁻¹ + σ)/2`, `β = (σ⁻¹ − σ)/2`.
pub fn bogoliubov_coefficients(k: f64, spec: &CondensateSpec) -> Result<(f64, f64)> {
    if !(k.is_finite() && k != 0.0) {
        return Err(Error::invalid(format!("Bogoliubov coefficients need a finite non-zero k, got {k}")));
    }
    Ok(coefficients_at(healing_length(spec) * k.abs()))
}

/// Coefficients as a function of the dimensionless `ξk`.
pub fn coefficients_at(xi_k: f64) -> (f64, f64) {
    let sigma = (1.0 + 2.0 / (xi_k * xi_k)).powf(0.25);
    let inv = 1.0 / sigma;
    (0.5 * (inv + sigma), 0.5 * (inv - sigma))
}

/// `k = nπ/L`.
pub fn harmonic_wavenumber(n: u32, spec: &CondensateSpec) -> f64 {
    f64::from(n) * PI / spec.geometry.length
}

/// Solution `ρ₀/√(1 + 2Dρ₀²t)` of `dρ/dt = −Dρ³`, in whatever consistent
/// units `rho0` and `d` are given.
pub fn condensate_density_decay(rho0: f64, d: f64, t: f64) -> Result<f64> {
    if !(rho0 > 0.0) || !(d >= 0.0) || !(t >= 0.0) {
        return Err(Error::invalid(format!(
            "density decay needs rho0 > 0, D >= 0, t >= 0 (got {rho0}, {d}, {t})"
        )));
    }
    Ok(rho0 / (1.0 + 2.0 * d * rho0 * rho0 * t).sqrt())
}
