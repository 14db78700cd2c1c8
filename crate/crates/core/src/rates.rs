//! Decoherence-channel rates of a condensate phonon mode: three-body loss,
//! Landau damping, Beliaev damping, and their thermal combination into the
//! cooling (`γ^u`, jump `b`) and heating (`γ^v`, jump `b†`) constants.

use std::f64::consts::PI;

use crate::condensate::{chemical_potential, dispersion, sound_speed, CondensateSpec, ModeSpec};
use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Integral};

pub const DEFAULT_QUAD_TOL: f64 = 1e-8;

/// Tolerance on `α² − β² = 1` when building loss-channel rates.
const NORMALIZATION_TOL: f64 = 1e-8;

/// `k_B T/μ` above which the low-temperature Landau asymptote is flagged.
const LOW_T_WARN_RATIO: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRates {
    pub gamma_u: f64,
    pub gamma_v: f64,
    /// Decay constant `γ^u − γ^v`.
    pub gamma_minus: f64,
    /// Noise constant `γ^u + γ^v`.
    pub gamma_plus: f64,
}

impl ChannelRates {
    pub fn from_uv(gamma_u: f64, gamma_v: f64) -> Result<Self> {
        if !(gamma_u >= 0.0 && gamma_v >= 0.0 && gamma_u.is_finite() && gamma_v.is_finite()) {
            return Err(Error::invalid(format!(
                "channel rates must be finite and non-negative (γu = {gamma_u}, γv = {gamma_v})"
            )));
        }
        Ok(Self { gamma_u, gamma_v, gamma_minus: gamma_u - gamma_v, gamma_plus: gamma_u + gamma_v })
    }

    /// From decay and noise constants; needs `γ⁺ ≥ |γ⁻|`.
    pub fn from_plus_minus(gamma_minus: f64, gamma_plus: f64) -> Result<Self> {
        if !(gamma_minus.is_finite() && gamma_plus.is_finite()) || gamma_plus < gamma_minus.abs() {
            return Err(Error::invalid(format!(
                "need finite γ⁺ ≥ |γ⁻| (γ⁻ = {gamma_minus}, γ⁺ = {gamma_plus})"
            )));
        }
        Ok(Self {
            gamma_u: 0.5 * (gamma_plus + gamma_minus),
            gamma_v: 0.5 * (gamma_plus - gamma_minus),
            gamma_minus,
            gamma_plus,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingBudget {
    pub gamma_3b: f64,
    pub gamma_landau: f64,
    pub gamma_beliaev: f64,
    pub thermal_occupation: f64,
    pub combined: ChannelRates,
}

/// `γ = 3Dρ²` with `D` in cm⁶ s⁻¹ and `ρ` in cm⁻³.
pub fn three_body_gamma(d_cm6: f64, rho_per_cm3: f64) -> Result<f64> {
    if !(d_cm6 >= 0.0) || !(rho_per_cm3 > 0.0) {
        return Err(Error::invalid(format!(
            "three-body rate needs D >= 0 and rho > 0 (got {d_cm6}, {rho_per_cm3})"
        )));
    }
    Ok(3.0 * d_cm6 * rho_per_cm3 * rho_per_cm3)
}

/// Three-body rates of a mode: `γ^u = α²γ`, `γ^v = β²γ`, `γ⁻ = γ`.
pub fn loss_channel_rates(gamma: f64, alpha: f64, beta: f64) -> Result<ChannelRates> {
    check_normalization(alpha, beta)?;
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::invalid(format!("three-body rate must be finite and non-negative, got {gamma}")));
    }
    let (a2, b2) = (alpha * alpha, beta * beta);
    Ok(ChannelRates { gamma_u: a2 * gamma, gamma_v: b2 * gamma, gamma_minus: gamma, gamma_plus: (a2 + b2) * gamma })
}

fn check_normalization(alpha: f64, beta: f64) -> Result<()> {
    let defect = alpha * alpha - beta * beta - 1.0;
    if !(defect.abs() <= NORMALIZATION_TOL * (alpha * alpha).max(1.0)) {
        return Err(Error::invalid(format!(
            "Bogoliubov coefficients violate α² − β² = 1 (defect {defect:e})"
        )));
    }
    Ok(())
}

/// Low-temperature Landau asymptote `(3π³/40) k (k_B T)⁴/(ρ ħ³ m c⁴)`.
pub fn landau_rate_low_t(k: f64, spec: &CondensateSpec) -> f64 {
    if spec.temperature == 0.0 {
        return 0.0;
    }
    let kt = K_B * spec.temperature;
    let ratio = kt / chemical_potential(spec);
    if ratio > LOW_T_WARN_RATIO {
        log::warn!("low-temperature Landau rate used at k_B T/μ = {ratio:.3}, outside its validity range");
    }
    let c = sound_speed(spec);
    3.0 * PI.powi(3) / 40.0 * k.abs() * kt.powi(4) / (spec.density * HBAR.powi(3) * spec.atom_mass * c.powi(4))
}

/// The Landau integral
/// `F = 8√π ∫₀^∞ dx (2 sinh x)⁻² (1 − 1/(2u) − 1/(2u²))²`,
/// `u = √(1 + 4τ²x²)`, evaluated after `x = tan s`.
pub fn landau_integral(tau: f64, quad_tol: f64) -> Result<Integral> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::invalid(format!("k_B T/μ must be finite and non-negative, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let integrand = |x: f64| {
        // (2 sinh x)⁻² = e^{−2x}/(1 − e^{−2x})²
        let e = (-2.0 * x).exp();
        let em = (-2.0 * x).exp_m1();
        let csch2 = e / (em * em);
        let q = 4.0 * tau * tau * x * x;
        let root = (1.0 + q).sqrt();
        let u = root;
        let u_minus_1 = q / (root + 1.0);
        let bracket = (2.0 * u + 1.0) * u_minus_1 / (2.0 * u * u);
        csch2 * bracket * bracket
    };
    let mapped = |s: f64| {
        let c = s.cos();
        let x = s.tan();
        if !x.is_finite() || c == 0.0 {
            return 0.0;
        }
        let v = integrand(x) / (c * c);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let raw = integrate(mapped, 0.0, 0.5 * PI, quad_tol)?;
    let scale = 8.0 * PI.sqrt();
    Ok(Integral { value: scale * raw.value, error: scale * raw.error, evaluations: raw.evaluations })
}

/// Landau damping `(2√π ħ k a_s² ρ/m) F` from the full integral.
pub fn landau_rate_full(k: f64, spec: &CondensateSpec, quad_tol: f64) -> Result<f64> {
    let tau = K_B * spec.temperature / chemical_potential(spec);
    let f = landau_integral(tau, quad_tol)?;
    let prefactor = 2.0 * PI.sqrt() * HBAR * k.abs() * spec.scattering_length.powi(2) * spec.density / spec.atom_mass;
    Ok(prefactor * f.value)
}

/// Zero-temperature Beliaev rate `3ħk⁵/(640π m ρ)`.
pub fn beliaev_rate_zero_t(k: f64, spec: &CondensateSpec) -> f64 {
    3.0 * HBAR * k.abs().powi(5) / (640.0 * PI * spec.atom_mass * spec.density)
}

/// `∫₀¹ x²(x−1)²/(e^{ax} − 1) dx`.
pub fn beliaev_thermal_integral(a: f64, quad_tol: f64) -> Result<Integral> {
    if !(a > 0.0) {
        return Err(Error::invalid(format!("ħω/k_BT must be positive, got {a}")));
    }
    if a.is_infinite() {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let integrand = |x: f64| {
        let y = a * x;
        let w = x * (x - 1.0) * (x - 1.0);
        if y < 1e-6 {
            // 1/(e^y − 1) ≈ 1/y − 1/2
            w / a - 0.5 * x * w
        } else {
            x * w / y.exp_m1()
        }
    };
    integrate(integrand, 0.0, 1.0, quad_tol)
}

/// Beliaev damping with its thermal correction:
/// `γ⁰[1 + 60 ∫₀¹ x²(x−1)²/(e^{(ħω/k_BT)x} − 1) dx]`.
pub fn beliaev_rate(k: f64, spec: &CondensateSpec, quad_tol: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::invalid(format!("Beliaev rate needs k > 0, got {k}")));
    }
    let zero = beliaev_rate_zero_t(k, spec);
    if spec.temperature == 0.0 {
        return Ok(zero);
    }
    let a = HBAR * dispersion(k, spec) / (K_B * spec.temperature);
    let integral = beliaev_thermal_integral(a, quad_tol)?;
    Ok(zero * (1.0 + 60.0 * integral.value))
}

/// Bose–Einstein occupation `1/(e^{ħω/k_BT} − 1)`; zero at `T = 0`.
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) || !(temperature >= 0.0) {
        return Err(Error::invalid(format!(
            "thermal occupation needs omega > 0 and T >= 0 (got {omega}, {temperature})"
        )));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 / (HBAR * omega / (K_B * temperature)).exp_m1())
}

/// `γ^u = α²γ_3b + (N̄+1)(γ_L+γ_B)`, `γ^v = β²γ_3b + N̄(γ_L+γ_B)`.
pub fn combined_rates(
    gamma_3b: f64,
    alpha: f64,
    beta: f64,
    gamma_landau: f64,
    gamma_beliaev: f64,
    nbar: f64,
) -> Result<DampingBudget> {
    check_normalization(alpha, beta)?;
    for (name, v) in [("γ_3b", gamma_3b), ("γ_L", gamma_landau), ("γ_B", gamma_beliaev), ("N̄", nbar)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::invalid(format!("{name} must be finite and non-negative, got {v}")));
        }
    }
    let thermal = gamma_landau + gamma_beliaev;
    let gamma_u = alpha * alpha * gamma_3b + (nbar + 1.0) * thermal;
    let gamma_v = beta * beta * gamma_3b + nbar * thermal;
    let combined = ChannelRates {
        gamma_u,
        gamma_v,
        gamma_minus: gamma_3b + gamma_landau + gamma_beliaev,
        gamma_plus: gamma_u + gamma_v,
    };
    Ok(DampingBudget { gamma_3b, gamma_landau, gamma_beliaev, thermal_occupation: nbar, combined })
}

/// All channels of one mode of `spec`, with the full Landau integral.
pub fn damping_budget(mode: &ModeSpec, spec: &CondensateSpec, quad_tol: f64) -> Result<DampingBudget> {
    let gamma_3b = three_body_gamma(spec.three_body_cm6(), spec.density_per_cm3())?;
    let landau = landau_rate_full(mode.k, spec, quad_tol)?;
    let beliaev = beliaev_rate(mode.k, spec, quad_tol)?;
    let nbar = thermal_occupation(mode.omega, spec.temperature)?;
    combined_rates(gamma_3b, mode.alpha, mode.beta, landau, beliaev, nbar)
}
