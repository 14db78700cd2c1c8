//! Closed form for a squeezed mode that is squeezed further at a constant
//! rate `Ξ e^{2iφ}` while decaying.
//!
//! Away from the resonance `2Ξ = γ⁻` the solution relaxes towards a fixed
//! point,
//!
//! ```text
//! Σ(t) = Σ_Ξ + e^{−γ⁻t} S_Ξ(t) (Σ(0) − Σ_Ξ) S_Ξ(t)†
//! Σ_Ξ  = −γ⁺/((2Ξ)² − (γ⁻)²) · [[γ⁻, −2e^{2iφ}Ξ], [−2e^{−2iφ}Ξ, γ⁻]]
//! ```
//!
//! with `S_Ξ(t)` the squeeze block of argument `Ξt`. The same solution written
//! as propagated initial state plus accumulated noise,
//!
//! ```text
//! Σ(t) = e^{−γ⁻t} S_Ξ(t) Σ(0) S_Ξ(t)† + γ⁺ [[C, −e^{2iφ}S], [−e^{−2iφ}S, C]]
//! C, S = (I₊ ± I₋)/2,   I± = ∫₀ᵗ e^{−(γ⁻ ∓ 2Ξ)s} ds
//! ```
//!
//! stays finite at the resonance, so that form is what gets evaluated.

use nalgebra::{ComplexField, Matrix2};
use num_complex::Complex;

use super::{check_time, ModeRates};
use crate::error::{Error, Result};
use crate::gaussian::squeeze_block;
use crate::scalar::{phase, re, Real};

/// Relative tolerance for the resonance `2Ξ = γ⁻`.
const RESONANCE_TOL: f64 = 1e-12;

/// The fixed point `Σ_Ξ` of continuous squeezing against decay.
pub fn continuous_squeezing_steady_state<T: Real>(xi: T, phi: T, rates: &ModeRates<T>) -> Result<Matrix2<Complex<T>>> {
    let two = T::lit(2.0);
    let gm = rates.gamma_minus;
    let denom = (two * xi).powi(2) - gm * gm;
    let scale = (two * xi).powi(2).max(gm * gm);
    if scale == T::zero() || denom.abs() <= T::lit(RESONANCE_TOL) * scale {
        return Err(Error::UnsupportedRegime(format!(
            "2Ξ = γ⁻ ({:e}): continuous squeezing has no fixed point",
            gm.as_f64()
        )));
    }
    let f = -rates.gamma_plus / denom;
    let off = phase(two * phi) * re(-two * xi * f);
    Ok(Matrix2::new(re(f * gm), off, off.conj(), re(f * gm)))
}

/// `∫₀ᵗ e^{−κs} ds`, continuous through `κ = 0`.
fn decay_integral<T: Real>(kappa: T, t: T) -> T {
    let x = kappa * t;
    if x.abs() < T::lit(1e-12) {
        t
    } else {
        -ComplexField::exp_m1(-x) / kappa
    }
}

/// Covariance block at time `t` of an initial squeezed vacuum `S(r)S(r)†`
/// evolving under squeezing rate `xi` with phase `phi` and the given rates.
pub fn continuous_squeezing_sigma<T: Real>(
    r: T,
    xi: T,
    phi: T,
    rates: &ModeRates<T>,
    t: T,
) -> Result<Matrix2<Complex<T>>> {
    check_time(t)?;
    if !(r.is_finite() && xi.is_finite() && phi.is_finite()) {
        return Err(Error::invalid("continuous-squeezing parameters must be finite"));
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let s0 = squeeze_block(r, T::zero());
    let sigma0 = s0 * s0.adjoint();
    let s_t = squeeze_block(xi * t, phi);
    let gm = rates.gamma_minus;
    let propagated = s_t * sigma0 * s_t.adjoint() * re((-gm * t).exp());
    let i_plus = decay_integral(gm - two * xi, t);
    let i_minus = decay_integral(gm + two * xi, t);
    let c = (i_plus + i_minus) * half * rates.gamma_plus;
    let s = (i_plus - i_minus) * half * rates.gamma_plus;
    let off = -phase(two * phi) * re(s);
    let noise = Matrix2::new(re(c), off, off.conj(), re(c));
    let out = propagated + noise;
    Ok((out + out.adjoint()) * re(half))
}
