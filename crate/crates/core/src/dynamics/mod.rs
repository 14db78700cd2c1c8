//! Time evolution of Gaussian states and scalar variances under the
//! phonon-mode master equation.
//!
//! All states live in the co-rotating frame; [`to_lab_frame`] applies the
//! free rotation on demand.

mod continuous;
mod general;
mod rwa;
mod squeezed_frame;

pub use continuous::{continuous_squeezing_sigma, continuous_squeezing_steady_state};
pub use general::{
    default_step, drift_growth_rate, evolve_general, evolve_general_auto, BilinearHamiltonian, Generator,
    ModeCoupling,
};
pub use rwa::{evolve_rwa, to_lab_frame};
pub use squeezed_frame::{evolve_squeezed_frame, squeezed_frame_matrix, SqueezedFrameMatrix, SqueezedFrameState};

use crate::error::{Error, Result};
use crate::rates::ChannelRates;
use crate::scalar::Real;

/// Decay (`γ⁻`) and noise (`γ⁺`) constants of one mode, in s⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRates<T: Real> {
    pub gamma_minus: T,
    pub gamma_plus: T,
}

impl<T: Real> ModeRates<T> {
    pub fn new(gamma_minus: T, gamma_plus: T) -> Result<Self> {
        if !(gamma_minus.is_finite() && gamma_plus.is_finite()) || gamma_plus < gamma_minus.abs() {
            return Err(Error::invalid(format!(
                "mode rates need finite γ⁺ ≥ |γ⁻| (γ⁻ = {}, γ⁺ = {})",
                gamma_minus.as_f64(),
                gamma_plus.as_f64()
            )));
        }
        Ok(Self { gamma_minus, gamma_plus })
    }

    /// A bare damping rate `γ`, i.e. `γ⁺ = γ⁻ = γ` (zero-temperature decay).
    pub fn bare(gamma: T) -> Result<Self> {
        Self::new(gamma, gamma)
    }

    pub fn zero() -> Self {
        Self { gamma_minus: T::zero(), gamma_plus: T::zero() }
    }

    /// Cooling rate `γ^u = (γ⁺ + γ⁻)/2`.
    pub fn gamma_u(&self) -> T {
        (self.gamma_plus + self.gamma_minus) * T::lit(0.5)
    }

    /// Heating rate `γ^v = (γ⁺ − γ⁻)/2`.
    pub fn gamma_v(&self) -> T {
        (self.gamma_plus - self.gamma_minus) * T::lit(0.5)
    }
}

impl From<&ChannelRates> for ModeRates<f64> {
    fn from(r: &ChannelRates) -> Self {
        Self { gamma_minus: r.gamma_minus, gamma_plus: r.gamma_plus }
    }
}

impl From<ChannelRates> for ModeRates<f64> {
    fn from(r: ChannelRates) -> Self {
        (&r).into()
    }
}

/// The diagonal rate matrices `Γ₋` and `Γ₊`, one entry per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrices<T: Real> {
    modes: Vec<ModeRates<T>>,
}

impl<T: Real> RateMatrices<T> {
    pub fn new(modes: Vec<ModeRates<T>>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::invalid("rate matrices need at least one mode"));
        }
        for m in &modes {
            ModeRates::new(m.gamma_minus, m.gamma_plus)?;
        }
        Ok(Self { modes })
    }

    pub fn uniform(mode_count: usize, gamma_minus: T, gamma_plus: T) -> Result<Self> {
        Self::new(vec![ModeRates::new(gamma_minus, gamma_plus)?; mode_count])
    }

    /// Bare per-mode damping `γ_I` with `Γ₊ = Γ₋ = Γ`.
    pub fn bare(gammas: &[T]) -> Result<Self> {
        Self::new(gammas.iter().map(|&g| ModeRates::bare(g)).collect::<Result<_>>()?)
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[ModeRates<T>] {
        &self.modes
    }

    pub fn gamma_minus_diag(&self) -> Vec<T> {
        self.modes.iter().map(|m| m.gamma_minus).collect()
    }

    pub fn gamma_plus_diag(&self) -> Vec<T> {
        self.modes.iter().map(|m| m.gamma_plus).collect()
    }

    fn largest(&self) -> T {
        self.modes
            .iter()
            .fold(T::zero(), |acc, m| acc.max(m.gamma_minus.abs()).max(m.gamma_plus))
    }
}

impl RateMatrices<f64> {
    pub fn from_channels(channels: &[ChannelRates]) -> Result<Self> {
        Self::new(channels.iter().map(ModeRates::from).collect())
    }
}

fn check_time<T: Real>(t: T) -> Result<()> {
    if !(t >= T::zero() && t.is_finite()) {
        return Err(Error::invalid(format!("evolution time must be finite and non-negative, got {}", t.as_f64())));
    }
    Ok(())
}

/// `⟨X²⟩(t) = 1 + (x₀ − 1) e^{−γt}` for a squeezed quadrature under pure decay.
pub fn variance_pure_decay<T: Real>(x0: T, gamma: T, t: T) -> Result<T> {
    if !(x0 > T::zero()) || !(gamma >= T::zero()) {
        return Err(Error::invalid("pure-decay variance needs x0 > 0 and γ >= 0"));
    }
    check_time(t)?;
    Ok(T::one() + (x0 - T::one()) * (-gamma * t).exp())
}

/// Exact time at which the pure-decay variance reaches `2x₀` (`x₀ < 1/2`).
pub fn doubling_time<T: Real>(x0: T, gamma: T) -> Result<T> {
    let two = T::lit(2.0);
    if !(x0 > T::zero() && x0 * two < T::one()) || !(gamma > T::zero()) {
        return Err(Error::invalid("doubling time needs 0 < x0 < 1/2 and γ > 0"));
    }
    Ok(((T::one() - x0) / (T::one() - two * x0)).ln() / gamma)
}

/// `⟨X²⟩(t) = x∞ + (x₀ − x∞) e^{−(2Ξ+γ)t}` with `x∞ = γ/(2Ξ + γ)` for a quadrature
/// squeezed at rate `Ξ` while decaying at `γ`.
pub fn variance_squeeze_decay<T: Real>(x0: T, xi: T, gamma: T, t: T) -> Result<T> {
    if !(x0 > T::zero()) || !(xi >= T::zero()) || !(gamma >= T::zero()) {
        return Err(Error::invalid("squeeze-decay variance needs x0 > 0, Ξ >= 0, γ >= 0"));
    }
    check_time(t)?;
    let rate = T::lit(2.0) * xi + gamma;
    if rate == T::zero() {
        return Ok(x0);
    }
    let steady = gamma / rate;
    Ok(steady + (x0 - steady) * (-rate * t).exp())
}
