//! Closed-form evolution in the rotating-wave approximation.

use nalgebra::{DMatrix, DVector};

use super::{check_time, RateMatrices};
use crate::error::{Error, Result};
use crate::gaussian::{apply_unitary, rotation_block, GaussianState, SymplecticMatrix};
use crate::scalar::{re, Real};

/// `D(t) = e^{−Γ₋t/2} D(0)` and
/// `Σ(t) = e^{−Γ₋t/2}(Σ(0) − Σ∞)e^{−Γ₋t/2} + Σ∞` with `Σ∞ = Γ₊Γ₋⁻¹`.
pub fn evolve_rwa<T: Real>(state: &GaussianState<T>, rates: &RateMatrices<T>, t: T) -> Result<GaussianState<T>> {
    check_time(t)?;
    if rates.mode_count() != state.mode_count() {
        return Err(Error::invalid(format!(
            "{} rate entries for a {}-mode state",
            rates.mode_count(),
            state.mode_count()
        )));
    }
    if let Some((i, m)) = rates.modes().iter().enumerate().find(|(_, m)| !(m.gamma_minus > T::zero())) {
        return Err(Error::UnsupportedRegime(format!(
            "mode {i} has γ⁻ = {} ≤ 0, so no detailed-balance state exists; use the general integrator",
            m.gamma_minus.as_f64()
        )));
    }
    let n = 2 * state.mode_count();
    let half = T::lit(0.5);
    let mut decay = Vec::with_capacity(n);
    let mut steady = Vec::with_capacity(n);
    for m in rates.modes() {
        let e = (-m.gamma_minus * t * half).exp();
        let s = m.gamma_plus / m.gamma_minus;
        decay.extend([e, e]);
        steady.extend([s, s]);
    }
    let (labels, d0, sigma0) = state.clone().into_parts();
    let displacement = DVector::from_fn(n, |i, _| d0[i] * re(decay[i]));
    let covariance = DMatrix::from_fn(n, n, |i, j| {
        let s_inf = if i == j { steady[i] } else { T::zero() };
        (sigma0[(i, j)] - re(s_inf)) * re(decay[i] * decay[j]) + re(s_inf)
    });
    Ok(GaussianState::from_raw(labels, displacement, covariance))
}

/// Co-rotating state to lab frame at time `t`: mode `I` is rotated by `ω_I t`.
pub fn to_lab_frame<T: Real>(state: &GaussianState<T>, omegas: &[T], t: T) -> Result<GaussianState<T>> {
    if omegas.len() != state.mode_count() {
        return Err(Error::invalid(format!("{} frequencies for a {}-mode state", omegas.len(), state.mode_count())));
    }
    let blocks: Vec<_> = omegas.iter().map(|&w| rotation_block(w * t)).collect();
    apply_unitary(state, &SymplecticMatrix::block_diagonal(&blocks))
}
