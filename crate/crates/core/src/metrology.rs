//! Gaussian quantum Fisher information, the Cramér–Rao bound and the
//! closed-form QFIs of the single-mode sensing schemes.
//!
//! For a parameter `ϑ` encoded in a Gaussian state,
//!
//! ```text
//! F = ½ Tr[(Σ⁻¹Σ')²]/(1 + P²) + 2P'²/(1 − P⁴) + 2 D'† Σ⁻¹ D'
//! ```
//!
//! with `P = 1/√det Σ` the purity. Single-measurement bounds only.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::dynamics::{continuous_squeezing_sigma, ModeRates};
use crate::error::{Error, Result};
use crate::gaussian::{covariance_determinant, hermitian_2x2_eigenvalues, GaussianState};
use crate::scalar::{re, Real};

/// Purity at or above `1 − PURE_THRESHOLD` counts as pure.
const PURE_THRESHOLD: f64 = 1e-9;
/// Largest `|P'|` tolerated at unit purity.
const PURE_SLOPE_TOL: f64 = 1e-12;
const NEGATIVE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QfiInput<T: Real> {
    pub sigma: DMatrix<Complex<T>>,
    pub sigma_prime: DMatrix<Complex<T>>,
    pub d_prime: DVector<Complex<T>>,
    pub purity: T,
    pub purity_prime: T,
}

impl<T: Real> QfiInput<T> {
    /// Input with the purity taken from `sigma` and its derivative from the
    /// trace identity `P' = −P Tr(Σ⁻¹Σ')/2`.
    pub fn from_derivatives(
        sigma: DMatrix<Complex<T>>,
        sigma_prime: DMatrix<Complex<T>>,
        d_prime: DVector<Complex<T>>,
    ) -> Result<Self> {
        let det = covariance_determinant(&sigma);
        if !(det > T::zero()) {
            return Err(Error::consistency("covariance determinant is not positive"));
        }
        let purity = T::one() / det.sqrt();
        let inv_sp = sigma
            .clone()
            .lu()
            .solve(&sigma_prime)
            .ok_or_else(|| Error::consistency("covariance is singular"))?;
        let purity_prime = -purity * inv_sp.trace().re * T::lit(0.5);
        Ok(Self { sigma, sigma_prime, d_prime, purity, purity_prime })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    DisplacementAmplitude,
    DisplacementPhase,
    Rotation,
    Squeezing,
    ContinuousSqueezing,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::DisplacementAmplitude => "displacement-amplitude",
            Scheme::DisplacementPhase => "displacement-phase",
            Scheme::Rotation => "rotation",
            Scheme::Squeezing => "squeezing",
            Scheme::ContinuousSqueezing => "continuous-squeezing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeResult<T: Real> {
    pub qfi: T,
    /// `1/√F`; infinite when the state carries no information.
    pub delta_theta: T,
    pub scheme: Scheme,
    pub optimal_angle: Option<T>,
}

impl<T: Real> SchemeResult<T> {
    fn new(qfi: T, scheme: Scheme, optimal_angle: Option<T>) -> Self {
        let delta_theta = if qfi > T::zero() {
            T::one() / qfi.sqrt()
        } else {
            T::one() / T::zero()
        };
        Self { qfi, delta_theta, scheme, optimal_angle }
    }
}

pub fn qfi_gaussian<T: Real>(input: &QfiInput<T>) -> Result<T> {
    let n = input.sigma.nrows();
    if input.sigma.shape() != (n, n) || input.sigma_prime.shape() != (n, n) || input.d_prime.len() != n {
        return Err(Error::invalid("QFI input shapes do not match"));
    }
    let p = input.purity;
    let dp = input.purity_prime;
    if !(p > T::zero() && p <= T::one() + T::lit(PURE_THRESHOLD)) {
        return Err(Error::invalid(format!("purity {} is outside (0, 1]", p.as_f64())));
    }
    let lu = input.sigma.clone().lu();
    let a = lu
        .solve(&input.sigma_prime)
        .ok_or_else(|| Error::consistency("covariance is singular"))?;
    let first = (&a * &a).trace().re * T::lit(0.5) / (T::one() + p * p);
    let pure = p >= T::one() - T::lit(PURE_THRESHOLD);
    let second = if pure {
        if dp.abs() >= T::lit(PURE_SLOPE_TOL) {
            return Err(Error::SingularPurity);
        }
        T::zero()
    } else {
        T::lit(2.0) * dp * dp / (T::one() - p.powi(4))
    };
    let x = lu
        .solve(&input.d_prime)
        .ok_or_else(|| Error::consistency("covariance is singular"))?;
    let third = input.d_prime.dotc(&x).re * T::lit(2.0);
    let total = first + second + third;
    let scale = first.abs() + second.abs() + third.abs();
    if total < -T::lit(NEGATIVE_SLACK) * scale.max(T::one()) {
        return Err(Error::consistency(format!("negative Fisher information {:e}", total.as_f64())));
    }
    Ok(total.max(T::zero()))
}

/// Outcome of a numerical-derivative QFI evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDifferenceQfi<T: Real> {
    pub qfi: T,
    /// Outer step; the estimate combines steps `h` and `h/2`.
    pub h: T,
}

/// `(Σ', D')`.
type Derivatives<T> = (DMatrix<Complex<T>>, DVector<Complex<T>>);

/// Default step `1e-5·max(1, |θ₀|)`.
pub fn default_fd_step<T: Real>(theta0: T) -> T {
    T::lit(1e-5) * T::one().max(theta0.abs())
}

/// QFI from central differences of a state family, with one Richardson
/// halving (`(4f(h/2) − f(h))/3`) on the derivatives.
pub fn qfi_finite_difference<T, F>(family: F, theta0: T, h: Option<T>) -> Result<FiniteDifferenceQfi<T>>
where
    T: Real,
    F: Fn(T) -> Result<GaussianState<T>>,
{
    let h = h.unwrap_or_else(|| default_fd_step(theta0));
    if !(h > T::zero() && h.is_finite()) {
        return Err(Error::invalid("finite-difference step must be positive"));
    }
    let centre = family(theta0)?;
    let two = T::lit(2.0);
    let derivs = |step: T| -> Result<Derivatives<T>> {
        let plus = family(theta0 + step)?;
        let minus = family(theta0 - step)?;
        let k = re(T::one() / (two * step));
        Ok(((plus.covariance() - minus.covariance()) * k, (plus.displacement() - minus.displacement()) * k))
    };
    let (s1, d1) = derivs(h)?;
    let (s2, d2) = derivs(h * T::lit(0.5))?;
    let third = re(T::one() / T::lit(3.0));
    let four = re(T::lit(4.0));
    let sigma_prime = (s2 * four - s1) * third;
    let d_prime = (d2 * four - d1) * third;
    let mut input = QfiInput::from_derivatives(centre.covariance().clone(), sigma_prime, d_prime)?;
    if input.purity >= T::one() - T::lit(PURE_THRESHOLD) {
        // Purity cannot exceed one, so a pure base point is a maximum.
        input.purity_prime = T::zero();
        input.purity = input.purity.min(T::one());
    }
    Ok(FiniteDifferenceQfi { qfi: qfi_gaussian(&input)?, h })
}

/// `Δϑ = 1/√F`.
pub fn cramer_rao<T: Real>(qfi: T) -> Result<T> {
    if !(qfi > T::zero()) {
        return Err(Error::NoInformation(qfi.as_f64()));
    }
    Ok(T::one() / qfi.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisplacementMode {
    /// Estimate `|μ|`; optimal displacement angle 0 (along the squeezed axis).
    Amplitude,
    /// Estimate the displacement phase; optimal angle π/2.
    Phase,
}

/// `4/λ₋` (amplitude) or `4μ²/λ₋` (phase).
pub fn qfi_displacement<T: Real>(lambda_minus: T, amplitude_mu: T, mode: DisplacementMode) -> Result<SchemeResult<T>> {
    if !(lambda_minus > T::zero()) {
        return Err(Error::invalid(format!("λ₋ must be positive, got {}", lambda_minus.as_f64())));
    }
    let four = T::lit(4.0);
    Ok(match mode {
        DisplacementMode::Amplitude => {
            SchemeResult::new(four / lambda_minus, Scheme::DisplacementAmplitude, Some(T::zero()))
        }
        DisplacementMode::Phase => {
            if !(amplitude_mu > T::zero()) {
                return Err(Error::invalid("phase estimation needs a positive displacement amplitude"));
            }
            SchemeResult::new(
                four * amplitude_mu * amplitude_mu / lambda_minus,
                Scheme::DisplacementPhase,
                Some(T::frac_pi_2()),
            )
        }
    })
}

fn check_spectrum<T: Real>(lambda_minus: T, lambda_plus: T) -> Result<()> {
    if !(lambda_minus > T::zero() && lambda_plus > T::zero()) || !lambda_plus.is_finite() {
        return Err(Error::invalid("covariance eigenvalues must be positive and finite"));
    }
    Ok(())
}

/// `(λ₊ − λ₋)²/(λ₋λ₊ + 1)`.
pub fn qfi_rotation<T: Real>(lambda_minus: T, lambda_plus: T) -> Result<SchemeResult<T>> {
    check_spectrum(lambda_minus, lambda_plus)?;
    if lambda_minus > lambda_plus {
        return Err(Error::invalid("expected λ₋ ≤ λ₊"));
    }
    let gap = lambda_plus - lambda_minus;
    Ok(SchemeResult::new(gap * gap / (lambda_minus * lambda_plus + T::one()), Scheme::Rotation, None))
}

fn squeezing_qfi<T: Real>(lm: T, lp: T, phi: T) -> T {
    let six = T::lit(6.0);
    let diff = lm - lp;
    (lm * lm + six * lm * lp + lp * lp - diff * diff * (T::lit(4.0) * phi).cos()) / (T::lit(2.0) * (lm * lp + T::one()))
}

/// `[λ₋² + 6λ₋λ₊ + λ₊² − (λ₋ − λ₊)² cos 4φ]/(2(λ₋λ₊ + 1))`, largest at `φ = π/4`.
pub fn qfi_squeezing<T: Real>(lambda_minus: T, lambda_plus: T, phi_nu: T) -> Result<SchemeResult<T>> {
    check_spectrum(lambda_minus, lambda_plus)?;
    Ok(SchemeResult::new(squeezing_qfi(lambda_minus, lambda_plus, phi_nu), Scheme::Squeezing, Some(T::frac_pi_4())))
}

/// `t²` times the squeezing QFI of the state reached at time `t`.
pub fn qfi_continuous_squeezing<T: Real>(lambda_minus: T, lambda_plus: T, phi: T, t: T) -> Result<SchemeResult<T>> {
    check_spectrum(lambda_minus, lambda_plus)?;
    if !(t >= T::zero()) {
        return Err(Error::invalid("squeezing duration must be non-negative"));
    }
    let f = t * t * squeezing_qfi(lambda_minus, lambda_plus, phi);
    Ok(SchemeResult::new(f, Scheme::ContinuousSqueezing, Some(T::frac_pi_4())))
}

/// `Δϑ = e^{−r}/(√2|D'|) · √(1 + e^{2r}γ⁺t)`.
pub fn sensitivity_displacement<T: Real>(r: T, gamma_plus: T, t: T, d_prime_norm: T) -> Result<T> {
    if !(r >= T::zero()) || !(gamma_plus >= T::zero()) || !(t >= T::zero()) || !(d_prime_norm > T::zero()) {
        return Err(Error::invalid("sensitivity needs r, γ⁺, t >= 0 and |D'| > 0"));
    }
    let two = T::lit(2.0);
    Ok((-r).exp() / (two.sqrt() * d_prime_norm) * (T::one() + (two * r).exp() * gamma_plus * t).sqrt())
}

/// `Δϑ ≈ e^{−2r}√(2 + e^{2r}γ⁺t)`, the large-squeezing asymptote of the
/// rotation scheme under decoherence.
pub fn sensitivity_rotation<T: Real>(r: T, gamma_plus: T, t: T) -> Result<T> {
    if !(r >= T::zero()) || !(gamma_plus >= T::zero()) || !(t >= T::zero()) {
        return Err(Error::invalid("sensitivity needs r, γ⁺, t >= 0"));
    }
    if r < T::one() {
        log::warn!("rotation sensitivity asymptote used at r = {:.3}, where e^{{2r}} ≫ 1 does not hold", r.as_f64());
    }
    let two = T::lit(2.0);
    Ok((-two * r).exp() * (two + (two * r).exp() * gamma_plus * t).sqrt())
}

/// `Δ` for estimating a continuous squeezing rate after duration `t`, from
/// the evolved spectrum of an initial squeezed vacuum.
pub fn continuous_squeezing_sensitivity<T: Real>(r: T, xi: T, phi: T, rates: &ModeRates<T>, t: T) -> Result<T> {
    let block = continuous_squeezing_sigma(r, xi, phi, rates, t)?;
    let (lm, lp) = hermitian_2x2_eigenvalues(&block);
    Ok(qfi_continuous_squeezing(lm, lp, phi, t)?.delta_theta)
}

/// Duration in `(0, t_max]` that minimises the continuous-squeezing
/// uncertainty: a grid scan followed by golden-section refinement.
pub fn optimal_squeezing_duration<T: Real>(r: T, xi: T, phi: T, rates: &ModeRates<T>, t_max: T) -> Result<(T, T)> {
    if !(t_max > T::zero() && t_max.is_finite()) {
        return Err(Error::invalid("t_max must be positive and finite"));
    }
    let f = |t: T| continuous_squeezing_sensitivity(r, xi, phi, rates, t);
    let samples = 200usize;
    let step = t_max / T::from_usize(samples).expect("sample count fits");
    let mut best = (step, f(step)?);
    for i in 2..=samples {
        let t = step * T::from_usize(i).expect("sample index fits");
        let v = f(t)?;
        if v < best.1 {
            best = (t, v);
        }
    }
    let mut lo = (best.0 - step).max(step * T::lit(1e-3));
    let mut hi = (best.0 + step).min(t_max);
    let golden = T::lit(0.618_033_988_749_894_8);
    for _ in 0..80 {
        let a = hi - golden * (hi - lo);
        let b = lo + golden * (hi - lo);
        if f(a)? < f(b)? {
            hi = b;
        } else {
            lo = a;
        }
    }
    let t = (lo + hi) * T::lit(0.5);
    let v = f(t)?;
    Ok(if v < best.1 { (t, v) } else { best })
}
