//! Fourth-order integration of the covariance and displacement equations for
//! an arbitrary bilinear Hamiltonian with diagonal damping.
//!
//! For `H = Σ_I [ω_I b†b − (i/2)(Ξ_I b†² − Ξ_I* b²) + i δ_I b† − i δ_I* b]`
//! plus cross-mode hopping and pair squeezing, the Heisenberg equations are
//! linear, `dζ/dt = G ζ + c`, and the moments obey
//!
//! ```text
//! dΣ/dt = GΣ + ΣG† − ½(Γ₋Σ + ΣΓ₋) + Γ₊
//! dD/dt = GD + c − ½Γ₋D
//! ```

use nalgebra::{DMatrix, DVector, Normed};
use num_complex::Complex;

use super::{check_time, RateMatrices};
use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::scalar::{cplx, re, Real};

/// Coupling between modes `i` and `j`:
/// `hopping·b_i†b_j + h.c.` and `−i(pair_squeezing·b_i†b_j† − h.c.)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoupling<T: Real> {
    pub i: usize,
    pub j: usize,
    pub hopping: Complex<T>,
    pub pair_squeezing: Complex<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilinearHamiltonian<T: Real> {
    /// Mode frequencies in the frame the state is expressed in (zero in the
    /// co-rotating frame).
    pub omegas: Vec<T>,
    /// Squeezing rates `Ξ = |Ξ| e^{2iφ}`.
    pub squeezings: Vec<Complex<T>>,
    /// Displacement drives `δ`.
    pub drives: Vec<Complex<T>>,
    pub couplings: Vec<ModeCoupling<T>>,
}

/// The drift `G` and source `c` of `dζ/dt = Gζ + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator<T: Real> {
    pub drift: DMatrix<Complex<T>>,
    pub source: DVector<Complex<T>>,
}

impl<T: Real> BilinearHamiltonian<T> {
    /// All coefficients zero.
    pub fn zero(mode_count: usize) -> Self {
        let z = cplx(T::zero(), T::zero());
        Self {
            omegas: vec![T::zero(); mode_count],
            squeezings: vec![z; mode_count],
            drives: vec![z; mode_count],
            couplings: Vec::new(),
        }
    }

    /// Single mode with frequency, squeezing and drive.
    pub fn single(omega: T, xi: Complex<T>, delta: Complex<T>) -> Self {
        Self { omegas: vec![omega], squeezings: vec![xi], drives: vec![delta], couplings: Vec::new() }
    }

    pub fn mode_count(&self) -> usize {
        self.omegas.len()
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.omegas.len();
        if m == 0 || self.squeezings.len() != m || self.drives.len() != m {
            return Err(Error::invalid("Hamiltonian coefficient lists must be non-empty and of equal length"));
        }
        let finite = |z: &Complex<T>| z.re.is_finite() && z.im.is_finite();
        if !self.omegas.iter().all(|w| w.is_finite())
            || !self.squeezings.iter().all(finite)
            || !self.drives.iter().all(finite)
        {
            return Err(Error::invalid("Hamiltonian coefficients must be finite"));
        }
        for c in &self.couplings {
            if c.i >= m || c.j >= m || c.i == c.j {
                return Err(Error::invalid(format!("coupling ({}, {}) is not between two distinct modes", c.i, c.j)));
            }
            if !finite(&c.hopping) || !finite(&c.pair_squeezing) {
                return Err(Error::invalid("coupling coefficients must be finite"));
            }
        }
        Ok(())
    }

    pub fn generator(&self) -> Result<Generator<T>> {
        self.validate()?;
        let n = 2 * self.mode_count();
        let i_unit = cplx(T::zero(), T::one());
        let mut g = DMatrix::zeros(n, n);
        let mut c = DVector::zeros(n);
        for (m, ((&w, &xi), &delta)) in self.omegas.iter().zip(&self.squeezings).zip(&self.drives).enumerate() {
            let (p, q) = (2 * m, 2 * m + 1);
            g[(p, p)] = -i_unit * re(w);
            g[(q, q)] = i_unit * re(w);
            g[(p, q)] = -xi;
            g[(q, p)] = -xi.conj();
            c[p] = delta;
            c[q] = delta.conj();
        }
        for cp in &self.couplings {
            let (pi, qi, pj, qj) = (2 * cp.i, 2 * cp.i + 1, 2 * cp.j, 2 * cp.j + 1);
            let (h, k) = (cp.hopping, cp.pair_squeezing);
            g[(pi, pj)] += -i_unit * h;
            g[(pj, pi)] += -i_unit * h.conj();
            g[(qi, qj)] += i_unit * h.conj();
            g[(qj, qi)] += i_unit * h;
            g[(pi, qj)] += -k;
            g[(pj, qi)] += -k;
            g[(qi, pj)] += -k.conj();
            g[(qj, pi)] += -k.conj();
        }
        Ok(Generator { drift: g, source: c })
    }

    fn largest_rate(&self) -> T {
        let mut out = T::zero();
        for &w in &self.omegas {
            out = out.max(w.abs());
        }
        for z in self.squeezings.iter().chain(&self.drives) {
            out = out.max(z.norm());
        }
        for c in &self.couplings {
            out = out.max(c.hopping.norm()).max(c.pair_squeezing.norm());
        }
        out
    }
}

/// Largest real part of the spectrum of `G − Γ₋/2`; positive means growth.
pub fn drift_growth_rate<T: Real>(h: &BilinearHamiltonian<T>, rates: &RateMatrices<T>) -> Result<T> {
    let a = damped_drift(&h.generator()?.drift, rates);
    let (_, upper) = a.schur().unpack();
    Ok(upper.diagonal().iter().fold(T::min_value().unwrap_or(-T::one()), |acc, z| acc.max(z.re)))
}

fn damped_drift<T: Real>(g: &DMatrix<Complex<T>>, rates: &RateMatrices<T>) -> DMatrix<Complex<T>> {
    let mut a = g.clone();
    let half = T::lit(0.5);
    for (m, r) in rates.modes().iter().enumerate() {
        a[(2 * m, 2 * m)] -= re(r.gamma_minus * half);
        a[(2 * m + 1, 2 * m + 1)] -= re(r.gamma_minus * half);
    }
    a
}

/// Default step `min(0.01/γ_max, 0.01/|Ω|_max, t/100)`.
pub fn default_step<T: Real>(h: &BilinearHamiltonian<T>, rates: &RateMatrices<T>, t: T) -> T {
    let hundredth = T::lit(0.01);
    let mut dt = t * hundredth;
    let g = rates.largest();
    if g > T::zero() {
        dt = dt.min(hundredth / g);
    }
    let w = h.largest_rate();
    if w > T::zero() {
        dt = dt.min(hundredth / w);
    }
    dt
}

struct Moments<T: Real> {
    sigma: DMatrix<Complex<T>>,
    d: DVector<Complex<T>>,
}

/// Fixed-step RK4 with `ceil(t/dt)` equal steps.
pub fn evolve_general<T: Real>(
    state: &GaussianState<T>,
    h: &BilinearHamiltonian<T>,
    rates: &RateMatrices<T>,
    t: T,
    dt: T,
) -> Result<GaussianState<T>> {
    check_time(t)?;
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(Error::invalid(format!("time step must be positive, got {}", dt.as_f64())));
    }
    if h.mode_count() != state.mode_count() || rates.mode_count() != state.mode_count() {
        return Err(Error::invalid(format!(
            "Hamiltonian ({}) and rates ({}) do not match the {}-mode state",
            h.mode_count(),
            rates.mode_count(),
            state.mode_count()
        )));
    }
    let gen = h.generator()?;
    let a = damped_drift(&gen.drift, rates);
    let a_adj = a.adjoint();
    let n = a.nrows();
    let noise: Vec<T> = rates.modes().iter().flat_map(|r| [r.gamma_plus, r.gamma_plus]).collect();
    let rhs = |m: &Moments<T>| {
        let mut ds = &a * &m.sigma + &m.sigma * &a_adj;
        for (i, &g) in noise.iter().enumerate() {
            ds[(i, i)] += re(g);
        }
        Moments { sigma: ds, d: &a * &m.d + &gen.source }
    };

    let steps = (t / dt).ceil().to_usize().unwrap_or(usize::MAX).max(1);
    if steps > 50_000_000 {
        return Err(Error::invalid(format!("{steps} integration steps requested")));
    }
    let h_step = t / T::from_usize(steps).expect("step count fits the scalar type");
    let (labels, d0, sigma0) = state.clone().into_parts();
    let mut y = Moments { sigma: sigma0, d: d0 };
    if t == T::zero() {
        return Ok(GaussianState::from_raw(labels, y.d, y.sigma));
    }
    let half = re(h_step * T::lit(0.5));
    let full = re(h_step);
    let sixth = re(h_step / T::lit(6.0));
    let two = re(T::lit(2.0));
    let symmetrize = |m: &mut DMatrix<Complex<T>>| {
        let adj = m.adjoint();
        *m = (&*m + adj) * re(T::lit(0.5));
    };
    for _ in 0..steps {
        let k1 = rhs(&y);
        let y2 = Moments { sigma: &y.sigma + &k1.sigma * half, d: &y.d + &k1.d * half };
        let k2 = rhs(&y2);
        let y3 = Moments { sigma: &y.sigma + &k2.sigma * half, d: &y.d + &k2.d * half };
        let k3 = rhs(&y3);
        let y4 = Moments { sigma: &y.sigma + &k3.sigma * full, d: &y.d + &k3.d * full };
        let k4 = rhs(&y4);
        y.sigma += (k1.sigma + k2.sigma * two + k3.sigma * two + k4.sigma) * sixth;
        y.d += (k1.d + k2.d * two + k3.d * two + k4.d) * sixth;
        symmetrize(&mut y.sigma);
        let finite = y.sigma.iter().chain(y.d.iter()).all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite {
            let growth = drift_growth_rate(h, rates).map(|g| g.as_f64()).unwrap_or(f64::NAN);
            return Err(Error::Instability {
                growth_rate: growth,
                message: format!("moments overflowed before t = {}", t.as_f64()),
            });
        }
    }
    debug_assert_eq!(y.sigma.nrows(), n);
    Ok(GaussianState::from_raw(labels, y.d, y.sigma))
}

/// RK4 at the default step, halving until two successive results agree to
/// 1e-8 relative.
pub fn evolve_general_auto<T: Real>(
    state: &GaussianState<T>,
    h: &BilinearHamiltonian<T>,
    rates: &RateMatrices<T>,
    t: T,
) -> Result<GaussianState<T>> {
    check_time(t)?;
    if t == T::zero() {
        return Ok(state.clone());
    }
    let tol = T::lit(1e-8).max(T::eps() * T::lit(100.0));
    let mut dt = default_step(h, rates, t);
    let mut coarse = evolve_general(state, h, rates, t, dt)?;
    for _ in 0..8 {
        dt *= T::lit(0.5);
        let fine = evolve_general(state, h, rates, t, dt)?;
        let scale = fine.covariance().norm() + fine.displacement().norm();
        let change = (fine.covariance() - coarse.covariance()).norm() + (fine.displacement() - coarse.displacement()).norm();
        if change <= tol * scale {
            return Ok(fine);
        }
        coarse = fine;
    }
    log::warn!("general integrator did not reach the 1e-8 Richardson target at dt = {:e}", dt.as_f64());
    Ok(coarse)
}
