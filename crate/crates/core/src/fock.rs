//! Single-mode Lindblad integration in a truncated number basis.
//!
//! This is the brute-force check on the Gaussian machinery: nothing here
//! assumes Gaussianity. The master equation is
//!
//! ```text
//! dρ/dt = −i[H, ρ] + γᵘ(bρb† − ½{b†b, ρ}) + γᵛ(b†ρb − ½{bb†, ρ})
//! H     = ωb†b − (i/2)(Ξb†² − Ξ*b²) + iδb† − iδ*b
//! ```
//!
//! with every operator truncated to `dim` levels. The right-hand side is
//! evaluated band by band, so one evaluation costs O(dim²).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::dynamics::ModeRates;
use crate::error::{Error, Result};
use crate::gaussian::{apply_unitary, displace, squeeze_matrix, vacuum_state, GaussianState};

type C = Complex64;

pub const MIN_DIM: usize = 8;
/// Truncations tried in turn by [`oracle_evolve`].
pub const ORACLE_DIMS: [usize; 3] = [61, 121, 241];
/// Largest top-level population accepted.
pub const TAIL_TOL: f64 = 1e-8;
/// Number of top levels counted as the tail.
pub const TAIL_LEVELS: usize = 5;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const POSITIVITY_TOL: f64 = 1e-10;
const TRACE_DRIFT_TOL: f64 = 1e-9;
/// `dt·λ` bound for the RK4 sub-steps; half the stability limit keeps
/// near-pure states positive to ~1e-10.
const RK4_STABLE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    rho: DMatrix<C>,
}

impl FockDensityMatrix {
    /// Validates Hermiticity, unit trace, positivity and the tail population.
    pub fn new(rho: DMatrix<C>) -> Result<Self> {
        let out = Self::unchecked(rho)?;
        out.validate()?;
        Ok(out)
    }

    fn unchecked(rho: DMatrix<C>) -> Result<Self> {
        if !rho.is_square() || rho.nrows() < MIN_DIM {
            return Err(Error::invalid(format!("density matrix must be square with dim >= {MIN_DIM}")));
        }
        Ok(Self { rho })
    }

    pub fn pure(psi: &DVector<C>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) {
            return Err(Error::invalid("state vector has zero norm"));
        }
        let psi = psi / C::new(norm, 0.0);
        Self::new(&psi * psi.adjoint())
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::number(0, dim)
    }

    pub fn number(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::invalid(format!("number state |{n}⟩ needs dim > {n}")));
        }
        let mut psi = DVector::zeros(dim);
        psi[n] = C::new(1.0, 0.0);
        Self::pure(&psi)
    }

    pub fn coherent(mu: C, dim: usize) -> Result<Self> {
        let mut psi = DVector::zeros(dim);
        let mut c = C::new((-0.5 * mu.norm_sqr()).exp(), 0.0);
        for n in 0..dim {
            psi[n] = c;
            c *= mu / (n as f64 + 1.0).sqrt();
        }
        Self::pure(&psi)
    }

    pub fn thermal(nbar: f64, dim: usize) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::invalid("thermal occupation must be finite and non-negative"));
        }
        let q = nbar / (1.0 + nbar);
        let diag = DVector::from_fn(dim, |n, _| C::new(q.powi(n as i32) / (1.0 + nbar), 0.0));
        let tail = diag.iter().skip(dim.saturating_sub(TAIL_LEVELS)).map(|c| c.re).sum::<f64>();
        let trace: f64 = diag.iter().map(|c| c.re).sum();
        if tail >= TAIL_TOL {
            return Err(Error::Truncation { tail, dim });
        }
        Self::new(DMatrix::from_diagonal(&(diag / C::new(trace, 0.0))))
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C> {
        &self.rho
    }

    pub fn into_matrix(self) -> DMatrix<C> {
        self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// `Σ ρₙₙ` over the top [`TAIL_LEVELS`] levels.
    pub fn tail_population(&self) -> f64 {
        let d = self.dim();
        (d.saturating_sub(TAIL_LEVELS)..d).map(|n| self.rho[(n, n)].re).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.rho - self.rho.adjoint()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.rho.clone().symmetric_eigenvalues().min()
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > HERMITIAN_TOL {
            return Err(Error::consistency(format!("density matrix not Hermitian (defect {herm:e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::consistency(format!("density matrix trace {tr} ≠ 1")));
        }
        let low = self.min_eigenvalue();
        if low < -POSITIVITY_TOL {
            return Err(Error::consistency(format!("density matrix eigenvalue {low:e} < 0")));
        }
        self.check_tail()
    }

    fn check_tail(&self) -> Result<()> {
        let tail = self.tail_population();
        if tail >= TAIL_TOL {
            return Err(Error::Truncation { tail, dim: self.dim() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindbladGenerator {
    pub omega: f64,
    pub xi: C,
    pub delta: C,
    /// Rate of the jump `b`.
    pub gamma_u: f64,
    /// Rate of the jump `b†`.
    pub gamma_v: f64,
    pub dim: usize,
}

pub fn build_generator(omega: f64, xi: C, delta: C, gamma_u: f64, gamma_v: f64, dim: usize) -> Result<LindbladGenerator> {
    if dim < MIN_DIM {
        return Err(Error::invalid(format!("Fock truncation dim = {dim} is below {MIN_DIM}")));
    }
    if !(gamma_u >= 0.0 && gamma_v >= 0.0) || !gamma_u.is_finite() || !gamma_v.is_finite() {
        return Err(Error::invalid("Lindblad rates must be finite and non-negative"));
    }
    if !(omega.is_finite() && xi.norm().is_finite() && delta.norm().is_finite()) {
        return Err(Error::invalid("Hamiltonian coefficients must be finite"));
    }
    Ok(LindbladGenerator { omega, xi, delta, gamma_u, gamma_v, dim })
}

impl LindbladGenerator {
    /// Generator with `γᵘ = (γ⁺ + γ⁻)/2` and `γᵛ = (γ⁺ − γ⁻)/2`.
    pub fn from_mode(omega: f64, xi: C, delta: C, rates: &ModeRates<f64>, dim: usize) -> Result<Self> {
        build_generator(omega, xi, delta, rates.gamma_u(), rates.gamma_v(), dim)
    }

    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        build_generator(self.omega, self.xi, self.delta, self.gamma_u, self.gamma_v, dim)
    }

    /// Annihilation operator `b` as a dense matrix.
    pub fn annihilation(&self) -> DMatrix<C> {
        DMatrix::from_fn(self.dim, self.dim, |m, n| {
            if n == m + 1 {
                C::new((n as f64).sqrt(), 0.0)
            } else {
                C::new(0.0, 0.0)
            }
        })
    }

    pub fn creation(&self) -> DMatrix<C> {
        self.annihilation().adjoint()
    }

    pub fn hamiltonian(&self) -> DMatrix<C> {
        let b = self.annihilation();
        let bd = self.creation();
        let i = C::new(0.0, 1.0);
        let half_i = C::new(0.0, 0.5);
        &bd * &b * C::new(self.omega, 0.0) - (&bd * &bd * self.xi - &b * &b * self.xi.conj()) * half_i
            + (&bd * self.delta - &b * self.delta.conj()) * i
    }

    /// The `0.05/max(rate)` step guard.
    pub fn max_step(&self) -> f64 {
        let scale = self
            .gamma_u
            .max(self.gamma_v)
            .max(self.omega.abs())
            .max(self.xi.norm())
            .max(self.delta.norm());
        if scale > 0.0 {
            0.05 / scale
        } else {
            f64::INFINITY
        }
    }

    /// Gershgorin bound on the spectral radius of the truncated Liouvillian.
    /// Leaves out the free rotation, which the integrator treats exactly.
    fn spectral_bound(&self) -> f64 {
        let n = self.dim as f64;
        n * (2.0 * self.xi.norm() + 2.0 * (self.gamma_u + self.gamma_v)) + 4.0 * self.delta.norm() * n.sqrt()
    }

    /// `dρ/dt` written into `out`, with the given squeezing, drive and
    /// rotation frequency in place of the stored ones.
    fn rhs(&self, rho: &DMatrix<C>, out: &mut DMatrix<C>, sq: &[f64], xi: C, delta: C, omega: f64) {
        let d = self.dim;
        let i = C::new(0.0, 1.0);
        let (gu, gv) = (self.gamma_u, self.gamma_v);
        let xi_h = xi * 0.5;
        let xic_h = xi.conj() * 0.5;
        let de = delta;
        let dec = delta.conj();
        // Diagonal of the truncated bb†: k + 1 except on the top level.
        let bbd = |k: usize| if k + 1 < d { (k + 1) as f64 } else { 0.0 };
        for n in 0..d {
            for m in 0..d {
                let r = |a: usize, b: usize| rho[(a, b)];
                let mut acc = C::new(
                    -0.5 * (gu * (m + n) as f64 + gv * (bbd(m) + bbd(n))),
                    -omega * (m as f64 - n as f64),
                ) * r(m, n);
                if m + 1 < d && n + 1 < d {
                    acc += r(m + 1, n + 1) * (gu * sq[m + 1] * sq[n + 1]);
                }
                if m >= 1 && n >= 1 {
                    acc += r(m - 1, n - 1) * (gv * sq[m] * sq[n]);
                }
                // (H'ρ)ₘₙ − (ρH')ₘₙ for the non-diagonal part H' of H.
                let mut comm = C::new(0.0, 0.0);
                if m >= 2 {
                    comm += -i * xi_h * (sq[m] * sq[m - 1]) * r(m - 2, n);
                }
                if m + 2 < d {
                    comm += i * xic_h * (sq[m + 1] * sq[m + 2]) * r(m + 2, n);
                }
                if m >= 1 {
                    comm += i * de * sq[m] * r(m - 1, n);
                }
                if m + 1 < d {
                    comm -= i * dec * sq[m + 1] * r(m + 1, n);
                }
                if n + 2 < d {
                    comm -= -i * xi_h * (sq[n + 1] * sq[n + 2]) * r(m, n + 2);
                }
                if n >= 2 {
                    comm -= i * xic_h * (sq[n] * sq[n - 1]) * r(m, n - 2);
                }
                if n + 1 < d {
                    comm -= i * de * sq[n + 1] * r(m, n + 1);
                }
                if n >= 1 {
                    comm += i * dec * sq[n] * r(m, n - 1);
                }
                out[(m, n)] = acc - i * comm;
            }
        }
    }

    /// Full Liouvillian applied once, exposed for tests.
    pub fn apply(&self, rho: &DMatrix<C>) -> DMatrix<C> {
        let sq = sqrt_table(self.dim);
        let mut out = DMatrix::zeros(self.dim, self.dim);
        self.rhs(rho, &mut out, &sq, self.xi, self.delta, self.omega);
        out
    }
}

fn max_abs(m: &DMatrix<C>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn sqrt_table(dim: usize) -> Vec<f64> {
    (0..dim + 3).map(|k| (k as f64).sqrt()).collect()
}

/// Fixed-step RK4 up to time `t` with nominal step `dt`. Steps are split
/// further when `dt` would leave the RK4 stability region for this
/// truncation.
pub fn evolve_rho(rho: &FockDensityMatrix, gen: &LindbladGenerator, t: f64, dt: f64) -> Result<FockDensityMatrix> {
    if rho.dim() != gen.dim {
        return Err(Error::invalid(format!("density matrix dim {} vs generator dim {}", rho.dim(), gen.dim)));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("evolution time must be finite and non-negative"));
    }
    if !(dt > 0.0) || dt > gen.max_step() * (1.0 + 1e-12) {
        return Err(Error::StepSize(format!("dt = {dt:e} exceeds the guard {:e}", gen.max_step())));
    }
    rho.check_tail()?;
    let h_max = dt.min(RK4_STABLE / gen.spectral_bound().max(f64::MIN_POSITIVE));
    let steps = (t / h_max).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let d = gen.dim;
    let sq = sqrt_table(d);
    let trace0 = rho.trace();
    let mut y = rho.rho.clone();
    let mut k1 = DMatrix::zeros(d, d);
    let mut k2 = DMatrix::zeros(d, d);
    let mut k3 = DMatrix::zeros(d, d);
    let mut k4 = DMatrix::zeros(d, d);
    let half = C::new(0.5 * h, 0.0);
    let full = C::new(h, 0.0);
    let sixth = C::new(h / 6.0, 0.0);
    let two = C::new(2.0, 0.0);
    // Interaction picture of ωb†b: ρ̃ₘₙ = e^{iω(m−n)s}ρₘₙ sees Ξe^{2iωs} and δe^{iωs}.
    let w = gen.omega;
    let frame = |s: f64| (gen.xi * C::from_polar(1.0, 2.0 * w * s), gen.delta * C::from_polar(1.0, w * s));
    if t > 0.0 {
        for k in 0..steps {
            let s = k as f64 * h;
            let (xa, da) = frame(s);
            let (xb, db) = frame(s + 0.5 * h);
            let (xc, dc) = frame(s + h);
            gen.rhs(&y, &mut k1, &sq, xa, da, 0.0);
            gen.rhs(&(&y + &k1 * half), &mut k2, &sq, xb, db, 0.0);
            gen.rhs(&(&y + &k2 * half), &mut k3, &sq, xb, db, 0.0);
            gen.rhs(&(&y + &k3 * full), &mut k4, &sq, xc, dc, 0.0);
            y += (&k1 + &k2 * two + &k3 * two + &k4) * sixth;
        }
        for n in 0..d {
            for m in 0..d {
                y[(m, n)] *= C::from_polar(1.0, -w * (m as f64 - n as f64) * t);
            }
        }
    }
    if !y.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        return Err(Error::StepSize("non-finite density matrix during integration".into()));
    }
    let drift = (y.trace().re - trace0).abs();
    if drift >= TRACE_DRIFT_TOL {
        return Err(Error::StepSize(format!("trace drifted by {drift:e}")));
    }
    y = (&y + y.adjoint()) * C::new(0.5, 0.0);
    let tr = y.trace().re;
    y /= C::new(tr, 0.0);
    let out = FockDensityMatrix::unchecked(y)?;
    out.check_tail()?;
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockMoments {
    pub mean_b: C,
    pub mean_bb: C,
    pub mean_n: f64,
    pub x_variance: f64,
    pub purity: f64,
}

pub fn moments(rho: &FockDensityMatrix) -> FockMoments {
    let d = rho.dim();
    let r = &rho.rho;
    let mut mean_b = C::new(0.0, 0.0);
    let mut mean_bb = C::new(0.0, 0.0);
    let mut mean_n = 0.0;
    for m in 0..d {
        mean_n += m as f64 * r[(m, m)].re;
        if m + 1 < d {
            mean_b += r[(m + 1, m)] * ((m + 1) as f64).sqrt();
        }
        if m + 2 < d {
            mean_bb += r[(m + 2, m)] * (((m + 1) * (m + 2)) as f64).sqrt();
        }
    }
    let mean_x = 2.0 * mean_b.re;
    let x_variance = 2.0 * mean_bb.re + 2.0 * mean_n + 1.0 - mean_x * mean_x;
    let purity = r.iter().map(|c| c.norm_sqr()).sum();
    FockMoments { mean_b, mean_bb, mean_n, x_variance, purity }
}

/// Fourth cumulant `⟨(X − ⟨X⟩)⁴⟩ − 3Var(X)²` of `X = b + b†`; zero for
/// Gaussian states.
pub fn x_fourth_cumulant(rho: &FockDensityMatrix) -> f64 {
    let d = rho.dim();
    let mom = moments(rho);
    let mean_x = 2.0 * mom.mean_b.re;
    let xc = DMatrix::from_fn(d, d, |m, n| {
        let v = if n == m + 1 {
            (n as f64).sqrt()
        } else if m == n + 1 {
            (m as f64).sqrt()
        } else if m == n {
            -mean_x
        } else {
            0.0
        };
        C::new(v, 0.0)
    });
    let x2 = &xc * &xc;
    let x4 = &x2 * &x2;
    let fourth = rho.rho.component_mul(&x4.transpose()).sum().re;
    fourth - 3.0 * mom.x_variance * mom.x_variance
}

/// Gaussian state with the same first and second moments.
pub fn to_gaussian(rho: &FockDensityMatrix) -> Result<GaussianState<f64>> {
    let m = moments(rho);
    let d = m.mean_b;
    let diag = C::new(2.0 * m.mean_n + 1.0 - 2.0 * d.norm_sqr(), 0.0);
    let off = (m.mean_bb - d * d) * 2.0;
    GaussianState::from_parts(
        DVector::from_vec(vec![d, d.conj()]),
        DMatrix::from_row_slice(2, 2, &[diag, off, off.conj(), diag]),
    )
}

/// Smallest dimension accepted for a squeezed vacuum of strength `r`.
pub fn squeezed_min_dim(r: f64) -> usize {
    (10.0 + 8.0 * (2.0 * r).exp()).ceil() as usize
}

/// `exp(G)v` for `G = p·b†² + q·b² + u·b† + w·b`, by scaled Taylor steps.
fn expm_quadratic(v: &DVector<C>, p: C, q: C, u: C, w: C) -> DVector<C> {
    let d = v.len();
    let sq = sqrt_table(d);
    let apply = |x: &DVector<C>| {
        DVector::from_fn(d, |m, _| {
            let mut acc = C::new(0.0, 0.0);
            if m >= 2 {
                acc += p * sq[m] * sq[m - 1] * x[m - 2];
            }
            if m + 2 < d {
                acc += q * sq[m + 1] * sq[m + 2] * x[m + 2];
            }
            if m >= 1 {
                acc += u * sq[m] * x[m - 1];
            }
            if m + 1 < d {
                acc += w * sq[m + 1] * x[m + 1];
            }
            acc
        })
    };
    let n = d as f64;
    let bound = (p.norm() + q.norm()) * n + (u.norm() + w.norm()) * n.sqrt();
    let steps = bound.ceil().max(1.0) as usize;
    let mut out = v.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut sum = out.clone();
        for k in 1..200 {
            term = apply(&term) / C::new((steps * k) as f64, 0.0);
            sum += &term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        out = sum;
    }
    out
}

/// Working dimension for building a state that is then cropped to `dim`.
fn padded(dim: usize) -> usize {
    2 * dim
}

fn crop(v: DVector<C>, dim: usize) -> DVector<C> {
    v.rows(0, dim).into_owned()
}

/// `S(ζ)|0⟩` with `ζ = r e^{2iθ}`, `S(ζ) = exp((ζ*b² − ζb†²)/2)`.
pub fn fock_squeezed_state(r: f64, theta: f64, dim: usize) -> Result<FockDensityMatrix> {
    FockDensityMatrix::pure(&squeezed_vector(r, theta, dim)?)
}

fn squeezed_vector(r: f64, theta: f64, dim: usize) -> Result<DVector<C>> {
    check_squeeze(r, theta, dim)?;
    Ok(crop(squeezed_padded(r, theta, padded(dim)), dim))
}

fn check_squeeze(r: f64, theta: f64, dim: usize) -> Result<()> {
    if !(r.is_finite() && theta.is_finite()) || r < 0.0 {
        return Err(Error::invalid("squeezing needs finite r >= 0"));
    }
    if dim < MIN_DIM {
        return Err(Error::invalid(format!("Fock truncation dim = {dim} is below {MIN_DIM}")));
    }
    if r > 0.0 && dim < squeezed_min_dim(r) {
        log::warn!("squeezing r = {r} needs dim >= {}", squeezed_min_dim(r));
        return Err(Error::Truncation { tail: f64::NAN, dim });
    }
    Ok(())
}

fn squeezed_padded(r: f64, theta: f64, work: usize) -> DVector<C> {
    let mut vac = DVector::zeros(work);
    vac[0] = C::new(1.0, 0.0);
    let zeta = C::from_polar(r, 2.0 * theta);
    let zero = C::new(0.0, 0.0);
    expm_quadratic(&vac, -zeta * 0.5, zeta.conj() * 0.5, zero, zero)
}

/// Initial states for oracle runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FockInitial {
    Vacuum,
    Number(usize),
    Coherent(C),
    Thermal(f64),
    Squeezed { r: f64, theta: f64 },
    /// `D(μ)S(ζ)|0⟩`.
    DisplacedSqueezed { r: f64, theta: f64, mu: C },
}

impl FockInitial {
    pub fn min_dim(&self) -> usize {
        match *self {
            FockInitial::Squeezed { r, .. } | FockInitial::DisplacedSqueezed { r, .. } if r > 0.0 => squeezed_min_dim(r),
            FockInitial::Number(n) => n + TAIL_LEVELS + 1,
            _ => MIN_DIM,
        }
    }

    pub fn build(&self, dim: usize) -> Result<FockDensityMatrix> {
        match *self {
            FockInitial::Vacuum => FockDensityMatrix::vacuum(dim),
            FockInitial::Number(n) => FockDensityMatrix::number(n, dim),
            FockInitial::Coherent(mu) => FockDensityMatrix::coherent(mu, dim),
            FockInitial::Thermal(nbar) => FockDensityMatrix::thermal(nbar, dim),
            FockInitial::Squeezed { r, theta } => fock_squeezed_state(r, theta, dim),
            FockInitial::DisplacedSqueezed { r, theta, mu } => {
                check_squeeze(r, theta, dim)?;
                let work = padded(dim);
                let zero = C::new(0.0, 0.0);
                let psi = expm_quadratic(&squeezed_padded(r, theta, work), zero, zero, mu, -mu.conj());
                FockDensityMatrix::pure(&crop(psi, dim))
            }
        }
    }

    /// The Gaussian counterpart, when there is one.
    pub fn gaussian(&self) -> Option<GaussianState<f64>> {
        let vac = vacuum_state::<f64>(1).ok()?;
        match *self {
            FockInitial::Vacuum => Some(vac),
            FockInitial::Number(_) => None,
            FockInitial::Coherent(mu) => displace(&vac, 0, mu).ok(),
            FockInitial::Thermal(nbar) => GaussianState::from_parts(
                DVector::zeros(2),
                DMatrix::identity(2, 2) * C::new(2.0 * nbar + 1.0, 0.0),
            )
            .ok(),
            FockInitial::Squeezed { r, theta } => apply_unitary(&vac, &squeeze_matrix(r, theta).ok()?).ok(),
            FockInitial::DisplacedSqueezed { r, theta, mu } => {
                displace(&apply_unitary(&vac, &squeeze_matrix(r, theta).ok()?).ok()?, 0, mu).ok()
            }
        }
    }
}

/// Evolves `initial` under `gen` (whose `dim` is ignored) for time `t`,
/// starting at the smallest of [`ORACLE_DIMS`] that fits the initial state and
/// doubling on truncation errors.
pub fn oracle_evolve(initial: &FockInitial, gen: &LindbladGenerator, t: f64) -> Result<FockDensityMatrix> {
    let mut last = None;
    for &dim in ORACLE_DIMS.iter().filter(|&&d| d >= initial.min_dim()) {
        let g = gen.with_dim(dim)?;
        let run = initial.build(dim).and_then(|rho| evolve_rho(&rho, &g, t, g.max_step().min(t.max(1e-300))));
        match run {
            Err(e @ Error::Truncation { .. }) => {
                log::debug!("oracle truncation at dim {dim}: {e}");
                last = Some(e);
            }
            other => return other,
        }
    }
    Err(last.unwrap_or(Error::Truncation { tail: f64::NAN, dim: ORACLE_DIMS[ORACLE_DIMS.len() - 1] }))
}
