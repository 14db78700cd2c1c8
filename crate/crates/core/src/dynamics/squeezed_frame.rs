//! Moments of a mode seen in a squeezed frame, where it has frequency `ω̃`,
//! residual squeezing `Ξ̃` and pure decay `γ`.
//!
//! The raw second moments `w = (⟨a²⟩, ⟨a†a⟩, ⟨a²⟩*)` obey `ẇ + M w = s` with
//!
//! ```text
//! M = [[γ + 2iω̃, 2Ξ̃, 0], [Ξ̃*, γ, Ξ̃], [0, 2Ξ̃*, γ − 2iω̃]],   s = −(Ξ̃, 0, Ξ̃*)
//! ```
//!
//! and the mean obeys `d⟨a⟩/dt = −(iω̃ + γ/2)⟨a⟩ − Ξ̃⟨a⟩*`.

use nalgebra::{ComplexField, Matrix2, Matrix3, Normed, Vector2, Vector3};
use num_complex::Complex;

use super::check_time;
use crate::error::{Error, Result};
use crate::scalar::{cplx, re, Real};

/// Eigenvector condition number above which the eigen-decomposition is
/// abandoned for scaling and squaring.
const CONDITION_LIMIT: f64 = 1e8;

#[derive(Debug, Clone, PartialEq)]
pub struct SqueezedFrameMatrix<T: Real> {
    pub m: Matrix3<Complex<T>>,
    /// `(γ, γ + 2√(|Ξ̃|² − ω̃²), γ − 2√(|Ξ̃|² − ω̃²))`.
    pub eigenvalues: [Complex<T>; 3],
    /// Some eigenvalue has a negative real part, so moments grow.
    pub unstable: bool,
}

pub fn squeezed_frame_matrix<T: Real>(omega_tilde: T, xi_tilde: Complex<T>, gamma: T) -> Result<SqueezedFrameMatrix<T>> {
    let finite = omega_tilde.is_finite() && gamma.is_finite() && xi_tilde.re.is_finite() && xi_tilde.im.is_finite();
    if !finite {
        return Err(Error::invalid("squeezed-frame parameters must be finite"));
    }
    let two = T::lit(2.0);
    let iw = cplx(T::zero(), two * omega_tilde);
    let g = re(gamma);
    let zero = re(T::zero());
    let m = Matrix3::new(
        g + iw, xi_tilde * re(two), zero,
        xi_tilde.conj(), g, xi_tilde,
        zero, xi_tilde.conj() * re(two), g - iw,
    );
    let root = re(xi_tilde.norm_sqr() - omega_tilde * omega_tilde).sqrt() * re(two);
    let eigenvalues = [g, g + root, g - root];
    let unstable = eigenvalues.iter().any(|z| z.re < T::zero());
    Ok(SqueezedFrameMatrix { m, eigenvalues, unstable })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqueezedFrameState<T: Real> {
    /// `(⟨a²⟩, ⟨a†a⟩, ⟨a²⟩*)`, raw moments.
    pub w: Vector3<Complex<T>>,
    /// `⟨a⟩`.
    pub mean: Complex<T>,
    pub omega_tilde: T,
    pub xi_tilde: Complex<T>,
    pub gamma: T,
}

impl<T: Real> SqueezedFrameState<T> {
    pub fn new(
        mean_aa: Complex<T>,
        mean_n: T,
        mean: Complex<T>,
        omega_tilde: T,
        xi_tilde: Complex<T>,
        gamma: T,
    ) -> Self {
        Self { w: Vector3::new(mean_aa, re(mean_n), mean_aa.conj()), mean, omega_tilde, xi_tilde, gamma }
    }

    /// Raw moments of a Gaussian state with displacement `⟨a⟩` and covariance
    /// block `[[A, B], [B*, A]]`.
    pub fn from_gaussian_block(
        mean: Complex<T>,
        block: &Matrix2<Complex<T>>,
        omega_tilde: T,
        xi_tilde: Complex<T>,
        gamma: T,
    ) -> Self {
        let half = T::lit(0.5);
        let n = (block[(0, 0)].re - T::one()) * half + mean.norm_sqr();
        let aa = block[(0, 1)] * re(half) + mean * mean;
        Self::new(aa, n, mean, omega_tilde, xi_tilde, gamma)
    }

    pub fn mean_n(&self) -> T {
        self.w[1].re
    }

    pub fn mean_aa(&self) -> Complex<T> {
        self.w[0]
    }

    /// Relative mismatch between the first and (conjugated) third component.
    pub fn conjugacy_defect(&self) -> T {
        let scale = self.w.norm().max(T::one());
        (self.w[0] - self.w[2].conj()).norm() / scale
    }

    /// Centred variance of `X = a + a†`.
    pub fn x_variance(&self) -> T {
        let two = T::lit(2.0);
        let x_mean = self.mean.re * two;
        self.w[0].re + self.w[2].re + two * self.w[1].re + T::one() - x_mean * x_mean
    }
}

/// `w(t) = w_ss + e^{−Mt}(w₀ − w_ss)` with `M w_ss = s`; singular `M` is
/// integrated by RK4 instead.
pub fn evolve_squeezed_frame<T: Real>(sf: &SqueezedFrameState<T>, t: T) -> Result<SqueezedFrameState<T>> {
    check_time(t)?;
    let sys = squeezed_frame_matrix(sf.omega_tilde, sf.xi_tilde, sf.gamma)?;
    let m = sys.m;
    let xi = sf.xi_tilde;
    let source = Vector3::new(-xi, re(T::zero()), -xi.conj());

    let scale = m.norm().max(T::eps());
    let det = m.determinant();
    let w = if det.norm() > scale.powi(3) * T::lit(1e-12) {
        let w_ss = m.lu().solve(&source).ok_or_else(|| Error::consistency("squeezed-frame steady state"))?;
        let prop = propagator(&m, &sys.eigenvalues, t);
        w_ss + prop * (sf.w - w_ss)
    } else {
        step_rk4(&m, &source, &sf.w, t)
    };

    let half = T::lit(0.5);
    let n_mat = Matrix2::new(
        re(sf.gamma * half) + cplx(T::zero(), sf.omega_tilde),
        xi,
        xi.conj(),
        re(sf.gamma * half) - cplx(T::zero(), sf.omega_tilde),
    );
    let mean_vec = (n_mat * re(-t)).exp() * Vector2::new(sf.mean, sf.mean.conj());
    let mean = (mean_vec[0] + mean_vec[1].conj()) * re(half);

    let finite = w.iter().all(|z| z.re.is_finite() && z.im.is_finite()) && mean.re.is_finite() && mean.im.is_finite();
    if !finite {
        let growth = sys.eigenvalues.iter().fold(T::zero(), |acc, z| acc.max(-z.re));
        return Err(Error::Instability {
            growth_rate: growth.as_f64(),
            message: "squeezed-frame moments overflowed".into(),
        });
    }
    // Restore the exact conjugate pairing and a real occupation.
    let aa = (w[0] + w[2].conj()) * re(half);
    let mut out = sf.clone();
    out.w = Vector3::new(aa, re(w[1].re), aa.conj());
    out.mean = mean;
    Ok(out)
}

/// `e^{−Mt}` via eigenvectors built from the closed-form eigenvalues; falls
/// back to nalgebra's scaling-and-squaring exponential when the eigenbasis is
/// ill-conditioned (including the defective `|Ξ̃| = |ω̃|` case).
fn propagator<T: Real>(m: &Matrix3<Complex<T>>, eigenvalues: &[Complex<T>; 3], t: T) -> Matrix3<Complex<T>> {
    if let Some(p) = eigen_propagator(m, eigenvalues, t) {
        return p;
    }
    (m * re(-t)).exp()
}

fn eigen_propagator<T: Real>(m: &Matrix3<Complex<T>>, eigenvalues: &[Complex<T>; 3], t: T) -> Option<Matrix3<Complex<T>>> {
    let mut v = Matrix3::zeros();
    for (col, &lambda) in eigenvalues.iter().enumerate() {
        let shifted = m - Matrix3::identity() * lambda;
        let rows = [shifted.row(0).transpose(), shifted.row(1).transpose(), shifted.row(2).transpose()];
        let mut best = Vector3::zeros();
        let mut best_norm = T::zero();
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let c = rows[a].cross(&rows[b]);
            let n = c.norm();
            if n > best_norm {
                best_norm = n;
                best = c;
            }
        }
        if !(best_norm > T::zero()) {
            return None;
        }
        v.set_column(col, &(best / re(best_norm)));
    }
    let v_inv = v.try_inverse()?;
    let cond = v.norm() * v_inv.norm();
    if !(cond < T::lit(CONDITION_LIMIT)) {
        return None;
    }
    let diag = Matrix3::from_diagonal(&Vector3::from_iterator(eigenvalues.iter().map(|&l| (l * re(-t)).exp())));
    let p = v * diag * v_inv;
    // Guard against eigenvalue/eigenvector mismatch from rounding.
    let residual = (m * v - v * Matrix3::from_diagonal(&Vector3::from_iterator(eigenvalues.iter().copied()))).norm();
    if residual > T::lit(1e-9) * m.norm().max(T::one()) {
        return None;
    }
    Some(p)
}

fn step_rk4<T: Real>(m: &Matrix3<Complex<T>>, s: &Vector3<Complex<T>>, w0: &Vector3<Complex<T>>, t: T) -> Vector3<Complex<T>> {
    if t == T::zero() {
        return *w0;
    }
    let rate = m.norm().max(T::eps());
    let steps = (t * rate / T::lit(0.01)).ceil().to_usize().unwrap_or(1).clamp(1000, 10_000_000);
    let h = t / T::from_usize(steps).expect("step count fits the scalar type");
    let f = |w: &Vector3<Complex<T>>| s - m * w;
    let (hh, hf, h6) = (re(h * T::lit(0.5)), re(h), re(h / T::lit(6.0)));
    let two = re(T::lit(2.0));
    let mut w = *w0;
    for _ in 0..steps {
        let k1 = f(&w);
        let k2 = f(&(w + k1 * hh));
        let k3 = f(&(w + k2 * hh));
        let k4 = f(&(w + k3 * hf));
        w += (k1 + k2 * two + k3 * two + k4) * h6;
    }
    w
}
