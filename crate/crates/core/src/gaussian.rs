//! Gaussian states of phonon modes and the symplectic operations acting on them.
//!
//! Conventions: for `M` modes the pseudo-vector is
//! `ζ = (b₁, b₁†, …, b_M, b_M†)`. The displacement is `D_I = ⟨ζ_I⟩` and the
//! covariance matrix is
//!
//! ```text
//! Σ_IJ = ⟨ζ_I ζ_J† + ζ_J† ζ_I⟩ − 2 D_I D_J*
//! ```
//!
//! so the ground state has `Σ = 1` and each single-mode block reads
//! `[[2⟨n⟩+1, 2⟨b²⟩], [2⟨b†²⟩, 2⟨n⟩+1]]` (centred moments).

use nalgebra::{DMatrix, DVector, Matrix2, Normed};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{phase, re, Real};

/// Relative Hermiticity tolerance for constructed states.
const HERMITIAN_TOL: f64 = 1e-9;
/// Absolute slack on the per-mode determinant test.
const DET_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState<T: Real> {
    modes: Vec<String>,
    displacement: DVector<Complex<T>>,
    covariance: DMatrix<Complex<T>>,
}

impl<T: Real> GaussianState<T> {
    /// Ground state of `mode_count` modes labelled `0..mode_count`.
    pub fn vacuum(mode_count: usize) -> Result<Self> {
        if mode_count == 0 {
            return Err(Error::invalid("mode_count must be at least 1"));
        }
        let n = 2 * mode_count;
        Ok(Self {
            modes: (0..mode_count).map(|i| i.to_string()).collect(),
            displacement: DVector::zeros(n),
            covariance: DMatrix::identity(n, n),
        })
    }

    /// Builds a state from raw parts, checking dimensions, Hermiticity and the
    /// `(b, b†)` pairing of the displacement.
    pub fn from_parts(
        displacement: DVector<Complex<T>>,
        covariance: DMatrix<Complex<T>>,
    ) -> Result<Self> {
        let n = displacement.len();
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::invalid(format!("displacement length {n} is not a positive even number")));
        }
        if covariance.shape() != (n, n) {
            return Err(Error::invalid(format!(
                "covariance shape {:?} does not match displacement length {n}",
                covariance.shape()
            )));
        }
        let state = Self {
            modes: (0..n / 2).map(|i| i.to_string()).collect(),
            displacement,
            covariance,
        };
        state.check_hermitian()?;
        state.check_pairing()?;
        Ok(state.symmetrized())
    }

    /// Replaces the mode labels.
    pub fn with_labels<S: Into<String>>(mut self, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != self.mode_count() {
            return Err(Error::invalid(format!(
                "{} labels for {} modes",
                labels.len(),
                self.mode_count()
            )));
        }
        self.modes = labels;
        Ok(self)
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.modes
    }

    pub fn displacement(&self) -> &DVector<Complex<T>> {
        &self.displacement
    }

    pub fn covariance(&self) -> &DMatrix<Complex<T>> {
        &self.covariance
    }

    /// `⟨b⟩` of one mode.
    pub fn mean(&self, mode: usize) -> Result<Complex<T>> {
        self.check_mode(mode)?;
        Ok(self.displacement[2 * mode])
    }

    /// The 2×2 covariance block of one mode.
    pub fn mode_block(&self, mode: usize) -> Result<Matrix2<Complex<T>>> {
        self.check_mode(mode)?;
        Ok(self.covariance.fixed_view::<2, 2>(2 * mode, 2 * mode).into_owned())
    }

    /// Mean occupation `⟨b†b⟩` of one mode, displacement included.
    pub fn mean_occupation(&self, mode: usize) -> Result<T> {
        let block = self.mode_block(mode)?;
        let mean = self.displacement[2 * mode];
        let half = T::lit(0.5);
        Ok((block[(0, 0)].re - T::one()) * half + mean.norm_sqr())
    }

    /// Reduced single-mode state.
    pub fn reduced(&self, mode: usize) -> Result<Self> {
        let block = self.mode_block(mode)?;
        Ok(Self {
            modes: vec![self.modes[mode].clone()],
            displacement: DVector::from_vec(vec![self.displacement[2 * mode], self.displacement[2 * mode + 1]]),
            covariance: DMatrix::from_iterator(2, 2, block.iter().copied()),
        })
    }

    pub(crate) fn from_raw(
        modes: Vec<String>,
        displacement: DVector<Complex<T>>,
        covariance: DMatrix<Complex<T>>,
    ) -> Self {
        Self { modes, displacement, covariance }.symmetrized()
    }

    pub(crate) fn into_parts(self) -> (Vec<String>, DVector<Complex<T>>, DMatrix<Complex<T>>) {
        (self.modes, self.displacement, self.covariance)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.mode_count() {
            return Err(Error::invalid(format!(
                "mode {mode} out of range for {} modes",
                self.mode_count()
            )));
        }
        Ok(())
    }

    /// Relative anti-Hermitian part `‖Σ − Σ†‖ / ‖Σ‖`.
    pub fn hermiticity_defect(&self) -> T {
        let skew = &self.covariance - self.covariance.adjoint();
        let norm = self.covariance.norm();
        if norm == T::zero() {
            return T::zero();
        }
        skew.norm() / norm
    }

    fn check_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if !(defect <= T::lit(HERMITIAN_TOL)) {
            return Err(Error::consistency(format!(
                "covariance is not Hermitian (relative defect {:e})",
                defect.as_f64()
            )));
        }
        Ok(())
    }

    fn check_pairing(&self) -> Result<()> {
        let scale = self.displacement.norm().max(T::one());
        for m in 0..self.mode_count() {
            let a = self.displacement[2 * m];
            let b = self.displacement[2 * m + 1];
            if (a.conj() - b).norm() > T::lit(HERMITIAN_TOL) * scale {
                return Err(Error::consistency(format!(
                    "displacement entries of mode {m} are not conjugate pairs"
                )));
            }
        }
        Ok(())
    }

    /// Per-mode positive-definiteness via the 2×2 trace/determinant test.
    pub fn check_positive(&self) -> Result<()> {
        for m in 0..self.mode_count() {
            let block = self.covariance.fixed_view::<2, 2>(2 * m, 2 * m);
            let trace = block[(0, 0)].re + block[(1, 1)].re;
            let det = (block[(0, 0)] * block[(1, 1)] - block[(0, 1)] * block[(1, 0)]).re;
            if !(trace > T::zero()) || !(det > T::lit(DET_TOL)) {
                return Err(Error::consistency(format!(
                    "covariance block of mode {m} is not positive definite (trace {:e}, det {:e})",
                    trace.as_f64(),
                    det.as_f64()
                )));
            }
        }
        Ok(())
    }

    /// `Σ ← (Σ + Σ†)/2` and `D_{2I} ← D_{2I−1}*`.
    fn symmetrized(mut self) -> Self {
        let half = re(T::lit(0.5));
        self.covariance = (&self.covariance + self.covariance.adjoint()) * half;
        for m in 0..self.modes.len() {
            let a = self.displacement[2 * m];
            let b = self.displacement[2 * m + 1];
            let avg = (a + b.conj()) * half;
            self.displacement[2 * m] = avg;
            self.displacement[2 * m + 1] = avg.conj();
        }
        self
    }
}

/// Symplectic representation of a Gaussian unitary, acting as
/// `Σ → S Σ S†`, `D → S D`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix<T: Real> {
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> SymplecticMatrix<T> {
    pub fn identity(mode_count: usize) -> Self {
        let n = 2 * mode_count;
        Self { matrix: DMatrix::identity(n, n) }
    }

    pub fn from_block(block: Matrix2<Complex<T>>) -> Self {
        Self { matrix: DMatrix::from_iterator(2, 2, block.iter().copied()) }
    }

    /// Block-diagonal matrix from per-mode 2×2 blocks.
    pub fn block_diagonal(blocks: &[Matrix2<Complex<T>>]) -> Self {
        let n = 2 * blocks.len();
        let mut matrix = DMatrix::zeros(n, n);
        for (m, block) in blocks.iter().enumerate() {
            matrix.fixed_view_mut::<2, 2>(2 * m, 2 * m).copy_from(block);
        }
        Self { matrix }
    }

    /// Lifts a single-mode operation to mode `mode` of a `mode_count`-mode
    /// system, identity elsewhere.
    pub fn on_mode(&self, mode: usize, mode_count: usize) -> Result<Self> {
        if self.matrix.nrows() != 2 {
            return Err(Error::invalid("only single-mode operations can be lifted"));
        }
        if mode >= mode_count {
            return Err(Error::invalid(format!("mode {mode} out of range for {mode_count} modes")));
        }
        let mut out = Self::identity(mode_count);
        out.matrix.view_mut((2 * mode, 2 * mode), (2, 2)).copy_from(&self.matrix);
        Ok(out)
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn mode_count(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// `self · other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.matrix.shape() != other.matrix.shape() {
            return Err(Error::invalid("symplectic dimension mismatch"));
        }
        Ok(Self { matrix: &self.matrix * &other.matrix })
    }

    /// Determinants of the per-mode diagonal blocks.
    pub fn block_determinants(&self) -> Vec<Complex<T>> {
        (0..self.mode_count())
            .map(|m| {
                let b = self.matrix.fixed_view::<2, 2>(2 * m, 2 * m);
                b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)]
            })
            .collect()
    }
}

fn require_finite<T: Real>(values: &[T], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} must be finite")))
    }
}

pub fn vacuum_state<T: Real>(mode_count: usize) -> Result<GaussianState<T>> {
    GaussianState::vacuum(mode_count)
}

/// Single-mode 2×2 block of the squeeze operator with `ζ = r e^{2iθ}`.
pub fn squeeze_block<T: Real>(r: T, theta: T) -> Matrix2<Complex<T>> {
    let c = re(r.cosh());
    let s = r.sinh();
    let two = T::lit(2.0);
    let upper = -phase(two * theta) * s;
    let lower = -phase(-two * theta) * s;
    Matrix2::new(c, upper, lower, c)
}

/// `[[cosh r, −e^{2iθ} sinh r], [−e^{−2iθ} sinh r, cosh r]]`.
pub fn squeeze_matrix<T: Real>(r: T, theta: T) -> Result<SymplecticMatrix<T>> {
    require_finite(&[r, theta], "squeeze parameters")?;
    Ok(SymplecticMatrix::from_block(squeeze_block(r, theta)))
}

/// `diag(e^{−iθ}, e^{iθ})`, the action of `exp(−iθ b†b)`.
pub fn rotation_matrix<T: Real>(theta: T) -> Result<SymplecticMatrix<T>> {
    require_finite(&[theta], "rotation angle")?;
    Ok(SymplecticMatrix::from_block(rotation_block(theta)))
}

pub fn rotation_block<T: Real>(theta: T) -> Matrix2<Complex<T>> {
    Matrix2::new(phase(-theta), Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero()), phase(theta))
}

pub fn apply_unitary<T: Real>(state: &GaussianState<T>, s: &SymplecticMatrix<T>) -> Result<GaussianState<T>> {
    let n = state.covariance.nrows();
    if s.matrix.shape() != (n, n) {
        return Err(Error::invalid(format!(
            "symplectic matrix {:?} does not act on a {}-mode state",
            s.matrix.shape(),
            state.mode_count()
        )));
    }
    let covariance = &s.matrix * &state.covariance * s.matrix.adjoint();
    let displacement = &s.matrix * &state.displacement;
    Ok(GaussianState::from_raw(state.modes.clone(), displacement, covariance))
}

/// Adds `(μ, μ*)` to the displacement of `mode`.
pub fn displace<T: Real>(state: &GaussianState<T>, mode: usize, mu: Complex<T>) -> Result<GaussianState<T>> {
    state.check_mode(mode)?;
    let mut out = state.clone();
    out.displacement[2 * mode] += mu;
    out.displacement[2 * mode + 1] += mu.conj();
    Ok(out)
}

/// Eigenvalues `(λ₋, λ₊)` of one mode's covariance block.
pub fn eigen_spectrum<T: Real>(state: &GaussianState<T>, mode: usize) -> Result<(T, T)> {
    let block = state.mode_block(mode)?;
    let scale = block.norm();
    let skew = (block - block.adjoint()).norm();
    if skew > T::lit(HERMITIAN_TOL) * scale {
        return Err(Error::consistency(format!(
            "covariance block of mode {mode} is not Hermitian (defect {:e})",
            skew.as_f64()
        )));
    }
    Ok(hermitian_2x2_eigenvalues(&block))
}

/// Closed-form eigenvalues of a Hermitian 2×2 matrix, ascending.
pub fn hermitian_2x2_eigenvalues<T: Real>(m: &Matrix2<Complex<T>>) -> (T, T) {
    let half = T::lit(0.5);
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let off = (m[(0, 1)] + m[(1, 0)].conj()) * re(half);
    let mean = (a + d) * half;
    let gap = ((a - d) * half).hypot(off.norm());
    let upper = mean + gap;
    // det/λ₊ keeps the small eigenvalue accurate for strongly squeezed blocks.
    let det = a * d - off.norm_sqr();
    let lower = if upper > T::zero() { det / upper } else { mean - gap };
    (lower, upper)
}

/// `1/√det Σ`.
pub fn purity<T: Real>(state: &GaussianState<T>) -> Result<T> {
    let det = covariance_determinant(&state.covariance);
    if !(det > T::zero()) {
        return Err(Error::consistency(format!(
            "covariance determinant {:e} is not positive",
            det.as_f64()
        )));
    }
    Ok(T::one() / det.sqrt())
}

/// Real part of `det Σ` (Σ Hermitian, so the imaginary part is rounding).
pub fn covariance_determinant<T: Real>(sigma: &DMatrix<Complex<T>>) -> T {
    if sigma.nrows() == 2 {
        return (sigma[(0, 0)] * sigma[(1, 1)] - sigma[(0, 1)] * sigma[(1, 0)]).re;
    }
    sigma.clone().lu().determinant().re
}

/// Centred variance of the co-rotating quadrature `X = b + b†`:
/// `(Σ₁₁ + Σ₂₂)/2 + Re Σ₁₂`.
pub fn quadrature_variance<T: Real>(state: &GaussianState<T>, mode: usize) -> Result<T> {
    let block = state.mode_block(mode)?;
    Ok((block[(0, 0)].re + block[(1, 1)].re) * T::lit(0.5) + block[(0, 1)].re)
}
