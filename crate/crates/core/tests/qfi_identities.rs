use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use phonon_core::dynamics::{continuous_squeezing_sigma, evolve_rwa, ModeRates, RateMatrices};
use phonon_core::gaussian::{
    apply_unitary, displace, eigen_spectrum, purity, rotation_matrix, squeeze_matrix, vacuum_state, GaussianState,
};
use phonon_core::metrology::{
    qfi_continuous_squeezing, qfi_displacement, qfi_finite_difference, qfi_rotation, qfi_squeezing, DisplacementMode,
};
use phonon_core::{Complex64 as C, Result};
use nalgebra::{DMatrix, DVector};

fn squeezed(r: f64) -> GaussianState<f64> {
    apply_unitary(&vacuum_state(1).unwrap(), &squeeze_matrix(r, 0.0).unwrap()).unwrap()
}

/// Squeezed vacuum after decay and heating; still aligned with the squeezed axis.
fn decohered(r: f64, gm: f64, gp: f64, t: f64) -> GaussianState<f64> {
    let rates = RateMatrices::new(vec![ModeRates::new(gm, gp).unwrap()]).unwrap();
    evolve_rwa(&squeezed(r), &rates, t).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

const CASES: [(f64, f64, f64, f64); 4] = [(0.5, 0.2, 0.3, 1.0), (1.0, 0.1, 0.1, 0.5), (1.5, 0.05, 0.2, 2.0), (2.0, 0.3, 0.3, 0.2)];

#[test]
fn states_are_mixed() {
    for (r, gm, gp, t) in CASES {
        assert!(purity(&decohered(r, gm, gp, t)).unwrap() < 0.99);
    }
}

#[test]
fn displacement_schemes_match_finite_differences() {
    for (r, gm, gp, t) in CASES {
        let st = decohered(r, gm, gp, t);
        let (lm, _) = eigen_spectrum(&st, 0).unwrap();
        let amp = |th: f64| displace(&st, 0, C::new(th, 0.0));
        let fd = qfi_finite_difference(amp, 0.0, None).unwrap().qfi;
        let closed = qfi_displacement(lm, 0.0, DisplacementMode::Amplitude).unwrap().qfi;
        assert!(rel(fd, closed) < 1e-4, "amplitude {fd} vs {closed}");

        let mu = 1.3;
        let phase = |th: f64| displace(&st, 0, C::from_polar(mu, FRAC_PI_2 + th));
        let fd = qfi_finite_difference(phase, 0.0, None).unwrap().qfi;
        let closed = qfi_displacement(lm, mu, DisplacementMode::Phase).unwrap().qfi;
        assert!(rel(fd, closed) < 1e-4, "phase {fd} vs {closed}");
    }
}

#[test]
fn rotation_matches_finite_differences() {
    for (r, gm, gp, t) in CASES {
        let st = decohered(r, gm, gp, t);
        let (lm, lp) = eigen_spectrum(&st, 0).unwrap();
        let fam = |th: f64| apply_unitary(&st, &rotation_matrix(th)?);
        let fd = qfi_finite_difference(fam, 0.0, None).unwrap().qfi;
        let closed = qfi_rotation(lm, lp).unwrap().qfi;
        assert!(rel(fd, closed) < 1e-4, "{fd} vs {closed}");
    }
}

#[test]
fn squeezing_matches_finite_differences() {
    for (r, gm, gp, t) in CASES {
        let st = decohered(r, gm, gp, t);
        let (lm, lp) = eigen_spectrum(&st, 0).unwrap();
        for phi in [0.0, 0.3, FRAC_PI_4, 1.2] {
            let fam = |s: f64| apply_unitary(&st, &squeeze_matrix(s, phi)?);
            let fd = qfi_finite_difference(fam, 0.0, None).unwrap().qfi;
            let closed = qfi_squeezing(lm, lp, phi).unwrap().qfi;
            assert!(rel(fd, closed) < 1e-4, "φ = {phi}: {fd} vs {closed}");
        }
    }
}

#[test]
fn continuous_squeezing_matches_finite_differences() {
    let zero = ModeRates::zero();
    for (r, t) in [(0.5, 1.0), (1.0, 2.5), (1.8, 0.7)] {
        for phi in [0.2, FRAC_PI_4, 1.0] {
            let fam = |xi: f64| -> Result<GaussianState<f64>> {
                let block = continuous_squeezing_sigma(r, xi, phi, &zero, t)?;
                GaussianState::from_parts(DVector::zeros(2), DMatrix::from_fn(2, 2, |i, j| block[(i, j)]))
            };
            let fd = qfi_finite_difference(fam, 0.0, None).unwrap().qfi;
            let (lm, lp) = ((-2.0 * r).exp(), (2.0 * r).exp());
            let closed = qfi_continuous_squeezing(lm, lp, phi, t).unwrap().qfi;
            assert!(rel(fd, closed) < 1e-4, "r = {r}, φ = {phi}: {fd} vs {closed}");
        }
    }
}

#[test]
fn continuous_squeezing_of_mixed_state() {
    // With the rate switched off during the drive, the mixed input just gets S(Ξt).
    let (r, gm, gp, t0) = CASES[2];
    let st = decohered(r, gm, gp, t0);
    let (lm, lp) = eigen_spectrum(&st, 0).unwrap();
    let t = 1.7;
    let phi = 0.6;
    let fam = |xi: f64| apply_unitary(&st, &squeeze_matrix(xi * t, phi)?);
    let fd = qfi_finite_difference(fam, 0.0, None).unwrap().qfi;
    let closed = qfi_continuous_squeezing(lm, lp, phi, t).unwrap().qfi;
    assert!(rel(fd, closed) < 1e-4, "{fd} vs {closed}");
}

#[test]
fn rotation_is_base_point_independent() {
    for st in [squeezed(1.2), decohered(1.5, 0.05, 0.2, 2.0)] {
        let fam = |th: f64| apply_unitary(&st, &rotation_matrix(th)?);
        let f0 = qfi_finite_difference(fam, 0.0, None).unwrap().qfi;
        for th in [0.7, 2.0] {
            let f = qfi_finite_difference(fam, th, None).unwrap().qfi;
            assert!(rel(f, f0) < 1e-6, "θ = {th}: {f} vs {f0}");
        }
    }
}

#[test]
fn pure_rotation_identity() {
    for k in 0..=29 {
        let r = 0.1 + 0.1 * k as f64;
        let (lm, lp) = eigen_spectrum(&squeezed(r), 0).unwrap();
        let n = r.sinh().powi(2);
        let f = qfi_rotation(lm, lp).unwrap().qfi;
        assert!(rel(f, 8.0 * n * (n + 1.0)) < 1e-10, "r = {r}");
    }
}
