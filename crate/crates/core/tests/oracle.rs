use std::f64::consts::FRAC_PI_4;

use phonon_core::dynamics::{
    continuous_squeezing_sigma, evolve_general_auto, evolve_rwa, evolve_squeezed_frame, BilinearHamiltonian, ModeRates,
    RateMatrices, SqueezedFrameState,
};
use phonon_core::fock::{build_generator, moments, oracle_evolve, to_gaussian, x_fourth_cumulant, FockInitial};
use phonon_core::gaussian::{eigen_spectrum, GaussianState};
use phonon_core::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-5;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn gap(a: &GaussianState<f64>, b: &GaussianState<f64>) -> f64 {
    let s = (a.covariance() - b.covariance()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let d = (a.displacement() - b.displacement()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    s.max(d)
}

#[test]
fn random_draws_match_moment_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..12 {
        let r = rng.gen_range(0.0..1.2);
        let theta = rng.gen_range(-3.0..3.0);
        let mu = C::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(-3.0..3.0));
        let gu: f64 = rng.gen_range(0.0..1.0);
        let gv = rng.gen_range(0.0..gu);
        let omega = rng.gen_range(0.0..2.0);
        let xi = C::from_polar(rng.gen_range(0.0..0.3), rng.gen_range(-3.0..3.0));
        let delta = C::from_polar(rng.gen_range(0.0..0.3), rng.gen_range(-3.0..3.0));
        let t = rng.gen_range(0.0..2.0);

        let init = FockInitial::DisplacedSqueezed { r, theta, mu };
        let gen = build_generator(omega, xi, delta, gu, gv, 8).unwrap();
        let rho = oracle_evolve(&init, &gen, t).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-9);
        assert!(rho.hermiticity_defect() < 1e-12);
        assert!(rho.min_eigenvalue() > -1e-9);

        let rates = RateMatrices::new(vec![ModeRates::new(gu - gv, gu + gv).unwrap()]).unwrap();
        let h = BilinearHamiltonian::single(omega, xi, delta);
        let gs = evolve_general_auto(&init.gaussian().unwrap(), &h, &rates, t).unwrap();
        let fg = to_gaussian(&rho).unwrap();
        assert!(gap(&fg, &gs) < TOL, "draw {k}: {:e}", gap(&fg, &gs));

        let var = moments(&rho).x_variance;
        // Truncation of heated states leaves ~1e-5 in the normalised cumulant.
        assert!(x_fourth_cumulant(&rho).abs() / (var * var) < 1e-4, "draw {k} is not Gaussian");
    }
}

#[test]
fn rwa_relaxation_matches_oracle() {
    let init = FockInitial::Squeezed { r: 1.0, theta: 0.0 };
    let (gm, gp, t) = (0.5, 0.7, 1.0);
    let rates = ModeRates::new(gm, gp).unwrap();
    let gen = build_generator(0.0, c(0.0, 0.0), c(0.0, 0.0), rates.gamma_u(), rates.gamma_v(), 8).unwrap();
    let rho = oracle_evolve(&init, &gen, t).unwrap();
    let closed = evolve_rwa(&init.gaussian().unwrap(), &RateMatrices::new(vec![rates]).unwrap(), t).unwrap();
    let fg = to_gaussian(&rho).unwrap();
    assert!(gap(&fg, &closed) < TOL);
    let (lm, _) = eigen_spectrum(&fg, 0).unwrap();
    let (lm_closed, _) = eigen_spectrum(&closed, 0).unwrap();
    assert!((lm - lm_closed).abs() < TOL);
}

#[test]
fn resonant_continuous_squeezing_matches_oracle() {
    let (r, xi, phi, t) = (0.5, 0.1, FRAC_PI_4, 1.0);
    let rates = ModeRates::new(0.2, 0.3).unwrap();
    let block = continuous_squeezing_sigma(r, xi, phi, &rates, t).unwrap();
    // Squeezing rate Ξ with phase φ enters the Hamiltonian as Ξe^{2iφ}.
    let drive = C::from_polar(xi, 2.0 * phi);
    let gen = build_generator(0.0, drive, c(0.0, 0.0), rates.gamma_u(), rates.gamma_v(), 8).unwrap();
    let rho = oracle_evolve(&FockInitial::Squeezed { r, theta: 0.0 }, &gen, t).unwrap();
    let fg = to_gaussian(&rho).unwrap();
    let sigma = fg.covariance();
    for i in 0..2 {
        for j in 0..2 {
            assert!((sigma[(i, j)] - block[(i, j)]).norm() < TOL, "({i},{j}) {} vs {}", sigma[(i, j)], block[(i, j)]);
        }
    }
}

#[test]
fn squeezed_frame_matches_oracle() {
    let (w, xi, g, t) = (0.6, c(0.2, -0.1), 0.4, 1.5);
    let init = FockInitial::DisplacedSqueezed { r: 0.6, theta: 0.4, mu: c(0.3, -0.5) };
    let g0 = init.gaussian().unwrap();
    let sf = SqueezedFrameState::from_gaussian_block(g0.mean(0).unwrap(), &g0.mode_block(0).unwrap(), w, xi, g);
    let out = evolve_squeezed_frame(&sf, t).unwrap();

    let gen = build_generator(w, xi, c(0.0, 0.0), g, 0.0, 8).unwrap();
    let m = moments(&oracle_evolve(&init, &gen, t).unwrap());
    assert!((out.mean - m.mean_b).norm() < TOL);
    assert!((out.mean_aa() - m.mean_bb).norm() < TOL);
    assert!((out.mean_n() - m.mean_n).abs() < TOL);
    assert!((out.x_variance() - m.x_variance).abs() < TOL);
}

#[test]
fn coherent_amplitude_decays() {
    let mu = c(1.2, 0.5);
    let (omega, gu, gv, t) = (0.8, 0.6, 0.2, 1.3);
    let gen = build_generator(omega, c(0.0, 0.0), c(0.0, 0.0), gu, gv, 8).unwrap();
    let m = moments(&oracle_evolve(&FockInitial::Coherent(mu), &gen, t).unwrap());
    let gm = gu - gv;
    let expected = mu * C::new(-gm * t / 2.0, -omega * t).exp();
    assert!((m.mean_b - expected).norm() < TOL);
    // Excess occupation relaxes to γv/γ⁻ at rate γ⁻.
    let n_inf = gv / gm;
    let thermal = n_inf * (1.0 - (-gm * t).exp());
    assert!((m.mean_n - expected.norm_sqr() - thermal).abs() < TOL);
}
