use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::panic;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use phonon_core::condensate::{harmonic_wavenumber, ModeSpec, Species};
use phonon_core::dynamics::{
    continuous_squeezing_sigma, evolve_general_auto, evolve_rwa, BilinearHamiltonian, ModeCoupling, ModeRates,
    RateMatrices,
};
use phonon_core::fock::{build_generator, oracle_evolve, to_gaussian, FockInitial};
use phonon_core::gaussian::{
    apply_unitary, covariance_determinant, displace, eigen_spectrum, purity, quadrature_variance, rotation_matrix,
    squeeze_matrix, vacuum_state, GaussianState,
};
use phonon_core::metrology::{
    qfi_continuous_squeezing, qfi_displacement, qfi_finite_difference, qfi_rotation, qfi_squeezing, DisplacementMode,
};
use phonon_core::rates::{beliaev_rate_zero_t, damping_budget, DEFAULT_QUAD_TOL};
use phonon_core::scenarios::{crossover_harmonic, scenario_damping_curves, scenario_gravity, scenario_rates, ScenarioConfig};
use phonon_core::{Complex64 as C, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Pass/fail of one sub-check with a short description.
struct Check {
    ok: bool,
    text: String,
}

fn check(ok: bool, text: impl Into<String>) -> Check {
    Check { ok, text: text.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn squeezed(r: f64) -> GaussianState<f64> {
    apply_unitary(&vacuum_state(1).unwrap(), &squeeze_matrix(r, 0.0).unwrap()).unwrap()
}

fn single_rates(gm: f64, gp: f64) -> RateMatrices<f64> {
    RateMatrices::new(vec![ModeRates::new(gm, gp).unwrap()]).unwrap()
}

fn rates_table() -> Vec<Check> {
    let rows = scenario_rates(&[
        (Species::Rb87, 1e14),
        (Species::Yb168, 1e14),
        (Species::Rb87, 1e13),
        (Species::Yb168, 1e13),
    ])
    .unwrap();
    let exact = |g: f64, d: f64, rho: f64| (g - 3.0 * d * rho * rho).abs() <= 1e-12 * g;
    let one_fig = |g: f64, quoted: f64| {
        let mag = 10f64.powf(quoted.log10().floor());
        ((g / mag).round() * mag - quoted).abs() < 1e-12 * quoted
    };
    let mut out = vec![
        check(
            exact(rows[0].gamma, 5.8e-30, 1e14) && (rows[0].gamma - 0.174).abs() < 1e-12,
            format!("γ(Rb, 1e14) = {:.6}", rows[0].gamma),
        ),
        check(
            exact(rows[1].gamma, 4e-30, 1e14) && (rows[1].gamma - 0.12).abs() < 1e-12,
            format!("γ(Yb, 1e14) = {:.6}", rows[1].gamma),
        ),
        check(one_fig(rows[0].gamma, 0.2) && one_fig(rows[1].gamma, 0.1), "one-figure agreement with 0.2 and 0.1"),
    ];
    for row in &rows[2..] {
        out.push(check(
            (500.0..=1000.0).contains(&row.inverse_gamma),
            format!("1/γ({}, 1e13) = {:.1} s", row.species.name(), row.inverse_gamma),
        ));
    }
    out
}

fn gravity() -> Vec<Check> {
    let res = scenario_gravity(&ScenarioConfig::gravity()).unwrap();
    let mut out = Vec::new();
    for ((&r, &m), quoted) in res.squeezing.iter().zip(&res.detectable_mass_ideal).zip([70.0, 30.0, 1.0]) {
        let grams = m * 1e3;
        let closed = 200.0 * (-r).exp();
        out.push(check(
            rel(grams, closed) < 1e-12 && rel(grams, quoted) <= 0.15,
            format!("ideal r = {r}: {grams:.3} g vs {quoted} g"),
        ));
    }
    let idx = res.squeezing.iter().position(|&r| r == 5.0).unwrap();
    let dec = res.detectable_mass_decohered[idx] * 1e3;
    out.push(check((25.0..=100.0).contains(&dec), format!("decohered r = 5: {dec:.1} g vs 50 g")));
    let enh = res.enhancement_factor[idx];
    out.push(check((2.5..=5.0).contains(&enh), format!("enhancement {enh:.2}")));
    out
}

fn damping() -> Vec<Check> {
    let config = ScenarioConfig::damping();
    let spec = config.condensate().unwrap();
    let budget = damping_budget(&ModeSpec::harmonic(1, &spec).unwrap(), &spec, DEFAULT_QUAD_TOL).unwrap();
    let mut out = vec![check(
        budget.gamma_landau / 5e-6 <= 2.0 && 5e-6 / budget.gamma_landau <= 2.0,
        format!("Landau n = 1: {:.3e} s⁻¹", budget.gamma_landau),
    )];
    let k1 = harmonic_wavenumber(1, &spec);
    let b1 = beliaev_rate_zero_t(k1, &spec);
    let worst = (2..=30u32)
        .map(|n| rel(beliaev_rate_zero_t(harmonic_wavenumber(n, &spec), &spec) / b1, (n as f64).powi(5)))
        .fold(0.0, f64::max);
    out.push(check(worst < 1e-12, format!("Beliaev T = 0 ∝ n⁵ (worst {worst:.1e})")));
    out.push(check(
        budget.gamma_beliaev / 1e-9 <= 3.0 && 1e-9 / budget.gamma_beliaev <= 3.0,
        format!("Beliaev thermal n = 1: {:.3e} s⁻¹", budget.gamma_beliaev),
    ));
    let ratio = budget.combined.gamma_plus / budget.combined.gamma_minus;
    out.push(check(ratio > 5.0, format!("γ⁺/γ⁻ n = 1: {ratio:.1}")));
    let rows = scenario_damping_curves(&config, 30).unwrap();
    let failed = rows.iter().filter(|r| r.budget.is_err()).count();
    let crossover = crossover_harmonic(&rows).map_or("none".to_string(), |n| n.to_string());
    out.push(check(failed == 0, format!("30 harmonics computed, Beliaev overtakes three-body at n = {crossover}")));
    out
}

fn state_gap(a: &GaussianState<f64>, b: &GaussianState<f64>) -> f64 {
    let s = (a.covariance() - b.covariance()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let d = (a.displacement() - b.displacement()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    s.max(d)
}

fn oracle() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut dims = Vec::new();
    for k in 0..50 {
        let r = rng.gen_range(0.0..1.5);
        let theta = rng.gen_range(-3.0..3.0);
        let mu = C::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(-3.0..3.0));
        let gu: f64 = rng.gen_range(0.0..1.0);
        let gv = rng.gen_range(0.0..gu);
        let omega = rng.gen_range(0.0..2.0);
        let xi = C::from_polar(rng.gen_range(0.0..0.3), rng.gen_range(-3.0..3.0));
        let delta = C::from_polar(rng.gen_range(0.0..0.3), rng.gen_range(-3.0..3.0));
        let t = rng.gen_range(0.0..3.0);
        let init = FockInitial::DisplacedSqueezed { r, theta, mu };
        let mut run = || -> Result<f64> {
            let gen = build_generator(omega, xi, delta, gu, gv, 8)?;
            let rho = oracle_evolve(&init, &gen, t)?;
            rho.validate()?;
            dims.push(rho.dim());
            let rates = RateMatrices::new(vec![ModeRates::new(gu - gv, gu + gv)?])?;
            let h = BilinearHamiltonian::single(omega, xi, delta);
            let gs = evolve_general_auto(&init.gaussian().unwrap(), &h, &rates, t)?;
            Ok(state_gap(&to_gaussian(&rho)?, &gs))
        };
        match run() {
            Ok(e) => {
                worst = worst.max(e);
                if e >= 1e-5 {
                    failures.push(format!("draw {k}: {e:.2e}"));
                }
            }
            Err(e) => failures.push(format!("draw {k}: {e}")),
        }
    }
    let largest = dims.iter().max().copied().unwrap_or(0);
    vec![check(
        failures.is_empty(),
        format!(
            "50 draws, worst moment error {worst:.2e}, largest dim {largest}{}",
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join(", ")) }
        ),
    )]
}

fn decohered(r: f64, gm: f64, gp: f64, t: f64) -> GaussianState<f64> {
    evolve_rwa(&squeezed(r), &single_rates(gm, gp), t).unwrap()
}

fn qfi() -> Vec<Check> {
    let mut worst_identity: f64 = 0.0;
    for k in 0..=290 {
        let r = 0.1 + 0.01 * k as f64;
        let (lm, lp) = eigen_spectrum(&squeezed(r), 0).unwrap();
        let n = r.sinh().powi(2);
        worst_identity = worst_identity.max(rel(qfi_rotation(lm, lp).unwrap().qfi, 8.0 * n * (n + 1.0)));
    }

    let mut worst_fd: f64 = 0.0;
    let mut track = |fd: f64, closed: f64| worst_fd = worst_fd.max(rel(fd, closed));
    for (r, gm, gp, t) in [(0.5, 0.2, 0.3, 1.0), (1.0, 0.1, 0.1, 0.5), (1.5, 0.05, 0.2, 2.0), (2.0, 0.3, 0.3, 0.2)] {
        let st = decohered(r, gm, gp, t);
        let (lm, lp) = eigen_spectrum(&st, 0).unwrap();
        let amp = |th: f64| displace(&st, 0, C::new(th, 0.0));
        track(
            qfi_finite_difference(amp, 0.0, None).unwrap().qfi,
            qfi_displacement(lm, 0.0, DisplacementMode::Amplitude).unwrap().qfi,
        );
        let phase = |th: f64| displace(&st, 0, C::from_polar(1.3, FRAC_PI_2 + th));
        track(
            qfi_finite_difference(phase, 0.0, None).unwrap().qfi,
            qfi_displacement(lm, 1.3, DisplacementMode::Phase).unwrap().qfi,
        );
        let rot = |th: f64| apply_unitary(&st, &rotation_matrix(th)?);
        track(qfi_finite_difference(rot, 0.0, None).unwrap().qfi, qfi_rotation(lm, lp).unwrap().qfi);
        for phi in [0.0, 0.3, FRAC_PI_4, 1.2] {
            let sq = |s: f64| apply_unitary(&st, &squeeze_matrix(s, phi)?);
            track(qfi_finite_difference(sq, 0.0, None).unwrap().qfi, qfi_squeezing(lm, lp, phi).unwrap().qfi);
        }
        let (dur, phi) = (1.7, 0.6);
        let cont = |xi: f64| apply_unitary(&st, &squeeze_matrix(xi * dur, phi)?);
        track(
            qfi_finite_difference(cont, 0.0, None).unwrap().qfi,
            qfi_continuous_squeezing(lm, lp, phi, dur).unwrap().qfi,
        );
    }
    for (r, t, phi) in [(0.5, 1.0, 0.2), (1.0, 2.5, FRAC_PI_4), (1.8, 0.7, 1.0)] {
        let fam = |xi: f64| -> Result<GaussianState<f64>> {
            let block = continuous_squeezing_sigma(r, xi, phi, &ModeRates::zero(), t)?;
            GaussianState::from_parts(DVector::zeros(2), DMatrix::from_fn(2, 2, |i, j| block[(i, j)]))
        };
        let closed = qfi_continuous_squeezing((-2.0 * r).exp(), (2.0 * r).exp(), phi, t).unwrap().qfi;
        track(qfi_finite_difference(fam, 0.0, None).unwrap().qfi, closed);
    }

    let mut worst_base: f64 = 0.0;
    for st in [squeezed(1.2), decohered(1.5, 0.05, 0.2, 2.0)] {
        let fam = |th: f64| apply_unitary(&st, &rotation_matrix(th)?);
        let f0 = qfi_finite_difference(fam, 0.0, None).unwrap().qfi;
        for th in [0.7, 2.0] {
            worst_base = worst_base.max(rel(qfi_finite_difference(fam, th, None).unwrap().qfi, f0));
        }
    }
    vec![
        check(worst_identity < 1e-10, format!("pure rotation identity, r ∈ [0.1, 3] (worst {worst_identity:.1e})")),
        check(worst_fd < 1e-4, format!("closed forms vs finite differences on mixed states (worst {worst_fd:.1e})")),
        check(worst_base < 1e-6, format!("rotation base-point independence (worst {worst_base:.1e})")),
    ]
}

fn decoherence() -> Vec<Check> {
    let h = 1e-4;
    let mut worst_slope: f64 = 0.0;
    for (r, gm, gp) in [(0.5, 0.2, 0.3), (1.0, 0.1, 0.5), (2.0, 0.4, 0.4), (3.0, 0.05, 0.9)] {
        let rm = single_rates(gm, gp);
        let st = squeezed(r);
        let l = |t: f64| eigen_spectrum(&evolve_rwa(&st, &rm, t).unwrap(), 0).unwrap().0;
        let slope = (-3.0 * l(0.0) + 4.0 * l(h) - l(2.0 * h)) / (2.0 * h);
        worst_slope = worst_slope.max(rel(slope, gp - (-2.0 * r).exp() * gm));
    }

    let mut worst_purity: f64 = 0.0;
    for r in [1.0f64, 2.0, 3.0] {
        for g in [0.01, 0.1, 1.0] {
            for x in [0.1, 1.0, 4.0] {
                let t = x / ((2.0 * r).exp() * g);
                if g * t > 0.01 {
                    continue;
                }
                let p = purity(&decohered(r, g, g, t)).unwrap();
                worst_purity = worst_purity.max((p * (1.0 + x).sqrt() - 1.0).abs());
            }
        }
    }

    let g = 0.3;
    let mut worst_doubling: f64 = 0.0;
    for x0 in [0.005, 0.01, 0.02, 0.05] {
        let st = squeezed(-0.5 * f64::ln(x0));
        let v = quadrature_variance(&evolve_rwa(&st, &RateMatrices::bare(&[g]).unwrap(), x0 / g).unwrap(), 0).unwrap();
        worst_doubling = worst_doubling.max((v / (2.0 * x0) - 1.0).abs());
    }
    vec![
        check(worst_slope < 1e-4, format!("dλ₋/dt = γ⁺ − e^{{−2r}}γ⁻ (worst {worst_slope:.1e})")),
        check(worst_purity < 0.02, format!("P√(1 + e^{{2r}}γ⁺t) = 1 for γt ≤ 0.01 (worst {worst_purity:.1e})")),
        check(worst_doubling < 0.05, format!("⟨X²⟩(x₀/γ) = 2x₀ for x₀ ≤ 0.05 (worst {worst_doubling:.3})")),
    ]
}

/// Smallest eigenvalue of `Σ + Z`, `Z = diag(1, −1, …)`; non-negative for
/// physical states.
fn uncertainty_margin(st: &GaussianState<f64>) -> f64 {
    let n = st.covariance().nrows();
    let z = DMatrix::from_fn(n, n, |i, j| if i != j { C::new(0.0, 0.0) } else if i % 2 == 0 { C::new(1.0, 0.0) } else { C::new(-1.0, 0.0) });
    (st.covariance() + z).symmetric_eigenvalues().min()
}

fn random_state(rng: &mut ChaCha8Rng, modes: usize) -> GaussianState<f64> {
    let mut st = vacuum_state(modes).unwrap();
    for m in 0..modes {
        let s = squeeze_matrix(rng.gen_range(0.0..1.5), rng.gen_range(-3.0..3.0)).unwrap();
        st = apply_unitary(&st, &s.on_mode(m, modes).unwrap()).unwrap();
        st = displace(&st, m, C::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(-3.0..3.0))).unwrap();
    }
    st
}

fn invariants() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut semigroup, mut herm, mut margin, mut det): (f64, f64, f64, f64) = (0.0, 0.0, f64::INFINITY, f64::INFINITY);
    let mut errors = Vec::new();
    let mut steps = 0;
    while steps < 1000 {
        let modes = rng.gen_range(1..=2);
        let rates: Vec<ModeRates<f64>> = (0..modes)
            .map(|_| {
                let gm = rng.gen_range(0.05..0.5);
                ModeRates::new(gm, gm + rng.gen_range(0.0..0.5)).unwrap()
            })
            .collect();
        let rm = RateMatrices::new(rates.clone()).unwrap();
        let mut h = BilinearHamiltonian::zero(modes);
        for (m, rate) in rates.iter().enumerate() {
            h.omegas[m] = rng.gen_range(0.0..2.0);
            h.squeezings[m] = C::from_polar(rng.gen_range(0.0..0.5) * rate.gamma_minus, rng.gen_range(-3.0..3.0));
            h.drives[m] = C::from_polar(rng.gen_range(0.0..0.3), rng.gen_range(-3.0..3.0));
        }
        if modes == 2 {
            h.couplings.push(ModeCoupling {
                i: 0,
                j: 1,
                hopping: C::from_polar(rng.gen_range(0.0..0.3), rng.gen_range(-3.0..3.0)),
                pair_squeezing: C::from_polar(rng.gen_range(0.0..0.02), rng.gen_range(-3.0..3.0)),
            });
        }
        let rwa_only = rng.gen_bool(0.3);
        let mut st = random_state(&mut rng, modes);
        for _ in 0..50 {
            let dt = rng.gen_range(0.01..0.5);
            let split = rng.gen_range(0.1..0.9) * dt;
            let step = |s: &GaussianState<f64>, t: f64| {
                if rwa_only {
                    evolve_rwa(s, &rm, t)
                } else {
                    evolve_general_auto(s, &h, &rm, t)
                }
            };
            let run = || -> Result<(GaussianState<f64>, f64)> {
                let whole = step(&st, dt)?;
                let parts = step(&step(&st, split)?, dt - split)?;
                let scale = whole.covariance().norm() + whole.displacement().norm();
                Ok((whole.clone(), state_gap(&whole, &parts) / scale))
            };
            match run() {
                Ok((next, gap)) => {
                    semigroup = semigroup.max(gap);
                    herm = herm.max(next.hermiticity_defect());
                    margin = margin.min(uncertainty_margin(&next));
                    det = det.min(covariance_determinant(next.covariance()));
                    if let Err(e) = next.check_positive() {
                        errors.push(e.to_string());
                    }
                    st = next;
                }
                Err(e) => errors.push(e.to_string()),
            }
            steps += 1;
        }
    }
    vec![
        check(errors.is_empty(), format!("{steps} steps, {} errors{}", errors.len(), errors.first().map_or(String::new(), |e| format!(" ({e})")))),
        check(semigroup < 1e-6, format!("semigroup (worst relative {semigroup:.1e})")),
        check(herm < 1e-12, format!("Hermiticity (worst {herm:.1e})")),
        check(margin > -1e-9, format!("Σ + Z ≥ 0 (min eigenvalue {margin:.2e})")),
        check(det >= 1.0 - 1e-9, format!("det Σ ≥ 1 (min {det:.6})")),
    ]
}

fn run(number: usize, name: &str, limit: Duration, f: fn() -> Vec<Check>) -> bool {
    let start = Instant::now();
    let outcome = panic::catch_unwind(f);
    let elapsed = start.elapsed();
    let (ok, lines) = match outcome {
        Ok(checks) => (checks.iter().all(|c| c.ok), checks),
        Err(_) => (false, vec![check(false, "panicked")]),
    };
    let in_time = elapsed <= limit;
    let pass = ok && in_time;
    println!(
        "[{}] {number}. {name} ({:.2} s, limit {} s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    for c in lines {
        println!("    {} {}", if c.ok { "ok  " } else { "FAIL" }, c.text);
    }
    if !in_time {
        println!("    FAIL runtime over limit");
    }
    pass
}

fn main() {
    panic::set_hook(Box::new(|info| eprintln!("{info}")));
    type Criterion = (&'static str, u64, fn() -> Vec<Check>);
    let criteria: [Criterion; 7] = [
        ("rate table", 1, rates_table),
        ("gravity scenario", 1, gravity),
        ("damping curves", 10, damping),
        ("oracle equivalence", 60, oracle),
        ("QFI identities", 5, qfi),
        ("decoherence laws", 5, decoherence),
        ("evolution invariants", 10, invariants),
    ];
    let passed = criteria
        .iter()
        .enumerate()
        .filter(|(i, (name, limit, f))| run(i + 1, name, Duration::from_secs(*limit), *f))
        .count();
    println!("{passed}/{} criteria passed", criteria.len());
}
