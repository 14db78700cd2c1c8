//! `phonon-metrology` command line: rate tables, covariance evolution,
//! scheme QFIs and the damping/gravity scenarios.
//!
//! Exit codes: 0 on success, 2 for usage and configuration errors, 3 for
//! numerical failures.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use phonon_core::condensate::{ModeSpec, Species};
use phonon_core::dynamics::{
    continuous_squeezing_sigma, evolve_general_auto, evolve_rwa, BilinearHamiltonian, ModeRates, RateMatrices,
};
use phonon_core::gaussian::{
    apply_unitary, eigen_spectrum, hermitian_2x2_eigenvalues, purity, quadrature_variance, squeeze_matrix,
    vacuum_state, GaussianState,
};
use phonon_core::metrology::{
    qfi_continuous_squeezing, qfi_displacement, qfi_rotation, qfi_squeezing, DisplacementMode, SchemeResult,
};
use phonon_core::rates::{damping_budget, DEFAULT_QUAD_TOL};
use phonon_core::scenarios::{
    crossover_harmonic, format_float, parse_species, scenario_damping_curves, scenario_gravity, scenario_rates,
    write_damping_csv, write_gravity_csv, write_rates_csv, ScenarioConfig,
};
use phonon_core::{Complex64, Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "phonon-metrology", version, about = "Decoherence and sensing estimates for BEC phonon modes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Shared {
    /// key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Three-body loss rate γ = 3Dρ².
    ///
    /// CSV columns: species, density_cm3, gamma (s⁻¹), inverse_gamma (s).
    Rates(RatesArgs),
    /// Covariance of a squeezed vacuum under decay, noise and optional
    /// continuous squeezing.
    ///
    /// CSV columns: t, x_variance, lambda_minus, lambda_plus, mean_n, purity.
    Evolve(EvolveArgs),
    /// Quantum Fisher information and Cramér–Rao bound of one sensing scheme
    /// after decoherence time t.
    Qfi(QfiArgs),
    /// Reproduction scenarios.
    #[command(subcommand)]
    Scenario(ScenarioCommand),
}

#[derive(Debug, Args)]
struct RatesArgs {
    #[command(flatten)]
    shared: Shared,
    /// rb, yb or custom (custom needs mass, scattering_length, three_body in --config)
    #[arg(long)]
    species: Option<String>,
    /// Density in cm⁻³; repeat for several rows
    #[arg(long)]
    density: Vec<f64>,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[command(flatten)]
    shared: Shared,
    /// Initial squeezing parameter
    #[arg(long, default_value_t = 0.0)]
    r: f64,
    /// Initial squeezing angle (rad)
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Decay constant γ⁻ (s⁻¹); with --gamma-plus, overrides the configured mode
    #[arg(long)]
    gamma_minus: Option<f64>,
    /// Noise constant γ⁺ (s⁻¹)
    #[arg(long)]
    gamma_plus: Option<f64>,
    /// Mode frequency in the co-rotating frame (rad s⁻¹)
    #[arg(long, default_value_t = 0.0)]
    omega: f64,
    /// Continuous squeezing rate Ξ (s⁻¹)
    #[arg(long, default_value_t = 0.0)]
    xi: f64,
    /// Continuous squeezing phase φ (rad)
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    /// Final time (s)
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Number of output intervals
    #[arg(long, default_value_t = 10)]
    steps: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SchemeArg {
    DisplacementAmplitude,
    DisplacementPhase,
    Rotation,
    Squeezing,
    ContinuousSqueezing,
}

#[derive(Debug, Args)]
struct QfiArgs {
    #[command(flatten)]
    shared: Shared,
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    /// Squeezing parameter of the probe state
    #[arg(long, default_value_t = 0.0)]
    r: f64,
    /// Noise constant γ⁺ (s⁻¹)
    #[arg(long, default_value_t = 0.0)]
    gamma_plus: f64,
    /// Decay constant γ⁻ (s⁻¹); defaults to γ⁺
    #[arg(long)]
    gamma_minus: Option<f64>,
    /// Decoherence (or squeezing) time (s)
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    /// Squeezing angle φ for the squeezing schemes (default π/4)
    #[arg(long)]
    phi: Option<f64>,
    /// Displacement amplitude for phase estimation
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Continuous squeezing rate Ξ (s⁻¹)
    #[arg(long, default_value_t = 0.0)]
    xi: f64,
}

#[derive(Debug, Subcommand)]
enum ScenarioCommand {
    /// Detectable source mass with and without decoherence.
    ///
    /// CSV columns: r, mass_ideal_kg, mass_decohered_kg, enhancement, gamma_plus.
    Gravity {
        #[command(flatten)]
        shared: Shared,
    },
    /// Per-harmonic damping constants.
    ///
    /// CSV columns: n, gamma_minus, gamma_plus, gamma_3b, gamma_landau,
    /// gamma_beliaev, status ("ok" or the row's error).
    Damping {
        #[command(flatten)]
        shared: Shared,
        /// Highest harmonic
        #[arg(long, default_value_t = 30)]
        nmax: u32,
    },
}

/// Runs the command line and returns the process exit code.
pub fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match run(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_CONFIG
            }
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Rates(a) => rates(a, out),
        Command::Evolve(a) => evolve(a, out),
        Command::Qfi(a) => qfi(a, out),
        Command::Scenario(ScenarioCommand::Gravity { shared }) => {
            let cfg = load_config(&shared, ScenarioConfig::gravity())?;
            let result = scenario_gravity(&cfg)?;
            log::info!("gravity: γ_3b = {:e} s⁻¹, γ⁺ = {:e} s⁻¹", result.gamma_3b, result.gamma_plus_mode);
            with_output(&shared, &cfg, out, |w| write_gravity_csv(&result, w))
        }
        Command::Scenario(ScenarioCommand::Damping { shared, nmax }) => {
            let cfg = load_config(&shared, ScenarioConfig::damping())?;
            let rows = scenario_damping_curves(&cfg, nmax)?;
            match crossover_harmonic(&rows) {
                Some(n) => log::info!("Beliaev damping overtakes three-body loss at n = {n}"),
                None => log::info!("no Beliaev/three-body crossover up to n = {nmax}"),
            }
            with_output(&shared, &cfg, out, |w| write_damping_csv(&rows, w))
        }
    }
}

fn load_config(shared: &Shared, base: ScenarioConfig) -> Result<ScenarioConfig> {
    match &shared.config {
        None => Ok(base),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            base.parse_onto(&text)
        }
    }
}

/// Writes to `--out`, else the configured output path, else `out`.
fn with_output(
    shared: &Shared,
    cfg: &ScenarioConfig,
    out: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match shared.out.as_deref().or(cfg.output_path.as_deref()) {
        Some(path) => write_file(path, f),
        None => f(out),
    }
}

fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::Io(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush().map_err(|e| Error::Io(e.to_string()))
}

fn rates(a: RatesArgs, out: &mut dyn Write) -> Result<()> {
    let mut cfg = load_config(&a.shared, ScenarioConfig::gravity())?;
    if let Some(name) = &a.species {
        let species = parse_species(name)?;
        if !matches!(species, Species::Custom { .. }) {
            cfg.species = species;
        } else if !matches!(cfg.species, Species::Custom { .. }) {
            return Err(Error::Config("--species custom needs mass, scattering_length and three_body in --config".into()));
        }
    }
    let densities = if a.density.is_empty() { vec![cfg.density] } else { a.density };
    let requests: Vec<_> = densities.iter().map(|&d| (cfg.species, d)).collect();
    let rows = scenario_rates(&requests)?;
    with_output(&a.shared, &cfg, out, |w| write_rates_csv(&rows, w))
}

fn single_rates(gamma_minus: f64, gamma_plus: f64) -> Result<RateMatrices<f64>> {
    RateMatrices::new(vec![ModeRates::new(gamma_minus, gamma_plus)?])
}

fn squeezed_vacuum(r: f64, theta: f64) -> Result<GaussianState<f64>> {
    apply_unitary(&vacuum_state(1)?, &squeeze_matrix(r, theta)?)
}

/// Single-mode evolution: closed form when it applies, otherwise the
/// general integrator.
fn evolve_single(
    state: &GaussianState<f64>,
    h: &BilinearHamiltonian<f64>,
    rates: &RateMatrices<f64>,
    t: f64,
) -> Result<GaussianState<f64>> {
    let quiet = h.squeezings.iter().all(|x| x.norm() == 0.0) && h.drives.iter().all(|d| d.norm() == 0.0);
    if t == 0.0 {
        Ok(state.clone())
    } else if quiet && rates.modes()[0].gamma_minus > 0.0 {
        evolve_rwa(state, rates, t)
    } else {
        evolve_general_auto(state, h, rates, t)
    }
}

fn evolve(a: EvolveArgs, out: &mut dyn Write) -> Result<()> {
    let (gamma_minus, gamma_plus) = match (a.gamma_minus, a.gamma_plus) {
        (Some(m), Some(p)) => (m, p),
        (None, None) if a.shared.config.is_some() => {
            let cfg = load_config(&a.shared, ScenarioConfig::damping())?;
            let spec = cfg.condensate()?;
            let mode = ModeSpec::harmonic(cfg.mode_index, &spec)?;
            let c = damping_budget(&mode, &spec, DEFAULT_QUAD_TOL)?.combined;
            (c.gamma_minus, c.gamma_plus)
        }
        _ => return Err(Error::Config("give both --gamma-minus and --gamma-plus, or --config".into())),
    };
    if a.steps == 0 || a.t.is_nan() || a.t < 0.0 {
        return Err(Error::Config("--steps must be positive and --t non-negative".into()));
    }
    let rates = single_rates(gamma_minus, gamma_plus)?;
    let h = BilinearHamiltonian::single(a.omega, Complex64::from_polar(a.xi, 2.0 * a.phi), Complex64::new(0.0, 0.0));
    let start = squeezed_vacuum(a.r, a.theta)?;
    let mut rows = Vec::with_capacity(a.steps + 1);
    for i in 0..=a.steps {
        let t = a.t * i as f64 / a.steps as f64;
        let st = evolve_single(&start, &h, &rates, t)?;
        let (lm, lp) = eigen_spectrum(&st, 0)?;
        let mean_n = (st.covariance()[(0, 0)].re - 1.0) / 2.0 + st.displacement()[0].norm_sqr();
        rows.push([t, quadrature_variance(&st, 0)?, lm, lp, mean_n, purity(&st)?]);
    }
    let header = ["t", "x_variance", "lambda_minus", "lambda_plus", "mean_n", "purity"];
    let write = |w: &mut dyn Write| -> Result<()> {
        writeln!(w, "{}", header.join(",")).map_err(|e| Error::Io(e.to_string()))?;
        for row in &rows {
            let fields: Vec<String> = row.iter().map(|v| format_float(*v)).collect();
            writeln!(w, "{}", fields.join(",")).map_err(|e| Error::Io(e.to_string()))?;
        }
        Ok(())
    };
    match &a.shared.out {
        Some(path) => write_file(path, write),
        None => write(out),
    }
}

fn short(v: f64) -> String {
    if v == 0.0 || (1e-3..1e5).contains(&v.abs()) {
        format!("{v:.3}")
    } else if v.is_finite() {
        format!("{v:.3e}")
    } else {
        format!("{v}")
    }
}

fn qfi(a: QfiArgs, out: &mut dyn Write) -> Result<()> {
    let gamma_minus = a.gamma_minus.unwrap_or(a.gamma_plus);
    let rates = single_rates(gamma_minus, a.gamma_plus)?;
    let phi = a.phi.unwrap_or(std::f64::consts::FRAC_PI_4);
    let start = squeezed_vacuum(a.r, 0.0)?;
    let spectrum = || -> Result<(f64, f64)> {
        let h = BilinearHamiltonian::single(0.0, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        eigen_spectrum(&evolve_single(&start, &h, &rates, a.t)?, 0)
    };
    let result: SchemeResult<f64> = match a.scheme {
        SchemeArg::DisplacementAmplitude => qfi_displacement(spectrum()?.0, a.mu, DisplacementMode::Amplitude)?,
        SchemeArg::DisplacementPhase => qfi_displacement(spectrum()?.0, a.mu, DisplacementMode::Phase)?,
        SchemeArg::Rotation => {
            let (lm, lp) = spectrum()?;
            qfi_rotation(lm, lp)?
        }
        SchemeArg::Squeezing => {
            let (lm, lp) = spectrum()?;
            qfi_squeezing(lm, lp, phi)?
        }
        SchemeArg::ContinuousSqueezing => {
            let block = continuous_squeezing_sigma(a.r, a.xi, phi, &rates.modes()[0], a.t)?;
            let (lm, lp) = hermitian_2x2_eigenvalues(&block);
            qfi_continuous_squeezing(lm, lp, phi, a.t)?
        }
    };
    let text = format!(
        "F = {}, Δ = {}\nscheme = {}{}\n",
        short(result.qfi),
        short(result.delta_theta),
        result.scheme.name(),
        result.optimal_angle.map(|x| format!(", optimal angle = {}", short(x))).unwrap_or_default()
    );
    match &a.shared.out {
        Some(path) => write_file(path, |w| w.write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string()))),
        None => out.write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string())),
    }
}
