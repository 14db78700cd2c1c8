//! Experimental parameter tables, per-harmonic damping curves and the
//! gravity-sensing estimate, with CSV output.

use std::io::{Read, Write};
use std::path::PathBuf;

use crate::condensate::{CondensateSpec, Geometry, ModeSpec, Species};
use crate::error::{Error, Result};
use crate::rates::{damping_budget, loss_channel_rates, three_body_gamma, DampingBudget, DEFAULT_QUAD_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub species: Species,
    /// cm⁻³
    pub density: f64,
    /// K
    pub temperature: f64,
    /// m
    pub length: f64,
    pub aspect_ratio: f64,
    pub mode_index: u32,
    pub squeezing: Vec<f64>,
    /// s
    pub drive_time: f64,
    /// kg
    pub reference_mass: f64,
    /// s
    pub reference_time: f64,
    pub output_path: Option<PathBuf>,
}

impl ScenarioConfig {
    /// Ytterbium cylinder of length and diameter 300 μm, driven at the tenth
    /// harmonic; 200 g detected after 10 s without squeezing.
    pub fn gravity() -> Self {
        Self {
            species: Species::Yb168,
            density: 1e13,
            temperature: 0.0,
            length: 300e-6,
            aspect_ratio: 1.0,
            mode_index: 10,
            squeezing: vec![1.0, 2.0, 5.0],
            drive_time: 10.0,
            reference_mass: 0.2,
            reference_time: 10.0,
            output_path: None,
        }
    }

    /// Rubidium cuboid of length 200 μm, aspect ratio 1/3, at 200 pK.
    pub fn damping() -> Self {
        Self {
            species: Species::Rb87,
            temperature: 200e-12,
            length: 200e-6,
            aspect_ratio: 1.0 / 3.0,
            mode_index: 1,
            ..Self::gravity()
        }
    }

    /// Applies `key = value` lines on top of `self`. Blank lines and `#`
    /// comments are skipped.
    pub fn parse_onto(mut self, text: &str) -> Result<Self> {
        let mut custom = (None, None, None);
        let mut species_name: Option<String> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| -> Result<f64> {
                v.parse::<f64>()
                    .map_err(|_| Error::Config(format!("line {}: {key}: not a number: {v:?}", lineno + 1)))
            };
            match key {
                "species" => species_name = Some(value.to_ascii_lowercase()),
                "mass" => custom.0 = Some(num(value)?),
                "scattering_length" => custom.1 = Some(num(value)?),
                "three_body" => custom.2 = Some(num(value)?),
                "density" => self.density = num(value)?,
                "temperature" => self.temperature = num(value)?,
                "length" => self.length = num(value)?,
                "aspect_ratio" => self.aspect_ratio = num(value)?,
                "mode_index" => {
                    self.mode_index = value
                        .parse()
                        .map_err(|_| Error::Config(format!("line {}: mode_index: not an integer: {value:?}", lineno + 1)))?
                }
                "squeezing" => {
                    self.squeezing = value.split(',').map(|v| num(v.trim())).collect::<Result<_>>()?;
                }
                "drive_time" => self.drive_time = num(value)?,
                "reference_mass" => self.reference_mass = num(value)?,
                "reference_time" => self.reference_time = num(value)?,
                "output" | "output_path" => self.output_path = Some(PathBuf::from(value)),
                other => return Err(Error::Config(format!("line {}: unknown key {other:?}", lineno + 1))),
            }
        }
        let base = match species_name.as_deref() {
            None => self.species,
            Some(name) => parse_species(name)?,
        };
        self.species = match custom {
            (None, None, None) => base,
            (m, a, d) => Species::Custom {
                mass: m.unwrap_or(base.mass()),
                scattering_length: a.unwrap_or(base.scattering_length()),
                three_body_cm6: d.unwrap_or(base.three_body_cm6()),
            },
        };
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("density", self.density),
            ("length", self.length),
            ("aspect_ratio", self.aspect_ratio),
            ("drive_time", self.drive_time),
            ("reference_mass", self.reference_mass),
            ("reference_time", self.reference_time),
            ("mass", self.species.mass()),
            ("scattering_length", self.species.scattering_length()),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return Err(Error::Config(format!("temperature must be non-negative, got {}", self.temperature)));
        }
        if !(self.species.three_body_cm6() >= 0.0) {
            return Err(Error::Config("three_body must be non-negative and finite".into()));
        }
        if self.mode_index < 1 {
            return Err(Error::Config("mode_index must be at least 1".into()));
        }
        if let Some(r) = self.squeezing.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
            return Err(Error::Config(format!("squeezing values must be non-negative, got {r}")));
        }
        Ok(())
    }

    pub fn condensate(&self) -> Result<CondensateSpec> {
        self.validate()?;
        CondensateSpec::for_species(
            self.species,
            self.density,
            self.temperature,
            Geometry { length: self.length, aspect_ratio: self.aspect_ratio },
        )
    }
}

pub fn parse_species(name: &str) -> Result<Species> {
    match name.to_ascii_lowercase().as_str() {
        "rb" | "rb87" => Ok(Species::Rb87),
        "yb" | "yb168" => Ok(Species::Yb168),
        // Filled in from the mass / scattering_length / three_body keys.
        "custom" => Ok(Species::Custom { mass: f64::NAN, scattering_length: f64::NAN, three_body_cm6: f64::NAN }),
        other => Err(Error::Config(format!("unknown species {other:?} (expected rb, yb or custom)"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub species: Species,
    /// cm⁻³
    pub density: f64,
    pub gamma: f64,
    pub inverse_gamma: f64,
}

/// Three-body rate `γ = 3Dρ²` for each `(species, density in cm⁻³)`.
pub fn scenario_rates(requests: &[(Species, f64)]) -> Result<Vec<RateRow>> {
    requests
        .iter()
        .map(|&(species, density)| {
            let gamma = three_body_gamma(species.three_body_cm6(), density)?;
            Ok(RateRow { species, density, gamma, inverse_gamma: 1.0 / gamma })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DampingRow {
    pub n: u32,
    pub budget: Result<DampingBudget>,
}

/// Damping budget of harmonics `1..=n_max`. A failing row keeps its error
/// and the remaining rows are still computed.
pub fn scenario_damping_curves(config: &ScenarioConfig, n_max: u32) -> Result<Vec<DampingRow>> {
    if n_max < 1 {
        return Err(Error::Config("n_max must be at least 1".into()));
    }
    let spec = config.condensate()?;
    Ok((1..=n_max)
        .map(|n| {
            let budget = ModeSpec::harmonic(n, &spec).and_then(|mode| damping_budget(&mode, &spec, DEFAULT_QUAD_TOL));
            if let Err(e) = &budget {
                log::warn!("damping row n = {n} failed: {e}");
            }
            DampingRow { n, budget }
        })
        .collect())
}

/// First harmonic whose Beliaev rate exceeds the three-body rate.
pub fn crossover_harmonic(rows: &[DampingRow]) -> Option<u32> {
    rows.iter()
        .find(|row| matches!(&row.budget, Ok(b) if b.gamma_beliaev > b.gamma_3b))
        .map(|row| row.n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GravityResult {
    pub squeezing: Vec<f64>,
    /// kg, one per squeezing value.
    pub detectable_mass_ideal: Vec<f64>,
    /// kg, one per squeezing value.
    pub detectable_mass_decohered: Vec<f64>,
    pub enhancement_factor: Vec<f64>,
    /// s⁻¹
    pub gamma_plus_mode: f64,
    /// s⁻¹
    pub gamma_3b: f64,
    /// Phonon displacement per kg of source mass per second of driving.
    pub coupling: f64,
}

/// Detectable source mass with and without three-body decoherence. The
/// coupling is calibrated so that `reference_mass` driven for
/// `reference_time` displaces the mode by one phonon amplitude.
pub fn scenario_gravity(config: &ScenarioConfig) -> Result<GravityResult> {
    let spec = config.condensate()?;
    let mode = ModeSpec::harmonic(config.mode_index, &spec)?;
    let gamma_3b = three_body_gamma(spec.three_body_cm6(), spec.density_per_cm3())?;
    let gamma_plus = loss_channel_rates(gamma_3b, mode.alpha, mode.beta)?.gamma_plus;
    let coupling = 1.0 / (config.reference_mass * config.reference_time);
    let t = config.drive_time;
    let unsqueezed = 1.0 / (coupling * t);
    let mut out = GravityResult {
        squeezing: config.squeezing.clone(),
        detectable_mass_ideal: Vec::new(),
        detectable_mass_decohered: Vec::new(),
        enhancement_factor: Vec::new(),
        gamma_plus_mode: gamma_plus,
        gamma_3b,
        coupling,
    };
    for &r in &config.squeezing {
        let noise = (1.0 + (2.0 * r).exp() * gamma_plus * t).sqrt();
        let ideal = unsqueezed * (-r).exp();
        out.detectable_mass_ideal.push(ideal);
        out.detectable_mass_decohered.push(ideal * noise);
        out.enhancement_factor.push(r.exp() / noise);
    }
    Ok(out)
}

/// Six significant digits in scientific notation.
pub fn format_float(v: f64) -> String {
    format!("{v:.5e}")
}

fn io_error(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

fn write_table<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(io_error)?;
    for row in rows {
        w.write_record(&row).map_err(io_error)?;
    }
    w.flush().map_err(io_error)
}

pub const RATES_HEADER: [&str; 4] = ["species", "density_cm3", "gamma", "inverse_gamma"];
pub const DAMPING_HEADER: [&str; 7] =
    ["n", "gamma_minus", "gamma_plus", "gamma_3b", "gamma_landau", "gamma_beliaev", "status"];
pub const GRAVITY_HEADER: [&str; 5] = ["r", "mass_ideal_kg", "mass_decohered_kg", "enhancement", "gamma_plus"];

pub fn write_rates_csv<W: Write>(rows: &[RateRow], out: W) -> Result<()> {
    write_table(
        out,
        &RATES_HEADER,
        rows.iter().map(|r| {
            vec![
                r.species.name().to_string(),
                format_float(r.density),
                format_float(r.gamma),
                format_float(r.inverse_gamma),
            ]
        }),
    )
}

/// Failed rows carry empty numeric fields and the error in `status`.
pub fn write_damping_csv<W: Write>(rows: &[DampingRow], out: W) -> Result<()> {
    write_table(
        out,
        &DAMPING_HEADER,
        rows.iter().map(|row| {
            let mut rec = vec![row.n.to_string()];
            match &row.budget {
                Ok(b) => {
                    rec.extend(
                        [b.combined.gamma_minus, b.combined.gamma_plus, b.gamma_3b, b.gamma_landau, b.gamma_beliaev]
                            .map(format_float),
                    );
                    rec.push("ok".into());
                }
                Err(e) => {
                    rec.extend(std::iter::repeat_n(String::new(), 5));
                    rec.push(format!("error: {e}"));
                }
            }
            rec
        }),
    )
}

pub fn write_gravity_csv<W: Write>(result: &GravityResult, out: W) -> Result<()> {
    write_table(
        out,
        &GRAVITY_HEADER,
        (0..result.squeezing.len()).map(|i| {
            [
                result.squeezing[i],
                result.detectable_mass_ideal[i],
                result.detectable_mass_decohered[i],
                result.enhancement_factor[i],
                result.gamma_plus_mode,
            ]
            .map(format_float)
            .to_vec()
        }),
    )
}

/// Header and rows of a CSV table, as strings.
pub fn read_table<R: Read>(input: R) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(io_error)?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()).map_err(io_error))
        .collect::<Result<_>>()?;
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condensate::coefficients_at;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn rate_rows() {
        let rows = scenario_rates(&[(Species::Rb87, 1e14), (Species::Yb168, 1e13), (Species::Rb87, 1e13)]).unwrap();
        assert_relative_eq!(rows[0].gamma, 0.174, max_relative = 1e-12);
        assert_relative_eq!(rows[1].inverse_gamma, 833.333333, max_relative = 1e-8);
        assert!((500.0..=1000.0).contains(&rows[1].inverse_gamma));
        assert_relative_eq!(rows[2].gamma, 1.74e-3, max_relative = 1e-12);
    }

    #[test]
    fn gravity_masses() {
        let g = scenario_gravity(&ScenarioConfig::gravity()).unwrap();
        let expected = [0.0736, 0.0271, 0.00135];
        for (m, e) in g.detectable_mass_ideal.iter().zip(expected) {
            assert_relative_eq!(*m, e, max_relative = 5e-3);
        }
        assert_relative_eq!(g.gamma_3b, 1.2e-3, max_relative = 1e-12);
        assert!(g.gamma_plus_mode > 1e-2 && g.gamma_plus_mode < 2e-2, "{}", g.gamma_plus_mode);
        for i in 0..3 {
            let r = g.squeezing[i];
            let ratio = g.detectable_mass_decohered[i] / g.detectable_mass_ideal[i];
            assert_relative_eq!(ratio, (1.0 + (2.0 * r).exp() * g.gamma_plus_mode * 10.0).sqrt(), max_relative = 1e-14);
            assert!(ratio >= 1.0);
            assert!(g.enhancement_factor[i] >= 1.0);
        }
        // Independent recomputation of γ⁺ = (α² + β²)γ_3b for the tenth harmonic.
        let cfg = ScenarioConfig::gravity();
        let spec = cfg.condensate().unwrap();
        let k = 10.0 * std::f64::consts::PI / 300e-6;
        let (a, b) = coefficients_at(k * crate::condensate::healing_length(&spec));
        assert_relative_eq!(g.gamma_plus_mode, (a * a + b * b) * 1.2e-3, max_relative = 1e-10);
    }

    #[test]
    fn damping_rows_and_crossover() {
        let cfg = ScenarioConfig::damping();
        let rows = scenario_damping_curves(&cfg, 30).unwrap();
        assert_eq!(rows.len(), 30);
        let first = rows[0].budget.as_ref().unwrap();
        assert_relative_eq!(first.gamma_3b, 1.74e-3, max_relative = 1e-12);
        assert!(first.combined.gamma_minus < 1.01 * first.gamma_3b);
        let n = crossover_harmonic(&rows).expect("crossover within 30 harmonics");
        assert!(n > 1 && n <= 30);
        let zero_t = ScenarioConfig { temperature: 0.0, ..cfg };
        let rows = scenario_damping_curves(&zero_t, 6).unwrap();
        let b1 = rows[0].budget.as_ref().unwrap().gamma_beliaev;
        for row in &rows {
            let bn = row.budget.as_ref().unwrap().gamma_beliaev;
            assert_relative_eq!(bn / b1, (row.n as f64).powi(5), max_relative = 1e-6);
        }
        assert!(scenario_damping_curves(&ScenarioConfig::damping(), 0).is_err());
    }

    #[test]
    fn config_parsing() {
        let text = "# gravity run\nspecies = rb\ndensity = 1e14 # cm^-3\nsqueezing = 0.5, 1.5\nmode_index = 3\noutput = out.csv\n";
        let cfg = ScenarioConfig::gravity().parse_onto(text).unwrap();
        assert_eq!(cfg.species, Species::Rb87);
        assert_eq!(cfg.density, 1e14);
        assert_eq!(cfg.squeezing, vec![0.5, 1.5]);
        assert_eq!(cfg.mode_index, 3);
        assert_eq!(cfg.output_path, Some(PathBuf::from("out.csv")));
        let custom = ScenarioConfig::gravity()
            .parse_onto("species = custom\nmass = 1e-25\nscattering_length = 5e-9\nthree_body = 1e-29")
            .unwrap();
        assert_eq!(custom.species, Species::Custom { mass: 1e-25, scattering_length: 5e-9, three_body_cm6: 1e-29 });
        let tweaked = ScenarioConfig::gravity().parse_onto("species = rb\nthree_body = 1e-29").unwrap();
        assert_eq!(tweaked.species.mass(), Species::Rb87.mass());
        assert_eq!(tweaked.species.three_body_cm6(), 1e-29);
        for bad in ["density = -1", "nonsense", "colour = red", "species = custom\nmass = 1", "mode_index = 0", "density = x"] {
            assert!(matches!(ScenarioConfig::gravity().parse_onto(bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn damping_csv_marks_failed_rows() {
        let rows = vec![
            DampingRow { n: 1, budget: Err(Error::Quadrature { estimate: 1.0, error: 0.5 }) },
            DampingRow { n: 2, budget: scenario_damping_curves(&ScenarioConfig::damping(), 1).unwrap()[0].budget.clone() },
        ];
        let mut buf = Vec::new();
        write_damping_csv(&rows, &mut buf).unwrap();
        let (header, body) = read_table(buf.as_slice()).unwrap();
        assert_eq!(header, DAMPING_HEADER);
        assert!(body[0][6].starts_with("error"));
        assert_eq!(body[0][1], "");
        assert_eq!(body[1][6], "ok");
    }

    proptest! {
        #[test]
        fn csv_round_trip(values in proptest::collection::vec(1e-30..1e30f64, 1..8)) {
            let result = GravityResult {
                squeezing: values.clone(),
                detectable_mass_ideal: values.clone(),
                detectable_mass_decohered: values.clone(),
                enhancement_factor: values.clone(),
                gamma_plus_mode: values[0],
                gamma_3b: 0.0,
                coupling: 0.0,
            };
            let mut buf = Vec::new();
            write_gravity_csv(&result, &mut buf).unwrap();
            let (_, rows) = read_table(buf.as_slice()).unwrap();
            for (row, v) in rows.iter().zip(&values) {
                for field in row.iter().take(4) {
                    let parsed: f64 = field.parse().unwrap();
                    prop_assert!((parsed - v).abs() <= 5e-6 * v.abs());
                }
            }
        }

        #[test]
        fn ideal_mass_scales_as_exp_minus_r(r in 0.0..6.0f64, dr in 0.0..3.0f64) {
            let cfg = ScenarioConfig { squeezing: vec![r, r + dr], ..ScenarioConfig::gravity() };
            let g = scenario_gravity(&cfg).unwrap();
            let ratio = g.detectable_mass_ideal[1] / g.detectable_mass_ideal[0];
            prop_assert!((ratio / (-dr).exp() - 1.0).abs() < 1e-12);
        }
    }
}
