//! Run configuration and its line-based text format.
//!
//! ```text
//! # comment
//! [params]
//! R = 1
//! b = 4
//! [grid]
//! L = 20
//! N = 1600
//! boundary = farfield
//! [scenario]
//! kind = gaussian
//! [time]
//! integrator = heun
//! cfl = 0.4
//! t_end = 2
//! [output]
//! diag_interval = 0.01
//! snap_interval = 0.1
//! dir = radgas-out
//! ```
//!
//! Unknown sections or keys are errors; missing keys keep their defaults.
//! Numbers use a decimal point only.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::grid::{Grid, MIN_NODES};
use crate::model::{self, Mutation, Parameters};
use crate::scenarios::{ScenarioKind, ScenarioSpec};
use crate::solver::BoundaryMode;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub half_length: f64,
    pub nodes: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.half_length, self.nodes)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Integrator {
    #[default]
    Heun,
    Imex,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stepping {
    pub integrator: Integrator,
    pub cfl: f64,
    pub t_end: f64,
    /// Debug switch: lets `cfl` exceed 1 to provoke a blow-up on purpose.
    /// Never read from or written to the text format.
    pub unchecked_cfl: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSpec {
    pub diag_interval: f64,
    pub snap_interval: f64,
    pub dir: PathBuf,
}

/// Full description of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub params: Parameters,
    pub grid: GridSpec,
    pub scenario: ScenarioSpec,
    pub bc: BoundaryMode,
    pub stepping: Stepping,
    pub output: OutputSpec,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            params: Parameters::default(),
            grid: GridSpec {
                half_length: 20.0,
                nodes: 1600,
            },
            scenario: ScenarioSpec::default(),
            bc: BoundaryMode::FarField,
            stepping: Stepping {
                integrator: Integrator::Heun,
                cfl: 0.4,
                t_end: 2.0,
                unchecked_cfl: false,
            },
            output: OutputSpec {
                diag_interval: 0.01,
                snap_interval: 0.1,
                dir: PathBuf::from("radgas-out"),
            },
        }
    }
}

fn range(key: &str, msg: impl Into<String>) -> Error {
    Error::Range {
        key: key.to_string(),
        msg: msg.into(),
    }
}

impl Config {
    /// Range checks on every field; parameter signs via [`model::validate_params`].
    pub fn validate(&self) -> Result<()> {
        model::validate_params(&self.params)?;
        let s = &self.stepping;
        if !(s.cfl > 0.0 && (s.cfl <= 1.0 || s.unchecked_cfl) && s.cfl.is_finite()) {
            return Err(range("cfl", format!("must lie in (0, 1], got {}", s.cfl)));
        }
        if !(s.t_end > 0.0 && s.t_end.is_finite()) {
            return Err(range("t_end", format!("must be > 0, got {}", s.t_end)));
        }
        for (key, value) in [
            ("diag_interval", self.output.diag_interval),
            ("snap_interval", self.output.snap_interval),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(range(key, format!("must be > 0, got {value}")));
            }
        }
        if self.grid.nodes < MIN_NODES {
            return Err(range("N", format!("must be >= {MIN_NODES}, got {}", self.grid.nodes)));
        }
        if !(self.grid.half_length > 0.0 && self.grid.half_length.is_finite()) {
            return Err(range("L", format!("must be > 0, got {}", self.grid.half_length)));
        }
        if !(self.scenario.width > 0.0 && self.scenario.width.is_finite()) {
            return Err(range("width", format!("must be > 0, got {}", self.scenario.width)));
        }
        Ok(())
    }

    /// Serializes to the text format; [`parse_config`] reads it back to an
    /// equal value.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("[params]\n");
        for (key, value) in self.params.named_fields() {
            let _ = writeln!(out, "{key} = {value:?}");
        }
        if self.params.mutation == Mutation::FlipRadiationPressure {
            out.push_str("mutation = flip_radiation_pressure\n");
        }
        let _ = write!(
            out,
            "\n[grid]\nL = {:?}\nN = {}\nboundary = {}\n",
            self.grid.half_length,
            self.grid.nodes,
            match self.bc {
                BoundaryMode::FarField => "farfield",
                BoundaryMode::InsulatedWall => "insulated",
            }
        );
        let sc = &self.scenario;
        let _ = write!(
            out,
            "\n[scenario]\nkind = {}\ndv = {:?}\ndu = {:?}\ndtheta = {:?}\ndz = {:?}\nwidth = {:?}\ncenter = {:?}\nseed = {}\n",
            sc.kind.name(),
            sc.amplitude.v,
            sc.amplitude.u,
            sc.amplitude.theta,
            sc.amplitude.z,
            sc.width,
            sc.center,
            sc.seed
        );
        let _ = write!(
            out,
            "\n[time]\nintegrator = {}\ncfl = {:?}\nt_end = {:?}\n",
            match self.stepping.integrator {
                Integrator::Heun => "heun",
                Integrator::Imex => "imex",
            },
            self.stepping.cfl,
            self.stepping.t_end
        );
        let _ = write!(
            out,
            "\n[output]\ndiag_interval = {:?}\nsnap_interval = {:?}\ndir = {}\n",
            self.output.diag_interval,
            self.output.snap_interval,
            self.output.dir.display()
        );
        out
    }
}

const SECTIONS: [&str; 5] = ["params", "grid", "scenario", "time", "output"];

fn parse_f64(line: usize, key: &str, raw: &str) -> Result<f64> {
    let ok_chars = raw
        .chars()
        .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
    match raw.parse::<f64>() {
        Ok(v) if ok_chars && v.is_finite() => Ok(v),
        _ => Err(Error::ConfigSyntax {
            line,
            msg: format!("`{key}` expects a finite decimal number, got `{raw}`"),
        }),
    }
}

fn parse_int<T: std::str::FromStr>(line: usize, key: &str, raw: &str) -> Result<T> {
    raw.parse::<T>().map_err(|_| Error::ConfigSyntax {
        line,
        msg: format!("`{key}` expects a non-negative integer, got `{raw}`"),
    })
}

/// Parses the text format, then range-checks the result.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut cfg = Config::default();
    let mut section: Option<&str> = None;
    let mut seen: Vec<(String, String)> = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| Error::ConfigSyntax {
                line,
                msg: format!("unterminated section header `{content}`"),
            })?;
            let name = name.trim();
            section = Some(SECTIONS.iter().copied().find(|s| *s == name).ok_or_else(|| {
                Error::ConfigSyntax {
                    line,
                    msg: format!("unknown section [{name}]"),
                }
            })?);
            continue;
        }
        let sec = section.ok_or_else(|| Error::ConfigSyntax {
            line,
            msg: "key outside of any section".into(),
        })?;
        let (key, value) = content.split_once('=').ok_or_else(|| Error::ConfigSyntax {
            line,
            msg: format!("expected `key = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || value.is_empty() {
            return Err(Error::ConfigSyntax {
                line,
                msg: format!("expected `key = value`, got `{content}`"),
            });
        }
        if seen.iter().any(|(s, k)| s == sec && k == key) {
            return Err(Error::ConfigSyntax {
                line,
                msg: format!("duplicate key `{key}` in [{sec}]"),
            });
        }
        seen.push((sec.to_string(), key.to_string()));

        let unknown = || Error::UnknownKey {
            line,
            section: sec.to_string(),
            key: key.to_string(),
        };
        let num = || parse_f64(line, key, value);
        let bad = |what: &str| Error::ConfigSyntax {
            line,
            msg: format!("`{key}` expects {what}, got `{value}`"),
        };
        let p = &mut cfg.params;
        match (sec, key) {
            ("params", "R") => p.gas_constant = num()?,
            ("params", "Cv") => p.specific_heat = num()?,
            ("params", "a") => p.radiation_constant = num()?,
            ("params", "mu") => p.viscosity = num()?,
            ("params", "kappa1") => p.conductivity_offset = num()?,
            ("params", "kappa2") => p.conductivity_slope = num()?,
            ("params", "b") => p.conductivity_exponent = num()?,
            ("params", "K") => p.rate_prefactor = num()?,
            ("params", "A") => p.activation_energy = num()?,
            ("params", "beta") => p.rate_exponent = num()?,
            ("params", "lambda") => p.heat_release = num()?,
            ("params", "d") => p.species_diffusion = num()?,
            ("params", "mutation") => {
                p.mutation = match value {
                    "none" => Mutation::None,
                    "flip_radiation_pressure" => Mutation::FlipRadiationPressure,
                    _ => return Err(bad("none | flip_radiation_pressure")),
                }
            }
            ("grid", "L") => cfg.grid.half_length = num()?,
            ("grid", "N") => cfg.grid.nodes = parse_int(line, key, value)?,
            ("grid", "boundary") => {
                cfg.bc = match value {
                    "farfield" => BoundaryMode::FarField,
                    "insulated" => BoundaryMode::InsulatedWall,
                    _ => return Err(bad("farfield | insulated")),
                }
            }
            ("scenario", "kind") => {
                cfg.scenario.kind = ScenarioKind::parse(value)
                    .ok_or_else(|| bad("equilibrium | gaussian | multibump | seeded_random"))?
            }
            ("scenario", "dv") => cfg.scenario.amplitude.v = num()?,
            ("scenario", "du") => cfg.scenario.amplitude.u = num()?,
            ("scenario", "dtheta") => cfg.scenario.amplitude.theta = num()?,
            ("scenario", "dz") => cfg.scenario.amplitude.z = num()?,
            ("scenario", "width") => cfg.scenario.width = num()?,
            ("scenario", "center") => cfg.scenario.center = num()?,
            ("scenario", "seed") => cfg.scenario.seed = parse_int(line, key, value)?,
            ("time", "integrator") => {
                cfg.stepping.integrator = match value {
                    "heun" => Integrator::Heun,
                    "imex" => Integrator::Imex,
                    _ => return Err(bad("heun | imex")),
                }
            }
            ("time", "cfl") => cfg.stepping.cfl = num()?,
            ("time", "t_end") => cfg.stepping.t_end = num()?,
            ("output", "diag_interval") => cfg.output.diag_interval = num()?,
            ("output", "snap_interval") => cfg.output.snap_interval = num()?,
            ("output", "dir") => cfg.output.dir = PathBuf::from(value),
            _ => return Err(unknown()),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}
