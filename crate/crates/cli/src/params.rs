//! Run parameters: one set of optional values fed by the constants file, the
//! config file and the command line, in increasing priority.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};

use gravclock::detectability::QepParameters;
use gravclock::{DeltaTauMode, EntropyBase, GapConvention, LogMagnitude, PhysicalConstants, Scenario};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Full,
    Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Base {
    Bits,
    Nats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Spacing {
    Lin,
    Log,
}

/// Every key accepted by a config file. Flags use the same names with `-` for `_`.
pub const CONFIG_KEYS: [&str; 31] = [
    "c",
    "G",
    "hbar",
    "M",
    "J",
    "ell",
    "w",
    "L",
    "v0",
    "E_g",
    "E_e",
    "clock_rate",
    "E_g_prime",
    "E_e_prime",
    "theta",
    "varphi",
    "convention",
    "entropy_base",
    "mode",
    "delta_tau",
    "target_phase",
    "axis",
    "values",
    "range",
    "spacing",
    "outputs",
    "seed",
    "samples",
    "segments",
    "format",
    "output",
];

/// Keys allowed in the file named by `GRAVCLOCK_CONSTANTS`.
pub const CONSTANT_KEYS: [&str; 3] = ["c", "G", "hbar"];

#[derive(Debug, Clone, Default, PartialEq, Args)]
pub struct Params {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Speed of light, m/s.
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Gravitational constant, m^3 kg^-1 s^-2.
    #[arg(long = "G", allow_negative_numbers = true)]
    pub g: Option<f64>,
    /// Reduced Planck constant, J s.
    #[arg(long, allow_negative_numbers = true)]
    pub hbar: Option<f64>,

    /// Source mass, kg.
    #[arg(long = "M", allow_negative_numbers = true)]
    pub mass: Option<f64>,
    /// Source angular momentum, kg m^2/s (default 1).
    #[arg(long = "J", allow_negative_numbers = true)]
    pub j: Option<f64>,
    /// Angular momentum in units of hbar; exclusive with --J.
    #[arg(long, allow_negative_numbers = true)]
    pub ell: Option<f64>,
    /// Interferometer width, m (default 1e-3).
    #[arg(long, allow_negative_numbers = true)]
    pub w: Option<f64>,
    /// Arm half-length, m (default 1000 w).
    #[arg(long = "L", allow_negative_numbers = true)]
    pub half_length: Option<f64>,
    /// Particle speed far from the source, m/s (default 0).
    #[arg(long, allow_negative_numbers = true)]
    pub v0: Option<f64>,

    /// Clock ground energy, J (default 0).
    #[arg(long = "E-g", allow_negative_numbers = true)]
    pub e_g: Option<f64>,
    /// Clock excited energy, J; exclusive with --clock-rate.
    #[arg(long = "E-e", allow_negative_numbers = true)]
    pub e_e: Option<f64>,
    /// (E_e - E_g)/hbar, rad/s (default 1e15).
    #[arg(long, allow_negative_numbers = true)]
    pub clock_rate: Option<f64>,
    /// Frame-dragging ground energy of the test theory, J (default E_g).
    #[arg(long = "E-g-prime", allow_negative_numbers = true)]
    pub e_g_prime: Option<f64>,
    /// Frame-dragging excited energy of the test theory, J (default E_e).
    #[arg(long = "E-e-prime", allow_negative_numbers = true)]
    pub e_e_prime: Option<f64>,
    /// Mixing angle of the frame-dragging eigenbasis, rad.
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Relative phase of the frame-dragging eigenbasis, rad.
    #[arg(long, allow_negative_numbers = true)]
    pub varphi: Option<f64>,
    #[arg(long, value_enum)]
    pub convention: Option<Convention>,
    #[arg(long, value_enum)]
    pub entropy_base: Option<Base>,
    /// Proper-time difference evaluation.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,

    /// Use this proper-time difference (s) instead of computing it.
    #[arg(long, allow_negative_numbers = true)]
    pub delta_tau: Option<f64>,
    /// Phase (rad) the detectability inversion aims for (default 1).
    #[arg(long, allow_negative_numbers = true)]
    pub target_phase: Option<f64>,

    /// Sweep axis: w, J, ell, v0, clock_rate, E_g, E_e, theta, M.
    #[arg(long)]
    pub axis: Option<String>,
    /// Comma-separated sweep values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub values: Option<Vec<f64>>,
    /// Sweep range `start:stop:count`, inclusive.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    #[arg(long, value_enum)]
    pub spacing: Option<Spacing>,
    /// Comma-separated sweep output columns.
    #[arg(long, value_delimiter = ',')]
    pub outputs: Option<Vec<String>>,

    /// RNG seed for selftest sampling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random samples per selftest suite.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Coordinate-time segments of the verify solver.
    #[arg(long)]
    pub segments: Option<usize>,
}

fn parse<T: FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    raw.parse().map_err(|_| CliError::Validation(format!("invalid value '{raw}' for '{key}'")))
}

fn parse_enum<T: ValueEnum>(key: &str, raw: &str) -> Result<T, CliError> {
    T::from_str(raw, false).map_err(|_| CliError::Validation(format!("invalid value '{raw}' for '{key}'")))
}

fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>, CliError> {
    raw.split(',').map(|s| parse(key, s.trim())).collect()
}

impl Params {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn from_text(text: &str, allowed: &[&str], source: &str) -> Result<Self, CliError> {
        let mut p = Params::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Validation(format!("{source}:{}: expected 'key = value'", n + 1)));
            };
            let (key, value) = (key.trim(), value.trim());
            if !allowed.contains(&key) {
                return Err(CliError::Validation(format!("{source}:{}: unknown key '{key}'", n + 1)));
            }
            p.set(key, value)?;
        }
        Ok(p)
    }

    pub fn from_file(path: &std::path::Path, allowed: &[&str]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text, allowed, &path.display().to_string())
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        match key {
            "c" => self.c = Some(parse(key, v)?),
            "G" => self.g = Some(parse(key, v)?),
            "hbar" => self.hbar = Some(parse(key, v)?),
            "M" => self.mass = Some(parse(key, v)?),
            "J" => self.j = Some(parse(key, v)?),
            "ell" => self.ell = Some(parse(key, v)?),
            "w" => self.w = Some(parse(key, v)?),
            "L" => self.half_length = Some(parse(key, v)?),
            "v0" => self.v0 = Some(parse(key, v)?),
            "E_g" => self.e_g = Some(parse(key, v)?),
            "E_e" => self.e_e = Some(parse(key, v)?),
            "clock_rate" => self.clock_rate = Some(parse(key, v)?),
            "E_g_prime" => self.e_g_prime = Some(parse(key, v)?),
            "E_e_prime" => self.e_e_prime = Some(parse(key, v)?),
            "theta" => self.theta = Some(parse(key, v)?),
            "varphi" => self.varphi = Some(parse(key, v)?),
            "convention" => self.convention = Some(parse_enum(key, v)?),
            "entropy_base" => self.entropy_base = Some(parse_enum(key, v)?),
            "mode" => self.mode = Some(parse_enum(key, v)?),
            "delta_tau" => self.delta_tau = Some(parse(key, v)?),
            "target_phase" => self.target_phase = Some(parse(key, v)?),
            "axis" => self.axis = Some(v.to_string()),
            "values" => self.values = Some(parse_list(key, v)?),
            "range" => self.range = Some(v.to_string()),
            "spacing" => self.spacing = Some(parse_enum(key, v)?),
            "outputs" => self.outputs = Some(parse_list(key, v)?),
            "seed" => self.seed = Some(parse(key, v)?),
            "samples" => self.samples = Some(parse(key, v)?),
            "segments" => self.segments = Some(parse(key, v)?),
            "format" => self.format = Some(parse_enum(key, v)?),
            "output" => self.output = Some(PathBuf::from(v)),
            _ => return Err(CliError::Validation(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Values set in `top` replace those in `self`.
    pub fn overlay(self, top: Params) -> Params {
        macro_rules! pick {
            ($($f:ident),*) => { Params { $($f: top.$f.or(self.$f)),* } };
        }
        pick!(
            config,
            format,
            output,
            c,
            g,
            hbar,
            mass,
            j,
            ell,
            w,
            half_length,
            v0,
            e_g,
            e_e,
            clock_rate,
            e_g_prime,
            e_e_prime,
            theta,
            varphi,
            convention,
            entropy_base,
            mode,
            delta_tau,
            target_phase,
            axis,
            values,
            range,
            spacing,
            outputs,
            seed,
            samples,
            segments
        )
    }

    pub fn constants_or(&self, base: PhysicalConstants) -> Result<PhysicalConstants, CliError> {
        Ok(PhysicalConstants::new(self.c.unwrap_or(base.c), self.g.unwrap_or(base.g), self.hbar.unwrap_or(base.hbar))?)
    }

    pub fn constants(&self) -> Result<PhysicalConstants, CliError> {
        self.constants_or(PhysicalConstants::CODATA)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    pub fn angular_momentum(&self, hbar: f64) -> Result<LogMagnitude, CliError> {
        match (self.j, self.ell) {
            (Some(_), Some(_)) => Err(CliError::Validation("give either J or ell, not both".into())),
            (Some(j), None) => finite("J", j).map(LogMagnitude::from_f64),
            (None, Some(l)) => finite("ell", l).map(|l| LogMagnitude::from_f64(l) * hbar),
            (None, None) => Ok(LogMagnitude::ONE),
        }
    }

    /// `(E_g, E_e)` from either the excited energy or the clock rate.
    pub fn clock_energies(&self, hbar: f64) -> Result<(f64, f64), CliError> {
        let e_g = self.e_g.unwrap_or(0.0);
        match (self.e_e, self.clock_rate) {
            (Some(_), Some(_)) => Err(CliError::Validation("give either E_e or clock_rate, not both".into())),
            (Some(e), None) => Ok((e_g, e)),
            (None, rate) => Ok((e_g, e_g + rate.unwrap_or(1e15) * hbar)),
        }
    }

    fn has_qep(&self) -> bool {
        self.e_g_prime.is_some() || self.e_e_prime.is_some() || self.theta.is_some() || self.varphi.is_some()
    }

    /// Full scenario; QEP parameters are attached when any is given or `force_qep` is set.
    pub fn scenario(&self, force_qep: bool) -> Result<Scenario, CliError> {
        let constants = self.constants()?;
        let (e_g, e_e) = self.clock_energies(constants.hbar)?;
        let qep = (force_qep || self.has_qep()).then(|| QepParameters {
            e_g_prime: self.e_g_prime.unwrap_or(e_g),
            e_e_prime: self.e_e_prime.unwrap_or(e_e),
            theta: self.theta.unwrap_or(0.0),
            varphi: self.varphi.unwrap_or(0.0),
        });
        let d = Scenario::default();
        Ok(Scenario {
            constants,
            mass: self.mass.unwrap_or(d.mass),
            angular_momentum: self.angular_momentum(constants.hbar)?,
            width: self.w.unwrap_or(d.width),
            half_length: self.half_length,
            v0: self.v0.unwrap_or(d.v0),
            e_g,
            e_e,
            convention: match self.convention {
                Some(Convention::Half) => GapConvention::Half,
                _ => GapConvention::Full,
            },
            mode: match self.mode {
                Some(Mode::Quadrature) => DeltaTauMode::Quadrature,
                _ => DeltaTauMode::ClosedForm,
            },
            entropy_base: match self.entropy_base {
                Some(Base::Nats) => EntropyBase::Nats,
                _ => EntropyBase::Bits,
            },
            qep,
        })
    }

    /// Sweep values from `values` or `range`.
    pub fn sweep_values(&self) -> Result<Vec<f64>, CliError> {
        match (&self.values, &self.range) {
            (Some(_), Some(_)) => Err(CliError::Validation("give either values or range, not both".into())),
            (Some(v), None) => Ok(v.clone()),
            (None, Some(r)) => {
                let parts: Vec<&str> = r.split(':').collect();
                let [a, b, n] = parts[..] else {
                    return Err(CliError::Validation(format!("range '{r}' is not start:stop:count")));
                };
                let (a, b, n): (f64, f64, usize) = (parse("range", a)?, parse("range", b)?, parse("range", n)?);
                let log = self.spacing == Some(Spacing::Log);
                if log && !(a > 0.0 && b > 0.0) {
                    return Err(CliError::Validation("log spacing needs positive endpoints".into()));
                }
                let (a, b) = if log { (a.log10(), b.log10()) } else { (a, b) };
                Ok((0..n)
                    .map(|i| {
                        let x = if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 };
                        if log {
                            10f64.powf(x)
                        } else {
                            x
                        }
                    })
                    .collect())
            }
            (None, None) => Err(CliError::Validation("sweep needs values or range".into())),
        }
    }
}

fn finite(key: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Validation(format!("{key} must be finite")))
    }
}
