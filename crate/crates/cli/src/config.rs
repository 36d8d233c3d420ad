//! Command-line flags, optional JSON config file, and the validated
//! [`RunConfig`] they resolve to. Flags override file values.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qbat_core::{ModelParams, QuenchScenario};
use serde_json::Value;

use crate::error::{CliError, Result};

/// Environment variable naming the directory for outputs written without `--out`.
pub const OUTPUT_DIR_ENV: &str = "QBAT_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "qbat",
    version,
    about = "Dimerized XY chain as a quantum battery: spectra, phase boundaries and quench charging"
)]
pub struct Cli {
    /// Flat JSON object of flag values (keys are long flag names); flags on the command line win
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Output file; defaults to <command>.<format> in $QBAT_OUTPUT_DIR or the working directory
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Maximum number of worker threads (results do not depend on it)
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioName {
    /// Quench gamma at fixed delta and h
    Anisotropy,
    /// Quench h at fixed gamma and delta
    Field,
    /// Quench gamma and h = gamma + delta - 1 together at fixed delta
    Diagonal,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Quasiparticle energies on the momentum grid
    Dispersion(DispersionArgs),
    /// Gap and boundary residuals over the (gamma, delta) square [0, 2]^2 at fixed h
    PhaseDiagram(PhaseDiagramArgs),
    /// Asymptotic stored energy per dimer along a quench line
    Sweep(SweepArgs),
    /// Stored energy per dimer versus charging time
    ChargeCurve(ChargeCurveArgs),
    /// Cross-check the free-fermion engine against exact diagonalization
    Verify(VerifyArgs),
}

impl CommandArgs {
    pub fn name(&self) -> &'static str {
        match self {
            CommandArgs::Dispersion(_) => "dispersion",
            CommandArgs::PhaseDiagram(_) => "phase-diagram",
            CommandArgs::Sweep(_) => "sweep",
            CommandArgs::ChargeCurve(_) => "charge-curve",
            CommandArgs::Verify(_) => "verify",
        }
    }
}

#[derive(Debug, Args)]
pub struct DispersionArgs {
    /// Anisotropy gamma (dimensionless) [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Dimerization delta (dimensionless) [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Transverse field h (units of J) [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<f64>,
    /// Number of dimers (even) [default: 64]
    #[arg(long)]
    pub dimers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PhaseDiagramArgs {
    /// Transverse field h of the plane (units of J) [default: 0.5]
    #[arg(long, allow_hyphen_values = true)]
    pub h_plane: Option<f64>,
    /// Points per axis on [0, 2] [default: 200]
    #[arg(long)]
    pub grid: Option<usize>,
    /// Momentum samples of each gap scan (>= 64) [default: 256]
    #[arg(long)]
    pub gap_samples: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Quench line [default: anisotropy]
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioName>,
    /// Fixed anisotropy for the field line (dimensionless) [default: 0.5]
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Fixed dimerization (dimensionless) [default: 1.1 anisotropy, 1.5 otherwise]
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// Fixed field for the anisotropy line (units of J) [default: 0.5]
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<f64>,
    /// Quench amplitude nu_f (units of the swept parameter) [default: 0.3, 0.41, 0.28]
    #[arg(long, allow_hyphen_values = true)]
    pub nu_f: Option<f64>,
    /// First initial value nu_i [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub nu_min: Option<f64>,
    /// Last initial value nu_i [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub nu_max: Option<f64>,
    /// Spacing of nu_i [default: 0.01]
    #[arg(long)]
    pub nu_step: Option<f64>,
    /// Number of dimers (even) [default: 512]
    #[arg(long)]
    pub dimers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ChargeCurveArgs {
    /// Battery parameters gamma,delta,h (h in units of J)
    #[arg(long, allow_hyphen_values = true)]
    pub pre: Option<String>,
    /// Charger parameters gamma,delta,h (h in units of J)
    #[arg(long, allow_hyphen_values = true)]
    pub post: Option<String>,
    /// First charging time (units of 1/J) [default: 0]
    #[arg(long)]
    pub tau_min: Option<f64>,
    /// Last charging time (units of 1/J) [default: 50]
    #[arg(long)]
    pub tau_max: Option<f64>,
    /// Charging time spacing (units of 1/J) [default: 0.05]
    #[arg(long)]
    pub tau_step: Option<f64>,
    /// Number of dimers (even) [default: 256]
    #[arg(long)]
    pub dimers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated spin counts for the many-body checks [default: 4,8]
    #[arg(long)]
    pub sizes: Option<String>,
    /// Random parameter points per check [default: 20]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Seed of the parameter draws [default: 7]
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Fully resolved and validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub output: PathBuf,
    pub format: Format,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Dispersion {
        params: ModelParams,
        n_dimers: usize,
    },
    PhaseDiagram {
        field: f64,
        grid: usize,
        gap_samples: usize,
    },
    Sweep {
        scenario: QuenchScenario,
        nu_min: f64,
        nu_step: f64,
        nu_grid: Vec<f64>,
        n_dimers: usize,
    },
    ChargeCurve {
        pre: ModelParams,
        post: ModelParams,
        times: Vec<f64>,
        n_dimers: usize,
    },
    Verify {
        sizes: Vec<usize>,
        trials: usize,
        seed: u64,
    },
}

/// Values read from a `--config` file.
#[derive(Debug, Default)]
pub struct FileValues {
    path: PathBuf,
    values: BTreeMap<String, Value>,
}

impl FileValues {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Self> {
        let err = |message: String| CliError::ConfigParse {
            path: path.to_path_buf(),
            message,
        };
        let root: Value = serde_json::from_str(text)
            .map_err(|e| err(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        let Value::Object(map) = root else {
            return Err(err("expected a JSON object of flag values".into()));
        };
        let mut values = BTreeMap::new();
        for (key, value) in map {
            if value.is_object() || value.is_null() {
                return Err(err(format!(
                    "field `{key}` must be a number, string or list"
                )));
            }
            values.insert(key.replace('_', "-"), value);
        }
        Ok(Self {
            path: path.to_path_buf(),
            values,
        })
    }

    fn err(&self, key: &str, expected: &str) -> CliError {
        CliError::ConfigParse {
            path: self.path.clone(),
            message: format!("field `{key}` must be {expected}"),
        }
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| self.err(key, "a number")),
        }
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|x| Some(x as usize))
                .ok_or_else(|| self.err(key, "a non-negative integer")),
        }
    }

    /// Strings verbatim; lists of numbers joined with commas.
    fn text(&self, key: &str) -> Result<Option<String>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(Value::Number(n)) => Ok(Some(n.to_string())),
            Some(Value::Array(items)) => {
                let parts: Option<Vec<String>> = items
                    .iter()
                    .map(|x| x.as_number().map(|n| n.to_string()))
                    .collect();
                parts
                    .map(|p| Some(p.join(",")))
                    .ok_or_else(|| self.err(key, "a list of numbers"))
            }
            Some(_) => Err(self.err(key, "a string")),
        }
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for key in self.values.keys() {
            if !allowed.contains(&key.as_str()) && !GLOBAL_KEYS.contains(&key.as_str()) {
                return Err(self.err(key, &format!("one of: {}", allowed.join(", "))));
            }
        }
        Ok(())
    }
}

const GLOBAL_KEYS: &[&str] = &["out", "format", "threads"];

fn pick_f64(flag: Option<f64>, file: &FileValues, key: &str, default: f64) -> Result<f64> {
    let value = match flag {
        Some(v) => v,
        None => file.f64(key)?.unwrap_or(default),
    };
    if !value.is_finite() {
        return Err(CliError::usage(
            key,
            format!("{value} is not a finite number"),
        ));
    }
    Ok(value)
}

fn pick_usize(flag: Option<usize>, file: &FileValues, key: &str, default: usize) -> Result<usize> {
    Ok(match flag {
        Some(v) => v,
        None => file.usize(key)?.unwrap_or(default),
    })
}

fn pick_text(flag: Option<String>, file: &FileValues, key: &str) -> Result<Option<String>> {
    Ok(match flag {
        Some(v) => Some(v),
        None => file.text(key)?,
    })
}

fn parse_triple(key: &str, text: &str) -> Result<ModelParams> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(CliError::usage(
            key,
            format!("expected gamma,delta,h but got `{text}`"),
        ));
    }
    let mut values = [0.0; 3];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| CliError::usage(key, format!("`{part}` is not a number")))?;
    }
    ModelParams::new(values[0], values[1], values[2]).map_err(|e| CliError::usage(key, e))
}

fn check_dimers(n: usize) -> Result<usize> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(CliError::usage(
            "dimers",
            format!("must be even and at least 2, got {n}"),
        ));
    }
    Ok(n)
}

/// `min, min + step, ...` up to `max` inclusive (within round-off).
pub fn uniform_grid(
    min_key: &str,
    min: f64,
    max_key: &str,
    max: f64,
    step_key: &str,
    step: f64,
) -> Result<Vec<f64>> {
    if step <= 0.0 {
        return Err(CliError::usage(
            step_key,
            format!("must be positive, got {step}"),
        ));
    }
    if max < min {
        return Err(CliError::usage(
            max_key,
            format!("{max} is below --{min_key} {min}; the grid would be empty"),
        ));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| min + i as f64 * step).collect())
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let file = match &cli.config {
            Some(path) => FileValues::load(path)?,
            None => FileValues::default(),
        };
        Self::resolve(cli, &file)
    }

    pub fn resolve(cli: Cli, file: &FileValues) -> Result<Self> {
        let format = match cli.format {
            Some(f) => f,
            None => match file.text("format")?.as_deref() {
                None | Some("csv") => Format::Csv,
                Some("json") => Format::Json,
                Some(other) => {
                    return Err(CliError::usage(
                        "format",
                        format!("unknown format `{other}`"),
                    ))
                }
            },
        };
        let threads = match cli.threads {
            Some(t) => Some(t),
            None => file.usize("threads")?,
        };
        if threads == Some(0) {
            return Err(CliError::usage("threads", "must be at least 1"));
        }
        let name = cli.command.name();
        let output = match cli.out {
            Some(path) => path,
            None => match file.text("out")? {
                Some(path) => PathBuf::from(path),
                None => {
                    let dir = std::env::var_os(OUTPUT_DIR_ENV)
                        .map(PathBuf::from)
                        .unwrap_or_default();
                    dir.join(format!("{name}.{}", format.extension()))
                }
            },
        };

        let command = match cli.command {
            CommandArgs::Dispersion(a) => {
                file.check_keys(&["gamma", "delta", "h", "dimers"])?;
                let params = ModelParams::new(
                    pick_f64(a.gamma, file, "gamma", 0.0)?,
                    pick_f64(a.delta, file, "delta", 0.0)?,
                    pick_f64(a.h, file, "h", 0.0)?,
                )?;
                Command::Dispersion {
                    params,
                    n_dimers: check_dimers(pick_usize(a.dimers, file, "dimers", 64)?)?,
                }
            }
            CommandArgs::PhaseDiagram(a) => {
                file.check_keys(&["h-plane", "grid", "gap-samples"])?;
                let grid = pick_usize(a.grid, file, "grid", 200)?;
                if grid < 2 {
                    return Err(CliError::usage("grid", "needs at least 2 points per axis"));
                }
                let gap_samples = pick_usize(a.gap_samples, file, "gap-samples", 256)?;
                if gap_samples < qbat_core::dispersion::MIN_GAP_SAMPLES {
                    return Err(CliError::usage("gap-samples", "must be at least 64"));
                }
                Command::PhaseDiagram {
                    field: pick_f64(a.h_plane, file, "h-plane", 0.5)?,
                    grid,
                    gap_samples,
                }
            }
            CommandArgs::Sweep(a) => {
                file.check_keys(&[
                    "scenario", "gamma", "delta", "h", "nu-f", "nu-min", "nu-max", "nu-step",
                    "dimers",
                ])?;
                let kind = match a.scenario {
                    Some(s) => s,
                    None => match file.text("scenario")?.as_deref() {
                        None => ScenarioName::Anisotropy,
                        Some(s) => ScenarioName::from_str(s, true).map_err(|_| {
                            CliError::usage("scenario", format!("unknown scenario `{s}`"))
                        })?,
                    },
                };
                let scenario = match kind {
                    ScenarioName::Anisotropy => QuenchScenario::anisotropy(
                        pick_f64(a.delta, file, "delta", 1.1)?,
                        pick_f64(a.h, file, "h", 0.5)?,
                        pick_f64(a.nu_f, file, "nu-f", 0.3)?,
                    ),
                    ScenarioName::Field => QuenchScenario::field(
                        pick_f64(a.gamma, file, "gamma", 0.5)?,
                        pick_f64(a.delta, file, "delta", 1.5)?,
                        pick_f64(a.nu_f, file, "nu-f", 0.41)?,
                    ),
                    ScenarioName::Diagonal => QuenchScenario::diagonal(
                        pick_f64(a.delta, file, "delta", 1.5)?,
                        pick_f64(a.nu_f, file, "nu-f", 0.28)?,
                    ),
                };
                let nu_min = pick_f64(a.nu_min, file, "nu-min", 0.0)?;
                let nu_max = pick_f64(a.nu_max, file, "nu-max", 1.0)?;
                let nu_step = pick_f64(a.nu_step, file, "nu-step", 0.01)?;
                let nu_grid = uniform_grid("nu-min", nu_min, "nu-max", nu_max, "nu-step", nu_step)?;
                let n_dimers = check_dimers(pick_usize(a.dimers, file, "dimers", 512)?)?;
                Command::Sweep {
                    scenario,
                    nu_min,
                    nu_step,
                    nu_grid,
                    n_dimers,
                }
            }
            CommandArgs::ChargeCurve(a) => {
                file.check_keys(&["pre", "post", "tau-min", "tau-max", "tau-step", "dimers"])?;
                let pre = pick_text(a.pre, file, "pre")?
                    .ok_or_else(|| CliError::usage("pre", "is required"))?;
                let post = pick_text(a.post, file, "post")?
                    .ok_or_else(|| CliError::usage("post", "is required"))?;
                let tau_min = pick_f64(a.tau_min, file, "tau-min", 0.0)?;
                let tau_max = pick_f64(a.tau_max, file, "tau-max", 50.0)?;
                let tau_step = pick_f64(a.tau_step, file, "tau-step", 0.05)?;
                Command::ChargeCurve {
                    pre: parse_triple("pre", &pre)?,
                    post: parse_triple("post", &post)?,
                    times: uniform_grid(
                        "tau-min", tau_min, "tau-max", tau_max, "tau-step", tau_step,
                    )?,
                    n_dimers: check_dimers(pick_usize(a.dimers, file, "dimers", 256)?)?,
                }
            }
            CommandArgs::Verify(a) => {
                file.check_keys(&["sizes", "trials", "seed"])?;
                let sizes_text = pick_text(a.sizes, file, "sizes")?.unwrap_or_else(|| "4,8".into());
                let sizes = sizes_text
                    .split(',')
                    .map(|s| {
                        let n: usize = s.trim().parse().map_err(|_| {
                            CliError::usage("sizes", format!("`{s}` is not an integer"))
                        })?;
                        if !(qbat_ed::MIN_SITES..=qbat_ed::MAX_DENSE_SITES).contains(&n)
                            || !n.is_multiple_of(2)
                        {
                            return Err(CliError::usage(
                                "sizes",
                                format!("{n} must be even and in 4..=10"),
                            ));
                        }
                        if !n.is_multiple_of(4) {
                            return Err(CliError::usage(
                                "sizes",
                                format!("{n} spins give an odd number of dimers"),
                            ));
                        }
                        Ok(n)
                    })
                    .collect::<Result<Vec<_>>>()?;
                let seed = match a.seed {
                    Some(s) => s,
                    None => file.usize("seed")?.map(|s| s as u64).unwrap_or(7),
                };
                Command::Verify {
                    sizes,
                    trials: pick_usize(a.trials, file, "trials", 20)?,
                    seed,
                }
            }
        };
        Ok(RunConfig {
            command,
            output,
            format,
            threads,
        })
    }
}
