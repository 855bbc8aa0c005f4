//! Flag and config-file handling.
//!
//! Every knob is available both as a flag and as a kebab-case key in a
//! JSON config file (`--config`); flags win over the file, the file wins
//! over built-in defaults. The resolved configuration is echoed to stderr
//! and written next to each output file as `<output>.meta.json`, in a
//! form that is itself a valid config file, so any run can be repeated
//! with `spinboson --config <output>.meta.json`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::Context;
use clap::{ArgAction, Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Map, Value};
use spinboson::{ModelParams, StateVector};

use crate::UsageError;

#[derive(Parser, Debug)]
#[command(name = "spinboson", version, about = "Spin-boson measurement model: spectra, special states, survival curves")]
pub struct Cli {
    /// JSON config file supplying defaults for any flag
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Two-state splitting ε
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,

    /// Oscillator frequency ω
    #[arg(long, global = true)]
    pub omega: Option<f64>,

    /// Coupling strength β
    #[arg(long, global = true)]
    pub beta: Option<f64>,

    /// Evolution time t
    #[arg(long, global = true)]
    pub time: Option<f64>,

    /// Number of oscillator levels kept
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,

    /// Non-decay threshold on the survival probability
    #[arg(long, global = true)]
    pub theta_hi: Option<f64>,

    /// Decay threshold on the survival probability
    #[arg(long, global = true)]
    pub theta_lo: Option<f64>,

    /// Bath state: vacuum | fock:<n> | file:<path>
    #[arg(long, global = true, value_name = "SPEC")]
    pub bath: Option<String>,

    /// Time grid start:stop:step (required by survival)
    #[arg(long, global = true, value_name = "START:STOP:STEP")]
    pub time_grid: Option<String>,

    /// Comma-separated cutoff list for converge
    #[arg(long, global = true, value_name = "LIST")]
    pub cutoffs: Option<String>,

    /// Output path (default <command>.<format>)
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Output format: csv | json
    #[arg(long, global = true)]
    pub format: Option<String>,

    /// Keep only this state class in special: all | non-decay | decay | intermediate
    #[arg(long, global = true, value_name = "CLASS")]
    pub class: Option<String>,

    /// Restrict figure rows to the state's own parity levels
    #[arg(long, global = true, action = ArgAction::SetTrue)]
    pub support_only: bool,

    #[command(subcommand)]
    pub command: Option<CommandKind>,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    /// Eigenvalues of the effective measurement operator, classified
    Spectrum,
    /// Full description of the special eigenstates
    Special,
    /// Spin-up survival probability over a time grid
    Survival,
    /// Spectrum summary as a function of the cutoff
    Converge,
    /// Occupation profiles of the top and bottom eigenstates
    Figure,
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CommandKind::Spectrum => "spectrum",
            CommandKind::Special => "special",
            CommandKind::Survival => "survival",
            CommandKind::Converge => "converge",
            CommandKind::Figure => "figure",
        })
    }
}

impl FromStr for CommandKind {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        match s {
            "spectrum" => Ok(CommandKind::Spectrum),
            "special" => Ok(CommandKind::Special),
            "survival" => Ok(CommandKind::Survival),
            "converge" => Ok(CommandKind::Converge),
            "figure" => Ok(CommandKind::Figure),
            other => Err(UsageError(format!("unknown command \"{other}\""))),
        }
    }
}

/// On-disk config schema; unknown keys are rejected so typos surface.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct ConfigFile {
    command: Option<String>,
    version: Option<String>,
    epsilon: Option<f64>,
    omega: Option<f64>,
    beta: Option<f64>,
    time: Option<f64>,
    cutoff: Option<usize>,
    theta_hi: Option<f64>,
    theta_lo: Option<f64>,
    bath: Option<String>,
    time_grid: Option<String>,
    cutoffs: Option<Vec<usize>>,
    output: Option<PathBuf>,
    format: Option<String>,
    class: Option<String>,
    support_only: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for OutputFormat {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(UsageError(format!(
                "unknown format \"{other}\" (expected csv or json)"
            ))),
        }
    }
}

/// Initial bath state specification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BathSpec {
    Vacuum,
    Fock(usize),
    /// JSON file holding an array of `[re, im]` amplitude pairs.
    File(PathBuf),
}

impl fmt::Display for BathSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BathSpec::Vacuum => f.write_str("vacuum"),
            BathSpec::Fock(n) => write!(f, "fock:{n}"),
            BathSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for BathSpec {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        if s == "vacuum" {
            return Ok(BathSpec::Vacuum);
        }
        if let Some(n) = s.strip_prefix("fock:") {
            let n: usize = n
                .parse()
                .map_err(|_| UsageError(format!("bad occupation number in bath spec \"{s}\"")))?;
            return Ok(BathSpec::Fock(n));
        }
        if let Some(p) = s.strip_prefix("file:") {
            if p.is_empty() {
                return Err(UsageError("empty path in bath spec".into()));
            }
            return Ok(BathSpec::File(PathBuf::from(p)));
        }
        Err(UsageError(format!(
            "unknown bath spec \"{s}\" (expected vacuum, fock:<n>, or file:<path>)"
        )))
    }
}

impl BathSpec {
    pub fn load(&self, cutoff: usize) -> anyhow::Result<StateVector> {
        match self {
            BathSpec::Vacuum => Ok(StateVector::vacuum(cutoff)?),
            BathSpec::Fock(n) => {
                if *n >= cutoff {
                    return Err(UsageError(format!(
                        "bath occupation {n} is out of range for cutoff {cutoff}"
                    ))
                    .into());
                }
                Ok(StateVector::basis_state(cutoff, *n)?)
            }
            BathSpec::File(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read bath file {}", path.display()))?;
                let pairs: Vec<[f64; 2]> = serde_json::from_str(&text)
                    .map_err(|e| UsageError(format!("bad bath file {}: {e}", path.display())))?;
                if pairs.len() != cutoff {
                    return Err(UsageError(format!(
                        "bath file holds {} amplitudes but cutoff is {cutoff}",
                        pairs.len()
                    ))
                    .into());
                }
                let amps: Vec<Complex64> =
                    pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
                let state = StateVector::from_amplitudes(amps)?;
                state.ensure_normalized()?;
                Ok(state)
            }
        }
    }
}

/// Uniform time grid `start, start+step, …` up to and including `stop`
/// (within half a step of round-off).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl fmt::Display for TimeGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

impl FromStr for TimeGrid {
    type Err = UsageError;

    fn from_str(s: &str) -> Result<Self, UsageError> {
        let bad = || UsageError(format!("bad time grid \"{s}\" (expected start:stop:step)"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let grid = TimeGrid {
            start: nums[0],
            stop: nums[1],
            step: nums[2],
        };
        if !(grid.start.is_finite() && grid.stop.is_finite() && grid.step.is_finite()) {
            return Err(bad());
        }
        if grid.step <= 0.0 || grid.stop < grid.start {
            return Err(UsageError(format!(
                "bad time grid \"{s}\": need step > 0 and stop ≥ start"
            )));
        }
        Ok(grid)
    }
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        // admit stop itself when rounding leaves it a hair past the last step
        let n = (((self.stop - self.start) / self.step) + 1e-9).floor() as usize;
        (0..=n).map(|i| self.start + i as f64 * self.step).collect()
    }
}

/// Everything a run needs, fully resolved and validated.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub params: ModelParams,
    pub bath: BathSpec,
    pub time_grid: Option<TimeGrid>,
    pub cutoffs: Vec<usize>,
    pub output: PathBuf,
    pub format: OutputFormat,
    pub class: spinboson::ClassFilter,
    pub support_only: bool,
}

pub const DEFAULT_CUTOFFS: [usize; 5] = [50, 100, 150, 200, 250];

pub fn resolve(cli: Cli) -> anyhow::Result<RunConfig> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                UsageError(format!("cannot read config file {}: {e}", path.display()))
            })?;
            serde_json::from_str::<ConfigFile>(&text).map_err(|e| {
                UsageError(format!("bad config file {}: {e}", path.display()))
            })?
        }
        None => ConfigFile::default(),
    };

    let file_command = file.command.as_deref().map(CommandKind::from_str).transpose()?;
    let command = match (cli.command, file_command) {
        (Some(c), Some(f)) if c != f => {
            return Err(UsageError(format!(
                "command \"{c}\" conflicts with \"{f}\" from the config file"
            ))
            .into());
        }
        (Some(c), _) => c,
        (None, Some(f)) => f,
        (None, None) => {
            return Err(UsageError(
                "no command given; pass one or use a config file that names one".into(),
            )
            .into());
        }
    };

    let defaults = ModelParams::default();
    let params = ModelParams {
        epsilon: cli.epsilon.or(file.epsilon).unwrap_or(defaults.epsilon),
        omega: cli.omega.or(file.omega).unwrap_or(defaults.omega),
        beta: cli.beta.or(file.beta).unwrap_or(defaults.beta),
        time: cli.time.or(file.time).unwrap_or(defaults.time),
        cutoff: cli.cutoff.or(file.cutoff).unwrap_or(defaults.cutoff),
        hbar: defaults.hbar,
        theta_hi: cli.theta_hi.or(file.theta_hi).unwrap_or(defaults.theta_hi),
        theta_lo: cli.theta_lo.or(file.theta_lo).unwrap_or(defaults.theta_lo),
    };
    params.validate()?;

    let bath: BathSpec = match cli.bath.or(file.bath) {
        Some(s) => s.parse()?,
        None => BathSpec::Vacuum,
    };

    let time_grid: Option<TimeGrid> = match cli.time_grid.or(file.time_grid) {
        Some(s) => Some(s.parse()?),
        None => None,
    };

    let cutoffs: Vec<usize> = match cli.cutoffs {
        Some(s) => s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| UsageError(format!("bad cutoff \"{p}\" in --cutoffs")))
            })
            .collect::<Result<_, _>>()?,
        None => file.cutoffs.unwrap_or_else(|| DEFAULT_CUTOFFS.to_vec()),
    };

    let format: OutputFormat = match cli.format.or(file.format) {
        Some(s) => s.parse()?,
        None => OutputFormat::Csv,
    };

    let class: spinboson::ClassFilter = match cli.class.or(file.class) {
        Some(s) => s.parse()?,
        None => spinboson::ClassFilter::All,
    };

    let support_only = if cli.support_only {
        true
    } else {
        file.support_only.unwrap_or(false)
    };

    let output = cli
        .output
        .or(file.output)
        .unwrap_or_else(|| PathBuf::from(format!("{command}.{}", format.extension())));

    let _ = file.version; // informational only

    Ok(RunConfig {
        command,
        params,
        bath,
        time_grid,
        cutoffs,
        output,
        format,
        class,
        support_only,
    })
}

impl RunConfig {
    /// The sidecar/echo document. Round-trips: feeding it back through
    /// `--config` resolves to this same configuration.
    pub fn to_json(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("command".into(), json!(self.command.to_string()));
        doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        doc.insert("epsilon".into(), json!(self.params.epsilon));
        doc.insert("omega".into(), json!(self.params.omega));
        doc.insert("beta".into(), json!(self.params.beta));
        doc.insert("time".into(), json!(self.params.time));
        doc.insert("cutoff".into(), json!(self.params.cutoff));
        doc.insert("theta-hi".into(), json!(self.params.theta_hi));
        doc.insert("theta-lo".into(), json!(self.params.theta_lo));
        doc.insert("bath".into(), json!(self.bath.to_string()));
        if let Some(grid) = &self.time_grid {
            doc.insert("time-grid".into(), json!(grid.to_string()));
        }
        doc.insert("cutoffs".into(), json!(self.cutoffs));
        doc.insert("output".into(), json!(self.output.display().to_string()));
        doc.insert("format".into(), json!(self.format.to_string()));
        doc.insert("class".into(), json!(self.class.to_string()));
        doc.insert("support-only".into(), json!(self.support_only));
        Value::Object(doc)
    }
}

/// `<data file>.meta.json`.
pub fn sidecar_path(data_path: &Path) -> PathBuf {
    let mut name = data_path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}
