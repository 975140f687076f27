//! Flag definitions, config-file splicing and the resolved run configuration.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heunbound_core::{Case, SignConvention};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MAX_SWEEP: u32 = 64;
const DEFAULT_VERIFY_TOL: f64 = 2e-3;

#[derive(Debug, Parser)]
#[command(name = "heunbound", version, about = "Permitted frequencies, energy levels and wavefunctions of the Klein-Gordon oscillator with Coulomb-type and linear scalar potentials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Permitted oscillator frequencies for one (n, l).
    #[command(args_override_self = true)]
    Frequency(FrequencyArgs),
    /// Energy levels over n = 1..=n-max and l = -l-max..=l-max.
    #[command(args_override_self = true)]
    Spectrum(SpectrumArgs),
    /// Cross-check permitted frequencies against the finite-difference oracle.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
    /// Normalized radial wavefunction samples.
    #[command(args_override_self = true)]
    Wavefunction(WavefunctionArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Derived,
    Printed,
}

#[derive(Debug, Args)]
pub struct Common {
    /// A: Coulomb-type term only; B: with linear scalar potential.
    #[arg(long, value_enum, ignore_case = true)]
    pub case: Option<CaseArg>,
    #[arg(long, required_unless_present = "from_json")]
    pub m: Option<f64>,
    /// Coulomb-type coupling.
    #[arg(long, allow_negative_numbers = true, required_unless_present = "from_json")]
    pub a: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub chi: f64,
    /// Sign convention of the Coulomb parameter in the recurrence.
    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Flat key=value file; flags on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Re-run the configuration embedded in a previous JSON output.
    #[arg(long, conflicts_with_all = ["case", "m", "a", "chi", "convention"])]
    pub from_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub omega_min: Option<f64>,
    #[arg(long)]
    pub omega_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FrequencyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0)]
    pub l: i32,
    #[command(flatten)]
    pub scan: ScanArgs,
    /// Truncation tolerance.
    #[arg(long, default_value_t = heunbound_core::series::DEFAULT_TRUNCATION_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1)]
    pub n_max: i64,
    #[arg(long, default_value_t = 0)]
    pub l_max: u32,
    #[command(flatten)]
    pub scan: ScanArgs,
    #[arg(long, default_value_t = heunbound_core::series::DEFAULT_TRUNCATION_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0)]
    pub l: i32,
    #[command(flatten)]
    pub scan: ScanArgs,
    /// Relative tolerance between analytic and oracle eigenvalues.
    #[arg(long, default_value_t = DEFAULT_VERIFY_TOL)]
    pub tol: f64,
    /// Oracle grid points.
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Multiplier on the default oracle domain.
    #[arg(long)]
    pub rho_max_scale: Option<f64>,
    /// Skip quantization and check this frequency.
    #[arg(long)]
    pub force_omega: Option<f64>,
}

#[derive(Debug, Args)]
pub struct WavefunctionArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0)]
    pub l: i32,
    #[command(flatten)]
    pub scan: ScanArgs,
    /// Which permitted frequency, in ascending order.
    #[arg(long, default_value_t = 0)]
    pub root_index: usize,
    /// Sample count (odd).
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Multiplier on the default range 10/sqrt(varpi).
    #[arg(long)]
    pub rho_max_scale: Option<f64>,
    #[arg(long)]
    pub force_omega: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Frequency,
    Spectrum,
    Verify,
    Wavefunction,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Frequency => "frequency",
            CommandKind::Spectrum => "spectrum",
            CommandKind::Verify => "verify",
            CommandKind::Wavefunction => "wavefunction",
        }
    }
}

/// Fully resolved inputs of one run; embedded in JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    pub case: Case,
    pub convention: SignConvention,
    pub m: f64,
    pub a: f64,
    pub chi: f64,
    pub n: Option<u32>,
    pub l: Option<i32>,
    pub n_max: Option<u32>,
    pub l_max: Option<u32>,
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub tol: f64,
    pub grid_n: Option<usize>,
    pub rho_max_scale: Option<f64>,
    pub force_omega: Option<f64>,
    pub root_index: Option<usize>,
    pub format: Format,
}

/// Where the resolved configuration comes from.
pub enum Source {
    Flags(RunConfig),
    Json(PathBuf),
}

pub struct Invocation {
    pub command: CommandKind,
    pub source: Source,
    pub output: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Inserts `--key value` pairs from a `--config` file ahead of the user's
/// own flags, so the latter win under `args_override_self`.
pub fn splice_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut path = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let s = arg.to_string_lossy().into_owned();
        if s == "--config" {
            let p = it.next().ok_or_else(|| usage("--config needs a path"))?;
            path = Some(PathBuf::from(p));
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else { return Ok(rest) };
    if rest.len() < 2 {
        return Err(usage("--config must follow a subcommand"));
    }
    let text = std::fs::read_to_string(&path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut spliced: Vec<OsString> = rest[..2].to_vec();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            usage(format!("{}:{}: expected key=value", path.display(), lineno + 1))
        })?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() || matches!(key.as_str(), "config" | "from-json") {
            return Err(usage(format!("{}:{}: key '{}' not allowed", path.display(), lineno + 1, k.trim())));
        }
        spliced.push(format!("--{key}={}", v.trim()).into());
    }
    spliced.extend_from_slice(&rest[2..]);
    Ok(spliced)
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be finite and > 0, got {v}")))
    }
}

fn resolve_case(case: Option<CaseArg>, chi: f64) -> Result<Case, CliError> {
    if !(chi.is_finite() && chi >= 0.0) {
        return Err(usage(format!("--chi must be finite and >= 0, got {chi}")));
    }
    match (case, chi > 0.0) {
        (Some(CaseArg::A), true) => Err(usage("case A has no linear potential; drop --chi or use --case B")),
        (Some(CaseArg::B), false) => Err(usage("case B needs --chi > 0")),
        (_, true) => Ok(Case::B),
        (_, false) => Ok(Case::A),
    }
}

fn base(command: CommandKind, c: &Common, tol: f64, scan: &ScanArgs) -> Result<RunConfig, CliError> {
    let case = resolve_case(c.case, c.chi)?;
    let convention = match c.convention {
        Some(ConventionArg::Derived) => SignConvention::Derived,
        Some(ConventionArg::Printed) => SignConvention::Printed,
        None => SignConvention::default_for(case),
    };
    positive("tol", tol)?;
    if let Some(v) = scan.omega_min {
        positive("omega-min", v)?;
    }
    if let Some(v) = scan.omega_max {
        positive("omega-max", v)?;
    }
    Ok(RunConfig {
        command,
        case,
        convention,
        m: c.m.expect("required by clap"),
        a: c.a.expect("required by clap"),
        chi: c.chi,
        n: None,
        l: None,
        n_max: None,
        l_max: None,
        omega_min: scan.omega_min,
        omega_max: scan.omega_max,
        tol,
        grid_n: None,
        rho_max_scale: None,
        force_omega: None,
        root_index: None,
        format: c.format,
    })
}

fn grid_options(cfg: &mut RunConfig, grid_n: Option<usize>, scale: Option<f64>, force: Option<f64>) -> Result<(), CliError> {
    if let Some(s) = scale {
        positive("rho-max-scale", s)?;
    }
    if let Some(w) = force {
        positive("force-omega", w)?;
    }
    cfg.grid_n = grid_n;
    cfg.rho_max_scale = scale;
    cfg.force_omega = force;
    Ok(())
}

impl Cli {
    pub fn into_invocation(self) -> Result<Invocation, CliError> {
        let (command, common) = match &self.command {
            Command::Frequency(a) => (CommandKind::Frequency, &a.common),
            Command::Spectrum(a) => (CommandKind::Spectrum, &a.common),
            Command::Verify(a) => (CommandKind::Verify, &a.common),
            Command::Wavefunction(a) => (CommandKind::Wavefunction, &a.common),
        };
        let output = common.output.clone();
        if let Some(path) = &common.from_json {
            return Ok(Invocation {
                command,
                source: Source::Json(path.clone()),
                output,
            });
        }
        let cfg = match self.command {
            Command::Frequency(a) => {
                let mut cfg = base(command, &a.common, a.tol, &a.scan)?;
                cfg.n = Some(a.n);
                cfg.l = Some(a.l);
                cfg
            }
            Command::Spectrum(a) => {
                let mut cfg = base(command, &a.common, a.tol, &a.scan)?;
                if a.n_max > MAX_SWEEP as i64 || a.l_max > MAX_SWEEP {
                    return Err(usage(format!("--n-max and --l-max must be <= {MAX_SWEEP}")));
                }
                cfg.n_max = Some(a.n_max.max(0) as u32);
                cfg.l_max = Some(a.l_max);
                cfg
            }
            Command::Verify(a) => {
                let mut cfg = base(command, &a.common, a.tol, &a.scan)?;
                cfg.n = Some(a.n);
                cfg.l = Some(a.l);
                grid_options(&mut cfg, a.grid_n, a.rho_max_scale, a.force_omega)?;
                cfg
            }
            Command::Wavefunction(a) => {
                let mut cfg = base(command, &a.common, heunbound_core::series::DEFAULT_TRUNCATION_TOL, &a.scan)?;
                cfg.n = Some(a.n);
                cfg.l = Some(a.l);
                cfg.root_index = Some(a.root_index);
                grid_options(&mut cfg, a.grid_n, a.rho_max_scale, a.force_omega)?;
                cfg
            }
        };
        Ok(Invocation {
            command,
            source: Source::Flags(cfg),
            output,
        })
    }
}
