//! `heliumqc` batch front-end.
//!
//! Exit status:
//!
//! | code | meaning |
//! |------|---------|
//! | 0    | success |
//! | 1    | numerical failure (message names the module) |
//! | 2    | invalid config or circuit file (message names file, line, key) |
//! | 64   | usage error, including a `--config` path that cannot be read |
//! | 74   | output file could not be written |

mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Config, ConfigError};

pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "heliumqc", version, about = "Electrons-on-helium qubit simulator")]
pub struct Cli {
    /// Configuration file (`key = value unit` lines under [section] headers).
    /// Built-in defaults are used when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Print the effective configuration and exit.
    #[arg(long)]
    pub dump_config: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-site qubit parameters and the coupling matrix.
    Params(OutArgs),
    /// Vertical levels, matrix elements and Stark sensitivity at one field.
    Spectrum(SpectrumArgs),
    /// Driven single-site Rabi oscillation.
    Rabi(RabiArgs),
    /// Two-qubit Landau–Zener sweeps at α = 1 for a list of g.
    LzSweep(LzArgs),
    /// Compile and simulate a circuit file.
    Simulate(SimulateArgs),
    /// Relaxation and dephasing budget.
    Rates(RatesArgs),
    /// Compile a circuit file into a control schedule.
    Compile(CompileArgs),
    /// Tunneling readout rates and fidelities.
    Readout(ReadoutArgs),
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Pressing field, V/cm. Defaults to the field at --site, or the base field.
    #[arg(long, allow_negative_numbers = true)]
    pub field: Option<f64>,
    /// Take the pressing field of this site.
    #[arg(long, conflicts_with = "field")]
    pub site: Option<usize>,
    /// Number of levels to solve.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    /// CSV of (m, E_m) pairs.
    #[arg(long, value_name = "FILE")]
    pub levels_out: Option<PathBuf>,
    /// CSV of z, ψ₁, ψ₂ and V(z).
    #[arg(long, value_name = "FILE")]
    pub wavefunctions_out: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct RabiArgs {
    #[arg(long, default_value_t = 0)]
    pub site: usize,
    /// Microwave amplitude, V/cm. Defaults to the configured field.
    #[arg(long)]
    pub e_rf: Option<f64>,
    /// Drive duration, ns. Defaults to four Rabi periods.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Carrier detuning, rad/ns.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub detuning: f64,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Trajectory CSV (t_ns, p_excited, p_formula).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LzArgs {
    /// Comma-separated adiabaticity parameters.
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.45,1.0")]
    pub g: Vec<f64>,
    /// Half-span of the sweep in units of 1/√α. Defaults to the sweep tail
    /// criterion for the largest g.
    #[arg(long)]
    pub half_span: Option<f64>,
    #[arg(long, default_value_t = 401)]
    pub samples: usize,
    /// CSV with columns alpha_t, p2_g<g>...
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CircuitArgs {
    /// Circuit file, one gate per line.
    #[arg(long, value_name = "FILE")]
    pub circuit: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub circuit: CircuitArgs,
    /// Initial basis state as a bit string, character n = site n.
    #[arg(long)]
    pub initial: Option<String>,
    /// Evolve a density matrix with the relaxation budget.
    #[arg(long)]
    pub lindblad: bool,
    #[arg(long, default_value_t = 201)]
    pub samples: usize,
    /// Trajectory CSV.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    /// Working frequency Ω, s⁻¹. Defaults to the configured value.
    #[arg(long)]
    pub omega: Option<f64>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    #[command(flatten)]
    pub circuit: CircuitArgs,
    /// Schedule CSV.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReadoutArgs {
    /// Extraction field, V/cm. Defaults to the operating point.
    #[arg(long)]
    pub field: Option<f64>,
    /// Pulse duration, ns.
    #[arg(long, default_value_t = 100.0)]
    pub duration: f64,
    /// Ground-state escape probability that defines the operating point.
    #[arg(long, default_value_t = 1e-3)]
    pub target: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Config(String),
    Numerical(crate::Error),
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Numerical(_) => EXIT_NUMERICAL,
            Failure::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Config(m) => write!(f, "config: {m}"),
            Failure::Numerical(e) => write!(f, "{e}"),
            Failure::Io(m) => write!(f, "io: {m}"),
        }
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        Failure::Numerical(e)
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

/// Parse `argv` (including the program name), run, and return the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("heliumqc: {f}");
            f.exit_code()
        }
    }
}

pub fn load_config(path: Option<&PathBuf>) -> Result<Config, Failure> {
    let Some(path) = path else {
        return Ok(Config::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    Ok(Config::parse(&text, &path.display().to_string())?)
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let cfg = load_config(cli.config.as_ref())?;
    if cli.dump_config {
        print!("{cfg}");
        return Ok(());
    }
    let Some(cmd) = &cli.command else {
        return Err(Failure::Usage("a subcommand is required (see --help)".into()));
    };
    match cmd {
        Command::Params(a) => commands::params(&cfg, a),
        Command::Spectrum(a) => commands::spectrum(&cfg, a),
        Command::Rabi(a) => commands::rabi(&cfg, a),
        Command::LzSweep(a) => commands::lz_sweep(&cfg, a),
        Command::Simulate(a) => commands::simulate(&cfg, a),
        Command::Rates(a) => commands::rates(&cfg, a),
        Command::Compile(a) => commands::compile(&cfg, a),
        Command::Readout(a) => commands::readout(&cfg, a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_map_to_64() {
        assert_eq!(run(["heliumqc", "no-such-command"]), EXIT_USAGE);
        assert_eq!(run(["heliumqc"]), EXIT_USAGE);
        assert_eq!(
            run(["heliumqc", "--config", "/nonexistent/x.cfg", "params"]),
            EXIT_USAGE
        );
    }
}
