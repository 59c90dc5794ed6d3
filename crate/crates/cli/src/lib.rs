//! Command-line front end: basis zoo, analysis runs, verification suites
//! and bootstrap tables.
//!
//! Exit codes: `0` success, `1` failed verification, `2` configuration
//! error, `3` basis invariant violation.

pub mod analyze;
pub mod output;
pub mod verify;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use qgreedy::bases::{basis_to_json, zoo, ZooSpec, ZOO_NAMES};
use qgreedy::bootstrap::bootstrap_chain;
use qgreedy::{Basis, Error, Mode};

use output::{emit, Format, Section};

pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BASIS: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { code: EXIT_CONFIG, message: message.into() }
    }

    pub fn io(e: std::io::Error) -> Self {
        CliError::config(format!("i/o error: {e}"))
    }

    pub fn internal(e: impl fmt::Display) -> Self {
        CliError::config(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Biorthogonality { .. } | Error::NotABasis(_) | Error::DualsRequired { .. } => EXIT_BASIS,
            _ => EXIT_CONFIG,
        };
        CliError { code, message: e.to_string() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qgreedy", version, about = "Greedy approximation and democracy constants of finite bases")]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Democracy profile, basis constants and conditionality growth.
    Analyze(analyze::AnalyzeArgs),
    /// Run a property suite; exit 1 if any check fails.
    Verify(verify::VerifyArgs),
    /// Iterated sequence bootstrap starting from s ≡ 1.
    Bootstrap(BootstrapArgs),
    /// List or emit zoo bases.
    Zoo {
        #[command(subcommand)]
        action: ZooAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum ZooAction {
    List,
    /// Print a zoo basis as JSON (or write it to --out).
    Emit {
        #[command(flatten)]
        basis: BasisArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Basis source: a zoo family with parameters, or a JSON file.
#[derive(Debug, Clone, Args)]
pub struct BasisArgs {
    #[arg(long, value_parser = zoo_name)]
    pub zoo: Option<String>,
    /// Basis JSON file.
    #[arg(long, conflicts_with = "zoo")]
    pub basis: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Block sizes for block_l2, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub blocks: Option<Vec<usize>>,
    /// Perturbation size for perturbed_unit.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Seed of the perturbation for perturbed_unit.
    #[arg(long, default_value_t = 0)]
    pub zoo_seed: u64,
}

fn zoo_name(s: &str) -> Result<String, String> {
    if ZOO_NAMES.contains(&s) {
        Ok(s.to_string())
    } else {
        Err(format!("unknown zoo basis '{s}' (expected one of {})", ZOO_NAMES.join(", ")))
    }
}

impl BasisArgs {
    pub fn spec(&self) -> Result<ZooSpec, CliError> {
        if let Some(path) = &self.basis {
            return Ok(ZooSpec::CustomFile { path: path.clone() });
        }
        let name = self.zoo.as_deref().ok_or_else(|| CliError::config("one of --zoo or --basis is required"))?;
        let p = || self.p.ok_or_else(|| CliError::config(format!("--p is required for zoo basis {name}")));
        let dim = || self.dim.ok_or_else(|| CliError::config(format!("--dim is required for zoo basis {name}")));
        Ok(match name {
            "unit" => ZooSpec::Unit { dim: dim()?, p: p()? },
            "difference" => ZooSpec::Difference { dim: dim()?, p: p()? },
            "block_l2" => ZooSpec::BlockL2 {
                p: p()?,
                blocks: self.blocks.clone().ok_or_else(|| CliError::config("--blocks is required for block_l2"))?,
            },
            "perturbed_unit" => {
                ZooSpec::PerturbedUnit { dim: dim()?, p: p()?, epsilon: self.epsilon, seed: self.zoo_seed }
            }
            _ => return Err(CliError::config("custom_file bases are read with --basis FILE")),
        })
    }

    pub fn load(&self) -> Result<Basis, CliError> {
        Ok(zoo(&self.spec()?)?)
    }
}

/// Output options shared by report-producing commands.
#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Directory for one file per report table.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Search options shared by estimators.
#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value = "random", value_parser = parse_mode)]
    pub mode: Mode,
    #[arg(long, default_value_t = 10_000)]
    pub budget: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct BootstrapArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub max_m: usize,
    #[arg(long, default_value_t = 3)]
    pub iters: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn bootstrap_sections(args: &BootstrapArgs) -> Result<Vec<Section>, CliError> {
    let chain = bootstrap_chain::<f64>(args.max_m, args.iters)?;
    let json = serde_json::to_value(&chain).map_err(CliError::internal)?;
    Ok(vec![Section::from_csv("bootstrap", &chain.to_csv()?, json)?])
}

fn zoo_list(stdout: &mut dyn Write) -> Result<(), CliError> {
    let usage = [
        ("unit", "--p P --dim D"),
        ("difference", "--p P --dim D"),
        ("block_l2", "--p P --blocks N1,N2,..."),
        ("perturbed_unit", "--p P --dim D [--epsilon E] [--zoo-seed S]"),
        ("custom_file", "--basis FILE"),
    ];
    for (name, flags) in usage {
        writeln!(stdout, "{name:<16}{flags}").map_err(CliError::io)?;
    }
    Ok(())
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Analyze(args) => {
            let sections = analyze::run(args)?;
            emit(&sections, args.output.format, args.output.out.as_deref(), stdout)?;
            Ok(0)
        }
        Command::Verify(args) => verify::run(args, stdout),
        Command::Bootstrap(args) => {
            emit(&bootstrap_sections(args)?, args.output.format, args.output.out.as_deref(), stdout)?;
            Ok(0)
        }
        Command::Zoo { action: ZooAction::List } => zoo_list(stdout).map(|_| 0),
        Command::Zoo { action: ZooAction::Emit { basis, out } } => {
            let json = basis_to_json(&basis.load()?)? + "\n";
            match out {
                Some(path) => write_file(path, &json)?,
                None => stdout.write_all(json.as_bytes()).map_err(CliError::io)?,
            }
            Ok(0)
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(CliError::io)
}

/// Parses `args` (including the program name) and runs the command inside a
/// dedicated thread pool. Reports go to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let mut report = Vec::new();
    let result = pool.install(|| dispatch(&cli, &mut report));
    if let Err(e) = stdout.write_all(&report).and_then(|_| stdout.flush()) {
        let _ = writeln!(stderr, "error: i/o error: {e}");
        return EXIT_CONFIG;
    }
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}
