use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dualcore_vqe::experiments::{self, ExperimentConfig, ExperimentKind, OutputFormat};
use dualcore_vqe::Error;

const EXIT_CONFIG: u8 = 1;
const EXIT_RUNTIME: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "dcvqe", version, about = "Dual-core variational eigensolver experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Result file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Base seed for restart initialization.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Random restarts per training stage.
    #[arg(long, global = true)]
    restarts: Option<usize>,

    /// Adam iterations per restart.
    #[arg(long, global = true)]
    max_iterations: Option<usize>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Only log errors.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Transverse-field Ising field scan.
    Tfim,
    /// Anisotropic Heisenberg (J_y, J_z) grid.
    Xyz,
    /// Spin-1 Heisenberg chain size scan.
    Spin1,
    /// Remote-gate count sweep.
    SweepNi,
    /// All-to-all layer sweep.
    All2all,
    /// Separable, dual-core and all-to-all side by side.
    Compare,
    /// Run the built-in oracle and invariant checks.
    Validate,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Format {
    Csv,
    Json,
}

impl Command {
    fn kind(self) -> Option<ExperimentKind> {
        Some(match self {
            Command::Tfim => ExperimentKind::TfimScan,
            Command::Xyz => ExperimentKind::XyzGrid,
            Command::Spin1 => ExperimentKind::Spin1Scan,
            Command::SweepNi => ExperimentKind::InterconnectSweep,
            Command::All2all => ExperimentKind::AllToAllSweep,
            Command::Compare => ExperimentKind::CompareArchitectures,
            Command::Validate => return None,
        })
    }
}

fn exit_for(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(if err.is_config_error() { EXIT_CONFIG } else { EXIT_RUNTIME })
}

fn run_validate(quiet: bool) -> ExitCode {
    let checks = match experiments::run_validation() {
        Ok(c) => c,
        Err(e) => return exit_for(&e),
    };
    let mut failed = 0;
    for c in &checks {
        if !c.passed {
            failed += 1;
        }
        if !quiet || !c.passed {
            println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        eprintln!("{failed} of {} checks failed", checks.len());
        ExitCode::from(EXIT_RUNTIME)
    }
}

fn build_config(cli: &Cli, kind: ExperimentKind) -> Result<ExperimentConfig, Error> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::from_file_for(kind, path)?,
        None => ExperimentConfig::for_experiment(kind),
    };
    if let Some(out) = &cli.out {
        config.output = Some(out.clone());
    }
    if let Some(f) = cli.format {
        config.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    if let Some(seed) = cli.seed {
        config.training.rng_seed = seed;
    }
    if let Some(r) = cli.restarts {
        config.training.restarts = r;
    }
    if let Some(it) = cli.max_iterations {
        config.training.max_iterations = it;
    }
    if config.output.is_none() {
        return Err(Error::Config("no output path: pass --out or set \"output\" in the config".into()));
    }
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: could not start thread pool: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    }

    let Some(kind) = cli.command.kind() else {
        return run_validate(cli.quiet);
    };
    // anything that goes wrong while assembling the configuration, including
    // an unreadable config file, is a configuration error
    let config = match build_config(&cli, kind) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let out = config.output.clone().expect("checked in build_config");
    let rows = match experiments::run(&config) {
        Ok(r) => r,
        Err(e) => return exit_for(&e),
    };
    if let Err(e) = experiments::write_rows(&rows, &out, config.format) {
        return exit_for(&e);
    }
    let failed = rows.iter().filter(|r| !r.is_ok()).count();
    log::info!("wrote {} rows to {}", rows.len(), out.display());
    if failed > 0 {
        eprintln!("error: {failed} of {} rows failed; see the status column", rows.len());
        return ExitCode::from(EXIT_RUNTIME);
    }
    ExitCode::SUCCESS
}
