use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use enantiosim::dynamics::HamiltonianKind;
use enantiosim_cli::commands::{self, CmdError, Ctx};
use enantiosim_cli::config::ScenarioConfig;

#[derive(Parser)]
#[command(
    name = "sim",
    about = "Cavity-assisted chirality discrimination: simulation and experiment harness",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario configuration (JSON); defaults reproduce the nominal point.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV/SVG/manifest files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Base RNG seed (noise ensembles derive per-run seeds from it).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Hamiltonian used for propagation.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Full)]
    mode: Mode,

    /// Worker threads for sweeps and ensembles (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Copy, Clone, ValueEnum)]
enum Mode {
    Full,
    Effective,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic A1 lower-bound surface over (A2, T).
    SurfaceA1,
    /// Quadrature and population time series for both enantiomers.
    Timeseries,
    /// Systematic-error sweeps (eta1..eta3 and the detuning-error grid).
    Systematic,
    /// Fifty-run AWGN ensemble with derived seeds.
    Awgn,
    /// Decoherence-rate sweeps, one rate at a time.
    Decoherence,
    /// Pulse-correction sweep and the early-measurement time scan.
    Correction,
    /// Invariant suite: oracle identities, convergence, reference record.
    Validate,
}

fn run() -> Result<(), CmdError> {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // ignore the error when a global pool already exists (tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    let config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CmdError::Config(format!("cannot read {}: {e}", path.display())))?;
            ScenarioConfig::from_json_str(&text).map_err(CmdError::Config)?
        }
        None => ScenarioConfig::default(),
    };
    match config.validate() {
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
        }
        Err(e) => return Err(CmdError::Config(e)),
    }
    let ctx = Ctx {
        config,
        out_dir: cli.out.clone(),
        base_seed: cli.seed,
        mode: match cli.mode {
            Mode::Full => HamiltonianKind::Full,
            Mode::Effective => HamiltonianKind::Effective,
        },
        threads: cli.threads,
    };
    match cli.command {
        Command::SurfaceA1 => commands::cmd_surface_a1(&ctx),
        Command::Timeseries => commands::cmd_timeseries(&ctx),
        Command::Systematic => commands::cmd_systematic(&ctx),
        Command::Awgn => commands::cmd_awgn(&ctx),
        Command::Decoherence => commands::cmd_decoherence(&ctx),
        Command::Correction => commands::cmd_correction(&ctx),
        Command::Validate => commands::cmd_validate(&ctx),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(CmdError::Physics(msg)) => {
            eprintln!("physics validation failed: {msg}");
            ExitCode::from(3)
        }
        Err(CmdError::Tolerance(msg)) => {
            eprintln!("validation tolerance breached: {msg}");
            ExitCode::from(4)
        }
        Err(CmdError::Other(e)) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
