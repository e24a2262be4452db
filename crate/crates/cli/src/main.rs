use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::warn;

use pcircuit::interface::{
    cmd_infer, cmd_oracle, cmd_sweep, cmd_train, resolve_out_dir, InferRequest, RunConfig,
};
use pcircuit::{ClampSpec, Error};

#[derive(Parser)]
#[command(
    name = "pcircuit",
    version,
    about = "Clockless probabilistic learning circuit simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train weights from a run config.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Run only this seed instead of the configured list.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a frozen network and record its state histogram.
    Infer {
        #[arg(long)]
        weights: PathBuf,
        /// Pinned units, e.g. `0=1,3=-1`.
        #[arg(long, default_value = "")]
        clamp: String,
        #[arg(long, default_value_t = 1.0)]
        i0: f64,
        #[arg(long, default_value_t = 2000.0)]
        duration_ns: f64,
        #[arg(long, default_value_t = 0.1)]
        tau_n_ns: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact Boltzmann distribution of a weight snapshot.
    Oracle {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        i0: f64,
        /// Target for KL: full_adder, digits or uniform:<n>.
        #[arg(long)]
        ideal: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the config's parameter grid over its seeds.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_)
        | Error::InvalidParameter { .. }
        | Error::InvalidBipolar { .. }
        | Error::DimensionMismatch { .. }
        | Error::CorruptSnapshot(_)
        | Error::SchemaVersion { .. } => 1,
        _ => 2,
    }
}

fn load_config(path: &std::path::Path) -> Result<RunConfig, Error> {
    let config = RunConfig::load(path)?;
    for w in &config.warnings {
        warn!("{}: {w}", path.display());
    }
    Ok(config)
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Train { config, seed, out } => {
            let config = load_config(&config)?;
            let out = resolve_out_dir(
                out.as_deref(),
                config.out_dir.as_deref(),
                config.experiment.name(),
            );
            for s in cmd_train(&config, seed, &out)? {
                println!(
                    "seed {}: final KL {:.6} nats -> {}",
                    s.seed,
                    s.final_kl,
                    s.dir.display()
                );
            }
        }
        Command::Infer {
            weights,
            clamp,
            i0,
            duration_ns,
            tau_n_ns,
            seed,
            out,
        } => {
            let out = resolve_out_dir(out.as_deref(), None, "infer");
            let req = InferRequest {
                weights,
                clamp: ClampSpec::parse(&clamp)?,
                i0,
                duration_ns,
                seed,
                tau_n_ns,
            };
            let summary = cmd_infer(&req, &out)?;
            println!(
                "{} distinct states visited, entropy {:.6} nats -> {}",
                summary
                    .histogram
                    .probs()
                    .iter()
                    .filter(|&&p| p > 0.0)
                    .count(),
                summary.histogram.entropy(),
                out.display()
            );
            if let Some(report) = summary.completion {
                println!(
                    "completion: {}/{} digits matched",
                    report.matches(),
                    report.rows.len()
                );
            }
        }
        Command::Oracle {
            weights,
            i0,
            ideal,
            out,
        } => {
            let out = resolve_out_dir(out.as_deref(), None, "oracle");
            let summary = cmd_oracle(&weights, i0, ideal.as_deref(), &out)?;
            print!("entropy {:.6} nats", summary.entropy);
            if let Some(kl) = summary.kl {
                print!(", KL {kl:.6} nats");
            }
            println!(" -> {}", out.display());
        }
        Command::Sweep { config, seed, out } => {
            let config = load_config(&config)?;
            let out = resolve_out_dir(out.as_deref(), config.out_dir.as_deref(), "sweep");
            let rows = cmd_sweep(&config, seed, &out)?;
            let failed = rows.iter().filter(|r| r.result.is_err()).count();
            println!("{} rows ({failed} failed) -> {}", rows.len(), out.display());
        }
    }
    Ok(())
}
