mod commands;
mod error;
mod run_dir;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rbkit::closed_form::BoundVariant;
use rbkit::engine::UNIFORM_GROUP_CAP;
use rbkit::GroupName;

use crate::error::{CliError, CliResult};

const DEFAULT_OUT_DIR: &str = "rbkit-out";

#[derive(Parser)]
#[command(name = "rbkit", version, about = "Randomized benchmarking with restricted Clifford groups")]
struct Cli {
    /// Worker threads (defaults to all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Single,
    Double,
}

#[derive(Subcommand)]
enum Command {
    /// Orbit blocks of the Paulis under a group
    Blocks {
        #[arg(long)]
        group: GroupName,
        #[arg(long, short)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Decay eigenvalues of a twirled channel from its block probabilities
    Lambdas {
        #[arg(long)]
        group: GroupName,
        #[arg(long, short)]
        n: usize,
        /// Block probabilities p_1,p_2,...
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
    },
    /// Compares a brute-force group twirl of a channel with the block predictions
    TwirlVerify {
        #[arg(long)]
        group: GroupName,
        #[arg(long, short)]
        n: usize,
        /// Channel file: {"n": .., "weights": [{"pauli": "XZ", "w": ..}]}
        channel: PathBuf,
        /// Largest group to enumerate.
        #[arg(long, default_value_t = UNIFORM_GROUP_CAP)]
        cap: usize,
    },
    /// Runs an RB experiment from a JSON or TOML config
    Simulate {
        config: PathBuf,
        #[arg(long, env = "RBKIT_OUT_DIR", default_value = DEFAULT_OUT_DIR)]
        out: PathBuf,
        /// Overrides the config's rng_seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fits decay curves to fidelity CSVs and optionally bounds the infidelity
    Fit {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Model::Single)]
        model: Model,
        #[arg(long)]
        group: Option<GroupName>,
        #[arg(long)]
        variant: Option<BoundVariant>,
        #[arg(long, short)]
        n: Option<usize>,
        /// Bootstrap resamples for the decay-constant errors.
        #[arg(long)]
        bootstrap: Option<usize>,
        /// Seed for bootstrap resampling.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "RBKIT_OUT_DIR")]
        out: Option<PathBuf>,
    },
    /// Consolidated analytic-vs-simulated report for a simulate output directory
    Report { run_dir: PathBuf },
}

fn print_json<T: serde::Serialize>(value: &T) {
    print!("{}", run_dir::to_json(value));
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Blocks { group, n, format } => {
            let r = commands::blocks(group, n)?;
            match format {
                Format::Table => print!("{}", commands::blocks_table(&r)),
                Format::Json => print_json(&r),
            }
        }
        Command::Lambdas { group, n, p } => print_json(&commands::lambdas(group, n, &p)?),
        Command::TwirlVerify { group, n, channel, cap } => {
            let r = commands::twirl_verify(group, n, &channel, cap)?;
            print_json(&r);
            if !r.pass {
                return Err(CliError::Numerical("twirl deviations exceed the tolerance".into()));
            }
        }
        Command::Simulate { config, out, seed } => print_json(&commands::simulate(&config, &out, seed)?),
        Command::Fit {
            csv,
            model,
            group,
            variant,
            n,
            bootstrap,
            seed,
            out,
        } => {
            let req = commands::FitRequest {
                csvs: &csv,
                order: match model {
                    Model::Single => 1,
                    Model::Double => 2,
                },
                group,
                variant,
                n,
                bootstrap,
                seed,
                out_dir: out.as_deref(),
            };
            print_json(&commands::fit(&req)?);
        }
        Command::Report { run_dir } => {
            let r = commands::report(&run_dir)?;
            for w in &r.warnings {
                eprintln!("warning: {w}");
            }
            print_json(&r);
            if !r.pass {
                return Err(CliError::Numerical("simulated decay disagrees with the prediction".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rbkit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
