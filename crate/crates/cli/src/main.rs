use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qpt_cli::render::{resources_csv, resources_markdown};
use qpt_cli::{dcqd_run, emit_report, run_experiment, CliError, ExperimentConfig};
use qpt_core::aapt_mub::mub_construct;
use qpt_core::channels::{read_channel_file, validate_channel, ChannelRef, ChiFile};
use qpt_core::stats::{required_samples, ChernoffQuery};
use qpt_core::{ChannelSpec, ChiMatrix};

const OUTPUT_DIR_ENV: &str = "QPT_OUTPUT_DIR";

#[derive(Parser)]
#[command(name = "qpt", version, about = "Quantum process tomography simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment file and write report.{csv,json,md}.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` and the QPT_OUTPUT_DIR variable.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Physical resource tables.
    Resources {
        #[command(subcommand)]
        command: ResourcesCommand,
    },
    /// Samples needed for good statistics.
    Chernoff(ChernoffArgs),
    /// Mutually unbiased bases.
    Mub {
        #[command(subcommand)]
        command: MubCommand,
    },
    /// Check a Kraus or χ file for CP, TP and Hermiticity.
    ValidateChannel {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Direct characterization runs.
    Dcqd {
        #[command(subcommand)]
        command: DcqdCommand,
    },
}

#[derive(Subcommand)]
enum ResourcesCommand {
    Table {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value_t = TableFormat::Md)]
        format: TableFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Md,
}

#[derive(Args)]
struct ChernoffArgs {
    /// Outcome probability; omit to assume a uniform distribution over `--nu` outcomes.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    nu: Option<u64>,
}

#[derive(Subcommand)]
enum MubCommand {
    Dump {
        #[arg(long)]
        m: usize,
    },
}

#[derive(Subcommand)]
enum DcqdCommand {
    Run {
        #[arg(long)]
        channel: ChannelSpec,
        /// Shots per configuration; omit for exact probabilities.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0.8)]
        alpha_sq: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn validation(field: &str, message: impl Into<String>) -> CliError {
    CliError::Validation { field: field.into(), message: message.into() }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, output_dir } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let dir = output_dir
                .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
                .unwrap_or_else(|| cfg.output_dir.clone());
            let report = run_experiment(&cfg)?;
            for path in emit_report(&report, &dir, &cfg.formats)? {
                println!("{}", path.display());
            }
            eprintln!("finished in {:.2?}", report.wall_time);
        }
        Command::Resources { command: ResourcesCommand::Table { n, format } } => {
            let text = match format {
                TableFormat::Csv => resources_csv(n)?,
                TableFormat::Md => resources_markdown(n)?,
            };
            print!("{text}");
        }
        Command::Chernoff(a) => {
            let q = match (a.p, a.nu) {
                (Some(_), Some(_)) => return Err(validation("p", "give either --p or --nu, not both")),
                (Some(p), None) => ChernoffQuery::new(p, a.delta, a.eps)?,
                (None, Some(nu)) => {
                    eprintln!("assuming a uniform distribution over {nu} outcomes (p = 1/{nu})");
                    ChernoffQuery::uniform(nu, a.delta, a.eps)?
                }
                (None, None) => return Err(validation("p", "one of --p or --nu is required")),
            };
            println!("{}", required_samples(&q));
        }
        Command::Mub { command: MubCommand::Dump { m } } => {
            let fam = mub_construct(m)?;
            for (k, class) in fam.pauli_classes.iter().enumerate() {
                let labels: Vec<String> = class.iter().map(|p| p.to_string()).collect();
                println!("{}: {}", k + 1, labels.join(" "));
            }
            println!("max overlap deviation: {:.3e}", fam.max_overlap_deviation());
        }
        Command::ValidateChannel { file, tol } => {
            let report = match read_channel_file(&file) {
                Ok(k) => validate_channel(ChannelRef::Kraus(&k), tol),
                Err(kraus_err) => {
                    let text = std::fs::read_to_string(&file)?;
                    let file = serde_json::from_str::<ChiFile>(&text).map_err(|_| kraus_err)?;
                    let chi = ChiMatrix::from_json(&file)?;
                    validate_channel(ChannelRef::Chi(&chi), tol)
                }
            };
            println!("{}", serde_json::to_string_pretty(&report)?);
            if !report.all_pass() {
                return Err(validation("channel", "not a valid CPTP map at the given tolerance"));
            }
        }
        Command::Dcqd { command: DcqdCommand::Run { channel, shots, alpha_sq, seed } } => {
            let report = dcqd_run(&channel, alpha_sq, shots, seed)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
