//! `rejscore`: command-line front end for the RejSCore model.
//!
//! Exit codes: 0 success, 1 I/O or internal error, 2 usage or parse error,
//! 3 unsupported security level, 4 memory capacity exceeded, 5 self-check or
//! KAT mismatch.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;

const FORMAT_HELP: &str = "Artifact formats:
  bin   packed 64-bit words, eight elements per word, first element in the most
        significant byte, words stored big-endian; the last word is zero-padded
  csv   one decimal element per line
  json  {\"level\", \"q\", \"n\", \"elements\": [...]}

Exit codes: 0 ok, 1 I/O error, 2 usage, 3 unsupported level, 4 capacity, 5 mismatch";

#[derive(Parser, Debug)]
#[command(name = "rejscore", version, about = "Rejection-sampling accelerator model for QR-UOV", after_help = FORMAT_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the golden sampler and write the field vector.
    Sample(SampleArgs),
    /// Run the cycle-level simulator and print a cycle report.
    Simulate(SimulateArgs),
    /// Generate or verify known-answer test files.
    Kat {
        #[command(subcommand)]
        mode: KatMode,
    },
    /// Compute ADP/PDP rows from a JSON list of platform metrics.
    Fom(FomArgs),
    /// Print parameter sets and address counts as JSON.
    Params {
        /// Security level (1, 3 or 5); all levels when omitted.
        #[arg(long)]
        level: Option<u8>,
    },
}

#[derive(Args, Debug, Clone)]
struct SeedArgs {
    /// Security level: 1, 3 or 5.
    #[arg(long, default_value_t = 1)]
    level: u8,
    /// AES-128 seed, 32 hex digits.
    #[arg(long, default_value = "00000000000000000000000000000000")]
    seed: String,
    /// Counter IV, 4 hex digits.
    #[arg(long, default_value = "0000")]
    iv: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Bin,
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    seed: SeedArgs,
    /// Artifact path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Bin)]
    format: Format,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    seed: SeedArgs,
    /// Clock frequency in Hz for the latency figure.
    #[arg(long, default_value_t = rejscore::hwsim::DEFAULT_FREQ_HZ)]
    freq: f64,
    /// Memory depth in 64-bit words.
    #[arg(long, default_value_t = rejscore::hwsim::DEFAULT_DEPTH)]
    mem_depth: usize,
    /// AES pipeline latency in cycles.
    #[arg(long)]
    aes_latency: Option<u32>,
    /// Cycles to write one AES block to memory.
    #[arg(long)]
    writeback_cycles: Option<u32>,
    /// Cycles between blocks for counter update.
    #[arg(long)]
    per_block_overhead: Option<u32>,
    /// Wrapper start-up cycles, including the two seed loads.
    #[arg(long)]
    wrapper_setup: Option<u32>,
    /// Sampling-unit start-up cycles.
    #[arg(long)]
    rejsamp_setup: Option<u32>,
    /// Program file (one hex instruction word per line) instead of the
    /// standard load/run/read sequence.
    #[arg(long)]
    program: Option<PathBuf>,
    /// CSV trace of unit events and memory accesses.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Output artifact path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Bin)]
    format: Format,
    /// Skip the comparison against the golden sampler.
    #[arg(long)]
    no_self_check: bool,
    /// Additionally self-check this many seeds derived from --seed.
    #[arg(long, value_name = "N")]
    ci_seeds: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum KatMode {
    /// Write keystream and field-vector cases derived from a master seed.
    Generate {
        #[arg(long)]
        out: PathBuf,
        /// Master seed for deriving case keys, 32 hex digits.
        #[arg(long, default_value = "00000000000000000000000000000000")]
        seed: String,
        /// Number of cases per security level.
        #[arg(long, default_value_t = 2)]
        count: usize,
        /// Security levels for field-vector cases.
        #[arg(long, value_delimiter = ',', default_value = "1,3,5")]
        levels: Vec<u8>,
    },
    /// Recompute every case of a KAT file.
    Verify { path: PathBuf },
}

#[derive(Args, Debug)]
struct FomArgs {
    /// JSON array of platform metrics.
    path: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Silicon area of one LUT in µm² at the FPGA node.
    #[arg(long, default_value_t = rejscore::fom::DEFAULT_UM2_PER_LUT)]
    um2_per_lut: f64,
    /// Node in nm that FPGA rows are scaled to (default: first ASIC node).
    #[arg(long)]
    target_nm: Option<f64>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sample(a) => commands::sample(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Kat { mode: KatMode::Generate { out, seed, count, levels } } => {
            commands::kat_generate(&out, &seed, count, &levels)
        }
        Command::Kat { mode: KatMode::Verify { path } } => commands::kat_verify(&path),
        Command::Fom(a) => commands::fom(&a),
        Command::Params { level } => commands::params(level),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
