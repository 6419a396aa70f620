mod commands;
mod config;
mod files;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "bmst-ht",
    version,
    about = "Hadamard-transform coset codes and their block Markov superposition transmission"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Input-output weight enumerator of an [N, K] code.
    #[command(args_override_self = true)]
    Iowef(IowefArgs),
    /// Encoding-memory design table for all K of length N.
    #[command(args_override_self = true)]
    Design(DesignArgs),
    /// BMST-encode hex data blocks.
    #[command(args_override_self = true)]
    Encode(EncodeArgs),
    /// Sliding-window decode of channel LLR blocks.
    #[command(args_override_self = true)]
    Decode(DecodeArgs),
    /// Monte Carlo BER over an Eb/N0 sweep.
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Union-bound sweep, or genie-aided shift of a BER curve.
    #[command(args_override_self = true)]
    Bound(BoundArgs),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, short, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CodeArgs {
    /// Component code length N (a power of two).
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Component code dimension K.
    #[arg(long, default_value_t = 4)]
    k: usize,
}

#[derive(Args)]
struct BmstArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Copies B of C[N, K] in the basic code.
    #[arg(long, default_value_t = 1)]
    b: usize,
    /// Heterogeneous basic code as `N:KxB,...`, e.g. `4:1x2,4:2x1`; replaces --n, --k and --b.
    #[arg(long)]
    components: Option<String>,
    /// Number of data blocks L.
    #[arg(long, default_value_t = 10)]
    l: usize,
    /// Encoding memory m (interleavers available); defaults to --mk.
    #[arg(long)]
    m: Option<usize>,
    /// Active memory m_K.
    #[arg(long, default_value_t = 1)]
    mk: usize,
    /// Seed for interleavers, data and noise.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct WindowArgs {
    /// Decoding delay d; defaults to 2 m_K.
    #[arg(long)]
    d: Option<usize>,
    /// Maximum iterations per window position.
    #[arg(long, default_value_t = 18)]
    imax: usize,
    /// Inner SISO iterations J.
    #[arg(long, default_value_t = 3)]
    j: usize,
    /// Entropy stopping threshold.
    #[arg(long, default_value_t = 1e-5)]
    threshold: f64,
}

#[derive(Args)]
struct IowefArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Target BER for the union-bound operating point.
    #[arg(long, default_value_t = 1e-5)]
    target: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    bmst: BmstArgs,
    /// Data file: one hex line per information block.
    #[arg(long, value_name = "FILE")]
    data: PathBuf,
    /// Write L random blocks (from --seed) to --data before encoding.
    #[arg(long)]
    random_data: bool,
    /// Also write channel LLRs, one per line, blocks separated by blank lines.
    #[arg(long, value_name = "FILE")]
    llr_out: Option<PathBuf>,
    /// Eb/N0 (dB) of the AWGN channel for --llr-out; noiseless when absent.
    #[arg(long)]
    ebn0: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    bmst: BmstArgs,
    #[command(flatten)]
    window: WindowArgs,
    /// Channel LLR file as written by `encode --llr-out`.
    #[arg(long, value_name = "FILE")]
    llr: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SystemKind {
    Ht,
    Bmst,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = SystemKind::Ht)]
    system: SystemKind,
    #[command(flatten)]
    bmst: BmstArgs,
    #[command(flatten)]
    window: WindowArgs,
    /// Exhaustive MAP decoding instead of the iterative SISO (ht only).
    #[arg(long)]
    map: bool,
    /// Eb/N0 points in dB: `start:step:stop`, a comma list, or one value.
    #[arg(long, default_value = "0:1:6")]
    ebn0: String,
    #[arg(long, default_value_t = 10_000)]
    max_frames: u64,
    #[arg(long, default_value_t = 100)]
    max_errors: u64,
    /// Parallel frame workers; results do not depend on this.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Transmit all-zero data.
    #[arg(long)]
    all_zero: bool,
    /// Genie-aided bound CSV (bmst only): the basic code simulated at each
    /// point plus 10 log10(1 + m_K) dB.
    #[arg(long, value_name = "FILE")]
    genie_out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Union-bound Eb/N0 points (dB).
    #[arg(long, conflicts_with = "curve")]
    ebn0: Option<String>,
    /// Also report the Eb/N0 at which the union bound reaches this BER.
    #[arg(long)]
    target: Option<f64>,
    /// Basic-code BER curve CSV to shift into a genie-aided bound.
    #[arg(long, value_name = "FILE")]
    curve: Option<PathBuf>,
    /// Active memory m_K for the genie shift.
    #[arg(long, default_value_t = 0)]
    mk: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug)]
pub enum CliError {
    Arg(String),
    Io(String),
    Core(bmst_ht::Error),
}

impl From<bmst_ht::Error> for CliError {
    fn from(e: bmst_ht::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Arg(_) | CliError::Io(_) => 2,
            CliError::Core(bmst_ht::Error::Argument(_)) => 2,
            CliError::Core(bmst_ht::Error::Capability(_)) => 3,
            CliError::Core(bmst_ht::Error::Numeric(_)) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Arg(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            eprintln!("{}", rendered.lines().next().unwrap_or("error: invalid arguments"));
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Iowef(a) => commands::iowef(a),
        Command::Design(a) => commands::design(a),
        Command::Encode(a) => commands::encode(a),
        Command::Decode(a) => commands::decode(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Bound(a) => commands::bound(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
