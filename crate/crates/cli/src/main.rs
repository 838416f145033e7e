//! `minplus` command-line tool.
//!
//! Exit status: 0 success, 1 verification mismatch, 2 usage or input error,
//! 3 refusal because a monomial budget is over its cap.

mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::RunReport;

#[derive(Parser, Debug)]
#[command(name = "minplus", version, about = "Min-plus products, APSP and friends")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the primary output here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Print the run report as JSON on stderr.
    #[arg(long, global = true)]
    json: bool,
    /// Also write the JSON run report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a seeded instance.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// All-pairs shortest paths on a matrix or edge-list file.
    Apsp {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ApspAlgo::Fw)]
        algo: ApspAlgo,
        #[command(flatten)]
        fast: FastArgs,
        /// Check against an independent algorithm (and repair decoded
        /// witnesses in the randomized product).
        #[arg(long)]
        verify: bool,
    },
    /// Min-plus product of two matrix files.
    Product {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = ProductAlgo::Naive)]
        algo: ProductAlgo,
        #[command(flatten)]
        fast: FastArgs,
        /// Compare with the naive product (no repair).
        #[arg(long)]
        verify: bool,
        /// Write the expanded output-bit polynomial of the first block.
        #[arg(long)]
        dump_poly: Option<PathBuf>,
    },
    /// Minimum-weight triangle of an edge-list graph.
    Triangle {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = TriangleMode::Dense)]
        mode: TriangleMode,
        /// Degree threshold for the sparse mode (default ⌈√m⌉).
        #[arg(long)]
        delta: Option<usize>,
        #[arg(long, value_enum, default_value_t = ProductAlgo::Naive)]
        algo: ProductAlgo,
        #[command(flatten)]
        fast: FastArgs,
    },
    /// Min-plus convolution of two 1×n matrix files.
    Convolve {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, value_enum, default_value_t = ConvolveMode::Naive)]
        mode: ConvolveMode,
        #[arg(long, value_enum, default_value_t = ProductAlgo::Naive)]
        algo: ProductAlgo,
        #[command(flatten)]
        fast: FastArgs,
    },
    /// Is a matrix a metric?
    Metric {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = ProductAlgo::Naive)]
        algo: ProductAlgo,
        #[command(flatten)]
        fast: FastArgs,
    },
    /// Size and depth of a circuit builder's output.
    CircuitStats {
        #[arg(long, value_enum)]
        kind: CircuitKind,
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long, default_value_t = 6)]
        t: usize,
        /// Weight bound for the inner-product circuit.
        #[arg(long, default_value_t = 7)]
        m: u64,
    },
    /// Run the structured field multiplier and its derived algorithms
    /// against the naive product.
    CoppersmithDemo {
        #[arg(long, default_value_t = 5)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, num_args = 1.., default_values_t = [DemoAlgo::Structured, DemoAlgo::Algorithm1, DemoAlgo::Algorithm2, DemoAlgo::Algorithm3])]
        algo: Vec<DemoAlgo>,
    },
    /// Operation-count benchmarks.
    Bench {
        #[arg(value_enum)]
        suite: BenchSuite,
        /// Comma-separated size grid (meaning depends on the suite).
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inner width for the accuracy and apsp suites.
        #[arg(long, default_value_t = 4)]
        d: usize,
        /// Add a wall-time column (makes the table run-dependent).
        #[arg(long)]
        timing: bool,
        #[arg(long, value_enum, default_value_t = TableFormat::Text)]
        format: TableFormat,
    },
}

#[derive(Subcommand, Debug)]
pub enum GenKind {
    /// Random graph in edge-list format.
    Graph {
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 100)]
        max: u64,
        #[arg(long)]
        undirected: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random matrix in matrix format.
    Matrix {
        rows: usize,
        cols: usize,
        #[arg(long, default_value_t = 100)]
        max: u64,
        /// Probability of each entry being INF.
        #[arg(long, default_value_t = 0.0)]
        p_inf: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random 1×n vector in matrix format.
    Vector {
        n: usize,
        #[arg(long, default_value_t = 100)]
        max: u64,
        #[arg(long, default_value_t = 0.0)]
        p_inf: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Configuration of the randomized product.
#[derive(Args, Debug, Clone)]
pub struct FastArgs {
    /// Inner block width.
    #[arg(long, default_value_t = 4)]
    pub d: usize,
    /// Repetitions per output bit (default 18⌈log2 n⌉).
    #[arg(long)]
    pub reps: Option<usize>,
    /// Outer approximator width (default 2 + ⌈log2 d⌉).
    #[arg(long)]
    pub e: Option<usize>,
    /// Comparator approximator width (default 3 + 2⌈log2 d⌉ + ⌈log2 t⌉).
    #[arg(long)]
    pub ep: Option<usize>,
    /// Output-bit evaluation: per pair, or expanded polynomial via an F2 product.
    #[arg(long, value_enum, default_value_t = Mode::Direct)]
    pub eval: Mode,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ApspAlgo {
    Fw,
    SquaringNaive,
    SquaringFast,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductAlgo {
    Naive,
    Fast,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Direct,
    Expanded,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriangleMode {
    Dense,
    Sparse,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvolveMode {
    Naive,
    Blocked,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CircuitKind {
    Adder,
    Leq,
    MinUnique,
    MinGeneral,
    Inner,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DemoAlgo {
    Structured,
    Algorithm1,
    Algorithm2,
    Algorithm3,
    Tensored,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchSuite {
    F2,
    Coppersmith,
    Accuracy,
    Apsp,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Text,
    Json,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Budget(String),
}

impl From<minplus::Error> for CliError {
    fn from(e: minplus::Error) -> Self {
        match e {
            minplus::Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Primary output plus report; `mismatch` makes the exit status 1.
pub struct Outcome {
    pub output: String,
    pub report: RunReport,
    pub mismatch: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .expect("thread pool is configured once");
    }
    let start = Instant::now();
    let result = commands::run(&cli.command);
    let mut outcome = match result {
        Ok(o) => o,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(CliError::Budget(msg)) => {
            eprintln!("refused: {msg}");
            return ExitCode::from(3);
        }
    };
    outcome.report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    outcome.report.checksum = report::checksum(outcome.output.as_bytes());
    if let Some(m) = &outcome.mismatch {
        outcome.report.verification = report::Verification::Mismatch;
        eprintln!("mismatch: {m}");
    }

    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.output),
        None => std::io::stdout().write_all(outcome.output.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let json = serde_json::to_string_pretty(&outcome.report).expect("report serializes");
    if cli.json {
        eprintln!("{json}");
    } else {
        eprintln!("{}", outcome.report.text_summary());
    }
    if let Some(path) = &cli.report {
        if let Err(e) = std::fs::write(path, format!("{json}\n")) {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if outcome.mismatch.is_some() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
