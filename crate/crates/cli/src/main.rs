//! `whitehead-kit`: sorting, distances, generators and benchmark suites for
//! labeled trees and trivalent graphs.
//!
//! Exit codes: 0 on success, 1 when an invariant or bound check fails,
//! 2 on bad input (including refused guards).

mod bench;
mod commands;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use whitehead_core::Execution;

pub use commands::Failure;

#[derive(Parser, Debug)]
#[command(name = "whitehead-kit", version, about = "Whitehead moves on labeled trees and trivalent graphs")]
pub struct Cli {
    /// Seed for every randomized artifact.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel work; 1 runs sequentially.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Lift size guards on generators and sweeps. Refused by exact oracle
    /// queries.
    #[arg(long, global = true)]
    pub guard_override: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    W,
    S,
}

impl From<MetricArg> for whitehead_core::oracle::Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::W => whitehead_core::oracle::Metric::W,
            MetricArg::S => whitehead_core::oracle::Metric::S,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reduce the height of a tree, sort it to T_n and check the bounds.
    Sort {
        /// Tree file, `-` for stdin, or a literal tree such as `((0,2),(1,3))`.
        tree: String,
        /// Write the replayable move script here.
        #[arg(long)]
        script: Option<PathBuf>,
        /// Write the per-phase trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Distance between two trees of the same complexity.
    Distance {
        tree1: String,
        tree2: String,
        #[arg(long, value_enum, default_value = "s")]
        metric: MetricArg,
        /// Exact BFS distance (small n only).
        #[arg(long, conflicts_with = "upper")]
        exact: bool,
        /// Constructive upper bound through T_n (the default).
        #[arg(long)]
        upper: bool,
        /// Write the upper-bound script here.
        #[arg(long)]
        script: Option<PathBuf>,
    },
    /// Generate a tree or graph.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        /// `n` for trees and random-metric, `g p` for graphs.
        params: Vec<usize>,
        /// Thickness for random-metric graphs.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Run a benchmark suite and emit CSV with bound-check columns.
    Bench {
        #[arg(value_enum)]
        suite: Suite,
        /// Instances per size for sort-scaling.
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Smallest exponent for sort-scaling sizes 2^k.
        #[arg(long, default_value_t = 4)]
        min_exp: u32,
        /// Largest exponent for sort-scaling sizes 2^k.
        #[arg(long, default_value_t = 16)]
        max_exp: u32,
        /// Complexity for ball-growth.
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, value_enum, default_value = "w")]
        metric: MetricArg,
    },
    /// Apply a move script to a tree and print the canonical result.
    Replay { tree: String, script: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    RandomTree,
    Caterpillar,
    Tn,
    LineGraph,
    BouquetGraph,
    RandomTrivalent,
    RandomMetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    SortScaling,
    BallGrowth,
    CheegerSweep,
    LipschitzSweep,
}

impl Cli {
    pub fn exec(&self) -> Execution {
        if self.jobs == Some(1) {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    /// Writes the main output to `--out` or stdout.
    pub fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input(anyhow::anyhow!("writing {}: {e}", path.display()))),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes()).map_err(|e| Failure::Check(e.into()))
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("WHITEHEAD_KIT_LOG", "warn")).init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        whitehead_core::exec::configure_threads(jobs.max(1));
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
