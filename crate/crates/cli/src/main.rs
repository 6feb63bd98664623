//! `olcodes`: build, verify, bound, search and simulate overlap-free codes.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit status of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A code, family or latency claim failed its check.
    VerificationFailed,
    /// A budget or cap stopped the work early; output is partial.
    Budget,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::VerificationFailed => 1,
            Status::Budget => 3,
        }
    }
}

/// Exit code for usage and input errors.
const USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "olcodes", version, about = "Codes with restricted overlap lengths")]
pub struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for sampling and random insertions.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Log filter, e.g. warn, info, debug.
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: String,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a code from a construction spec and a partition family.
    Construct(ConstructArgs),
    /// Check a code file against an overlap window.
    Verify(VerifyArgs),
    /// Report every bound for one window, or sweep all windows.
    Bounds(BoundsArgs),
    /// Exhaustive search for a maximum code.
    Search(SearchArgs),
    /// Reproduce the Construction 2 tables grown from maximum non-overlapping codes.
    Tables(TablesArgs),
    /// Run a code through a burst insertion/deletion channel.
    Simulate(SimulateArgs),
    /// Enumerate, count or validate partition families.
    Families(FamiliesArgs),
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// JSON spec: {"kind", "n", "k"/"t1"/"t2", "family"}; the family path is
    /// relative to the spec file.
    #[arg(long)]
    pub spec: PathBuf,
    /// Family file, overriding the one named in the spec.
    #[arg(long)]
    pub family: Option<PathBuf>,
    /// Code file to write; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report to write; a summary goes to stderr if absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Largest code to materialize.
    #[arg(long)]
    pub cap: Option<u64>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub code: PathBuf,
    /// Window to check; defaults to the one declared in the file.
    #[arg(long, requires = "t2")]
    pub t1: Option<usize>,
    #[arg(long, requires = "t1")]
    pub t2: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub n: usize,
    /// Window; all windows of length n when omitted.
    #[arg(long, requires = "t2")]
    pub t1: Option<usize>,
    #[arg(long, requires = "t1")]
    pub t2: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Auto,
    Clique,
    Roles,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub t1: usize,
    #[arg(long)]
    pub t2: usize,
    /// Branch-and-bound node budget.
    #[arg(long)]
    pub budget_nodes: Option<u64>,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    pub budget_secs: Option<f64>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    pub strategy: StrategyArg,
    /// Disable symmetry reduction.
    #[arg(long)]
    pub no_symmetry: bool,
    /// Only decide whether every code has at most this many words.
    #[arg(long)]
    pub at_most: Option<usize>,
    /// Also write the witness as a code file.
    #[arg(long)]
    pub witness: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// table1 or table2.
    #[arg(long)]
    pub which: String,
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub n_max: usize,
    /// Cap on families enumerated per row.
    #[arg(long)]
    pub max_families: Option<u64>,
    /// Wall-clock budget in seconds for each seed search.
    #[arg(long)]
    pub budget_secs: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub code: PathBuf,
    /// JSON file {"message": [indices], "edits": [edit, ...]}.
    #[arg(long, conflicts_with = "exhaustive", required_unless_present = "exhaustive")]
    pub edits: Option<PathBuf>,
    /// Every single-burst edit over all (or sampled) messages.
    #[arg(long)]
    pub exhaustive: bool,
    /// Window for the burst range; defaults to the one declared in the file.
    #[arg(long, requires = "t2")]
    pub t1: Option<usize>,
    #[arg(long, requires = "t1")]
    pub t2: Option<usize>,
    /// Codewords per message in exhaustive mode.
    #[arg(long)]
    pub message_len: Option<usize>,
    /// Messages above which exhaustive mode samples.
    #[arg(long)]
    pub max_messages: Option<usize>,
    /// Latency histogram CSV to write in exhaustive mode.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FamiliesArgs {
    #[arg(long, required_unless_present = "validate")]
    pub q: Option<usize>,
    #[arg(long, required_unless_present = "validate")]
    pub k: Option<usize>,
    /// Most families to list.
    #[arg(long, default_value_t = 1000)]
    pub limit: u64,
    /// Only count the families.
    #[arg(long)]
    pub count: bool,
    /// Validate a family file instead.
    #[arg(long, conflicts_with_all = ["q", "k", "count"])]
    pub validate: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().parse_filters(&cli.log_level).init();
    if let Some(jobs) = cli.jobs {
        if !overlap_codes::exec::set_jobs(jobs) {
            log::warn!("--jobs {jobs} ignored: worker pool already fixed");
        }
    }
    match commands::run(&cli) {
        Ok(status) => ExitCode::from(status.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(USAGE)
        }
    }
}
