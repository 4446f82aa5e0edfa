//! Command-line orchestration of frame-locked latency experiments.
//!
//! Subcommands, in the order an experiment uses them:
//!
//! * `probe`     — play a Sandbox match and measure per-frame overhead,
//! * `calibrate` — turn two probe means into an equalizing delay,
//! * `run`       — play every variant of an experiment plan,
//! * `score`     — append the per-round score breakdown to results files,
//! * `report`    — compare variants and emit plot-ready CSV,
//! * `agent`     — the native agent runner the other commands spawn.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use frameguard::agents::AgentMode;
use frameguard::agents::VariantSpec;
use frameguard::probe::{DEFAULT_GRANULARITY_US, DEFAULT_WARMUP_ROUNDS};
use frameguard::protocol::DEFAULT_PORT;
use frameguard::score::{DEFAULT_HP_TOTAL, DEFAULT_TIME_TOTAL};
use frameguard::server::{
    ClockMode, DEFAULT_FRAMES_PER_ROUND, DEFAULT_FRAME_PERIOD_US, DEFAULT_ROUNDS,
    DEFAULT_ROUNDS_PER_GAME,
};

pub mod commands;
pub mod error;
pub mod plan;
pub mod scored;
pub mod spawn;
pub mod summary;

pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "frameguard",
    version,
    about = "Frame-locked latency fairness harness"
)]
pub struct Cli {
    /// More log output (-v info, -vv debug); RUST_LOG overrides.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the native agent client against a match server.
    Agent(AgentArgs),
    /// Measure per-frame transport overhead with a Sandbox match.
    Probe(ProbeArgs),
    /// Compute the delay that equalizes a fast and a slow client.
    Calibrate(CalibrateArgs),
    /// Play every variant of an experiment plan.
    Run(RunArgs),
    /// Append hp1, hp2, w, t and score columns to results files.
    Score(ScoreArgs),
    /// Compare scored variants; writes plot and summary CSV.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct AgentArgs {
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, env = "FRAMEGUARD_PORT", default_value_t = DEFAULT_PORT)]
    pub port: u16,
    /// sandbox replies at once; fixedload emulates compute.
    #[arg(long, default_value = "sandbox")]
    pub mode: AgentMode,
    /// Emulated compute per frame (fixedload only).
    #[arg(long, default_value_t = 0)]
    pub processing_us: u64,
    /// Emulated transport cost per frame; not reported to the server.
    #[arg(long, default_value_t = 0)]
    pub extra_transport_us: u64,
    /// Equalizing delay added after compute (fixedload only).
    #[arg(long, default_value_t = 0)]
    pub delay_us: u64,
    #[arg(long, default_value = "agent")]
    pub label: String,
    /// Sleep until this close to a deadline, then poll the clock.
    #[arg(long, default_value_t = 2000)]
    pub guard_us: u64,
    /// Keep retrying the connection for this long.
    #[arg(long, default_value_t = 5000)]
    pub connect_timeout_ms: u64,
}

/// Options shared by the commands that host a match.
#[derive(Debug, Args, Clone)]
pub struct ServeArgs {
    #[arg(long, env = "FRAMEGUARD_PORT")]
    pub port: Option<u16>,
    /// External agent program; the runner flags are appended to it.
    #[arg(long)]
    pub agent_cmd: Option<String>,
    /// How long an agent may take to connect and say HELLO.
    #[arg(long, default_value_t = 10_000)]
    pub handshake_timeout_ms: u64,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub serve: ServeArgs,
    #[arg(long, default_value_t = DEFAULT_ROUNDS)]
    pub rounds: u32,
    #[arg(long, default_value_t = DEFAULT_FRAMES_PER_ROUND)]
    pub frames_per_round: u32,
    #[arg(long, default_value_t = DEFAULT_WARMUP_ROUNDS)]
    pub warmup: u32,
    #[arg(long, default_value_t = DEFAULT_FRAME_PERIOD_US)]
    pub frame_period_us: u64,
    /// Emulated transport cost for the native Sandbox agent.
    #[arg(long, default_value_t = 0)]
    pub extra_transport_us: u64,
    /// Names the output files.
    #[arg(long, default_value = "probe")]
    pub label: String,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Fast client's mean overhead: microseconds or a probe summary file.
    pub fast: String,
    /// Slow client's mean overhead: microseconds or a probe summary file.
    pub slow: String,
    #[arg(long, default_value_t = DEFAULT_GRANULARITY_US)]
    pub granularity: u64,
    /// JSON-lines file the result is appended to.
    #[arg(long, default_value = "calibration.jsonl")]
    pub record: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Flat `key = value` plan file; flags below override it.
    #[arg(long)]
    pub plan: Option<PathBuf>,
    /// `label,processing_us,extra_transport_us,injected_delay_us`; repeatable.
    #[arg(long = "variant", value_parser = plan::parse_variant)]
    pub variants: Vec<VariantSpec>,
    #[arg(long)]
    pub clock_mode: Option<ClockMode>,
    #[arg(long)]
    pub rounds: Option<u32>,
    #[arg(long)]
    pub frames_per_round: Option<u32>,
    #[arg(long)]
    pub warmup: Option<u32>,
    #[arg(long)]
    pub frame_period_us: Option<u64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub serve: ServeArgs,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Results CSV files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Where `<name>.scored.csv` goes; defaults to beside each input.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_HP_TOTAL)]
    pub hp_total: u32,
    #[arg(long, default_value_t = DEFAULT_TIME_TOTAL)]
    pub time_total: u32,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Scored CSV files, one per variant; the file name names the variant.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_WARMUP_ROUNDS)]
    pub warmup: u32,
    #[arg(long, default_value_t = DEFAULT_ROUNDS_PER_GAME)]
    pub rounds_per_game: u32,
    /// Receives plot.csv and summary.csv.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

/// Runs one parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Agent(a) => commands::agent(a),
        Command::Probe(a) => commands::probe(a),
        Command::Calibrate(a) => commands::calibrate(a),
        Command::Run(a) => commands::run(a),
        Command::Score(a) => commands::score(a),
        Command::Report(a) => commands::report(a),
    }
}
