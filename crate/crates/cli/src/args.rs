// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "arithgame",
    version,
    about = "Prefix adder and multiplier design by tree search"
)]
pub struct Cli {
    /// Worker threads for parallel simulation (defaults to all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// JSON object of option values for the subcommand; explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a classic adder (or a Wallace multiplier) design file.
    Gen(GenArgs),
    /// Search prefix adders for minimum size per level, or for delay/area.
    OptimizeAdder(OptimizeAdderArgs),
    /// Co-design a multiplier's compressor tree and final adder.
    OptimizeMultiplier(OptimizeMultiplierArgs),
    /// Lower a design file to structural Verilog.
    EmitVerilog(EmitVerilogArgs),
    /// Check a design against integer arithmetic.
    Verify(VerifyArgs),
    /// Score a design with the proxy, theoretical or an external evaluator.
    Eval(EvalArgs),
    /// Export the Pareto front and all points of a run log as CSV.
    Pareto(ParetoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Sklansky,
    BrentKung,
    KoggeStone,
    Ripple,
    /// Wallace-style compressor tree with a Sklansky final adder.
    Wallace,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Adder width, or operand width for a multiplier.
    #[arg(long)]
    pub bits: usize,
    /// Output path (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Minimum size for each level bound, starting from Sklansky.
    Size,
    /// `-delay - alpha * area` from the proxy or an external evaluator.
    Delay,
}

/// Options shared by commands that can call an external evaluator.
#[derive(Debug, Args, Serialize)]
pub struct EvaluatorArgs {
    /// Shell command run on each emitted Verilog file; `{design}` is
    /// replaced by its path. It must print `delay=<x> area=<y>`.
    #[arg(long)]
    pub external_cmd: Option<String>,
    /// Seconds before an external evaluation is abandoned.
    #[arg(long)]
    pub timeout: Option<f64>,
    /// Directory for the Verilog files handed to the external command.
    #[arg(long)]
    pub workdir: Option<PathBuf>,
    /// JSON-lines evaluation cache, replayed on start and appended to.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct OptimizeAdderArgs {
    #[arg(long)]
    pub bits: usize,
    #[arg(long, value_enum, default_value_t = Objective::Size)]
    pub objective: Objective,
    /// Search iterations (per level bound for the size objective).
    #[arg(long, default_value_t = 400_000)]
    pub steps: usize,
    /// Level bounds searched above the minimum (size objective).
    #[arg(long, default_value_t = 4)]
    pub extra_levels: usize,
    /// Starting structure (delay objective).
    #[arg(long, value_enum, default_value_t = Family::Sklansky)]
    pub family: Family,
    #[arg(long, default_value_t = 0.001)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    pub beta: f64,
    /// Exploration weight; defaults to 10 * sqrt(2).
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub max_sim_steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub evaluator: EvaluatorArgs,
    /// Level/size table (size objective) or best design (delay objective).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON-lines run log: a provenance header, then one line per design.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct OptimizeMultiplierArgs {
    #[arg(long)]
    pub bits: usize,
    #[arg(long, default_value_t = 3)]
    pub rounds: usize,
    #[arg(long, default_value_t = 900)]
    pub compressor_steps: usize,
    #[arg(long, default_value_t = 100)]
    pub prefix_steps: usize,
    /// Train the compressor only, final adder fixed to Sklansky.
    #[arg(long)]
    pub ppo_only: bool,
    #[arg(long, default_value_t = 0.001)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub evaluator: EvaluatorArgs,
    /// Design bundle (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON-lines log of every phase.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Where to save the trained policy and value networks.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct EmitVerilogArgs {
    /// Prefix-tree design file or multiplier bundle.
    #[arg(long)]
    pub design: PathBuf,
    #[arg(long)]
    pub module: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct VerifyArgs {
    #[arg(long)]
    pub design: PathBuf,
    /// Every operand pair (at most 2^26 of them).
    #[arg(long)]
    pub exhaustive: bool,
    /// Random operand pairs when not exhaustive.
    #[arg(long, default_value_t = 10_000)]
    pub vectors: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct EvalArgs {
    #[arg(long)]
    pub design: PathBuf,
    /// Report level and size instead of proxy delay and area (adders only).
    #[arg(long)]
    pub theoretical: bool,
    #[command(flatten)]
    pub evaluator: EvaluatorArgs,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ParetoArgs {
    /// JSON-lines log with `delay` and `area` fields; other lines are skipped.
    #[arg(long)]
    pub log: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
