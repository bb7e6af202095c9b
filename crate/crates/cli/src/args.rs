use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use flashx_core::search::{LoopOrderPolicy, StrideMode};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "flashx", version, about = "Mapping search and cost modeling for GEMM on spatial accelerators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate, cost and rank the mappings of one style.
    Explore(ExploreArgs),
    /// Cost a single mapping.
    Cost(CostArgs),
    /// Count the pruned and unpruned search spaces.
    PruneStats(PruneStatsArgs),
    /// Regenerate one of the built-in experiments as a table.
    Reproduce(ReproduceArgs),
    /// List built-in workloads, hardware presets and styles.
    Presets(OutputArgs),
}

#[derive(Debug, Clone, Args)]
pub struct TargetArgs {
    /// Built-in id (I..VI), an `M,N,K` triple, or `mlp:BATCH`.
    #[arg(long)]
    pub workload: String,
    /// Hardware preset.
    #[arg(long, default_value = "edge")]
    pub hw: String,
    /// JSON hardware description; replaces `--hw`.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SearchArgs {
    #[arg(long, value_enum, default_value_t = OrderPolicyArg::Fixed)]
    pub loop_orders: OrderPolicyArg,
    #[arg(long, value_enum, default_value_t = StrideArg::All)]
    pub stride: StrideArg,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct CostFlags {
    /// Count every S2 fill twice, once per buffer half.
    #[arg(long)]
    pub double_buffer_fills: bool,
    /// Charge the spatial-reduction drain on every step.
    #[arg(long)]
    pub reduction_per_step: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ExploreArgs {
    #[arg(long)]
    pub style: String,
    #[command(flatten)]
    pub target: TargetArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub cost: CostFlags,
    /// Ranked candidates kept per workload.
    #[arg(long, default_value_t = 32)]
    pub top_k: usize,
    /// Also draw this many random mappings as a baseline.
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    /// Seed of the random baseline.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CostArgs {
    /// Mapping in directive text form.
    #[arg(long, value_name = "PATH", required_unless_present = "non_tiled")]
    pub mapping: Option<PathBuf>,
    /// Cost the non-tiled mapping of `--loop-order` instead of a file.
    #[arg(long, conflicts_with = "mapping")]
    pub non_tiled: bool,
    #[arg(long, default_value = "mnk")]
    pub loop_order: String,
    #[command(flatten)]
    pub target: TargetArgs,
    #[command(flatten)]
    pub cost: CostFlags,
    /// Cross-check the counts against a step-by-step walk.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PruneStatsArgs {
    #[arg(long)]
    pub style: String,
    #[command(flatten)]
    pub target: TargetArgs,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub experiment: Experiment,
    /// Overrides the experiment's default stride.
    #[arg(long, value_enum)]
    pub stride: Option<StrideArg>,
    /// Batch size of the MLP experiment.
    #[arg(long, default_value_t = 128)]
    pub batch: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    HistogramFig5,
    ShapesFig6,
    LooporderFig7,
    MlpFig8,
    TilingTable6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderPolicyArg {
    Fixed,
    All,
}

impl From<OrderPolicyArg> for LoopOrderPolicy {
    fn from(a: OrderPolicyArg) -> Self {
        match a {
            OrderPolicyArg::Fixed => LoopOrderPolicy::Fixed,
            OrderPolicyArg::All => LoopOrderPolicy::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrideArg {
    All,
    Pow2,
}

impl From<StrideArg> for StrideMode {
    fn from(a: StrideArg) -> Self {
        match a {
            StrideArg::All => StrideMode::All,
            StrideArg::Pow2 => StrideMode::Pow2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}
