use thiserror::Error;

use crate::model::{LoopOrder, StyleTag};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: String, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid workload: {0}")]
    InvalidWorkload(String),
    #[error("unknown preset {0}")]
    UnknownPreset(String),
    #[error("loop order {order} is not legal for {style}")]
    IllegalLoopOrder { style: StyleTag, order: LoopOrder },
    #[error("cluster size {lambda} is not legal for {style}")]
    IllegalClusterSize { style: StyleTag, lambda: u64 },
    #[error("invalid mapping: {}", .0.join("; "))]
    InvalidMapping(Vec<String>),
    #[error("workload has {macs} MACs, above the walk limit of {limit}")]
    WorkloadTooLarge { macs: u64, limit: u64 },
    #[error("no feasible mapping for {style} on the given workload and hardware")]
    NoFeasibleMapping { style: StyleTag },
    #[error("{style} has no feasible spatial tile for cluster size {lambda}")]
    InfeasibleSpatialTile { style: StyleTag, lambda: u64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
