//! Mapping search and analytical cost modeling for tiled GEMM on spatial
//! accelerators.
//!
//! The crate is organized as a pipeline:
//!
//! * [`model`]: workloads, hardware presets and per-style dataflow rules.
//! * [`dataflow`]: directive programs ([`Mapping`]) and their validation.
//! * [`search`]: closed-form tile bounds and candidate enumeration.
//! * [`cost`]: the analytical runtime/energy model and a brute-force walk
//!   used to check it.
//! * [`explore`]: ranking, histograms, random baselines and comparisons.

pub mod cost;
pub mod dataflow;
pub mod error;
pub mod explore;
pub mod model;
pub mod search;

pub use cost::{analyze, CostOptions, CostReport, MatrixCounts};
pub use dataflow::{mapping_from_style, validate_mapping, Directive, Mapping, TileSet};
pub use error::Error;
pub use model::{
    builtin_hardware, builtin_workload, builtin_workloads, mlp_workloads, workload_gflops, Dim,
    EnergyTable, GemmWorkload, HardwareConfig, LoopOrder, StyleTag,
};
pub use search::{enumerate_candidates, prune_stats, Candidate, SearchOptions, StrideMode};
