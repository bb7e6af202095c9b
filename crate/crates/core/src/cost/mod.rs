//! Analytical cost model: S1/S2 access counts, runtime and energy of a
//! mapping.
//!
//! * S1: every MAC reads one A and one B element and reads and writes one C
//!   partial sum.
//! * S2: a tile is fetched when it was not present anywhere in the array at
//!   the previous step. A tile multicast to several clusters or PEs is
//!   fetched once. C tiles are written back when they leave the array and
//!   read back if they return with more K to accumulate.
//! * Runtime: double-buffered, `comm_0 + sum_i max(compute_i, comm_{i+1})`,
//!   plus one spatial-reduction drain at the end.

mod counts;
mod energy;
mod oracle;
mod runtime;
mod schedule;

use serde::{Deserialize, Serialize};

use crate::dataflow::{validate_mapping, Mapping};
use crate::error::Error;
use crate::model::{GemmWorkload, HardwareConfig};

pub use energy::estimate_energy;
pub use oracle::{oracle_counts, ORACLE_MAC_LIMIT};
pub use runtime::{comm_cycles, pipeline_cycles};
pub use schedule::{build_schedule, Breaks, DimPlan, Level, Role, TileSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MatrixCounts {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

impl MatrixCounts {
    pub fn total(&self) -> u64 {
        self.a + self.b + self.c
    }
}

/// Raw traffic of a schedule, produced both by the closed form and by the
/// step walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Traffic {
    pub steps: u64,
    pub mac_count: u64,
    /// Sum over steps of the busiest PE's MACs.
    pub compute_cycles: u64,
    pub s2_reads: MatrixCounts,
    pub c_writes: u64,
    pub runtime_cycles: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CostOptions {
    /// Report every S2 fill twice, once per buffer half.
    #[serde(default)]
    pub double_buffer_fills: bool,
    /// Charge the spatial-reduction drain on every step instead of once.
    #[serde(default)]
    pub reduction_per_step: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub runtime_cycles: u64,
    pub runtime_ms: f64,
    pub s1_accesses: MatrixCounts,
    /// Reads plus, for C, write-backs.
    pub s2_accesses: MatrixCounts,
    pub s2_c_reads: u64,
    pub s2_c_writes: u64,
    pub noc_elements: u64,
    pub mac_count: u64,
    pub steps: u64,
    pub energy_units: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy_mj: Option<f64>,
    pub throughput_flops: f64,
    pub pe_utilization: f64,
    pub data_reuse: f64,
}

/// S1 traffic: A and B read once per MAC, C read and written once per MAC.
pub fn s1_counts(w: &GemmWorkload) -> MatrixCounts {
    let macs = w.mac_count();
    MatrixCounts {
        a: macs,
        b: macs,
        c: 2 * macs,
    }
}

/// Closed-form traffic and runtime of a schedule.
pub fn count_accesses(s: &TileSchedule, opts: &CostOptions) -> Traffic {
    counts::count_traffic(s, opts)
}

/// Builds the report from raw traffic.
pub fn report_from_traffic(
    t: &Traffic,
    w: &GemmWorkload,
    hw: &HardwareConfig,
    opts: &CostOptions,
) -> CostReport {
    let fills = if opts.double_buffer_fills { 2 } else { 1 };
    let s1 = s1_counts(w);
    let s2 = MatrixCounts {
        a: fills * t.s2_reads.a,
        b: fills * t.s2_reads.b,
        c: fills * t.s2_reads.c + t.c_writes,
    };
    let noc_elements = s2.total();
    let mac_count = w.mac_count();
    let energy_units = estimate_energy(&s1, &s2, noc_elements, mac_count, hw.energy());
    let seconds = t.runtime_cycles as f64 / hw.clock_hz() as f64;
    CostReport {
        runtime_cycles: t.runtime_cycles,
        runtime_ms: seconds * 1e3,
        s1_accesses: s1,
        s2_accesses: s2,
        s2_c_reads: fills * t.s2_reads.c,
        s2_c_writes: t.c_writes,
        noc_elements,
        mac_count,
        steps: t.steps,
        energy_units,
        energy_mj: hw
            .energy()
            .picojoules_per_unit
            .map(|pj| energy_units * pj * 1e-9),
        throughput_flops: mac_count as f64 / seconds,
        pe_utilization: mac_count as f64 / (t.runtime_cycles as f64 * hw.pe_count() as f64),
        data_reuse: s1.total() as f64 / s2.total() as f64,
    }
}

/// Validates the mapping, then costs it with the closed form.
pub fn analyze_with(
    m: &Mapping,
    w: &GemmWorkload,
    hw: &HardwareConfig,
    opts: &CostOptions,
) -> Result<CostReport, Error> {
    validate_mapping(m, w, hw).into_result()?;
    let sched = build_schedule(m, w, hw)?;
    let traffic = count_accesses(&sched, opts);
    Ok(report_from_traffic(&traffic, w, hw, opts))
}

pub fn analyze(m: &Mapping, w: &GemmWorkload, hw: &HardwareConfig) -> Result<CostReport, Error> {
    analyze_with(m, w, hw, &CostOptions::default())
}
