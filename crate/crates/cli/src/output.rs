//! Result files. JSON output is `{"spec": .., "result": ..}`; CSV output
//! starts with `#` comment lines naming the command and embedding the
//! resolved spec, followed by a header row and data rows.

use std::fs;
use std::io::{self, Write};

use anyhow::Context;
use flashx_core::{CostOptions, CostReport};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Format, OutputArgs};
use crate::resolve::{NamedHardware, NamedWorkload};

/// Every selector of a run, resolved.
#[derive(Debug, Clone, Serialize)]
pub struct RunSpec {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub styles: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub workloads: Vec<NamedWorkload>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub hardware: Vec<NamedHardware>,
    /// Remaining options as given, after defaults.
    pub options: Value,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Columns shared by every per-mapping CSV row.
pub const METRIC_COLUMNS: [&str; 14] = [
    "runtime_cycles",
    "runtime_ms",
    "energy_units",
    "s1_a",
    "s1_b",
    "s1_c",
    "s2_a",
    "s2_b",
    "s2_c",
    "noc_elements",
    "steps",
    "throughput_flops",
    "pe_utilization",
    "data_reuse",
];

pub fn metric_cells(r: &CostReport) -> Vec<String> {
    vec![
        r.runtime_cycles.to_string(),
        r.runtime_ms.to_string(),
        r.energy_units.to_string(),
        r.s1_accesses.a.to_string(),
        r.s1_accesses.b.to_string(),
        r.s1_accesses.c.to_string(),
        r.s2_accesses.a.to_string(),
        r.s2_accesses.b.to_string(),
        r.s2_accesses.c.to_string(),
        r.noc_elements.to_string(),
        r.steps.to_string(),
        r.throughput_flops.to_string(),
        r.pe_utilization.to_string(),
        r.data_reuse.to_string(),
    ]
}

pub fn cost_options_json(c: &CostOptions) -> Value {
    json!({
        "double_buffer_fills": c.double_buffer_fills,
        "reduction_per_step": c.reduction_per_step,
    })
}

pub fn summary_line(r: &CostReport) -> String {
    format!(
        "best runtime {:.6} ms, energy {:.6e} units, reuse {:.3}, utilization {:.3}",
        r.runtime_ms, r.energy_units, r.data_reuse, r.pe_utilization
    )
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    spec: &'a RunSpec,
    result: &'a T,
}

pub fn render<T: Serialize>(
    spec: &RunSpec,
    format: Format,
    result: &T,
    table: &Table,
) -> anyhow::Result<Vec<u8>> {
    match format {
        Format::Json => {
            // Written directly rather than through `Value`, which cannot hold
            // u128 counts.
            let mut buf = serde_json::to_vec_pretty(&Document { spec, result })?;
            buf.push(b'\n');
            Ok(buf)
        }
        Format::Csv => {
            let mut buf = Vec::new();
            writeln!(buf, "# flashx {}", spec.subcommand)?;
            writeln!(buf, "# spec: {}", serde_json::to_string(spec)?)?;
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(&table.header)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            Ok(w.into_inner().context("flushing CSV")?)
        }
    }
}

/// Writes the rendered result to `--out` or stdout.
pub fn emit<T: Serialize>(
    out: &OutputArgs,
    spec: &RunSpec,
    result: &T,
    table: &Table,
) -> anyhow::Result<()> {
    let bytes = render(spec, out.format, result, table)?;
    match &out.out {
        Some(path) => {
            fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(&bytes)?;
            Ok(stdout.flush()?)
        }
    }
}

/// Human-readable lines go to stdout when the result goes to a file and to
/// stderr otherwise, so piped results stay parseable.
pub fn note(out: &OutputArgs, line: &str) {
    if out.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}
