//! Built-in experiments. Each produces one flat table plus structured
//! details in the JSON form.

use flashx_core::cost::analyze_with;
use flashx_core::dataflow::non_tiled_mapping;
use flashx_core::explore::{
    compare, explore, ComparisonRow, ExploreOptions, Histogram, RankedCandidate,
};
use flashx_core::search::{LoopOrderPolicy, PruneStats, StrideMode};
use flashx_core::{
    builtin_hardware, builtin_workload, builtin_workloads, mlp_workloads, CostOptions,
    CostReport, GemmWorkload, HardwareConfig, LoopOrder, SearchOptions, StyleTag,
};
use serde::Serialize;
use serde_json::json;

use crate::args::{Experiment, ReproduceArgs};
use crate::output::{emit, metric_cells, note, summary_line, RunSpec, Table, METRIC_COLUMNS};
use crate::resolve::{NamedHardware, NamedWorkload};

impl Experiment {
    pub fn id(self) -> &'static str {
        match self {
            Experiment::HistogramFig5 => "histogram-fig5",
            Experiment::ShapesFig6 => "shapes-fig6",
            Experiment::LooporderFig7 => "looporder-fig7",
            Experiment::MlpFig8 => "mlp-fig8",
            Experiment::TilingTable6 => "tiling-table6",
        }
    }

    /// Powers of two for the sweeps that include 8192-sized dimensions,
    /// every integer otherwise.
    pub fn default_stride(self) -> StrideMode {
        match self {
            Experiment::HistogramFig5 | Experiment::ShapesFig6 | Experiment::LooporderFig7 => {
                StrideMode::Pow2
            }
            Experiment::MlpFig8 | Experiment::TilingTable6 => StrideMode::All,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramDetails {
    pub histogram: Histogram,
    pub stats: PruneStats,
    pub best: RankedCandidate,
    pub spread: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderBest {
    pub hardware: String,
    pub workload: String,
    pub best: RankedCandidate,
}

#[derive(Debug, Clone, Serialize)]
pub struct TilingRow {
    pub loop_order: LoopOrder,
    /// `NT` for the non-tiled mapping, `T` for the best tiled one.
    pub tiling: String,
    pub mapping: String,
    pub report: CostReport,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Details {
    Histogram(HistogramDetails),
    Comparison(Vec<ComparisonRow>),
    OrderBests(Vec<OrderBest>),
    Tiling(Vec<TilingRow>),
}

#[derive(Debug, Clone, Serialize)]
pub struct Reproduction {
    pub experiment: &'static str,
    pub details: Details,
    #[serde(skip)]
    pub table: Table,
    #[serde(skip)]
    pub workloads: Vec<NamedWorkload>,
    #[serde(skip)]
    pub hardware: Vec<NamedHardware>,
    #[serde(skip)]
    pub styles: Vec<StyleTag>,
}

fn named_hw(ids: &[&str]) -> Vec<NamedHardware> {
    ids.iter()
        .map(|id| NamedHardware {
            label: id.to_string(),
            config: builtin_hardware(id).expect("built-in hardware"),
        })
        .collect()
}

fn named_builtin(ids: &[&str]) -> Vec<NamedWorkload> {
    ids.iter()
        .map(|id| NamedWorkload {
            label: id.to_string(),
            workload: builtin_workload(id).expect("built-in workload"),
        })
        .collect()
}

fn workload_pairs(ws: &[NamedWorkload]) -> Vec<(String, GemmWorkload)> {
    ws.iter().map(|w| (w.label.clone(), w.workload)).collect()
}

fn hardware_pairs(hs: &[NamedHardware]) -> Vec<(String, HardwareConfig)> {
    hs.iter().map(|h| (h.label.clone(), h.config.clone())).collect()
}

/// Columns of a best-mapping row after the experiment's own key columns.
fn mapping_columns(keys: &[&'static str]) -> Vec<&'static str> {
    let mut h = keys.to_vec();
    h.extend([
        "loop_order",
        "lambda",
        "t_out_m",
        "t_out_n",
        "t_out_k",
        "t_in_m",
        "t_in_n",
        "t_in_k",
    ]);
    h.extend(METRIC_COLUMNS);
    h
}

/// Key cells followed by the mapping and its metrics; blanks when the
/// style has no feasible mapping.
fn mapping_cells(keys: Vec<String>, best: Option<&RankedCandidate>) -> Vec<String> {
    let mut row = keys;
    match best {
        Some(rc) => {
            row.push(rc.candidate.loop_order.to_string());
            row.push(rc.candidate.lambda.to_string());
            row.extend(rc.candidate.tiles.as_array().iter().map(|t| t.to_string()));
            row.extend(metric_cells(&rc.report));
        }
        None => row.extend(std::iter::repeat(String::new()).take(8 + METRIC_COLUMNS.len())),
    }
    row
}

fn comparison_table(rows: &[ComparisonRow]) -> Table {
    let mut t = Table::new(&mapping_columns(&["hardware", "workload", "style"]));
    for r in rows {
        t.push(mapping_cells(
            vec![r.hardware.clone(), r.workload.clone(), r.style.to_string()],
            r.best.as_ref(),
        ));
    }
    t
}

fn options(stride: StrideMode, policy: LoopOrderPolicy) -> ExploreOptions {
    ExploreOptions {
        search: SearchOptions {
            stride,
            loop_orders: policy,
        },
        ..ExploreOptions::default()
    }
}

pub fn histogram_fig5(stride: StrideMode) -> anyhow::Result<Reproduction> {
    let workloads = named_builtin(&["I"]);
    let hardware = named_hw(&["edge"]);
    let style = StyleTag::Nvdla;
    let opts = options(stride, LoopOrderPolicy::Fixed);
    let res = explore(style, &workloads[0].workload, &hardware[0].config, &opts)?;
    let mut table = Table::new(&["bin", "runtime_lo", "runtime_hi", "count"]);
    let h = &res.histogram;
    for (i, c) in h.counts.iter().enumerate() {
        let lo = h.min as f64 + i as f64 * h.bin_width;
        table.push(vec![
            i.to_string(),
            lo.to_string(),
            (lo + h.bin_width).to_string(),
            c.to_string(),
        ]);
    }
    Ok(Reproduction {
        experiment: Experiment::HistogramFig5.id(),
        details: Details::Histogram(HistogramDetails {
            histogram: res.histogram,
            stats: res.stats,
            best: res.best,
            spread: res.spread,
        }),
        table,
        workloads,
        hardware,
        styles: vec![style],
    })
}

pub fn shapes_fig6(stride: StrideMode) -> anyhow::Result<Reproduction> {
    let workloads: Vec<NamedWorkload> = builtin_workloads()
        .into_iter()
        .map(|(id, w)| NamedWorkload {
            label: id.to_string(),
            workload: w,
        })
        .collect();
    let hardware = named_hw(&["edge", "cloud"]);
    let opts = options(stride, LoopOrderPolicy::Fixed);
    let rows = compare(
        &StyleTag::ALL,
        &workload_pairs(&workloads),
        &hardware_pairs(&hardware),
        LoopOrderPolicy::Fixed,
        &opts,
    )?;
    Ok(Reproduction {
        experiment: Experiment::ShapesFig6.id(),
        table: comparison_table(&rows),
        details: Details::Comparison(rows),
        workloads,
        hardware,
        styles: StyleTag::ALL.to_vec(),
    })
}

pub fn looporder_fig7(stride: StrideMode) -> anyhow::Result<Reproduction> {
    let workloads = named_builtin(&["IV", "V"]);
    let hardware = named_hw(&["edge", "cloud"]);
    let style = StyleTag::Maeri;
    let opts = options(stride, LoopOrderPolicy::All);
    let mut table = Table::new(&mapping_columns(&["hardware", "workload"]));
    let mut bests = Vec::new();
    for h in &hardware {
        for w in &workloads {
            let res = explore(style, &w.workload, &h.config, &opts)?;
            for b in res.order_bests {
                table.push(mapping_cells(vec![h.label.clone(), w.label.clone()], Some(&b)));
                bests.push(OrderBest {
                    hardware: h.label.clone(),
                    workload: w.label.clone(),
                    best: b,
                });
            }
        }
    }
    Ok(Reproduction {
        experiment: Experiment::LooporderFig7.id(),
        details: Details::OrderBests(bests),
        table,
        workloads,
        hardware,
        styles: vec![style],
    })
}

pub fn mlp_fig8(stride: StrideMode, batch: u64) -> anyhow::Result<Reproduction> {
    let workloads: Vec<NamedWorkload> = mlp_workloads(batch)?
        .into_iter()
        .enumerate()
        .map(|(i, w)| NamedWorkload {
            label: format!("fc{}", i + 1),
            workload: w,
        })
        .collect();
    let hardware = named_hw(&["edge"]);
    let opts = options(stride, LoopOrderPolicy::Fixed);
    let rows = compare(
        &StyleTag::ALL,
        &workload_pairs(&workloads),
        &hardware_pairs(&hardware),
        LoopOrderPolicy::Fixed,
        &opts,
    )?;
    Ok(Reproduction {
        experiment: Experiment::MlpFig8.id(),
        table: comparison_table(&rows),
        details: Details::Comparison(rows),
        workloads,
        hardware,
        styles: StyleTag::ALL.to_vec(),
    })
}

pub fn tiling_table6(stride: StrideMode) -> anyhow::Result<Reproduction> {
    let workloads = named_builtin(&["VI"]);
    let hardware = named_hw(&["edge"]);
    let (w, hw) = (&workloads[0].workload, &hardware[0].config);
    let style = StyleTag::Maeri;
    let res = explore(style, w, hw, &options(stride, LoopOrderPolicy::All))?;
    let mut rows = Vec::new();
    for b in &res.order_bests {
        let order = b.candidate.loop_order;
        let nt = non_tiled_mapping(order, w, hw.pe_count());
        rows.push(TilingRow {
            loop_order: order,
            tiling: "NT".into(),
            mapping: nt.render().replace('\n', "; "),
            report: analyze_with(&nt, w, hw, &CostOptions::default())?,
        });
        rows.push(TilingRow {
            loop_order: order,
            tiling: "T".into(),
            mapping: b.candidate.mapping.render().replace('\n', "; "),
            report: b.report.clone(),
        });
    }
    let mut header = vec!["loop_order", "tiling", "mapping"];
    header.extend(METRIC_COLUMNS);
    let mut table = Table::new(&header);
    for r in &rows {
        let mut cells = vec![r.loop_order.to_string(), r.tiling.clone(), r.mapping.clone()];
        cells.extend(metric_cells(&r.report));
        table.push(cells);
    }
    Ok(Reproduction {
        experiment: Experiment::TilingTable6.id(),
        details: Details::Tiling(rows),
        table,
        workloads,
        hardware,
        styles: vec![style],
    })
}

pub fn run(e: Experiment, stride: StrideMode, batch: u64) -> anyhow::Result<Reproduction> {
    match e {
        Experiment::HistogramFig5 => histogram_fig5(stride),
        Experiment::ShapesFig6 => shapes_fig6(stride),
        Experiment::LooporderFig7 => looporder_fig7(stride),
        Experiment::MlpFig8 => mlp_fig8(stride, batch),
        Experiment::TilingTable6 => tiling_table6(stride),
    }
}

pub fn reproduce_cmd(a: &ReproduceArgs) -> anyhow::Result<()> {
    let stride = a.stride.map(StrideMode::from).unwrap_or(a.experiment.default_stride());
    let r = run(a.experiment, stride, a.batch)?;
    let spec = RunSpec {
        subcommand: format!("reproduce {}", r.experiment),
        styles: r.styles.iter().map(|s| s.to_string()).collect(),
        workloads: r.workloads.clone(),
        hardware: r.hardware.clone(),
        options: json!({
            "stride": stride,
            "batch": (a.experiment == Experiment::MlpFig8).then_some(a.batch),
        }),
    };
    emit(&a.output, &spec, &r, &r.table)?;
    let line = match &r.details {
        Details::Histogram(h) => format!(
            "{} candidates, spread {:.2}; {}",
            h.stats.pruned_count,
            h.spread,
            summary_line(&h.best.report)
        ),
        _ => format!("{} rows", r.table.rows.len()),
    };
    note(&a.output, &format!("{}: {line}", r.experiment));
    Ok(())
}

