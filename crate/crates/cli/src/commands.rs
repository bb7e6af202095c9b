use std::fs;

use anyhow::Context;
use flashx_core::cost::{analyze_with, build_schedule, count_accesses, oracle_counts, Traffic};
use flashx_core::dataflow::non_tiled_mapping;
use flashx_core::explore::{
    explore, random_sample_baseline, ExplorationResult, ExploreOptions, RankedCandidate,
};
use flashx_core::model::BUILTIN_HARDWARE_IDS;
use flashx_core::search::PruneStats;
use flashx_core::{
    builtin_hardware, builtin_workloads, prune_stats, CostOptions, LoopOrder, Mapping,
    SearchOptions, StyleTag,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{CostArgs, CostFlags, ExploreArgs, OutputArgs, PruneStatsArgs, SearchArgs};
use crate::output::{
    cost_options_json, emit, metric_cells, note, summary_line, RunSpec, Table, METRIC_COLUMNS,
};
use crate::resolve;
use crate::OracleMismatch;

pub fn cost_options(f: &CostFlags) -> CostOptions {
    CostOptions {
        double_buffer_fills: f.double_buffer_fills,
        reduction_per_step: f.reduction_per_step,
    }
}

pub fn search_options(s: &SearchArgs) -> SearchOptions {
    SearchOptions {
        stride: s.stride.into(),
        loop_orders: s.loop_orders.into(),
    }
}

/// Header of the per-candidate CSV written by `explore`.
pub fn candidate_header() -> Vec<&'static str> {
    let mut h = vec![
        "workload",
        "rank",
        "style",
        "loop_order",
        "lambda",
        "t_out_m",
        "t_out_n",
        "t_out_k",
        "t_in_m",
        "t_in_n",
        "t_in_k",
    ];
    h.extend(METRIC_COLUMNS);
    h
}

pub fn candidate_row(workload: &str, rank: &str, rc: &RankedCandidate) -> Vec<String> {
    let c = &rc.candidate;
    let mut row = vec![
        workload.to_string(),
        rank.to_string(),
        c.style.to_string(),
        c.loop_order.to_string(),
        c.lambda.to_string(),
    ];
    row.extend(c.tiles.as_array().iter().map(|t| t.to_string()));
    row.extend(metric_cells(&rc.report));
    row
}

#[derive(Serialize)]
struct ExploreRun {
    workload: String,
    exploration: ExplorationResult,
    baseline: Option<RankedCandidate>,
}

#[derive(Serialize)]
struct Runs<T> {
    runs: Vec<T>,
}

pub fn explore_cmd(a: &ExploreArgs) -> anyhow::Result<()> {
    let style = resolve::style(&a.style)?;
    let workloads = resolve::workloads(&a.target.workload)?;
    let hw = resolve::hardware(&a.target)?;
    let opts = ExploreOptions {
        search: search_options(&a.search),
        cost: cost_options(&a.cost),
        top_k: a.top_k,
        ..ExploreOptions::default()
    };
    let spec = RunSpec {
        subcommand: "explore".into(),
        styles: vec![style.to_string()],
        workloads: workloads.clone(),
        hardware: vec![hw.clone()],
        options: json!({
            "search": opts.search,
            "cost": cost_options_json(&opts.cost),
            "top_k": opts.top_k,
            "bins": opts.bins,
            "samples": a.samples,
            "seed": a.seed,
        }),
    };

    let mut runs = Vec::new();
    let mut table = Table::new(&candidate_header());
    let mut summaries = Vec::new();
    for nw in &workloads {
        let res = explore(style, &nw.workload, &hw.config, &opts)?;
        let baseline = if a.samples > 0 {
            random_sample_baseline(
                style,
                &nw.workload,
                &hw.config,
                a.samples,
                a.seed,
                opts.search.loop_orders,
                &opts.cost,
            )?
        } else {
            None
        };
        for (i, rc) in res.ranked.iter().enumerate() {
            table.push(candidate_row(&nw.label, &(i + 1).to_string(), rc));
        }
        if let Some(b) = &baseline {
            table.push(candidate_row(&nw.label, "baseline", b));
        }
        summaries.push(format!(
            "{} {} on {}: {} ({} candidates)",
            style,
            nw.label,
            hw.label,
            summary_line(&res.best.report),
            res.stats.pruned_count
        ));
        runs.push(ExploreRun {
            workload: nw.label.clone(),
            exploration: res,
            baseline,
        });
    }
    emit(&a.output, &spec, &Runs { runs }, &table)?;
    for s in summaries {
        note(&a.output, &s);
    }
    Ok(())
}

fn load_mapping(a: &CostArgs, w: &flashx_core::GemmWorkload, pe_count: u64) -> anyhow::Result<Mapping> {
    match &a.mapping {
        Some(path) if !a.non_tiled => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            Ok(text.parse::<Mapping>()?)
        }
        _ => {
            let order: LoopOrder = a.loop_order.parse()?;
            Ok(non_tiled_mapping(order, w, pe_count))
        }
    }
}

/// Fields that differ between the closed-form and walked traffic.
pub fn traffic_diff(closed: &Traffic, walked: &Traffic) -> Vec<String> {
    let mut d = Vec::new();
    let mut cmp = |name: &str, x: u64, y: u64| {
        if x != y {
            d.push(format!("{name}: closed form {x}, walk {y}"));
        }
    };
    cmp("steps", closed.steps, walked.steps);
    cmp("mac_count", closed.mac_count, walked.mac_count);
    cmp("compute_cycles", closed.compute_cycles, walked.compute_cycles);
    cmp("s2_reads.a", closed.s2_reads.a, walked.s2_reads.a);
    cmp("s2_reads.b", closed.s2_reads.b, walked.s2_reads.b);
    cmp("s2_reads.c", closed.s2_reads.c, walked.s2_reads.c);
    cmp("c_writes", closed.c_writes, walked.c_writes);
    cmp("runtime_cycles", closed.runtime_cycles, walked.runtime_cycles);
    d
}

pub fn cost_cmd(a: &CostArgs) -> anyhow::Result<()> {
    let nw = resolve::single_workload(&a.target.workload)?;
    let hw = resolve::hardware(&a.target)?;
    let opts = cost_options(&a.cost);
    let mapping = load_mapping(a, &nw.workload, hw.config.pe_count())?;
    let report = analyze_with(&mapping, &nw.workload, &hw.config, &opts)?;

    let mismatches = if a.oracle {
        let closed = count_accesses(&build_schedule(&mapping, &nw.workload, &hw.config)?, &opts);
        let walked = oracle_counts(&mapping, &nw.workload, &hw.config, &opts)?;
        Some(traffic_diff(&closed, &walked))
    } else {
        None
    };

    let spec = RunSpec {
        subcommand: "cost".into(),
        styles: mapping.style.map(|s| s.to_string()).into_iter().collect(),
        workloads: vec![nw.clone()],
        hardware: vec![hw.clone()],
        options: json!({
            "mapping": a.mapping.as_ref().map(|p| p.display().to_string()),
            "non_tiled": a.non_tiled,
            "loop_order": a.loop_order,
            "cost": cost_options_json(&opts),
            "oracle": a.oracle,
        }),
    };
    let mapping_text = mapping.to_text().replace('\n', "; ");
    let mut header = vec!["workload", "mapping"];
    header.extend(METRIC_COLUMNS);
    let mut table = Table::new(&header);
    let mut row = vec![nw.label.clone(), mapping_text.clone()];
    row.extend(metric_cells(&report));
    table.push(row);
    let result = json!({
        "mapping": mapping_text,
        "report": report,
        "oracle": mismatches.as_ref().map(|m| json!({ "matches": m.is_empty(), "differences": m })),
    });
    emit(&a.output, &spec, &result, &table)?;
    note(&a.output, &summary_line(&report));
    match mismatches {
        Some(m) if !m.is_empty() => Err(OracleMismatch(m).into()),
        Some(_) => {
            note(&a.output, "oracle: counts match");
            Ok(())
        }
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct PruneRun {
    workload: String,
    stats: PruneStats,
}

pub fn prune_stats_cmd(a: &PruneStatsArgs) -> anyhow::Result<()> {
    let style = resolve::style(&a.style)?;
    let workloads = resolve::workloads(&a.target.workload)?;
    let hw = resolve::hardware(&a.target)?;
    let search = search_options(&a.search);
    let spec = RunSpec {
        subcommand: "prune-stats".into(),
        styles: vec![style.to_string()],
        workloads: workloads.clone(),
        hardware: vec![hw.clone()],
        options: json!({ "search": search }),
    };
    let mut table = Table::new(&[
        "workload",
        "style",
        "unpruned_count",
        "pruned_count",
        "reduction_ratio",
        "generation_seconds",
    ]);
    let mut runs = Vec::new();
    for nw in &workloads {
        let stats = prune_stats(style, &nw.workload, &hw.config, &search);
        table.push(vec![
            nw.label.clone(),
            style.to_string(),
            stats.unpruned_count.to_string(),
            stats.pruned_count.to_string(),
            stats.reduction_ratio.to_string(),
            stats.generation_seconds.unwrap_or(0.0).to_string(),
        ]);
        note(
            &a.output,
            &format!(
                "{} {}: {} of {} candidates kept (reduction {:.6})",
                style, nw.label, stats.pruned_count, stats.unpruned_count, stats.reduction_ratio
            ),
        );
        runs.push(PruneRun {
            workload: nw.label.clone(),
            stats,
        });
    }
    emit(&a.output, &spec, &Runs { runs }, &table)
}

pub fn presets_cmd(out: &OutputArgs) -> anyhow::Result<()> {
    let spec = RunSpec {
        subcommand: "presets".into(),
        styles: Vec::new(),
        workloads: Vec::new(),
        hardware: Vec::new(),
        options: Value::Null,
    };
    let mut table = Table::new(&["kind", "id", "description"]);
    let mut workloads = Vec::new();
    for (id, w) in builtin_workloads() {
        table.push(vec!["workload".into(), id.into(), w.to_string()]);
        workloads.push(json!({ "id": id, "workload": w }));
    }
    let mut hardware = Vec::new();
    for id in BUILTIN_HARDWARE_IDS {
        let hw = builtin_hardware(id)?;
        table.push(vec![
            "hardware".into(),
            id.into(),
            format!(
                "{} PEs, S1 {} B, S2 {} B",
                hw.pe_count(),
                hw.s1_bytes(),
                hw.s2_bytes()
            ),
        ]);
        hardware.push(json!({ "id": id, "config": hw }));
    }
    let mut styles = Vec::new();
    for s in StyleTag::ALL {
        let order = s.constraints().canonical_order();
        table.push(vec![
            "style".into(),
            s.name().into(),
            format!("{} (canonical order {order})", s.mapping_name()),
        ]);
        styles.push(json!({
            "id": s.name(),
            "mapping": s.mapping_name(),
            "canonical_order": order.to_string(),
        }));
    }
    let result = json!({ "workloads": workloads, "hardware": hardware, "styles": styles });
    emit(out, &spec, &result, &table)
}
