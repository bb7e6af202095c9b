//! End-to-end search: enumerate, cost, rank.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{build_schedule, count_accesses, report_from_traffic, CostOptions, CostReport};
use crate::dataflow::{mapping_from_style, validate_mapping, TileSet};
use crate::error::Error;
use crate::model::{ClusterSizeRule, Dim, GemmWorkload, HardwareConfig, StyleTag};
use crate::search::{
    group_candidates, groups, loop_orders, pow2_rank, unpruned_count, Candidate,
    LoopOrderPolicy, PruneStats, SearchOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExploreOptions {
    pub search: SearchOptions,
    pub cost: CostOptions,
    /// Ranked candidates kept in the result.
    pub top_k: usize,
    pub bins: usize,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            search: SearchOptions::default(),
            cost: CostOptions::default(),
            top_k: 32,
            bins: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidate {
    pub candidate: Candidate,
    pub report: CostReport,
}

/// Ranking: runtime, then energy, then power-of-two tiles (field by field),
/// then loop order and cluster size.
pub fn rank_cmp(a: &RankedCandidate, b: &RankedCandidate) -> Ordering {
    a.report
        .runtime_cycles
        .cmp(&b.report.runtime_cycles)
        .then_with(|| a.report.energy_units.total_cmp(&b.report.energy_units))
        .then_with(|| {
            let (ta, tb) = (a.candidate.tiles.as_array(), b.candidate.tiles.as_array());
            ta.iter()
                .zip(tb.iter())
                .map(|(x, y)| pow2_rank(*x).cmp(&pow2_rank(*y)))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
        .then_with(|| a.candidate.loop_order.cmp(&b.candidate.loop_order))
        .then_with(|| a.candidate.lambda.cmp(&b.candidate.lambda))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub min: u64,
    pub max: u64,
    /// Zero when all values are equal; everything is then in bin 0.
    pub bin_width: f64,
    pub counts: Vec<u64>,
}

/// Uniform-width bins over `[min, max]`; the maximum lands in the last bin.
pub fn histogram(values: &[u64], bins: usize) -> Result<Histogram, Error> {
    if values.is_empty() || bins == 0 {
        return Err(Error::InvalidArgument(
            "histogram needs at least one value and one bin".into(),
        ));
    }
    let min = *values.iter().min().unwrap();
    let max = *values.iter().max().unwrap();
    let mut counts = vec![0u64; bins];
    if min == max {
        counts[0] = values.len() as u64;
        return Ok(Histogram {
            min,
            max,
            bin_width: 0.0,
            counts,
        });
    }
    let span = (max - min) as f64;
    for v in values {
        let pos = (v - min) as f64 / span * bins as f64;
        counts[(pos as usize).min(bins - 1)] += 1;
    }
    Ok(Histogram {
        min,
        max,
        bin_width: span / bins as f64,
        counts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplorationResult {
    pub style: StyleTag,
    pub workload: GemmWorkload,
    pub options: ExploreOptions,
    pub best: RankedCandidate,
    pub ranked: Vec<RankedCandidate>,
    /// Runtime histogram in cycles.
    pub histogram: Histogram,
    pub stats: PruneStats,
    /// Worst over best runtime.
    pub spread: f64,
    /// Best candidate of each explored loop order, in enumeration order.
    pub order_bests: Vec<RankedCandidate>,
}

fn analyze_candidate(
    c: Candidate,
    w: &GemmWorkload,
    hw: &HardwareConfig,
    cost: &CostOptions,
) -> RankedCandidate {
    // Enumerated candidates are validated already; skip straight to costing.
    let sched = build_schedule(&c.mapping, w, hw).expect("enumerated candidates are valid");
    let report = report_from_traffic(&count_accesses(&sched, cost), w, hw, cost);
    RankedCandidate { candidate: c, report }
}

/// Inserts `rc` into `top`, kept sorted and at most `keep` long.
fn push_top(top: &mut Vec<RankedCandidate>, rc: RankedCandidate, keep: usize) {
    if top.len() == keep && !rank_cmp(&rc, top.last().unwrap()).is_lt() {
        return;
    }
    let pos = top.partition_point(|x| rank_cmp(x, &rc).is_le());
    top.insert(pos, rc);
    top.truncate(keep);
}

/// Costs every pruned candidate and ranks them.
pub fn explore(
    style: StyleTag,
    w: &GemmWorkload,
    hw: &HardwareConfig,
    opts: &ExploreOptions,
) -> Result<ExplorationResult, Error> {
    let keep = opts.top_k.max(1);
    let groups = groups(style, w, hw, &opts.search);
    let per_group: Vec<(Vec<u64>, Vec<RankedCandidate>)> = groups
        .par_iter()
        .map(|g| {
            let mut runtimes = Vec::new();
            let mut top: Vec<RankedCandidate> = Vec::new();
            for c in group_candidates(style, g, w, hw, opts.search.stride) {
                let rc = analyze_candidate(c, w, hw, &opts.cost);
                runtimes.push(rc.report.runtime_cycles);
                push_top(&mut top, rc, keep);
            }
            (runtimes, top)
        })
        .collect();
    let mut runtimes = Vec::new();
    let mut ranked = Vec::new();
    let mut order_bests: Vec<RankedCandidate> = Vec::new();
    for (g, (r, t)) in groups.iter().zip(per_group) {
        runtimes.extend(r);
        if let Some(first) = t.first() {
            match order_bests.iter_mut().find(|b| b.candidate.loop_order == g.loop_order) {
                Some(b) if rank_cmp(first, b).is_lt() => *b = first.clone(),
                Some(_) => {}
                None => order_bests.push(first.clone()),
            }
        }
        ranked.extend(t);
    }
    if ranked.is_empty() {
        return Err(Error::NoFeasibleMapping { style });
    }
    ranked.sort_by(rank_cmp);
    ranked.truncate(keep);
    let hist = histogram(&runtimes, opts.bins)?;
    let stats = PruneStats::new(
        unpruned_count(style, w, hw, &opts.search),
        runtimes.len() as u64,
    );
    Ok(ExplorationResult {
        style,
        workload: *w,
        options: *opts,
        best: ranked[0].clone(),
        spread: hist.max as f64 / hist.min as f64,
        ranked,
        histogram: hist,
        stats,
        order_bests,
    })
}

/// Samples `n` points uniformly from the unpruned space (loop order, cluster
/// size, six tile sizes), keeps the valid ones and returns the best.
/// `Ok(None)` when no sample is valid.
pub fn random_sample_baseline(
    style: StyleTag,
    w: &GemmWorkload,
    hw: &HardwareConfig,
    n: usize,
    seed: u64,
    policy: LoopOrderPolicy,
    cost: &CostOptions,
) -> Result<Option<RankedCandidate>, Error> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let orders = loop_orders(style, policy);
    let rule = style.constraints().cluster_size_rule;
    let lambdas = rule.sizes(hw.pe_count());
    let mut best: Option<RankedCandidate> = None;
    for _ in 0..n {
        let order = *orders.choose(&mut rng).expect("every style has an order");
        let mut draw = |d: Dim| rng.gen_range(1..=w.dim(d));
        let outer = Dim::ALL.map(&mut draw);
        let inner = Dim::ALL.map(&mut draw);
        let mut tiles = TileSet::new(outer, inner);
        let lambda = match rule {
            ClusterSizeRule::TiedToTile => tiles.outer(order.innermost()),
            _ => *lambdas.choose(&mut rng).expect("legal cluster sizes exist"),
        };
        // Fields the template ties to others.
        match style {
            StyleTag::Eyeriss | StyleTag::Nvdla | StyleTag::Tpu => tiles.t_in_k = tiles.t_out_k,
            StyleTag::ShiDianNao => tiles.t_in_n = tiles.t_out_n,
            StyleTag::Maeri => tiles.set_inner(order.innermost(), 1),
        }
        let Ok(mapping) = mapping_from_style(style, order, lambda, &tiles) else {
            continue;
        };
        if !validate_mapping(&mapping, w, hw).is_valid() {
            continue;
        }
        let rc = analyze_candidate(
            Candidate {
                style,
                loop_order: order,
                lambda,
                tiles,
                mapping,
            },
            w,
            hw,
            cost,
        );
        if best.as_ref().map_or(true, |b| rank_cmp(&rc, b).is_lt()) {
            best = Some(rc);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub style: StyleTag,
    pub workload: String,
    pub hardware: String,
    pub policy: LoopOrderPolicy,
    /// `None` when the style has no feasible mapping.
    pub best: Option<RankedCandidate>,
}

/// Best mapping per (style, workload, hardware) under a loop-order policy.
pub fn compare(
    styles: &[StyleTag],
    workloads: &[(String, GemmWorkload)],
    hws: &[(String, HardwareConfig)],
    policy: LoopOrderPolicy,
    opts: &ExploreOptions,
) -> Result<Vec<ComparisonRow>, Error> {
    if styles.is_empty() || workloads.is_empty() || hws.is_empty() {
        return Err(Error::InvalidArgument("compare needs at least one of each input".into()));
    }
    let mut o = *opts;
    o.search.loop_orders = policy;
    o.top_k = 1;
    let mut rows = Vec::new();
    for (hname, hw) in hws {
        for (wname, w) in workloads {
            for &style in styles {
                let best = match explore(style, w, hw, &o) {
                    Ok(r) => Some(r.best),
                    Err(Error::NoFeasibleMapping { .. }) => None,
                    Err(e) => return Err(e),
                };
                rows.push(ComparisonRow {
                    style,
                    workload: wname.clone(),
                    hardware: hname.clone(),
                    policy,
                    best,
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_hardware, EnergyTable};

    #[test]
    fn histogram_edges() {
        let h = histogram(&[5, 5, 5], 100).unwrap();
        assert_eq!(h.counts[0], 3);
        assert_eq!(h.bin_width, 0.0);
        let h = histogram(&[10, 110], 100).unwrap();
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts[99], 1);
        assert_eq!(h.bin_width, 1.0);
        assert!(histogram(&[], 100).is_err());
    }

    #[test]
    fn unit_workload_single_class() {
        let w = GemmWorkload::new(1, 1, 1).unwrap();
        let hw = builtin_hardware("edge").unwrap();
        let r = explore(StyleTag::Eyeriss, &w, &hw, &ExploreOptions::default()).unwrap();
        assert_eq!(r.spread, 1.0);
        assert_eq!(r.histogram.counts.iter().sum::<u64>(), r.stats.pruned_count);
    }

    #[test]
    fn random_baseline_is_seeded() {
        let w = GemmWorkload::new(16, 16, 16).unwrap();
        let hw = HardwareConfig::new(16, 64, 1024, 4.0, 1, 1, EnergyTable::default()).unwrap();
        let cost = CostOptions::default();
        let a = random_sample_baseline(StyleTag::Maeri, &w, &hw, 50, 7, LoopOrderPolicy::All, &cost)
            .unwrap();
        let b = random_sample_baseline(StyleTag::Maeri, &w, &hw, 50, 7, LoopOrderPolicy::All, &cost)
            .unwrap();
        assert_eq!(a, b);
        assert!(
            random_sample_baseline(StyleTag::Maeri, &w, &hw, 0, 7, LoopOrderPolicy::All, &cost)
                .is_err()
        );
    }
}
