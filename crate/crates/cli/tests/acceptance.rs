//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use flashx_core::cost::{
    analyze_with, build_schedule, count_accesses, oracle_counts, report_from_traffic,
};
use flashx_core::dataflow::non_tiled_mapping;
use flashx_core::explore::{explore, random_sample_baseline, ExploreOptions};
use flashx_core::search::{
    exhaustive_candidates, inner_tile_bounds, loop_orders, outer_tile_bounds, Bound,
    LoopOrderPolicy, StrideMode,
};
use flashx_core::{
    builtin_hardware, builtin_workload, builtin_workloads, enumerate_candidates, prune_stats,
    workload_gflops, CostOptions, Dim, EnergyTable, GemmWorkload, HardwareConfig, LoopOrder,
    Mapping, SearchOptions, StyleTag, TileSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn edge() -> HardwareConfig {
    builtin_hardware("edge").unwrap()
}

fn within(limit: Duration, start: Instant) -> Result<f64, String> {
    let s = start.elapsed().as_secs_f64();
    if start.elapsed() > limit {
        Err(format!("took {s:.1} s, limit {} s", limit.as_secs()))
    } else {
        Ok(s)
    }
}

fn opts(stride: StrideMode, policy: LoopOrderPolicy) -> ExploreOptions {
    ExploreOptions {
        search: SearchOptions {
            stride,
            loop_orders: policy,
        },
        ..ExploreOptions::default()
    }
}

fn workload_arithmetic() -> Outcome {
    let start = Instant::now();
    let printed = ["549.8", "8.59", "0.001", "0.067", "0.067", "0.03"];
    for ((id, w), want) in builtin_workloads().iter().zip(printed) {
        let decimals = want.split('.').nth(1).map_or(0, str::len);
        let got = format!("{:.*}", decimals, workload_gflops(w));
        if got != want {
            return Err(format!("workload {id}: {got} GFLOPs, expected {want}"));
        }
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!("all six match ({})", printed.join(", ")))
}

/// Floor of the positive root of `a*t^2 + b*t = c`.
fn root_floor(a: f64, b: f64, c: f64) -> u64 {
    ((-b + (b * b + 4.0 * a * c).sqrt()) / (2.0 * a)).floor() as u64
}

fn tile_bounds() -> Outcome {
    let start = Instant::now();
    let w = GemmWorkload::new(256, 256, 256).unwrap();
    let hw = edge();
    let (alpha, beta) = (hw.alpha_elems(), hw.beta_elems());
    // Double-buffered S2 with the spatial N spread over the whole array and
    // equal temporal tiles: 2*(t^2 + 2*N*t) <= beta.
    let outer_oracle = root_floor(1.0, 2.0 * 256.0, beta as f64 / 2.0);
    // Double-buffered S1 with unit K and equal M, N: 2*(a^2 + 2a) <= alpha.
    let inner_oracle = root_floor(1.0, 2.0, alpha as f64 / 2.0);
    if (outer_oracle, inner_oracle) != (85, 15) {
        return Err(format!("oracle gives {outer_oracle}, {inner_oracle}"));
    }
    let ob = outer_tile_bounds(StyleTag::Maeri, LoopOrder::MNK, 1, beta, hw.pe_count(), &w)
        .map_err(|e| e.to_string())?;
    let want_outer = Bound::up_to(outer_oracle);
    if ob.m != want_outer || ob.k != want_outer {
        return Err(format!("outer bounds M {:?} K {:?}", ob.m, ob.k));
    }
    let outer = TileSet::new([256, 256, 256], [1, 1, 1]);
    let ib = inner_tile_bounds(StyleTag::Maeri, LoopOrder::MNK, &outer, alpha, &w);
    let want_inner = Bound::up_to(inner_oracle);
    if ib.m != want_inner || ib.n != want_inner {
        return Err(format!("inner bounds M {:?} N {:?}", ib.m, ib.n));
    }
    within(Duration::from_secs(1), start)?;
    Ok("outer [1, 85], inner [1, 15], matching the closed-form oracle".into())
}

fn pruning() -> Outcome {
    let w = GemmWorkload::new(256, 256, 256).unwrap();
    let search = SearchOptions {
        stride: StrideMode::All,
        loop_orders: LoopOrderPolicy::Fixed,
    };
    let stats = prune_stats(StyleTag::Maeri, &w, &edge(), &search);
    let secs = stats.generation_seconds.unwrap_or(f64::INFINITY);
    let detail = format!(
        "{} of {} kept, reduction {:.6}, {secs:.2} s",
        stats.pruned_count, stats.unpruned_count, stats.reduction_ratio
    );
    if stats.reduction_ratio >= 0.99 && secs < 60.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let cost = CostOptions::default();
    let mut checked = 0u64;
    for (alpha, beta) in [(8, 64), (8, 256), (32, 64), (32, 256)] {
        let hw =
            HardwareConfig::new(16, alpha, beta, 3.0, 1_000_000_000, 1, EnergyTable::default())
                .unwrap();
        for m in 1..=8 {
            for n in 1..=8 {
                for k in 1..=8 {
                    let w = GemmWorkload::new(m, n, k).unwrap();
                    for style in StyleTag::ALL {
                        for c in exhaustive_candidates(style, &w, &hw, LoopOrderPolicy::All) {
                            let sched = build_schedule(&c.mapping, &w, &hw)
                                .map_err(|e| e.to_string())?;
                            let closed = count_accesses(&sched, &cost);
                            let walked = oracle_counts(&c.mapping, &w, &hw, &cost)
                                .map_err(|e| e.to_string())?;
                            if closed != walked {
                                return Err(format!(
                                    "{style} {w} alpha {alpha} beta {beta}: {:?} vs {:?}\n{}",
                                    closed,
                                    walked,
                                    c.mapping.render()
                                ));
                            }
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    let s = within(Duration::from_secs(600), start)?;
    Ok(format!("{checked} mappings agree exactly ({s:.0} s)"))
}

/// Capacity re-derived from the tiles and cluster count of a candidate.
fn footprints(m: &Mapping, w: &GemmWorkload, pe_count: u64) -> (u64, u64) {
    let clusters = pe_count / m.cluster_size;
    let outer = |d: Dim| {
        let dir = m.outer_directive(d);
        let reps = if dir.is_spatial() { clusters } else { 1 };
        (dir.size * reps).min(w.dim(d))
    };
    let inner = |d: Dim| m.inner_directive(d).size.min(w.dim(d));
    let area = |f: &dyn Fn(Dim) -> u64| {
        let (a, b, c) = (f(Dim::M), f(Dim::N), f(Dim::K));
        2 * (a * c + c * b + a * b)
    };
    (area(&outer), area(&inner))
}

fn capacity_soundness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut total = 0u64;
    for i in 0..20 {
        let style = StyleTag::ALL[rng.gen_range(0..5)];
        let w = GemmWorkload::new(
            rng.gen_range(1..=512),
            rng.gen_range(1..=512),
            rng.gen_range(1..=512),
        )
        .unwrap();
        let hw = match i % 3 {
            0 => builtin_hardware("edge").unwrap(),
            1 => builtin_hardware("cloud").unwrap(),
            _ => HardwareConfig::new(
                1 << rng.gen_range(2..=8),
                rng.gen_range(32..=1024),
                rng.gen_range(4096..=262_144),
                16.0,
                1_000_000_000,
                1,
                EnergyTable::default(),
            )
            .unwrap(),
        };
        let search = SearchOptions {
            stride: if rng.gen() { StrideMode::All } else { StrideMode::Pow2 },
            loop_orders: if rng.gen() {
                LoopOrderPolicy::All
            } else {
                LoopOrderPolicy::Fixed
            },
        };
        for c in enumerate_candidates(style, &w, &hw, &search) {
            let (s2, s1) = footprints(&c.mapping, &w, hw.pe_count());
            let nested = Dim::ALL
                .iter()
                .all(|d| c.mapping.inner_directive(*d).size <= c.mapping.outer_directive(*d).size);
            if s2 > hw.beta_elems() || s1 > hw.alpha_elems() || !nested {
                return Err(format!(
                    "{style} {w}: S2 {s2}/{} S1 {s1}/{}\n{}",
                    hw.beta_elems(),
                    hw.alpha_elems(),
                    c.mapping.render()
                ));
            }
            total += 1;
        }
    }
    let s = within(Duration::from_secs(600), start)?;
    Ok(format!("{total} candidates over 20 instances, zero violations ({s:.0} s)"))
}

fn tiling_impact() -> Outcome {
    let start = Instant::now();
    let w = builtin_workload("VI").unwrap();
    let hw = edge();
    let r = explore(
        StyleTag::Maeri,
        &w,
        &hw,
        &opts(StrideMode::All, LoopOrderPolicy::Fixed),
    )
    .map_err(|e| e.to_string())?;
    let nt = analyze_with(
        &non_tiled_mapping(LoopOrder::MNK, &w, hw.pe_count()),
        &w,
        &hw,
        &CostOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let t = &r.best.report;
    let s1 = t.s1_accesses;
    if (s1.a, s1.b, s1.c) != (33_554_432, 33_554_432, 67_108_864) || s1 != nt.s1_accesses {
        return Err(format!("S1 counts {s1:?}, non-tiled {:?}", nt.s1_accesses));
    }
    let rt = t.runtime_cycles as f64 / nt.runtime_cycles as f64;
    let en = t.energy_units / nt.energy_units;
    let s = within(Duration::from_secs(60), start)?;
    let detail = format!("S1 exact, runtime ratio {rt:.3}, energy ratio {en:.3} ({s:.1} s)");
    if rt <= 0.25 && en <= 0.25 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn spread() -> Outcome {
    let start = Instant::now();
    let r = explore(
        StyleTag::Nvdla,
        &builtin_workload("I").unwrap(),
        &edge(),
        &opts(StrideMode::Pow2, LoopOrderPolicy::Fixed),
    )
    .map_err(|e| e.to_string())?;
    let pop: u64 = r.histogram.counts.iter().sum();
    let s = within(Duration::from_secs(300), start)?;
    let detail = format!(
        "spread {:.2}, histogram {pop} of {} candidates ({s:.1} s)",
        r.spread, r.stats.pruned_count
    );
    if r.spread >= 2.0 && pop == r.stats.pruned_count {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn square_ordering() -> Outcome {
    let start = Instant::now();
    let w = builtin_workload("I").unwrap();
    let hw = edge();
    let o = opts(StrideMode::Pow2, LoopOrderPolicy::Fixed);
    let mut best = Vec::new();
    for style in StyleTag::ALL {
        let r = explore(style, &w, &hw, &o).map_err(|e| e.to_string())?;
        best.push((style, r.best.report.runtime_cycles, r.best.report.energy_units));
    }
    within(Duration::from_secs(600), start)?;
    let table: Vec<String> = best
        .iter()
        .map(|(s, rt, en)| format!("{s} {rt} cycles {en:.4e} units"))
        .collect();
    let (_, nv_rt, nv_en) = best[1];
    let others = best.iter().filter(|b| b.0 != StyleTag::Nvdla);
    let wins = others.clone().all(|b| nv_rt < b.1) && others.clone().all(|b| nv_en < b.2);
    if wins {
        Ok(table.join("; "))
    } else {
        Err(format!("nvdla is not strictly best: {}", table.join("; ")))
    }
}

fn transpose_symmetry() -> Outcome {
    let start = Instant::now();
    let (iv, v) = (builtin_workload("IV").unwrap(), builtin_workload("V").unwrap());
    let hw = edge();
    let cost = CostOptions::default();
    let search = SearchOptions {
        stride: StrideMode::Pow2,
        loop_orders: LoopOrderPolicy::All,
    };
    let report = |m: &Mapping, w: &GemmWorkload| {
        let sched = build_schedule(m, w, &hw).map_err(|e| e.to_string())?;
        Ok::<_, String>(report_from_traffic(&count_accesses(&sched, &cost), w, &hw, &cost))
    };
    let mut checked = 0u64;
    for style in StyleTag::ALL {
        let orders = loop_orders(style, LoopOrderPolicy::All);
        let mut seen = vec![false; orders.len()];
        for c in enumerate_candidates(style, &iv, &hw, &search) {
            let a = report(&c.mapping, &iv)?;
            let t = c.mapping.transposed();
            if t.outer_order() != c.loop_order.mirrored() {
                return Err(format!("{style}: transposed order {}", t.outer_order()));
            }
            let b = report(&t, &v)?;
            if a.runtime_cycles != b.runtime_cycles || a.energy_units != b.energy_units {
                return Err(format!(
                    "{style} {}: IV {} cycles {} units, V {} cycles {} units\n{}",
                    c.loop_order,
                    a.runtime_cycles,
                    a.energy_units,
                    b.runtime_cycles,
                    b.energy_units,
                    c.mapping.render()
                ));
            }
            if let Some(i) = orders.iter().position(|o| *o == c.loop_order) {
                seen[i] = true;
            }
            checked += 1;
        }
        if !seen.iter().all(|s| *s) {
            return Err(format!("{style}: some legal orders had no candidates"));
        }
    }
    let s = start.elapsed().as_secs_f64();
    Ok(format!("{checked} mappings symmetric over every style and legal order ({s:.1} s)"))
}

fn flexibility() -> Outcome {
    let start = Instant::now();
    let hw = edge();
    let mut strict = 0;
    let mut cells = Vec::new();
    for (id, w) in builtin_workloads() {
        let run = |p| {
            explore(StyleTag::Maeri, &w, &hw, &opts(StrideMode::Pow2, p))
                .map(|r| r.best.report.runtime_cycles)
                .map_err(|e| e.to_string())
        };
        let (fixed, all) = (run(LoopOrderPolicy::Fixed)?, run(LoopOrderPolicy::All)?);
        if all > fixed {
            return Err(format!("workload {id}: all orders {all}, mnk only {fixed}"));
        }
        if all < fixed {
            strict += 1;
        }
        cells.push(format!("{id} {:.3}", all as f64 / fixed as f64));
    }
    let s = start.elapsed().as_secs_f64();
    let detail = format!(
        "all/fixed runtime {}; strictly better on {strict} ({s:.0} s)",
        cells.join(", ")
    );
    if strict > 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn search_quality() -> Outcome {
    let start = Instant::now();
    let hw = edge();
    let o = opts(StrideMode::All, LoopOrderPolicy::Fixed);
    let shapes = [
        (64, 64, 64),
        (8, 64, 32),
        (48, 16, 64),
        (1, 64, 7),
        (17, 33, 64),
        (64, 64, 1),
        (3, 5, 61),
        (64, 1, 64),
        (40, 24, 9),
        (8, 8, 64),
        (1, 1, 64),
        (1, 64, 8),
        (64, 1, 8),
        (4, 2, 2),
    ];
    let mut compared = 0;
    for (m, n, k) in shapes {
        let w = GemmWorkload::new(m, n, k).unwrap();
        for style in StyleTag::ALL {
            let best = explore(style, &w, &hw, &o).map_err(|e| format!("{style} {w}: {e}"))?;
            for seed in 0..10 {
                let Some(r) = random_sample_baseline(
                    style,
                    &w,
                    &hw,
                    1000,
                    seed,
                    LoopOrderPolicy::Fixed,
                    &o.cost,
                )
                .map_err(|e| e.to_string())?
                else {
                    continue;
                };
                if best.best.report.runtime_cycles > r.report.runtime_cycles {
                    return Err(format!(
                        "{style} {w} seed {seed}: explore {} cycles, random {}",
                        best.best.report.runtime_cycles, r.report.runtime_cycles
                    ));
                }
                compared += 1;
            }
        }
    }
    let s = start.elapsed().as_secs_f64();
    Ok(format!(
        "{} shapes x 5 styles x 10 seeds, {compared} comparisons, zero exceptions ({s:.0} s)",
        shapes.len()
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for format in ["json", "csv"] {
        for run in 0..2 {
            let path = dir.path().join(format!("run{run}.{format}"));
            let status = Command::new(env!("CARGO_BIN_EXE_flashx"))
                .args([
                    "explore",
                    "--style",
                    "maeri",
                    "--workload",
                    "VI",
                    "--hw",
                    "edge",
                    "--loop-orders",
                    "all",
                    "--stride",
                    "pow2",
                    "--samples",
                    "500",
                    "--seed",
                    "42",
                    "--format",
                    format,
                    "--out",
                ])
                .arg(&path)
                .output()
                .map_err(|e| e.to_string())?;
            if !status.status.success() {
                return Err(format!(
                    "explore exited with {:?}: {}",
                    status.status.code(),
                    String::from_utf8_lossy(&status.stderr)
                ));
            }
            outputs.push(fs::read(&path).map_err(|e| e.to_string())?);
        }
    }
    if outputs[0] == outputs[1] && outputs[2] == outputs[3] {
        Ok(format!(
            "JSON ({} bytes) and CSV ({} bytes) identical across runs",
            outputs[0].len(),
            outputs[2].len()
        ))
    } else {
        Err("result files differ between identical runs".into())
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("workload arithmetic", workload_arithmetic),
        ("tile-bound formulas", tile_bounds),
        ("pruning ratio and time", pruning),
        ("oracle equivalence", oracle_equivalence),
        ("capacity soundness", capacity_soundness),
        ("tiling impact", tiling_impact),
        ("runtime spread", spread),
        ("square-matrix ordering", square_ordering),
        ("transpose symmetry", transpose_symmetry),
        ("loop-order flexibility", flexibility),
        ("search quality", search_quality),
        ("determinism", determinism),
    ];
    // Numeric arguments select criteria; anything else cargo passes through
    // is ignored.
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !only.is_empty() && !only.contains(&(i + 1)) {
            continue;
        }
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: no failures");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
