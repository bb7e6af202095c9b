//! Brute-force step walk used to check the closed-form counts.
//!
//! Every step enumerates each cluster and PE, materializes the element sets
//! of A, B and C present in the array, and compares them against the
//! previous step: elements not present before are fetched from S2, C
//! elements that leave are written back, and C elements that were written
//! back earlier are read again when they return.

use crate::cost::runtime::{comm_cycles, pipeline_cycles};
use crate::cost::schedule::reduction_group;
use crate::cost::{CostOptions, MatrixCounts, Traffic};
use crate::dataflow::Mapping;
use crate::error::Error;
use crate::model::{Dim, GemmWorkload, HardwareConfig};

/// Largest M*N*K the walk accepts.
pub const ORACLE_MAC_LIMIT: u64 = 1_000_000;

struct Walk<'a> {
    m: &'a Mapping,
    w: &'a GemmWorkload,
    clusters: u64,
    lambda: u64,
    // Per-step outputs.
    macs: u64,
    compute: Vec<u64>,
    moved: Vec<u64>,
    reads: [u64; 3],
    c_writes: u64,
    prev: Option<[Vec<bool>; 3]>,
    flushed: Vec<bool>,
}

type Range = (u64, u64);

fn clip(lo: u64, len: u64, bound: Range) -> Range {
    let a = lo.max(bound.0).min(bound.1);
    let b = (lo + len).max(bound.0).min(bound.1);
    (a, b)
}

impl Walk<'_> {
    /// Elements of `d` held by cluster `c` during outer iteration `o`.
    fn cluster_range(&self, d: Dim, o: u64, c: u64) -> Range {
        let dir = self.m.outer_directive(d);
        let full = (0, self.w.dim(d));
        if dir.is_spatial() {
            clip((o * self.clusters + c) * dir.size, dir.size, full)
        } else {
            clip(o * dir.size, dir.size, full)
        }
    }

    fn outer_count(&self, d: Dim) -> u64 {
        let dir = self.m.outer_directive(d);
        let per = if dir.is_spatial() {
            dir.size * self.clusters
        } else {
            dir.size
        };
        self.w.dim(d).div_ceil(per)
    }

    fn inner_count(&self, d: Dim, o: u64) -> u64 {
        let dir = self.m.inner_directive(d);
        let per = if dir.is_spatial() {
            dir.size * self.lambda
        } else {
            dir.size
        };
        (0..self.clusters)
            .map(|c| {
                let (a, b) = self.cluster_range(d, o, c);
                (b - a).div_ceil(per)
            })
            .max()
            .unwrap_or(0)
    }

    fn pe_range(&self, d: Dim, o: u64, i: u64, c: u64, p: u64) -> Range {
        let chunk = self.cluster_range(d, o, c);
        let dir = self.m.inner_directive(d);
        if dir.is_spatial() {
            clip(chunk.0 + (i * self.lambda + p) * dir.size, dir.size, chunk)
        } else {
            clip(chunk.0 + i * dir.size, dir.size, chunk)
        }
    }

    fn step(&mut self, o: &[u64; 3], i: &[u64; 3]) {
        let (mm, nn, kk) = (self.w.m(), self.w.n(), self.w.k());
        let mut a = vec![false; (mm * kk) as usize];
        let mut b = vec![false; (kk * nn) as usize];
        let mut c = vec![false; (mm * nn) as usize];
        let mut busiest = 0;
        // Without an intra-cluster spatial directive every PE of a cluster
        // would repeat the same work; only the first one computes.
        let pes = if self.m.inner_spatial().is_some() {
            self.lambda
        } else {
            1
        };
        for cl in 0..self.clusters {
            for pe in 0..pes {
                let r = Dim::ALL.map(|d| self.pe_range(d, o[d.index()], i[d.index()], cl, pe));
                let work: u64 = r.iter().map(|(x, y)| y - x).product();
                if work == 0 {
                    continue;
                }
                self.macs += work;
                busiest = busiest.max(work);
                for mi in r[0].0..r[0].1 {
                    for ki in r[2].0..r[2].1 {
                        a[(mi * kk + ki) as usize] = true;
                    }
                    for ni in r[1].0..r[1].1 {
                        c[(mi * nn + ni) as usize] = true;
                    }
                }
                for ki in r[2].0..r[2].1 {
                    for ni in r[1].0..r[1].1 {
                        b[(ki * nn + ni) as usize] = true;
                    }
                }
            }
        }
        let fresh = |new: &[bool], old: Option<&Vec<bool>>| -> Vec<bool> {
            new.iter()
                .enumerate()
                .map(|(j, x)| *x && !old.is_some_and(|o| o[j]))
                .collect()
        };
        let prev = self.prev.take();
        let fa = fresh(&a, prev.as_ref().map(|p| &p[0]));
        let fb = fresh(&b, prev.as_ref().map(|p| &p[1]));
        let fc = fresh(&c, prev.as_ref().map(|p| &p[2]));
        let mut moved = 0;
        let count = |v: &[bool]| v.iter().filter(|x| **x).count() as u64;
        let (ra, rb) = (count(&fa), count(&fb));
        let mut wc = 0;
        if let Some(p) = &prev {
            for (j, held) in p[2].iter().enumerate() {
                if *held && !c[j] {
                    self.flushed[j] = true;
                    wc += 1;
                }
            }
        }
        let rc = fc
            .iter()
            .zip(&self.flushed)
            .filter(|(f, fl)| **f && **fl)
            .count() as u64;
        moved += ra + rb + rc + wc;
        self.reads[0] += ra;
        self.reads[1] += rb;
        self.reads[2] += rc;
        self.c_writes += wc;
        self.moved.push(moved);
        self.compute.push(busiest);
        self.prev = Some([a, b, c]);
    }

    fn run(&mut self, level: usize, o: &mut [u64; 3], i: &mut [u64; 3]) {
        if level == 6 {
            self.step(o, i);
            return;
        }
        let (d, outer) = if level < 3 {
            (self.m.outer[level].dim, true)
        } else {
            (self.m.inner[level - 3].dim, false)
        };
        let di = d.index();
        let n = if outer {
            self.outer_count(d)
        } else {
            self.inner_count(d, o[di])
        };
        for v in 0..n {
            if outer {
                o[di] = v;
            } else {
                i[di] = v;
            }
            self.run(level + 1, o, i);
        }
        if outer {
            o[di] = 0;
        } else {
            i[di] = 0;
        }
    }
}

/// Walks every step of `m` on `w`. Rejects workloads above
/// [`ORACLE_MAC_LIMIT`] MACs.
pub fn oracle_counts(
    m: &Mapping,
    w: &GemmWorkload,
    hw: &HardwareConfig,
    opts: &CostOptions,
) -> Result<Traffic, Error> {
    if w.mac_count() > ORACLE_MAC_LIMIT {
        return Err(Error::WorkloadTooLarge {
            macs: w.mac_count(),
            limit: ORACLE_MAC_LIMIT,
        });
    }
    let errs = m.structure_errors();
    if !errs.is_empty() {
        return Err(Error::InvalidMapping(errs));
    }
    let clusters = hw.pe_count() / m.cluster_size;
    if clusters == 0 {
        return Err(Error::InvalidMapping(vec!["no complete cluster".into()]));
    }
    let mut walk = Walk {
        m,
        w,
        clusters,
        lambda: m.cluster_size,
        macs: 0,
        compute: Vec::new(),
        moved: Vec::new(),
        reads: [0; 3],
        c_writes: 0,
        prev: None,
        flushed: vec![false; (w.m() * w.n()) as usize],
    };
    walk.run(0, &mut [0; 3], &mut [0; 3]);
    let flush = walk
        .prev
        .as_ref()
        .map_or(0, |p| p[2].iter().filter(|x| **x).count() as u64);
    walk.c_writes += flush;
    walk.moved.push(flush);

    let drain = reduction_group(m, w, clusters) - 1;
    let extra = if opts.reduction_per_step { drain } else { 0 };
    let compute: Vec<u64> = walk.compute.iter().map(|c| c + extra).collect();
    let bw = hw.noc_bandwidth_bytes_per_cycle();
    let comm: Vec<u64> = walk
        .moved
        .iter()
        .map(|e| comm_cycles(e * hw.element_bytes(), bw))
        .collect();
    let runtime = pipeline_cycles(&compute, &comm) + if opts.reduction_per_step { 0 } else { drain };
    Ok(Traffic {
        steps: compute.len() as u64,
        mac_count: walk.macs,
        compute_cycles: compute.iter().sum(),
        s2_reads: MatrixCounts {
            a: walk.reads[0],
            b: walk.reads[1],
            c: walk.reads[2],
        },
        c_writes: walk.c_writes,
        runtime_cycles: runtime,
    })
}
