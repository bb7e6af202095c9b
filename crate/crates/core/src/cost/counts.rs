//! Closed-form evaluation of a schedule.
//!
//! The loop nest is walked level by level. At each level the iterations are
//! split into runs over which every quantity below is identical (full tiles,
//! the first iteration, the remainder tile, ...). One representative per run
//! is evaluated recursively and the run is scaled by its length, so the cost
//! is independent of the workload size.

use crate::cost::runtime::comm_cycles;
use crate::cost::schedule::{Level, TileSchedule};
use crate::cost::{CostOptions, MatrixCounts, Traffic};
use crate::model::Dim;

const M: usize = 0;
const N: usize = 1;
const K: usize = 2;

/// Per-step quantities that traffic and compute depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct StepState {
    pub cov: [u64; 3],
    pub maxlen: [u64; 3],
    /// First K tile of its output: nothing to read back for C.
    pub k_first: bool,
}

#[derive(Debug, Clone, Copy)]
struct Summary {
    steps: u64,
    macs: u64,
    compute: u64,
    reads: [u64; 3],
    c_writes: u64,
    /// Pipeline time of the transitions inside this run of steps.
    time: u64,
    first: StepState,
    last: StepState,
    /// Dims whose tile index differs between `first` and `last`.
    changed: [bool; 3],
}

#[derive(Debug, Clone, Copy, Default)]
struct Trans {
    reads: [u64; 3],
    c_writes: u64,
    time: u64,
}

struct Evaluator<'a> {
    s: &'a TileSchedule,
    step_extra: u64,
}

impl Evaluator<'_> {
    fn compute(&self, st: &StepState) -> u64 {
        st.maxlen.iter().product::<u64>() + self.step_extra
    }

    fn comm(&self, elements: u64) -> u64 {
        comm_cycles(elements * self.s.element_bytes, self.s.bandwidth)
    }

    /// Traffic when moving from step `a` to step `b` given which dim indices
    /// changed.
    fn trans(&self, a: &StepState, b: &StepState, ch: [bool; 3]) -> Trans {
        let mut t = Trans::default();
        if ch[M] || ch[K] {
            t.reads[0] = b.cov[M] * b.cov[K];
        }
        if ch[K] || ch[N] {
            t.reads[1] = b.cov[K] * b.cov[N];
        }
        if ch[M] || ch[N] {
            t.c_writes = a.cov[M] * a.cov[N];
            if !b.k_first {
                t.reads[2] = b.cov[M] * b.cov[N];
            }
        }
        let moved = t.reads.iter().sum::<u64>() + t.c_writes;
        t.time = self.compute(a).max(self.comm(moved));
        t
    }

    fn leaf(&self, o: &[u64; 3], i: &[u64; 3]) -> Summary {
        let mut st = StepState {
            cov: [0; 3],
            maxlen: [0; 3],
            k_first: o[K] == 0 && i[K] == 0,
        };
        for d in Dim::ALL {
            let (c, l) = self.s.plan(d).at(o[d.index()], i[d.index()]);
            st.cov[d.index()] = c;
            st.maxlen[d.index()] = l;
        }
        Summary {
            steps: 1,
            macs: st.cov.iter().product(),
            compute: self.compute(&st),
            reads: [0; 3],
            c_writes: 0,
            time: 0,
            first: st,
            last: st,
            changed: [false; 3],
        }
    }

    fn eval(&self, level: usize, o: &mut [u64; 3], i: &mut [u64; 3]) -> Summary {
        if level == 6 {
            return self.leaf(o, i);
        }
        let (d, lvl) = self.s.loops[level];
        let di = d.index();
        let plan = self.s.plan(d);
        let breaks = match lvl {
            Level::Outer => plan.outer_breaks(),
            Level::Inner => plan.inner_breaks(o[di]),
        };
        // Adjacent runs whose representatives look the same to everything
        // below this level form one longer run. The first K tile is kept
        // apart since it decides whether C is read back.
        let key = |start: u64| -> (u64, u64, u64, bool) {
            let first_k = d == Dim::K && start == 0;
            match lvl {
                Level::Outer => {
                    let (a, b, c) = plan.chunk(start);
                    (a, b, c, first_k)
                }
                Level::Inner => {
                    let (a, b) = plan.at(o[di], start);
                    (a, b, 0, first_k)
                }
            }
        };
        let breaks = breaks.as_slice();
        let mut runs = [(0u64, 0u64); 5];
        let mut nruns = 0;
        let mut last_key = None;
        for w in breaks.windows(2) {
            let k = key(w[0]);
            if nruns > 0 && last_key == Some(k) {
                runs[nruns - 1].1 += w[1] - w[0];
            } else {
                runs[nruns] = (w[0], w[1] - w[0]);
                nruns += 1;
            }
            last_key = Some(k);
        }
        let mut acc: Option<(Summary, [bool; 3])> = None;
        for &(start, len) in &runs[..nruns] {
            match lvl {
                Level::Outer => o[di] = start,
                Level::Inner => i[di] = start,
            }
            let sub = self.eval(level + 1, o, i);
            let mut step_ch = sub.changed;
            step_ch[di] = true;
            let mut run = sub;
            if len > 1 {
                let t = self.trans(&sub.last, &sub.first, step_ch);
                let r = len;
                run.steps = sub.steps * r;
                run.macs = sub.macs * r;
                run.compute = sub.compute * r;
                for k in 0..3 {
                    run.reads[k] = sub.reads[k] * r + t.reads[k] * (r - 1);
                }
                run.c_writes = sub.c_writes * r + t.c_writes * (r - 1);
                run.time = sub.time * r + t.time * (r - 1);
            }
            acc = Some(match acc {
                None => (run, sub.changed),
                Some((prev, prev_sub_ch)) => {
                    let mut ch = prev_sub_ch;
                    ch[di] = true;
                    let t = self.trans(&prev.last, &run.first, ch);
                    let mut joined = prev;
                    joined.steps += run.steps;
                    joined.macs += run.macs;
                    joined.compute += run.compute;
                    for k in 0..3 {
                        joined.reads[k] += run.reads[k] + t.reads[k];
                    }
                    joined.c_writes += run.c_writes + t.c_writes;
                    joined.time += run.time + t.time;
                    joined.last = run.last;
                    (joined, sub.changed)
                }
            });
        }
        match lvl {
            Level::Outer => o[di] = 0,
            Level::Inner => i[di] = 0,
        }
        let (mut total, last_sub_ch) = acc.expect("every loop runs at least once");
        let iterations = *breaks.last().unwrap();
        total.changed = last_sub_ch;
        if iterations > 1 {
            total.changed[di] = true;
        }
        total
    }
}

/// Traffic, compute and runtime of a schedule without walking its steps.
pub(crate) fn count_traffic(s: &TileSchedule, opts: &CostOptions) -> Traffic {
    let drain = s.reduction_group.saturating_sub(1);
    let ev = Evaluator {
        s,
        step_extra: if opts.reduction_per_step { drain } else { 0 },
    };
    let sum = ev.eval(0, &mut [0; 3], &mut [0; 3]);
    let (first, last) = (sum.first, sum.last);
    let a0 = first.cov[M] * first.cov[K];
    let b0 = first.cov[K] * first.cov[N];
    let flush = last.cov[M] * last.cov[N];
    let runtime = ev.comm(a0 + b0)
        + sum.time
        + ev.compute(&last).max(ev.comm(flush))
        + if opts.reduction_per_step { 0 } else { drain };
    Traffic {
        steps: sum.steps,
        mac_count: sum.macs,
        compute_cycles: sum.compute,
        s2_reads: MatrixCounts {
            a: a0 + sum.reads[0],
            b: b0 + sum.reads[1],
            c: sum.reads[2],
        },
        c_writes: sum.c_writes + flush,
        runtime_cycles: runtime,
    }
}
