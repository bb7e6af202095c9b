//! Lockstep tile schedule of a mapping.
//!
//! All clusters and PEs advance together through one global loop nest: the
//! outer directives (outermost first) followed by the inner directives. Each
//! dimension is traversed in one of three ways:
//!
//! * `Plain`: temporal at both levels.
//! * `Clusters`: spatial across clusters at the outer level, temporal
//!   within a cluster.
//! * `Pes`: temporal at the outer level, spatial across the PEs of a cluster.
//!
//! The number of inner iterations of a dim is set by the busiest cluster or
//! PE; the others idle once their share runs out.

use serde::{Deserialize, Serialize};

use crate::dataflow::Mapping;
use crate::error::Error;
use crate::model::{Dim, GemmWorkload, HardwareConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Plain,
    Clusters,
    Pes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    Outer,
    Inner,
}

/// How one dimension is tiled and distributed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimPlan {
    pub dim: Dim,
    pub role: Role,
    pub extent: u64,
    pub outer_size: u64,
    pub inner_size: u64,
    pub clusters: u64,
    pub lambda: u64,
}

impl DimPlan {
    /// Elements advanced by one outer iteration.
    pub fn outer_step(&self) -> u64 {
        match self.role {
            Role::Clusters => self.outer_size * self.clusters,
            _ => self.outer_size,
        }
    }

    pub fn outer_count(&self) -> u64 {
        self.extent.div_ceil(self.outer_step())
    }

    /// Elements of this outer iteration: full clusters, the length held by
    /// a trailing partial cluster, and the length held by cluster 0.
    pub(crate) fn chunk(&self, o: u64) -> (u64, u64, u64) {
        let rem = self.extent - o * self.outer_step();
        match self.role {
            Role::Clusters => {
                let s = self.outer_size;
                let full = self.clusters.min(rem / s);
                let partial = if full < self.clusters { rem - full * s } else { 0 };
                let lead = if full > 0 { s } else { partial };
                (full, partial, lead)
            }
            _ => {
                let len = rem.min(self.outer_size);
                (1, 0, len)
            }
        }
    }

    fn inner_step(&self) -> u64 {
        match self.role {
            Role::Pes => self.inner_size * self.lambda,
            _ => self.inner_size,
        }
    }

    pub fn inner_count(&self, o: u64) -> u64 {
        let (_, _, lead) = self.chunk(o);
        lead.div_ceil(self.inner_step())
    }

    /// Elements covered across the whole array, and the largest share held
    /// by a single PE, at outer index `o` and inner index `i`.
    pub fn at(&self, o: u64, i: u64) -> (u64, u64) {
        let t = self.inner_size;
        let left = |len: u64| len.saturating_sub(i * t).min(t);
        match self.role {
            Role::Plain => {
                let (_, _, lead) = self.chunk(o);
                let c = left(lead);
                (c, c)
            }
            Role::Clusters => {
                let (full, partial, lead) = self.chunk(o);
                (full * left(self.outer_size) + left(partial), left(lead))
            }
            Role::Pes => {
                let (_, _, lead) = self.chunk(o);
                let step = self.inner_step();
                let cov = lead.saturating_sub(i * step).min(step);
                (cov, cov.min(t))
            }
        }
    }

    /// Inner indices where `at(o, _)` may change value, plus both ends.
    pub fn inner_breaks(&self, o: u64) -> Breaks {
        let n = self.inner_count(o);
        let (q, extra) = if self.role == Role::Clusters {
            let (_, partial, _) = self.chunk(o);
            (partial / self.inner_size, 2)
        } else {
            (0, 0)
        };
        let b = [0, 1, n.saturating_sub(1), n, q, q + 1];
        Breaks::new(&b[..4 + extra], n)
    }

    /// Outer indices where the chunk shape may change, plus both ends.
    pub fn outer_breaks(&self) -> Breaks {
        let n = self.outer_count();
        Breaks::new(&[0, 1, n.saturating_sub(1), n], n)
    }
}

/// Sorted, deduplicated break indices within `0..=n`.
#[derive(Debug, Clone, Copy)]
pub struct Breaks {
    v: [u64; 6],
    len: usize,
}

impl Breaks {
    fn new(raw: &[u64], n: u64) -> Self {
        let mut v = [0; 6];
        let mut len = 0;
        for &x in raw.iter().filter(|x| **x <= n) {
            v[len] = x;
            len += 1;
        }
        v[..len].sort_unstable();
        let mut out = 0;
        for j in 0..len {
            if out == 0 || v[j] != v[out - 1] {
                v[out] = v[j];
                out += 1;
            }
        }
        Breaks { v, len: out }
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.v[..self.len]
    }
}

/// The global loop nest and everything needed to cost it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TileSchedule {
    /// Indexed by `Dim::index`.
    pub plans: [DimPlan; 3],
    /// Outermost first.
    pub loops: [(Dim, Level); 6],
    pub clusters: u64,
    pub lambda: u64,
    pub element_bytes: u64,
    pub bandwidth: f64,
    /// PEs or clusters whose partial sums of one output are reduced
    /// spatially; 1 when K is not split in space.
    pub reduction_group: u64,
}

impl TileSchedule {
    pub fn plan(&self, d: Dim) -> &DimPlan {
        &self.plans[d.index()]
    }
}

/// Builds the lockstep schedule. The mapping must be structurally valid and
/// leave at least one cluster.
pub fn build_schedule(
    m: &Mapping,
    w: &GemmWorkload,
    hw: &HardwareConfig,
) -> Result<TileSchedule, Error> {
    let errs = m.structure_errors();
    if !errs.is_empty() {
        return Err(Error::InvalidMapping(errs));
    }
    let clusters = m.cluster_count(hw.pe_count());
    if clusters == 0 {
        return Err(Error::InvalidMapping(vec![format!(
            "cluster size {} exceeds {} PEs",
            m.cluster_size,
            hw.pe_count()
        )]));
    }
    let x = m.outer_spatial();
    let y = m.inner_spatial();
    let plans = Dim::ALL.map(|d| DimPlan {
        dim: d,
        role: if d == x {
            Role::Clusters
        } else if Some(d) == y {
            Role::Pes
        } else {
            Role::Plain
        },
        extent: w.dim(d),
        outer_size: m.outer_directive(d).size,
        inner_size: m.inner_directive(d).size,
        clusters,
        lambda: m.cluster_size,
    });
    let mut loops = [(Dim::M, Level::Outer); 6];
    for (slot, d) in loops.iter_mut().zip(m.outer.iter()) {
        *slot = (d.dim, Level::Outer);
    }
    for (slot, d) in loops[3..].iter_mut().zip(m.inner.iter()) {
        *slot = (d.dim, Level::Inner);
    }
    let reduction_group = reduction_group(m, w, clusters);
    Ok(TileSchedule {
        plans,
        loops,
        clusters,
        lambda: m.cluster_size,
        element_bytes: hw.element_bytes(),
        bandwidth: hw.noc_bandwidth_bytes_per_cycle(),
        reduction_group,
    })
}

/// PEs (or clusters) that hold different K slices of the same outputs and
/// must be reduced: bounded by the split width and by how many slices K
/// actually provides.
pub fn reduction_group(m: &Mapping, w: &GemmWorkload, clusters: u64) -> u64 {
    let k = w.k();
    if m.inner_spatial() == Some(Dim::K) {
        let chunk = m.outer_directive(Dim::K).size.min(k);
        m.cluster_size.min(chunk.div_ceil(m.inner_directive(Dim::K).size))
    } else if m.outer_spatial() == Dim::K {
        clusters.min(k.div_ceil(m.outer_directive(Dim::K).size))
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(role: Role, extent: u64, outer: u64, inner: u64, clusters: u64, lambda: u64) -> DimPlan {
        DimPlan {
            dim: Dim::M,
            role,
            extent,
            outer_size: outer,
            inner_size: inner,
            clusters,
            lambda,
        }
    }

    #[test]
    fn clusters_with_partial_tail() {
        // 10 elements, 3 clusters of 3: chunks 3, 3, 3 then 1 on the next
        // outer step.
        let p = plan(Role::Clusters, 10, 3, 2, 3, 1);
        assert_eq!(p.outer_count(), 2);
        assert_eq!(p.inner_count(0), 2);
        assert_eq!(p.at(0, 0), (6, 2));
        assert_eq!(p.at(0, 1), (3, 1));
        assert_eq!(p.inner_count(1), 1);
        assert_eq!(p.at(1, 0), (1, 1));
    }

    #[test]
    fn pes_fold() {
        let p = plan(Role::Pes, 20, 20, 3, 1, 4);
        assert_eq!(p.inner_count(0), 2);
        assert_eq!(p.at(0, 0), (12, 3));
        assert_eq!(p.at(0, 1), (8, 3));
    }

    #[test]
    fn coverage_sums_to_extent() {
        for role in [Role::Plain, Role::Clusters, Role::Pes] {
            for extent in 1..20 {
                for outer in 1..6 {
                    for inner in 1..=outer {
                        let p = plan(role, extent, outer, inner, 3, 2);
                        let total: u64 = (0..p.outer_count())
                            .flat_map(|o| (0..p.inner_count(o)).map(move |i| (o, i)))
                            .map(|(o, i)| p.at(o, i).0)
                            .sum();
                        assert_eq!(total, extent, "{role:?} {extent} {outer} {inner}");
                    }
                }
            }
        }
    }
}
