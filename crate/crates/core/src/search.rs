//! Closed-form tile-size bounds and pruned candidate enumeration.
//!
//! The closed forms bound each pair of free tiles assuming the two are
//! equal. Enumeration walks that box plus every lopsided pair up to the
//! buffer capacity, then validates each candidate.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataflow::{
    mapping_from_style, s1_footprint, s2_footprint, validate_mapping, Mapping, TileSet,
};
use crate::error::Error;
use crate::model::{ClusterSizeRule, Dim, GemmWorkload, HardwareConfig, LoopOrder, StyleTag};

/// Allowed values of one tile variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bound {
    Fixed(u64),
    /// Every integer in `1..=upper`.
    Range(u64),
}

impl Bound {
    /// Builds a range, collapsing empty ones to `Fixed(1)`.
    pub fn up_to(upper: u64) -> Bound {
        if upper <= 1 {
            Bound::Fixed(1)
        } else {
            Bound::Range(upper)
        }
    }

    pub fn upper(&self) -> u64 {
        match *self {
            Bound::Fixed(v) | Bound::Range(v) => v,
        }
    }

    pub fn contains(&self, v: u64) -> bool {
        match *self {
            Bound::Fixed(f) => v == f,
            Bound::Range(hi) => v >= 1 && v <= hi,
        }
    }

    /// Values under the stride mode, largest first.
    pub fn values(&self, stride: StrideMode) -> Vec<u64> {
        match *self {
            Bound::Fixed(v) => vec![v],
            Bound::Range(hi) => stride_values(hi, stride),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrideMode {
    /// Every integer.
    #[default]
    All,
    /// Powers of two plus both range endpoints.
    Pow2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopOrderPolicy {
    /// Only the style's canonical order.
    Fixed,
    /// Every order the style allows.
    #[default]
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SearchOptions {
    pub stride: StrideMode,
    pub loop_orders: LoopOrderPolicy,
}

/// Values of `1..=hi` under the stride mode, descending.
pub fn stride_values(hi: u64, stride: StrideMode) -> Vec<u64> {
    match stride {
        StrideMode::All => (1..=hi).rev().collect(),
        StrideMode::Pow2 => {
            let mut v: Vec<u64> = std::iter::successors(Some(1u64), |x| x.checked_mul(2))
                .take_while(|x| *x <= hi)
                .collect();
            v.push(hi);
            v.sort_unstable_by(|a, b| b.cmp(a));
            v.dedup();
            v
        }
    }
}

fn stride_count(hi: u64, stride: StrideMode) -> u128 {
    match stride {
        StrideMode::All => hi as u128,
        StrideMode::Pow2 => stride_values(hi, stride).len() as u128,
    }
}

/// Orders `values` so that powers of two come first (largest first), then the
/// rest, largest first.
pub fn power_of_two_preference(values: &[u64]) -> Vec<u64> {
    let mut v = values.to_vec();
    v.sort_by_key(|x| pow2_rank(*x));
    v
}

/// Sort key placing larger powers of two before everything else.
pub fn pow2_rank(v: u64) -> (bool, std::cmp::Reverse<u64>) {
    (!v.is_power_of_two(), std::cmp::Reverse(v))
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Largest `t` with `a*t^2 + b*t <= c`, or 0.
fn largest_quadratic_root(a: u128, b: u128, c: u128) -> u64 {
    let f = |t: u128| a * t * t + b * t;
    if f(1) > c {
        return 0;
    }
    let (mut lo, mut hi) = (1u128, 1u128);
    while f(hi) <= c {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if f(mid) <= c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo as u64
}

/// Upper bound for the outer temporal tiles when the spatial dimension
/// occupies `spatial_ext` elements across all clusters, assuming the two
/// temporal tiles are equal.
pub fn temporal_outer_bound(style: StyleTag, lambda: u64, beta: u64, spatial_ext: u64) -> u64 {
    let ext = spatial_ext as u128;
    match style {
        // t^2 + 2*ext*t <= beta/2
        StyleTag::Maeri => largest_quadratic_root(2, 4 * ext, beta as u128),
        // 2*lambda*t^2 + 2*ext*(lambda+1)*t <= beta
        _ => {
            let l = lambda as u128;
            largest_quadratic_root(2 * l, 2 * ext * (l + 1), beta as u128)
        }
    }
}

/// Upper bound for the two free inner tiles when the tied per-PE tile is
/// `tied`: largest `a` with `2a^2 + 4*tied*a <= alpha`.
pub fn inner_free_bound(alpha: u64, tied: u64) -> u64 {
    largest_quadratic_root(2, 4 * tied as u128, alpha as u128)
}

/// Dimension roles of a style template for a given loop order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Roles {
    /// Split across clusters.
    pub spatial: Dim,
    /// Outer temporal dim whose directive size is scaled by lambda, if any.
    pub scaled: Option<Dim>,
    /// The two outer temporal dims.
    pub temporal: [Dim; 2],
    /// Inner dim whose tile is tied to another field.
    pub tied_inner: Dim,
    /// The two free inner dims.
    pub free_inner: [Dim; 2],
}

pub fn roles(style: StyleTag, order: LoopOrder) -> Roles {
    use Dim::*;
    match style {
        StyleTag::Eyeriss => Roles {
            spatial: M,
            scaled: Some(K),
            temporal: [N, K],
            tied_inner: K,
            free_inner: [M, N],
        },
        StyleTag::Nvdla | StyleTag::Tpu => Roles {
            spatial: N,
            scaled: Some(K),
            temporal: [M, K],
            tied_inner: K,
            free_inner: [M, N],
        },
        StyleTag::ShiDianNao => Roles {
            spatial: M,
            scaled: Some(N),
            temporal: [N, K],
            tied_inner: N,
            free_inner: [M, K],
        },
        StyleTag::Maeri => {
            let [x, y, z] = order.dims();
            Roles {
                spatial: y,
                scaled: None,
                temporal: [x, z],
                tied_inner: z,
                free_inner: [x, y],
            }
        }
    }
}

/// Spatial-tile bound: the even split `ceil(D/C)` when it fits with unit
/// temporal tiles, otherwise the range of tiles that do fit.
fn spatial_bound(
    style: StyleTag,
    r: &Roles,
    lambda: u64,
    beta: u64,
    clusters: u64,
    w: &GemmWorkload,
) -> Option<Bound> {
    // Footprint with unit temporal tiles; the lambda-scaled (or, for MAERI,
    // cluster-tied) dim spans lambda elements.
    let unit_ext = |d: Dim| -> u64 {
        let tied = match style {
            StyleTag::Maeri => d == r.temporal[1],
            _ => Some(d) == r.scaled,
        };
        if tied {
            lambda.min(w.dim(d))
        } else {
            1
        }
    };
    let (ea, eb) = (unit_ext(r.temporal[0]), unit_ext(r.temporal[1]));
    let half = beta / 2;
    if ea * eb > half {
        return None;
    }
    let max_ext = (half - ea * eb) / (ea + eb);
    let d = w.dim(r.spatial);
    if d <= max_ext {
        return Some(Bound::Fixed(ceil_div(d, clusters)));
    }
    let fit = max_ext / clusters;
    (fit >= 1).then(|| Bound::up_to(fit))
}

fn temporal_bounds(
    style: StyleTag,
    r: &Roles,
    lambda: u64,
    beta: u64,
    clusters: u64,
    spatial_tile: u64,
    w: &GemmWorkload,
) -> [Bound; 2] {
    let ext = (spatial_tile * clusters).min(w.dim(r.spatial));
    let tb = temporal_outer_bound(style, lambda, beta, ext);
    r.temporal.map(|d| Bound::up_to(tb.min(w.dim(d))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileBounds {
    pub m: Bound,
    pub n: Bound,
    pub k: Bound,
}

impl TileBounds {
    pub fn get(&self, d: Dim) -> Bound {
        match d {
            Dim::M => self.m,
            Dim::N => self.n,
            Dim::K => self.k,
        }
    }

    fn from_fn(f: impl Fn(Dim) -> Bound) -> Self {
        TileBounds {
            m: f(Dim::M),
            n: f(Dim::N),
            k: f(Dim::K),
        }
    }
}

/// Outer tile bounds for one (style, order, cluster size). For MAERI the
/// cluster size is the outer tile of the innermost loop dim. When the
/// spatial tile is a range, temporal bounds are those of its largest value.
pub fn outer_tile_bounds(
    style: StyleTag,
    loop_order: LoopOrder,
    lambda: u64,
    beta_elems: u64,
    pe_count: u64,
    w: &GemmWorkload,
) -> Result<TileBounds, Error> {
    let clusters = pe_count / lambda.max(1);
    if lambda == 0 || clusters == 0 {
        return Err(Error::IllegalClusterSize { style, lambda });
    }
    let r = roles(style, loop_order);
    let spatial = spatial_bound(style, &r, lambda, beta_elems, clusters, w)
        .ok_or(Error::InfeasibleSpatialTile { style, lambda })?;
    let t = temporal_bounds(style, &r, lambda, beta_elems, clusters, spatial.upper(), w);
    Ok(TileBounds::from_fn(|d| {
        if d == r.spatial {
            spatial
        } else if d == r.temporal[0] {
            t[0]
        } else {
            t[1]
        }
    }))
}

/// Inner tile bounds given resolved outer tiles.
pub fn inner_tile_bounds(
    style: StyleTag,
    loop_order: LoopOrder,
    outer: &TileSet,
    alpha_elems: u64,
    w: &GemmWorkload,
) -> TileBounds {
    let r = roles(style, loop_order);
    let (tied_value, per_pe) = match style {
        StyleTag::Maeri => (1, 1),
        _ => {
            let v = outer.outer(r.tied_inner);
            (v, v.min(w.dim(r.tied_inner)))
        }
    };
    let ib = inner_free_bound(alpha_elems, per_pe);
    TileBounds::from_fn(|d| {
        if d == r.tied_inner {
            Bound::Fixed(tied_value)
        } else {
            Bound::up_to(ib.min(outer.outer(d)).min(w.dim(d)))
        }
    })
}

/// One emitted candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub style: StyleTag,
    pub loop_order: LoopOrder,
    pub lambda: u64,
    pub tiles: TileSet,
    pub mapping: Mapping,
}

/// Enumeration is partitioned into groups of one loop order and one cluster
/// size; groups are emitted in order and each is sorted internally.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Group {
    pub loop_order: LoopOrder,
    pub lambda: u64,
}

pub fn loop_orders(style: StyleTag, policy: LoopOrderPolicy) -> Vec<LoopOrder> {
    let c = style.constraints();
    match policy {
        LoopOrderPolicy::Fixed => vec![c.canonical_order()],
        LoopOrderPolicy::All => c.legal_orders(),
    }
}

fn maeri_lambda_upper(order: LoopOrder, w: &GemmWorkload, hw: &HardwareConfig) -> u64 {
    let [_, y, z] = order.dims();
    let cap = w.dim(z).min(hw.pe_count());
    let full = temporal_outer_bound(StyleTag::Maeri, 1, hw.beta_elems(), w.dim(y));
    let upper = if full >= 1 {
        full
    } else {
        temporal_outer_bound(StyleTag::Maeri, 1, hw.beta_elems(), 1)
    };
    upper.min(cap).max(1)
}

pub fn groups(
    style: StyleTag,
    w: &GemmWorkload,
    hw: &HardwareConfig,
    opts: &SearchOptions,
) -> Vec<Group> {
    let rule = style.constraints().cluster_size_rule;
    let mut out = Vec::new();
    for loop_order in loop_orders(style, opts.loop_orders) {
        let lambdas: Vec<u64> = match rule {
            ClusterSizeRule::TiedToTile => {
                let mut v = stride_values(maeri_lambda_upper(loop_order, w, hw), opts.stride);
                v.reverse();
                v
            }
            _ => rule.sizes(hw.pe_count()),
        };
        out.extend(lambdas.into_iter().map(|lambda| Group { loop_order, lambda }));
    }
    out
}

/// Largest `v` in `1..=cap` with `fits(v)`, or 0. `fits` must be monotone.
fn largest_fitting(cap: u64, fits: impl Fn(u64) -> bool) -> u64 {
    if cap == 0 || !fits(1) {
        return 0;
    }
    let (mut lo, mut hi) = (1, cap);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Value pairs for two free tiles. The closed-form bounds assume both tiles
/// are equal, so they form a box that leaves out lopsided pairs which still
/// fit. The pairs are the box plus every pair up to the capacity frontier
/// `fits`, each coordinate capped.
fn tile_pairs(
    box_a: Bound,
    box_b: Bound,
    caps: [u64; 2],
    stride: StrideMode,
    fits: impl Fn(u64, u64) -> bool,
) -> Vec<(u64, u64)> {
    let a_hi = match box_a {
        Bound::Fixed(v) => v,
        Bound::Range(hi) => hi.max(largest_fitting(caps[0], |a| fits(a, 1))),
    };
    let mut out = Vec::new();
    for a in stride_values(a_hi, stride) {
        let b_vals = match box_b {
            Bound::Fixed(v) => vec![v],
            Bound::Range(hi) => {
                let edge = largest_fitting(caps[1], |b| fits(a, b));
                let b_hi = if a <= box_a.upper() { edge.max(hi) } else { edge };
                if b_hi == 0 {
                    continue;
                }
                stride_values(b_hi, stride)
            }
        };
        out.extend(b_vals.into_iter().map(|b| (a, b)));
    }
    out
}

/// All tile sets of a group, largest first, before capacity validation.
fn group_tiles(
    style: StyleTag,
    g: &Group,
    w: &GemmWorkload,
    hw: &HardwareConfig,
    stride: StrideMode,
) -> Vec<TileSet> {
    let p = hw.pe_count();
    let clusters = p / g.lambda;
    if clusters == 0 {
        return Vec::new();
    }
    let r = roles(style, g.loop_order);
    let (alpha, beta) = (hw.alpha_elems(), hw.beta_elems());
    let Some(spatial) = spatial_bound(style, &r, g.lambda, beta, clusters, w) else {
        return Vec::new();
    };
    let tied_of = |outer: &TileSet| match style {
        StyleTag::Maeri => 1,
        _ => outer.outer(r.tied_inner),
    };
    let fits_s2 = |t: &TileSet| {
        mapping_from_style(style, g.loop_order, g.lambda, t)
            .is_ok_and(|m| s2_footprint(&m, w, p) <= beta)
    };
    let fits_s1 = |t: &TileSet| {
        mapping_from_style(style, g.loop_order, g.lambda, t).is_ok_and(|m| s1_footprint(&m, w) <= alpha)
    };
    let mut tiles = Vec::new();
    for s in spatial.values(stride) {
        // A closed-form bound of 1 still opens a box the frontier can extend,
        // so free tiles are always ranges here.
        let [ta, tb] = temporal_bounds(style, &r, g.lambda, beta, clusters, s, w)
            .map(|b| Bound::Range(b.upper()));
        // The innermost dim's outer tile of MAERI is the cluster size itself.
        let tb = if style == StyleTag::Maeri {
            if !tb.contains(g.lambda) {
                continue;
            }
            Bound::Fixed(g.lambda)
        } else {
            tb
        };
        let with_outer = |a: u64, b: u64| {
            let mut t = TileSet::ones();
            t.set_outer(r.spatial, s);
            t.set_outer(r.temporal[0], a);
            t.set_outer(r.temporal[1], b);
            t.set_inner(r.tied_inner, tied_of(&t));
            t
        };
        let caps = r.temporal.map(|d| w.dim(d));
        let outer_pairs = tile_pairs(ta, tb, caps, stride, |a, b| fits_s2(&with_outer(a, b)));
        for (a, b) in outer_pairs {
            let outer = with_outer(a, b);
            let ib = inner_tile_bounds(style, g.loop_order, &outer, alpha, w);
            let [f0, f1] = r.free_inner;
            let caps = [f0, f1].map(|d| outer.outer(d).min(w.dim(d)));
            let with_inner = |i0: u64, i1: u64| {
                let mut t = outer;
                t.set_inner(f0, i0);
                t.set_inner(f1, i1);
                t
            };
            let [b0, b1] = [f0, f1].map(|d| Bound::Range(ib.get(d).upper()));
            let inner_pairs = tile_pairs(b0, b1, caps, stride, |i0, i1| {
                fits_s1(&with_inner(i0, i1))
            });
            tiles.extend(inner_pairs.into_iter().map(|(i0, i1)| with_inner(i0, i1)));
        }
    }
    tiles.sort_unstable_by(|a, b| b.as_array().cmp(&a.as_array()));
    tiles.dedup();
    tiles
}

/// Candidates of one group that pass validation, in emission order.
pub fn group_candidates(
    style: StyleTag,
    g: &Group,
    w: &GemmWorkload,
    hw: &HardwareConfig,
    stride: StrideMode,
) -> Vec<Candidate> {
    group_tiles(style, g, w, hw, stride)
        .into_iter()
        .filter_map(|tiles| {
            let mapping = mapping_from_style(style, g.loop_order, g.lambda, &tiles).ok()?;
            validate_mapping(&mapping, w, hw).is_valid().then_some(Candidate {
                style,
                loop_order: g.loop_order,
                lambda: g.lambda,
                tiles,
                mapping,
            })
        })
        .collect()
}

/// Pruned candidate stream: loop order, then cluster size ascending, then
/// tiles in descending lexicographic order. Every item validates.
pub fn enumerate_candidates<'a>(
    style: StyleTag,
    w: &'a GemmWorkload,
    hw: &'a HardwareConfig,
    opts: &SearchOptions,
) -> impl Iterator<Item = Candidate> + 'a {
    let stride = opts.stride;
    groups(style, w, hw, opts)
        .into_iter()
        .flat_map(move |g| group_candidates(style, &g, w, hw, stride))
}

/// Every valid candidate with each free tile field over `1..=dim`, for
/// desk-scale comparisons against the pruned stream. Tied fields follow the
/// template; outer tiles are pruned against S2 before inner tiles are tried.
pub fn exhaustive_candidates(
    style: StyleTag,
    w: &GemmWorkload,
    hw: &HardwareConfig,
    policy: LoopOrderPolicy,
) -> Vec<Candidate> {
    let rule = style.constraints().cluster_size_rule;
    let p = hw.pe_count();
    let mut out = Vec::new();
    for order in loop_orders(style, policy) {
        let r = roles(style, order);
        let lambdas: Vec<u64> = match rule {
            ClusterSizeRule::TiedToTile => (1..=w.dim(r.temporal[1]).min(p)).collect(),
            _ => rule.sizes(p),
        };
        for lambda in lambdas {
            let clusters = p / lambda;
            for s in 1..=w.dim(r.spatial) {
                for a in 1..=w.dim(r.temporal[0]) {
                    let b_range = if style == StyleTag::Maeri {
                        lambda..=lambda
                    } else {
                        1..=w.dim(r.temporal[1])
                    };
                    for b in b_range {
                        let mut outer = TileSet::ones();
                        outer.set_outer(r.spatial, s);
                        outer.set_outer(r.temporal[0], a);
                        outer.set_outer(r.temporal[1], b);
                        let tied = if style == StyleTag::Maeri {
                            1
                        } else {
                            outer.outer(r.tied_inner)
                        };
                        outer.set_inner(r.tied_inner, tied);
                        let Ok(probe) = mapping_from_style(style, order, lambda, &outer) else {
                            continue;
                        };
                        if clusters == 0
                            || s2_footprint(&probe, w, p) > hw.beta_elems()
                        {
                            continue;
                        }
                        let [f0, f1] = r.free_inner;
                        for i0 in 1..=w.dim(f0).min(outer.outer(f0)) {
                            for i1 in 1..=w.dim(f1).min(outer.outer(f1)) {
                                let mut tiles = outer;
                                tiles.set_inner(f0, i0);
                                tiles.set_inner(f1, i1);
                                let Ok(mapping) =
                                    mapping_from_style(style, order, lambda, &tiles)
                                else {
                                    continue;
                                };
                                if validate_mapping(&mapping, w, hw).is_valid() {
                                    out.push(Candidate {
                                        style,
                                        loop_order: order,
                                        lambda,
                                        tiles,
                                        mapping,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneStats {
    /// Tile combinations with each of the six tile variables free over its
    /// dimension, times loop orders and cluster sizes.
    pub unpruned_count: u128,
    pub pruned_count: u64,
    pub reduction_ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generation_seconds: Option<f64>,
}

impl PruneStats {
    pub fn new(unpruned_count: u128, pruned_count: u64) -> Self {
        let reduction_ratio = if unpruned_count == 0 {
            0.0
        } else {
            1.0 - pruned_count as f64 / unpruned_count as f64
        };
        PruneStats {
            unpruned_count,
            pruned_count,
            reduction_ratio,
            generation_seconds: None,
        }
    }
}

/// Size of the unconstrained space, computed combinatorially.
pub fn unpruned_count(
    style: StyleTag,
    w: &GemmWorkload,
    hw: &HardwareConfig,
    opts: &SearchOptions,
) -> u128 {
    let per_dim: u128 = Dim::ALL
        .iter()
        .map(|d| stride_count(w.dim(*d), opts.stride).pow(2))
        .product();
    let orders = loop_orders(style, opts.loop_orders).len() as u128;
    let lambdas = match style.constraints().cluster_size_rule {
        ClusterSizeRule::TiedToTile => 1,
        rule => rule.sizes(hw.pe_count()).len() as u128,
    };
    per_dim * orders * lambdas
}

/// Counts the pruned space (in parallel) and times the generation.
pub fn prune_stats(
    style: StyleTag,
    w: &GemmWorkload,
    hw: &HardwareConfig,
    opts: &SearchOptions,
) -> PruneStats {
    let start = Instant::now();
    let pruned: u64 = groups(style, w, hw, opts)
        .par_iter()
        .map(|g| group_candidates(style, g, w, hw, opts.stride).len() as u64)
        .sum();
    let mut stats = PruneStats::new(unpruned_count(style, w, hw, opts), pruned);
    stats.generation_seconds = Some(start.elapsed().as_secs_f64());
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_hardware, EnergyTable};

    #[test]
    fn quadratic_roots() {
        assert_eq!(temporal_outer_bound(StyleTag::Maeri, 1, 102_400, 256), 85);
        assert_eq!(inner_free_bound(512, 1), 15);
        assert_eq!(inner_free_bound(512, 8), 9);
        assert_eq!(inner_free_bound(4, 1), 0);
        assert_eq!(Bound::up_to(0), Bound::Fixed(1));
    }

    #[test]
    fn maeri_bounds_on_256_cube() {
        let w = GemmWorkload::new(256, 256, 256).unwrap();
        let b = outer_tile_bounds(StyleTag::Maeri, LoopOrder::MNK, 64, 102_400, 256, &w).unwrap();
        assert_eq!(b.m, Bound::Range(85));
        assert_eq!(b.k, Bound::Range(85));
        assert_eq!(b.n, Bound::Fixed(64));
        let mut outer = TileSet::ones();
        outer.t_out_m = 64;
        outer.t_out_n = 64;
        outer.t_out_k = 64;
        let ib = inner_tile_bounds(StyleTag::Maeri, LoopOrder::MNK, &outer, 512, &w);
        assert_eq!((ib.m, ib.n, ib.k), (Bound::Range(15), Bound::Range(15), Bound::Fixed(1)));
    }

    #[test]
    fn walkthrough_spatial_tile() {
        let w = GemmWorkload::new(4, 4, 4).unwrap();
        let b = outer_tile_bounds(StyleTag::Maeri, LoopOrder::MNK, 2, 1 << 20, 8, &w).unwrap();
        assert_eq!(b.n, Bound::Fixed(1));
    }

    #[test]
    fn nvdla_inner_bound() {
        let w = GemmWorkload::new(256, 256, 256).unwrap();
        let outer = TileSet::new([16, 16, 8], [1, 1, 1]);
        let ib = inner_tile_bounds(StyleTag::Nvdla, LoopOrder::NKM, &outer, 512, &w);
        assert_eq!((ib.m, ib.n, ib.k), (Bound::Range(9), Bound::Range(9), Bound::Fixed(8)));
    }

    #[test]
    fn nvdla_large_square_falls_back_to_spatial_range() {
        let w = GemmWorkload::new(8192, 8192, 8192).unwrap();
        let b = outer_tile_bounds(StyleTag::Nvdla, LoopOrder::NKM, 16, 102_400, 256, &w).unwrap();
        assert_eq!(b.n, Bound::Range(188));
    }

    #[test]
    fn pow2_preference() {
        let order = power_of_two_preference(&stride_values(85, StrideMode::All));
        assert_eq!(order[0], 64);
        assert_eq!(order[7], 85);
        assert_eq!(power_of_two_preference(&stride_values(15, StrideMode::All))[0], 8);
        assert_eq!(power_of_two_preference(&[1]), vec![1]);
        assert_eq!(stride_values(85, StrideMode::Pow2), vec![85, 64, 32, 16, 8, 4, 2, 1]);
    }

    #[test]
    fn unit_workload_has_nothing_to_prune() {
        let w = GemmWorkload::new(1, 1, 1).unwrap();
        let hw = builtin_hardware("edge").unwrap();
        for style in StyleTag::ALL {
            let opts = SearchOptions::default();
            let cands: Vec<_> = enumerate_candidates(style, &w, &hw, &opts).collect();
            assert!(cands.iter().all(|c| c.tiles == TileSet::ones()), "{style}");
            let stats = prune_stats(style, &w, &hw, &opts);
            assert_eq!(stats.pruned_count, cands.len() as u64);
            assert_eq!(stats.reduction_ratio, 0.0, "{style}");
        }
    }

    #[test]
    fn stream_order_is_grouped_and_descending() {
        let w = GemmWorkload::new(16, 12, 20).unwrap();
        let hw = HardwareConfig::new(16, 64, 512, 4.0, 1, 1, EnergyTable::default()).unwrap();
        let cands: Vec<_> =
            enumerate_candidates(StyleTag::Maeri, &w, &hw, &SearchOptions::default()).collect();
        assert!(!cands.is_empty());
        for pair in cands.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a.loop_order == b.loop_order && a.lambda == b.lambda {
                assert!(a.tiles.as_array() > b.tiles.as_array());
            }
        }
    }
}
