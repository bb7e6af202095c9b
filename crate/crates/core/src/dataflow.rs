//! Directive programs: a mapping is an outer (inter-cluster) directive list,
//! a cluster size, and an inner (intra-cluster) directive list.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{ClusterSizeRule, Dim, GemmWorkload, HardwareConfig, LoopOrder, SpatialDim, StyleTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DirectiveKind {
    Temporal,
    Spatial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Directive {
    pub kind: DirectiveKind,
    pub dim: Dim,
    pub size: u64,
    pub offset: u64,
}

impl Directive {
    pub fn temporal(dim: Dim, size: u64) -> Self {
        Directive {
            kind: DirectiveKind::Temporal,
            dim,
            size,
            offset: size,
        }
    }

    pub fn spatial(dim: Dim, size: u64) -> Self {
        Directive {
            kind: DirectiveKind::Spatial,
            dim,
            size,
            offset: size,
        }
    }

    pub fn is_spatial(&self) -> bool {
        self.kind == DirectiveKind::Spatial
    }
}

impl fmt::Display for Directive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            DirectiveKind::Temporal => "TMap",
            DirectiveKind::Spatial => "SMap",
        };
        write!(f, "{name}({},{}) {}", self.size, self.offset, self.dim)
    }
}

/// The six tile sizes: outer (inter-cluster) and inner (intra-cluster) per
/// dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TileSet {
    pub t_out_m: u64,
    pub t_out_n: u64,
    pub t_out_k: u64,
    pub t_in_m: u64,
    pub t_in_n: u64,
    pub t_in_k: u64,
}

impl TileSet {
    pub fn new(outer: [u64; 3], inner: [u64; 3]) -> Self {
        TileSet {
            t_out_m: outer[0],
            t_out_n: outer[1],
            t_out_k: outer[2],
            t_in_m: inner[0],
            t_in_n: inner[1],
            t_in_k: inner[2],
        }
    }

    pub fn ones() -> Self {
        TileSet::new([1; 3], [1; 3])
    }

    pub fn outer(&self, d: Dim) -> u64 {
        match d {
            Dim::M => self.t_out_m,
            Dim::N => self.t_out_n,
            Dim::K => self.t_out_k,
        }
    }

    pub fn inner(&self, d: Dim) -> u64 {
        match d {
            Dim::M => self.t_in_m,
            Dim::N => self.t_in_n,
            Dim::K => self.t_in_k,
        }
    }

    pub fn set_outer(&mut self, d: Dim, v: u64) {
        match d {
            Dim::M => self.t_out_m = v,
            Dim::N => self.t_out_n = v,
            Dim::K => self.t_out_k = v,
        }
    }

    pub fn set_inner(&mut self, d: Dim, v: u64) {
        match d {
            Dim::M => self.t_in_m = v,
            Dim::N => self.t_in_n = v,
            Dim::K => self.t_in_k = v,
        }
    }

    /// Fields in reporting order (outer M, N, K, then inner M, N, K).
    pub fn as_array(&self) -> [u64; 6] {
        [
            self.t_out_m,
            self.t_out_n,
            self.t_out_k,
            self.t_in_m,
            self.t_in_n,
            self.t_in_k,
        ]
    }

    pub fn transposed(&self) -> TileSet {
        TileSet::new(
            [self.t_out_n, self.t_out_m, self.t_out_k],
            [self.t_in_n, self.t_in_m, self.t_in_k],
        )
    }
}

/// A two-level directive program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mapping {
    /// Style the mapping was instantiated from; `None` for free-form
    /// mappings, which are checked only structurally and for capacity.
    pub style: Option<StyleTag>,
    pub outer: [Directive; 3],
    pub cluster_size: u64,
    pub inner: [Directive; 3],
}

impl Mapping {
    pub fn outer_order(&self) -> LoopOrder {
        LoopOrder(self.outer.map(|d| d.dim))
    }

    pub fn inner_order(&self) -> LoopOrder {
        LoopOrder(self.inner.map(|d| d.dim))
    }

    pub fn outer_directive(&self, d: Dim) -> &Directive {
        self.outer
            .iter()
            .find(|x| x.dim == d)
            .expect("structurally valid mapping covers every dim")
    }

    pub fn inner_directive(&self, d: Dim) -> &Directive {
        self.inner
            .iter()
            .find(|x| x.dim == d)
            .expect("structurally valid mapping covers every dim")
    }

    /// Dimension distributed across clusters.
    pub fn outer_spatial(&self) -> Dim {
        self.outer
            .iter()
            .find(|d| d.is_spatial())
            .map(|d| d.dim)
            .expect("structurally valid mapping has an outer spatial directive")
    }

    /// Dimension distributed across the PEs of a cluster, if any.
    pub fn inner_spatial(&self) -> Option<Dim> {
        self.inner.iter().find(|d| d.is_spatial()).map(|d| d.dim)
    }

    /// Number of clusters the PE array is split into.
    pub fn cluster_count(&self, pe_count: u64) -> u64 {
        pe_count / self.cluster_size
    }

    /// The same program with M and N exchanged. The result is free-form.
    pub fn transposed(&self) -> Mapping {
        let swap = |d: Directive| Directive {
            dim: d.dim.transposed(),
            ..d
        };
        Mapping {
            style: None,
            outer: self.outer.map(swap),
            cluster_size: self.cluster_size,
            inner: self.inner.map(swap),
        }
    }

    /// Structural problems, independent of workload and hardware.
    pub fn structure_errors(&self) -> Vec<String> {
        let mut errs = Vec::new();
        for (level, dirs) in [("outer", &self.outer), ("inner", &self.inner)] {
            let mut seen = [false; 3];
            for d in dirs.iter() {
                if seen[d.dim.index()] {
                    errs.push(format!("{level} level maps {} twice", d.dim));
                }
                seen[d.dim.index()] = true;
                if d.size == 0 {
                    errs.push(format!("{level} directive on {} has size 0", d.dim));
                }
                if d.offset != d.size {
                    errs.push(format!(
                        "{level} directive on {} has offset {} != size {}",
                        d.dim, d.offset, d.size
                    ));
                }
            }
        }
        let outer_spatial = self.outer.iter().filter(|d| d.is_spatial()).count();
        if outer_spatial != 1 {
            errs.push(format!(
                "outer level needs exactly one spatial directive, found {outer_spatial}"
            ));
        }
        let inner_spatial = self.inner.iter().filter(|d| d.is_spatial()).count();
        if inner_spatial > 1 {
            errs.push(format!(
                "inner level allows at most one spatial directive, found {inner_spatial}"
            ));
        }
        if errs.is_empty() {
            if let Some(y) = self.inner_spatial() {
                if y == self.outer_spatial() {
                    errs.push(format!(
                        "{y} is spatial at both levels; clusters and PEs must split different dims"
                    ));
                }
            }
        }
        if self.cluster_size == 0 {
            errs.push("cluster size must be at least 1".into());
        }
        errs
    }

    /// Directive lines, one per line, with the cluster line between levels.
    pub fn render(&self) -> String {
        let mut lines: Vec<String> = self.outer.iter().map(|d| d.to_string()).collect();
        lines.push(format!("Cluster({})", self.cluster_size));
        lines.extend(self.inner.iter().map(|d| d.to_string()));
        lines.join("\n")
    }

    /// Like [`Mapping::render`], prefixed with a `Style(..)` line when the
    /// mapping carries a style.
    pub fn to_text(&self) -> String {
        match self.style {
            Some(s) => format!("Style({})\n{}", s.name(), self.render()),
            None => self.render(),
        }
    }
}

impl fmt::Display for Mapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn parse_args(s: &str, open: &str) -> Result<Vec<u64>, Error> {
    let inner = s
        .strip_prefix(open)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.split_once(')'))
        .ok_or_else(|| Error::Parse(format!("malformed directive `{s}`")))?;
    if !inner.1.trim().is_empty() && open == "Cluster" {
        return Err(Error::Parse(format!("trailing text after `{s}`")));
    }
    inner
        .0
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad number `{}` in `{s}`", v.trim())))
        })
        .collect()
}

fn parse_directive(line: &str) -> Result<Directive, Error> {
    let kind = if line.starts_with("TMap") {
        DirectiveKind::Temporal
    } else if line.starts_with("SMap") {
        DirectiveKind::Spatial
    } else {
        return Err(Error::Parse(format!("unknown directive `{line}`")));
    };
    let args = parse_args(line, &line[..4])?;
    if args.len() != 2 {
        return Err(Error::Parse(format!("`{line}` needs (size,offset)")));
    }
    let dim: Dim = line
        .rsplit_once(')')
        .map(|(_, d)| d)
        .unwrap_or("")
        .parse()?;
    Ok(Directive {
        kind,
        dim,
        size: args[0],
        offset: args[1],
    })
}

impl FromStr for Mapping {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut style = None;
        let mut outer = Vec::new();
        let mut inner = Vec::new();
        let mut cluster = None;
        let lines = text
            .split(['\n', ';'])
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        for line in lines {
            if let Some(rest) = line.strip_prefix("Style(") {
                let name = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("malformed `{line}`")))?;
                style = Some(name.parse::<StyleTag>()?);
            } else if line.starts_with("Cluster") {
                if cluster.is_some() {
                    return Err(Error::Parse("more than one Cluster directive".into()));
                }
                let args = parse_args(line, "Cluster")?;
                if args.len() != 1 {
                    return Err(Error::Parse(format!("`{line}` needs one size")));
                }
                cluster = Some(args[0]);
            } else if cluster.is_none() {
                outer.push(parse_directive(line)?);
            } else {
                inner.push(parse_directive(line)?);
            }
        }
        let cluster_size =
            cluster.ok_or_else(|| Error::Parse("missing Cluster directive".into()))?;
        let outer: [Directive; 3] = outer
            .try_into()
            .map_err(|_| Error::Parse("outer level needs exactly 3 directives".into()))?;
        let inner: [Directive; 3] = inner
            .try_into()
            .map_err(|_| Error::Parse("inner level needs exactly 3 directives".into()))?;
        let m = Mapping {
            style,
            outer,
            cluster_size,
            inner,
        };
        let errs = m.structure_errors();
        if errs.is_empty() {
            Ok(m)
        } else {
            Err(Error::InvalidMapping(errs))
        }
    }
}

/// Instantiates a style's directive template.
///
/// Tied tile fields are taken from their source: the inner spatial K size of
/// Eyeriss/NVDLA/TPU is `t_out_k`, ShiDianNao's inner spatial N size is
/// `t_out_n`, and MAERI's cluster size is the outer tile of the innermost
/// loop dimension.
pub fn mapping_from_style(
    style: StyleTag,
    loop_order: LoopOrder,
    lambda: u64,
    tiles: &TileSet,
) -> Result<Mapping, Error> {
    use Directive as D;
    use Dim::*;
    let constraints = style.constraints();
    if !constraints.is_legal_order(loop_order) {
        return Err(Error::IllegalLoopOrder {
            style,
            order: loop_order,
        });
    }
    let lambda_ok = match constraints.cluster_size_rule {
        ClusterSizeRule::Range { min, max } => lambda >= min && lambda <= max,
        ClusterSizeRule::SqrtP => lambda >= 1,
        ClusterSizeRule::TiedToTile => lambda == tiles.outer(loop_order.innermost()),
    };
    if !lambda_ok || lambda == 0 {
        return Err(Error::IllegalClusterSize { style, lambda });
    }
    if tiles.as_array().contains(&0) {
        return Err(Error::InvalidArgument("tile sizes must be positive".into()));
    }
    let t = tiles;
    let (outer, inner) = match style {
        StyleTag::Eyeriss => (
            [
                D::spatial(M, t.t_out_m),
                D::temporal(N, t.t_out_n),
                D::temporal(K, t.t_out_k * lambda),
            ],
            [
                D::temporal(M, t.t_in_m),
                D::temporal(N, t.t_in_n),
                D::spatial(K, t.t_out_k),
            ],
        ),
        StyleTag::Nvdla => (
            [
                D::spatial(N, t.t_out_n),
                D::temporal(K, t.t_out_k * lambda),
                D::temporal(M, t.t_out_m),
            ],
            [
                D::temporal(N, t.t_in_n),
                D::temporal(M, t.t_in_m),
                D::spatial(K, t.t_out_k),
            ],
        ),
        StyleTag::Tpu => (
            [
                D::spatial(N, t.t_out_n),
                D::temporal(M, t.t_out_m),
                D::temporal(K, t.t_out_k * lambda),
            ],
            [
                D::temporal(N, t.t_in_n),
                D::temporal(M, t.t_in_m),
                D::spatial(K, t.t_out_k),
            ],
        ),
        StyleTag::ShiDianNao => (
            [
                D::spatial(M, t.t_out_m),
                D::temporal(N, t.t_out_n * lambda),
                D::temporal(K, t.t_out_k),
            ],
            [
                D::temporal(M, t.t_in_m),
                D::spatial(N, t.t_out_n),
                D::temporal(K, t.t_in_k),
            ],
        ),
        StyleTag::Maeri => {
            let [x, y, z] = loop_order.dims();
            (
                [
                    D::temporal(x, t.outer(x)),
                    D::spatial(y, t.outer(y)),
                    D::temporal(z, t.outer(z)),
                ],
                [
                    D::temporal(x, t.inner(x)),
                    D::temporal(y, t.inner(y)),
                    D::spatial(z, 1),
                ],
            )
        }
    };
    Ok(Mapping {
        style: Some(style),
        outer,
        cluster_size: lambda,
        inner,
    })
}

/// The non-tiled reference mapping for MAERI-style order `lo`: unit outer
/// tiles on the two outer loop dims, the innermost dim spread over a
/// cluster of `min(dim, P)` PEs, unit inner tiles.
pub fn non_tiled_mapping(lo: LoopOrder, w: &GemmWorkload, pe_count: u64) -> Mapping {
    let z = lo.innermost();
    let lambda = w.dim(z).min(pe_count);
    let mut tiles = TileSet::ones();
    tiles.set_outer(z, lambda);
    mapping_from_style(StyleTag::Maeri, lo, lambda, &tiles)
        .expect("MAERI accepts every order and a tied cluster size")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tiling {
    NonTiled,
    Tiled,
}

/// Non-tiled iff the parallelism sits on the innermost loop dimension and the
/// outer tiles of the two enclosing loop dims are both 1.
pub fn classify_tiling(m: &Mapping, lo: LoopOrder) -> Tiling {
    let [a, b, z] = lo.dims();
    let unit = m.outer_directive(a).size == 1 && m.outer_directive(b).size == 1;
    if m.inner_spatial() == Some(z) && unit {
        Tiling::NonTiled
    } else {
        Tiling::Tiled
    }
}

/// One failed constraint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    Structure(String),
    /// All clusters' outer tiles of A, B and C, double-buffered, exceed S2.
    S2Capacity { required: u64, available: u64 },
    /// One PE's inner tiles, double-buffered, exceed S1.
    S1Capacity { required: u64, available: u64 },
    /// The cluster size leaves no complete cluster.
    ClusterCount { pe_count: u64, cluster_size: u64 },
    InnerExceedsOuter { dim: Dim, inner: u64, outer: u64 },
    IllegalLoopOrder { outer: LoopOrder, inner: LoopOrder },
    IllegalClusterSize { cluster_size: u64 },
    StyleMismatch(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Structure(s) => write!(f, "structure: {s}"),
            Violation::S2Capacity {
                required,
                available,
            } => write!(f, "S2 capacity: needs {required} elements, has {available}"),
            Violation::S1Capacity {
                required,
                available,
            } => write!(f, "S1 capacity: needs {required} elements, has {available}"),
            Violation::ClusterCount {
                pe_count,
                cluster_size,
            } => write!(f, "cluster size {cluster_size} exceeds {pe_count} PEs"),
            Violation::InnerExceedsOuter { dim, inner, outer } => {
                write!(f, "inner tile {inner} on {dim} exceeds outer tile {outer}")
            }
            Violation::IllegalLoopOrder { outer, inner } => {
                write!(f, "loop orders {outer}/{inner} not legal for style")
            }
            Violation::IllegalClusterSize { cluster_size } => {
                write!(f, "cluster size {cluster_size} not legal for style")
            }
            Violation::StyleMismatch(s) => write!(f, "style: {s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<(), Error> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidMapping(
                self.violations.iter().map(|v| v.to_string()).collect(),
            ))
        }
    }
}

/// Double-buffered S2 footprint of one outer step across all clusters, in
/// elements.
pub fn s2_footprint(m: &Mapping, w: &GemmWorkload, pe_count: u64) -> u64 {
    let clusters = m.cluster_count(pe_count).max(1);
    let ext = |d: Dim| {
        let dir = m.outer_directive(d);
        let span = if dir.is_spatial() {
            dir.size.saturating_mul(clusters)
        } else {
            dir.size
        };
        span.min(w.dim(d))
    };
    let (em, en, ek) = (ext(Dim::M), ext(Dim::N), ext(Dim::K));
    2 * (em * ek + ek * en + em * en)
}

/// Double-buffered S1 footprint of one PE, in elements.
pub fn s1_footprint(m: &Mapping, w: &GemmWorkload) -> u64 {
    let s = |d: Dim| m.inner_directive(d).size.min(w.dim(d));
    let (sm, sn, sk) = (s(Dim::M), s(Dim::N), s(Dim::K));
    2 * (sm * sk + sk * sn + sm * sn)
}

pub fn validate_mapping(m: &Mapping, w: &GemmWorkload, hw: &HardwareConfig) -> ValidationReport {
    let structure = m.structure_errors();
    if !structure.is_empty() {
        return ValidationReport {
            violations: structure.into_iter().map(Violation::Structure).collect(),
        };
    }
    let mut v = Vec::new();
    let p = hw.pe_count();
    if m.cluster_count(p) == 0 {
        v.push(Violation::ClusterCount {
            pe_count: p,
            cluster_size: m.cluster_size,
        });
    }
    let s2 = s2_footprint(m, w, p);
    if s2 > hw.beta_elems() {
        v.push(Violation::S2Capacity {
            required: s2,
            available: hw.beta_elems(),
        });
    }
    let s1 = s1_footprint(m, w);
    if s1 > hw.alpha_elems() {
        v.push(Violation::S1Capacity {
            required: s1,
            available: hw.alpha_elems(),
        });
    }
    for d in Dim::ALL {
        let (i, o) = (m.inner_directive(d).size, m.outer_directive(d).size);
        if i > o {
            v.push(Violation::InnerExceedsOuter {
                dim: d,
                inner: i,
                outer: o,
            });
        }
    }
    if let Some(tag) = m.style {
        check_style(m, tag, p, &mut v);
    }
    ValidationReport { violations: v }
}

fn check_style(m: &Mapping, tag: StyleTag, pe_count: u64, v: &mut Vec<Violation>) {
    let style = tag.constraints();
    let (outer, inner) = (m.outer_order(), m.inner_order());
    if style.inner_order_for(outer) != Some(inner) {
        v.push(Violation::IllegalLoopOrder { outer, inner });
        return;
    }
    let (x, y) = (m.outer_spatial(), m.inner_spatial());
    let (want_x, want_y) = match (style.outer_spatial_dim, style.inner_spatial_dim) {
        (SpatialDim::Fixed(a), SpatialDim::Fixed(b)) => (a, b),
        _ => (outer.dims()[1], outer.dims()[2]),
    };
    if x != want_x || y != Some(want_y) {
        v.push(Violation::StyleMismatch(format!(
            "{tag} parallelizes {want_x} across clusters and {want_y} within"
        )));
    }
    let tied = m.outer_directive(outer.innermost()).size;
    let legal = match style.cluster_size_rule {
        ClusterSizeRule::TiedToTile => m.cluster_size == tied && m.cluster_size <= pe_count,
        rule => rule.admits(m.cluster_size, pe_count),
    };
    if !legal {
        v.push(Violation::IllegalClusterSize {
            cluster_size: m.cluster_size,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_hardware, EnergyTable};

    fn hw(p: u64, s1: u64, s2: u64) -> HardwareConfig {
        HardwareConfig::new(p, s1, s2, 1.0, 1, 1, EnergyTable::default()).unwrap()
    }

    #[test]
    fn maeri_template_ties_cluster_to_k_tile() {
        let tiles = TileSet::new([8, 16, 4], [2, 2, 1]);
        let m = mapping_from_style(StyleTag::Maeri, LoopOrder::MNK, 4, &tiles).unwrap();
        assert_eq!(m.cluster_size, 4);
        assert_eq!(m.inner[2], Directive::spatial(Dim::K, 1));
        assert_eq!(m.outer[1], Directive::spatial(Dim::N, 16));
        assert!(mapping_from_style(StyleTag::Maeri, LoopOrder::MNK, 5, &tiles).is_err());
    }

    #[test]
    fn eyeriss_rejects_other_orders() {
        let err = mapping_from_style(StyleTag::Eyeriss, LoopOrder::NMK, 4, &TileSet::ones());
        assert!(matches!(err, Err(Error::IllegalLoopOrder { .. })));
        let err = mapping_from_style(StyleTag::Nvdla, LoopOrder::NKM, 8, &TileSet::ones());
        assert!(matches!(err, Err(Error::IllegalClusterSize { .. })));
    }

    #[test]
    fn nvdla_template() {
        let tiles = TileSet::new([4, 2, 8], [3, 1, 8]);
        let m = mapping_from_style(StyleTag::Nvdla, LoopOrder::NKM, 16, &tiles).unwrap();
        assert_eq!(
            m.outer,
            [
                Directive::spatial(Dim::N, 2),
                Directive::temporal(Dim::K, 128),
                Directive::temporal(Dim::M, 4)
            ]
        );
        assert_eq!(
            m.inner,
            [
                Directive::temporal(Dim::N, 1),
                Directive::temporal(Dim::M, 3),
                Directive::spatial(Dim::K, 8)
            ]
        );
    }

    #[test]
    fn walkthrough_mapping_renders_seven_lines() {
        let mut tiles = TileSet::ones();
        tiles.t_out_k = 4;
        let m = mapping_from_style(StyleTag::Maeri, LoopOrder::MNK, 4, &tiles).unwrap();
        let text = m.render();
        assert_eq!(
            text.lines().collect::<Vec<_>>(),
            vec![
                "TMap(1,1) M",
                "SMap(1,1) N",
                "TMap(4,4) K",
                "Cluster(4)",
                "TMap(1,1) M",
                "TMap(1,1) N",
                "SMap(1,1) K"
            ]
        );
        let back: Mapping = m.to_text().parse().unwrap();
        assert_eq!(back, m);
        let w = GemmWorkload::new(4, 4, 4).unwrap();
        assert!(validate_mapping(&m, &w, &hw(16, 512, 1024)).is_valid());
    }

    #[test]
    fn parse_accepts_semicolons_and_rejects_garbage() {
        let m: Mapping = "TMap(2,2) M; SMap(1,1) N; TMap(4,4) K; Cluster(4); TMap(1,1) M; TMap(1,1) N; SMap(1,1) K"
            .parse()
            .unwrap();
        assert_eq!(m.style, None);
        assert_eq!(m.outer[0].size, 2);
        assert!("TMap(2,2) M".parse::<Mapping>().is_err());
        assert!("TMap(2,x) M; SMap(1,1) N; TMap(4,4) K; Cluster(4); TMap(1,1) M; TMap(1,1) N; SMap(1,1) K"
            .parse::<Mapping>()
            .is_err());
        assert!("SMap(2,2) M; SMap(1,1) N; TMap(4,4) K; Cluster(4); TMap(1,1) M; TMap(1,1) N; SMap(1,1) K"
            .parse::<Mapping>()
            .is_err());
    }

    #[test]
    fn s1_violation_from_large_inner_tiles() {
        let tiles = TileSet::new([16, 64, 1], [16, 16, 1]);
        let m = mapping_from_style(StyleTag::Maeri, LoopOrder::MNK, 1, &tiles).unwrap();
        let w = GemmWorkload::new(256, 256, 256).unwrap();
        let r = validate_mapping(&m, &w, &builtin_hardware("edge").unwrap());
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::S1Capacity { required: 576, .. })));
    }

    #[test]
    fn s2_footprint_of_tiled_maeri() {
        let tiles = TileSet::new([64, 64, 64], [1, 1, 1]);
        let m = mapping_from_style(StyleTag::Maeri, LoopOrder::MNK, 64, &tiles).unwrap();
        let w = GemmWorkload::new(256, 256, 256).unwrap();
        assert_eq!(s2_footprint(&m, &w, 256), 2 * 36_864);
        assert!(validate_mapping(&m, &w, &builtin_hardware("edge").unwrap()).is_valid());
    }

    #[test]
    fn classify() {
        let w = GemmWorkload::new(8, 8, 8).unwrap();
        let nt = non_tiled_mapping(LoopOrder::MNK, &w, 16);
        assert_eq!(classify_tiling(&nt, LoopOrder::MNK), Tiling::NonTiled);
        let t = mapping_from_style(
            StyleTag::Maeri,
            LoopOrder::MNK,
            8,
            &TileSet::new([2, 2, 8], [1, 1, 1]),
        )
        .unwrap();
        assert_eq!(classify_tiling(&t, LoopOrder::MNK), Tiling::Tiled);
        let half = mapping_from_style(
            StyleTag::Maeri,
            LoopOrder::MNK,
            8,
            &TileSet::new([1, 2, 8], [1, 1, 1]),
        )
        .unwrap();
        assert_eq!(classify_tiling(&half, LoopOrder::MNK), Tiling::Tiled);
    }

    #[test]
    fn transposed_mapping_swaps_dims() {
        let m = mapping_from_style(
            StyleTag::Tpu,
            LoopOrder::NMK,
            4,
            &TileSet::new([2, 3, 4], [1, 2, 4]),
        )
        .unwrap();
        let t = m.transposed();
        assert_eq!(t.outer_spatial(), Dim::M);
        assert_eq!(t.outer_order(), LoopOrder::MNK);
        assert_eq!(t.transposed().outer, m.outer);
    }

    #[test]
    fn style_checks_catch_edits() {
        let w = GemmWorkload::new(64, 64, 64).unwrap();
        let h = hw(64, 512, 1 << 20);
        let mut m = mapping_from_style(
            StyleTag::Tpu,
            LoopOrder::NMK,
            8,
            &TileSet::new([2, 8, 2], [1, 1, 2]),
        )
        .unwrap();
        assert!(validate_mapping(&m, &w, &h).is_valid());
        m.cluster_size = 4;
        assert!(!validate_mapping(&m, &w, &h).is_valid());
        m.cluster_size = 8;
        m.inner.swap(0, 1);
        assert!(!validate_mapping(&m, &w, &h).is_valid());
    }
}
