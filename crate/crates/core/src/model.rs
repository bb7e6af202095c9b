//! Workloads, hardware descriptions and the accelerator-style constraint
//! tables shared by the rest of the crate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// One of the three GEMM loop dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dim {
    M,
    N,
    K,
}

impl Dim {
    pub const ALL: [Dim; 3] = [Dim::M, Dim::N, Dim::K];

    pub fn index(self) -> usize {
        match self {
            Dim::M => 0,
            Dim::N => 1,
            Dim::K => 2,
        }
    }

    /// Swaps the roles of M and N; K is fixed.
    pub fn transposed(self) -> Dim {
        match self {
            Dim::M => Dim::N,
            Dim::N => Dim::M,
            Dim::K => Dim::K,
        }
    }

    pub fn lower(self) -> char {
        match self {
            Dim::M => 'm',
            Dim::N => 'n',
            Dim::K => 'k',
        }
    }
}

impl fmt::Display for Dim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dim::M => "M",
            Dim::N => "N",
            Dim::K => "K",
        };
        f.write_str(s)
    }
}

impl FromStr for Dim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "M" | "m" => Ok(Dim::M),
            "N" | "n" => Ok(Dim::N),
            "K" | "k" => Ok(Dim::K),
            other => Err(Error::Parse(format!("unknown dimension `{other}`"))),
        }
    }
}

/// A GEMM instance: C[M][N] += A[M][K] * B[K][N].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawWorkload")]
pub struct GemmWorkload {
    m: u64,
    n: u64,
    k: u64,
}

#[derive(Deserialize)]
struct RawWorkload {
    m: u64,
    n: u64,
    k: u64,
}

impl TryFrom<RawWorkload> for GemmWorkload {
    type Error = Error;

    fn try_from(raw: RawWorkload) -> Result<Self, Self::Error> {
        GemmWorkload::new(raw.m, raw.n, raw.k)
    }
}

impl GemmWorkload {
    pub fn new(m: u64, n: u64, k: u64) -> Result<Self, Error> {
        if m == 0 || n == 0 || k == 0 {
            return Err(Error::InvalidWorkload(format!(
                "dimensions must be positive, got ({m}, {n}, {k})"
            )));
        }
        m.checked_mul(n)
            .and_then(|mn| mn.checked_mul(k))
            .ok_or_else(|| Error::InvalidWorkload("M*N*K overflows u64".into()))?;
        Ok(GemmWorkload { m, n, k })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn dim(&self, d: Dim) -> u64 {
        match d {
            Dim::M => self.m,
            Dim::N => self.n,
            Dim::K => self.k,
        }
    }

    pub fn mac_count(&self) -> u64 {
        self.m * self.n * self.k
    }

    /// The same problem with A and B exchanged (M and N swapped).
    pub fn transposed(&self) -> GemmWorkload {
        GemmWorkload {
            m: self.n,
            n: self.m,
            k: self.k,
        }
    }
}

impl fmt::Display for GemmWorkload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.m, self.n, self.k)
    }
}

/// Work in GFLOPs, counting one multiply-accumulate as one FLOP.
pub fn workload_gflops(w: &GemmWorkload) -> f64 {
    w.mac_count() as f64 / 1e9
}

/// Identifiers of the built-in workload suite.
pub const BUILTIN_WORKLOAD_IDS: [&str; 6] = ["I", "II", "III", "IV", "V", "VI"];

pub fn builtin_workloads() -> Vec<(&'static str, GemmWorkload)> {
    let dims = [
        (8192, 8192, 8192),
        (1024, 1024, 8192),
        (8, 8, 8192),
        (8, 8192, 1024),
        (8192, 8, 1024),
        (512, 256, 256),
    ];
    BUILTIN_WORKLOAD_IDS
        .iter()
        .zip(dims)
        .map(|(id, (m, n, k))| (*id, GemmWorkload { m, n, k }))
        .collect()
}

pub fn builtin_workload(id: &str) -> Result<GemmWorkload, Error> {
    builtin_workloads()
        .into_iter()
        .find(|(name, _)| name.eq_ignore_ascii_case(id))
        .map(|(_, w)| w)
        .ok_or_else(|| Error::UnknownPreset(format!("workload `{id}`")))
}

/// Hidden-layer widths of the MNIST multi-layer perceptron: 784 inputs,
/// three hidden layers, ten classes.
const MLP_LAYERS: [u64; 5] = [784, 512, 256, 128, 10];

/// The fully-connected layers of the MLP as GEMMs for a given batch size.
/// Layer `i` multiplies a (batch x in) activation by an (in x out) weight.
pub fn mlp_workloads(batch: u64) -> Result<Vec<GemmWorkload>, Error> {
    if batch == 0 {
        return Err(Error::InvalidWorkload("batch must be at least 1".into()));
    }
    MLP_LAYERS
        .windows(2)
        .map(|pair| GemmWorkload::new(batch, pair[1], pair[0]))
        .collect()
}

/// Per-event energy coefficients in abstract units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyTable {
    pub mac: f64,
    pub s1_access: f64,
    pub s2_access: f64,
    pub noc_hop: f64,
    /// Absolute scale of one unit in picojoules. When present, reports also
    /// carry millijoules.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub picojoules_per_unit: Option<f64>,
}

impl Default for EnergyTable {
    fn default() -> Self {
        EnergyTable {
            mac: 1.0,
            s1_access: 1.0,
            s2_access: 64.0,
            noc_hop: 2.0,
            picojoules_per_unit: None,
        }
    }
}

impl EnergyTable {
    pub fn zero() -> Self {
        EnergyTable {
            mac: 0.0,
            s1_access: 0.0,
            s2_access: 0.0,
            noc_hop: 0.0,
            picojoules_per_unit: None,
        }
    }

    fn validate(&self) -> Result<(), Error> {
        let fields = [
            ("energy.mac", self.mac),
            ("energy.s1_access", self.s1_access),
            ("energy.s2_access", self.s2_access),
            ("energy.noc_hop", self.noc_hop),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config {
                    field: name.into(),
                    reason: format!("must be a finite non-negative number, got {v}"),
                });
            }
        }
        if let Some(pj) = self.picojoules_per_unit {
            if !(pj.is_finite() && pj > 0.0) {
                return Err(Error::Config {
                    field: "energy.picojoules_per_unit".into(),
                    reason: format!("must be positive, got {pj}"),
                });
            }
        }
        Ok(())
    }
}

/// Accelerator resources. Buffer capacities are given in bytes; all capacity
/// equations work on element counts (`alpha_elems`, `beta_elems`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHardware", into = "RawHardware")]
pub struct HardwareConfig {
    pe_count: u64,
    s1_bytes: u64,
    s2_bytes: u64,
    noc_bandwidth_bytes_per_cycle: f64,
    clock_hz: u64,
    element_bytes: u64,
    energy: EnergyTable,
}

#[derive(Serialize, Deserialize)]
struct RawHardware {
    pe_count: u64,
    s1_bytes: u64,
    s2_bytes: u64,
    noc_bandwidth_bytes_per_cycle: f64,
    clock_hz: u64,
    #[serde(default = "default_element_bytes")]
    element_bytes: u64,
    #[serde(default)]
    energy: EnergyTable,
}

fn default_element_bytes() -> u64 {
    1
}

impl TryFrom<RawHardware> for HardwareConfig {
    type Error = Error;

    fn try_from(r: RawHardware) -> Result<Self, Self::Error> {
        HardwareConfig::new(
            r.pe_count,
            r.s1_bytes,
            r.s2_bytes,
            r.noc_bandwidth_bytes_per_cycle,
            r.clock_hz,
            r.element_bytes,
            r.energy,
        )
    }
}

impl From<HardwareConfig> for RawHardware {
    fn from(h: HardwareConfig) -> Self {
        RawHardware {
            pe_count: h.pe_count,
            s1_bytes: h.s1_bytes,
            s2_bytes: h.s2_bytes,
            noc_bandwidth_bytes_per_cycle: h.noc_bandwidth_bytes_per_cycle,
            clock_hz: h.clock_hz,
            element_bytes: h.element_bytes,
            energy: h.energy,
        }
    }
}

fn config_err(field: &str, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

impl HardwareConfig {
    pub fn new(
        pe_count: u64,
        s1_bytes: u64,
        s2_bytes: u64,
        noc_bandwidth_bytes_per_cycle: f64,
        clock_hz: u64,
        element_bytes: u64,
        energy: EnergyTable,
    ) -> Result<Self, Error> {
        if pe_count == 0 {
            return Err(config_err("pe_count", "must be at least 1"));
        }
        if element_bytes == 0 {
            return Err(config_err("element_bytes", "must be at least 1"));
        }
        if s1_bytes % element_bytes != 0 {
            return Err(config_err(
                "s1_bytes",
                format!("{s1_bytes} is not a multiple of element_bytes {element_bytes}"),
            ));
        }
        if s2_bytes % element_bytes != 0 {
            return Err(config_err(
                "s2_bytes",
                format!("{s2_bytes} is not a multiple of element_bytes {element_bytes}"),
            ));
        }
        if s1_bytes < 3 * element_bytes {
            return Err(config_err(
                "s1_bytes",
                "must hold at least one element of each matrix",
            ));
        }
        if s2_bytes < 3 * element_bytes {
            return Err(config_err(
                "s2_bytes",
                "must hold at least one element of each matrix",
            ));
        }
        if !(noc_bandwidth_bytes_per_cycle.is_finite() && noc_bandwidth_bytes_per_cycle > 0.0) {
            return Err(config_err(
                "noc_bandwidth_bytes_per_cycle",
                "must be a positive finite number",
            ));
        }
        if clock_hz == 0 {
            return Err(config_err("clock_hz", "must be positive"));
        }
        energy.validate()?;
        Ok(HardwareConfig {
            pe_count,
            s1_bytes,
            s2_bytes,
            noc_bandwidth_bytes_per_cycle,
            clock_hz,
            element_bytes,
            energy,
        })
    }

    pub fn pe_count(&self) -> u64 {
        self.pe_count
    }

    pub fn s1_bytes(&self) -> u64 {
        self.s1_bytes
    }

    pub fn s2_bytes(&self) -> u64 {
        self.s2_bytes
    }

    pub fn noc_bandwidth_bytes_per_cycle(&self) -> f64 {
        self.noc_bandwidth_bytes_per_cycle
    }

    pub fn clock_hz(&self) -> u64 {
        self.clock_hz
    }

    pub fn element_bytes(&self) -> u64 {
        self.element_bytes
    }

    pub fn energy(&self) -> &EnergyTable {
        &self.energy
    }

    /// S1 capacity in elements (alpha).
    pub fn alpha_elems(&self) -> u64 {
        self.s1_bytes / self.element_bytes
    }

    /// S2 capacity in elements (beta).
    pub fn beta_elems(&self) -> u64 {
        self.s2_bytes / self.element_bytes
    }

    /// Peak MAC rate, one MAC per PE per cycle.
    pub fn peak_flops(&self) -> f64 {
        self.pe_count as f64 * self.clock_hz as f64
    }

    pub fn with_energy(mut self, energy: EnergyTable) -> Result<Self, Error> {
        energy.validate()?;
        self.energy = energy;
        Ok(self)
    }

    pub fn with_noc_bandwidth(mut self, bytes_per_cycle: f64) -> Result<Self, Error> {
        if !(bytes_per_cycle.is_finite() && bytes_per_cycle > 0.0) {
            return Err(config_err(
                "noc_bandwidth_bytes_per_cycle",
                "must be a positive finite number",
            ));
        }
        self.noc_bandwidth_bytes_per_cycle = bytes_per_cycle;
        Ok(self)
    }

    pub fn with_buffers(self, s1_bytes: u64, s2_bytes: u64) -> Result<Self, Error> {
        HardwareConfig::new(
            self.pe_count,
            s1_bytes,
            s2_bytes,
            self.noc_bandwidth_bytes_per_cycle,
            self.clock_hz,
            self.element_bytes,
            self.energy,
        )
    }
}

pub const BUILTIN_HARDWARE_IDS: [&str; 2] = ["edge", "cloud"];

/// Edge and cloud presets: 1 GHz clock, 0.5 KB S1 per PE.
pub fn builtin_hardware(id: &str) -> Result<HardwareConfig, Error> {
    let (pes, s2_kb, noc_gbps) = match id.to_ascii_lowercase().as_str() {
        "edge" => (256, 100, 32.0),
        "cloud" => (2048, 800, 256.0),
        _ => return Err(Error::UnknownPreset(format!("hardware `{id}`"))),
    };
    let clock_hz = 1_000_000_000u64;
    // GB/s at 1 GHz is bytes per cycle.
    let bytes_per_cycle = noc_gbps * 1e9 / clock_hz as f64;
    HardwareConfig::new(
        pes,
        512,
        s2_kb * 1024,
        bytes_per_cycle,
        clock_hz,
        1,
        EnergyTable::default(),
    )
}

/// The five accelerator styles whose dataflow constraints are modeled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StyleTag {
    Eyeriss,
    Nvdla,
    Tpu,
    ShiDianNao,
    Maeri,
}

impl StyleTag {
    pub const ALL: [StyleTag; 5] = [
        StyleTag::Eyeriss,
        StyleTag::Nvdla,
        StyleTag::Tpu,
        StyleTag::ShiDianNao,
        StyleTag::Maeri,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StyleTag::Eyeriss => "eyeriss",
            StyleTag::Nvdla => "nvdla",
            StyleTag::Tpu => "tpu",
            StyleTag::ShiDianNao => "shidiannao",
            StyleTag::Maeri => "maeri",
        }
    }

    /// Directive-pattern name, e.g. `STT_TTS-NKM`.
    pub fn mapping_name(self) -> &'static str {
        match self {
            StyleTag::Eyeriss => "STT_TTS-MNK",
            StyleTag::Nvdla => "STT_TTS-NKM",
            StyleTag::Tpu => "STT_TTS-NMK",
            StyleTag::ShiDianNao => "STT_TST-MNK",
            StyleTag::Maeri => "TST_TTS-MNK",
        }
    }

    pub fn constraints(self) -> AcceleratorStyle {
        AcceleratorStyle::of(self)
    }
}

impl fmt::Display for StyleTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StyleTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "eyeriss" => Ok(StyleTag::Eyeriss),
            "nvdla" => Ok(StyleTag::Nvdla),
            "tpu" => Ok(StyleTag::Tpu),
            "shidiannao" => Ok(StyleTag::ShiDianNao),
            "maeri" => Ok(StyleTag::Maeri),
            other => Err(Error::UnknownPreset(format!("style `{other}`"))),
        }
    }
}

/// A permutation of (M, N, K), outermost first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LoopOrder(pub [Dim; 3]);

impl LoopOrder {
    pub const MNK: LoopOrder = LoopOrder([Dim::M, Dim::N, Dim::K]);
    pub const NMK: LoopOrder = LoopOrder([Dim::N, Dim::M, Dim::K]);
    pub const MKN: LoopOrder = LoopOrder([Dim::M, Dim::K, Dim::N]);
    pub const NKM: LoopOrder = LoopOrder([Dim::N, Dim::K, Dim::M]);
    pub const KMN: LoopOrder = LoopOrder([Dim::K, Dim::M, Dim::N]);
    pub const KNM: LoopOrder = LoopOrder([Dim::K, Dim::N, Dim::M]);

    /// All six orders in the order they are reported.
    pub const ALL: [LoopOrder; 6] = [
        LoopOrder::MNK,
        LoopOrder::NMK,
        LoopOrder::MKN,
        LoopOrder::NKM,
        LoopOrder::KMN,
        LoopOrder::KNM,
    ];

    pub fn new(dims: [Dim; 3]) -> Result<Self, Error> {
        let mut seen = [false; 3];
        for d in dims {
            if seen[d.index()] {
                return Err(Error::Parse(format!("loop order repeats {d}")));
            }
            seen[d.index()] = true;
        }
        Ok(LoopOrder(dims))
    }

    pub fn dims(&self) -> [Dim; 3] {
        self.0
    }

    pub fn innermost(&self) -> Dim {
        self.0[2]
    }

    /// The order obtained by exchanging M and N.
    pub fn mirrored(&self) -> LoopOrder {
        LoopOrder(self.0.map(Dim::transposed))
    }
}

impl fmt::Display for LoopOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.0 {
            write!(f, "{}", d.lower())?;
        }
        Ok(())
    }
}

impl FromStr for LoopOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cleaned: Vec<char> = s
            .chars()
            .filter(|c| c.is_ascii_alphabetic())
            .collect();
        if cleaned.len() != 3 {
            return Err(Error::Parse(format!("loop order `{s}` must name three dims")));
        }
        let mut dims = [Dim::M; 3];
        for (slot, c) in dims.iter_mut().zip(cleaned) {
            *slot = c.to_string().parse()?;
        }
        LoopOrder::new(dims)
    }
}

/// How a style chooses its cluster size (PEs per cluster).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClusterSizeRule {
    /// Any integer in the inclusive range, limited to the PE count.
    Range { min: u64, max: u64 },
    /// The largest divisor of P not exceeding sqrt(P) (sqrt(P) itself for
    /// square arrays).
    SqrtP,
    /// Equal to the outer tile size of the innermost loop dimension.
    TiedToTile,
}

impl ClusterSizeRule {
    /// Concrete cluster sizes for a given PE count. Empty for `TiedToTile`,
    /// whose sizes come from the tile enumeration.
    pub fn sizes(&self, pe_count: u64) -> Vec<u64> {
        match *self {
            ClusterSizeRule::Range { min, max } => (min..=max.min(pe_count)).collect(),
            ClusterSizeRule::SqrtP => vec![sqrt_cluster(pe_count)],
            ClusterSizeRule::TiedToTile => Vec::new(),
        }
    }

    pub fn admits(&self, lambda: u64, pe_count: u64) -> bool {
        match *self {
            ClusterSizeRule::Range { min, max } => {
                lambda >= min && lambda <= max && lambda <= pe_count
            }
            ClusterSizeRule::SqrtP => lambda == sqrt_cluster(pe_count),
            ClusterSizeRule::TiedToTile => lambda >= 1 && lambda <= pe_count,
        }
    }
}

fn sqrt_cluster(pe_count: u64) -> u64 {
    let root = isqrt(pe_count);
    (1..=root).rev().find(|d| pe_count % d == 0).unwrap_or(1)
}

pub(crate) fn isqrt(v: u64) -> u64 {
    if v < 2 {
        return v;
    }
    let mut r = (v as f64).sqrt() as u64;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

/// Which dimension a level parallelizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpatialDim {
    Fixed(Dim),
    /// Determined by the loop order (middle dim across clusters, innermost
    /// dim within a cluster).
    Flexible,
}

/// Dataflow constraints of one accelerator style.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceleratorStyle {
    pub tag: StyleTag,
    /// Legal (inter-cluster, intra-cluster) compute orders.
    pub legal_loop_orders: Vec<(LoopOrder, LoopOrder)>,
    pub cluster_size_rule: ClusterSizeRule,
    pub outer_spatial_dim: SpatialDim,
    pub inner_spatial_dim: SpatialDim,
    /// PE array shape of the original design, kept as metadata only.
    pub native_array: Option<(u64, u64)>,
}

impl AcceleratorStyle {
    pub fn of(tag: StyleTag) -> Self {
        use SpatialDim::*;
        match tag {
            StyleTag::Eyeriss => AcceleratorStyle {
                tag,
                legal_loop_orders: vec![(LoopOrder::MNK, LoopOrder::MNK)],
                cluster_size_rule: ClusterSizeRule::Range { min: 1, max: 12 },
                outer_spatial_dim: Fixed(Dim::M),
                inner_spatial_dim: Fixed(Dim::K),
                native_array: Some((12, 14)),
            },
            StyleTag::Nvdla => AcceleratorStyle {
                tag,
                legal_loop_orders: vec![(LoopOrder::NKM, LoopOrder::NMK)],
                cluster_size_rule: ClusterSizeRule::Range { min: 16, max: 64 },
                outer_spatial_dim: Fixed(Dim::N),
                inner_spatial_dim: Fixed(Dim::K),
                native_array: Some((64, 8)),
            },
            StyleTag::Tpu => AcceleratorStyle {
                tag,
                legal_loop_orders: vec![(LoopOrder::NMK, LoopOrder::NMK)],
                cluster_size_rule: ClusterSizeRule::SqrtP,
                outer_spatial_dim: Fixed(Dim::N),
                inner_spatial_dim: Fixed(Dim::K),
                native_array: Some((128, 128)),
            },
            StyleTag::ShiDianNao => AcceleratorStyle {
                tag,
                legal_loop_orders: vec![(LoopOrder::MNK, LoopOrder::MNK)],
                cluster_size_rule: ClusterSizeRule::SqrtP,
                outer_spatial_dim: Fixed(Dim::M),
                inner_spatial_dim: Fixed(Dim::N),
                native_array: Some((8, 8)),
            },
            StyleTag::Maeri => AcceleratorStyle {
                tag,
                legal_loop_orders: LoopOrder::ALL.iter().map(|o| (*o, *o)).collect(),
                cluster_size_rule: ClusterSizeRule::TiedToTile,
                outer_spatial_dim: Flexible,
                inner_spatial_dim: Flexible,
                native_array: None,
            },
        }
    }

    /// The inter-cluster order used when loop orders are fixed.
    pub fn canonical_order(&self) -> LoopOrder {
        self.legal_loop_orders[0].0
    }

    /// Whether the style accepts `order` as its inter-cluster order. Total
    /// over all six permutations.
    pub fn is_legal_order(&self, order: LoopOrder) -> bool {
        self.legal_loop_orders.iter().any(|(outer, _)| *outer == order)
    }

    /// Intra-cluster order paired with a legal inter-cluster order.
    pub fn inner_order_for(&self, order: LoopOrder) -> Option<LoopOrder> {
        self.legal_loop_orders
            .iter()
            .find(|(outer, _)| *outer == order)
            .map(|(_, inner)| *inner)
    }

    pub fn legal_orders(&self) -> Vec<LoopOrder> {
        self.legal_loop_orders.iter().map(|(o, _)| *o).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gflops_single_mac() {
        let w = GemmWorkload::new(1, 1, 1).unwrap();
        assert_eq!(workload_gflops(&w), 1e-9);
    }

    #[test]
    fn builtin_lookup() {
        assert_eq!(builtin_workload("I").unwrap(), GemmWorkload::new(8192, 8192, 8192).unwrap());
        assert_eq!(builtin_workload("iv").unwrap(), GemmWorkload::new(8, 8192, 1024).unwrap());
        assert_eq!(builtin_workload("VI").unwrap(), GemmWorkload::new(512, 256, 256).unwrap());
        assert!(builtin_workload("VII").is_err());
    }

    #[test]
    fn workload_rejects_zero_and_overflow() {
        assert!(GemmWorkload::new(0, 1, 1).is_err());
        assert!(GemmWorkload::new(1 << 30, 1 << 30, 1 << 10).is_err());
    }

    #[test]
    fn hardware_presets() {
        let edge = builtin_hardware("edge").unwrap();
        assert_eq!(edge.pe_count(), 256);
        assert_eq!(edge.noc_bandwidth_bytes_per_cycle(), 32.0);
        assert_eq!(edge.alpha_elems(), 512);
        assert_eq!(edge.beta_elems(), 102_400);
        assert_eq!(edge.peak_flops(), 256e9);
        let cloud = builtin_hardware("cloud").unwrap();
        assert_eq!(cloud.pe_count(), 2048);
        assert_eq!(cloud.s2_bytes(), 800 * 1024);
        assert!(builtin_hardware("phone").is_err());
    }

    #[test]
    fn element_size_must_divide_buffers() {
        let err = HardwareConfig::new(4, 510, 1024, 1.0, 1, 4, EnergyTable::default());
        assert!(matches!(err, Err(Error::Config { ref field, .. }) if field == "s1_bytes"));
        let ok = HardwareConfig::new(4, 512, 1024, 1.0, 1, 4, EnergyTable::default()).unwrap();
        assert_eq!(ok.alpha_elems(), 128);
    }

    #[test]
    fn default_energy_is_s2_dominant() {
        let e = EnergyTable::default();
        assert!(e.s2_access > e.s1_access && e.s2_access > e.mac);
    }

    #[test]
    fn mlp_layers() {
        let layers = mlp_workloads(128).unwrap();
        let dims: Vec<_> = layers.iter().map(|w| (w.m(), w.n(), w.k())).collect();
        assert_eq!(
            dims,
            vec![(128, 512, 784), (128, 256, 512), (128, 128, 256), (128, 10, 128)]
        );
        assert_eq!(mlp_workloads(1).unwrap()[0], GemmWorkload::new(1, 512, 784).unwrap());
        assert!(mlp_workloads(0).is_err());
    }

    #[test]
    fn style_tables_are_total() {
        for tag in StyleTag::ALL {
            let style = tag.constraints();
            let legal = LoopOrder::ALL.iter().filter(|o| style.is_legal_order(**o)).count();
            let expected = if tag == StyleTag::Maeri { 6 } else { 1 };
            assert_eq!(legal, expected, "{tag}");
        }
        assert_eq!(StyleTag::Nvdla.constraints().canonical_order(), LoopOrder::NKM);
        assert_eq!(
            StyleTag::Nvdla.constraints().inner_order_for(LoopOrder::NKM),
            Some(LoopOrder::NMK)
        );
        assert_eq!(StyleTag::Tpu.constraints().canonical_order(), LoopOrder::NMK);
        assert!(!StyleTag::Eyeriss.constraints().is_legal_order(LoopOrder::NMK));
    }

    #[test]
    fn cluster_rules() {
        assert_eq!(ClusterSizeRule::SqrtP.sizes(64), vec![8]);
        assert_eq!(ClusterSizeRule::SqrtP.sizes(256), vec![16]);
        assert_eq!(ClusterSizeRule::SqrtP.sizes(2048), vec![32]);
        assert_eq!(ClusterSizeRule::Range { min: 16, max: 64 }.sizes(256).len(), 49);
        assert_eq!(ClusterSizeRule::Range { min: 1, max: 12 }.sizes(8).len(), 8);
    }

    #[test]
    fn loop_order_parse_and_mirror() {
        let o: LoopOrder = "<m,k,n>".parse().unwrap();
        assert_eq!(o, LoopOrder::MKN);
        assert_eq!(o.mirrored(), LoopOrder::NKM);
        assert_eq!(o.to_string(), "mkn");
        assert!("mmk".parse::<LoopOrder>().is_err());
    }

    #[test]
    fn hardware_json_roundtrip_uses_field_names() {
        let edge = builtin_hardware("edge").unwrap();
        let text = serde_json::to_string(&edge).unwrap();
        assert!(text.contains("\"noc_bandwidth_bytes_per_cycle\""));
        assert!(text.contains("\"s2_access\""));
        let back: HardwareConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, edge);
        let bad = text.replace("\"element_bytes\":1", "\"element_bytes\":3");
        assert!(serde_json::from_str::<HardwareConfig>(&bad).is_err());
    }
}
