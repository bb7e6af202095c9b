use crate::cost::MatrixCounts;
use crate::model::EnergyTable;

/// Energy in table units: MACs, S1 and S2 accesses, and elements moved over
/// the NoC.
pub fn estimate_energy(
    s1: &MatrixCounts,
    s2: &MatrixCounts,
    noc_elements: u64,
    mac_count: u64,
    table: &EnergyTable,
) -> f64 {
    table.mac * mac_count as f64
        + table.s1_access * s1.total() as f64
        + table.s2_access * s2.total() as f64
        + table.noc_hop * noc_elements as f64
}
