//! Double-buffered compute/communication pipeline.

/// Cycles to move `bytes` over the NoC.
pub fn comm_cycles(bytes: u64, bytes_per_cycle: f64) -> u64 {
    (bytes as f64 / bytes_per_cycle).ceil() as u64
}

/// Runtime of a double-buffered pipeline. `comm[i]` is the fetch feeding
/// step `i` and `comm[n]` the final write-back; the fetch for step `i + 1`
/// overlaps the compute of step `i`.
///
/// `comm_0 + sum_i max(compute_i, comm_{i+1})`
pub fn pipeline_cycles(compute: &[u64], comm: &[u64]) -> u64 {
    assert_eq!(comm.len(), compute.len() + 1, "one fetch per step plus write-back");
    comm[0]
        + compute
            .iter()
            .zip(&comm[1..])
            .map(|(c, f)| (*c).max(*f))
            .sum::<u64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compute_bound_hides_all_but_first_fetch() {
        assert_eq!(pipeline_cycles(&[100; 10], &[10; 11]), 1010);
    }

    #[test]
    fn comm_bound() {
        assert_eq!(pipeline_cycles(&[1, 1], &[5, 5, 5]), 15);
    }

    #[test]
    fn comm_rounds_up() {
        assert_eq!(comm_cycles(33, 32.0), 2);
        assert_eq!(comm_cycles(0, 32.0), 0);
        assert_eq!(comm_cycles(7, 2.5), 3);
    }
}
