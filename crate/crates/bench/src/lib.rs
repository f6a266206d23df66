//! Dataset builders shared by the benchmarks.

use mobinfer_core::sim::{simulate_records, SimulationConfig};
use mobinfer_core::{MobilityParams, Projection, Trajectory};

/// Simulated long-tailed dataset with `trajectories × records` records.
pub fn simulated(trajectories: usize, records: usize, seed: u64) -> (Vec<Trajectory>, Projection) {
    let cfg = SimulationConfig { trajectories, records_per_trajectory: records, seed, ..SimulationConfig::default() };
    let data = simulate_records(&cfg, &MobilityParams::default()).expect("default simulation parameters are valid");
    (data, cfg.frame.projection())
}
