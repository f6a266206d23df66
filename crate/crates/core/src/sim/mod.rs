//! Ground-truth simulation: CTRW paths, continuous labels, observation sampling.

pub mod ctrw;
pub mod dataset;
pub mod power_law;
pub mod sampling;
pub mod truth;

pub use ctrw::{generate_ctrw, CtrwConfig, GroundTruthPath, Phase, StayPeriod, TravelLeg};
pub use dataset::{simulate_dataset, simulate_records, SimulationConfig};
pub use power_law::{fit_power_law_exponent, sample_truncated_power_law, TruncatedPowerLaw};
pub use sampling::{
    default_interval_law, resample, resample_mask, sample_at, stay_times, synth_schedule, GeoFrame, Observation,
    SampleSettings, SampledTrajectory,
};
pub use truth::{continuous_labels, SamplingSchedule, StayCover};
