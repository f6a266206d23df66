//! Stay/travel mobility inference on temporally sparse trajectories.
//!
//! The centerpiece is [`sds_label`], a single-trajectory labeler whose Stay and
//! Travel outputs are always correct with respect to the continuous movement,
//! abstaining (`U`) where the samples cannot certify either. Around it sit an
//! exact discrete oracle, a CTRW simulator with continuous ground truth, the
//! evaluation harness, and two multi-trajectory baselines.

pub mod baselines;
pub mod error;
pub mod eval;
pub mod geo;
pub mod oracle;
pub mod sds;
pub mod seed;
pub mod sim;
pub mod trajectory;

pub use error::{Error, Result};
pub use geo::{planar_distance, GeoPoint, Planar, Projection};
pub use oracle::{dense_stay_membership, exact_label, travel_condition, OracleLabels};
pub use sds::{label_dataset, recall_lower_bounds, sds_label, LabeledTrajectory, RecallBounds, SdsOptions};
pub use trajectory::{
    divide, global_sparsity, local_coverage, DenseSegment, Mobility, MobilityLabel, MobilityParams, Trajectory,
    TrajectoryRecord,
};
pub use baselines::{
    grid_index, hmm_predict, hmm_train, hour_index, minute_index, viterbi, voting_predict, voting_train, HmmModel,
    IndexConfig, ObservationBuckets, SpatioTemporalBin, VotingModel, WeekStart,
};
pub use eval::{
    compute_metrics, prop1_violation_rate, resampling_experiment, sparsity_report, ConfusionCounts, ExperimentRow,
    MetricsReport, Prop1Counts, SparsityReport,
};
pub use sim::{
    continuous_labels, fit_power_law_exponent, generate_ctrw, resample, sample_at, sample_truncated_power_law,
    synth_schedule, CtrwConfig, GeoFrame, GroundTruthPath, SampledTrajectory, SamplingSchedule, SimulationConfig,
};
