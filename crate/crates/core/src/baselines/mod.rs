//! Multi-trajectory baselines: spatiotemporal voting and a two-state HMM.

pub mod hmm;
pub mod index;
pub mod voting;

pub use hmm::{hmm_predict, hmm_train, viterbi, HmmModel, LogTables, ObservationBuckets};
pub use index::{grid_index, hour_index, minute_index, IndexConfig, SpatioTemporalBin, WeekStart};
pub use voting::{voting_predict, voting_train, VotingModel};
