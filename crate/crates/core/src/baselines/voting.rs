//! Majority vote per spatial cell and weekly hour.

use std::collections::BTreeMap;

use super::index::{IndexConfig, SpatioTemporalBin};
use crate::error::{Error, Result};
use crate::sds::LabeledTrajectory;
use crate::seed::{derive_seed, mix64, stream};
use crate::trajectory::{Mobility, MobilityLabel, TrajectoryRecord};

/// Stay and travel counts per bin. Ties and unseen bins get a coin flip that is
/// a pure function of the seed and the bin.
#[derive(Debug, Clone, PartialEq)]
pub struct VotingModel {
    pub counts: BTreeMap<SpatioTemporalBin, (u64, u64)>,
    pub seed: u64,
    pub index: IndexConfig,
}

impl VotingModel {
    pub fn empty(seed: u64, index: IndexConfig) -> Self {
        Self { counts: BTreeMap::new(), seed, index }
    }

    fn coin(&self, bin: &SpatioTemporalBin) -> Mobility {
        let key = mix64(mix64(bin.grid_lon as u64) ^ bin.grid_lat as u64) ^ bin.hour as u64;
        Mobility::from_index((derive_seed(self.seed, stream::VOTING, key) >> 63) as usize)
    }

    pub fn predict_bin(&self, bin: &SpatioTemporalBin) -> Mobility {
        match self.counts.get(bin) {
            Some(&(s, t)) if s > t => Mobility::Stay,
            Some(&(s, t)) if t > s => Mobility::Travel,
            _ => self.coin(bin),
        }
    }
}

/// Count the Stay/Travel training labels per bin; unlabeled records are skipped.
pub fn voting_train(data: &[LabeledTrajectory<'_>], index: IndexConfig, seed: u64) -> Result<VotingModel> {
    if data.is_empty() {
        return Err(Error::EmptyInput("training set"));
    }
    let mut model = VotingModel::empty(seed, index);
    for lt in data {
        let recs = lt.trajectory.records();
        if recs.len() != lt.labels.len() {
            return Err(Error::LengthMismatch { left: recs.len(), right: lt.labels.len() });
        }
        for (r, l) in recs.iter().zip(&lt.labels) {
            let entry = model.counts.entry(SpatioTemporalBin::of(r.time, &r.location, &index)).or_default();
            match l {
                MobilityLabel::Stay => entry.0 += 1,
                MobilityLabel::Travel => entry.1 += 1,
                MobilityLabel::Unlabeled => {}
            }
        }
    }
    Ok(model)
}

pub fn voting_predict(model: &VotingModel, record: &TrajectoryRecord) -> Mobility {
    model.predict_bin(&SpatioTemporalBin::of(record.time, &record.location, &model.index))
}
