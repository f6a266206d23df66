//! Precision and recall of SDS on simulated data under independent re-sampling.

use rayon::prelude::*;

use super::metrics::{ConfusionCounts, MetricsReport};
use crate::error::{Error, Result};
use crate::sds::{sds_label, SdsOptions};
use crate::seed::{derive_seed, stream};
use crate::sim::{resample_mask, simulate_dataset, SampledTrajectory, SimulationConfig};
use crate::trajectory::{global_sparsity, MobilityLabel, MobilityParams, Trajectory, TrajectoryRecord};

/// One re-sampling rate's results.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub rate: f64,
    /// Mean global sparsity over re-sampled trajectories with at least two records.
    pub mean_sparsity: Option<f64>,
    pub records: u64,
    /// Over every kept record.
    pub precision_counts: ConfusionCounts,
    /// Over kept records that SDS labels on the full trajectory.
    pub recall_counts: ConfusionCounts,
    pub metrics: MetricsReport,
}

/// The default rate ladder 1.0, 0.9, ..., 0.1.
pub fn default_rates() -> Vec<f64> {
    (1..=10).rev().map(|k| k as f64 / 10.0).collect()
}

fn label_records(device: &str, records: Vec<TrajectoryRecord>, params: &MobilityParams, opts: SdsOptions, proj: &crate::geo::Projection) -> Result<Vec<MobilityLabel>> {
    if records.is_empty() {
        return Ok(Vec::new());
    }
    let traj = Trajectory::new(device, records)?;
    Ok(sds_label(&traj, params, proj, opts).labels)
}

struct DeviceOutcome {
    precision: ConfusionCounts,
    recall: ConfusionCounts,
    sparsity: Option<f64>,
    kept: u64,
}

#[allow(clippy::too_many_arguments)]
fn run_device(
    sample: &SampledTrajectory,
    detectable: &[bool],
    rate_seed: u64,
    index: usize,
    rate: f64,
    params: &MobilityParams,
    opts: SdsOptions,
    proj: &crate::geo::Projection,
) -> Result<DeviceOutcome> {
    let keep = resample_mask(sample.len(), rate, derive_seed(rate_seed, stream::RESAMPLE, index as u64))?;
    let idx: Vec<usize> = (0..sample.len()).filter(|&i| keep[i]).collect();
    let records: Vec<TrajectoryRecord> = idx.iter().map(|&i| sample.records[i]).collect();
    let sparsity = if records.len() >= 2 {
        Some(global_sparsity(&Trajectory::new(sample.device.clone(), records.clone())?)?)
    } else {
        None
    };
    let labels = label_records(&sample.device, records, params, opts, proj)?;
    let mut precision = ConfusionCounts::default();
    let mut recall = ConfusionCounts::default();
    for (&i, &l) in idx.iter().zip(&labels) {
        precision.record(l, sample.labels[i]);
        if detectable[i] {
            recall.record(l, sample.labels[i]);
        }
    }
    Ok(DeviceOutcome { precision, recall, sparsity, kept: idx.len() as u64 })
}

/// Simulate `sim`, then for each rate re-sample every device, label it with SDS
/// and score it against the continuous ground truth. Rows follow `rates`.
pub fn resampling_experiment(
    sim: &SimulationConfig,
    rates: &[f64],
    params: &MobilityParams,
    opts: SdsOptions,
) -> Result<Vec<ExperimentRow>> {
    if let Some(&r) = rates.iter().find(|&&r| !(r > 0.0 && r <= 1.0)) {
        return Err(Error::InvalidParameter(format!("rates must be in (0, 1], got {r}")));
    }
    if rates.is_empty() {
        return Ok(Vec::new());
    }
    let data = simulate_dataset(sim, params)?;
    experiment_on(&data, sim, rates, params, opts)
}

/// The experiment on an already simulated dataset.
pub fn experiment_on(
    data: &[SampledTrajectory],
    sim: &SimulationConfig,
    rates: &[f64],
    params: &MobilityParams,
    opts: SdsOptions,
) -> Result<Vec<ExperimentRow>> {
    let proj = sim.frame.projection();
    let detectable: Vec<Vec<bool>> = data
        .par_iter()
        .map(|s| {
            let labels = label_records(&s.device, s.records.clone(), params, opts, &proj)?;
            Ok(labels.iter().map(|&l| l != MobilityLabel::Unlabeled).collect())
        })
        .collect::<Result<_>>()?;

    rates
        .iter()
        .enumerate()
        .map(|(k, &rate)| {
            let rate_seed = derive_seed(sim.seed, stream::RESAMPLE, k as u64);
            let outcomes: Vec<DeviceOutcome> = data
                .par_iter()
                .zip(&detectable)
                .enumerate()
                .map(|(i, (s, det))| run_device(s, det, rate_seed, i, rate, params, opts, &proj))
                .collect::<Result<_>>()?;
            let mut precision = ConfusionCounts::default();
            let mut recall = ConfusionCounts::default();
            let (mut xi_sum, mut xi_n, mut records) = (0.0, 0u64, 0u64);
            for o in &outcomes {
                precision.merge(&o.precision);
                recall.merge(&o.recall);
                records += o.kept;
                if let Some(x) = o.sparsity {
                    xi_sum += x;
                    xi_n += 1;
                }
            }
            let p = MetricsReport::from_counts(&precision);
            let r = MetricsReport::from_counts(&recall);
            Ok(ExperimentRow {
                rate,
                mean_sparsity: (xi_n > 0).then(|| xi_sum / xi_n as f64),
                records,
                precision_counts: precision,
                recall_counts: recall,
                metrics: MetricsReport { sp: p.sp, vp: p.vp, ..r },
            })
        })
        .collect()
}
