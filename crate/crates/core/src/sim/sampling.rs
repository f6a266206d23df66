//! Observing a path: schedules, jittered samples with ground-truth labels,
//! and independent re-sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ctrw::{uniform_in_disk, GroundTruthPath, Phase};
use super::power_law::TruncatedPowerLaw;
use super::truth::{SamplingSchedule, StayCover};
use crate::error::{Error, Result};
use crate::geo::{GeoPoint, Planar, Projection};
use crate::trajectory::{Mobility, MobilityParams, Trajectory, TrajectoryRecord};

/// Where and when plane coordinates land: plane origin and the epoch of path time 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoFrame {
    pub origin: GeoPoint,
    pub epoch: i64,
}

impl Default for GeoFrame {
    /// Central Beijing, 2016-07-11 00:00 UTC+8.
    fn default() -> Self {
        Self { origin: GeoPoint { lon: 116.4, lat: 39.9 }, epoch: 1_468_166_400 }
    }
}

impl GeoFrame {
    /// The projection that maps plane meters to and from this frame exactly.
    pub fn projection(&self) -> Projection {
        Projection::new(self.origin.lat)
    }

    pub fn to_geo(&self, p: Planar) -> GeoPoint {
        self.projection().to_geo(&self.origin, p)
    }
}

/// Observed records with one ground-truth label each. May be empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTrajectory {
    pub device: String,
    pub records: Vec<TrajectoryRecord>,
    pub labels: Vec<Mobility>,
}

impl SampledTrajectory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// The records as a [`Trajectory`]; fails when empty.
    pub fn trajectory(&self) -> Result<Trajectory> {
        Trajectory::new(self.device.clone(), self.records.clone())
    }
}

/// A jittered observation run: the realized path (with its waypoints) and the samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub path: GroundTruthPath,
    pub sampled: SampledTrajectory,
}

/// Sampling inputs other than the path and schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSettings {
    pub device: String,
    pub frame: GeoFrame,
    pub jitter_radius: f64,
    pub resolution: f64,
    pub seed: u64,
}

/// Observe `path` at `times`. Samples strictly inside a stay sit at the center
/// plus a uniform offset in the jitter disk and the realized path passes
/// through them; all other samples lie on the path. Labels come from the
/// continuous ground truth of the realized path.
pub fn sample_at(
    path: &GroundTruthPath,
    times: &SamplingSchedule,
    params: &MobilityParams,
    settings: &SampleSettings,
) -> Result<Observation> {
    if !(settings.jitter_radius >= 0.0 && settings.jitter_radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("jitter radius must be >= 0, got {}", settings.jitter_radius)));
    }
    let duration = path.duration();
    if let Some(t) = times.last().filter(|&t| t as f64 > duration) {
        return Err(Error::TimeOutOfRange { time: t as f64, duration });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut realized = path.clone();
    let mut positions = Vec::with_capacity(times.len());
    for &t in times.times() {
        let t = t as f64;
        let k = realized.phase_index(t);
        let pos = match &mut realized.phases_mut()[k] {
            Phase::Stay(s) if s.start < t && t < s.end => {
                let off = uniform_in_disk(&mut rng, settings.jitter_radius);
                let p = Planar::new(s.center.x + off.x, s.center.y + off.y);
                s.waypoints.push((t, p));
                p
            }
            Phase::Stay(s) => s.center,
            Phase::Travel(leg) => leg.position(t),
        };
        positions.push(pos);
    }
    let query: Vec<f64> = times.times().iter().map(|&t| t as f64).collect();
    let cover = StayCover::new(&realized, params, settings.resolution, &query)?;
    let labels = query.iter().map(|&t| cover.label(t)).collect::<Result<Vec<_>>>()?;
    let records = times
        .times()
        .iter()
        .zip(&positions)
        .map(|(&t, &p)| TrajectoryRecord::new(settings.frame.epoch + t, settings.frame.to_geo(p)))
        .collect();
    Ok(Observation {
        path: realized,
        sampled: SampledTrajectory { device: settings.device.clone(), records, labels },
    })
}

/// Keep each record independently with probability `rate`; kept records keep
/// their labels and order.
pub fn resample(traj: &SampledTrajectory, rate: f64, seed: u64) -> Result<SampledTrajectory> {
    let mask = resample_mask(traj.len(), rate, seed)?;
    let pick = |i: &usize| mask[*i];
    let idx: Vec<usize> = (0..traj.len()).filter(pick).collect();
    Ok(SampledTrajectory {
        device: traj.device.clone(),
        records: idx.iter().map(|&i| traj.records[i]).collect(),
        labels: idx.iter().map(|&i| traj.labels[i]).collect(),
    })
}

/// The keep/drop decisions [`resample`] makes for `len` records.
pub fn resample_mask(len: usize, rate: f64, seed: u64) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidParameter(format!("rate must be in [0, 1], got {rate}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..len).map(|_| rng.random::<f64>() < rate).collect())
}

/// The default inter-record gap law: exponent 1.5 on [1 min, 1 day].
pub fn default_interval_law() -> TruncatedPowerLaw {
    TruncatedPowerLaw { exponent: 1.5, xmin: 60.0, xmax: 86_400.0 }
}

/// `count` timestamps starting at 0 whose gaps are power-law draws rounded
/// to whole seconds (at least 1 s).
pub fn synth_schedule(count: usize, law: &TruncatedPowerLaw, seed: u64) -> Result<SamplingSchedule> {
    law.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = 0i64;
    let mut times = Vec::with_capacity(count);
    for k in 0..count {
        if k > 0 {
            t += (law.sample(&mut rng).round() as i64).max(1);
        }
        times.push(t);
    }
    SamplingSchedule::new(times)
}

/// The scheduled times that fall inside some stay of `path`, boundaries included.
pub fn stay_times(path: &GroundTruthPath, times: &SamplingSchedule) -> SamplingSchedule {
    let kept = times
        .times()
        .iter()
        .copied()
        .filter(|&t| path.stay_at(t as f64).is_some())
        .collect();
    SamplingSchedule::new(kept).expect("a subsequence of a valid schedule is valid")
}
