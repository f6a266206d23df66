//! Whole simulated datasets: one CTRW path, schedule and jitter stream per device.

use rayon::prelude::*;

use super::ctrw::{generate_ctrw, CtrwConfig, GroundTruthPath};
use super::power_law::TruncatedPowerLaw;
use super::sampling::{default_interval_law, sample_at, stay_times, synth_schedule, GeoFrame, SampleSettings, SampledTrajectory};
use super::truth::SamplingSchedule;
use crate::error::{Error, Result};
use crate::geo::Planar;
use crate::seed::{derive_seed, stream};
use crate::trajectory::{MobilityParams, Trajectory, TrajectoryRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    /// Walk parameters; `seed` and `duration` are set per device.
    pub ctrw: CtrwConfig,
    pub interval_law: TruncatedPowerLaw,
    pub records_per_trajectory: usize,
    pub trajectories: usize,
    pub frame: GeoFrame,
    pub resolution: f64,
    /// Observe only inside stays.
    pub stay_only: bool,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            ctrw: CtrwConfig::default(),
            interval_law: default_interval_law(),
            records_per_trajectory: 200,
            trajectories: 100,
            frame: GeoFrame::default(),
            resolution: 1.0,
            stay_only: false,
            seed: 0,
        }
    }
}

impl SimulationConfig {
    pub fn device_name(index: usize) -> String {
        format!("sim{index:06}")
    }

    fn validate(&self, params: &MobilityParams) -> Result<()> {
        self.ctrw.validate(params)?;
        self.interval_law.validate()?;
        if self.records_per_trajectory == 0 {
            return Err(Error::InvalidParameter("records per trajectory must be >= 1".into()));
        }
        Ok(())
    }

    /// Schedule and path of device `index`. The path lasts until the last scheduled time,
    /// at least one second.
    pub fn device_path(&self, index: usize) -> Result<(GroundTruthPath, SamplingSchedule)> {
        let root = self.seed;
        let i = index as u64;
        let schedule = synth_schedule(self.records_per_trajectory, &self.interval_law, derive_seed(root, stream::SCHEDULE, i))?;
        let duration = schedule.last().unwrap_or(0).max(1) as f64;
        let cfg = CtrwConfig { seed: derive_seed(root, stream::CTRW, i), duration, ..self.ctrw.clone() };
        let path = generate_ctrw(&cfg)?;
        let schedule = if self.stay_only { stay_times(&path, &schedule) } else { schedule };
        Ok((path, schedule))
    }
}

/// Simulate every device with ground-truth labels, in device order.
pub fn simulate_dataset(config: &SimulationConfig, params: &MobilityParams) -> Result<Vec<SampledTrajectory>> {
    config.validate(params)?;
    (0..config.trajectories)
        .into_par_iter()
        .map(|i| {
            let (path, schedule) = config.device_path(i)?;
            let settings = SampleSettings {
                device: SimulationConfig::device_name(i),
                frame: config.frame,
                jitter_radius: config.ctrw.jitter_radius,
                resolution: config.resolution,
                seed: derive_seed(config.seed, stream::JITTER, i as u64),
            };
            Ok(sample_at(&path, &schedule, params, &settings)?.sampled)
        })
        .collect()
}

/// Simulate records only, skipping ground truth; devices with no records are dropped.
pub fn simulate_records(config: &SimulationConfig, params: &MobilityParams) -> Result<Vec<Trajectory>> {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use super::ctrw::{uniform_in_disk, Phase};

    config.validate(params)?;
    let built: Result<Vec<Option<Trajectory>>> = (0..config.trajectories)
        .into_par_iter()
        .map(|i| {
            let (path, schedule) = config.device_path(i)?;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, stream::JITTER, i as u64));
            let records: Vec<TrajectoryRecord> = schedule
                .times()
                .iter()
                .map(|&t| {
                    let tf = t as f64;
                    let pos = match &path.phases()[path.phase_index(tf)] {
                        Phase::Stay(s) if s.start < tf && tf < s.end => {
                            let off = uniform_in_disk(&mut rng, config.ctrw.jitter_radius);
                            Planar::new(s.center.x + off.x, s.center.y + off.y)
                        }
                        Phase::Stay(s) => s.center,
                        Phase::Travel(leg) => leg.position(tf),
                    };
                    TrajectoryRecord::new(config.frame.epoch + t, config.frame.to_geo(pos))
                })
                .collect();
            if records.is_empty() {
                Ok(None)
            } else {
                Trajectory::new(SimulationConfig::device_name(i), records).map(Some)
            }
        })
        .collect();
    Ok(built?.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SimulationConfig {
        SimulationConfig { trajectories: 8, records_per_trajectory: 60, seed: 3, ..SimulationConfig::default() }
    }

    #[test]
    fn deterministic_and_ordered() {
        let p = MobilityParams::default();
        let a = simulate_dataset(&small(), &p).unwrap();
        assert_eq!(a, simulate_dataset(&small(), &p).unwrap());
        assert_eq!(a.len(), 8);
        assert_eq!(a[3].device, "sim000003");
        assert!(a.iter().all(|t| t.len() == 60 && t.labels.len() == 60));
    }

    #[test]
    fn records_match_labeled_simulation() {
        let p = MobilityParams::default();
        let labeled = simulate_dataset(&small(), &p).unwrap();
        let raw = simulate_records(&small(), &p).unwrap();
        for (l, r) in labeled.iter().zip(&raw) {
            assert_eq!(&l.records, r.records());
        }
    }

    #[test]
    fn rejects_truncation_violations() {
        let mut cfg = small();
        cfg.ctrw.jump_min = 500.0;
        assert!(simulate_dataset(&cfg, &MobilityParams::default()).is_err());
    }
}
