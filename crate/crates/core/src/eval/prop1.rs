//! Empirical check of the neighbor-bracketing property: a record removed from
//! the middle of a dense stay segment lies within `delta_s` of both neighbors.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geo::Projection;
use crate::sds::{stay_windows, SdsOptions};
use crate::trajectory::{MobilityParams, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Prop1Counts {
    /// Removed records whose two neighbors share a dense stay segment.
    pub tested: u64,
    /// Tested records at least `delta_s` from either neighbor.
    pub violations: u64,
}

impl Prop1Counts {
    pub fn rate(&self) -> Option<f64> {
        (self.tested > 0).then(|| self.violations as f64 / self.tested as f64)
    }

    pub fn merge(&mut self, other: &Prop1Counts) {
        self.tested += other.tested;
        self.violations += other.violations;
    }
}

/// Remove each interior record in turn, detect dense stay segments on the rest
/// and test the removed record against its two neighbors if they share one.
pub fn prop1_check(traj: &Trajectory, params: &MobilityParams, proj: &Projection) -> Prop1Counts {
    let recs = traj.records();
    let mut counts = Prop1Counts::default();
    for k in 1..recs.len().saturating_sub(1) {
        let rest: Vec<_> = recs.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, r)| *r).collect();
        let rest = Trajectory::new(traj.device(), rest).expect("a subsequence of a trajectory is a trajectory");
        // In the remainder the neighbors sit at k - 1 and k.
        let bracketed = stay_windows(&rest, params.delta_s, params.delta_t, proj, SdsOptions::default())
            .iter()
            .any(|w| w.start < k && k < w.end);
        if !bracketed {
            continue;
        }
        counts.tested += 1;
        let here = &recs[k].location;
        let far = proj.distance(here, &recs[k - 1].location) >= params.delta_s
            || proj.distance(here, &recs[k + 1].location) >= params.delta_s;
        if far {
            counts.violations += 1;
        }
    }
    counts
}

/// Violation counts per parameter setting, in grid order.
pub fn prop1_violation_rate(
    dataset: &[Trajectory],
    grid: &[MobilityParams],
    proj: &Projection,
) -> Result<Vec<(MobilityParams, Prop1Counts)>> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    Ok(grid
        .iter()
        .map(|params| {
            let per: Vec<Prop1Counts> = dataset.par_iter().map(|t| prop1_check(t, params, proj)).collect();
            let mut total = Prop1Counts::default();
            for c in &per {
                total.merge(c);
            }
            (*params, total)
        })
        .collect())
}
