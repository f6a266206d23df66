//! Trajectories, mobility parameters, dense-segment slicing and sparsity metrics.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::geo::GeoPoint;

/// One timestamped observation. The owning [`Trajectory`] carries the device id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    /// Seconds since the Unix epoch.
    pub time: i64,
    pub location: GeoPoint,
}

impl TrajectoryRecord {
    pub fn new(time: i64, location: GeoPoint) -> Self {
        Self { time, location }
    }
}

/// Time-ordered observations of one device.
///
/// Timestamps are strictly increasing and the trajectory is never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    device: String,
    records: Vec<TrajectoryRecord>,
}

impl Trajectory {
    pub fn new(device: impl Into<String>, records: Vec<TrajectoryRecord>) -> Result<Self> {
        let device = device.into();
        if records.is_empty() {
            return Err(Error::EmptyTrajectory { device });
        }
        if let Some(r) = records.iter().find(|r| r.time < 0) {
            return Err(Error::NegativeTime(r.time));
        }
        for (i, w) in records.windows(2).enumerate() {
            if w[1].time <= w[0].time {
                return Err(Error::NonIncreasingTime {
                    device,
                    index: i + 1,
                    prev: w[0].time,
                    next: w[1].time,
                });
            }
        }
        Ok(Self { device, records })
    }

    pub fn device(&self) -> &str {
        &self.device
    }

    pub fn records(&self) -> &[TrajectoryRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn times(&self) -> impl Iterator<Item = i64> + '_ {
        self.records.iter().map(|r| r.time)
    }

    pub fn into_parts(self) -> (String, Vec<TrajectoryRecord>) {
        (self.device, self.records)
    }
}

/// Spatial and temporal scale defining stay and travel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityParams {
    /// Meters.
    pub delta_s: f64,
    /// Seconds.
    pub delta_t: i64,
}

impl MobilityParams {
    pub const DEFAULT_DELTA_S: f64 = 800.0;
    pub const DEFAULT_DELTA_T: i64 = 1800;

    pub fn new(delta_s: f64, delta_t: i64) -> Result<Self> {
        if !(delta_s.is_finite() && delta_s > 0.0) {
            return Err(Error::InvalidParams(format!("delta_s must be > 0, got {delta_s}")));
        }
        if delta_t <= 0 {
            return Err(Error::InvalidParams(format!("delta_t must be > 0, got {delta_t}")));
        }
        Ok(Self { delta_s, delta_t })
    }
}

impl Default for MobilityParams {
    fn default() -> Self {
        Self {
            delta_s: Self::DEFAULT_DELTA_S,
            delta_t: Self::DEFAULT_DELTA_T,
        }
    }
}

/// Ground-truth mobility of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mobility {
    Stay,
    Travel,
}

impl Mobility {
    pub fn as_char(self) -> char {
        match self {
            Mobility::Stay => 'S',
            Mobility::Travel => 'T',
        }
    }

    pub fn index(self) -> usize {
        match self {
            Mobility::Stay => 0,
            Mobility::Travel => 1,
        }
    }

    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Mobility::Stay
        } else {
            Mobility::Travel
        }
    }
}

/// Per-record verdict of the single-trajectory inference; `Unlabeled` is an abstention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MobilityLabel {
    Stay,
    Travel,
    #[default]
    Unlabeled,
}

impl MobilityLabel {
    pub fn as_char(self) -> char {
        match self {
            MobilityLabel::Stay => 'S',
            MobilityLabel::Travel => 'T',
            MobilityLabel::Unlabeled => 'U',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'S' | 's' => Some(MobilityLabel::Stay),
            'T' | 't' => Some(MobilityLabel::Travel),
            'U' | 'u' => Some(MobilityLabel::Unlabeled),
            _ => None,
        }
    }

    /// The certain verdict, if any.
    pub fn mobility(self) -> Option<Mobility> {
        match self {
            MobilityLabel::Stay => Some(Mobility::Stay),
            MobilityLabel::Travel => Some(Mobility::Travel),
            MobilityLabel::Unlabeled => None,
        }
    }
}

impl From<Mobility> for MobilityLabel {
    fn from(m: Mobility) -> Self {
        match m {
            Mobility::Stay => MobilityLabel::Stay,
            Mobility::Travel => MobilityLabel::Travel,
        }
    }
}

impl fmt::Display for MobilityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl fmt::Display for Mobility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A maximal run of records whose consecutive gaps are all `<= delta_t`.
#[derive(Debug, Clone)]
pub struct DenseSegment<'a> {
    parent: &'a Trajectory,
    span: Range<usize>,
}

impl<'a> DenseSegment<'a> {
    pub fn parent(&self) -> &'a Trajectory {
        self.parent
    }

    /// Half-open index range into the parent's records.
    pub fn span(&self) -> Range<usize> {
        self.span.clone()
    }

    pub fn records(&self) -> &'a [TrajectoryRecord] {
        &self.parent.records[self.span.clone()]
    }

    pub fn len(&self) -> usize {
        self.span.len()
    }

    pub fn is_empty(&self) -> bool {
        self.span.is_empty()
    }
}

/// Cut `traj` at every consecutive gap strictly larger than `delta_t`.
pub fn divide(traj: &Trajectory, delta_t: i64) -> Vec<DenseSegment<'_>> {
    let recs = traj.records();
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..recs.len() {
        if recs[i].time - recs[i - 1].time > delta_t {
            out.push(DenseSegment { parent: traj, span: start..i });
            start = i;
        }
    }
    out.push(DenseSegment { parent: traj, span: start..recs.len() });
    out
}

/// Mean gap between consecutive records, in seconds.
pub fn global_sparsity(traj: &Trajectory) -> Result<f64> {
    let recs = traj.records();
    if recs.len() < 2 {
        return Err(Error::UndefinedMetric("global sparsity needs at least two records"));
    }
    let span = recs[recs.len() - 1].time - recs[0].time;
    Ok(span as f64 / (recs.len() - 1) as f64)
}

/// Fraction of records that are not isolated by gaps `> delta_t` on both sides.
///
/// Only interior records can be isolated; the first and last record always count
/// as covered.
pub fn local_coverage(traj: &Trajectory, delta_t: i64) -> f64 {
    let recs = traj.records();
    let n = recs.len();
    let isolated = (1..n.saturating_sub(1))
        .filter(|&i| {
            recs[i].time - recs[i - 1].time > delta_t && recs[i + 1].time - recs[i].time > delta_t
        })
        .count();
    (n - isolated) as f64 / n as f64
}


#[cfg(test)]
mod tests {
    use super::fixtures::line_minutes;
    use super::*;
    use proptest::prelude::*;

    fn at_minutes(ms: &[i64]) -> Trajectory {
        let pts: Vec<_> = ms.iter().map(|&m| (m, 0.0)).collect();
        line_minutes(&pts)
    }

    #[test]
    fn rejects_duplicate_and_decreasing_times() {
        let p = GeoPoint::new(0.0, 0.0).unwrap();
        let dup = vec![TrajectoryRecord::new(5, p), TrajectoryRecord::new(5, p)];
        assert!(matches!(
            Trajectory::new("d", dup),
            Err(Error::NonIncreasingTime { index: 1, .. })
        ));
        assert!(Trajectory::new("d", vec![]).is_err());
        assert!(Trajectory::new("d", vec![TrajectoryRecord::new(-1, p)]).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(MobilityParams::new(0.0, 10).is_err());
        assert!(MobilityParams::new(10.0, 0).is_err());
        let d = MobilityParams::default();
        assert_eq!((d.delta_s, d.delta_t), (800.0, 1800));
    }

    #[test]
    fn divide_cuts_only_large_gaps() {
        let t = at_minutes(&[0, 10, 50, 60]);
        let sizes: Vec<_> = divide(&t, 1800).iter().map(|s| s.len()).collect();
        assert_eq!(sizes, vec![2, 2]);

        let t = at_minutes(&[0, 10, 20, 50]);
        assert_eq!(divide(&t, 1800).len(), 1);

        let t = at_minutes(&[7]);
        let segs = divide(&t, 1800);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].span(), 0..1);
    }

    #[test]
    fn global_sparsity_examples() {
        assert_eq!(global_sparsity(&at_minutes(&[0, 10, 20])).unwrap(), 600.0);
        assert_eq!(global_sparsity(&at_minutes(&[0, 30])).unwrap(), 1800.0);
        assert_eq!(
            global_sparsity(&at_minutes(&[0, 10, 120, 240, 250])).unwrap(),
            3750.0
        );
        assert!(matches!(
            global_sparsity(&at_minutes(&[0])),
            Err(Error::UndefinedMetric(_))
        ));
    }

    #[test]
    fn local_coverage_examples() {
        assert_eq!(local_coverage(&at_minutes(&[0, 10, 120, 240, 250]), 1800), 0.8);
        assert_eq!(local_coverage(&at_minutes(&[0, 10, 20, 30]), 1800), 1.0);
        let rho = local_coverage(&at_minutes(&[0, 60, 120]), 1800);
        assert!((rho - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(local_coverage(&at_minutes(&[0]), 1800), 1.0);
    }

    fn gaps() -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(1i64..7200, 0..40)
    }

    fn from_gaps(g: &[i64]) -> Trajectory {
        let mut t = 1_000;
        let mut ms = vec![t];
        for d in g {
            t += d;
            ms.push(t);
        }
        let p = GeoPoint::new(116.0, 39.0).unwrap();
        Trajectory::new("d", ms.into_iter().map(|t| TrajectoryRecord::new(t, p)).collect())
            .unwrap()
    }

    fn dilate(traj: &Trajectory, k: i64) -> Trajectory {
        let recs = traj
            .records()
            .iter()
            .map(|r| TrajectoryRecord::new(r.time * k, r.location))
            .collect();
        Trajectory::new("d", recs).unwrap()
    }

    proptest! {
        #[test]
        fn divide_is_a_partition(g in gaps(), dt in 60i64..3600) {
            let t = from_gaps(&g);
            let segs = divide(&t, dt);
            let recs = t.records();
            prop_assert_eq!(segs.iter().map(|s| s.len()).sum::<usize>(), t.len());
            let mut next = 0;
            for s in &segs {
                prop_assert_eq!(s.span().start, next);
                next = s.span().end;
                for w in s.records().windows(2) {
                    prop_assert!(w[1].time - w[0].time <= dt);
                }
                if s.span().start > 0 {
                    let i = s.span().start;
                    prop_assert!(recs[i].time - recs[i - 1].time > dt);
                }
            }
        }

        #[test]
        fn sparsity_scales_with_dilation(g in prop::collection::vec(1i64..7200, 1..40), k in 2i64..5) {
            let t = from_gaps(&g);
            let d = dilate(&t, k);
            let a = global_sparsity(&t).unwrap();
            let b = global_sparsity(&d).unwrap();
            prop_assert!((b - k as f64 * a).abs() <= 1e-9 * b.max(1.0));
        }

        #[test]
        fn coverage_invariant_under_dilation(g in gaps(), dt in 60i64..3600, k in 2i64..5) {
            let t = from_gaps(&g);
            prop_assert_eq!(local_coverage(&t, dt), local_coverage(&dilate(&t, k), dt * k));
        }
    }
}
