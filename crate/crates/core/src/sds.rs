//! Slice & Doubly Sliding (SDS): single-trajectory stay/travel inference with
//! precision guarantees.
//!
//! A trajectory is sliced at every gap longer than `delta_t`. Inside each dense
//! segment, stays are found with a sliding window whose records are pairwise
//! closer than `delta_s / 3` and span at least `delta_t`; travels are records
//! with a record at least `delta_s` away on both sides, the two witnesses
//! lying within `delta_t` of each other. Every other record is left unlabeled.

use std::ops::Range;

use rayon::prelude::*;

use crate::geo::Projection;
use crate::trajectory::{
    divide, DenseSegment, MobilityLabel, MobilityParams, Trajectory, TrajectoryRecord,
};

/// Behavioural switches for the stay scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SdsOptions {
    /// Emit the last open window of a segment when it already spans `delta_t`.
    ///
    /// The literal scan only emits a window when a later record escapes it, so
    /// a stay that runs to the end of a segment would be dropped.
    pub tail_flush: bool,
}

impl SdsOptions {
    /// The scan exactly as written, without the tail flush.
    pub const fn strict_pseudocode() -> Self {
        Self { tail_flush: false }
    }
}

impl Default for SdsOptions {
    fn default() -> Self {
        Self { tail_flush: true }
    }
}

/// A trajectory with one label per record.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTrajectory<'a> {
    pub trajectory: &'a Trajectory,
    pub labels: Vec<MobilityLabel>,
}

impl LabeledTrajectory<'_> {
    pub fn count(&self, label: MobilityLabel) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }
}

/// Lower bounds on stay and travel recall for one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecallBounds {
    pub stay_bound: f64,
    pub travel_bound: f64,
}

/// The doubly sliding stay scan over one dense segment.
///
/// `on_window` receives each emitted window as a half-open range relative to
/// `recs`, in increasing order of both ends. `on_admit(head, cursor)` fires when
/// a cursor joins the window without an escape.
pub(crate) fn stay_scan(
    recs: &[TrajectoryRecord],
    threshold: f64,
    delta_t: i64,
    proj: &Projection,
    tail_flush: bool,
    mut on_window: impl FnMut(Range<usize>),
    mut on_admit: impl FnMut(usize, usize),
) {
    let n = recs.len();
    if n == 0 {
        return;
    }
    let mut head = 0;
    for cursor in 1..n {
        let here = &recs[cursor].location;
        let escape = (head..cursor)
            .rev()
            .find(|&anchor| proj.distance(here, &recs[anchor].location) >= threshold);
        match escape {
            Some(anchor) => {
                if recs[cursor - 1].time - recs[head].time >= delta_t {
                    on_window(head..cursor);
                }
                head = anchor + 1;
            }
            None => on_admit(head, cursor),
        }
    }
    if tail_flush && recs[n - 1].time - recs[head].time >= delta_t {
        on_window(head..n);
    }
}

/// Stay flags at an explicit spatial threshold.
pub(crate) fn stay_flags_at(
    recs: &[TrajectoryRecord],
    threshold: f64,
    delta_t: i64,
    proj: &Projection,
    tail_flush: bool,
) -> Vec<bool> {
    let mut flags = vec![false; recs.len()];
    // windows arrive with non-decreasing ends, so a high-water mark avoids re-flagging
    let mut flagged_to = 0;
    stay_scan(
        recs,
        threshold,
        delta_t,
        proj,
        tail_flush,
        |w| {
            for f in &mut flags[w.start.max(flagged_to)..w.end] {
                *f = true;
            }
            flagged_to = flagged_to.max(w.end);
        },
        |_, _| {},
    );
    flags
}

/// Stay windows of a whole trajectory at an explicit threshold, as absolute
/// half-open index ranges.
pub fn stay_windows(
    traj: &Trajectory,
    threshold: f64,
    delta_t: i64,
    proj: &Projection,
    opts: SdsOptions,
) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    for seg in divide(traj, delta_t) {
        let base = seg.span().start;
        stay_scan(
            seg.records(),
            threshold,
            delta_t,
            proj,
            opts.tail_flush,
            |w| out.push(w.start + base..w.end + base),
            |_, _| {},
        );
    }
    out
}

/// Travel flags at an explicit spatial threshold.
pub(crate) fn travel_flags_at(
    recs: &[TrajectoryRecord],
    stay: &[bool],
    threshold: f64,
    delta_t: i64,
    proj: &Projection,
) -> Vec<bool> {
    let n = recs.len();
    let mut flags = vec![false; n];
    for c in 1..n.saturating_sub(1) {
        if stay[c] {
            continue;
        }
        let here = &recs[c];
        // A witness farther back than delta_t could never pass the window test,
        // so both scans stop there.
        let left = (0..c)
            .rev()
            .take_while(|&l| here.time - recs[l].time <= delta_t)
            .find(|&l| proj.distance(&here.location, &recs[l].location) >= threshold);
        let Some(left) = left else { continue };
        let t_left = recs[left].time;
        flags[c] = (c + 1..n)
            .take_while(|&r| recs[r].time - t_left <= delta_t)
            .any(|r| proj.distance(&here.location, &recs[r].location) >= threshold);
    }
    flags
}

/// Stay flags for one dense segment, using the `delta_s / 3` window.
pub fn detect_stays(
    segment: &DenseSegment<'_>,
    params: &MobilityParams,
    proj: &Projection,
    opts: SdsOptions,
) -> Vec<bool> {
    stay_flags_at(
        segment.records(),
        params.delta_s / 3.0,
        params.delta_t,
        proj,
        opts.tail_flush,
    )
}

/// Travel flags for one dense segment. Endpoints and stay records are never flagged.
pub fn detect_travels(
    segment: &DenseSegment<'_>,
    stay_flags: &[bool],
    params: &MobilityParams,
    proj: &Projection,
) -> Vec<bool> {
    travel_flags_at(
        segment.records(),
        stay_flags,
        params.delta_s,
        params.delta_t,
        proj,
    )
}

/// Label every record of `traj` as Stay, Travel or Unlabeled.
pub fn sds_label<'a>(
    traj: &'a Trajectory,
    params: &MobilityParams,
    proj: &Projection,
    opts: SdsOptions,
) -> LabeledTrajectory<'a> {
    let mut labels = vec![MobilityLabel::Unlabeled; traj.len()];
    for seg in divide(traj, params.delta_t) {
        let stays = detect_stays(&seg, params, proj, opts);
        let travels = detect_travels(&seg, &stays, params, proj);
        for (k, i) in seg.span().enumerate() {
            if stays[k] {
                labels[i] = MobilityLabel::Stay;
            } else if travels[k] {
                labels[i] = MobilityLabel::Travel;
            }
        }
    }
    LabeledTrajectory { trajectory: traj, labels }
}

/// Label a whole dataset on the current rayon pool. Output order follows input order.
pub fn label_dataset(
    trajs: &[Trajectory],
    params: &MobilityParams,
    proj: &Projection,
    opts: SdsOptions,
) -> Vec<Vec<MobilityLabel>> {
    trajs
        .par_iter()
        .map(|t| sds_label(t, params, proj, opts).labels)
        .collect()
}

fn ratio_or_one(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        (num as f64 / den as f64).min(1.0)
    }
}

/// Stay bound: stays found with the `delta_s / 3` window over stays found with a
/// `delta_s` window. Travel bound: travels found at `delta_s` over travels found
/// at `delta_s / 2`. A zero denominator yields 1.0.
pub fn recall_lower_bounds(
    traj: &Trajectory,
    params: &MobilityParams,
    proj: &Projection,
    opts: SdsOptions,
) -> RecallBounds {
    let (mut stay_num, mut stay_den, mut travel_num, mut travel_den) = (0, 0, 0, 0);
    let count = |v: &[bool]| v.iter().filter(|&&b| b).count();
    for seg in divide(traj, params.delta_t) {
        let recs = seg.records();
        let dt = params.delta_t;
        let stays = stay_flags_at(recs, params.delta_s / 3.0, dt, proj, opts.tail_flush);
        let wide = stay_flags_at(recs, params.delta_s, dt, proj, opts.tail_flush);
        stay_num += count(&stays);
        stay_den += count(&wide);
        travel_num += count(&travel_flags_at(recs, &stays, params.delta_s, dt, proj));
        travel_den += count(&travel_flags_at(recs, &stays, params.delta_s / 2.0, dt, proj));
    }
    RecallBounds {
        stay_bound: ratio_or_one(stay_num, stay_den),
        travel_bound: ratio_or_one(travel_num, travel_den),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::Planar;
    use crate::trajectory::fixtures::{line_minutes, planar_seconds, proj};
    use MobilityLabel::{Stay as S, Travel as T, Unlabeled as U};

    fn label(t: &Trajectory) -> Vec<MobilityLabel> {
        sds_label(t, &MobilityParams::default(), &proj(), SdsOptions::default()).labels
    }

    fn five_record_stay() -> Trajectory {
        line_minutes(&[(0, 0.0), (10, 40.0), (25, 90.0), (40, 60.0), (50, 1000.0)])
    }

    #[test]
    fn stay_closed_by_escape() {
        let t = five_record_stay();
        let seg = &divide(&t, 1800)[0];
        let flags = detect_stays(seg, &MobilityParams::default(), &proj(), SdsOptions::default());
        assert_eq!(flags, vec![true, true, true, true, false]);
        assert_eq!(label(&t), vec![S, S, S, S, U]);
    }

    #[test]
    fn fast_straight_line_is_travel_in_the_middle() {
        let t = line_minutes(&[(0, 0.0), (10, 1000.0), (20, 2000.0)]);
        let seg = &divide(&t, 1800)[0];
        let p = MobilityParams::default();
        let stays = detect_stays(seg, &p, &proj(), SdsOptions::default());
        assert_eq!(stays, vec![false; 3]);
        assert_eq!(detect_travels(seg, &stays, &p, &proj()), vec![false, true, false]);
        assert_eq!(label(&t), vec![U, T, U]);
    }

    #[test]
    fn witnesses_too_far_apart_in_time() {
        let t = line_minutes(&[(0, 0.0), (25, 1000.0), (50, 2000.0)]);
        assert_eq!(label(&t), vec![U, U, U]);
    }

    #[test]
    fn single_record_is_unlabeled() {
        assert_eq!(label(&line_minutes(&[(3, 0.0)])), vec![U]);
    }

    #[test]
    fn tail_flush_emits_an_unescaped_stay() {
        let t = line_minutes(&[(0, 0.0), (10, 5.0), (20, 10.0), (30, 0.0)]);
        assert_eq!(label(&t), vec![S; 4]);
        let strict = sds_label(
            &t,
            &MobilityParams::default(),
            &proj(),
            SdsOptions::strict_pseudocode(),
        );
        assert_eq!(strict.labels, vec![U; 4]);
    }

    #[test]
    fn stays_do_not_cross_large_gaps() {
        // 40-minute gap splits the co-located records into two short segments
        let t = line_minutes(&[(0, 0.0), (20, 0.0), (60, 0.0), (80, 0.0)]);
        assert_eq!(label(&t), vec![U; 4]);
    }

    #[test]
    fn window_invariant_holds_on_admission() {
        let t = planar_seconds(&[
            (0, Planar::new(0.0, 0.0)),
            (300, Planar::new(100.0, 50.0)),
            (700, Planar::new(250.0, 0.0)),
            (1500, Planar::new(120.0, 200.0)),
            (2100, Planar::new(50.0, 30.0)),
            (2400, Planar::new(900.0, 0.0)),
            (2500, Planar::new(1000.0, 100.0)),
            (4000, Planar::new(1100.0, 0.0)),
        ]);
        let pr = proj();
        let thr = 800.0 / 3.0;
        let recs = t.records();
        let mut admitted = 0;
        stay_scan(recs, thr, 1800, &pr, true, |_| {}, |head, cursor| {
            admitted += 1;
            for i in head..=cursor {
                for j in i + 1..=cursor {
                    assert!(pr.distance(&recs[i].location, &recs[j].location) < thr);
                }
            }
        });
        assert!(admitted > 0);
    }

    #[test]
    fn recall_bounds_examples() {
        let p = MobilityParams::default();
        // tight cluster: identical at both thresholds
        let tight = line_minutes(&[(0, 0.0), (10, 20.0), (20, 40.0), (35, 10.0)]);
        let b = recall_lower_bounds(&tight, &p, &proj(), SdsOptions::default());
        assert_eq!(b.stay_bound, 1.0);
        assert_eq!(b.travel_bound, 1.0);

        // nothing detectable anywhere
        let sparse = line_minutes(&[(0, 0.0), (120, 5000.0)]);
        let b = recall_lower_bounds(&sparse, &p, &proj(), SdsOptions::default());
        assert_eq!((b.stay_bound, b.travel_bound), (1.0, 1.0));

        // two points 400 m apart visited alternately: a stay at delta_s only
        let wide = line_minutes(&[(0, 0.0), (10, 400.0), (20, 0.0), (30, 400.0), (40, 0.0)]);
        let b = recall_lower_bounds(&wide, &p, &proj(), SdsOptions::default());
        assert_eq!(b.stay_bound, 0.0);
    }

    #[test]
    fn labels_are_exclusive_and_deterministic() {
        let t = line_minutes(&[
            (0, 0.0),
            (10, 30.0),
            (35, 20.0),
            (40, 900.0),
            (45, 1900.0),
            (50, 2900.0),
            (60, 2950.0),
            (95, 2900.0),
        ]);
        let a = label(&t);
        let b = label(&t);
        assert_eq!(a, b);
        assert_eq!(a.len(), t.len());
    }

    #[test]
    fn dataset_driver_matches_single_calls() {
        let trajs = vec![five_record_stay(), line_minutes(&[(0, 0.0), (10, 1000.0), (20, 2000.0)])];
        let all = label_dataset(&trajs, &MobilityParams::default(), &proj(), SdsOptions::default());
        assert_eq!(all, vec![vec![S, S, S, S, U], vec![U, T, U]]);
    }
}
