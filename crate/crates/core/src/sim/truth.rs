//! Continuous stay/travel ground truth on a path.
//!
//! A time is Stay when some window `[a, a + delta_t]` inside `[0, duration]`
//! contains it and the path restricted to that window has diameter below
//! `delta_s`. The path is a polyline, so a window's diameter is attained among
//! its interior vertices and its two interpolated endpoints; each candidate
//! window is therefore evaluated exactly. Candidate starts are a regular grid
//! plus every vertex time and every query time, each also shifted back by
//! `delta_t`.

use std::ops::Range;

use super::ctrw::{GroundTruthPath, Phase};
use crate::error::{Error, Result};
use crate::geo::Planar;
use crate::trajectory::{Mobility, MobilityParams};

const NO_GROUP: u32 = u32::MAX;

/// Strictly increasing sampling times in seconds from the path start.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SamplingSchedule {
    times: Vec<i64>,
}

impl SamplingSchedule {
    pub fn new(times: Vec<i64>) -> Result<Self> {
        if let Some(&t) = times.iter().find(|&&t| t < 0) {
            return Err(Error::NegativeTime(t));
        }
        if let Some(i) = times.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "schedule not strictly increasing at index {}: {} -> {}",
                i + 1,
                times[i],
                times[i + 1]
            )));
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[i64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<i64> {
        self.times.last().copied()
    }
}

/// The path as a polyline; vertices inside one stay share that stay's group.
struct Polyline {
    times: Vec<f64>,
    pts: Vec<Planar>,
    group: Vec<u32>,
    /// Per stay group: every pair of its points is closer than `delta_s`.
    compact: Vec<bool>,
}

impl Polyline {
    fn new(path: &GroundTruthPath, delta_s: f64) -> Self {
        let mut line = Polyline { times: Vec::new(), pts: Vec::new(), group: Vec::new(), compact: Vec::new() };
        let push = |line: &mut Polyline, t: f64, p: Planar, g: u32| {
            line.times.push(t);
            line.pts.push(p);
            line.group.push(g);
        };
        let phases = path.phases();
        for (k, phase) in phases.iter().enumerate() {
            match phase {
                Phase::Stay(s) => {
                    let g = line.compact.len() as u32;
                    line.compact.push(2.0 * s.radius() < delta_s);
                    push(&mut line, s.start, s.center, g);
                    for &(t, p) in &s.waypoints {
                        push(&mut line, t, p, g);
                    }
                    push(&mut line, s.end, s.center, g);
                }
                Phase::Travel(leg) if k + 1 == phases.len() => push(&mut line, leg.end, leg.to, NO_GROUP),
                Phase::Travel(_) => {}
            }
        }
        line
    }

    fn point_at(&self, t: f64) -> (Planar, u32) {
        let j = self.times.partition_point(|&v| v <= t).max(1) - 1;
        if j + 1 >= self.times.len() {
            return (self.pts[j], self.group[j]);
        }
        let (t0, t1) = (self.times[j], self.times[j + 1]);
        let frac = if t1 > t0 { ((t - t0) / (t1 - t0)).clamp(0.0, 1.0) } else { 0.0 };
        let g = if self.group[j] == self.group[j + 1] { self.group[j] } else { NO_GROUP };
        (self.pts[j].lerp(self.pts[j + 1], frac), g)
    }

    fn is_compact(&self, g: u32) -> bool {
        g != NO_GROUP && self.compact[g as usize]
    }

    /// Whether the path over `[a, b]` has diameter below `delta_s`.
    fn window_ok(&self, a: f64, b: f64, delta_s: f64, buf: &mut Vec<(Planar, u32)>, runs: &mut Vec<(u32, Range<usize>)>) -> bool {
        buf.clear();
        buf.push(self.point_at(a));
        let lo = self.times.partition_point(|&v| v <= a);
        let hi = self.times.partition_point(|&v| v < b);
        buf.extend((lo..hi.max(lo)).map(|j| (self.pts[j], self.group[j])));
        buf.push(self.point_at(b));

        runs.clear();
        let mut start = 0;
        for i in 1..=buf.len() {
            if i == buf.len() || buf[i].1 != buf[start].1 || buf[i].1 == NO_GROUP {
                runs.push((buf[start].1, start..i));
                start = i;
            }
        }
        let far = |i: usize, j: usize| buf[i].0.distance(buf[j].0) >= delta_s;
        for (g, r) in runs.iter() {
            if !self.is_compact(*g) {
                for i in r.clone() {
                    for j in i + 1..r.end {
                        if far(i, j) {
                            return false;
                        }
                    }
                }
            }
        }
        for (x, (_, r1)) in runs.iter().enumerate() {
            for (_, r2) in &runs[x + 1..] {
                for i in r1.clone() {
                    for j in r2.clone() {
                        if far(i, j) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Closed intervals of continuous Stay time on one path.
#[derive(Debug, Clone, PartialEq)]
pub struct StayCover {
    intervals: Vec<(f64, f64)>,
    duration: f64,
}

impl StayCover {
    /// Evaluate the cover. `extra_times` are times whose labels will be queried;
    /// they join the candidate window starts.
    pub fn new(path: &GroundTruthPath, params: &MobilityParams, resolution: f64, extra_times: &[f64]) -> Result<Self> {
        if !(resolution > 0.0 && resolution <= 1.0) {
            return Err(Error::InvalidParameter(format!("resolution must be in (0, 1] s, got {resolution}")));
        }
        let duration = path.duration();
        let dt = params.delta_t as f64;
        let ds = params.delta_s;
        let last_start = duration - dt;
        if last_start < 0.0 {
            return Ok(Self { intervals: Vec::new(), duration });
        }
        let line = Polyline::new(path, ds);

        let mut cover: Vec<(f64, f64)> = Vec::new();
        let mut skip: Vec<(f64, f64)> = Vec::new();
        let stays: Vec<_> = path.stays().collect();
        for (g, s) in stays.iter().enumerate() {
            if line.compact[g] && s.duration() >= dt {
                cover.push((s.start, s.end));
                skip.push((s.start, s.end - dt));
            }
        }
        for w in stays.windows(2) {
            let (prev, next) = (w[0], w[1]);
            if prev.center.distance(next.center) >= ds && next.start - prev.end <= dt {
                skip.push(((next.start - dt).max(0.0), prev.end.min(last_start)));
            }
        }
        skip.retain(|&(lo, hi)| lo <= hi);
        skip.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut extras: Vec<f64> = line
            .times
            .iter()
            .chain(extra_times)
            .flat_map(|&t| [t, t - dt])
            .filter(|&a| (0.0..=last_start).contains(&a))
            .collect();
        extras.push(last_start);
        extras.sort_by(f64::total_cmp);
        extras.dedup();

        // Walk candidate starts in increasing order, skipping decided ranges.
        let mut free: Vec<(f64, f64)> = Vec::new();
        let mut cursor = 0.0;
        for &(lo, hi) in &skip {
            if lo > cursor {
                free.push((cursor, lo));
            }
            cursor = f64::max(cursor, hi);
        }
        if cursor <= last_start {
            free.push((cursor, last_start));
        }

        let mut buf = Vec::new();
        let mut runs = Vec::new();
        let mut found: Vec<(f64, f64)> = Vec::new();
        let mut extra_at = 0;
        for &(lo, hi) in &free {
            let mut k = (lo / resolution).ceil() as i64;
            while extra_at < extras.len() && extras[extra_at] < lo {
                extra_at += 1;
            }
            loop {
                let grid = k as f64 * resolution;
                let next_extra = extras.get(extra_at).copied().filter(|&e| e <= hi);
                let a = match next_extra {
                    Some(e) if e <= grid || grid > hi => {
                        extra_at += 1;
                        e
                    }
                    _ if grid <= hi => {
                        k += 1;
                        grid
                    }
                    _ => break,
                };
                if line.window_ok(a, a + dt, ds, &mut buf, &mut runs) {
                    match found.last_mut() {
                        Some(last) if a <= last.1 => last.1 = a + dt,
                        _ => found.push((a, a + dt)),
                    }
                }
            }
        }

        cover.extend(found);
        cover.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut intervals: Vec<(f64, f64)> = Vec::with_capacity(cover.len());
        for (lo, hi) in cover {
            match intervals.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => intervals.push((lo, hi)),
            }
        }
        Ok(Self { intervals, duration })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn label(&self, t: f64) -> Result<Mobility> {
        if !(0.0..=self.duration).contains(&t) {
            return Err(Error::TimeOutOfRange { time: t, duration: self.duration });
        }
        let i = self.intervals.partition_point(|&(lo, _)| lo <= t);
        let inside = i > 0 && t <= self.intervals[i - 1].1;
        Ok(if inside { Mobility::Stay } else { Mobility::Travel })
    }
}

/// Continuous Stay/Travel label of each scheduled time.
pub fn continuous_labels(
    path: &GroundTruthPath,
    times: &SamplingSchedule,
    params: &MobilityParams,
    resolution: f64,
) -> Result<Vec<Mobility>> {
    let ts: Vec<f64> = times.times().iter().map(|&t| t as f64).collect();
    if let Some(&t) = ts.iter().find(|&&t| t > path.duration()) {
        return Err(Error::TimeOutOfRange { time: t, duration: path.duration() });
    }
    let cover = StayCover::new(path, params, resolution, &ts)?;
    ts.iter().map(|&t| cover.label(t)).collect()
}
