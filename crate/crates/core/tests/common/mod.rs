#![allow(dead_code)]

use mobinfer_core::{GeoPoint, Planar, Projection, Trajectory, TrajectoryRecord};
use rand::Rng;

pub const ORIGIN: GeoPoint = GeoPoint { lon: 116.4, lat: 39.9 };

pub fn proj() -> Projection {
    Projection::new(ORIGIN.lat)
}

/// A random trajectory of 1..=max_len records mixing short and long gaps,
/// small drifts and large jumps.
pub fn random_trajectory<R: Rng>(rng: &mut R, max_len: usize) -> Trajectory {
    let len = rng.random_range(1..=max_len);
    let p = proj();
    let mut t = rng.random_range(0..1000i64);
    let mut pos = Planar::new(0.0, 0.0);
    let mut recs = Vec::with_capacity(len);
    for _ in 0..len {
        recs.push(TrajectoryRecord::new(t, p.to_geo(&ORIGIN, pos)));
        t += match rng.random_range(0..10) {
            0..=5 => rng.random_range(30..900),
            6..=8 => rng.random_range(900..2700),
            _ => rng.random_range(2700..10_800),
        };
        let step = match rng.random_range(0..10) {
            0..=5 => rng.random_range(0.0..250.0),
            6..=7 => rng.random_range(250.0..900.0),
            _ => rng.random_range(900.0..3000.0),
        };
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        pos = Planar::new(pos.x + step * theta.cos(), pos.y + step * theta.sin());
    }
    Trajectory::new("rand", recs).unwrap()
}

/// Literal window enumeration: Stay iff some `p < q` window spanning `delta_t`
/// covers the record with every pair closer than `delta_s`.
pub fn enumerate_stays(traj: &Trajectory, delta_s: f64, delta_t: i64, proj: &Projection) -> Vec<bool> {
    let r = traj.records();
    let n = r.len();
    let mut out = vec![false; n];
    for p in 0..n {
        for q in p + 1..n {
            if r[q].time - r[p].time < delta_t {
                continue;
            }
            let tight = (p..=q).all(|i| (i + 1..=q).all(|j| proj.distance(&r[i].location, &r[j].location) < delta_s));
            if tight {
                out[p..=q].iter_mut().for_each(|m| *m = true);
            }
        }
    }
    out
}

/// Records with a witness at least `threshold` away on each side, the two
/// witnesses within `delta_t` of each other.
pub fn brute_travel(traj: &Trajectory, threshold: f64, delta_t: i64, proj: &Projection) -> Vec<bool> {
    let r = traj.records();
    let n = r.len();
    (0..n)
        .map(|c| {
            (0..c).any(|l| {
                (c + 1..n).any(|q| {
                    r[q].time - r[l].time <= delta_t
                        && proj.distance(&r[c].location, &r[l].location) >= threshold
                        && proj.distance(&r[c].location, &r[q].location) >= threshold
                })
            })
        })
        .collect()
}
