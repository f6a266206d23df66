//! Exact discrete mobility and the brute-force condition checkers used to
//! validate SDS. Desk-scale only: cost grows polynomially with trajectory length.

use crate::error::{Error, Result};
use crate::geo::Projection;
use crate::trajectory::{Mobility, MobilityParams, Trajectory};

pub const DEFAULT_ORACLE_LIMIT: usize = 200;

/// Total Stay/Travel labeling of a trajectory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleLabels {
    pub labels: Vec<Mobility>,
}

fn check_limit(traj: &Trajectory, limit: usize) -> Result<()> {
    if traj.len() > limit {
        Err(Error::OracleLimit { len: traj.len(), limit })
    } else {
        Ok(())
    }
}

/// For each start index, the furthest end index such that the window is
/// pairwise closer than `delta_s` (and, if `dense`, has every consecutive gap
/// `<= delta_t`). Windows only shrink their admissible set as they grow, so
/// each start extends until the first failure.
fn mark_windows(traj: &Trajectory, params: &MobilityParams, proj: &Projection, dense: bool) -> Vec<bool> {
    let recs = traj.records();
    let n = recs.len();
    let mut marked = vec![false; n];
    for p in 0..n {
        let mut q = p;
        while q + 1 < n {
            let next = &recs[q + 1];
            if dense && next.time - recs[q].time > params.delta_t {
                break;
            }
            let fits = (p..=q).all(|i| proj.distance(&recs[i].location, &next.location) < params.delta_s);
            if !fits {
                break;
            }
            q += 1;
        }
        if q > p && recs[q].time - recs[p].time >= params.delta_t {
            for m in &mut marked[p..=q] {
                *m = true;
            }
        }
    }
    marked
}

/// Exact discrete labels: Stay iff the record lies in a window `[p, q]`, `p < q`,
/// spanning at least `delta_t` with all pairwise distances below `delta_s`.
pub fn exact_label(traj: &Trajectory, params: &MobilityParams, proj: &Projection) -> Result<OracleLabels> {
    exact_label_with_limit(traj, params, proj, DEFAULT_ORACLE_LIMIT)
}

pub fn exact_label_with_limit(
    traj: &Trajectory,
    params: &MobilityParams,
    proj: &Projection,
    limit: usize,
) -> Result<OracleLabels> {
    check_limit(traj, limit)?;
    let labels = mark_windows(traj, params, proj, false)
        .into_iter()
        .map(|s| if s { Mobility::Stay } else { Mobility::Travel })
        .collect();
    Ok(OracleLabels { labels })
}

/// Membership in some dense stay segment: a stay window whose consecutive gaps
/// are all `<= delta_t`.
pub fn dense_stay_membership(traj: &Trajectory, params: &MobilityParams, proj: &Projection) -> Result<Vec<bool>> {
    dense_stay_membership_with_limit(traj, params, proj, DEFAULT_ORACLE_LIMIT)
}

pub fn dense_stay_membership_with_limit(
    traj: &Trajectory,
    params: &MobilityParams,
    proj: &Projection,
    limit: usize,
) -> Result<Vec<bool>> {
    check_limit(traj, limit)?;
    Ok(mark_windows(traj, params, proj, true))
}

/// Whether some `p < i < q` has both `p` and `q` at least `spatial` meters from
/// `i` with `t_q - t_p <= delta_t`. Index `i` is zero-based.
pub fn travel_condition(
    traj: &Trajectory,
    i: usize,
    spatial: f64,
    delta_t: i64,
    proj: &Projection,
) -> Result<bool> {
    let recs = traj.records();
    if i >= recs.len() {
        return Err(Error::IndexOutOfRange { index: i, len: recs.len() });
    }
    let here = &recs[i].location;
    for p in 0..i {
        if proj.distance(here, &recs[p].location) < spatial {
            continue;
        }
        for q in i + 1..recs.len() {
            if recs[q].time - recs[p].time <= delta_t && proj.distance(here, &recs[q].location) >= spatial {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::fixtures::{line_minutes, proj};
    use Mobility::{Stay as S, Travel as T};

    #[test]
    fn two_colocated_records_half_an_hour_apart() {
        let t = line_minutes(&[(0, 0.0), (30, 10.0)]);
        let l = exact_label(&t, &MobilityParams::default(), &proj()).unwrap();
        assert_eq!(l.labels, vec![S, S]);
    }

    #[test]
    fn single_record_is_travel() {
        let t = line_minutes(&[(0, 0.0)]);
        let l = exact_label(&t, &MobilityParams::default(), &proj()).unwrap();
        assert_eq!(l.labels, vec![T]);
    }

    #[test]
    fn five_record_example() {
        let t = line_minutes(&[(0, 0.0), (10, 40.0), (25, 90.0), (40, 60.0), (50, 1000.0)]);
        let l = exact_label(&t, &MobilityParams::default(), &proj()).unwrap();
        assert_eq!(l.labels, vec![S, S, S, S, T]);
    }

    #[test]
    fn limit_is_enforced() {
        let pts: Vec<_> = (0..5).map(|m| (m, 0.0)).collect();
        let t = line_minutes(&pts);
        let err = exact_label_with_limit(&t, &MobilityParams::default(), &proj(), 4).unwrap_err();
        assert_eq!(err, Error::OracleLimit { len: 5, limit: 4 });
        assert!(dense_stay_membership_with_limit(&t, &MobilityParams::default(), &proj(), 4).is_err());
    }

    #[test]
    fn dense_membership_examples() {
        let p = MobilityParams::default();
        let t = line_minutes(&[(0, 0.0), (10, 0.0), (20, 0.0), (40, 0.0)]);
        assert_eq!(dense_stay_membership(&t, &p, &proj()).unwrap(), vec![true; 4]);
        let t = line_minutes(&[(0, 0.0), (40, 0.0)]);
        assert_eq!(dense_stay_membership(&t, &p, &proj()).unwrap(), vec![false; 2]);
        let t = line_minutes(&[(0, 0.0)]);
        assert_eq!(dense_stay_membership(&t, &p, &proj()).unwrap(), vec![false]);
    }

    #[test]
    fn travel_condition_examples() {
        let t = line_minutes(&[(0, 0.0), (10, 1000.0), (20, 2000.0)]);
        let pr = proj();
        assert!(travel_condition(&t, 1, 800.0, 1800, &pr).unwrap());
        assert!(travel_condition(&t, 1, 400.0, 1800, &pr).unwrap());
        assert!(!travel_condition(&t, 0, 800.0, 1800, &pr).unwrap());
        assert!(!travel_condition(&t, 2, 800.0, 1800, &pr).unwrap());
        assert!(travel_condition(&t, 3, 800.0, 1800, &pr).is_err());
    }
}
