//! Two-state (Stay, Travel) hidden Markov model over discretized offsets
//! between consecutive records, decoded with Viterbi in log space.

use crate::geo::Projection;
use crate::error::{Error, Result};
use crate::sds::LabeledTrajectory;
use crate::trajectory::{Mobility, MobilityLabel, Trajectory};

pub const STATES: usize = 2;

/// Bucket edges for the offset to the previous record. A distance `d` falls in
/// the bucket counting edges `<= d`; a gap `g` in the bucket counting edges `< g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationBuckets {
    pub distance_edges: Vec<f64>,
    pub gap_edges: Vec<i64>,
}

impl Default for ObservationBuckets {
    fn default() -> Self {
        Self { distance_edges: vec![100.0, 400.0, 800.0, 3200.0], gap_edges: vec![300, 1800] }
    }
}

impl ObservationBuckets {
    pub fn distance_buckets(&self) -> usize {
        self.distance_edges.len() + 1
    }

    pub fn gap_buckets(&self) -> usize {
        self.gap_edges.len() + 1
    }

    /// Symbol of the first record, which has no predecessor.
    pub fn start_symbol(&self) -> usize {
        self.distance_buckets() * self.gap_buckets()
    }

    pub fn symbols(&self) -> usize {
        self.start_symbol() + 1
    }

    pub fn symbol(&self, distance: f64, gap: i64) -> usize {
        let d = self.distance_edges.iter().filter(|&&e| e <= distance).count();
        let g = self.gap_edges.iter().filter(|&&e| e < gap).count();
        d * self.gap_buckets() + g
    }

    /// One symbol per record.
    pub fn encode(&self, traj: &Trajectory, proj: &Projection) -> Vec<usize> {
        let recs = traj.records();
        let mut out = Vec::with_capacity(recs.len());
        out.push(self.start_symbol());
        for w in recs.windows(2) {
            out.push(self.symbol(proj.distance(&w[0].location, &w[1].location), w[1].time - w[0].time));
        }
        out
    }
}

/// Probabilities of the model; each distribution sums to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct HmmModel {
    pub initial: [f64; STATES],
    pub transition: [[f64; STATES]; STATES],
    /// `emission[state][symbol]`.
    pub emission: [Vec<f64>; STATES],
    pub buckets: ObservationBuckets,
}

/// Log-probability tables for decoding.
#[derive(Debug, Clone, PartialEq)]
pub struct LogTables {
    pub initial: [f64; STATES],
    pub transition: [[f64; STATES]; STATES],
    pub emission: [Vec<f64>; STATES],
}

impl HmmModel {
    pub fn log_tables(&self) -> LogTables {
        LogTables {
            initial: self.initial.map(f64::ln),
            transition: self.transition.map(|row| row.map(f64::ln)),
            emission: [
                self.emission[0].iter().map(|p| p.ln()).collect(),
                self.emission[1].iter().map(|p| p.ln()).collect(),
            ],
        }
    }
}

fn normalize(counts: &[f64]) -> Vec<f64> {
    let total: f64 = counts.iter().sum();
    counts.iter().map(|c| c / total).collect()
}

/// Estimate the model from labeled trajectories with add-one smoothing.
/// Unlabeled positions emit nothing and break transition chains.
pub fn hmm_train(data: &[LabeledTrajectory<'_>], buckets: ObservationBuckets, proj: &Projection) -> Result<HmmModel> {
    if data.is_empty() {
        return Err(Error::EmptyInput("training set"));
    }
    let n = buckets.symbols();
    let mut init = [1.0; STATES];
    let mut trans = [[1.0; STATES]; STATES];
    let mut emit = [vec![1.0; n], vec![1.0; n]];
    for lt in data {
        if lt.trajectory.len() != lt.labels.len() {
            return Err(Error::LengthMismatch { left: lt.trajectory.len(), right: lt.labels.len() });
        }
        let obs = buckets.encode(lt.trajectory, proj);
        let states: Vec<Option<usize>> = lt.labels.iter().map(|l| l.mobility().map(Mobility::index)).collect();
        if let Some(first) = states.iter().flatten().next() {
            init[*first] += 1.0;
        }
        for (s, &o) in states.iter().zip(&obs) {
            if let Some(s) = s {
                emit[*s][o] += 1.0;
            }
        }
        for w in states.windows(2) {
            if let (Some(a), Some(b)) = (w[0], w[1]) {
                trans[a][b] += 1.0;
            }
        }
    }
    let init = normalize(&init);
    let rows: Vec<Vec<f64>> = trans.iter().map(|r| normalize(r)).collect();
    Ok(HmmModel {
        initial: [init[0], init[1]],
        transition: [[rows[0][0], rows[0][1]], [rows[1][0], rows[1][1]]],
        emission: [normalize(&emit[0]), normalize(&emit[1])],
        buckets,
    })
}

/// Most probable state sequence and its log-probability. Scores accumulate as
/// `(score + log transition) + log emission`; on equal scores the lower state
/// index (Stay) wins, both for predecessors and for the final state.
pub fn viterbi(tables: &LogTables, obs: &[usize]) -> Option<(Vec<usize>, f64)> {
    let (&first, rest) = obs.split_first()?;
    let mut score: [f64; STATES] = std::array::from_fn(|j| tables.initial[j] + tables.emission[j][first]);
    let mut back: Vec<[usize; STATES]> = Vec::with_capacity(rest.len());
    for &o in rest {
        let mut next = [f64::NEG_INFINITY; STATES];
        let mut from = [0; STATES];
        for j in 0..STATES {
            for (i, &prev) in score.iter().enumerate() {
                let s = (prev + tables.transition[i][j]) + tables.emission[j][o];
                if i == 0 || s > next[j] {
                    next[j] = s;
                    from[j] = i;
                }
            }
        }
        score = next;
        back.push(from);
    }
    let mut state = (1..STATES).fold(0, |best, j| if score[j] > score[best] { j } else { best });
    let best = score[state];
    let mut path = vec![state; obs.len()];
    for (t, from) in back.iter().enumerate().rev() {
        state = from[state];
        path[t] = state;
    }
    Some((path, best))
}

/// Decode a trajectory.
pub fn hmm_predict(model: &HmmModel, traj: &Trajectory, proj: &Projection) -> Vec<Mobility> {
    let obs = model.buckets.encode(traj, proj);
    viterbi(&model.log_tables(), &obs)
        .map(|(path, _)| path.into_iter().map(Mobility::from_index).collect())
        .unwrap_or_default()
}

/// Training labels for [`hmm_train`] from predicted mobility.
pub fn as_labels(ms: &[Mobility]) -> Vec<MobilityLabel> {
    ms.iter().map(|&m| m.into()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::fixtures::{line_minutes, proj};

    #[test]
    fn symbols() {
        let b = ObservationBuckets::default();
        assert_eq!(b.symbols(), 16);
        assert_eq!(b.start_symbol(), 15);
        assert_eq!(b.symbol(50.0, 300), 0);
        assert_eq!(b.symbol(100.0, 301), 4);
        assert_eq!(b.symbol(5000.0, 7200), 14);
    }

    fn uniform_tables(emit: [Vec<f64>; 2]) -> LogTables {
        LogTables { initial: [0.5f64.ln(); 2], transition: [[0.5f64.ln(); 2]; 2], emission: emit }
    }

    #[test]
    fn single_step_is_argmax_of_initial_times_emission() {
        let t = LogTables {
            initial: [0.3f64.ln(), 0.7f64.ln()],
            transition: [[0.5f64.ln(); 2]; 2],
            emission: [vec![0.9f64.ln(), 0.1f64.ln()], vec![0.2f64.ln(), 0.8f64.ln()]],
        };
        // 0.3·0.9 = 0.27 > 0.7·0.2 = 0.14
        assert_eq!(viterbi(&t, &[0]).unwrap().0, vec![0]);
        assert_eq!(viterbi(&t, &[1]).unwrap().0, vec![1]);
        assert!(viterbi(&t, &[]).is_none());
    }

    #[test]
    fn ties_prefer_stay() {
        let t = uniform_tables([vec![0.5f64.ln(); 2], vec![0.5f64.ln(); 2]]);
        assert_eq!(viterbi(&t, &[0, 1, 0]).unwrap().0, vec![0, 0, 0]);
    }

    #[test]
    fn deterministic_emissions_reproduce_training_labels() {
        // Stay records 10 m apart, travel records 2 km apart, 10 minute gaps.
        let mut pts = vec![];
        let mut x = 0.0;
        for k in 0..30 {
            let moving = (k / 5) % 2 == 1;
            x += if moving { 2000.0 } else { 10.0 };
            pts.push((10 * k as i64, x));
        }
        let traj = line_minutes(&pts);
        let truth: Vec<Mobility> = (0..30)
            .map(|k| if k > 0 && (k / 5) % 2 == 1 { Mobility::Travel } else { Mobility::Stay })
            .collect();
        let data = [LabeledTrajectory { trajectory: &traj, labels: as_labels(&truth) }];
        let model = hmm_train(&data, ObservationBuckets::default(), &proj()).unwrap();
        for row in model.transition {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        for e in &model.emission {
            assert!((e.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        assert_eq!(hmm_predict(&model, &traj, &proj()), truth);
    }

    #[test]
    fn empty_training_set() {
        assert!(hmm_train(&[], ObservationBuckets::default(), &proj()).is_err());
    }
}
