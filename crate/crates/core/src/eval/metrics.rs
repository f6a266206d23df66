//! Confusion counts and the stay/travel precision, recall, accuracy and F1 family.

use crate::error::{Error, Result};
use crate::trajectory::{Mobility, MobilityLabel};

/// Outcome counts. `us`/`ut` are abstentions on true stays/travels; they are
/// excluded from `evaluated` but count against recall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub ts: u64,
    pub fs: u64,
    pub tv: u64,
    pub fv: u64,
    pub us: u64,
    pub ut: u64,
}

impl ConfusionCounts {
    pub fn evaluated(&self) -> u64 {
        self.ts + self.fs + self.tv + self.fv
    }

    pub fn record(&mut self, predicted: MobilityLabel, truth: Mobility) {
        use Mobility as M;
        use MobilityLabel as P;
        match (predicted, truth) {
            (P::Stay, M::Stay) => self.ts += 1,
            (P::Stay, M::Travel) => self.fs += 1,
            (P::Travel, M::Travel) => self.tv += 1,
            (P::Travel, M::Stay) => self.fv += 1,
            (P::Unlabeled, M::Stay) => self.us += 1,
            (P::Unlabeled, M::Travel) => self.ut += 1,
        }
    }

    pub fn merge(&mut self, other: &ConfusionCounts) {
        self.ts += other.ts;
        self.fs += other.fs;
        self.tv += other.tv;
        self.fv += other.fv;
        self.us += other.us;
        self.ut += other.ut;
    }

    /// Tally the records selected by `mask`.
    pub fn tally(predicted: &[MobilityLabel], truth: &[Mobility], mask: &[bool]) -> Result<Self> {
        if predicted.len() != truth.len() {
            return Err(Error::LengthMismatch { left: predicted.len(), right: truth.len() });
        }
        if mask.len() != truth.len() {
            return Err(Error::LengthMismatch { left: mask.len(), right: truth.len() });
        }
        let mut c = Self::default();
        for ((&p, &t), _) in predicted.iter().zip(truth).zip(mask).filter(|(_, &m)| m) {
            c.record(p, t);
        }
        Ok(c)
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// `2tp / (2tp + fp + fn)`, undefined when all three are zero.
pub fn f1_score(tp: u64, fp: u64, fn_: u64) -> Option<f64> {
    ratio(2 * tp, 2 * tp + fp + fn_)
}

/// Harmonic mean of the per-class F1 scores; 0 when either is 0.
pub fn f1_acc(stay_f1: f64, travel_f1: f64) -> f64 {
    if stay_f1 + travel_f1 == 0.0 {
        0.0
    } else {
        2.0 * stay_f1 * travel_f1 / (stay_f1 + travel_f1)
    }
}

/// Metric values; `None` marks an empty denominator.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricsReport {
    pub sp: Option<f64>,
    pub sr: Option<f64>,
    pub vp: Option<f64>,
    pub vr: Option<f64>,
    pub acc: Option<f64>,
    pub f1_acc: Option<f64>,
}

impl MetricsReport {
    pub fn from_counts(c: &ConfusionCounts) -> Self {
        let stay_f1 = f1_score(c.ts, c.fs, c.fv + c.us);
        let travel_f1 = f1_score(c.tv, c.fv, c.fs + c.ut);
        Self {
            sp: ratio(c.ts, c.ts + c.fs),
            sr: ratio(c.ts, c.ts + c.fv + c.us),
            vp: ratio(c.tv, c.tv + c.fv),
            vr: ratio(c.tv, c.tv + c.fs + c.ut),
            acc: ratio(c.ts + c.tv, c.evaluated()),
            f1_acc: stay_f1.zip(travel_f1).map(|(s, v)| f1_acc(s, v)),
        }
    }
}

/// Metrics over the records selected by `mask`.
pub fn compute_metrics(predicted: &[MobilityLabel], truth: &[Mobility], mask: &[bool]) -> Result<MetricsReport> {
    Ok(MetricsReport::from_counts(&ConfusionCounts::tally(predicted, truth, mask)?))
}
