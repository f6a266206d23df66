//! Dataset sparsity profile: global sparsity and local coverage distributions,
//! and how length and SDS label shares vary with sparsity.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geo::Projection;
use crate::sds::{sds_label, SdsOptions};
use crate::trajectory::{global_sparsity, local_coverage, MobilityLabel, MobilityParams, Trajectory};

/// Histogram over log-spaced bins: bin `k`
/// covers `[10^(k/per_decade), 10^((k+1)/per_decade))`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogHistogram {
    pub per_decade: u32,
    /// `(bin index, count)`, ascending, non-empty bins only.
    pub bins: Vec<(i32, u64)>,
}

impl LogHistogram {
    pub fn new(per_decade: u32, values: impl IntoIterator<Item = f64>) -> Self {
        let mut counts = std::collections::BTreeMap::new();
        for v in values.into_iter().filter(|v| *v > 0.0 && v.is_finite()) {
            *counts.entry(Self::bin_of(per_decade, v)).or_insert(0u64) += 1;
        }
        Self { per_decade, bins: counts.into_iter().collect() }
    }

    pub fn bin_of(per_decade: u32, v: f64) -> i32 {
        (v.log10() * per_decade as f64).floor() as i32
    }

    pub fn bounds(&self, bin: i32) -> (f64, f64) {
        let d = self.per_decade as f64;
        (10f64.powf(bin as f64 / d), 10f64.powf((bin + 1) as f64 / d))
    }

    pub fn total(&self) -> u64 {
        self.bins.iter().map(|b| b.1).sum()
    }

    /// Least-squares slope of log density against log bin center, over bins
    /// lying entirely inside `[lo, hi]`. `None` with fewer than two such bins.
    pub fn slope(&self, lo: f64, hi: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .bins
            .iter()
            .filter_map(|&(b, n)| {
                let (a, z) = self.bounds(b);
                (a >= lo && z <= hi).then(|| ((a * z).sqrt().ln(), (n as f64 / (z - a)).ln()))
            })
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }
}

/// Equal-width histogram of values in `[0, 1]`; 1.0 falls in the last bin.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitHistogram {
    pub counts: Vec<u64>,
}

impl UnitHistogram {
    pub fn new(bins: usize, values: impl IntoIterator<Item = f64>) -> Self {
        let mut counts = vec![0; bins];
        for v in values {
            let b = ((v.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1);
            counts[b] += 1;
        }
        Self { counts }
    }

    pub fn bounds(&self, bin: usize) -> (f64, f64) {
        let n = self.counts.len() as f64;
        (bin as f64 / n, (bin + 1) as f64 / n)
    }
}

/// Per global-sparsity bin: trajectory count, mean length and SDS label shares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SparsityBinRow {
    pub bin: i32,
    pub trajectories: u64,
    pub records: u64,
    pub stay: u64,
    pub travel: u64,
    pub unlabeled: u64,
}

impl SparsityBinRow {
    pub fn mean_length(&self) -> f64 {
        self.records as f64 / self.trajectories as f64
    }

    pub fn share(&self, n: u64) -> f64 {
        n as f64 / self.records as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsityReport {
    pub global_sparsity: LogHistogram,
    /// Trajectories with a single record, which have no global sparsity.
    pub singletons: u64,
    pub coverage: Vec<(i64, UnitHistogram)>,
    pub by_sparsity: Vec<SparsityBinRow>,
}

pub const SPARSITY_BINS_PER_DECADE: u32 = 4;
pub const COVERAGE_BINS: usize = 10;

/// Profile `dataset` under each `delta_t` in `coverage_delta_ts`; label shares use `params`.
pub fn sparsity_report(
    dataset: &[Trajectory],
    coverage_delta_ts: &[i64],
    params: &MobilityParams,
    proj: &Projection,
    opts: SdsOptions,
) -> Result<SparsityReport> {
    if dataset.is_empty() {
        return Err(Error::EmptyInput("dataset"));
    }
    let xi: Vec<Option<f64>> = dataset.iter().map(|t| global_sparsity(t).ok()).collect();
    let global = LogHistogram::new(SPARSITY_BINS_PER_DECADE, xi.iter().flatten().copied());
    let coverage = coverage_delta_ts
        .iter()
        .map(|&dt| (dt, UnitHistogram::new(COVERAGE_BINS, dataset.iter().map(|t| local_coverage(t, dt)))))
        .collect();

    let labels: Vec<Vec<MobilityLabel>> = dataset.par_iter().map(|t| sds_label(t, params, proj, opts).labels).collect();
    let mut rows: std::collections::BTreeMap<i32, SparsityBinRow> = Default::default();
    for (x, ls) in xi.iter().zip(&labels) {
        let Some(x) = x.filter(|v| *v > 0.0) else { continue };
        let bin = LogHistogram::bin_of(SPARSITY_BINS_PER_DECADE, x);
        let row = rows.entry(bin).or_insert(SparsityBinRow { bin, trajectories: 0, records: 0, stay: 0, travel: 0, unlabeled: 0 });
        row.trajectories += 1;
        row.records += ls.len() as u64;
        for l in ls {
            match l {
                MobilityLabel::Stay => row.stay += 1,
                MobilityLabel::Travel => row.travel += 1,
                MobilityLabel::Unlabeled => row.unlabeled += 1,
            }
        }
    }
    Ok(SparsityReport {
        global_sparsity: global,
        singletons: xi.iter().filter(|x| x.is_none()).count() as u64,
        coverage,
        by_sparsity: rows.into_values().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::fixtures::{line_minutes, proj};

    #[test]
    fn single_trajectory() {
        let t = line_minutes(&[(0, 0.0), (10, 10.0), (20, 0.0), (40, 5.0)]);
        let r = sparsity_report(&[t], &[1800], &MobilityParams::default(), &proj(), SdsOptions::default()).unwrap();
        assert_eq!(r.global_sparsity.bins.len(), 1);
        assert_eq!(r.global_sparsity.total(), 1);
        assert_eq!(r.by_sparsity.len(), 1);
        assert_eq!(r.by_sparsity[0].records, 4);
        assert_eq!(r.coverage[0].1.counts.iter().sum::<u64>(), 1);
    }

    #[test]
    fn uniform_gaps_have_full_coverage() {
        let pts: Vec<(i64, f64)> = (0..50).map(|k| (10 * k, (k * 997 % 3000) as f64)).collect();
        let t = line_minutes(&pts);
        let r = sparsity_report(&[t], &[1800], &MobilityParams::default(), &proj(), SdsOptions::default()).unwrap();
        let counts = &r.coverage[0].1.counts;
        assert_eq!(counts[COVERAGE_BINS - 1], 1);
        assert_eq!(counts.iter().sum::<u64>(), 1);
    }

    #[test]
    fn empty_dataset() {
        assert!(sparsity_report(&[], &[1800], &MobilityParams::default(), &proj(), SdsOptions::default()).is_err());
    }

    #[test]
    fn slope_of_exact_power_density() {
        // Counts proportional to integral of x^-2 over each bin.
        let h = LogHistogram { per_decade: 4, bins: (4..16).map(|b| {
            let (a, z) = (10f64.powf(b as f64 / 4.0), 10f64.powf((b + 1) as f64 / 4.0));
            (b, ((1.0 / a - 1.0 / z) * 1e9) as u64)
        }).collect() };
        let s = h.slope(1.0, 1e6).unwrap();
        assert!((s + 2.0).abs() < 0.05, "{s}");
    }
}
