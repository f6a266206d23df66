//! Truncated power-law variates and the exponent estimator used for calibration.

use rand::Rng;

use crate::error::{Error, Result};

/// Density proportional to `x^-exponent` on `[xmin, xmax]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedPowerLaw {
    pub exponent: f64,
    pub xmin: f64,
    pub xmax: f64,
}

impl TruncatedPowerLaw {
    pub fn new(exponent: f64, xmin: f64, xmax: f64) -> Result<Self> {
        let law = Self { exponent, xmin, xmax };
        law.validate()?;
        Ok(law)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.exponent.is_finite() && self.exponent > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "power-law exponent must be > 1, got {}",
                self.exponent
            )));
        }
        if !(self.xmin.is_finite() && self.xmax.is_finite() && self.xmin > 0.0 && self.xmax > self.xmin) {
            return Err(Error::InvalidParameter(format!(
                "power-law bounds need 0 < xmin < xmax, got [{}, {}]",
                self.xmin, self.xmax
            )));
        }
        Ok(())
    }

    /// Inverse CDF at `u` in `[0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return self.xmin;
        }
        if u >= 1.0 {
            return self.xmax;
        }
        let e = 1.0 - self.exponent;
        let lo = self.xmin.powf(e);
        let hi = self.xmax.powf(e);
        (lo + u * (hi - lo)).powf(1.0 / e).clamp(self.xmin, self.xmax)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

/// Inverse-CDF draw from a truncated power law for a given uniform `u`.
pub fn sample_truncated_power_law(exponent: f64, xmin: f64, xmax: f64, u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidParameter(format!("uniform draw must be in [0, 1], got {u}")));
    }
    Ok(TruncatedPowerLaw::new(exponent, xmin, xmax)?.quantile(u))
}

/// Maximum-likelihood exponent of an (untruncated) power law above `xmin`:
/// `1 + n / sum(ln(x / xmin))`.
pub fn fit_power_law_exponent(samples: &[f64], xmin: f64) -> Result<f64> {
    if !(xmin.is_finite() && xmin > 0.0) {
        return Err(Error::InvalidParameter(format!("xmin must be > 0, got {xmin}")));
    }
    if samples.len() < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    if let Some(x) = samples.iter().find(|&&x| x.is_nan() || x < xmin) {
        return Err(Error::InvalidParameter(format!("sample {x} below xmin {xmin}")));
    }
    let log_sum: f64 = samples.iter().map(|&x| (x / xmin).ln()).sum();
    if log_sum <= 0.0 {
        return Err(Error::DivergentFit);
    }
    Ok(1.0 + samples.len() as f64 / log_sum)
}
