//! Point estimators of the population mean from a recruitment sample.
//!
//! All three are self-normalized weighted means with weight `D_i^-alpha` on
//! the reported degree `D_i`: `alpha = 0` is the plain mean, `alpha = 1` the
//! Volz-Heckathorn estimator, and intermediate exponents give the compromise
//! family.

use crate::error::{Error, Result};
use crate::rds::RdsSample;

pub const DEFAULT_ALPHAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSet {
    pub plain_mean: f64,
    pub vh: f64,
    /// `(alpha, estimate)` in the order the exponents were requested.
    pub compromise: Vec<(f64, f64)>,
}

#[inline]
fn degree_weight(degree: usize, alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else if alpha == 1.0 {
        1.0 / degree as f64
    } else {
        (degree as f64).powf(-alpha)
    }
}

fn weighted_mean(sample: &RdsSample, alpha: f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (i, r) in sample.records.iter().enumerate() {
        if r.reported_degree == 0 {
            return Err(Error::NonPositiveDegree(i));
        }
        let w = degree_weight(r.reported_degree, alpha);
        num += w * r.quantity;
        den += w;
    }
    Ok(num / den)
}

pub fn plain_mean(sample: &RdsSample) -> Result<f64> {
    weighted_mean(sample, 0.0)
}

/// Inverse reported-degree weighted mean.
pub fn vh_estimate(sample: &RdsSample) -> Result<f64> {
    weighted_mean(sample, 1.0)
}

/// Weighted mean with weights `D_i^-alpha`. Exponents outside `[0, 1]` are
/// computed but logged, since they no longer interpolate between the plain
/// mean and VH.
pub fn compromise_estimate(sample: &RdsSample, alpha: f64) -> Result<f64> {
    if !alpha.is_finite() {
        return Err(Error::Config(format!(
            "compromise exponent {alpha} is not finite"
        )));
    }
    if !(0.0..=1.0).contains(&alpha) {
        log::warn!("compromise exponent {alpha} lies outside [0, 1]");
    }
    weighted_mean(sample, alpha)
}

pub fn estimate_set(sample: &RdsSample, alphas: &[f64]) -> Result<EstimateSet> {
    Ok(EstimateSet {
        plain_mean: plain_mean(sample)?,
        vh: vh_estimate(sample)?,
        compromise: alphas
            .iter()
            .map(|&a| compromise_estimate(sample, a).map(|v| (a, v)))
            .collect::<Result<_>>()?,
    })
}
