//! Monte Carlo drivers.
//!
//! Replica `i` of an experiment with master seed `s` draws everything from
//! streams keyed by `rng::replica_seed(s, i)`, and results are reduced in
//! replica order, so every estimate is a function of `(params, seed)` alone.

mod arms;
mod dynamic;
mod pivotal;

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::DynamicsError;
use crate::events::{ColoredConfiguration, EventError};
use crate::geometry::{padded_window, sample_poisson, Tessellation, Window};
use crate::rng;

pub use arms::{
    crossing_duality, estimate_arm, estimate_arm_profile, estimate_coupled, estimate_coupled_fourarm,
    estimate_crossing, estimate_quenched_second_moment, qm_ratio, ArmCase, CoupledEstimates, DualityReport,
    FourArmVariant, QuenchedMoment, Resample,
};
pub use dynamic::{estimate_noise_covariance, estimate_xr_moments, DynamicsParams, NoiseCurve, NoiseRow, XrRow};
pub use pivotal::{box_pivotality, estimate_pivotal_sum, estimate_pivotal_sum_boxes, unit_boxes, PivotalSum};

/// Probability that a sampled window fails certification for its region.
pub const PAD_FAILURE: f64 = 1e-9;
/// Largest tolerated fraction of discarded replicas before a result is flagged.
pub const DISCARD_TOLERANCE: f64 = 1e-3;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EstimatorError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Event(#[from] EventError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n_effective: u64,
    pub n_discarded: u64,
    pub seed: u64,
    pub params: serde_json::Value,
    /// More than [`DISCARD_TOLERANCE`] of the replicas were discarded.
    pub flagged: bool,
}

impl McEstimate {
    /// Mean and standard error of the kept samples; `None` marks a discarded replica.
    pub fn from_samples(samples: &[Option<f64>], seed: u64, params: serde_json::Value) -> Self {
        let kept: Vec<f64> = samples.iter().flatten().copied().collect();
        let (value, stderr) = mean_stderr(&kept);
        Self::new(value, stderr, kept.len() as u64, (samples.len() - kept.len()) as u64, seed, params)
    }

    pub fn new(value: f64, stderr: f64, n: u64, discarded: u64, seed: u64, params: serde_json::Value) -> Self {
        let flagged = discarded as f64 > DISCARD_TOLERANCE * n as f64;
        McEstimate { value, stderr, n_effective: n, n_discarded: discarded, seed, params, flagged }
    }

    pub fn ci(&self, z: f64) -> (f64, f64) {
        (self.value - z * self.stderr, self.value + z * self.stderr)
    }
}

/// Sample mean and `sd/√n` (0 for fewer than two samples).
pub fn mean_stderr(x: &[f64]) -> (f64, f64) {
    let n = x.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let m = x.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (m, 0.0);
    }
    let v = x.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (n - 1) as f64;
    (m, (v / n as f64).sqrt())
}

/// `f(0), …, f(n−1)` evaluated in parallel, returned in index order.
pub fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

/// Replica budget: run `min` replicas, then keep doubling up to `max` until `done` holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replicas {
    pub min: usize,
    pub max: usize,
}

impl Replicas {
    pub fn fixed(n: usize) -> Self {
        Replicas { min: n, max: n }
    }
}

impl From<usize> for Replicas {
    fn from(n: usize) -> Self {
        Replicas::fixed(n)
    }
}

pub fn run_adaptive<T: Send>(
    plan: Replicas,
    f: impl Fn(u64) -> T + Sync + Send,
    done: impl Fn(&[T]) -> bool,
) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    let mut target = plan.min.max(1);
    loop {
        let start = out.len();
        out.extend(par_map(target - start, |i| f((start + i) as u64)));
        if target >= plan.max.max(plan.min) || done(&out) {
            return out;
        }
        target = (2 * target).min(plan.max);
    }
}

/// Stop rule for probabilities: relative standard error at most `rel`
/// (an all-zero sample never stops early).
pub fn relative_precision(hits: impl Iterator<Item = bool>, rel: f64) -> bool {
    let (mut n, mut k) = (0usize, 0usize);
    for h in hits {
        n += 1;
        k += h as usize;
    }
    if k == 0 {
        return false;
    }
    let p = k as f64 / n as f64;
    (p * (1.0 - p) / n as f64).sqrt() <= rel * p
}

/// Poisson configuration of replica `i` whose window certifies `roi` with
/// probability `1 − PAD_FAILURE`, with fair colors.
pub fn replica_config(roi: &Window, seed: u64, i: u64) -> ColoredConfiguration {
    let s = rng::replica_seed(seed, i);
    let ps = sample_poisson(padded_window(roi, 1.0, PAD_FAILURE), 1.0, s);
    let tess = Arc::new(Tessellation::build_for(ps, roi));
    ColoredConfiguration::sample(tess, 0.5, &mut rng::stream(s, rng::tag::COLORS, 0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

/// Weighted least squares line `y ≈ intercept + slope·x`, weights `w ∝ 1/Var(y)`.
pub fn wls_line(x: &[f64], y: &[f64], w: &[f64]) -> LineFit {
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(a, b)| b * (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).zip(w).map(|((a, c), b)| b * (a - mx) * (c - my)).sum();
    let slope = sxy / sxx;
    LineFit { slope, intercept: my - slope * mx, slope_stderr: (1.0 / sxx).sqrt() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub stderr: f64,
    /// One standard error either side.
    pub ci: (f64, f64),
    pub used: usize,
    pub dropped: usize,
}

/// Exponent `e` in `estimate ≈ C · ratio^e` from `(ratio, estimate, stderr)`
/// triples, by weighted least squares on the logs with weights
/// `(estimate/stderr)²`. Nonpositive estimates are dropped; if any kept
/// stderr is zero all weights are equal.
pub fn fit_power_law(pairs: &[(f64, f64, f64)]) -> Result<PowerLawFit, EstimatorError> {
    if pairs.len() < 3 {
        return Err(EstimatorError::Parameter("power-law fit needs at least 3 points".into()));
    }
    let kept: Vec<&(f64, f64, f64)> = pairs.iter().filter(|p| p.1 > 0.0 && p.0 > 0.0).collect();
    let dropped = pairs.len() - kept.len();
    if kept.len() < 2 {
        return Err(EstimatorError::Parameter("power-law fit needs 2 positive points".into()));
    }
    let x: Vec<f64> = kept.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = kept.iter().map(|p| p.1.ln()).collect();
    let exact = kept.iter().any(|p| !(p.2 > 0.0));
    let w: Vec<f64> = kept.iter().map(|p| if exact { 1.0 } else { (p.1 / p.2).powi(2) }).collect();
    let f = wls_line(&x, &y, &w);
    let se = if exact { 0.0 } else { f.slope_stderr };
    Ok(PowerLawFit { exponent: f.slope, stderr: se, ci: (f.slope - se, f.slope + se), used: kept.len(), dropped })
}

/// Bootstrap percentile interval `(2.5%, 97.5%)` of `stat`.
pub fn bootstrap_ci(x: &[f64], resamples: usize, seed: u64, stat: impl Fn(&[f64]) -> f64) -> (f64, f64) {
    use rand::Rng as _;
    if x.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mut r = rng::stream(seed, rng::tag::MISC, 0);
    let mut buf = vec![0.0; x.len()];
    let mut vals: Vec<f64> = (0..resamples)
        .map(|_| {
            for b in buf.iter_mut() {
                *b = x[r.random_range(0..x.len())];
            }
            stat(&buf)
        })
        .collect();
    vals.sort_by(f64::total_cmp);
    let q = |p: f64| vals[((p * resamples as f64) as usize).min(resamples - 1)];
    (q(0.025), q(0.975))
}
