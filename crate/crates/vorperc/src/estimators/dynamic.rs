//! Estimators driven by trajectories.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{bootstrap_ci, estimate_arm, mean_stderr, replica_config, EstimatorError, McEstimate, Replicas};
use crate::dynamics::{indicator_path, integral_x_r, simulate, DynamicsError, DynamicsKind, MoverKind};
use crate::events::{random_colors, AnnulusSpec, ArmSpec, EventError, EventSpec, Sector};
use crate::geometry::Window;
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicsParams {
    pub kind: DynamicsKind,
    /// Ignored by frozen dynamics.
    pub mover: MoverKind,
    /// Motion grid step; ignored by frozen dynamics.
    pub dt: f64,
}

impl Default for DynamicsParams {
    fn default() -> Self {
        DynamicsParams { kind: DynamicsKind::Frozen, mover: MoverKind::IsotropicStable { alpha: 1.0 }, dt: 0.01 }
    }
}

/// `Err(None)` for a discarded replica, `Err(Some(e))` for a real error.
fn classify<T>(r: Result<T, DynamicsError>) -> Result<Option<T>, EstimatorError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(DynamicsError::Event(EventError::Uncertified)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseRow {
    pub t: f64,
    pub cov: f64,
    pub stderr: f64,
    /// `cov / Var(g_n)`.
    pub corr: f64,
    /// `t n² α̂_4(n)`.
    pub regime: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseCurve {
    pub n: f64,
    pub dynamics: DynamicsParams,
    /// Sample variance of `g_n(ω(0))`.
    pub variance: f64,
    /// `Var(P^η[g_n])` from a second independent coloring of each point set.
    pub quenched_var: McEstimate,
    /// `α̂_4(1, n)` from independent configurations.
    pub alpha4: McEstimate,
    pub rows: Vec<NoiseRow>,
    pub n_effective: u64,
    pub n_discarded: u64,
}

/// `Cov(g_n(ω(0)), g_n(ω(t)))` for `g_n` the black left-right crossing of `[0,n]²`.
pub fn estimate_noise_covariance(
    dynamics: DynamicsParams,
    n: f64,
    ts: &[f64],
    replicas: usize,
    alpha4_replicas: Replicas,
    seed: u64,
) -> Result<NoiseCurve, EstimatorError> {
    if ts.is_empty() || ts.iter().any(|&t| !(t > 0.0)) {
        return Err(EstimatorError::Parameter("times must be positive".into()));
    }
    let rect = Window::new(0.0, n, 0.0, n).map_err(|e| EstimatorError::Parameter(e.to_string()))?;
    let spec = EventSpec::crossing(rect);
    let horizon = ts.iter().copied().fold(0.0, f64::max);
    let mut times = vec![0.0];
    times.extend_from_slice(ts);
    let s: Vec<Result<Option<(Vec<bool>, bool)>, EstimatorError>> = super::par_map(replicas, |i| {
        let cfg = replica_config(&rect, seed, i as u64);
        let rs = rng::replica_seed(seed, i as u64);
        let run = || -> Result<(Vec<bool>, bool), DynamicsError> {
            let traj = simulate(dynamics.kind, &cfg, horizon, dynamics.dt.min(horizon), dynamics.mover, rs)?;
            let path = indicator_path(&traj, &spec, &times)?;
            let alt = random_colors(cfg.colors.len(), 0.5, &mut rng::stream(rs, rng::tag::COLORS_ALT, 0));
            let g2 = spec.compile(&cfg.tess)?.eval(&alt);
            Ok((path, g2))
        };
        classify(run())
    });
    let s = s.into_iter().collect::<Result<Vec<_>, _>>()?;
    let kept: Vec<&(Vec<bool>, bool)> = s.iter().flatten().collect();
    let discarded = (s.len() - kept.len()) as u64;
    let m = kept.len() as f64;
    if kept.len() < 2 {
        return Err(EstimatorError::Parameter("too few certified replicas".into()));
    }
    let f = |b: bool| b as u8 as f64;
    let mean_at = |k: usize| kept.iter().map(|v| f(v.0[k])).sum::<f64>() / m;
    let m0 = mean_at(0);
    let cov_at = |k: usize| {
        let mk = mean_at(k);
        let d: Vec<f64> = kept.iter().map(|v| (f(v.0[0]) - m0) * (f(v.0[k]) - mk)).collect();
        let c = d.iter().sum::<f64>() / (m - 1.0);
        (c, mean_stderr(&d).1)
    };
    let variance = cov_at(0).0;
    let a4_seed = rng::derive_seed(seed, &[0x6134]);
    let alpha4 = estimate_arm(AnnulusSpec::new(1.0, n), ArmSpec::new(4, Sector::FullPlane), alpha4_replicas, a4_seed)?;
    let rows = ts
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let (cov, stderr) = cov_at(k + 1);
            NoiseRow { t, cov, stderr, corr: cov / variance, regime: t * n * n * alpha4.value }
        })
        .collect();
    let d: Vec<f64> = kept.iter().map(|v| (f(v.0[0]) - m0) * (f(v.1) - m0)).collect();
    let (qv, qse) = mean_stderr(&d);
    let quenched_var = McEstimate::new(qv, qse, kept.len() as u64, discarded, seed, json!({ "n": n }));
    Ok(NoiseCurve {
        n,
        dynamics,
        variance,
        quenched_var,
        alpha4,
        rows,
        n_effective: kept.len() as u64,
        n_discarded: discarded,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XrRow {
    pub big_r: f64,
    pub mean: McEstimate,
    pub second: McEstimate,
    /// `E[X_R²] / E[X_R]²`.
    pub ratio: f64,
    pub ratio_ci: (f64, f64),
    /// `α̂_1(R)` from independent static configurations.
    pub alpha1: McEstimate,
}

pub fn estimate_xr_moments(
    dynamics: DynamicsParams,
    rs: &[f64],
    replicas: usize,
    alpha1_replicas: usize,
    resolution: usize,
    seed: u64,
) -> Result<Vec<XrRow>, EstimatorError> {
    let mut out = Vec::new();
    for &big_r in rs {
        if !(big_r > 1.0) {
            return Err(EstimatorError::Parameter("R must exceed 1".into()));
        }
        let rseed = rng::derive_seed(seed, &[big_r.to_bits()]);
        let roi = Window::square([0.0, 0.0], big_r);
        let s: Vec<Result<Option<f64>, EstimatorError>> = super::par_map(replicas, |i| {
            let cfg = replica_config(&roi, rseed, i as u64);
            let rs = rng::replica_seed(rseed, i as u64);
            classify(
                simulate(dynamics.kind, &cfg, 1.0, dynamics.dt.min(1.0), dynamics.mover, rs)
                    .and_then(|traj| integral_x_r(&traj, big_r, resolution)),
            )
        });
        let s = s.into_iter().collect::<Result<Vec<_>, _>>()?;
        let x: Vec<f64> = s.iter().flatten().copied().collect();
        let params = json!({ "R": big_r, "dynamics": dynamics, "resolution": resolution });
        let mean = McEstimate::from_samples(&s, rseed, params.clone());
        let sq: Vec<Option<f64>> = s.iter().map(|o| o.map(|v| v * v)).collect();
        let second = McEstimate::from_samples(&sq, rseed, params);
        let stat = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            let m2 = v.iter().map(|a| a * a).sum::<f64>() / v.len() as f64;
            m2 / (m * m)
        };
        let ratio = stat(&x);
        let ratio_ci = bootstrap_ci(&x, 400, rseed, stat);
        let alpha1 = estimate_arm(
            AnnulusSpec::new(1.0, big_r),
            ArmSpec::new(1, Sector::FullPlane),
            Replicas::fixed(alpha1_replicas),
            rng::derive_seed(rseed, &[1]),
        )?;
        out.push(XrRow { big_r, mean, second, ratio, ratio_ci, alpha1 });
    }
    Ok(out)
}
