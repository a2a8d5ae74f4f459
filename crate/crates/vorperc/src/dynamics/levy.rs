//! Planar Lévy movers.
//!
//! The isotropic α-stable mover is Brownian motion time-changed by an
//! independent (α/2)-stable subordinator: `X_t = √S_t · G` with `G` a standard
//! planar Gaussian and `E[exp(−λ S_t)] = exp(−t λ^{α/2})`. Hence
//! `E[exp(i⟨ξ, X_t⟩)] = exp(−t (|ξ|²/2)^{α/2})`, `X_t = t^{1/α} X_1` in law, and
//! `α = 2` is Brownian motion with variance `t` per axis.

use std::f64::consts::{PI, TAU};

use rand::Rng as _;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use super::DynamicsError;
use crate::estimators::{par_map, wls_line};
use crate::geometry::Pt;
use crate::rng::{self, Rng};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MoverKind {
    /// Never moves.
    Zero,
    /// Variance `t` per axis.
    Brownian,
    IsotropicStable { alpha: f64 },
    /// Jumps at `rate`, uniform direction, Pareto length `P[ℓ > x] = x^{−α}` for `x ≥ 1`.
    CompoundPoisson { alpha: f64, rate: f64 },
}

impl MoverKind {
    pub fn validate(&self) -> Result<(), DynamicsError> {
        match *self {
            MoverKind::IsotropicStable { alpha } | MoverKind::CompoundPoisson { alpha, .. }
                if !(alpha > 0.0 && alpha <= 2.0) =>
            {
                Err(DynamicsError::Parameter("alpha must lie in (0,2]"))
            }
            MoverKind::CompoundPoisson { rate, .. } if !(rate > 0.0 && rate.is_finite()) => {
                Err(DynamicsError::Parameter("jump rate must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Exponent of the polynomial tail bound `P[|X_t| ≥ L] ≥ c t L^{−α}`.
    pub fn tail_index(&self) -> Option<f64> {
        match *self {
            MoverKind::Zero => None,
            MoverKind::Brownian => Some(2.0),
            MoverKind::IsotropicStable { alpha } | MoverKind::CompoundPoisson { alpha, .. } => Some(alpha),
        }
    }

    pub fn increment(&self, t: f64, rng: &mut Rng) -> Pt {
        match *self {
            MoverKind::Zero => [0.0, 0.0],
            MoverKind::Brownian => gaussian(t.sqrt(), rng),
            MoverKind::IsotropicStable { alpha } => stable_increment(alpha, t, rng),
            MoverKind::CompoundPoisson { alpha, rate } => {
                let n = if rate * t > 0.0 { Poisson::new(rate * t).unwrap().sample(rng) as u64 } else { 0 };
                let mut x = [0.0, 0.0];
                for _ in 0..n {
                    let u: f64 = 1.0 - rng.random::<f64>();
                    let len = u.powf(-1.0 / alpha);
                    let th = TAU * rng.random::<f64>();
                    x[0] += len * th.cos();
                    x[1] += len * th.sin();
                }
                x
            }
        }
    }
}

fn gaussian(scale: f64, rng: &mut Rng) -> Pt {
    let gx: f64 = StandardNormal.sample(rng);
    let gy: f64 = StandardNormal.sample(rng);
    [scale * gx, scale * gy]
}

/// Positive `a`-stable variable with `E[exp(−λ S)] = exp(−λ^a)`, `a ∈ (0,1]`,
/// by Kanter's form of the Chambers–Mallows–Stuck method.
pub fn positive_stable(a: f64, rng: &mut Rng) -> f64 {
    if a >= 1.0 {
        return 1.0;
    }
    let u: f64 = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break u;
        }
    };
    let e: f64 = Exp1.sample(rng);
    let ln_s = (a * PI * u).sin().ln() + (1.0 - a) / a * (((1.0 - a) * PI * u).sin().ln() - e.ln())
        - (PI * u).sin().ln() / a;
    ln_s.exp()
}

pub fn stable_increment(alpha: f64, t: f64, rng: &mut Rng) -> Pt {
    if alpha >= 2.0 {
        return gaussian(t.sqrt(), rng);
    }
    let s = positive_stable(alpha / 2.0, rng);
    gaussian(t.powf(1.0 / alpha) * s.sqrt(), rng)
}

pub fn sample_stable_increment(alpha: f64, t: f64, seed: u64) -> Result<Pt, DynamicsError> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(DynamicsError::Parameter("alpha must lie in (0,2]"));
    }
    if !(t > 0.0) {
        return Err(DynamicsError::Parameter("time must be positive"));
    }
    Ok(stable_increment(alpha, t, &mut rng::stream(seed, rng::tag::LEVY, 0)))
}

const CHUNK: usize = 1 << 16;

/// `n` draws of `|X_t|`, in a fixed order independent of the thread count.
pub fn increment_norms(mover: MoverKind, t: f64, n: usize, seed: u64) -> Vec<f64> {
    let chunks = par_map(n.div_ceil(CHUNK), |c| {
        let mut r = rng::stream(seed, rng::tag::LEVY, c as u64);
        let len = CHUNK.min(n - c * CHUNK);
        (0..len).map(|_| { let x = mover.increment(t, &mut r); x[0].hypot(x[1]) }).collect::<Vec<_>>()
    });
    chunks.concat()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailCell {
    pub t: f64,
    pub l: f64,
    pub hits: u64,
    pub p_hat: f64,
    pub stderr: f64,
    /// `P̂ L^α / t`.
    pub ratio: f64,
    /// The same with `P̂` lowered by three standard errors.
    pub ratio_lo: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub mover: MoverKind,
    pub alpha: f64,
    pub draws: usize,
    pub cells: Vec<TailCell>,
    /// Weighted fit of `log(P̂/t)` against `log L`.
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    /// Smallest `ratio_lo` over the grid; the empirical constant `c`.
    pub c_hat: f64,
    /// Every grid cell supports `P[|X_t| ≥ L] ≥ c t / L^α` with `c > 0` at three standard errors.
    pub holds: bool,
}

pub fn tail_check(mover: MoverKind, ts: &[f64], ls: &[f64], n: usize, seed: u64) -> Result<TailReport, DynamicsError> {
    mover.validate()?;
    let alpha = mover.tail_index().ok_or(DynamicsError::Parameter("tail check needs a moving mover"))?;
    if ts.is_empty() || ls.is_empty() || n == 0 {
        return Err(DynamicsError::Parameter("empty tail grid"));
    }
    let mut cells = Vec::new();
    for (k, &t) in ts.iter().enumerate() {
        let norms = increment_norms(mover, t, n, rng::derive_seed(seed, &[k as u64]));
        for &l in ls {
            let hits = norms.iter().filter(|&&x| x >= l).count() as u64;
            let p = hits as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            let scale = l.powf(alpha) / t;
            cells.push(TailCell { t, l, hits, p_hat: p, stderr: se, ratio: p * scale, ratio_lo: (p - 3.0 * se) * scale });
        }
    }
    let used: Vec<&TailCell> = cells.iter().filter(|c| c.hits > 0).collect();
    let (slope, intercept, slope_stderr) = if used.len() >= 2 {
        let x: Vec<f64> = used.iter().map(|c| c.l.ln()).collect();
        let y: Vec<f64> = used.iter().map(|c| (c.p_hat / c.t).ln()).collect();
        let w: Vec<f64> = used.iter().map(|c| c.hits as f64).collect();
        let f = wls_line(&x, &y, &w);
        (f.slope, f.intercept, f.slope_stderr)
    } else {
        (f64::NAN, f64::NAN, f64::NAN)
    };
    let c_hat = cells.iter().map(|c| c.ratio_lo).fold(f64::INFINITY, f64::min);
    Ok(TailReport { mover, alpha, draws: n, cells, slope, intercept, slope_stderr, c_hat, holds: c_hat > 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_sd(x: &[f64]) -> (f64, f64) {
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let v = x.iter().map(|a| (a - m) * (a - m)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    #[test]
    fn subordinator_laplace_transform() {
        let mut r = rng::stream(1, rng::tag::LEVY, 0);
        for a in [0.25, 0.5, 0.75] {
            for lam in [0.5, 1.0, 3.0] {
                let x: Vec<f64> = (0..200_000).map(|_| (-lam * positive_stable(a, &mut r)).exp()).collect();
                let (m, se) = mean_sd(&x);
                let want = (-f64::powf(lam, a)).exp();
                assert!((m - want).abs() < 4.0 * se, "a={a} λ={lam}: {m} vs {want}");
            }
        }
    }

    #[test]
    fn brownian_second_moment() {
        let n = increment_norms(MoverKind::IsotropicStable { alpha: 2.0 }, 1.0, 100_000, 3);
        let sq: Vec<f64> = n.iter().map(|x| x * x).collect();
        let (m, se) = mean_sd(&sq);
        assert!((m - 2.0).abs() < 3.0 * se);
        let b = increment_norms(MoverKind::Brownian, 0.3, 100_000, 4);
        let (m, se) = mean_sd(&b.iter().map(|x| x * x).collect::<Vec<_>>());
        assert!((m - 0.6).abs() < 3.0 * se);
    }

    #[test]
    fn characteristic_function() {
        // E cos(ξ·X_1) = exp(−(|ξ|²/2)^{α/2}).
        let mut r = rng::stream(5, rng::tag::LEVY, 0);
        for alpha in [0.5, 1.0, 1.5] {
            let xi = 0.8;
            let v: Vec<f64> = (0..200_000).map(|_| (xi * stable_increment(alpha, 1.0, &mut r)[0]).cos()).collect();
            let (m, se) = mean_sd(&v);
            let want = (-(xi * xi / 2.0f64).powf(alpha / 2.0)).exp();
            assert!((m - want).abs() < 4.0 * se, "α={alpha}: {m} vs {want}");
        }
    }

    #[test]
    fn self_similarity_quantiles() {
        let n = 40_000;
        for alpha in [0.5, 1.0, 1.5] {
            let sm = MoverKind::IsotropicStable { alpha };
            let t = 3.0;
            let mut a = increment_norms(sm, t, n, 10);
            let mut b: Vec<f64> = increment_norms(sm, 1.0, n, 11).iter().map(|x| x * t.powf(1.0 / alpha)).collect();
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            for q in [0.25, 0.5, 0.75] {
                // Distribution-free check: the fraction of `a` below the `q`-quantile
                // of `b` is `q` up to binomial noise of both samples.
                let x = b[(q * n as f64) as usize];
                let f = a.partition_point(|&v| v < x) as f64 / n as f64;
                let sd = (2.0 * q * (1.0 - q) / n as f64).sqrt();
                assert!((f - q).abs() < 3.0 * sd, "α={alpha} q={q}: {f}");
            }
        }
    }

    #[test]
    fn compound_poisson_single_jump_bound() {
        let (alpha, rate) = (1.0, 1.0);
        let rep = tail_check(MoverKind::CompoundPoisson { alpha, rate }, &[0.5, 1.0], &[10.0, 30.0, 100.0], 400_000, 2)
            .unwrap();
        assert!(rep.holds);
        for c in &rep.cells {
            let bound = rate * c.t * (-rate * c.t).exp() * c.l.powf(-alpha);
            assert!(c.p_hat + 3.0 * c.stderr >= bound, "{c:?}");
        }
    }

    #[test]
    fn gaussian_tails_fail_the_bound() {
        let rep = tail_check(MoverKind::Brownian, &[1.0], &[10.0, 100.0], 100_000, 1).unwrap();
        assert!(!rep.holds);
        assert!(tail_check(MoverKind::Zero, &[1.0], &[1.0], 10, 1).is_err());
        assert!(MoverKind::IsotropicStable { alpha: 2.5 }.validate().is_err());
        assert!(sample_stable_increment(0.0, 1.0, 0).is_err());
    }
}
