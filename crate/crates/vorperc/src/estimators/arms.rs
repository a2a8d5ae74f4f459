//! Crossing, arm and coupled-coloring estimators.

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{relative_precision, replica_config, run_adaptive, EstimatorError, McEstimate, Replicas};
use crate::events::region::RegionGraph;
use crate::events::{
    random_colors, realizes, AnnulusSpec, ArmSpec, Color, Direction, EventError, EventSpec, HatVariant, Sector, WHITE,
};
use crate::geometry::{check_padding_valid, Window};
use crate::rng;

/// Black left-right crossing of `rect`.
pub fn estimate_crossing(rect: Window, replicas: usize, seed: u64) -> McEstimate {
    let spec = EventSpec::crossing(rect);
    let s: Vec<Option<f64>> = super::par_map(replicas, |i| {
        let cfg = replica_config(&rect, seed, i as u64);
        spec.compile(&cfg.tess).ok().map(|e| e.eval(&cfg.colors) as u8 as f64)
    });
    McEstimate::from_samples(&s, seed, json!({ "rect": rect }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub estimate: McEstimate,
    /// Samples where a black left-right and a white top-bottom crossing both or neither occur.
    pub violations: u64,
}

/// Black left-right crossings of `[0,n]²` together with the per-sample
/// duality check against white top-bottom crossings.
pub fn crossing_duality(n: f64, replicas: usize, seed: u64) -> DualityReport {
    let rect = Window::new(0.0, n, 0.0, n).unwrap();
    let black = EventSpec::crossing(rect);
    let white = EventSpec::Crossing { rect, dir: Direction::TopBottom, color: WHITE };
    let s: Vec<Option<(bool, bool)>> = super::par_map(replicas, |i| {
        let cfg = replica_config(&rect, seed, i as u64);
        let b = black.compile(&cfg.tess).ok()?;
        let w = white.compile_unchecked(&cfg.tess).ok()?;
        Some((b.eval(&cfg.colors), w.eval(&cfg.colors)))
    });
    let violations = s.iter().flatten().filter(|(b, w)| b == w).count() as u64;
    let vals: Vec<Option<f64>> = s.iter().map(|o| o.map(|(b, _)| b as u8 as f64)).collect();
    DualityReport { estimate: McEstimate::from_samples(&vals, seed, json!({ "n": n })), violations }
}

/// One arm event of a profile: `j` arms with the given sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArmCase {
    pub j: usize,
    pub sector: Sector,
}

pub fn estimate_arm(ann: AnnulusSpec, arms: ArmSpec, replicas: Replicas, seed: u64) -> Result<McEstimate, EstimatorError> {
    let spec = EventSpec::Arm { ann, arms: arms.clone() };
    let roi = ann.outer_box();
    let s = run_adaptive(
        replicas,
        |i| {
            let cfg = replica_config(&roi, seed, i);
            match spec.compile(&cfg.tess) {
                Ok(e) => Ok(Some(e.eval(&cfg.colors))),
                Err(EventError::Uncertified) => Ok(None),
                Err(e) => Err(e),
            }
        },
        |v| v.iter().any(|o| o.is_err()) || relative_precision(v.iter().flatten().flatten().copied(), 0.05),
    );
    let s = s.into_iter().collect::<Result<Vec<_>, _>>()?;
    let vals: Vec<Option<f64>> = s.iter().map(|o| o.map(|b| b as u8 as f64)).collect();
    Ok(McEstimate::from_samples(&vals, seed, json!({ "ann": ann, "arms": arms })))
}

/// Arm probabilities `α_j(r, R)` for every case and every `r`, all from the
/// same configurations of `[−R,R]²`. Output is indexed `[case][r]`.
///
/// Radii are visited from the largest down and a case stops at the first
/// failure, since `A_j(r, R)` shrinks as `r` decreases; where both are
/// evaluated the inclusion is asserted. Replicas double until every
/// estimate reaches 5% relative precision or `replicas.max` is hit.
pub fn estimate_arm_profile(
    big_r: f64,
    rs: &[f64],
    cases: &[ArmCase],
    replicas: Replicas,
    seed: u64,
) -> Result<Vec<Vec<McEstimate>>, EstimatorError> {
    if rs.iter().any(|&r| !(1.0..=big_r).contains(&r)) {
        return Err(EstimatorError::Parameter("need 1 <= r <= R".into()));
    }
    let mut order: Vec<usize> = (0..rs.len()).collect();
    order.sort_by(|&a, &b| rs[b].total_cmp(&rs[a]));
    let roi = Window::square([0.0, 0.0], big_r);
    let sectors: Vec<Sector> = {
        let mut s: Vec<Sector> = cases.iter().map(|c| c.sector).collect();
        s.dedup();
        s
    };
    let one = |i: u64| -> Option<Vec<Vec<bool>>> {
        let cfg = replica_config(&roi, seed, i);
        if !check_padding_valid(&cfg.tess, &roi) {
            return None;
        }
        let mut out = vec![vec![false; rs.len()]; cases.len()];
        let mut alive = vec![true; cases.len()];
        for &k in &order {
            let ann = AnnulusSpec::new(rs[k], big_r);
            for &sector in &sectors {
                let live: Vec<usize> = (0..cases.len()).filter(|&c| alive[c] && cases[c].sector == sector).collect();
                if live.is_empty() {
                    continue;
                }
                if ann.r == ann.big_r {
                    live.iter().for_each(|&c| out[c][k] = true);
                    continue;
                }
                let g = RegionGraph::build(&cfg.tess, ann.region(sector)).ok()?;
                for c in live {
                    let arms = ArmSpec::new(cases[c].j, sector);
                    out[c][k] = realizes(&g, &cfg.colors, &arms.pattern, arms.cyclic());
                    alive[c] = out[c][k];
                }
            }
        }
        // Wider annuli contain the smaller-r events; the early stop relies on it.
        for row in &out {
            for w in order.windows(2) {
                assert!(!row[w[1]] || row[w[0]], "arm event not nested in r");
            }
        }
        Some(out)
    };
    let s = run_adaptive(replicas, one, |v| {
        (0..cases.len())
            .all(|c| (0..rs.len()).all(|k| relative_precision(v.iter().flatten().map(|o| o[c][k]), 0.05)))
    });
    let mut res = Vec::new();
    for (c, case) in cases.iter().enumerate() {
        let mut row = Vec::new();
        for (k, &r) in rs.iter().enumerate() {
            let vals: Vec<Option<f64>> = s.iter().map(|o| o.as_ref().map(|v| v[c][k] as u8 as f64)).collect();
            row.push(McEstimate::from_samples(
                &vals,
                seed,
                json!({ "j": case.j, "sector": case.sector, "r": r, "R": big_r }),
            ));
        }
        res.push(row);
    }
    Ok(res)
}

/// The region `W` on which the second coloring is resampled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Resample {
    /// Both colorings coincide.
    Empty,
    /// `W = {y > 0}`: the colorings share the lower half-plane.
    UpperHalfPlane,
    Box { window: Window },
    /// Two conditionally independent colorings of the same points.
    All,
}

impl Resample {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        match self {
            Resample::Empty => false,
            Resample::UpperHalfPlane => p[1] > 0.0,
            Resample::Box { window } => window.contains(p),
            Resample::All => true,
        }
    }
}

/// `ω″`: equal to `ω′` off `W`, fresh fair colors on `η ∩ W`.
pub fn coupled_colors(points: &[[f64; 2]], colors: &[Color], w: Resample, rng: &mut rng::Rng) -> Vec<Color> {
    let fresh = random_colors(points.len(), 0.5, rng);
    points.iter().zip(colors).zip(fresh).map(|((&p, &c), f)| if w.contains(p) { f } else { c }).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoupledEstimates {
    /// `P[ω′ ∈ E, ω″ ∈ E]` per event.
    pub pair: Vec<McEstimate>,
    /// `P[ω′ ∈ E]` per event, from the same replicas.
    pub single: Vec<McEstimate>,
}

/// Coupled-pair probabilities of several events on shared configurations of
/// `roi`; each replica builds one tessellation and compiles each event once.
pub fn estimate_coupled(
    specs: &[EventSpec],
    w: Resample,
    roi: Window,
    replicas: usize,
    seed: u64,
) -> Result<CoupledEstimates, EstimatorError> {
    let s: Vec<Option<Vec<(bool, bool)>>> = super::par_map(replicas, |i| {
        let cfg = replica_config(&roi, seed, i as u64);
        let mut r = rng::stream(rng::replica_seed(seed, i as u64), rng::tag::COLORS_ALT, 0);
        let alt = coupled_colors(&cfg.tess.points.points, &cfg.colors, w, &mut r);
        let mut out = Vec::new();
        for spec in specs {
            match spec.compile(&cfg.tess) {
                Ok(ev) => {
                    let a = ev.eval(&cfg.colors);
                    out.push((a, a && ev.eval(&alt)));
                }
                Err(EventError::Uncertified) => return Some(Err(())),
                Err(_) => return None,
            }
        }
        Some(Ok(out))
    })
    .into_iter()
    .map(|o| match o {
        None => None,
        Some(Err(())) => Some(None),
        Some(Ok(v)) => Some(Some(v)),
    })
    .collect::<Option<Vec<_>>>()
    .ok_or(EstimatorError::Parameter("event does not compile".into()))?;
    let mut pair = Vec::new();
    let mut single = Vec::new();
    for (k, spec) in specs.iter().enumerate() {
        let params = json!({ "event": spec, "W": w });
        let a: Vec<Option<f64>> = s.iter().map(|o| o.as_ref().map(|v| v[k].0 as u8 as f64)).collect();
        let b: Vec<Option<f64>> = s.iter().map(|o| o.as_ref().map(|v| v[k].1 as u8 as f64)).collect();
        single.push(McEstimate::from_samples(&a, seed, params.clone()));
        pair.push(McEstimate::from_samples(&b, seed, params));
    }
    Ok(CoupledEstimates { pair, single })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuenchedMoment {
    /// `E[P^η[A]²]`.
    pub second: McEstimate,
    pub annealed: McEstimate,
    /// `√second / annealed`, delta-method stderr.
    pub ratio: McEstimate,
}

pub fn estimate_quenched_second_moment(
    spec: &EventSpec,
    replicas: usize,
    seed: u64,
) -> Result<QuenchedMoment, EstimatorError> {
    let roi = spec.support().ok_or(EstimatorError::Parameter("event needs a bounded support".into()))?;
    let c = estimate_coupled(std::slice::from_ref(spec), Resample::All, roi, replicas, seed)?;
    let (second, annealed) = (c.pair[0].clone(), c.single[0].clone());
    let (q, a) = (second.value, annealed.value);
    let ratio = q.sqrt() / a;
    // Delta method with per-replica pairs (X=pair, Y=single), which are correlated.
    let s = second.n_effective as f64;
    let cov = q * (1.0 - a);
    let var = ratio * ratio * (second.stderr.powi(2) / (4.0 * q * q) + annealed.stderr.powi(2) / (a * a) - cov / (s * q * a));
    let ratio = McEstimate::new(ratio, var.max(0.0).sqrt(), second.n_effective, second.n_discarded, seed, second.params.clone());
    Ok(QuenchedMoment { second, annealed, ratio })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FourArmVariant {
    Plain,
    Hat,
    Ext,
    Int,
}

impl FourArmVariant {
    pub fn spec(self, r: f64, big_r: f64) -> EventSpec {
        match self {
            FourArmVariant::Plain => EventSpec::arm(r, big_r, 4, Sector::FullPlane),
            FourArmVariant::Hat => EventSpec::hat(r, big_r, 4, HatVariant::Hat),
            FourArmVariant::Ext => EventSpec::hat(r, big_r, 4, HatVariant::Ext),
            FourArmVariant::Int => EventSpec::hat(r, big_r, 4, HatVariant::Int),
        }
    }
}

/// `β_4^{W}(r, R)` for each variant, all from the same coupled pairs.
pub fn estimate_coupled_fourarm(
    w: Resample,
    r: f64,
    big_r: f64,
    variants: &[FourArmVariant],
    replicas: usize,
    seed: u64,
) -> Result<Vec<McEstimate>, EstimatorError> {
    let specs: Vec<EventSpec> = variants.iter().map(|v| v.spec(r, big_r)).collect();
    let roi = AnnulusSpec::new(r, big_r).outer_box();
    Ok(estimate_coupled(&specs, w, roi, replicas, seed)?.pair)
}

/// `α_j(r1,r3) / (α_j(r1,r2) α_j(r2,r3))` with all three events evaluated on
/// each configuration; delta-method stderr from the per-replica covariances.
pub fn qm_ratio(j: usize, r1: f64, r2: f64, r3: f64, replicas: usize, seed: u64) -> Result<McEstimate, EstimatorError> {
    if !(1.0 <= r1 && r1 <= r2 && r2 <= r3) {
        return Err(EstimatorError::Parameter("need 1 <= r1 <= r2 <= r3".into()));
    }
    let specs = [
        EventSpec::arm(r1, r3, j, Sector::FullPlane),
        EventSpec::arm(r1, r2, j, Sector::FullPlane),
        EventSpec::arm(r2, r3, j, Sector::FullPlane),
    ];
    let roi = Window::square([0.0, 0.0], r3);
    let s: Vec<Option<[f64; 3]>> = super::par_map(replicas, |i| {
        let cfg = replica_config(&roi, seed, i as u64);
        let mut v = [0.0; 3];
        for (k, spec) in specs.iter().enumerate() {
            v[k] = spec.compile(&cfg.tess).ok()?.eval(&cfg.colors) as u8 as f64;
        }
        Some(v)
    });
    let kept: Vec<[f64; 3]> = s.iter().flatten().copied().collect();
    let n = kept.len() as f64;
    let m: Vec<f64> = (0..3).map(|k| kept.iter().map(|v| v[k]).sum::<f64>() / n).collect();
    let ratio = m[0] / (m[1] * m[2]);
    let grad = [1.0 / (m[1] * m[2]), -ratio / m[1], -ratio / m[2]];
    let mut var = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            let c = kept.iter().map(|v| (v[a] - m[a]) * (v[b] - m[b])).sum::<f64>() / (n - 1.0);
            var += grad[a] * grad[b] * c;
        }
    }
    let params = json!({ "j": j, "r1": r1, "r2": r2, "r3": r3 });
    let disc = (s.len() - kept.len()) as u64;
    Ok(McEstimate::new(ratio, (var / n).max(0.0).sqrt(), kept.len() as u64, disc, seed, params))
}
